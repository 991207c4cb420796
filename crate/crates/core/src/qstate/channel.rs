//! Projective measurement channels: ideal (rank-1), von Neumann (lumped,
//! fully decohering) and Lüders (lumped, coherence preserving), plus a
//! dephasing channel interpolating between the last two.

use num_complex::Complex;
use num_traits::Zero;

use super::{DensityMatrix, MesostatePartition};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProjectorKind {
    Rank1(usize),
    Block(String),
}

/// Orthogonal projector `Π_x = |x⟩⟨x|` or `Π̄_A = Σ_{x∈A} Π_x`.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector<T> {
    pub kind: ProjectorKind,
    pub mat: ComplexMatrix<T>,
}

impl<T: Real> Projector<T> {
    pub fn rank1(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        Ok(Self {
            kind: ProjectorKind::Rank1(index),
            mat: indicator(dim, &[index]),
        })
    }

    pub fn block(part: &MesostatePartition, label: &str) -> Result<Self> {
        let b = part.index_of(label)?;
        Ok(Self {
            kind: ProjectorKind::Block(label.to_string()),
            mat: indicator(part.dim(), part.members(b)),
        })
    }

    /// `Π ρ Π` by explicit matrix products.
    pub fn sandwich(&self, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        self.mat.matmul(rho)?.matmul(&self.mat)
    }
}

fn indicator<T: Real>(dim: usize, members: &[usize]) -> ComplexMatrix<T> {
    let mut m = ComplexMatrix::zeros(dim);
    for &i in members {
        m[(i, i)] = Complex::new(T::one(), T::zero());
    }
    m
}

/// Outcome of a single measurement branch. `post` is unnormalized: its trace
/// equals `prob` (up to rounding), and it is the zero matrix when the branch
/// is lighter than the zero-branch tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct Collapse<T> {
    pub prob: T,
    pub post: DensityMatrix<T>,
    pub zero_branch: bool,
}

impl<T: Real> Collapse<T> {
    /// Post-measurement state conditioned on this outcome.
    pub fn conditioned(&self) -> Result<DensityMatrix<T>> {
        if self.zero_branch {
            return Err(Error::ZeroProbabilityBranch {
                prob: self.prob.to_f64_lossy(),
            });
        }
        self.post.normalize()
    }

    fn build(prob: T, post: ComplexMatrix<T>) -> Self {
        let zero_branch = prob < T::lit(T::tolerances().zero_branch);
        let post = if zero_branch {
            DensityMatrix::zeros(post.dim())
        } else {
            DensityMatrix::from_raw(post, false)
        };
        Self {
            prob,
            post,
            zero_branch,
        }
    }
}

/// Σ_{i∈members} Re ρ_ii, summed in member order. Every branch probability in
/// the crate goes through this one function so that marginals over the final
/// outcome reproduce unmeasured traces bit for bit.
#[inline]
pub(crate) fn block_weight<T: Real>(rho: &ComplexMatrix<T>, members: &[usize]) -> T {
    members.iter().fold(T::zero(), |acc, &i| acc + rho[(i, i)].re)
}

/// Trace summed block by block in partition order.
pub(crate) fn blockwise_trace<T: Real>(rho: &ComplexMatrix<T>, part: &MesostatePartition) -> T {
    (0..part.len()).fold(T::zero(), |acc, b| acc + block_weight(rho, part.members(b)))
}

/// `Π̄ ρ Π̄`: keeps the `members × members` sub-block.
pub(crate) fn lueders_post<T: Real>(rho: &ComplexMatrix<T>, members: &[usize]) -> ComplexMatrix<T> {
    let mut out = ComplexMatrix::zeros(rho.dim());
    for &i in members {
        for &j in members {
            out[(i, j)] = rho[(i, j)];
        }
    }
    out
}

/// `Σ_{x∈A} Π_x ρ Π_x`: keeps only the block's diagonal.
pub(crate) fn von_neumann_post<T: Real>(rho: &ComplexMatrix<T>, members: &[usize]) -> ComplexMatrix<T> {
    let mut out = ComplexMatrix::zeros(rho.dim());
    for &i in members {
        out[(i, i)] = Complex::new(rho[(i, i)].re, T::zero());
    }
    out
}

fn check_dims<T: Real>(rho: &DensityMatrix<T>, part: &MesostatePartition) -> Result<()> {
    if rho.dim() != part.dim() {
        return Err(Error::DimensionMismatch {
            expected: part.dim(),
            found: rho.dim(),
        });
    }
    Ok(())
}

/// Rank-1 projective measurement with outcome `x`: `p = Tr{Π_x ρ}`,
/// post-state `Π_x ρ Π_x`.
pub fn ideal_collapse<T: Real>(rho: &DensityMatrix<T>, x: usize) -> Result<Collapse<T>> {
    if x >= rho.dim() {
        return Err(Error::IndexOutOfRange {
            index: x,
            dim: rho.dim(),
        });
    }
    let m = rho.matrix();
    Ok(Collapse::build(block_weight(m, &[x]), von_neumann_post(m, &[x])))
}

/// Lumped, decohering measurement reporting mesostate `label`.
pub fn von_neumann_collapse<T: Real>(
    rho: &DensityMatrix<T>,
    part: &MesostatePartition,
    label: &str,
) -> Result<Collapse<T>> {
    check_dims(rho, part)?;
    let members = part.members(part.index_of(label)?);
    let m = rho.matrix();
    Ok(Collapse::build(block_weight(m, members), von_neumann_post(m, members)))
}

/// Lumped measurement with the high-rank projector of mesostate `label`; the
/// post-state keeps the coherences inside the block.
pub fn lueders_collapse<T: Real>(
    rho: &DensityMatrix<T>,
    part: &MesostatePartition,
    label: &str,
) -> Result<Collapse<T>> {
    check_dims(rho, part)?;
    let members = part.members(part.index_of(label)?);
    let m = rho.matrix();
    Ok(Collapse::build(block_weight(m, members), lueders_post(m, members)))
}

/// Strength of the dephasing channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Dephasing<T> {
    /// Off-diagonals are multiplied by `e^{-γ}`.
    Rate(T),
    /// γ = ∞: complete decoherence in the measured basis.
    Complete,
}

pub fn dephase<T: Real>(rho: &DensityMatrix<T>, gamma: Dephasing<T>) -> Result<DensityMatrix<T>> {
    let factor = match gamma {
        Dephasing::Complete => T::zero(),
        Dephasing::Rate(g) if g >= T::zero() => (-g).exp(),
        Dephasing::Rate(g) => return Err(Error::NegativeGamma(g.to_f64_lossy())),
    };
    let m = rho.matrix();
    let n = m.dim();
    let out = ComplexMatrix::from_fn(n, |i, j| {
        if i == j {
            m[(i, i)]
        } else if factor.is_zero() {
            Complex::zero()
        } else {
            m[(i, j)] * factor
        }
    });
    Ok(DensityMatrix::from_raw(out, rho.is_normalized()))
}
