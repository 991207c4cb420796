//! Trace-distance witness of non-Markovianity on single-epoch marginals.
//!
//! `D_n = Σ_X |P_{n-1}[X](ρ_0) - P_{n-1}[X](σ_0)|` where `P_m` is the
//! Lüders-scheme distribution of the outcome at epoch `m` (epoch 0 being the
//! first measurement, before any evolution). Note the shift: `D_1` compares
//! the first outcomes. A Markovian lumped process cannot increase the
//! distance, so `ΔD_n = D_{n+1} - D_n > 0` certifies memory.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::qstate::{DensityMatrix, MesostatePartition};
use crate::scalar::Real;
use crate::strobe::{Scheme, Stroboscope};

/// Distribution of a single outcome, keyed by block label.
#[derive(Clone, Debug, PartialEq)]
pub struct Marginal<T> {
    pub labels: Vec<String>,
    pub probs: Vec<T>,
}

impl<T: Real> Marginal<T> {
    pub fn get(&self, label: &str) -> Option<T> {
        self.labels.iter().position(|l| l == label).map(|i| self.probs[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, T)> + '_ {
        self.labels.iter().map(String::as_str).zip(self.probs.iter().copied())
    }
}

/// Marginal of the outcome at epoch `n` of a run with `n + 1` measurements.
pub fn marginal_last<T: Real>(
    strobe: &Stroboscope<T>,
    rho0: &DensityMatrix<T>,
    scheme: Scheme,
    part: &MesostatePartition,
    n: usize,
) -> Result<Marginal<T>> {
    let dist = strobe.distribution(rho0, scheme, part, n)?;
    Ok(Marginal {
        labels: dist.labels().to_vec(),
        probs: dist.marginal_at(n)?,
    })
}

/// L1 distance between two marginals over the same labels.
pub fn kolmogorov_distance<T: Real>(p: &Marginal<T>, q: &Marginal<T>) -> Result<T> {
    if p.labels != q.labels {
        return Err(Error::LabelMismatch);
    }
    Ok(p.probs.iter().zip(&q.probs).map(|(a, b)| (*a - *b).abs()).sum())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessResult<T> {
    pub tau: T,
    pub n: usize,
    pub d_n: T,
    pub d_next: T,
    /// `d_next - d_n`.
    pub delta: T,
}

/// `D_n`, `D_{n+1}` and their difference for two preparations.
pub fn delta_d<T: Real>(
    strobe: &Stroboscope<T>,
    rho0: &DensityMatrix<T>,
    sigma0: &DensityMatrix<T>,
    part: &MesostatePartition,
    n: usize,
) -> Result<WitnessResult<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("the witness starts at n = 1".into()));
    }
    if rho0.dim() != sigma0.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho0.dim(),
            found: sigma0.dim(),
        });
    }
    // one enumeration of n + 1 outcomes yields both marginals
    let labels = part.labels();
    let rho = strobe.distribution(rho0, Scheme::Quantum, part, n)?;
    let sigma = strobe.distribution(sigma0, Scheme::Quantum, part, n)?;
    let at = |k: usize| -> Result<T> {
        let p = Marginal {
            labels: labels.clone(),
            probs: rho.marginal_at(k)?,
        };
        let q = Marginal {
            labels: labels.clone(),
            probs: sigma.marginal_at(k)?,
        };
        kolmogorov_distance(&p, &q)
    };
    let d_n = at(n - 1)?;
    let d_next = at(n)?;
    Ok(WitnessResult {
        tau: strobe.tau(),
        n,
        d_n,
        d_next,
        delta: d_next - d_n,
    })
}

/// `√2 |ψ_θ⟩ = |0⟩ + cos θ |2⟩ + sin θ |4⟩`, padded with zeros to `dim`.
pub fn witness_state<T: Real>(dim: usize, theta: T) -> Result<DensityMatrix<T>> {
    if dim < 5 {
        return Err(Error::PreparationUnavailable { dim });
    }
    let s = T::one() / T::lit(2.0).sqrt();
    let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
    amps[0] = Complex::new(s, T::zero());
    amps[2] = Complex::new(s * theta.cos(), T::zero());
    amps[4] = Complex::new(s * theta.sin(), T::zero());
    let mat = ComplexMatrix::outer(&amps, &amps)?;
    Ok(DensityMatrix::from_raw(mat, true))
}

/// `σ_0 = diag(1/2, 0, 1/4, 0, 1/4, 0, …)`.
pub fn witness_reference<T: Real>(dim: usize) -> Result<DensityMatrix<T>> {
    if dim < 5 {
        return Err(Error::PreparationUnavailable { dim });
    }
    let mut w = vec![T::zero(); dim];
    w[0] = T::lit(0.5);
    w[2] = T::lit(0.25);
    w[4] = T::lit(0.25);
    DensityMatrix::diagonal(&w)
}

/// Witness values over a `(θ, τ)` grid, row-major in `θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessGrid<T> {
    pub thetas: Vec<T>,
    pub taus: Vec<T>,
    pub cells: Vec<WitnessResult<T>>,
}

impl<T: Real> WitnessGrid<T> {
    pub fn get(&self, theta_index: usize, tau_index: usize) -> &WitnessResult<T> {
        &self.cells[theta_index * self.taus.len() + tau_index]
    }

    pub fn row(&self, theta_index: usize) -> &[WitnessResult<T>] {
        let w = self.taus.len();
        &self.cells[theta_index * w..(theta_index + 1) * w]
    }

    /// `max_τ |ΔD|` for each row.
    pub fn row_maxima(&self) -> Vec<T> {
        (0..self.thetas.len())
            .map(|i| self.row(i).iter().map(|c| c.delta.abs()).fold(T::zero(), T::max))
            .collect()
    }
}

/// Evaluates [`delta_d`] for the θ-family of preparations against the fixed
/// reference on every grid point. Cells are computed in parallel and
/// returned in grid order.
pub fn scan_theta_tau<T: Real>(
    hamiltonian: &ComplexMatrix<T>,
    part: &MesostatePartition,
    thetas: &[T],
    taus: &[T],
    n: usize,
) -> Result<WitnessGrid<T>> {
    if thetas.is_empty() || taus.is_empty() {
        return Err(Error::InvalidArgument("witness grid axes must be non-empty".into()));
    }
    let dim = hamiltonian.dim();
    let sigma0 = witness_reference(dim)?;
    let strobes = taus
        .par_iter()
        .map(|&tau| Stroboscope::new(hamiltonian, tau))
        .collect::<Result<Vec<_>>>()?;
    let states = thetas
        .iter()
        .map(|&theta| witness_state(dim, theta))
        .collect::<Result<Vec<_>>>()?;
    let cells = (0..thetas.len() * taus.len())
        .into_par_iter()
        .map(|i| delta_d(&strobes[i % taus.len()], &states[i / taus.len()], &sigma0, part, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(WitnessGrid {
        thetas: thetas.to_vec(),
        taus: taus.to_vec(),
        cells,
    })
}

/// Preparation angles in `[0, 2π)` at which `ΔD_1` vanishes for every τ.
///
/// Sign changes of `P_1[first block](ρ_θ) - P_1[first block](σ_0)` at
/// `probe_tau` are bracketed on `samples` uniform angles and bisected; a
/// root is kept only if `max_τ |ΔD_1| < tol` over `confirm_taus`.
pub fn find_zero_bands<T: Real>(
    hamiltonian: &ComplexMatrix<T>,
    part: &MesostatePartition,
    probe_tau: T,
    samples: usize,
    confirm_taus: &[T],
    tol: T,
) -> Result<Vec<T>> {
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least two θ samples".into()));
    }
    let dim = hamiltonian.dim();
    let sigma0 = witness_reference(dim)?;
    let probe = Stroboscope::new(hamiltonian, probe_tau)?;
    let reference = marginal_last(&probe, &sigma0, Scheme::Quantum, part, 1)?.probs[0];
    let signed = |theta: T| -> Result<T> {
        let rho = witness_state(dim, theta)?;
        Ok(marginal_last(&probe, &rho, Scheme::Quantum, part, 1)?.probs[0] - reference)
    };
    let step = T::TAU() / T::from_usize_lossy(samples);
    let confirm = confirm_taus
        .iter()
        .map(|&tau| Stroboscope::new(hamiltonian, tau))
        .collect::<Result<Vec<_>>>()?;

    let mut bands = Vec::new();
    let mut a = T::zero();
    let mut fa = signed(a)?;
    for k in 1..=samples {
        let b = step * T::from_usize_lossy(k);
        let fb = signed(b)?;
        if fa == T::zero() || (fa < T::zero()) != (fb < T::zero()) {
            let root = if fa == T::zero() { a } else { bisect(&signed, a, b, fa)? };
            let rho = witness_state(dim, root)?;
            let mut worst = T::zero();
            for s in &confirm {
                worst = worst.max(delta_d(s, &rho, &sigma0, part, 1)?.delta.abs());
            }
            if worst < tol {
                bands.push(root);
            }
        }
        a = b;
        fa = fb;
    }
    Ok(bands)
}

fn bisect<T: Real>(f: &impl Fn(T) -> Result<T>, mut lo: T, mut hi: T, mut flo: T) -> Result<T> {
    let two = T::lit(2.0);
    for _ in 0..200 {
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == T::zero() {
            return Ok(mid);
        }
        if (fm < T::zero()) == (flo < T::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / two)
}
