use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::qstate::MesostatePartition;
use crate::scalar::Real;

/// Real column-stochastic matrix with `get(x, y) = T_x^y`, the probability
/// of going from source `y` to destination `x` in one period.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix<T> {
    dim: usize,
    tau: T,
    data: Vec<T>,
}

impl<T: Real> TransitionMatrix<T> {
    /// `T_x^y = |⟨x|U|y⟩|²`.
    pub fn from_propagator(u: &ComplexMatrix<T>, tau: T) -> Self {
        let dim = u.dim();
        Self {
            dim,
            tau,
            data: u.as_slice().iter().map(|z| z.norm_sqr()).collect(),
        }
    }

    /// Builds from row-major entries, `data[x * dim + y] = T_x^y`.
    pub fn from_vec(dim: usize, tau: T, data: Vec<T>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, tau, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    #[inline]
    pub fn get(&self, dest: usize, source: usize) -> T {
        self.data[dest * self.dim + source]
    }

    /// Sum over destinations for each source; 1 for a stochastic matrix.
    pub fn column_sums(&self) -> Vec<T> {
        (0..self.dim)
            .map(|y| (0..self.dim).map(|x| self.get(x, y)).sum())
            .collect()
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.dim)
            .map(|x| (0..self.dim).map(|y| self.get(x, y)).sum())
            .collect()
    }

    /// `Σ_{x∈dest} T_x^source`.
    pub fn block_sum(&self, dest: &[usize], source: usize) -> T {
        dest.iter().map(|&x| self.get(x, source)).sum()
    }

    /// One period of evolution of a probability vector.
    pub fn apply(&self, p: &[T]) -> Vec<T> {
        (0..self.dim)
            .map(|x| (0..self.dim).map(|y| self.get(x, y) * p[y]).sum())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LumpabilityWitness<T> {
    pub dest_block: usize,
    pub source_block: usize,
    /// Two sources in `source_block` whose probabilities of landing in
    /// `dest_block` differ by `difference`.
    pub sources: (usize, usize),
    pub difference: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LumpabilityReport<T> {
    pub lumpable: bool,
    /// `T̄_X^Y = Σ_{x∈X} T_x^y` for the first member `y` of `Y`; present only
    /// when the partition is lumpable.
    pub lumped: Option<TransitionMatrix<T>>,
    pub max_violation: T,
    /// Pair realizing `max_violation`; present only when not lumpable.
    pub witness: Option<LumpabilityWitness<T>>,
}

/// Checks whether every pair of sources inside a block sends the same total
/// probability into each destination block.
pub fn check_lumpability<T: Real>(
    t: &TransitionMatrix<T>,
    part: &MesostatePartition,
    tol: T,
) -> Result<LumpabilityReport<T>> {
    if t.dim() != part.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            found: part.dim(),
        });
    }
    let mut max_violation = T::zero();
    let mut worst: Option<LumpabilityWitness<T>> = None;
    for (dest_block, dest) in part.blocks().iter().enumerate() {
        for (source_block, source) in part.blocks().iter().enumerate() {
            let sums: Vec<T> = source
                .members
                .iter()
                .map(|&y| t.block_sum(&dest.members, y))
                .collect();
            for i in 0..sums.len() {
                for j in i + 1..sums.len() {
                    let diff = (sums[i] - sums[j]).abs();
                    if diff > max_violation {
                        max_violation = diff;
                        worst = Some(LumpabilityWitness {
                            dest_block,
                            source_block,
                            sources: (source.members[i], source.members[j]),
                            difference: diff,
                        });
                    }
                }
            }
        }
    }
    let lumpable = max_violation <= tol;
    let lumped = lumpable.then(|| {
        let b = part.len();
        let mut data = Vec::with_capacity(b * b);
        for dest in part.blocks() {
            for source in part.blocks() {
                data.push(t.block_sum(&dest.members, source.members[0]));
            }
        }
        TransitionMatrix {
            dim: b,
            tau: t.tau(),
            data,
        }
    });
    Ok(LumpabilityReport {
        lumpable,
        lumped,
        max_violation,
        witness: if lumpable { None } else { worst },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_unitary, seeded};

    #[test]
    fn singletons_are_always_lumpable() {
        let mut rng = seeded(3);
        let u: ComplexMatrix<f64> = haar_unitary(5, &mut rng);
        let t = TransitionMatrix::from_propagator(&u, 1.0);
        let report = check_lumpability(&t, &MesostatePartition::singletons(5), 1e-10).unwrap();
        assert!(report.lumpable);
        assert_eq!(report.max_violation, 0.0);
        assert_eq!(report.lumped.unwrap(), t);
    }

    #[test]
    fn haar_random_is_not_lumpable() {
        let mut rng = seeded(17);
        let u: ComplexMatrix<f64> = haar_unitary(4, &mut rng);
        let t = TransitionMatrix::from_propagator(&u, 1.0);
        let part: MesostatePartition = "L:0,1;R:2,3".parse().unwrap();
        let report = check_lumpability(&t, &part, 1e-10).unwrap();
        assert!(!report.lumpable);
        assert!(report.lumped.is_none());

        // brute-force scan over every (dest block, source pair)
        let mut brute = 0.0f64;
        for dest in part.blocks() {
            for src in part.blocks() {
                for &y in &src.members {
                    for &z in &src.members {
                        brute = brute.max((t.block_sum(&dest.members, y) - t.block_sum(&dest.members, z)).abs());
                    }
                }
            }
        }
        assert_eq!(report.max_violation, brute);
        let w = report.witness.unwrap();
        let dest = part.members(w.dest_block);
        let diff = (t.block_sum(dest, w.sources.0) - t.block_sum(dest, w.sources.1)).abs();
        assert_eq!(diff, brute);
        assert_eq!(part.block_of(w.sources.0).unwrap(), w.source_block);
        assert_eq!(part.block_of(w.sources.1).unwrap(), w.source_block);
    }

    #[test]
    fn unitary_transition_matrix_is_doubly_stochastic() {
        let mut rng = seeded(23);
        let u: ComplexMatrix<f64> = haar_unitary(6, &mut rng);
        let t = TransitionMatrix::from_propagator(&u, 0.5);
        for s in t.column_sums().into_iter().chain(t.row_sums()) {
            assert!((s - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let t = TransitionMatrix::from_propagator(&ComplexMatrix::<f64>::identity(3), 0.0);
        assert!(check_lumpability(&t, &MesostatePartition::parity(4).unwrap(), 1e-10).is_err());
    }
}
