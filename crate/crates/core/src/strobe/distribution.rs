use super::{OutcomeSequence, Scheme, Stroboscope};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::qstate::{block_weight, blockwise_trace, DensityMatrix, MesostatePartition};
use crate::scalar::Real;

/// Exact joint distribution of all outcome sequences of a fixed length.
///
/// Probabilities are stored in lexicographic order of the sequences, block
/// order taken from the partition: sequence `(b_0, …, b_m)` sits at
/// `Σ b_i B^{m-i}` for `B` blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct LumpedDistribution<T> {
    pub scheme: Scheme,
    labels: Vec<String>,
    length: usize,
    probs: Vec<T>,
}

impl<T: Real> LumpedDistribution<T> {
    /// Number of outcomes per sequence (`n + 1` for a full run).
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn blocks(&self) -> usize {
        self.labels.len()
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probs
    }

    pub fn total(&self) -> T {
        self.probs.iter().copied().sum()
    }

    fn index(&self, seq: &[usize]) -> Result<usize> {
        if seq.len() != self.length {
            return Err(Error::DimensionMismatch {
                expected: self.length,
                found: seq.len(),
            });
        }
        let b = self.blocks();
        seq.iter().try_fold(0usize, |acc, &s| {
            if s >= b {
                Err(Error::IndexOutOfRange { index: s, dim: b })
            } else {
                Ok(acc * b + s)
            }
        })
    }

    pub fn get(&self, seq: &[usize]) -> Result<T> {
        Ok(self.probs[self.index(seq)?])
    }

    pub fn sequence_at(&self, mut index: usize) -> OutcomeSequence {
        let b = self.blocks();
        let mut seq = vec![0; self.length];
        for slot in seq.iter_mut().rev() {
            *slot = index % b;
            index /= b;
        }
        OutcomeSequence(seq)
    }

    pub fn iter(&self) -> impl Iterator<Item = (OutcomeSequence, T)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.sequence_at(i), p))
    }

    /// Sums out position `k`; the result has `length - 1` outcomes.
    /// Summation runs over the removed outcome in block order.
    pub fn marginalize(&self, k: usize) -> Result<Self> {
        if k >= self.length {
            return Err(Error::IndexOutOfRange {
                index: k,
                dim: self.length,
            });
        }
        if self.length == 1 {
            return Err(Error::InvalidArgument("cannot marginalize a single outcome".into()));
        }
        let b = self.blocks();
        let inner = b.pow((self.length - 1 - k) as u32);
        let outer = b.pow(k as u32);
        let mut probs = Vec::with_capacity(outer * inner);
        for hi in 0..outer {
            for lo in 0..inner {
                let mut acc = T::zero();
                for x in 0..b {
                    acc = acc + self.probs[(hi * b + x) * inner + lo];
                }
                probs.push(acc);
            }
        }
        Ok(Self {
            scheme: self.scheme,
            labels: self.labels.clone(),
            length: self.length - 1,
            probs,
        })
    }

    /// Distribution of the outcome at position `k` alone.
    pub fn marginal_at(&self, k: usize) -> Result<Vec<T>> {
        if k >= self.length {
            return Err(Error::IndexOutOfRange {
                index: k,
                dim: self.length,
            });
        }
        let b = self.blocks();
        let inner = b.pow((self.length - 1 - k) as u32);
        let mut out = vec![T::zero(); b];
        for (i, &p) in self.probs.iter().enumerate() {
            let x = (i / inner) % b;
            out[x] = out[x] + p;
        }
        Ok(out)
    }

    /// Kolmogorov consistency: compares `without_k`, the distribution of the
    /// same run with measurement `k` omitted, against this distribution
    /// summed over outcome `k`. Returns the largest absolute discrepancy.
    pub fn kolmogorov_violation(&self, without_k: &Self, k: usize) -> Result<T> {
        if without_k.labels != self.labels {
            return Err(Error::LabelMismatch);
        }
        let summed = self.marginalize(k)?;
        if summed.probs.len() != without_k.probs.len() {
            return Err(Error::DimensionMismatch {
                expected: summed.probs.len(),
                found: without_k.probs.len(),
            });
        }
        Ok(summed
            .probs
            .iter()
            .zip(&without_k.probs)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max))
    }
}

impl<T: Real> Stroboscope<T> {
    /// Every sequence of `n + 1` outcomes with its probability.
    pub fn distribution(
        &self,
        rho0: &DensityMatrix<T>,
        scheme: Scheme,
        part: &MesostatePartition,
        n: usize,
    ) -> Result<LumpedDistribution<T>> {
        self.validate(rho0, scheme, part, n)?;
        self.enumerate(rho0.matrix(), scheme, part, &vec![true; n + 1])
    }

    /// The same run with the measurement at epoch `k` left out; the system
    /// evolves for `2τ` across the gap. Sequences have `n` outcomes.
    pub fn distribution_without(
        &self,
        rho0: &DensityMatrix<T>,
        scheme: Scheme,
        part: &MesostatePartition,
        n: usize,
        k: usize,
    ) -> Result<LumpedDistribution<T>> {
        self.validate(rho0, scheme, part, n)?;
        if k > n {
            return Err(Error::IndexOutOfRange { index: k, dim: n + 1 });
        }
        if n == 0 {
            return Err(Error::InvalidArgument(
                "omitting the only measurement leaves nothing to compare".into(),
            ));
        }
        let mut measured = vec![true; n + 1];
        measured[k] = false;
        self.enumerate(rho0.matrix(), scheme, part, &measured)
    }

    fn enumerate(
        &self,
        rho0: &ComplexMatrix<T>,
        scheme: Scheme,
        part: &MesostatePartition,
        measured: &[bool],
    ) -> Result<LumpedDistribution<T>> {
        let length = measured.iter().filter(|&&m| m).count();
        let mut probs = Vec::with_capacity(part.len().pow(length as u32));
        self.descend(rho0, 0, measured, scheme, part, &mut probs);
        Ok(LumpedDistribution {
            scheme,
            labels: part.labels(),
            length,
            probs,
        })
    }

    fn descend(
        &self,
        state: &ComplexMatrix<T>,
        epoch: usize,
        measured: &[bool],
        scheme: Scheme,
        part: &MesostatePartition,
        out: &mut Vec<T>,
    ) {
        let last = epoch + 1 == measured.len();
        if !measured[epoch] {
            if last {
                out.push(blockwise_trace(state, part));
            } else {
                self.descend(&self.step(state), epoch + 1, measured, scheme, part, out);
            }
            return;
        }
        let remaining = measured[epoch + 1..].iter().filter(|&&m| m).count();
        for b in 0..part.len() {
            let members = part.members(b);
            let w = block_weight(state, members);
            if last {
                out.push(w);
            } else if w < self.zero_branch() {
                out.extend(std::iter::repeat_n(T::zero(), part.len().pow(remaining as u32)));
            } else {
                let next = self.step(&scheme.post(state, members));
                self.descend(&next, epoch + 1, measured, scheme, part, out);
            }
        }
    }
}
