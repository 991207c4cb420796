//! Monte Carlo realization of stroboscopic measurement records.
//!
//! At each epoch the outcome is drawn by inverse CDF over the blocks in
//! partition order using one uniform variate from the trajectory's own
//! ChaCha stream (`random::stream(seed, trajectory_index)`), then the
//! scheme's collapse is applied and the state renormalized. Trajectory `i`
//! of a batch is therefore independent of the batch size and of how the
//! batch is scheduled across threads.

use rand::Rng;
use rayon::prelude::*;

use super::{OutcomeSequence, Scheme, Stroboscope};
use crate::error::Result;
use crate::linalg::ComplexMatrix;
use crate::qstate::{block_weight, DensityMatrix, MesostatePartition};
use crate::random::{stream, uniform};
use crate::scalar::Real;

impl<T: Real> Stroboscope<T> {
    /// One trajectory of `n + 1` outcomes; identical to trajectory 0 of
    /// [`Stroboscope::sample_trajectories`] with the same seed.
    pub fn sample_trajectory(
        &self,
        rho0: &DensityMatrix<T>,
        scheme: Scheme,
        part: &MesostatePartition,
        n: usize,
        seed: u64,
    ) -> Result<OutcomeSequence> {
        self.validate_sampling(rho0, scheme, part)?;
        Ok(self.sample_with(rho0.matrix(), scheme, part, n, &mut stream(seed, 0)))
    }

    pub fn sample_trajectories(
        &self,
        rho0: &DensityMatrix<T>,
        scheme: Scheme,
        part: &MesostatePartition,
        n: usize,
        count: usize,
        seed: u64,
    ) -> Result<Vec<OutcomeSequence>> {
        self.validate_sampling(rho0, scheme, part)?;
        Ok((0..count)
            .into_par_iter()
            .map(|i| self.sample_with(rho0.matrix(), scheme, part, n, &mut stream(seed, i as u64)))
            .collect())
    }

    fn validate_sampling(
        &self,
        rho0: &DensityMatrix<T>,
        scheme: Scheme,
        part: &MesostatePartition,
    ) -> Result<()> {
        // sampling is linear in n, so only the shape checks apply
        self.validate(rho0, scheme, part, 0)
    }

    fn sample_with<R: Rng>(
        &self,
        rho0: &ComplexMatrix<T>,
        scheme: Scheme,
        part: &MesostatePartition,
        n: usize,
        rng: &mut R,
    ) -> OutcomeSequence {
        let mut state = rho0.clone();
        let mut outcomes = Vec::with_capacity(n + 1);
        let mut weights = vec![T::zero(); part.len()];
        for epoch in 0..=n {
            for (b, w) in weights.iter_mut().enumerate() {
                *w = block_weight(&state, part.members(b)).max(T::zero());
            }
            let total: T = weights.iter().copied().sum();
            let target = T::lit(uniform(rng)) * total;
            let mut acc = T::zero();
            let mut chosen = None;
            for (b, &w) in weights.iter().enumerate() {
                if w <= T::zero() {
                    continue;
                }
                acc = acc + w;
                chosen = Some(b);
                if target < acc {
                    break;
                }
            }
            let b = chosen.expect("state has positive trace");
            outcomes.push(b);
            if epoch == n {
                break;
            }
            let post = scheme.post(&state, part.members(b));
            let inv = num_complex::Complex::new(T::one() / weights[b], T::zero());
            state = self.step(&post.scale(inv));
        }
        OutcomeSequence(outcomes)
    }
}
