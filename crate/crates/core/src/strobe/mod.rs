//! Stroboscopic measurement statistics.
//!
//! A [`Stroboscope`] fixes a Hamiltonian and a measurement period `τ`; the
//! system is measured at `τ_k = kτ`, `k = 0..=n`, and evolves unitarily with
//! `U = exp(-iHτ)` in between. Joint outcome probabilities are computed by
//! propagating the unnormalized branch state through the chain
//! `Π_{X_n} ∘ U ∘ … ∘ Π_{X_0} ∘ ρ_0`; the trace of the final branch is the
//! probability of the whole sequence.
//!
//! Exact enumeration visits every outcome sequence, so it is capped at
//! [`MAX_STEPS`] steps (`n + 1 <= 9` measurements) and [`MAX_DIM`] levels.

mod coherence;
mod distribution;
mod sampler;
mod transition;

use std::fmt;
use std::ops::Deref;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix};
use crate::qstate::{block_weight, lueders_post, von_neumann_post, DensityMatrix, MesostatePartition};
use crate::scalar::{Real, Tolerances};

pub use distribution::LumpedDistribution;
pub use transition::{check_lumpability, LumpabilityReport, LumpabilityWitness, TransitionMatrix};

/// Largest `n` (number of unitary steps) accepted by exact enumeration.
pub const MAX_STEPS: usize = 8;
/// Largest Hilbert-space dimension accepted by exact enumeration.
pub const MAX_DIM: usize = 16;

/// Which collapse is applied at every measurement epoch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Rank-1 projectors; outcomes are microstates. Requires a singleton
    /// partition.
    Ideal,
    /// von Neumann lumping: the branch state is fully decohered inside the
    /// observed mesostate.
    Classical,
    /// Lüders lumping: the branch state keeps its intra-block coherence.
    Quantum,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Ideal => "ideal",
            Scheme::Classical => "classical",
            Scheme::Quantum => "quantum",
        }
    }

    pub(crate) fn post<T: Real>(self, rho: &ComplexMatrix<T>, members: &[usize]) -> ComplexMatrix<T> {
        match self {
            Scheme::Classical | Scheme::Ideal => von_neumann_post(rho, members),
            Scheme::Quantum => lueders_post(rho, members),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ideal" => Ok(Scheme::Ideal),
            "classical" | "von-neumann" | "vonneumann" => Ok(Scheme::Classical),
            "quantum" | "lueders" | "luders" => Ok(Scheme::Quantum),
            other => Err(Error::InvalidArgument(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Outcomes at epochs `0, τ, 2τ, …`, stored as block indices of the
/// governing partition (microstate indices for the ideal scheme).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OutcomeSequence(pub Vec<usize>);

impl OutcomeSequence {
    pub fn from_labels<S: AsRef<str>>(part: &MesostatePartition, labels: &[S]) -> Result<Self> {
        labels
            .iter()
            .map(|l| part.index_of(l.as_ref()))
            .collect::<Result<Vec<_>>>()
            .map(OutcomeSequence)
    }

    pub fn labels<'a>(&self, part: &'a MesostatePartition) -> Vec<&'a str> {
        self.0.iter().map(|&b| part.label(b)).collect()
    }
}

impl Deref for OutcomeSequence {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for OutcomeSequence {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

/// A Hamiltonian observed at a fixed stroboscopic period.
#[derive(Clone, Debug)]
pub struct Stroboscope<T> {
    tau: T,
    u: ComplexMatrix<T>,
    u_adj: ComplexMatrix<T>,
    tol: Tolerances,
}

impl<T: Real> Stroboscope<T> {
    pub fn new(hamiltonian: &ComplexMatrix<T>, tau: T) -> Result<Self> {
        Self::with_tolerances(hamiltonian, tau, T::tolerances())
    }

    pub fn with_tolerances(hamiltonian: &ComplexMatrix<T>, tau: T, tol: Tolerances) -> Result<Self> {
        let eig = hermitian_eig(hamiltonian)?;
        let u = if tau == T::zero() {
            ComplexMatrix::identity(hamiltonian.dim())
        } else {
            eig.propagator(tau)
        };
        Ok(Self::assemble(u, tau, tol))
    }

    /// Uses a given one-period unitary directly.
    pub fn from_propagator(u: ComplexMatrix<T>, tau: T) -> Result<Self> {
        let tol = T::tolerances();
        let defect = u.unitarity_defect();
        if !(defect <= T::lit(tol.state)) {
            return Err(Error::InvalidArgument(format!(
                "propagator is not unitary (defect {defect:e})"
            )));
        }
        Ok(Self::assemble(u, tau, tol))
    }

    fn assemble(u: ComplexMatrix<T>, tau: T, tol: Tolerances) -> Self {
        let u_adj = u.adjoint();
        Self { tau, u, u_adj, tol }
    }

    #[inline]
    pub fn tau(&self) -> T {
        self.tau
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    pub fn propagator(&self) -> &ComplexMatrix<T> {
        &self.u
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub(crate) fn step(&self, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        rho.conjugated_by_unchecked(&self.u, &self.u_adj)
    }

    pub(crate) fn zero_branch(&self) -> T {
        T::lit(self.tol.zero_branch)
    }

    /// `T_x^y = |⟨x|U|y⟩|²`.
    pub fn transition_matrix(&self) -> TransitionMatrix<T> {
        TransitionMatrix::from_propagator(&self.u, self.tau)
    }

    pub(crate) fn validate(
        &self,
        rho0: &DensityMatrix<T>,
        scheme: Scheme,
        part: &MesostatePartition,
        steps: usize,
    ) -> Result<()> {
        let dim = self.dim();
        if dim > MAX_DIM {
            return Err(Error::CapExceeded {
                what: "dimension",
                requested: dim,
                limit: MAX_DIM,
            });
        }
        if steps > MAX_STEPS {
            return Err(Error::CapExceeded {
                what: "n",
                requested: steps,
                limit: MAX_STEPS,
            });
        }
        for found in [rho0.dim(), part.dim()] {
            if found != dim {
                return Err(Error::DimensionMismatch { expected: dim, found });
            }
        }
        if scheme == Scheme::Ideal && !part.is_singletons() {
            return Err(Error::InvalidPartition(
                "the ideal scheme measures microstates and needs singleton blocks".into(),
            ));
        }
        Ok(())
    }

    fn check_sequence(&self, part: &MesostatePartition, seq: &[usize]) -> Result<()> {
        if seq.is_empty() {
            return Err(Error::InvalidArgument("outcome sequence is empty".into()));
        }
        if let Some(&bad) = seq.iter().find(|&&b| b >= part.len()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                dim: part.len(),
            });
        }
        Ok(())
    }

    /// Probability of observing `seq` (one block index per epoch) under
    /// `scheme`, by sequential unnormalized collapse.
    pub fn joint(
        &self,
        scheme: Scheme,
        rho0: &DensityMatrix<T>,
        part: &MesostatePartition,
        seq: &[usize],
    ) -> Result<T> {
        self.check_sequence(part, seq)?;
        self.validate(rho0, scheme, part, seq.len() - 1)?;
        Ok(self.joint_unchecked(scheme, rho0.matrix(), part, seq))
    }

    fn joint_unchecked(
        &self,
        scheme: Scheme,
        rho0: &ComplexMatrix<T>,
        part: &MesostatePartition,
        seq: &[usize],
    ) -> T {
        let mut state = rho0.clone();
        for (epoch, &b) in seq.iter().enumerate() {
            let members = part.members(b);
            let w = block_weight(&state, members);
            if epoch + 1 == seq.len() {
                return w;
            }
            if w < self.zero_branch() {
                return T::zero();
            }
            state = self.step(&scheme.post(&state, members));
        }
        unreachable!("sequence is non-empty")
    }

    /// Joint distribution of ideal outcomes `x_0, …, x_n` (microstates).
    pub fn joint_ideal(&self, rho0: &DensityMatrix<T>, seq: &[usize]) -> Result<T> {
        self.joint(Scheme::Ideal, rho0, &MesostatePartition::singletons(self.dim()), seq)
    }

    /// `p(x_0) Π_k T_{x_k}^{x_{k-1}}`: the ideal joint probability rebuilt
    /// from the Born distribution and the transition matrix.
    pub fn joint_ideal_factorized(&self, rho0: &DensityMatrix<T>, seq: &[usize]) -> Result<T> {
        let part = MesostatePartition::singletons(self.dim());
        self.check_sequence(&part, seq)?;
        self.validate(rho0, Scheme::Ideal, &part, seq.len() - 1)?;
        let t = self.transition_matrix();
        Ok(seq
            .windows(2)
            .fold(rho0.population(seq[0]), |acc, w| acc * t.get(w[1], w[0])))
    }

    pub fn joint_classical(
        &self,
        rho0: &DensityMatrix<T>,
        part: &MesostatePartition,
        seq: &[usize],
    ) -> Result<T> {
        self.joint(Scheme::Classical, rho0, part, seq)
    }

    /// von Neumann-lumped probability computed the other way round: as the
    /// sum of ideal joint probabilities over every microstate path
    /// compatible with `seq`.
    pub fn joint_classical_by_paths(
        &self,
        rho0: &DensityMatrix<T>,
        part: &MesostatePartition,
        seq: &[usize],
    ) -> Result<T> {
        self.check_sequence(part, seq)?;
        self.validate(rho0, Scheme::Classical, part, seq.len() - 1)?;
        let singles = MesostatePartition::singletons(self.dim());
        let mut path = vec![0usize; seq.len()];
        let mut total = T::zero();
        self.sum_paths(rho0.matrix(), part, &singles, seq, 0, &mut path, &mut total);
        Ok(total)
    }

    #[allow(clippy::too_many_arguments)]
    fn sum_paths(
        &self,
        rho0: &ComplexMatrix<T>,
        part: &MesostatePartition,
        singles: &MesostatePartition,
        seq: &[usize],
        depth: usize,
        path: &mut Vec<usize>,
        total: &mut T,
    ) {
        if depth == seq.len() {
            *total = *total + self.joint_unchecked(Scheme::Ideal, rho0, singles, path);
            return;
        }
        for &x in part.members(seq[depth]) {
            path[depth] = x;
            self.sum_paths(rho0, part, singles, seq, depth + 1, path, total);
        }
    }

    pub fn joint_quantum(
        &self,
        rho0: &DensityMatrix<T>,
        part: &MesostatePartition,
        seq: &[usize],
    ) -> Result<T> {
        self.joint(Scheme::Quantum, rho0, part, seq)
    }

    /// `Q_n = p^Q_n - p^C_n` for one sequence.
    pub fn detectable_coherence(
        &self,
        rho0: &DensityMatrix<T>,
        part: &MesostatePartition,
        seq: &[usize],
    ) -> Result<T> {
        Ok(self.joint_quantum(rho0, part, seq)? - self.joint_classical(rho0, part, seq)?)
    }

    /// `Q_n` evaluated directly as the sum over pairs of microstate paths
    /// `(x_0..x_n)`, `(y_0..y_n)` inside the observed blocks, with
    /// `x_n = y_n` and at least one `x_k != y_k`:
    ///
    /// `⟨x_0|ρ_0|y_0⟩ Π_{i=1..n} ⟨x_i|U|x_{i-1}⟩ ⟨y_{i-1}|U†|y_i⟩`.
    ///
    /// The result is real up to rounding; the imaginary part is returned so
    /// callers can check it.
    pub fn detectable_coherence_path_sum(
        &self,
        rho0: &DensityMatrix<T>,
        part: &MesostatePartition,
        seq: &[usize],
    ) -> Result<Complex<T>> {
        self.check_sequence(part, seq)?;
        self.validate(rho0, Scheme::Quantum, part, seq.len() - 1)?;
        coherence::path_pair_sum(&self.u, rho0.matrix(), part, seq)
    }

    /// Largest |p_{n-1}(without measurement k) - Σ_{X_k} p_n| over all
    /// shortened sequences.
    pub fn kolmogorov_check(
        &self,
        rho0: &DensityMatrix<T>,
        scheme: Scheme,
        part: &MesostatePartition,
        n: usize,
        k: usize,
    ) -> Result<T> {
        let full = self.distribution(rho0, scheme, part, n)?;
        let skipped = self.distribution_without(rho0, scheme, part, n, k)?;
        full.kolmogorov_violation(&skipped, k)
    }
}
