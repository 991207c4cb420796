//! Exact and sampled statistics of closed quantum systems observed through
//! stroboscopic projective measurements.
//!
//! Three measurement schemes are supported: ideal rank-1 measurements,
//! von Neumann measurements that lump microstates into mesostates and fully
//! decohere, and Lüders measurements that lump while keeping the coherence
//! inside each mesostate. The crate computes the joint outcome
//! distributions of each scheme, tests lumpability of the microscopic
//! transition matrix, evaluates the detectable coherence separating the
//! Lüders statistics from the von Neumann ones, and provides the
//! trace-distance witness of non-Markovianity together with the ring
//! lattice and two-qubit models used to exercise all of it.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the `*64` aliases below fix it to double precision.
//!
//! ```
//! # fn main() -> qlump_core::Result<()> {
//! use qlump_core::models::{lumped_tab, magic_times_s, ring_hamiltonian};
//! use qlump_core::{check_lumpability, DensityMatrix64, Scheme};
//!
//! let ring = ring_hamiltonian::<f64>(6)?;
//! let part = ring.parity_partition();
//! let strobe = ring.stroboscope(0.7)?;
//!
//! // parity lumping of the ring is exact for every τ
//! let report = check_lumpability(&strobe.transition_matrix(), part, 1e-10)?;
//! let lumped = report.lumped.expect("lumpable");
//! assert!((lumped.get(1, 0) - lumped_tab(6, 0.7)?).abs() < 1e-12);
//!
//! // periods where no coherence is detectable: s·π/3 for N = 6
//! let roots = magic_times_s(6, 2.0 * std::f64::consts::PI)?;
//! assert_eq!(roots.len(), 6);
//!
//! // outcomes A, B, B at times 0, τ, 2τ
//! let rho = DensityMatrix64::basis(6, 0)?;
//! let seq = [0, 1, 1];
//! let pq = strobe.joint(Scheme::Quantum, &rho, part, &seq)?;
//! let pc = strobe.joint(Scheme::Classical, &rho, part, &seq)?;
//! let q = strobe.detectable_coherence(&rho, part, &seq)?;
//! assert!((pq - pc - q).abs() < 1e-12);
//! # Ok(())
//! # }
//! ```

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod models;
pub mod qstate;
pub mod random;
pub mod scalar;
pub mod strobe;
pub mod witness;

pub use error::{Error, Result};
pub use linalg::{hermitian_eig, propagator, ComplexMatrix, EigenSystem};
pub use qstate::{
    dephase, ideal_collapse, lueders_collapse, von_neumann_collapse, Collapse, Dephasing, DensityMatrix,
    MesostatePartition, Projector,
};
pub use scalar::{Real, Tolerances};
pub use strobe::{
    check_lumpability, LumpabilityReport, LumpedDistribution, OutcomeSequence, Scheme, Stroboscope,
    TransitionMatrix,
};

pub type ComplexMatrix64 = ComplexMatrix<f64>;
pub type ComplexMatrix32 = ComplexMatrix<f32>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type DensityMatrix32 = DensityMatrix<f32>;
pub type EigenSystem64 = EigenSystem<f64>;
pub type Stroboscope64 = Stroboscope<f64>;
pub type Stroboscope32 = Stroboscope<f32>;
pub type TransitionMatrix64 = TransitionMatrix<f64>;
pub type LumpedDistribution64 = LumpedDistribution<f64>;
