//! Scalar abstraction.
//!
//! Every numerical routine in the crate is generic over [`Real`], which is
//! implemented for `f32` and `f64`. Tolerances scale with the precision of
//! the scalar: the `f64` defaults are the production values, the `f32` ones
//! are loosened to what single precision can actually deliver.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Numerical tolerances used throughout the crate.
///
/// One record per scalar type; obtain the defaults with [`Real::tolerances`]
/// and override individual fields where a caller needs something else.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max entrywise |H - H†| accepted as Hermitian.
    pub hermitian: f64,
    /// Jacobi stops once the off-diagonal Frobenius norm drops below
    /// `eig_offdiag * max(1, ‖H‖_F)`.
    pub eig_offdiag: f64,
    pub max_sweeps: usize,
    /// Hermiticity/positivity/trace slack when validating a density matrix.
    pub state: f64,
    /// Branches lighter than this are treated as impossible.
    pub zero_branch: f64,
    /// Default threshold for the block-column-sum comparison.
    pub lumpability: f64,
    /// A magic-time candidate is accepted when its residual is below this.
    pub root: f64,
}

impl Tolerances {
    pub const F64: Tolerances = Tolerances {
        hermitian: 1e-12,
        eig_offdiag: 1e-14,
        max_sweeps: 100,
        state: 1e-10,
        zero_branch: 1e-14,
        lumpability: 1e-10,
        root: 1e-10,
    };

    pub const F32: Tolerances = Tolerances {
        hermitian: 1e-5,
        eig_offdiag: 1e-6,
        max_sweeps: 100,
        state: 1e-4,
        zero_branch: 1e-7,
        lumpability: 1e-4,
        root: 1e-4,
    };
}

/// Real scalar usable by the simulator.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + LowerExp + Send + Sync + 'static
{
    fn tolerances() -> Tolerances;

    /// Converts an `f64` literal or tolerance into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn tolerances() -> Tolerances {
        Tolerances::F64
    }
}

impl Real for f32 {
    fn tolerances() -> Tolerances {
        Tolerances::F32
    }
}
