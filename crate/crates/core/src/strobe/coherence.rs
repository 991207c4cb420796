use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::qstate::MesostatePartition;
use crate::scalar::Real;

/// Upper bound on the number of path pairs visited by [`path_pair_sum`].
const MAX_PATH_PAIRS: usize = 50_000_000;

/// Direct evaluation of the detectable coherence as a sum over pairs of
/// microstate paths. The trace of the path pair contracts to
/// `δ_{x_n,y_n} ⟨x_0|ρ_0|y_0⟩ Π_i ⟨x_i|U|x_{i-1}⟩ ⟨y_{i-1}|U†|y_i⟩`, so only
/// matrix elements are multiplied; the fully diagonal pairing (the
/// von Neumann contribution) is excluded.
pub(super) fn path_pair_sum<T: Real>(
    u: &ComplexMatrix<T>,
    rho0: &ComplexMatrix<T>,
    part: &MesostatePartition,
    seq: &[usize],
) -> Result<Complex<T>> {
    let n = seq.len() - 1;
    let pairs = seq.iter().enumerate().try_fold(1usize, |acc, (k, &b)| {
        let size = part.members(b).len();
        let factor = if k == n { size } else { size * size };
        acc.checked_mul(factor)
    });
    match pairs {
        Some(p) if p <= MAX_PATH_PAIRS => {}
        _ => {
            return Err(Error::CapExceeded {
                what: "path pairs",
                requested: pairs.unwrap_or(usize::MAX),
                limit: MAX_PATH_PAIRS,
            })
        }
    }

    let mut total = Complex::zero();
    for &x0 in part.members(seq[0]) {
        for &y0 in part.members(seq[0]) {
            let amp = rho0[(x0, y0)];
            if n == 0 {
                // δ_{x_0,y_0}: only the diagonal pairing survives and it is excluded
                continue;
            }
            extend(u, part, seq, 1, x0, y0, amp, x0 != y0, &mut total);
        }
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn extend<T: Real>(
    u: &ComplexMatrix<T>,
    part: &MesostatePartition,
    seq: &[usize],
    k: usize,
    x_prev: usize,
    y_prev: usize,
    amp: Complex<T>,
    diverged: bool,
    total: &mut Complex<T>,
) {
    let members = part.members(seq[k]);
    let last = k + 1 == seq.len();
    for &x in members {
        let ax = amp * u[(x, x_prev)];
        if last {
            if diverged {
                *total = *total + ax * u[(x, y_prev)].conj();
            }
            continue;
        }
        for &y in members {
            let a = ax * u[(y, y_prev)].conj();
            extend(u, part, seq, k + 1, x, y, a, diverged || x != y, total);
        }
    }
}
