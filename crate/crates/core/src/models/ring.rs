//! Tight-binding ring `H = -Σ_x (|x+1⟩⟨x| + |x⟩⟨x+1|)` with periodic wrap,
//! observed through the parity lumping `A = {even}`, `B = {odd}`.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::qstate::{DensityMatrix, MesostatePartition};
use crate::scalar::Real;
use crate::strobe::Stroboscope;

#[derive(Clone, Debug)]
pub struct RingModel<T> {
    sites: usize,
    hamiltonian: ComplexMatrix<T>,
    parity: MesostatePartition,
}

pub fn ring_hamiltonian<T: Real>(sites: usize) -> Result<RingModel<T>> {
    check_even(sites, 2)?;
    let mut h = ComplexMatrix::zeros(sites);
    let hop = Complex::new(-T::one(), T::zero());
    for x in 0..sites {
        let next = (x + 1) % sites;
        h[(next, x)] = h[(next, x)] + hop;
        h[(x, next)] = h[(x, next)] + hop;
    }
    Ok(RingModel {
        sites,
        hamiltonian: h,
        parity: MesostatePartition::parity(sites)?,
    })
}

pub(crate) fn check_even(sites: usize, min: usize) -> Result<()> {
    if sites % 2 == 1 {
        return Err(Error::OddN(sites));
    }
    if sites < min {
        return Err(Error::NTooSmall { found: sites, min });
    }
    Ok(())
}

impl<T: Real> RingModel<T> {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix<T> {
        &self.hamiltonian
    }

    pub fn parity_partition(&self) -> &MesostatePartition {
        &self.parity
    }

    /// `ε_k = -2 cos(2πk/N)`, indexed by momentum `k` (not sorted).
    pub fn energies(&self) -> Vec<T> {
        (0..self.sites).map(|k| energy(self.sites, k)).collect()
    }

    /// Plane wave `⟨x|ε_k⟩ = e^{-i2πkx/N} / √N`.
    pub fn eigenvector(&self, k: usize) -> Vec<Complex<T>> {
        let n = T::from_usize_lossy(self.sites);
        let norm = T::one() / n.sqrt();
        (0..self.sites)
            .map(|x| {
                let phase = -T::TAU() * T::from_usize_lossy(k * x) / n;
                Complex::from_polar(norm, phase)
            })
            .collect()
    }

    pub fn stroboscope(&self, tau: T) -> Result<Stroboscope<T>> {
        Stroboscope::new(&self.hamiltonian, tau)
    }
}

pub(crate) fn energy<T: Real>(sites: usize, k: usize) -> T {
    let angle = T::TAU() * T::from_usize_lossy(k) / T::from_usize_lossy(sites);
    -(T::lit(2.0) * angle.cos())
}

/// `4 cos(2πl/N)` for `l = 0..N`, the energy gap between momenta `l` and
/// `l + N/2`.
fn gaps<T: Real>(sites: usize) -> Vec<T> {
    (0..sites)
        .map(|l| T::lit(4.0) * (T::TAU() * T::from_usize_lossy(l) / T::from_usize_lossy(sites)).cos())
        .collect()
}

/// `½ - (1/2N) Σ_l e^{-i4cos(2πl/N)τ}` together with the modulus of its
/// imaginary part.
pub fn lumped_tab_with_residue<T: Real>(sites: usize, tau: T) -> Result<(T, T)> {
    check_even(sites, 4)?;
    let sum = gaps::<T>(sites)
        .into_iter()
        .fold(Complex::zero(), |acc: Complex<T>, g| acc + Complex::new(T::zero(), -(g * tau)).exp());
    let n = T::from_usize_lossy(sites);
    let value = Complex::new(T::lit(0.5), T::zero()) - sum / (n + n);
    Ok((value.re, value.im.abs()))
}

/// Lumped transition probability `T̄_A^B` between the parity mesostates.
pub fn lumped_tab<T: Real>(sites: usize, tau: T) -> Result<T> {
    Ok(lumped_tab_with_residue(sites, tau)?.0)
}

const MAX_DENOMINATOR: u64 = 64;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Smallest `q <= MAX_DENOMINATOR` with `c·q` an integer, if any.
fn rational_denominator(c: f64) -> Option<u64> {
    (1..=MAX_DENOMINATOR).find(|&q| {
        let x = c * q as f64;
        (x - x.round()).abs() < 1e-12
    })
}

/// Periods in `(0, tau_max]` at which every phase `e^{-i4cos(2πl/N)τ}`
/// equals one, so `T̄_A^B` vanishes.
///
/// `l = 0` forces `τ = mπ/2`; the remaining phases then require
/// `m cos(2πl/N) ∈ ℤ` for all `l`. Each cosine is tested for
/// rationality, `m` must be a multiple of the lcm of the denominators, and
/// an irrational cosine leaves only `τ = 0`. Candidates are confirmed
/// numerically against the root tolerance.
pub fn magic_times_m<T: Real>(sites: usize, tau_max: T) -> Result<Vec<T>> {
    check_even(sites, 4)?;
    if !(tau_max > T::zero()) {
        return Err(Error::InvalidArgument("tau_max must be positive".into()));
    }
    let mut step = 1u64;
    for l in 0..sites {
        let c = (std::f64::consts::TAU * l as f64 / sites as f64).cos();
        match rational_denominator(c) {
            Some(q) => step = step / gcd(step, q) * q,
            None => return Ok(Vec::new()),
        }
    }
    let unit = T::FRAC_PI_2() * T::lit(step as f64);
    let limit = tau_max * (T::one() + T::lit(1e-12));
    let tol = T::lit(T::tolerances().root);
    let mut out = Vec::new();
    for s in 1u64.. {
        let tau = unit * T::lit(s as f64);
        if tau > limit {
            break;
        }
        let (tab, _) = lumped_tab_with_residue(sites, tau)?;
        if tab.abs() < tol {
            out.push(tau);
        }
    }
    Ok(out)
}

/// Phase convention for the coherence coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PhaseConvention {
    /// `e^{i(2π/N) l d}`, consistent with the closed form of `Q_1`.
    #[default]
    Consistent,
    /// `e^{i(4π/N) l d}`, the variant with doubled phase.
    Doubled,
}

/// `c_d(τ) = Σ_l (1 - e^{-i4cos(2πl/N)τ}) e^{iφ l d}` for every even
/// separation `d = 2, 4, …, N-2` realizable inside a parity block.
pub fn coherence_coefficients<T: Real>(
    sites: usize,
    tau: T,
    convention: PhaseConvention,
) -> Result<Vec<(usize, Complex<T>)>> {
    check_even(sites, 4)?;
    Ok(coefficients_and_slopes(sites, tau, convention)
        .into_iter()
        .map(|(d, c, _)| (d, c))
        .collect())
}

fn coefficients_and_slopes<T: Real>(
    sites: usize,
    tau: T,
    convention: PhaseConvention,
) -> Vec<(usize, Complex<T>, Complex<T>)> {
    let g = gaps::<T>(sites);
    let n = T::from_usize_lossy(sites);
    let base = match convention {
        PhaseConvention::Consistent => T::TAU() / n,
        PhaseConvention::Doubled => T::lit(2.0) * T::TAU() / n,
    };
    (2..sites)
        .step_by(2)
        .map(|d| {
            let mut c = Complex::zero();
            let mut slope = Complex::zero();
            for (l, &gap) in g.iter().enumerate() {
                let phase = Complex::from_polar(T::one(), base * T::from_usize_lossy(l * d));
                let e = Complex::new(T::zero(), -(gap * tau)).exp();
                c = c + (Complex::new(T::one(), T::zero()) - e) * phase;
                slope = slope + Complex::new(T::zero(), gap) * e * phase;
            }
            (d, c, slope)
        })
        .collect()
}

/// `max_d |c_d(τ)|`.
pub fn coherence_residual<T: Real>(sites: usize, tau: T, convention: PhaseConvention) -> Result<T> {
    Ok(coherence_coefficients(sites, tau, convention)?
        .into_iter()
        .map(|(_, c)| c.norm())
        .fold(T::zero(), T::max))
}

/// Half the derivative of `Σ_d |c_d|²`; it crosses zero from below at every
/// common root of the coefficients.
fn residual_slope<T: Real>(sites: usize, tau: T, convention: PhaseConvention) -> T {
    coefficients_and_slopes(sites, tau, convention)
        .into_iter()
        .map(|(_, c, s)| (c.conj() * s).re)
        .sum()
}

/// Grid spacing of the root scan.
pub const SCAN_STEP: f64 = 1e-3;

/// Periods in `(0, tau_max]` at which every coherence coefficient vanishes.
///
/// Scans the slope of `Σ_d |c_d|²` on a grid of spacing [`SCAN_STEP`],
/// bisects each upward zero crossing down to floating-point resolution
/// (at least 1e-10), and keeps the minima whose `max_d |c_d|` is below the
/// root tolerance. At the classical magic times the coefficients vanish
/// quadratically and bisection only resolves the location to about `√ε`;
/// such roots are replaced by the exact value from [`magic_times_m`].
pub fn magic_times_s<T: Real>(sites: usize, tau_max: T) -> Result<Vec<T>> {
    magic_times_s_with(sites, tau_max, PhaseConvention::Consistent)
}

pub fn magic_times_s_with<T: Real>(sites: usize, tau_max: T, convention: PhaseConvention) -> Result<Vec<T>> {
    check_even(sites, 4)?;
    if !(tau_max > T::zero()) {
        return Err(Error::InvalidArgument("tau_max must be positive".into()));
    }
    let step = T::lit(SCAN_STEP);
    let tol = T::lit(T::tolerances().root);
    let limit = tau_max * (T::one() + T::lit(1e-12));
    let slope = |t: T| residual_slope(sites, t, convention);
    let residual = |t: T| {
        coefficients_and_slopes(sites, t, convention)
            .into_iter()
            .map(|(_, c, _)| c.norm())
            .fold(T::zero(), T::max)
    };

    // every coefficient vanishes exactly at the classical magic times
    let exact = magic_times_m(sites, tau_max + step)?;
    let snap = T::lit(1e-6);

    let mut roots: Vec<T> = Vec::new();
    let mut k = 1usize;
    let mut a = step;
    let mut ga = slope(a);
    loop {
        let b = step * T::from_usize_lossy(k + 1);
        if a > limit {
            break;
        }
        let gb = slope(b);
        if ga < T::zero() && gb >= T::zero() {
            let mut root = bisect(&slope, a, b);
            if let Some(&m) = exact.iter().find(|&&m| (m - root).abs() < snap) {
                root = m;
            }
            if root <= limit && residual(root) < tol && roots.last().is_none_or(|&r| root - r > step) {
                roots.push(root);
            }
        }
        a = b;
        ga = gb;
        k += 1;
    }
    Ok(roots)
}

fn bisect<T: Real>(f: &impl Fn(T) -> T, mut lo: T, mut hi: T) -> T {
    let two = T::lit(2.0);
    for _ in 0..200 {
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / two
}

/// `Q_1` between parity blocks, in closed form.
///
/// Indexed `[dest][source]` with 0 = `A` (even), 1 = `B` (odd). `state` is
/// the density matrix presented to the first measurement, so the entries
/// `⟨y|state|z⟩` with `y != z` in the source block carry the coherence. For
/// `dest != source`
///
/// `Q_1 = (1/2N) Σ_{y≠z} Σ_l (1 - e^{-i4cos(2πl/N)τ}) e^{i(2π/N) l (y-z)} ⟨y|state|z⟩`,
///
/// and `Q_1[X; X] = -Q_1[X̄; X]` because `Σ_dest Q_1 = 0`.
pub fn q1_closed_form<T: Real>(sites: usize, tau: T, state: &DensityMatrix<T>) -> Result<[[T; 2]; 2]> {
    check_even(sites, 4)?;
    if state.dim() != sites {
        return Err(Error::DimensionMismatch {
            expected: sites,
            found: state.dim(),
        });
    }
    let g = gaps::<T>(sites);
    let n = T::from_usize_lossy(sites);
    let rho = state.matrix();
    let mut out = [[T::zero(); 2]; 2];
    for source in 0..2 {
        let members: Vec<usize> = (source..sites).step_by(2).collect();
        let mut sum: Complex<T> = Complex::zero();
        for &y in &members {
            for &z in &members {
                if y == z {
                    continue;
                }
                let sep = y as f64 - z as f64;
                let mut kernel: Complex<T> = Complex::zero();
                for (l, &gap) in g.iter().enumerate() {
                    let phase = Complex::from_polar(T::one(), T::TAU() / n * T::lit(l as f64 * sep));
                    kernel = kernel + (Complex::new(T::one(), T::zero()) - Complex::new(T::zero(), -(gap * tau)).exp()) * phase;
                }
                sum = sum + kernel * rho[(y, z)];
            }
        }
        let cross = sum.re / (n + n);
        out[1 - source][source] = cross;
        out[source][source] = -cross;
    }
    Ok(out)
}
