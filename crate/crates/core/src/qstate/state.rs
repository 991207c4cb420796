use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix};
use crate::scalar::Real;

/// Density operator. States built by the constructors are normalized;
/// branch states produced by collapses are unnormalized and their trace is
/// the probability of the branch.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    mat: ComplexMatrix<T>,
    normalized: bool,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates `mat` as a normalized state: Hermitian, positive
    /// semidefinite and of unit trace, all within the scalar's state
    /// tolerance.
    pub fn new(mat: ComplexMatrix<T>) -> Result<Self> {
        validate(&mat, true)?;
        Ok(Self {
            mat,
            normalized: true,
        })
    }

    /// Validates an unnormalized (sub-normalized) state, `0 <= Tr <= 1`.
    pub fn new_unnormalized(mat: ComplexMatrix<T>) -> Result<Self> {
        validate(&mat, false)?;
        Ok(Self {
            mat,
            normalized: false,
        })
    }

    pub(crate) fn from_raw(mat: ComplexMatrix<T>, normalized: bool) -> Self {
        Self { mat, normalized }
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
    pub fn pure(amplitudes: &[Complex<T>]) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::ZeroVector);
        }
        let norm_sqr: T = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr == T::zero() || !norm_sqr.is_finite() {
            return Err(Error::ZeroVector);
        }
        let inv = Complex::new(T::one() / norm_sqr, T::zero());
        let mut mat = ComplexMatrix::outer(amplitudes, amplitudes)?.scale(inv);
        for i in 0..mat.dim() {
            mat[(i, i)].im = T::zero();
        }
        Ok(Self::from_raw(mat, true))
    }

    pub fn pure_real(amplitudes: &[T]) -> Result<Self> {
        let v: Vec<Complex<T>> = amplitudes.iter().map(|&a| Complex::new(a, T::zero())).collect();
        Self::pure(&v)
    }

    /// Basis state `|index⟩⟨index|`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut mat = ComplexMatrix::zeros(dim);
        mat[(index, index)] = Complex::new(T::one(), T::zero());
        Ok(Self::from_raw(mat, true))
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let w = T::one() / T::from_usize_lossy(dim);
        Self::from_raw(ComplexMatrix::identity(dim).scale(Complex::new(w, T::zero())), true)
    }

    /// Classical mixture of basis states. Weights are normalized to sum 1.
    pub fn diagonal(weights: &[T]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::ZeroVector);
        }
        if weights.iter().any(|&w| w < T::zero() || !w.is_finite()) {
            return Err(Error::InvalidState("diagonal weights must be finite and non-negative".into()));
        }
        let total: T = weights.iter().copied().sum();
        if total == T::zero() {
            return Err(Error::ZeroVector);
        }
        let diag: Vec<Complex<T>> = weights.iter().map(|&w| Complex::new(w / total, T::zero())).collect();
        Ok(Self::from_raw(ComplexMatrix::from_diagonal(&diag), true))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_raw(ComplexMatrix::zeros(dim), false)
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.mat
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    #[inline]
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> T {
        self.mat.trace().re
    }

    /// Population of basis state `i`.
    #[inline]
    pub fn population(&self, i: usize) -> T {
        self.mat[(i, i)].re
    }

    pub fn populations(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.population(i)).collect()
    }

    /// Off-diagonal entries zeroed.
    pub fn diagonal_part(&self) -> Self {
        let mut mat = ComplexMatrix::zeros(self.dim());
        for i in 0..self.dim() {
            mat[(i, i)] = self.mat[(i, i)];
        }
        Self::from_raw(mat, self.normalized)
    }

    /// `ρ / Tr ρ`; fails on branches lighter than the zero-branch tolerance.
    pub fn normalize(&self) -> Result<Self> {
        let tr = self.trace();
        if !(tr > T::lit(T::tolerances().zero_branch)) {
            return Err(Error::ZeroProbabilityBranch {
                prob: tr.to_f64_lossy(),
            });
        }
        Ok(Self::from_raw(
            self.mat.scale(Complex::new(T::one() / tr, T::zero())),
            true,
        ))
    }

    /// `U ρ U†`.
    pub fn evolve(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        Ok(Self::from_raw(self.mat.conjugated_by(u)?, self.normalized))
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> Result<T> {
        let es = hermitian_eig(&self.mat)?;
        Ok(es.eigenvalues.first().copied().unwrap_or_else(T::zero))
    }
}

fn validate<T: Real>(mat: &ComplexMatrix<T>, normalized: bool) -> Result<()> {
    let tol = T::lit(T::tolerances().state);
    let defect = mat.hermiticity_defect();
    if !(defect <= tol) {
        return Err(Error::InvalidState(format!("not Hermitian (defect {defect:e})")));
    }
    let tr = mat.trace().re;
    if normalized {
        if !((tr - T::one()).abs() <= tol) {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
    } else if !(tr >= -tol && tr <= T::one() + tol) {
        return Err(Error::InvalidState(format!("trace {tr} outside [0, 1]")));
    }
    let mut sym = mat.clone();
    for i in 0..sym.dim() {
        for j in i + 1..sym.dim() {
            sym[(j, i)] = sym[(i, j)].conj();
        }
        sym[(i, i)].im = T::zero();
    }
    let min = hermitian_eig(&sym)?
        .eigenvalues
        .first()
        .copied()
        .unwrap_or_else(T::zero);
    if min < -tol {
        return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
    }
    if mat.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidState("non-finite entry".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use std::f64::consts::FRAC_PI_4;

    type C = Complex<f64>;

    #[test]
    fn basis_vector_gives_single_entry() {
        let rho = DensityMatrix::pure(&[C::new(1.0, 0.0), C::zero(), C::zero()]).unwrap();
        assert_eq!(rho.matrix()[(0, 0)], C::new(1.0, 0.0));
        assert_eq!(rho.matrix().as_slice().iter().filter(|z| !z.is_zero()).count(), 1);
    }

    fn psi_theta(theta: f64) -> Vec<f64> {
        vec![1.0, 0.0, theta.cos(), 0.0, theta.sin(), 0.0]
    }

    #[test]
    fn two_preparation_state_has_unit_trace() {
        for k in 0..20 {
            let theta = k as f64 * 0.37;
            let rho = DensityMatrix::pure_real(&psi_theta(theta)).unwrap();
            assert!((rho.trace() - 1.0).abs() < 1e-14);
        }
        let rho = DensityMatrix::pure_real(&psi_theta(0.0)).unwrap();
        let expected = [0.5, 0.0, 0.5, 0.0, 0.0, 0.0];
        for (p, e) in rho.populations().iter().zip(expected) {
            assert!((p - e).abs() < 1e-15);
        }
        let rho = DensityMatrix::pure_real(&psi_theta(FRAC_PI_4)).unwrap();
        assert!((rho.population(2) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn zero_vector_is_rejected() {
        assert_eq!(DensityMatrix::<f64>::pure_real(&[0.0, 0.0]), Err(Error::ZeroVector));
        assert_eq!(DensityMatrix::<f64>::pure(&[]), Err(Error::ZeroVector));
    }

    #[test]
    fn validation_catches_bad_matrices() {
        let not_psd = ComplexMatrix::from_real(2, &[1.5, 0.0, 0.0, -0.5]).unwrap();
        assert!(DensityMatrix::new(not_psd).is_err());
        let bad_trace = ComplexMatrix::from_real(2, &[0.5, 0.0, 0.0, 0.4]).unwrap();
        assert!(DensityMatrix::new(bad_trace.clone()).is_err());
        assert!(DensityMatrix::new_unnormalized(bad_trace).is_ok());
        let not_herm = ComplexMatrix::from_real(2, &[0.5, 0.1, 0.0, 0.5]).unwrap();
        assert!(DensityMatrix::new(not_herm).is_err());
    }

    #[test]
    fn normalize_refuses_empty_branch() {
        let z = DensityMatrix::<f64>::zeros(3);
        assert!(matches!(z.normalize(), Err(Error::ZeroProbabilityBranch { .. })));
    }
}
