//! Hermitian eigendecomposition by cyclic complex Jacobi rotations, and the
//! spectral propagator built on top of it.

use num_complex::Complex;
use num_traits::Zero;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Real, Tolerances};

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as columns.
#[derive(Clone, Debug)]
pub struct EigenSystem<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> EigenSystem<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(ε) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.spectral_map(|e| Complex::new(e, T::zero()))
    }

    /// `V diag(e^{-iετ}) V†` with ħ = 1.
    pub fn propagator(&self, tau: T) -> ComplexMatrix<T> {
        self.spectral_map(|e| Complex::new(T::zero(), -(e * tau)).exp())
    }

    fn spectral_map(&self, f: impl Fn(T) -> Complex<T>) -> ComplexMatrix<T> {
        let n = self.dim();
        let v = &self.eigenvectors;
        let weights: Vec<Complex<T>> = self.eigenvalues.iter().map(|&e| f(e)).collect();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n).fold(Complex::zero(), |acc, k| acc + v[(i, k)] * weights[k] * v[(j, k)].conj())
        })
    }
}

pub fn hermitian_eig<T: Real>(h: &ComplexMatrix<T>) -> Result<EigenSystem<T>> {
    hermitian_eig_with(h, &T::tolerances())
}

pub fn hermitian_eig_with<T: Real>(h: &ComplexMatrix<T>, tol: &Tolerances) -> Result<EigenSystem<T>> {
    let deviation = h.hermiticity_defect();
    if !(deviation <= T::lit(tol.hermitian)) {
        return Err(Error::NotHermitian {
            deviation: deviation.to_f64_lossy(),
        });
    }

    let n = h.dim();
    let mut a = h.clone();
    // Remove the sub-tolerance anti-Hermitian part so rotations see an exactly
    // Hermitian matrix.
    let half = T::lit(0.5);
    for i in 0..n {
        a[(i, i)] = Complex::new(a[(i, i)].re, T::zero());
        for j in i + 1..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * half;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);

    let threshold = T::lit(tol.eig_offdiag) * a.frobenius_norm().max(T::one());
    let mut sweep = 0;
    while off_diagonal_norm(&a) > threshold {
        if sweep == tol.max_sweeps {
            return Err(Error::NoConvergence { sweeps: sweep });
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweep += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .expect("finite eigenvalues")
            .then(i.cmp(&j))
    });
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.dim();
    let mut sum = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum = sum + a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Annihilates `a[(p, q)]` with the unitary `W = Φ R`, where `Φ` rotates the
/// phase of column `q` so the pivot becomes real and `R` is the ordinary
/// symmetric Jacobi rotation. Applies `a ← W†aW` and `v ← vW`.
fn rotate<T: Real>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == T::zero() {
        return;
    }
    let phase_conj = (apq / Complex::new(r, T::zero())).conj();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (r + r);
    let t = if theta.abs() > T::lit(1e150) {
        T::one() / (theta + theta)
    } else {
        let sign = if theta >= T::zero() { T::one() } else { -T::one() };
        sign / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;

    let w_pp = Complex::new(c, T::zero());
    let w_pq = Complex::new(s, T::zero());
    let w_qp = phase_conj * (-s);
    let w_qq = phase_conj * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * w_pp + akq * w_qp;
        a[(k, q)] = akp * w_pq + akq * w_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = w_pp.conj() * apk + w_qp.conj() * aqk;
        a[(q, k)] = w_pq.conj() * apk + w_qq.conj() * aqk;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * w_pp + vkq * w_qp;
        v[(k, q)] = vkp * w_pq + vkq * w_qq;
    }
}

/// `U = exp(-iHτ)` (ħ = 1) via the spectral decomposition of `H`.
pub fn propagator<T: Real>(h: &ComplexMatrix<T>, tau: T) -> Result<ComplexMatrix<T>> {
    if tau == T::zero() {
        // exp(0) = I, but H must still be Hermitian.
        hermitian_eig(h)?;
        return Ok(ComplexMatrix::identity(h.dim()));
    }
    Ok(hermitian_eig(h)?.propagator(tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, random_hermitian, seeded};
    use proptest::prelude::*;

    fn diag(values: &[f64]) -> ComplexMatrix<f64> {
        ComplexMatrix::from_diagonal(&values.iter().map(|&x| Complex::new(x, 0.0)).collect::<Vec<_>>())
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let es = hermitian_eig(&diag(&[3.0, 1.0])).unwrap();
        assert_eq!(es.eigenvalues, vec![1.0, 3.0]);
        assert_eq!(es.eigenvectors[(1, 0)].norm(), 1.0);
        assert_eq!(es.eigenvectors[(0, 1)].norm(), 1.0);
    }

    #[test]
    fn random_hermitian_is_reconstructed() {
        let mut rng = seeded(11);
        let h: ComplexMatrix<f64> = random_hermitian(5, &mut rng);
        let es = hermitian_eig(&h).unwrap();
        assert!(es.reconstruct().max_abs_diff(&h).unwrap() < 1e-10);
        assert!(es.eigenvectors.unitarity_defect() < 1e-10);
        assert!(es.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = ComplexMatrix::<f64>::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
        assert!(matches!(propagator(&m, 0.0), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn sweep_budget_is_enforced() {
        let mut rng = seeded(5);
        let h: ComplexMatrix<f64> = random_hermitian(6, &mut rng);
        let tol = Tolerances {
            max_sweeps: 1,
            ..Tolerances::F64
        };
        assert_eq!(
            hermitian_eig_with(&h, &tol).unwrap_err(),
            Error::NoConvergence { sweeps: 1 }
        );
    }

    #[test]
    fn output_is_deterministic() {
        let mut rng = seeded(2);
        let h: ComplexMatrix<f64> = random_hermitian(7, &mut rng);
        let a = hermitian_eig(&h).unwrap();
        let b = hermitian_eig(&h).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.eigenvectors, b.eigenvectors);
    }

    #[test]
    fn propagator_at_zero_is_identity() {
        let mut rng = seeded(4);
        let h: ComplexMatrix<f64> = random_hermitian(4, &mut rng);
        assert_eq!(propagator(&h, 0.0).unwrap(), ComplexMatrix::identity(4));
    }

    #[test]
    fn propagator_group_property() {
        let mut rng = seeded(9);
        let h: ComplexMatrix<f64> = random_hermitian(4, &mut rng);
        let u = propagator(&h, 0.3).unwrap();
        assert!(u.unitarity_defect() < 1e-10);
        let u1 = propagator(&h, 0.12).unwrap();
        let u2 = propagator(&h, 0.18).unwrap();
        assert!(u1.matmul(&u2).unwrap().max_abs_diff(&u).unwrap() < 1e-10);
    }

    #[test]
    fn single_precision_diagonalizes() {
        let mut rng = seeded(21);
        let h: ComplexMatrix<f32> = random_hermitian::<f64, _>(6, &mut rng).cast();
        let es = hermitian_eig(&h).unwrap();
        assert!(es.reconstruct().max_abs_diff(&h).unwrap() < 1e-4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn eigensystem_invariants(seed in any::<u64>(), dim in 1usize..9) {
            let mut rng = seeded(seed);
            let h: ComplexMatrix<f64> = random_hermitian(dim, &mut rng);
            let es = hermitian_eig(&h).unwrap();
            prop_assert!(es.eigenvectors.unitarity_defect() < 1e-10);
            let hv = h.matmul(&es.eigenvectors).unwrap();
            let vd = ComplexMatrix::from_fn(dim, |i, j| es.eigenvectors[(i, j)] * es.eigenvalues[j]);
            prop_assert!(hv.max_abs_diff(&vd).unwrap() < 1e-10);
        }

        #[test]
        fn conjugation_preserves_trace_and_norm(seed in any::<u64>(), dim in 2usize..8, tau in 0.0f64..10.0) {
            let mut rng = seeded(seed);
            let h: ComplexMatrix<f64> = random_hermitian(dim, &mut rng);
            let rho = random_density(dim, &mut rng);
            let u = propagator(&h, tau).unwrap();
            let evolved = rho.conjugated_by(&u).unwrap();
            prop_assert!((evolved.trace() - rho.trace()).norm() < 1e-12);
            prop_assert!((evolved.frobenius_norm() - rho.frobenius_norm()).abs() < 1e-10);
        }
    }
}
