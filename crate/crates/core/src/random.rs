//! Seeded random number generation and random-matrix ensembles.
//!
//! All randomness goes through [`ChaCha8Rng`]. A run is identified by a
//! `u64` seed; independent sub-streams (one per trajectory, say) are obtained
//! with [`stream`], which selects the ChaCha stream number without touching
//! the key. ChaCha is a counter-based cipher, so stream `i` of seed `s` is
//! reproducible in any language that implements `rand_core`'s
//! `seed_from_u64` key expansion and the ChaCha8 block function.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::ComplexMatrix;
use crate::scalar::Real;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for sub-stream `index` of `seed`.
pub fn stream(seed: u64, index: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform draw in `[0, 1)` with 53 random bits.
pub fn uniform<R: Rng>(rng: &mut R) -> f64 {
    rng.gen::<f64>()
}

fn complex_gaussian<T: Real, R: Rng>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::lit(re), T::lit(im))
}

/// Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn random_matrix<T: Real, R: Rng>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(dim, |_, _| complex_gaussian(rng))
}

/// `(G + G†) / 2` for a Ginibre `G`, exactly Hermitian.
pub fn random_hermitian<T: Real, R: Rng>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g: ComplexMatrix<T> = random_matrix(dim, rng);
    let half = T::lit(0.5);
    let mut h = ComplexMatrix::from_fn(dim, |i, j| (g[(i, j)] + g[(j, i)].conj()) * half);
    for i in 0..dim {
        h[(i, i)].im = T::zero();
    }
    h
}

/// Random normalized state vector (uniform on the unit sphere).
pub fn random_amplitudes<T: Real, R: Rng>(dim: usize, rng: &mut R) -> Vec<Complex<T>> {
    let v: Vec<Complex<T>> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Full-rank mixed state `G G† / Tr(G G†)` from a Ginibre `G`.
pub fn random_density<T: Real, R: Rng>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g: ComplexMatrix<T> = random_matrix(dim, rng);
    let m = g.mul_unchecked(&g.adjoint());
    let tr = m.trace().re;
    let mut m = m.scale(Complex::new(T::one() / tr, T::zero()));
    for i in 0..dim {
        m[(i, i)].im = T::zero();
    }
    // enforce exact Hermiticity after rounding
    for i in 0..dim {
        for j in i + 1..dim {
            m[(j, i)] = m[(i, j)].conj();
        }
    }
    m
}

/// Haar-distributed unitary: Gram-Schmidt on the columns of a Ginibre
/// matrix, which is equivalent to QR with a positive-diagonal `R`.
pub fn haar_unitary<T: Real, R: Rng>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g: ComplexMatrix<T> = random_matrix(dim, rng);
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = g.column(j);
        for q in &cols {
            let overlap: Complex<T> = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi = *vi - overlap * qi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| stream(42, 3).gen()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let x: u64 = stream(42, 3).gen();
        let y: u64 = stream(42, 4).gen();
        assert_ne!(x, y);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = seeded(1);
        let u: ComplexMatrix<f64> = haar_unitary(6, &mut rng);
        assert!(u.unitarity_defect() < 1e-12);
    }

    #[test]
    fn random_density_is_a_state() {
        let mut rng = seeded(8);
        let rho: ComplexMatrix<f64> = random_density(5, &mut rng);
        assert!((rho.trace().re - 1.0).abs() < 1e-14);
        assert_eq!(rho.hermiticity_defect(), 0.0);
    }
}
