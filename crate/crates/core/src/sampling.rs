//! Seeded random instances for the property sweeps.

use rand::Rng;

use crate::groups::Su2Matrix;
use crate::linalg::{self, ComplexMatrix, HermitianUnimodular, C64};

pub fn complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Standard complex Gaussian by Box–Muller.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random();
    C64::from_polar((-2.0 * u1.ln()).sqrt(), std::f64::consts::TAU * u2)
}

/// Haar-distributed element of SU(2) (normalised Gaussian quaternion).
pub fn su2<R: Rng + ?Sized>(rng: &mut R) -> Su2Matrix {
    Su2Matrix::from_cayley_klein(complex_gaussian(rng), complex_gaussian(rng))
}

pub fn matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| complex(rng))
}

/// Random Hermitian matrix with entries in the unit box.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let a = matrix(rng, dim);
    a.add(&a.adjoint()).expect("same dimension").scale(C64::new(0.5, 0.0))
}

/// Matrix whose entry `(i, j)` vanishes unless `k | (i - j)`.
pub fn patterned<R: Rng + ?Sized>(rng: &mut R, dim: usize, k: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |i, j| {
        if (i as isize - j as isize).rem_euclid(k as isize) == 0 {
            complex(rng)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `B* B + I` rescaled to unit determinant.
fn unimodular_gram(b: &ComplexMatrix, tol_det: f64) -> HermitianUnimodular {
    let dim = b.dim();
    let gram = linalg::matmul(&b.adjoint(), b)
        .add(&ComplexMatrix::identity(dim))
        .expect("same dimension");
    HermitianUnimodular::normalized(gram, tol_det).expect("B*B + I is positive definite")
}

/// Random positive definite Hermitian matrix of determinant 1.
pub fn unimodular_pd<R: Rng + ?Sized>(rng: &mut R, dim: usize, tol_det: f64) -> HermitianUnimodular {
    unimodular_gram(&matrix(rng, dim), tol_det)
}

/// As [`unimodular_pd`], zero at every `(i, j)` with `k ∤ (i - j)`.
pub fn unimodular_pd_patterned<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    k: usize,
    tol_det: f64,
) -> HermitianUnimodular {
    unimodular_gram(&patterned(rng, dim, k), tol_det)
}

/// Upper triangular, positive diagonal, unit determinant, with sparsity `k`.
pub fn delta_patterned<R: Rng + ?Sized>(rng: &mut R, dim: usize, k: usize) -> ComplexMatrix {
    let mut a = patterned(rng, dim, k);
    let mut log_det = 0.0;
    for i in 0..dim {
        for j in 0..i {
            a[(i, j)] = C64::new(0.0, 0.0);
        }
        let d: f64 = rng.random_range(0.5..2.0);
        log_det += d.ln();
        a[(i, i)] = C64::new(d, 0.0);
    }
    let s = (-log_det / dim as f64).exp();
    for i in 0..dim {
        a[(i, i)] = C64::new(a[(i, i)].re * s, 0.0);
    }
    a
}
