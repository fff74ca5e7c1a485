//! The rational normal map `r_n : P¹ → Pⁿ` and the induced action of SU(2)
//! on `Symⁿ C²`.
//!
//! Coordinates on `Pⁿ` are taken in the orthonormal basis
//! `√(i!(n-i)!/n!) · e₀^{n-i} e₁^{i}`, which makes the lift
//!
//! ```text
//! r_n(z₀, z₁)_i = z₀^{n-i} z₁^i / √(i! (n-i)!)
//! ```
//!
//! and the induced matrices unitary.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::Su2Matrix;
use crate::linalg::{ComplexMatrix, C64, ONE, ZERO};

const LN_FACTORIAL_TABLE: usize = 512;

/// `ln k!`. Entries up to `20!` come from exact integer factorials.
pub fn ln_factorial(k: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACTORIAL_TABLE);
        let mut exact: u64 = 1;
        let mut acc = 0.0f64;
        for k in 0..LN_FACTORIAL_TABLE {
            if k >= 1 {
                acc += (k as f64).ln();
            }
            if k <= 20 {
                if k >= 1 {
                    exact *= k as u64;
                }
                t.push((exact as f64).ln());
            } else {
                t.push(acc);
            }
        }
        t
    });
    match table.get(k) {
        Some(&v) => v,
        None => (1..=k).map(|j| (j as f64).ln()).sum(),
    }
}

/// Nonzero representative of a point of projective space.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectivePoint {
    coords: Vec<C64>,
}

impl ProjectivePoint {
    pub fn new(coords: Vec<C64>) -> Result<Self> {
        if coords.is_empty() || coords.iter().all(|z| z.norm() == 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn scaled(&self, s: C64) -> Result<Self> {
        Self::new(self.coords.iter().map(|z| z * s).collect())
    }
}

/// Lift of `[z₀ : z₁]` under the rational normal map.
pub fn rational_normal_lift(z0: C64, z1: C64, n: usize) -> Result<Vec<C64>> {
    if z0 == ZERO && z1 == ZERO {
        return Err(Error::ZeroVector);
    }
    let p0 = powers(z0, n);
    let p1 = powers(z1, n);
    Ok((0..=n)
        .map(|i| {
            let norm = (-0.5 * (ln_factorial(i) + ln_factorial(n - i))).exp();
            p0[n - i] * p1[i] * norm
        })
        .collect())
}

fn powers(z: C64, n: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut p = ONE;
    for _ in 0..=n {
        out.push(p);
        p *= z;
    }
    out
}

/// Matrix of `σ(U)` on `Symⁿ` in the orthonormal monomial basis.
#[derive(Clone, Debug)]
pub struct SymPowerMatrix {
    pub n: usize,
    pub mat: ComplexMatrix,
}

/// `σ(U)` for `U = [[a, b], [c, d]]`:
///
/// ```text
/// σ_ij = √(binom(n,j)/binom(n,i)) · [x^{n-i} y^i] (a x + c y)^{n-j} (b x + d y)^j
///      = Σ_{p+q=i} √((n-i)! i! (n-j)! j!) / (p! (n-j-p)! q! (j-q)!)
///                   · a^{n-j-p} c^p b^{j-q} d^q
/// ```
pub fn sym_power_matrix(u: &Su2Matrix, n: usize) -> SymPowerMatrix {
    let [a, b, c, d] = u.entries();
    let (pa, pb, pc, pd) = (powers(a, n), powers(b, n), powers(c, n), powers(d, n));
    let lf = ln_factorial;
    let mat = ComplexMatrix::from_fn(n + 1, |i, j| {
        let outer = 0.5 * (lf(n - i) + lf(i) + lf(n - j) + lf(j));
        let mut acc = ZERO;
        // p from the (n-j) factor, q = i - p from the j factor
        let p_lo = i.saturating_sub(j);
        let p_hi = i.min(n - j);
        for p in p_lo..=p_hi {
            let q = i - p;
            let w = (outer - lf(p) - lf(n - j - p) - lf(q) - lf(j - q)).exp();
            acc += pa[n - j - p] * pc[p] * pb[j - q] * pd[q] * w;
        }
        acc
    });
    SymPowerMatrix { n, mat }
}

/// Fubini–Study distance `arccos(|<p,q>|² / (<p,p><q,q>))`.
///
/// Evaluated as `2 asin(√(s/2))` with `s = 1 - |<p,q>|²/(<p,p><q,q>)`
/// taken from the Lagrange identity `<p,p><q,q> - |<p,q>|² = Σ_{i<j} |p_i q_j - p_j q_i|²`,
/// so nearby points do not lose half their digits to the arccos.
pub fn fs_distance(p: &ProjectivePoint, q: &ProjectivePoint) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    let (x, y) = (p.coords(), q.coords());
    let pp: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    let qq: f64 = y.iter().map(|z| z.norm_sqr()).sum();
    let mut wedge = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            wedge += (x[i] * y[j] - x[j] * y[i]).norm_sqr();
        }
    }
    let s = (wedge / (pp * qq)).clamp(0.0, 2.0);
    Ok(2.0 * (s / 2.0).sqrt().min(1.0).asin())
}

/// Fubini–Study distance between `r_n(U z)` and `σ(U) r_n(z)`.
pub fn intertwine_residual(u: &Su2Matrix, z: &ProjectivePoint, n: usize) -> Result<f64> {
    if z.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: 2,
            right: z.dim(),
        });
    }
    let zc = z.coords();
    let uz = u.apply([zc[0], zc[1]]);
    let lhs = rational_normal_lift(uz[0], uz[1], n)?;
    let rhs = sym_power_matrix(u, n)
        .mat
        .mul_vec(&rational_normal_lift(zc[0], zc[1], n)?);
    fs_distance(&ProjectivePoint::new(lhs)?, &ProjectivePoint::new(rhs)?)
}

/// Summary of a randomized intertwining sweep.
#[derive(Clone, Debug, Serialize)]
pub struct IntertwineSweep {
    pub trials: usize,
    pub max_residual: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn lift_of_north_pole() {
        let v = rational_normal_lift(ONE, ZERO, 3).unwrap();
        assert!((v[0] - c(1.0 / 6f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!(v[1..].iter().all(|z| *z == ZERO));
    }

    #[test]
    fn lift_of_one_one() {
        let v = rational_normal_lift(ONE, ONE, 2).unwrap();
        let expected = [FRAC_1_SQRT_2, 1.0, FRAC_1_SQRT_2];
        for (z, e) in v.iter().zip(expected) {
            assert!((z - c(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn lift_rejects_zero() {
        assert_eq!(rational_normal_lift(ZERO, ZERO, 2), Err(Error::ZeroVector));
    }

    #[test]
    fn degree_one_is_identity_map() {
        let u = Su2Matrix::from_cayley_klein(c(0.3, 0.4), c(-0.5, 0.2));
        let s = sym_power_matrix(&u, 1);
        assert!(s.mat.max_abs_diff(&u.to_matrix()) < 1e-15);
    }

    #[test]
    fn diagonal_weights() {
        let lam = C64::from_polar(1.0, 0.7);
        let n = 5;
        let s = sym_power_matrix(&Su2Matrix::diag(lam), n);
        let weights: Vec<C64> = (0..=n).map(|i| lam.powi(n as i32 - 2 * i as i32)).collect();
        assert!(s.mat.max_abs_diff(&ComplexMatrix::from_diag(&weights)) < 1e-14);
    }

    #[test]
    fn odd_power_of_minus_identity() {
        let s = sym_power_matrix(&Su2Matrix::IDENTITY.neg(), 3);
        assert!(s.mat.max_abs_diff(&ComplexMatrix::identity(4).scale(c(-1.0, 0.0))) < 1e-15);
    }

    #[test]
    fn fs_distance_basics() {
        let p = ProjectivePoint::new(vec![ONE, c(0.0, 2.0), c(-1.0, 0.5)]).unwrap();
        let q = ProjectivePoint::new(vec![c(0.3, 0.0), ONE, c(0.0, 0.0)]).unwrap();
        assert_eq!(fs_distance(&p, &p).unwrap(), 0.0);
        let e0 = ProjectivePoint::new(vec![ONE, ZERO]).unwrap();
        let e1 = ProjectivePoint::new(vec![ZERO, ONE]).unwrap();
        assert!((fs_distance(&e0, &e1).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let d1 = fs_distance(&p.scaled(c(2.0, 0.0)).unwrap(), &q).unwrap();
        let d2 = fs_distance(&p, &q).unwrap();
        assert!((d1 - d2).abs() < 1e-12);
        assert!(fs_distance(&p, &e0).is_err());
    }

    #[test]
    fn identity_has_zero_residual() {
        let z = ProjectivePoint::new(vec![c(0.2, -1.0), c(0.7, 0.1)]).unwrap();
        assert!(intertwine_residual(&Su2Matrix::IDENTITY, &z, 6).unwrap() < 1e-15);
    }

    #[test]
    fn ln_factorial_small_values() {
        assert_eq!(ln_factorial(0), 0.0);
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-15);
        let direct: f64 = (1..=40).map(|k| (k as f64).ln()).sum();
        assert!((ln_factorial(40) - direct).abs() < 1e-12);
    }
}
