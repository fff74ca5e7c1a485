//! Dense complex linear algebra.
//!
//! Everything here works on small square matrices (dimension at most a few
//! dozen) stored row-major in a flat `Vec`. Accumulation order is fixed so results are
//! bitwise reproducible.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Numerical thresholds shared by the verification kernels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed `|det - 1|` for unimodular matrices.
    pub det: f64,
    /// Pivot magnitude below which a row is dependent; for commutant
    /// systems, the eigenvalue of `R* R` at or below which a direction is kernel.
    pub rank: f64,
    /// Magnitude below which an entry counts as zero in sparsity checks.
    pub sparsity: f64,
    /// Smallest admissible Cholesky radicand.
    pub radicand: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            det: 1e-9,
            rank: 1e-8,
            sparsity: 1e-9,
            radicand: 1e-12,
        }
    }
}

/// Dense square complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from rows, rejecting ragged or non-finite input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            for (j, z) in row.iter().enumerate() {
                if !z.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    /// Row-major flat constructor.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: dim * dim,
                right: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(Self { dim, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).fold(ZERO, |acc, i| acc + self[(i, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        check_dims(self, other)?;
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `max |self - other|` entrywise; panics on mismatched dimensions.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Frobenius inner product `tr(self* other)`.
    pub fn frobenius_dot(&self, other: &Self) -> C64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(ZERO, |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// `max |A* A - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let g = matmul(&self.adjoint(), self);
        g.max_abs_diff(&Self::identity(self.dim))
    }

    /// `max |A - A*|`.
    pub fn hermitian_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_upper_triangular(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self[(i, j)].norm() <= tol))
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self[(i, j)].norm() <= tol))
    }

    /// `max |A B - B A|`.
    pub fn commutator_norm(&self, other: &Self) -> f64 {
        matmul(self, other).max_abs_diff(&matmul(other, self))
    }

    pub fn determinant(&self) -> C64 {
        determinant(self)
    }

    pub fn to_file(&self) -> MatrixFile {
        MatrixFile {
            dim: self.dim,
            entries: self.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// On-disk matrix layout: `{"dim": d, "entries": [[re, im], ...]}`, row-major.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixFile> for ComplexMatrix {
    type Error = Error;

    fn try_from(file: MatrixFile) -> Result<Self> {
        let data = file
            .entries
            .iter()
            .map(|&[re, im]| C64::new(re, im))
            .collect();
        ComplexMatrix::from_row_major(file.dim, data)
    }
}

fn check_dims(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    Ok(())
}

/// Matrix product with a dimension check.
pub fn mat_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dims(a, b)?;
    Ok(matmul(a, b))
}

/// Unchecked product; row-by-row, left-to-right accumulation.
pub(crate) fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let d = a.dim;
    debug_assert_eq!(d, b.dim);
    let mut out = ComplexMatrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = ZERO;
            for s in 0..d {
                acc += a.data[i * d + s] * b.data[s * d + j];
            }
            out.data[i * d + j] = acc;
        }
    }
    out
}

pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

fn lu_decompose(a: &ComplexMatrix) -> Lu {
    let d = a.dim;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..d).collect();
    let mut sign = 1.0;
    let mut singular = false;
    for k in 0..d {
        let (p, best) = (k..d)
            .map(|i| (i, lu[(i, k)].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == 0.0 {
            singular = true;
            continue;
        }
        if p != k {
            for j in 0..d {
                lu.data.swap(k * d + j, p * d + j);
            }
            perm.swap(k, p);
            sign = -sign;
        }
        let pivot = lu[(k, k)];
        for i in k + 1..d {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            for j in k + 1..d {
                let t = lu[(k, j)];
                lu[(i, j)] -= factor * t;
            }
        }
    }
    Lu {
        lu,
        perm,
        sign,
        singular,
    }
}

/// Determinant by LU with partial pivoting.
pub fn determinant(a: &ComplexMatrix) -> C64 {
    let lu = lu_decompose(a);
    if lu.singular {
        return ZERO;
    }
    (0..a.dim).fold(C64::new(lu.sign, 0.0), |acc, i| acc * lu.lu[(i, i)])
}

/// Solves `A x = b`.
pub fn solve(a: &ComplexMatrix, b: &[C64]) -> Result<Vec<C64>> {
    if b.len() != a.dim {
        return Err(Error::DimensionMismatch {
            left: a.dim,
            right: b.len(),
        });
    }
    let lu = lu_decompose(a);
    if lu.singular {
        return Err(Error::Singular);
    }
    Ok(lu_solve(&lu, b))
}

fn lu_solve(lu: &Lu, b: &[C64]) -> Vec<C64> {
    let d = lu.lu.dim;
    let mut x: Vec<C64> = lu.perm.iter().map(|&p| b[p]).collect();
    for i in 0..d {
        for j in 0..i {
            let t = x[j];
            x[i] -= lu.lu[(i, j)] * t;
        }
    }
    for i in (0..d).rev() {
        for j in i + 1..d {
            let t = x[j];
            x[i] -= lu.lu[(i, j)] * t;
        }
        x[i] /= lu.lu[(i, i)];
    }
    x
}

/// Inverse via column-by-column LU solves.
pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = a.dim;
    let lu = lu_decompose(a);
    if lu.singular {
        return Err(Error::Singular);
    }
    let mut inv = ComplexMatrix::zeros(d);
    let mut e = vec![ZERO; d];
    for j in 0..d {
        e.iter_mut().for_each(|z| *z = ZERO);
        e[j] = ONE;
        let col = lu_solve(&lu, &e);
        for i in 0..d {
            inv[(i, j)] = col[i];
        }
    }
    Ok(inv)
}

/// Incremental row echelon form over `C`.
///
/// Rows are pushed one at a time, reduced against the stored pivots, and
/// kept if the largest remaining entry exceeds `tol` in absolute value.
/// The pivot column of a new row is its largest entry, so this is
/// elimination with column pivoting.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    ncols: usize,
    tol: f64,
    pivots: Vec<PivotRow>,
    is_pivot: Vec<bool>,
}

#[derive(Clone, Debug)]
struct PivotRow {
    col: usize,
    // normalised so the entry at `col` is exactly 1
    entries: Vec<(usize, C64)>,
}

impl RowEchelon {
    pub fn new(ncols: usize, tol: f64) -> Self {
        Self {
            ncols,
            tol,
            pivots: Vec::new(),
            is_pivot: vec![false; ncols],
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn nullity(&self) -> usize {
        self.ncols - self.pivots.len()
    }

    pub fn is_full(&self) -> bool {
        self.pivots.len() == self.ncols
    }

    /// Reduces `row` in place and stores it as a new pivot row when it is
    /// independent. Returns whether the rank grew.
    pub fn push(&mut self, row: &mut [C64]) -> bool {
        assert_eq!(row.len(), self.ncols);
        for p in &self.pivots {
            let c = row[p.col];
            if c == ZERO {
                continue;
            }
            for &(j, v) in &p.entries {
                row[j] -= c * v;
            }
            row[p.col] = ZERO;
        }
        let (col, best) = row
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (j, z)| {
                let a = z.norm();
                if a > acc.1 {
                    (j, a)
                } else {
                    acc
                }
            });
        if best <= self.tol {
            return false;
        }
        let inv = ONE / row[col];
        let entries = row
            .iter()
            .enumerate()
            .filter(|(j, z)| *j != col && **z != ZERO && !self.is_pivot[*j])
            .map(|(j, &z)| (j, z * inv))
            .chain(std::iter::once((col, ONE)))
            .collect();
        self.is_pivot[col] = true;
        self.pivots.push(PivotRow { col, entries });
        true
    }

    /// Pushes a row given sparsely as `(column, value)` pairs.
    pub fn push_sparse(&mut self, entries: &[(usize, C64)]) -> bool {
        let mut row = vec![ZERO; self.ncols];
        for &(j, v) in entries {
            row[j] += v;
        }
        self.push(&mut row)
    }

    /// Basis of the right nullspace of the stored rows.
    pub fn null_space(&self) -> Vec<Vec<C64>> {
        let r = self.pivots.len();
        // Reduced form: clear every pivot column from the other pivot rows.
        let mut rows: Vec<Vec<C64>> = self
            .pivots
            .iter()
            .map(|p| {
                let mut v = vec![ZERO; self.ncols];
                for &(j, z) in &p.entries {
                    v[j] = z;
                }
                v
            })
            .collect();
        for q in (0..r).rev() {
            let col = self.pivots[q].col;
            let (head, tail) = rows.split_at_mut(q);
            let pivot_row = &tail[0];
            for row in head.iter_mut() {
                let c = row[col];
                if c == ZERO {
                    continue;
                }
                for j in 0..self.ncols {
                    row[j] -= c * pivot_row[j];
                }
                row[col] = ZERO;
            }
        }
        (0..self.ncols)
            .filter(|&f| !self.is_pivot[f])
            .map(|f| {
                let mut x = vec![ZERO; self.ncols];
                x[f] = ONE;
                for (q, p) in self.pivots.iter().enumerate() {
                    x[p.col] = -rows[q][f];
                }
                x
            })
            .collect()
    }
}

/// Rank by column-pivoted elimination.
pub fn rank(a: &ComplexMatrix, tol_rank: f64) -> usize {
    let mut ech = RowEchelon::new(a.dim, tol_rank);
    for i in 0..a.dim {
        let mut row = a.row(i).to_vec();
        ech.push(&mut row);
    }
    ech.rank()
}

/// `dim - rank`.
pub fn nullity(a: &ComplexMatrix, tol_rank: f64) -> usize {
    a.dim - rank(a, tol_rank)
}

/// Positive definite Hermitian matrix with unit determinant.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianUnimodular {
    m: ComplexMatrix,
}

impl HermitianUnimodular {
    /// Validates `m` (Hermitian within `tol_det`, `|det - 1| <= tol_det`)
    /// and stores the exactly Hermitian matrix built from its upper triangle.
    pub fn new(m: ComplexMatrix, tol_det: f64) -> Result<Self> {
        let deviation = m.hermitian_defect();
        if deviation > tol_det * m.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        let m = hermitian_from_upper(&m);
        let det = determinant(&m);
        let deviation = (det - ONE).norm();
        if deviation > tol_det {
            return Err(Error::NotUnitDeterminant { deviation });
        }
        Ok(Self { m })
    }

    /// Rescales a positive definite Hermitian matrix to determinant 1 first.
    pub fn normalized(m: ComplexMatrix, tol_det: f64) -> Result<Self> {
        let m = hermitian_from_upper(&m);
        let det = determinant(&m);
        if det.re <= 0.0 || !det.re.is_finite() {
            return Err(Error::NotPositiveDefinite {
                index: 0,
                radicand: det.re,
            });
        }
        let s = det.re.powf(-1.0 / m.dim() as f64);
        Self::new(m.scale(C64::new(s, 0.0)), tol_det)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }
}

fn hermitian_from_upper(m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.dim(), |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => m[(i, j)],
        std::cmp::Ordering::Equal => C64::new(m[(i, i)].re, 0.0),
        std::cmp::Ordering::Greater => m[(j, i)].conj(),
    })
}

/// Upper triangular matrix with positive real diagonal and unit determinant.
#[derive(Clone, Debug, PartialEq)]
pub struct UpperTriangularPositive {
    a: ComplexMatrix,
}

impl UpperTriangularPositive {
    pub fn new(a: ComplexMatrix, tol_det: f64) -> Result<Self> {
        let d = a.dim();
        for i in 0..d {
            for j in 0..i {
                if a[(i, j)] != ZERO {
                    return Err(Error::NotUpperTriangularPositive);
                }
            }
            if a[(i, i)].im != 0.0 || a[(i, i)].re <= 0.0 {
                return Err(Error::NotUpperTriangularPositive);
            }
        }
        let deviation = (determinant(&a) - ONE).norm();
        if deviation > tol_det {
            return Err(Error::NotUnitDeterminant { deviation });
        }
        Ok(Self { a })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.a
    }

    /// `δ* δ`.
    pub fn gram(&self) -> ComplexMatrix {
        matmul(&self.a.adjoint(), &self.a)
    }
}

/// Upper Cholesky factor `δ` with `δ* δ = m`, by the column recurrences
///
/// ```text
/// a_ij = (m_ij - Σ_{s<i} conj(a_si) a_sj) / a_ii      (i < j)
/// a_jj = sqrt(m_jj - Σ_{s<j} |a_sj|^2)
/// ```
///
/// Positive definiteness is detected by the radicands themselves.
pub fn cholesky_upper(m: &ComplexMatrix, radicand_tol: f64) -> Result<ComplexMatrix> {
    let d = m.dim();
    let mut a = ComplexMatrix::zeros(d);
    for j in 0..d {
        for i in 0..j {
            let mut acc = m[(i, j)];
            for s in 0..i {
                acc -= a[(s, i)].conj() * a[(s, j)];
            }
            a[(i, j)] = acc / a[(i, i)].re;
        }
        let mut radicand = m[(j, j)].re;
        for s in 0..j {
            radicand -= a[(s, j)].norm_sqr();
        }
        if !(radicand > radicand_tol) {
            return Err(Error::NotPositiveDefinite { index: j, radicand });
        }
        a[(j, j)] = C64::new(radicand.sqrt(), 0.0);
    }
    Ok(a)
}

/// Cholesky factorization `Herm⁺(1) → Δ`.
pub fn cholesky_unimodular(m: &HermitianUnimodular) -> Result<UpperTriangularPositive> {
    let tol = Tolerances::default();
    let a = cholesky_upper(m.matrix(), tol.radicand)?;
    // det(δ)^2 = det(M), so the factor inherits the unimodular tolerance.
    UpperTriangularPositive::new(a, tol.det.max(2.0 * (determinant(m.matrix()) - ONE).norm()))
}

/// True iff every entry `(i, j)` with `k ∤ (i - j)` has modulus at most `tol`.
pub fn pattern_holds(a: &ComplexMatrix, k: usize, tol: f64) -> bool {
    assert!(k >= 1);
    let d = a.dim();
    (0..d).all(|i| {
        (0..d).all(|j| (i as isize - j as isize).rem_euclid(k as isize) == 0 || a[(i, j)].norm() <= tol)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_is_left_neutral() {
        let a = ComplexMatrix::from_fn(3, |i, j| c(i as f64 + 0.5, j as f64 - 1.0));
        assert_eq!(mat_mul(&ComplexMatrix::identity(3), &a).unwrap(), a);
    }

    #[test]
    fn reciprocal_diagonals_multiply_to_identity() {
        let a = ComplexMatrix::from_diag(&[c(2.0, 0.0), c(0.5, 0.0)]);
        let b = ComplexMatrix::from_diag(&[c(0.5, 0.0), c(2.0, 0.0)]);
        assert_eq!(mat_mul(&a, &b).unwrap(), ComplexMatrix::identity(2));
    }

    #[test]
    fn mismatched_product_is_an_error() {
        let err = mat_mul(&ComplexMatrix::zeros(2), &ComplexMatrix::zeros(3)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { left: 2, right: 3 });
    }

    #[test]
    fn adjoint_of_nilpotent() {
        let a = ComplexMatrix::from_rows(&[vec![ZERO, c(0.0, 1.0)], vec![ZERO, ZERO]]).unwrap();
        let expected =
            ComplexMatrix::from_rows(&[vec![ZERO, ZERO], vec![c(0.0, -1.0), ZERO]]).unwrap();
        assert_eq!(a.adjoint(), expected);
    }

    #[test]
    fn adjoint_fixes_real_symmetric() {
        let a = ComplexMatrix::from_fn(4, |i, j| c((i + j) as f64, 0.0));
        assert_eq!(a.adjoint(), a);
    }

    #[test]
    fn simple_determinants() {
        assert_eq!(determinant(&ComplexMatrix::identity(5)), ONE);
        let d = ComplexMatrix::from_diag(&[c(2.0, 0.0), c(0.5, 0.0)]);
        assert!((determinant(&d) - ONE).norm() < 1e-15);
        assert_eq!(determinant(&ComplexMatrix::zeros(3)), ZERO);
    }

    #[test]
    fn nullity_basics() {
        for d in 1..6 {
            assert_eq!(nullity(&ComplexMatrix::zeros(d), 1e-8), d);
            assert_eq!(nullity(&ComplexMatrix::identity(d), 1e-8), 0);
        }
        let u = [c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0), c(1.0, 1.0)];
        let v = [c(0.3, -1.0), c(2.0, 0.5), c(-1.0, 0.0), c(0.0, 0.7)];
        let outer = ComplexMatrix::from_fn(4, |i, j| u[i] * v[j].conj());
        assert_eq!(nullity(&outer, 1e-8), 3);
    }

    #[test]
    fn null_space_vectors_are_annihilated() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 1.0), c(0.0, 1.0)],
            vec![c(2.0, 0.0), c(4.0, 2.0), c(0.0, 2.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let mut ech = RowEchelon::new(3, 1e-10);
        for i in 0..3 {
            ech.push(&mut a.row(i).to_vec());
        }
        assert_eq!(ech.rank(), 2);
        let basis = ech.null_space();
        assert_eq!(basis.len(), 1);
        let image = a.mul_vec(&basis[0]);
        assert!(image.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn cholesky_identity() {
        let m = HermitianUnimodular::new(ComplexMatrix::identity(4), 1e-9).unwrap();
        let delta = cholesky_unimodular(&m).unwrap();
        assert_eq!(delta.matrix(), &ComplexMatrix::identity(4));
    }

    #[test]
    fn cholesky_two_by_two_by_hand() {
        // a00 = sqrt(2), a01 = i/sqrt(2), a11 = sqrt(1 - 1/2)
        let m = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let m = HermitianUnimodular::new(m, 1e-9).unwrap();
        let delta = cholesky_unimodular(&m).unwrap();
        let s = std::f64::consts::SQRT_2;
        let expected =
            ComplexMatrix::from_rows(&[vec![c(s, 0.0), c(0.0, 1.0 / s)], vec![ZERO, c(1.0 / s, 0.0)]])
                .unwrap();
        assert!(delta.matrix().max_abs_diff(&expected) < 1e-15);
        assert!(delta.gram().max_abs_diff(m.matrix()) < 1e-15);
    }

    #[test]
    fn cholesky_dim_one() {
        let m = HermitianUnimodular::new(ComplexMatrix::identity(1), 1e-9).unwrap();
        assert_eq!(cholesky_unimodular(&m).unwrap().matrix()[(0, 0)], ONE);
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let m = ComplexMatrix::from_diag(&[c(-1.0, 0.0), c(-1.0, 0.0)]);
        let m = HermitianUnimodular::new(m, 1e-9).unwrap();
        assert!(matches!(
            cholesky_unimodular(&m),
            Err(Error::NotPositiveDefinite { index: 0, .. })
        ));
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = ComplexMatrix::from_rows(&[vec![ONE, ONE], vec![ZERO, ONE]]).unwrap();
        assert!(matches!(
            HermitianUnimodular::new(m, 1e-9),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn wrong_determinant_is_rejected() {
        let m = ComplexMatrix::identity(2).scale(c(2.0, 0.0));
        assert!(matches!(
            HermitianUnimodular::new(m.clone(), 1e-9),
            Err(Error::NotUnitDeterminant { .. })
        ));
        let n = HermitianUnimodular::normalized(m, 1e-9).unwrap();
        assert!(n.matrix().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn pattern_examples() {
        let a = ComplexMatrix::from_fn(4, |i, j| c((i * 4 + j) as f64 + 1.0, 0.0));
        assert!(pattern_holds(&a, 1, 1e-9));
        let d = ComplexMatrix::from_diag(&[ONE, c(2.0, 0.0), c(3.0, 0.0)]);
        for k in 1..5 {
            assert!(pattern_holds(&d, k, 1e-9));
        }
        let mut e = ComplexMatrix::identity(3);
        e[(0, 1)] = ONE;
        assert!(!pattern_holds(&e, 2, 1e-9));
    }

    #[test]
    fn matrix_file_roundtrip() {
        let a = ComplexMatrix::from_fn(2, |i, j| c(i as f64, j as f64));
        let json = serde_json::to_string(&a.to_file()).unwrap();
        assert_eq!(json, r#"{"dim":2,"entries":[[0.0,0.0],[0.0,1.0],[1.0,0.0],[1.0,1.0]]}"#);
        let back: MatrixFile = serde_json::from_str(&json).unwrap();
        assert_eq!(ComplexMatrix::try_from(back).unwrap(), a);
    }
}
