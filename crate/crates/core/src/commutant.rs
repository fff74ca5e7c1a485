//! Commutants of `σ(G) ⊂ U(Symⁿ C²)` and the dimension of the space of
//! reduced deformations.
//!
//! Two independent routes give `dim_C End_G(Symⁿ)`:
//!
//! * [`commutant_dim_nullspace`] solves `σ(g) A = A σ(g)` for every
//!   generator `g` as a linear system in the `(n+1)²` entries of `A`;
//! * [`commutant_dim_character`] averages `|χ(g)|²` over the enumerated group.
//!
//! The deformation space `Δ_v` has real dimension one less than the
//! commutant; [`delta_dim_formula`] evaluates the closed forms for every
//! family of closed subgroups.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{self, Su2Matrix, SubgroupSpec, GENERIC_ANGLE};
use crate::linalg::{
    self, cholesky_unimodular, pattern_holds, ComplexMatrix, HermitianUnimodular,
    Tolerances, UpperTriangularPositive, C64, ZERO,
};
use crate::sampling;
use crate::symrep::sym_power_matrix;

/// Gap to the nearest integer below which a real value counts as integral.
pub const INTEGRALITY_TOL: f64 = 1e-9;
/// Commutation residual accepted for commutant elements and samples.
pub const COMMUTATION_TOL: f64 = 1e-8;
const SAMPLE_ATTEMPTS: usize = 8;

/// Basis of `V_v = {A : A σ(g) = σ(g) A for all generators g}`.
#[derive(Clone, Debug)]
pub struct CommutantBasis {
    pub spec: SubgroupSpec,
    pub n: usize,
    pub basis: Vec<ComplexMatrix>,
}

/// The stacked commutation system, expressed in the eigenbasis of one
/// generator.
///
/// Writing the pivot generator as `V diag(λ₁, λ₂) V*`, conjugation by
/// `σ(V)` makes its symmetric power diagonal with weights
/// `w_a = λ₁^{n-a} λ₂^a`. Its equations `(w_a - w_b) B_ab = 0` are
/// singletons and eliminate every entry with `|w_a - w_b| > tol`; the
/// remaining generators contribute sparse rows over the surviving entries.
///
/// The kernel of the row matrix `R` is the kernel of the Gram operator
/// `R* R`, which splits into blocks along connected groups of unknowns.
/// Each block is diagonalized and eigenvalues at most `tol` count towards
/// the nullity. Incremental elimination of the rows is order dependent
/// here: early subsets of rows are nearly degenerate even when the whole
/// system is well conditioned.
struct CommutantSystem {
    n: usize,
    /// `σ(V)`: maps weight-basis solutions back to the original basis.
    frame: ComplexMatrix,
    /// Surviving unknowns `(a, b)`.
    columns: Vec<(usize, usize)>,
    blocks: Vec<GramBlock>,
    tol: f64,
}

struct GramBlock {
    /// Indices into `columns`.
    cols: Vec<usize>,
    gram: DMatrix<C64>,
}

/// Entries this small are dropped from the rows so that exact zeros
/// polluted by rounding do not merge blocks.
const ROW_DROP: f64 = 1e-14;

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn weights(l1: C64, l2: C64, n: usize) -> Vec<C64> {
    (0..=n)
        .map(|a| l1.powi((n - a) as i32) * l2.powi(a as i32))
        .collect()
}

fn surviving(w: &[C64], tol: f64) -> Vec<(usize, usize)> {
    let d = w.len();
    (0..d)
        .flat_map(|a| (0..d).map(move |b| (a, b)))
        .filter(|&(a, b)| (w[a] - w[b]).norm() <= tol)
        .collect()
}

impl CommutantSystem {
    fn build(spec: SubgroupSpec, n: usize, tol_rank: f64) -> Self {
        let gens = groups::generators(spec);
        let d = n + 1;
        // Pivot on the generator leaving the fewest unknowns.
        let (pivot, v, columns) = gens
            .iter()
            .enumerate()
            .map(|(idx, g)| {
                let (v, l1, l2) = groups::diagonalize(g);
                (idx, v, surviving(&weights(l1, l2, n), tol_rank))
            })
            .min_by_key(|(idx, _, cols)| (cols.len(), *idx))
            .expect("every subgroup has a generator");
        let frame = sym_power_matrix(&v, n).mat;
        let m = columns.len();
        let mut index = vec![usize::MAX; d * d];
        for (c, &(a, b)) in columns.iter().enumerate() {
            index[a * d + b] = c;
        }

        let mut rows: Vec<Vec<(usize, C64)>> = Vec::new();
        let mut dense = vec![ZERO; m];
        let mut touched: Vec<usize> = Vec::new();
        for (idx, g) in gens.iter().enumerate() {
            if idx == pivot {
                continue;
            }
            let w = sym_power_matrix(&(v.adjoint() * *g * v), n).mat;
            // Row (r, s) of W B - B W: coefficient W_ra on B_as, -W_bs on B_rb.
            for r in 0..d {
                for s in 0..d {
                    for a in 0..d {
                        let c = index[a * d + s];
                        if c != usize::MAX {
                            dense[c] += w[(r, a)];
                            touched.push(c);
                        }
                    }
                    for b in 0..d {
                        let c = index[r * d + b];
                        if c != usize::MAX {
                            dense[c] -= w[(b, s)];
                            touched.push(c);
                        }
                    }
                    touched.sort_unstable();
                    touched.dedup();
                    let row: Vec<(usize, C64)> = touched
                        .iter()
                        .map(|&c| (c, std::mem::replace(&mut dense[c], ZERO)))
                        .filter(|(_, z)| z.norm() > ROW_DROP)
                        .collect();
                    touched.clear();
                    if !row.is_empty() {
                        rows.push(row);
                    }
                }
            }
        }

        let mut parent: Vec<usize> = (0..m).collect();
        for row in &rows {
            let root = find(&mut parent, row[0].0);
            for &(c, _) in &row[1..] {
                let rc = find(&mut parent, c);
                parent[rc] = root;
            }
        }
        let mut block_of = vec![usize::MAX; m];
        let mut local = vec![0usize; m];
        let mut members: Vec<Vec<usize>> = Vec::new();
        for c in 0..m {
            let root = find(&mut parent, c);
            if block_of[root] == usize::MAX {
                block_of[root] = members.len();
                members.push(Vec::new());
            }
            let b = block_of[root];
            local[c] = members[b].len();
            members[b].push(c);
            block_of[c] = b;
        }
        let mut blocks: Vec<GramBlock> = members
            .into_iter()
            .map(|cols| GramBlock {
                gram: DMatrix::zeros(cols.len(), cols.len()),
                cols,
            })
            .collect();
        for row in &rows {
            let gram = &mut blocks[block_of[row[0].0]].gram;
            for &(c1, z1) in row {
                let z1 = z1.conj();
                for &(c2, z2) in row {
                    gram[(local[c1], local[c2])] += z1 * z2;
                }
            }
        }
        Self {
            n,
            frame,
            columns,
            blocks,
            tol: tol_rank,
        }
    }

    fn nullity(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| {
                if b.cols.len() == 1 {
                    usize::from(b.gram[(0, 0)].re <= self.tol)
                } else {
                    b.gram
                        .clone()
                        .symmetric_eigenvalues()
                        .iter()
                        .filter(|&&e| e <= self.tol)
                        .count()
                }
            })
            .sum()
    }

    /// Kernel vectors in the original basis, orthonormal for the Frobenius
    /// inner product.
    fn basis(&self) -> Vec<ComplexMatrix> {
        let d = self.n + 1;
        let frame_adj = self.frame.adjoint();
        let mut out = Vec::new();
        for block in &self.blocks {
            let eig = block.gram.clone().symmetric_eigen();
            for (k, &e) in eig.eigenvalues.iter().enumerate() {
                if e > self.tol {
                    continue;
                }
                let mut b = ComplexMatrix::zeros(d);
                for (l, &c) in block.cols.iter().enumerate() {
                    let (i, j) = self.columns[c];
                    b[(i, j)] = eig.eigenvectors[(l, k)];
                }
                out.push(linalg::matmul(&linalg::matmul(&self.frame, &b), &frame_adj));
            }
        }
        out
    }
}

/// `dim_C V_v` by nullspace of the stacked commutation equations.
pub fn commutant_dim_nullspace(spec: SubgroupSpec, n: usize) -> usize {
    commutant_dim_nullspace_with_tol(spec, n, Tolerances::default().rank)
}

pub fn commutant_dim_nullspace_with_tol(spec: SubgroupSpec, n: usize, tol_rank: f64) -> usize {
    CommutantSystem::build(spec, n, tol_rank).nullity()
}

/// Frobenius-orthonormal basis of the commutant.
pub fn commutant_basis(spec: SubgroupSpec, n: usize, tol_rank: f64) -> CommutantBasis {
    let basis = CommutantSystem::build(spec, n, tol_rank).basis();
    CommutantBasis { spec, n, basis }
}

/// `max_g |A σ(g) - σ(g) A|` over the generators.
pub fn commutation_residual(spec: SubgroupSpec, n: usize, a: &ComplexMatrix) -> f64 {
    groups::generators(spec)
        .iter()
        .map(|g| a.commutator_norm(&sym_power_matrix(g, n).mat))
        .fold(0.0, f64::max)
}

/// `(1/|G|) Σ_g |χ_{Symⁿ}(g)|²` before rounding.
pub fn character_norm(group: &groups::FiniteGroup, n: usize) -> f64 {
    let total: f64 = group
        .elements
        .iter()
        .map(|g| groups::sym_character(g, n).norm_sqr())
        .sum();
    total / group.order() as f64
}

/// `dim_C V_v` from the character inner product.
pub fn commutant_dim_character(spec: SubgroupSpec, n: usize) -> Result<usize> {
    let group = groups::enumerate(spec)?;
    let raw = character_norm(&group, n);
    let value = raw.round();
    if (raw - value).abs() >= INTEGRALITY_TOL {
        return Err(Error::NonIntegral { raw });
    }
    Ok(value as usize)
}

/// Closed-form `dim_R Δ_v`: the raw real value and its nearest integer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FormulaValue {
    pub raw: f64,
    pub value: i64,
}

impl FormulaValue {
    fn new(raw: f64) -> Self {
        Self {
            raw,
            value: raw.round() as i64,
        }
    }

    pub fn gap(&self) -> f64 {
        (self.raw - self.value as f64).abs()
    }

    pub fn is_integral(&self) -> bool {
        self.gap() < INTEGRALITY_TOL
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `cos(nπ/3) + (√3/3) sin(nπ/3)`.
fn c_three(n: f64) -> f64 {
    let t = n * PI / 3.0;
    t.cos() + 3f64.sqrt() / 3.0 * t.sin()
}

/// Closed-form `dim_R Δ_v` for the subgroup family.
pub fn delta_dim_formula(spec: SubgroupSpec, n: usize) -> FormulaValue {
    let nf = n as f64;
    let odd = n % 2 == 1;
    let raw = match spec {
        SubgroupSpec::Full => 0.0,
        SubgroupSpec::U1 => nf,
        SubgroupSpec::O2 => (n / 2) as f64,
        SubgroupSpec::Cyclic(k) => {
            let g = gcd(k as u64, 2);
            let kappa = (k as u64 / g) as f64;
            let q = ((n as u64 * g) / k as u64) as f64;
            -kappa * q * q + (2.0 * nf + 2.0 - kappa) * q + nf
        }
        SubgroupSpec::BinaryDihedral(k) => {
            let kf = k as f64;
            let q = (n / k as usize) as f64;
            -kf / 2.0 * q * q + (nf + 1.0 - kf / 2.0) * q + (n / 2) as f64
        }
        SubgroupSpec::E6 => {
            let c = c_three(nf);
            let base = nf * nf / 12.0 + 2.0 * c * c / 3.0 + nf / 6.0;
            if odd {
                base - 11.0 / 12.0
            } else {
                base - 2.0 / 3.0
            }
        }
        SubgroupSpec::E7 => {
            let c1 = c_three(nf);
            let t = nf * PI / 4.0;
            let c2 = t.cos() + t.sin();
            let base = nf * nf / 24.0 + nf / 12.0 + c1 * c1 / 3.0 + c2 * c2 / 4.0;
            if odd {
                base - 23.0 / 24.0
            } else {
                base - 7.0 / 12.0
            }
        }
        SubgroupSpec::E8 => {
            let s5 = 5f64.sqrt();
            let c1 = c_three(nf);
            let t = nf * PI / 5.0;
            let c2 = (1.0 + 2.0 / s5).sqrt() * t.sin() + t.cos();
            let c3 = (1.0 - 2.0 / s5).sqrt() * (2.0 * t).sin() + (2.0 * t).cos();
            let base =
                nf * nf / 60.0 + nf / 30.0 + c1 * c1 / 3.0 + c2 * c2 / 5.0 + c3 * c3 / 5.0;
            // even n: the class sum gives dim V = base + 4/15
            if odd {
                base - 59.0 / 60.0
            } else {
                base - 11.0 / 15.0
            }
        }
    };
    FormulaValue::new(raw)
}

/// Which oracle produced a commutant dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleMethod {
    Character,
    Nullspace,
}

/// One cell of the dimension table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimReport {
    pub spec: SubgroupSpec,
    pub n: usize,
    pub method: OracleMethod,
    /// `dim_C V_v`.
    pub commutant_dim: usize,
    /// Oracle value of `dim_R Δ_v` (commutant dimension minus one).
    pub dim_oracle: i64,
    pub dim_formula: i64,
    pub formula_raw: f64,
    pub integral: bool,
    pub agree: bool,
}

/// Computes a single table cell; characters for finite groups, nullspace otherwise.
pub fn dim_cell(spec: SubgroupSpec, n: usize, tol_rank: f64) -> Result<DimReport> {
    let (method, commutant_dim) = if spec.is_finite() {
        (OracleMethod::Character, commutant_dim_character(spec, n)?)
    } else {
        (
            OracleMethod::Nullspace,
            commutant_dim_nullspace_with_tol(spec, n, tol_rank),
        )
    };
    let formula = delta_dim_formula(spec, n);
    let dim_oracle = commutant_dim as i64 - 1;
    let integral = formula.is_integral();
    Ok(DimReport {
        spec,
        n,
        method,
        commutant_dim,
        dim_oracle,
        dim_formula: formula.value,
        formula_raw: formula.raw,
        integral,
        agree: integral && dim_oracle == formula.value,
    })
}

/// Every `(spec, n)` cell, evaluated in parallel, ordered spec-major as given.
pub fn dim_table(specs: &[SubgroupSpec], ns: &[usize], tol_rank: f64) -> Result<Vec<DimReport>> {
    let cells: Vec<(SubgroupSpec, usize)> = specs
        .iter()
        .flat_map(|&s| ns.iter().map(move |&n| (s, n)))
        .collect();
    cells
        .par_iter()
        .map(|&(s, n)| dim_cell(s, n, tol_rank))
        .collect()
}

/// Linear constraints describing `Δ_v`, where the family has them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeltaPattern {
    /// `diag(a_0, ..., a_n)`.
    Diagonal,
    /// Diagonal with `a_i = a_{n-i}`.
    DiagonalPalindromic,
    /// `a_ij = 0` unless `modulus | (i - j)`.
    Sparsity { modulus: usize },
    /// Sparsity plus the Gram symmetry `M_ij = (-1)^{i-j} M_{n-i,n-j}`, `M = δ*δ`.
    SparsityWithGram { modulus: usize },
}

impl DeltaPattern {
    pub fn describe(&self) -> String {
        match self {
            Self::Diagonal => "diagonal, positive entries, det 1".into(),
            Self::DiagonalPalindromic => "diagonal with a_i = a_{n-i}, det 1".into(),
            Self::Sparsity { modulus } => {
                format!("upper triangular, a_ij = 0 unless {modulus} | (i - j)")
            }
            Self::SparsityWithGram { modulus } => format!(
                "upper triangular, a_ij = 0 unless {modulus} | (i - j), \
                 (δ*δ)_ij = (-1)^(i-j) (δ*δ)_(n-i,n-j)"
            ),
        }
    }

    /// Checks an upper triangular `δ` against the pattern.
    pub fn holds(&self, delta: &ComplexMatrix, tol: f64) -> bool {
        let d = delta.dim();
        match *self {
            Self::Diagonal => delta.is_diagonal(tol),
            Self::DiagonalPalindromic => {
                delta.is_diagonal(tol)
                    && (0..d).all(|i| (delta[(i, i)] - delta[(d - 1 - i, d - 1 - i)]).norm() <= tol)
            }
            Self::Sparsity { modulus } => pattern_holds(delta, modulus, tol),
            Self::SparsityWithGram { modulus } => {
                pattern_holds(delta, modulus, tol) && gram_symmetry_defect(delta) <= tol
            }
        }
    }
}

/// `max |M_ij - (-1)^{i-j} M_{n-i,n-j}|` for `M = δ*δ`.
pub fn gram_symmetry_defect(delta: &ComplexMatrix) -> f64 {
    let m = linalg::matmul(&delta.adjoint(), delta);
    let d = m.dim();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            worst = worst.max((m[(i, j)] - m[(d - 1 - i, d - 1 - j)] * sign).norm());
        }
    }
    worst
}

/// Structural description of `Δ_v` for the families that have one.
pub fn delta_pattern(spec: SubgroupSpec, _n: usize) -> Result<DeltaPattern> {
    match spec {
        SubgroupSpec::U1 => Ok(DeltaPattern::Diagonal),
        SubgroupSpec::O2 => Ok(DeltaPattern::DiagonalPalindromic),
        SubgroupSpec::Cyclic(k) => Ok(DeltaPattern::Sparsity {
            modulus: (k / gcd(k as u64, 2) as u32) as usize,
        }),
        SubgroupSpec::BinaryDihedral(k) => Ok(DeltaPattern::SparsityWithGram {
            modulus: k as usize,
        }),
        SubgroupSpec::Full | SubgroupSpec::E6 | SubgroupSpec::E7 | SubgroupSpec::E8 => {
            Err(Error::UnsupportedCase(spec.to_string()))
        }
    }
}

/// Draws a random element of `Δ_v`.
///
/// A random Hermitian matrix is projected onto the commutant, shifted by a
/// multiple of the identity, rescaled to determinant 1 and factored. The
/// shift doubles on each failed attempt.
pub fn sample_reduced_delta(
    spec: SubgroupSpec,
    n: usize,
    seed: u64,
) -> Result<UpperTriangularPositive> {
    let tol = Tolerances::default();
    let basis = commutant_basis(spec, n, tol.rank).basis;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = n + 1;
    let h = sampling::hermitian(&mut rng, d);
    let mut projected = ComplexMatrix::zeros(d);
    for q in &basis {
        projected = projected
            .add(&q.scale(q.frobenius_dot(&h)))
            .expect("same dimension");
    }
    let projected = projected
        .add(&projected.adjoint())
        .expect("same dimension")
        .scale(C64::new(0.5, 0.0));
    let size = projected.frobenius_norm();
    let mut last = Error::NotPositiveDefinite {
        index: 0,
        radicand: 0.0,
    };
    let mut shift = 0.25 * size + 0.1;
    for _ in 0..SAMPLE_ATTEMPTS {
        let m = projected
            .add(&ComplexMatrix::identity(d).scale(C64::new(shift, 0.0)))
            .expect("same dimension");
        let attempt = HermitianUnimodular::normalized(m, tol.det).and_then(|m| cholesky_unimodular(&m));
        match attempt {
            Ok(delta) => return Ok(delta),
            Err(e @ Error::NotPositiveDefinite { .. }) => last = e,
            Err(e) => return Err(e),
        }
        shift *= 2.0;
    }
    Err(last)
}

/// Smallest gap `|w_a - w_b|` between the weights `e^{i(n-2j)θ₀}` of the
/// generic U(1) element.
pub fn generic_weight_separation(n: usize) -> f64 {
    let lam = C64::from_polar(1.0, GENERIC_ANGLE);
    let w = weights(lam, lam.conj(), n);
    let mut best = f64::INFINITY;
    for a in 0..w.len() {
        for b in a + 1..w.len() {
            best = best.min((w[a] - w[b]).norm());
        }
    }
    best
}

/// Generator images `σ(g)` for use by callers checking residuals.
pub fn generator_images(spec: SubgroupSpec, n: usize) -> Vec<ComplexMatrix> {
    groups::generators(spec)
        .iter()
        .map(|g: &Su2Matrix| sym_power_matrix(g, n).mat)
        .collect()
}
