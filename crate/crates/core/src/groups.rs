//! Closed subgroups of SU(2) and their symmetric-power characters.
//!
//! Finite groups are generated from explicit generator matrices and closed
//! breadth-first; infinite groups are represented by a few generic
//! elements whose commutants coincide with the commutant of the whole group.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ONE, ZERO};

/// Unitary / determinant tolerance for [`Su2Matrix`].
pub const SU2_TOL: f64 = 1e-10;
/// Upper bound on enumerated group size.
pub const MAX_GROUP_ORDER: usize = 10_000;
/// Rotation angle (radians) of the generic U(1) element.
pub const GENERIC_ANGLE: f64 = 1.0;

const DEDUP_DECIMALS: i32 = 9;
const DEDUP_CONFIRM: f64 = 1e-7;

/// 2x2 special unitary matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su2Matrix {
    m: [[C64; 2]; 2],
}

impl Su2Matrix {
    pub const IDENTITY: Self = Self {
        m: [[ONE, ZERO], [ZERO, ONE]],
    };

    /// Validates unitarity and unit determinant within [`SU2_TOL`].
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let u = Self { m: [[a, b], [c, d]] };
        let unitarity = u.unitarity_defect();
        let det = (u.det() - ONE).norm();
        if !(unitarity <= SU2_TOL && det <= SU2_TOL) {
            return Err(Error::NotSpecialUnitary { unitarity, det });
        }
        Ok(u)
    }

    /// `[[α, -conj β], [β, conj α]]` for `|α|² + |β|² = 1`.
    pub fn from_cayley_klein(alpha: C64, beta: C64) -> Self {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        let (alpha, beta) = (alpha / norm, beta / norm);
        Self {
            m: [[alpha, -beta.conj()], [beta, alpha.conj()]],
        }
    }

    pub fn diag(lambda: C64) -> Self {
        Self {
            m: [[lambda, ZERO], [ZERO, lambda.conj()]],
        }
    }

    pub(crate) fn raw(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    #[inline]
    pub fn a(&self) -> C64 {
        self.m[0][0]
    }
    #[inline]
    pub fn b(&self) -> C64 {
        self.m[0][1]
    }
    #[inline]
    pub fn c(&self) -> C64 {
        self.m[1][0]
    }
    #[inline]
    pub fn d(&self) -> C64 {
        self.m[1][1]
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.a(), self.b(), self.c(), self.d()]
    }

    pub fn trace(&self) -> C64 {
        self.a() + self.d()
    }

    pub fn det(&self) -> C64 {
        self.a() * self.d() - self.b() * self.c()
    }

    pub fn adjoint(&self) -> Self {
        Self::raw(
            self.a().conj(),
            self.c().conj(),
            self.b().conj(),
            self.d().conj(),
        )
    }

    /// Group inverse (the adjoint).
    pub fn inverse(&self) -> Self {
        self.adjoint()
    }

    pub fn neg(&self) -> Self {
        Self::raw(-self.a(), -self.b(), -self.c(), -self.d())
    }

    pub fn apply(&self, z: [C64; 2]) -> [C64; 2] {
        [
            self.a() * z[0] + self.b() * z[1],
            self.c() * z[0] + self.d() * z[1],
        ]
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.entries()
            .iter()
            .zip(other.entries())
            .fold(0.0, |m, (x, y)| m.max((x - y).norm()))
    }

    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint() * *self;
        p.distance(&Self::IDENTITY)
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(2, |i, j| self.m[i][j])
    }

    fn dedup_key(&self) -> [i64; 8] {
        let scale = 10f64.powi(DEDUP_DECIMALS);
        let mut key = [0i64; 8];
        for (slot, z) in self.entries().iter().enumerate() {
            key[2 * slot] = (z.re * scale).round() as i64;
            key[2 * slot + 1] = (z.im * scale).round() as i64;
        }
        key
    }
}

impl Mul for Su2Matrix {
    type Output = Su2Matrix;

    fn mul(self, rhs: Su2Matrix) -> Su2Matrix {
        let (l, r) = (&self.m, &rhs.m);
        Su2Matrix::raw(
            l[0][0] * r[0][0] + l[0][1] * r[1][0],
            l[0][0] * r[0][1] + l[0][1] * r[1][1],
            l[1][0] * r[0][0] + l[1][1] * r[1][0],
            l[1][0] * r[0][1] + l[1][1] * r[1][1],
        )
    }
}

/// Closed subgroup of SU(2), up to conjugacy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SubgroupSpec {
    Full,
    U1,
    O2,
    Cyclic(u32),
    BinaryDihedral(u32),
    E6,
    E7,
    E8,
}

impl SubgroupSpec {
    pub fn is_finite(&self) -> bool {
        !matches!(self, Self::Full | Self::U1 | Self::O2)
    }

    /// Order of the group in SU(2), `None` for infinite groups.
    pub fn order(&self) -> Option<usize> {
        match *self {
            Self::Full | Self::U1 | Self::O2 => None,
            Self::Cyclic(k) => Some(k as usize),
            Self::BinaryDihedral(k) => Some(4 * k as usize),
            Self::E6 => Some(24),
            Self::E7 => Some(48),
            Self::E8 => Some(120),
        }
    }

    /// Parameter `k` for cyclic and dihedral families.
    pub fn k(&self) -> Option<u32> {
        match *self {
            Self::Cyclic(k) | Self::BinaryDihedral(k) => Some(k),
            _ => None,
        }
    }

    /// Family name without the parameter (`full`, `c`, `e6`, ...).
    pub fn family(&self) -> &'static str {
        match self {
            Self::Full => "full",
            Self::U1 => "u1",
            Self::O2 => "o2",
            Self::Cyclic(_) => "c",
            Self::BinaryDihedral(_) => "d",
            Self::E6 => "e6",
            Self::E7 => "e7",
            Self::E8 => "e8",
        }
    }

    /// Parses a comma separated selector list, e.g. `full,u1,c:1..12,e8`.
    pub fn parse_list(s: &str) -> Result<Vec<Self>> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match item.split_once(':') {
                Some((fam, ks)) => {
                    let (lo, hi) = parse_range(ks)?;
                    for k in lo..=hi {
                        out.push(Self::with_k(fam, k)?);
                    }
                }
                None => out.push(item.parse()?),
            }
        }
        if out.is_empty() {
            return Err(Error::Parse("empty subgroup selector".into()));
        }
        Ok(out)
    }

    fn with_k(family: &str, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::Parse("k must be positive".into()));
        }
        match family.to_ascii_lowercase().as_str() {
            "c" => Ok(Self::Cyclic(k)),
            "d" => Ok(Self::BinaryDihedral(k)),
            other => Err(Error::Parse(format!("family {other} takes no parameter"))),
        }
    }
}

/// Parses `a..b` (inclusive) or a single integer.
pub fn parse_range(s: &str) -> Result<(u32, u32)> {
    let bad = || Error::Parse(format!("invalid range `{s}`"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

impl fmt::Display for SubgroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.k() {
            Some(k) => write!(f, "{}:{}", self.family(), k),
            None => f.write_str(self.family()),
        }
    }
}

impl FromStr for SubgroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "full" | "su2" => Ok(Self::Full),
            "u1" => Ok(Self::U1),
            "o2" => Ok(Self::O2),
            "e6" => Ok(Self::E6),
            "e7" => Ok(Self::E7),
            "e8" => Ok(Self::E8),
            _ => match s.split_once(':') {
                Some((fam, k)) => {
                    let k = k
                        .parse()
                        .map_err(|_| Error::Parse(format!("invalid parameter in `{s}`")))?;
                    Self::with_k(fam, k)
                }
                None => Err(Error::Parse(format!("unknown subgroup `{s}`"))),
            },
        }
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `[[(1+i)/2, (1+i)/2], [(i-1)/2, (1-i)/2]]`, order 6.
fn tetrahedral_g2() -> Su2Matrix {
    Su2Matrix::raw(c(0.5, 0.5), c(0.5, 0.5), c(-0.5, 0.5), c(0.5, -0.5))
}

/// `[[0, -i], [-i, 0]]`, order 4.
fn anti_diagonal_i() -> Su2Matrix {
    Su2Matrix::raw(ZERO, c(0.0, -1.0), c(0.0, -1.0), ZERO)
}

fn cyclic_generator(k: u32) -> Su2Matrix {
    Su2Matrix::diag(C64::from_polar(1.0, 2.0 * PI / k as f64))
}

/// The two fixed elements used (with the U(1) element) to stand in for SU(2).
fn generic_full_elements() -> [Su2Matrix; 2] {
    [
        Su2Matrix::from_cayley_klein(c(0.3157, -0.5512), c(0.6672, 0.3921)),
        Su2Matrix::from_cayley_klein(c(-0.2438, 0.7016), c(-0.1187, -0.6604)),
    ]
}

/// Generator matrices of each subgroup; generic elements for the infinite ones.
pub fn generators(spec: SubgroupSpec) -> Vec<Su2Matrix> {
    let u1 = Su2Matrix::diag(C64::from_polar(1.0, GENERIC_ANGLE));
    match spec {
        SubgroupSpec::Full => {
            let [g, h] = generic_full_elements();
            vec![g, h, u1]
        }
        SubgroupSpec::U1 => vec![u1],
        SubgroupSpec::O2 => vec![u1, Su2Matrix::raw(ZERO, c(-1.0, 0.0), ONE, ZERO)],
        SubgroupSpec::Cyclic(k) => {
            if k == 1 {
                vec![Su2Matrix::IDENTITY]
            } else {
                vec![cyclic_generator(k)]
            }
        }
        SubgroupSpec::BinaryDihedral(k) => vec![
            cyclic_generator(2 * k),
            Su2Matrix::raw(ZERO, ONE, c(-1.0, 0.0), ZERO),
        ],
        SubgroupSpec::E6 => vec![tetrahedral_g2(), anti_diagonal_i()],
        SubgroupSpec::E7 => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            vec![tetrahedral_g2(), Su2Matrix::raw(ZERO, c(h, h), c(-h, h), ZERO)]
        }
        SubgroupSpec::E8 => {
            let s5 = 5f64.sqrt();
            let (p, q) = ((s5 - 1.0) / 4.0, (s5 + 1.0) / 4.0);
            vec![
                Su2Matrix::raw(c(0.5, 0.0), c(-p, q), c(p, q), c(0.5, 0.0)),
                anti_diagonal_i(),
            ]
        }
    }
}

/// One conjugacy class: representative index into the element list.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConjugacyClass {
    pub representative: usize,
    pub cardinality: usize,
    /// Trace of the class (real for SU(2)).
    pub trace: f64,
}

/// Fully enumerated finite subgroup.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    pub spec: SubgroupSpec,
    pub elements: Vec<Su2Matrix>,
    pub classes: Vec<ConjugacyClass>,
    index: HashMap<[i64; 8], Vec<usize>>,
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Index of the element within [`DEDUP_CONFIRM`] of `u`.
    pub fn index_of(&self, u: &Su2Matrix) -> Option<usize> {
        if let Some(bucket) = self.index.get(&u.dedup_key()) {
            if let Some(&i) = bucket
                .iter()
                .find(|&&i| self.elements[i].distance(u) < DEDUP_CONFIRM)
            {
                return Some(i);
            }
        }
        // Rounding can split a point across neighbouring keys.
        self.elements
            .iter()
            .position(|e| e.distance(u) < DEDUP_CONFIRM)
    }

    fn insert(&mut self, u: Su2Matrix) -> bool {
        if self.index_of(&u).is_some() {
            return false;
        }
        self.index
            .entry(u.dedup_key())
            .or_default()
            .push(self.elements.len());
        self.elements.push(u);
        true
    }

    pub fn class_cardinalities(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.cardinality).collect()
    }

    /// Class index of each element.
    pub fn class_of_elements(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.order()];
        for (ci, class) in self.classes.iter().enumerate() {
            let rep = self.elements[class.representative];
            for h in &self.elements {
                let conj = *h * rep * h.inverse();
                if let Some(i) = self.index_of(&conj) {
                    out[i] = ci;
                }
            }
        }
        out
    }
}

/// Breadth-first closure of the generators under multiplication.
pub fn enumerate(spec: SubgroupSpec) -> Result<FiniteGroup> {
    if !spec.is_finite() {
        return Err(Error::InfiniteSpec(spec.to_string()));
    }
    let gens = generators(spec);
    let mut group = FiniteGroup {
        spec,
        elements: Vec::new(),
        classes: Vec::new(),
        index: HashMap::new(),
    };
    group.insert(Su2Matrix::IDENTITY);
    let mut queue = VecDeque::from([Su2Matrix::IDENTITY]);
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y = x * *g;
            if group.insert(y) {
                if group.order() > MAX_GROUP_ORDER {
                    return Err(Error::ClosureOverflow(MAX_GROUP_ORDER));
                }
                queue.push_back(y);
            }
        }
    }
    Ok(group)
}

/// Fills in conjugacy classes, sorted by `(cardinality, trace)`.
pub fn conjugacy_classes(mut group: FiniteGroup) -> FiniteGroup {
    let n = group.order();
    let mut assigned = vec![false; n];
    let mut classes = Vec::new();
    for g in 0..n {
        if assigned[g] {
            continue;
        }
        let rep = group.elements[g];
        let mut cardinality = 0;
        for h in &group.elements {
            let conj = *h * rep * h.inverse();
            let i = group
                .index_of(&conj)
                .expect("group is closed under conjugation");
            if !assigned[i] {
                assigned[i] = true;
                cardinality += 1;
            }
        }
        classes.push(ConjugacyClass {
            representative: g,
            cardinality,
            trace: rep.trace().re,
        });
    }
    classes.sort_by(|x, y| {
        x.cardinality
            .cmp(&y.cardinality)
            .then(round9(x.trace).total_cmp(&round9(y.trace)))
    });
    group.classes = classes;
    group
}

fn round9(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

/// Roots of `λ² - tr(U) λ + 1`, ordered so that `Im λ₁ >= 0`.
pub fn eigen_pair(u: &Su2Matrix) -> (C64, C64) {
    let t = u.trace();
    let disc = (t * t - C64::new(4.0, 0.0)).sqrt();
    let l1 = (t + disc) / 2.0;
    let l2 = (t - disc) / 2.0;
    if l1.im >= l2.im {
        (l1, l2)
    } else {
        (l2, l1)
    }
}

/// Unitary `V` and eigenvalues with `U = V diag(λ₁, λ₂) V*`.
///
/// Already diagonal input (including `±I`) returns `V = I`.
pub fn diagonalize(u: &Su2Matrix) -> (Su2Matrix, C64, C64) {
    if u.b() == ZERO && u.c() == ZERO {
        return (Su2Matrix::IDENTITY, u.a(), u.d());
    }
    let (l1, l2) = eigen_pair(u);
    if (l1 - l2).norm() < 1e-12 {
        return (Su2Matrix::IDENTITY, l1, l2);
    }
    // (U - λ₂) has column space spanned by the λ₁ eigenvector.
    let col0 = [u.a() - l2, u.c()];
    let col1 = [u.b(), u.d() - l2];
    let pick = if col0[0].norm_sqr() + col0[1].norm_sqr() >= col1[0].norm_sqr() + col1[1].norm_sqr() {
        col0
    } else {
        col1
    };
    let norm = (pick[0].norm_sqr() + pick[1].norm_sqr()).sqrt();
    let (x, y) = (pick[0] / norm, pick[1] / norm);
    // Second column orthogonal to (x, y) with det V = 1.
    (Su2Matrix::raw(x, -y.conj(), y, x.conj()), l1, l2)
}

/// Character of `Sym^n` at `U`: `Σ_{i=0}^{n} λ₁^i λ₂^{n-i}`.
pub fn sym_character(u: &Su2Matrix, n: usize) -> C64 {
    let (l1, l2) = eigen_pair(u);
    let theta = l1.arg();
    let unit = (l1.norm() - 1.0).abs() < 1e-9 && (l1 * l2 - ONE).norm() < 1e-9;
    if unit && theta.sin().abs() > 1e-6 {
        return C64::new(((n as f64 + 1.0) * theta).sin() / theta.sin(), 0.0);
    }
    let mut acc = ZERO;
    let mut p1 = ONE;
    for i in 0..=n {
        acc += p1 * l2.powi((n - i) as i32);
        p1 *= l1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_four_generator() {
        let g = generators(SubgroupSpec::Cyclic(4));
        assert_eq!(g.len(), 1);
        assert!(g[0].distance(&Su2Matrix::raw(c(0.0, 1.0), ZERO, ZERO, c(0.0, -1.0))) < 1e-15);
    }

    #[test]
    fn trivial_cyclic_generator() {
        assert_eq!(generators(SubgroupSpec::Cyclic(1)), vec![Su2Matrix::IDENTITY]);
    }

    #[test]
    fn e6_second_generator() {
        let g = generators(SubgroupSpec::E6);
        assert_eq!(g[1], Su2Matrix::raw(ZERO, c(0.0, -1.0), c(0.0, -1.0), ZERO));
    }

    #[test]
    fn all_generators_are_special_unitary() {
        let specs = [
            SubgroupSpec::Full,
            SubgroupSpec::U1,
            SubgroupSpec::O2,
            SubgroupSpec::Cyclic(7),
            SubgroupSpec::BinaryDihedral(5),
            SubgroupSpec::E6,
            SubgroupSpec::E7,
            SubgroupSpec::E8,
        ];
        for spec in specs {
            for g in generators(spec) {
                let [a, b, cc, d] = g.entries();
                Su2Matrix::new(a, b, cc, d).unwrap();
            }
        }
    }

    #[test]
    fn small_dihedral_by_hand() {
        let g = enumerate(SubgroupSpec::BinaryDihedral(1)).unwrap();
        assert_eq!(g.order(), 4);
        let j = Su2Matrix::raw(ZERO, ONE, c(-1.0, 0.0), ZERO);
        for e in [Su2Matrix::IDENTITY, Su2Matrix::IDENTITY.neg(), j, j.neg()] {
            assert!(g.index_of(&e).is_some());
        }
    }

    #[test]
    fn infinite_specs_do_not_enumerate() {
        for spec in [SubgroupSpec::Full, SubgroupSpec::U1, SubgroupSpec::O2] {
            assert!(matches!(enumerate(spec), Err(Error::InfiniteSpec(_))));
        }
    }

    #[test]
    fn eigen_pairs() {
        let (a, b) = eigen_pair(&Su2Matrix::IDENTITY);
        assert!((a - ONE).norm() < 1e-12 && (b - ONE).norm() < 1e-12);
        let (a, b) = eigen_pair(&Su2Matrix::diag(c(0.0, 1.0)));
        assert!((a - c(0.0, 1.0)).norm() < 1e-12 && (b - c(0.0, -1.0)).norm() < 1e-12);
        let (a, b) = eigen_pair(&anti_diagonal_i());
        assert!((a - c(0.0, 1.0)).norm() < 1e-12 && (b - c(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn diagonalization_reconstructs() {
        for spec in [SubgroupSpec::E6, SubgroupSpec::E7, SubgroupSpec::E8, SubgroupSpec::Full] {
            for g in generators(spec) {
                let (v, l1, l2) = diagonalize(&g);
                let back = v * Su2Matrix::raw(l1, ZERO, ZERO, l2) * v.adjoint();
                assert!(back.distance(&g) < 1e-12, "{spec}");
                assert!(v.unitarity_defect() < 1e-12);
            }
        }
    }

    #[test]
    fn character_special_values() {
        for n in 0..12 {
            let chi = sym_character(&Su2Matrix::IDENTITY, n);
            assert!((chi - C64::new(n as f64 + 1.0, 0.0)).norm() < 1e-12);
            let chi = sym_character(&Su2Matrix::IDENTITY.neg(), n);
            let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
            assert!((chi - C64::new(sign * (n as f64 + 1.0), 0.0)).norm() < 1e-12);
        }
        let g2 = tetrahedral_g2();
        for n in (0..20).step_by(2) {
            let t = n as f64 * PI / 3.0;
            let expected = t.cos() + 3f64.sqrt() / 3.0 * t.sin();
            assert!((sym_character(&g2, n).re - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn selector_grammar() {
        let v = SubgroupSpec::parse_list("full,u1,o2,c:1..3,d:2,e6,e7,e8").unwrap();
        assert_eq!(v.len(), 10);
        assert_eq!(v[3], SubgroupSpec::Cyclic(1));
        assert_eq!(v[6], SubgroupSpec::BinaryDihedral(2));
        assert_eq!("c:12".parse::<SubgroupSpec>().unwrap(), SubgroupSpec::Cyclic(12));
        assert!("c:0".parse::<SubgroupSpec>().is_err());
        assert!("x".parse::<SubgroupSpec>().is_err());
        assert!(SubgroupSpec::parse_list("c:5..2").is_err());
        for s in &v {
            assert_eq!(&s.to_string().parse::<SubgroupSpec>().unwrap(), s);
        }
    }
}
