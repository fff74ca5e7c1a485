//! Exact polynomial calculus over `Q[z]` and the Wronskian identities for
//! curves given by polynomial components.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

/// Polynomial with exact rational coefficients, lowest degree first.
///
/// The highest stored coefficient is nonzero; the zero polynomial has no
/// coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// `z`.
    pub fn identity() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    /// Parses coefficient strings such as `"3"`, `"-3/4"`.
    pub fn parse(coeffs: &[String]) -> Result<Self> {
        coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a * BigRational::from_integer(k.into()))
                .collect(),
        )
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut out = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// Quotient and remainder of long division.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let lead = divisor.leading().ok_or(Error::Singular)?;
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / lead;
            if !c.is_zero() {
                for (j, b) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * b;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Division known to be exact; a nonzero remainder is an error.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(divisor)?;
        if !r.is_zero() {
            return Err(Error::InvalidInput("inexact polynomial division".into()));
        }
        Ok(q)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, c| acc * z + C64::new(to_f64(c), 0.0))
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

fn to_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match t.split_once('/') {
        Some((num, den)) => {
            let num: BigInt = num.trim().parse().map_err(|_| bad())?;
            let den: BigInt = den.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(num, den))
        }
        None => Ok(BigRational::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

impl fmt::Debug for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (k, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "z")?,
                (1, false) => write!(f, "{a} z")?,
                (_, true) => write!(f, "z^{k}")?,
                (_, false) => write!(f, "{a} z^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigRational::zero();
        RationalPoly::new(
            (0..len)
                .map(|k| self.coeffs.get(k).unwrap_or(&zero) + rhs.coeffs.get(k).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        self + &(-rhs)
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        if self.is_zero() || rhs.is_zero() {
            return RationalPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalPoly {
            type Output = RationalPoly;
            fn $m(self, rhs: RationalPoly) -> RationalPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Developing-map data `(v₀, v₁)` on a chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyPair {
    pub v0: RationalPoly,
    pub v1: RationalPoly,
}

/// JSON form of a pair: coefficient strings, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyPairFile {
    pub v0: Vec<String>,
    pub v1: Vec<String>,
}

impl PolyPair {
    pub fn new(v0: RationalPoly, v1: RationalPoly) -> Result<Self> {
        if v0.is_zero() && v1.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(Self { v0, v1 })
    }

    /// `(1, z)`.
    pub fn standard() -> Self {
        Self {
            v0: RationalPoly::one(),
            v1: RationalPoly::identity(),
        }
    }

    /// `(c z + d, a z + b)`; unimodular exactly when `ad - bc = 1`.
    pub fn mobius(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        Self {
            v0: RationalPoly::new(vec![d, c]),
            v1: RationalPoly::new(vec![b, a]),
        }
    }

    /// `v₀ v₁' - v₁ v₀'`.
    pub fn bracket(&self) -> RationalPoly {
        &(&self.v0 * &self.v1.derivative()) - &(&self.v1 * &self.v0.derivative())
    }

    pub fn from_file(file: &PolyPairFile) -> Result<Self> {
        Self::new(RationalPoly::parse(&file.v0)?, RationalPoly::parse(&file.v1)?)
    }

    pub fn to_file(&self) -> PolyPairFile {
        PolyPairFile {
            v0: self.v0.to_strings(),
            v1: self.v1.to_strings(),
        }
    }

    pub fn eval(&self, z: C64) -> (C64, C64) {
        (self.v0.eval(z), self.v1.eval(z))
    }
}

/// Curve `f = (f₀, …, f_n)` with polynomial components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveTuple {
    components: Vec<RationalPoly>,
}

impl CurveTuple {
    pub fn new(components: Vec<RationalPoly>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidInput("curve needs at least one component".into()));
        }
        Ok(Self { components })
    }

    /// `n`, one less than the number of components.
    pub fn n(&self) -> usize {
        self.components.len() - 1
    }

    pub fn components(&self) -> &[RationalPoly] {
        &self.components
    }

    pub fn scaled_by(&self, v: &RationalPoly) -> Self {
        Self {
            components: self.components.iter().map(|f| v * f).collect(),
        }
    }

    /// `(1, v/1!, v²/2!, …, vⁿ/n!)`.
    pub fn exponential(v: &RationalPoly, n: usize) -> Self {
        let mut components = Vec::with_capacity(n + 1);
        let mut term = RationalPoly::one();
        components.push(term.clone());
        for k in 1..=n {
            term = (&term * v).scale(&BigRational::new(1.into(), (k as i64).into()));
            components.push(term.clone());
        }
        Self { components }
    }

    /// `(v₀ⁿ, v₀^{n-1} v₁, …, v₁ⁿ)`, the rational normal lift without
    /// its normalizing radicals.
    pub fn monomial(p: &PolyPair, n: usize) -> Self {
        Self {
            components: (0..=n).map(|i| &p.v0.pow(n - i) * &p.v1.pow(i)).collect(),
        }
    }
}

/// Determinant over `Q[z]` by fraction-free (Bareiss) elimination with
/// row swaps on zero pivots.
pub fn determinant(mut m: Vec<Vec<RationalPoly>>) -> RationalPoly {
    let d = m.len();
    if d == 0 {
        return RationalPoly::one();
    }
    let mut negate = false;
    let mut prev = RationalPoly::one();
    for k in 0..d - 1 {
        if m[k][k].is_zero() {
            match (k + 1..d).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return RationalPoly::zero(),
            }
        }
        for i in k + 1..d {
            for j in k + 1..d {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev).expect("Bareiss quotients are exact");
            }
            m[i][k] = RationalPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[d - 1][d - 1].clone();
    if negate {
        -&det
    } else {
        det
    }
}

/// `Λ_n(f)`: determinant of the matrix whose row `r` holds the `r`-th
/// derivatives of the components.
pub fn wronskian(f: &CurveTuple) -> RationalPoly {
    let d = f.components.len();
    let mut rows = Vec::with_capacity(d);
    let mut current = f.components.clone();
    for _ in 0..d {
        let next = current.iter().map(RationalPoly::derivative).collect();
        rows.push(std::mem::replace(&mut current, next));
    }
    determinant(rows)
}

/// `Λ_n(v·f) = v^{n+1} Λ_n(f)`.
pub fn verify_scale_lemma(v: &RationalPoly, f: &CurveTuple) -> bool {
    wronskian(&f.scaled_by(v)) == &v.pow(f.n() + 1) * &wronskian(f)
}

/// `Λ_n(1, v/1!, …, vⁿ/n!) = (v')^{n(n+1)/2}`.
pub fn verify_power_lemma(v: &RationalPoly, n: usize) -> bool {
    wronskian(&CurveTuple::exponential(v, n)) == v.derivative().pow(n * (n + 1) / 2)
}

pub fn is_unimodular_pair(p: &PolyPair) -> bool {
    p.bracket() == RationalPoly::one()
}

/// `Π_{i=0}^{n} i! (n-i)!`.
pub fn factorial_product(n: usize) -> BigInt {
    let fact = |k: usize| (1..=k).fold(BigInt::one(), |acc, j| acc * BigInt::from(j));
    (0..=n).fold(BigInt::one(), |acc, i| acc * fact(i) * fact(n - i))
}

/// The normalized lift of a unimodular pair has Wronskian 1.
///
/// Scaling component `i` by `1/√(i!(n-i)!)` multiplies the Wronskian by
/// the product of those factors, so the claim is `W² = Π i!(n-i)!` for the
/// unnormalized monomial lift `W`.
pub fn verify_unimodular_lift(p: &PolyPair, n: usize) -> Result<bool> {
    Ok(unimodular_lift_wronskian(p, n)?.1)
}

/// `(W, W² == Π i!(n-i)!)` for the monomial lift of a unimodular pair.
pub fn unimodular_lift_wronskian(p: &PolyPair, n: usize) -> Result<(RationalPoly, bool)> {
    if !is_unimodular_pair(p) {
        return Err(Error::NotUnimodular);
    }
    let w = wronskian(&CurveTuple::monomial(p, n));
    let target = RationalPoly::constant(BigRational::from_integer(factorial_product(n)));
    let ok = &w * &w == target;
    Ok((w, ok))
}

fn random_rational<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    let num: i64 = rng.random_range(-9..=9);
    let den: i64 = rng.random_range(1..=6);
    BigRational::new(num.into(), den.into())
}

/// Random polynomial of exact degree `deg` with small rational coefficients.
pub fn random_poly<R: Rng + ?Sized>(rng: &mut R, deg: usize) -> RationalPoly {
    let mut coeffs: Vec<BigRational> = (0..=deg).map(|_| random_rational(rng)).collect();
    while coeffs[deg].is_zero() {
        coeffs[deg] = random_rational(rng);
    }
    RationalPoly::new(coeffs)
}

/// Random `(cz+d, az+b)` with `ad - bc = 1` and `c ≠ 0`.
pub fn random_mobius_pair<R: Rng + ?Sized>(rng: &mut R) -> PolyPair {
    loop {
        let (b, c) = (random_rational(rng), random_rational(rng));
        let a = random_rational(rng);
        if a.is_zero() || c.is_zero() {
            continue;
        }
        // d = (1 + bc)/a
        let d = (BigRational::one() + &b * &c) / &a;
        return PolyPair::mobius(a, b, c, d);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn p(c: &[i64]) -> RationalPoly {
        RationalPoly::from_i64(c)
    }

    #[test]
    fn arithmetic() {
        assert_eq!(p(&[0, 0, 1]).derivative(), p(&[0, 2]));
        assert_eq!(&p(&[0, 1]) * &p(&[1, 1]), p(&[0, 1, 1]));
        assert!(p(&[7]).derivative().is_zero());
        assert_eq!(&p(&[1, 2]) + &p(&[-1, -2]), RationalPoly::zero());
        assert_eq!(p(&[1, 1]).pow(3), p(&[1, 3, 3, 1]));
        let (quot, rem) = p(&[1, 0, 1]).div_rem(&p(&[1, 1])).unwrap();
        assert_eq!(quot, p(&[-1, 1]));
        assert_eq!(rem, p(&[2]));
    }

    #[test]
    fn parse_and_print() {
        let poly = RationalPoly::parse(&["3/4".into(), "0".into(), "-2".into()]).unwrap();
        assert_eq!(poly.coeffs(), &[q(3, 4), q(0, 1), q(-2, 1)]);
        assert_eq!(poly.to_string(), "-2 z^2 + 3/4");
        assert!(RationalPoly::parse(&["1/0".into()]).is_err());
        assert!(RationalPoly::parse(&["x".into()]).is_err());
    }

    #[test]
    fn small_wronskians() {
        let v = p(&[3, 0, 1, 2]);
        let f = CurveTuple::new(vec![RationalPoly::one(), v.clone()]).unwrap();
        assert_eq!(wronskian(&f), v.derivative());
        let f = CurveTuple::new(vec![p(&[1]), p(&[0, 0, 1]), RationalPoly::new(vec![q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(1, 2)])]).unwrap();
        assert_eq!(wronskian(&f), p(&[0, 0, 0, 8]));
        let f = CurveTuple::new(vec![p(&[1]), p(&[0, 1]), p(&[0, 0, 1])]).unwrap();
        assert_eq!(wronskian(&f), p(&[2]));
    }

    #[test]
    fn pivot_swap() {
        // first column of derivative rows starts with a zero entry
        let f = CurveTuple::new(vec![p(&[0, 1]), p(&[1])]).unwrap();
        assert_eq!(wronskian(&f), p(&[-1]));
    }

    #[test]
    fn lemma_examples() {
        let f = CurveTuple::new(vec![p(&[1]), p(&[0, 1])]).unwrap();
        assert!(verify_scale_lemma(&p(&[0, 1]), &f));
        assert!(verify_power_lemma(&p(&[0, 1]), 3));
        assert!(verify_power_lemma(&p(&[0, 0, 1]), 2));
    }

    #[test]
    fn unimodular_examples() {
        assert!(is_unimodular_pair(&PolyPair::standard()));
        assert!(!is_unimodular_pair(&PolyPair::new(p(&[1]), p(&[0, 0, 1])).unwrap()));
        let (w, ok) = unimodular_lift_wronskian(&PolyPair::standard(), 2).unwrap();
        assert_eq!(w, p(&[2]));
        assert!(ok);
        let pair = PolyPair::mobius(q(2, 1), q(1, 3), q(3, 1), q(1, 1));
        assert!(is_unimodular_pair(&pair));
        assert!(verify_unimodular_lift(&pair, 3).unwrap());
        assert_eq!(factorial_product(3), BigInt::from(144));
        assert_eq!(
            verify_unimodular_lift(&PolyPair::new(p(&[1]), p(&[0, 2])).unwrap(), 2),
            Err(Error::NotUnimodular)
        );
    }

    #[test]
    fn pair_file_round_trip() {
        let pair = PolyPair::mobius(q(2, 1), q(1, 3), q(3, 1), q(1, 1));
        assert_eq!(PolyPair::from_file(&pair.to_file()).unwrap(), pair);
    }
}
