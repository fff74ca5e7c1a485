//! Finite-difference checks of the local Toda system
//!
//! ```text
//! ∂²u_i/∂z∂z̄ = -Σ_j e^{u_j} (C_n)_{j,i}
//! ```
//!
//! for the tuple `u_i = u + ln(i(n+1-i))` built from a unimodular pair,
//! where `u = -2 ln(|v₀|² + |v₁|²)`.

use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::symrep::rational_normal_lift;
use crate::wronskian::{is_unimodular_pair, random_mobius_pair, PolyPair};

/// Default radius of the disks removed around singular points.
pub const DEFAULT_EXCLUSION_RADIUS: f64 = 0.1;
/// Minimum number of interior nodes along each axis.
pub const MIN_INTERIOR_NODES: usize = 5;

/// Rectangular grid `x_min + i h`, `y_min + j h` with optional holes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Grid2D {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub h: f64,
    pub r_ex: f64,
    pub singular: Vec<[f64; 2]>,
    nx: usize,
    ny: usize,
}

impl Grid2D {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, h: f64) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max, h].iter().all(|v| v.is_finite());
        if !finite || h <= 0.0 || x_max <= x_min || y_max <= y_min {
            return Err(Error::InvalidInput(format!(
                "bad grid [{x_min}, {x_max}] x [{y_min}, {y_max}], h = {h}"
            )));
        }
        let nx = ((x_max - x_min) / h).round() as usize;
        let ny = ((y_max - y_min) / h).round() as usize;
        let interior = nx.min(ny).saturating_sub(1);
        if interior < MIN_INTERIOR_NODES {
            return Err(Error::GridTooCoarse { nodes: interior });
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
            h,
            r_ex: DEFAULT_EXCLUSION_RADIUS,
            singular: Vec::new(),
            nx,
            ny,
        })
    }

    /// `[-1, 1]²` at spacing `h`.
    pub fn unit_box(h: f64) -> Result<Self> {
        Self::new(-1.0, 1.0, -1.0, 1.0, h)
    }

    pub fn with_exclusions(mut self, points: &[C64], r_ex: f64) -> Result<Self> {
        if !(r_ex >= 0.0) {
            return Err(Error::InvalidInput(format!("exclusion radius {r_ex}")));
        }
        self.r_ex = r_ex;
        self.singular = points.iter().map(|z| [z.re, z.im]).collect();
        Ok(self)
    }

    /// Nodes along x and y, boundary included.
    pub fn shape(&self) -> (usize, usize) {
        (self.nx + 1, self.ny + 1)
    }

    pub fn node(&self, i: usize, j: usize) -> C64 {
        C64::new(self.x_min + i as f64 * self.h, self.y_min + j as f64 * self.h)
    }

    fn in_hole(&self, z: C64) -> bool {
        self.singular
            .iter()
            .any(|&[x, y]| (z - C64::new(x, y)).norm() <= self.r_ex)
    }

    /// Interior node whose 5-point stencil avoids every hole.
    pub fn is_active(&self, i: usize, j: usize) -> bool {
        if i == 0 || j == 0 || i >= self.nx || j >= self.ny {
            return false;
        }
        [(i, j), (i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)]
            .iter()
            .all(|&(a, b)| !self.in_hole(self.node(a, b)))
    }
}

/// Values of a scalar field at the grid nodes, `NaN` inside holes.
#[derive(Clone, Debug)]
pub struct MetricField {
    pub grid: Grid2D,
    pub n: usize,
    pub u: Vec<f64>,
}

impl MetricField {
    /// Samples `u = -2 ln(|v₀|² + |v₁|²)`.
    pub fn sample(p: &PolyPair, grid: &Grid2D, n: usize) -> Result<Self> {
        let u = sample_field(grid, |z| metric_density(p, z))?;
        Ok(Self {
            grid: grid.clone(),
            n,
            u,
        })
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.u[j * self.grid.shape().0 + i]
    }

    pub fn components(&self, i: usize, j: usize) -> Vec<f64> {
        solution_components(self.at(i, j), self.n)
    }
}

fn sample_field(grid: &Grid2D, f: impl Fn(C64) -> Result<f64> + Sync) -> Result<Vec<f64>> {
    let (sx, sy) = grid.shape();
    let rows: Vec<Vec<f64>> = (0..sy)
        .into_par_iter()
        .map(|j| {
            (0..sx)
                .map(|i| {
                    let z = grid.node(i, j);
                    if grid.in_hole(z) {
                        Ok(f64::NAN)
                    } else {
                        f(z)
                    }
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(rows.concat())
}

/// `∂²/∂z∂z̄ = (1/4) Δ` by the 5-point stencil.
fn dzdzbar(values: &[f64], sx: usize, i: usize, j: usize, h: f64) -> f64 {
    let at = |a: usize, b: usize| values[b * sx + a];
    let lap = at(i + 1, j) + at(i - 1, j) + at(i, j + 1) + at(i, j - 1) - 4.0 * at(i, j);
    lap / (4.0 * h * h)
}

/// Cartan matrix of type `A_n`: 2 on the diagonal, -1 next to it.
pub fn cartan_matrix(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match i.abs_diff(j) {
                    0 => 2.0,
                    1 => -1.0,
                    _ => 0.0,
                })
                .collect()
        })
        .collect()
}

/// `-2 ln(|v₀(z)|² + |v₁(z)|²)`.
pub fn metric_density(p: &PolyPair, z: C64) -> Result<f64> {
    let (a, b) = p.eval(z);
    let rho = a.norm_sqr() + b.norm_sqr();
    if rho == 0.0 {
        return Err(Error::EvaluationAtCommonZero { re: z.re, im: z.im });
    }
    Ok(-2.0 * rho.ln())
}

/// `u_i = u + ln(i(n+1-i))` for `i = 1..=n`.
pub fn solution_components(u: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| u + ((i * (n + 1 - i)) as f64).ln()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TodaResidual {
    pub max_res: f64,
    pub per_component: Vec<f64>,
}

fn require_unimodular(p: &PolyPair) -> Result<()> {
    if is_unimodular_pair(p) {
        Ok(())
    } else {
        Err(Error::NotUnimodular)
    }
}

fn active_nodes(grid: &Grid2D) -> Vec<(usize, usize)> {
    let (sx, sy) = grid.shape();
    (1..sy - 1)
        .flat_map(|j| (1..sx - 1).map(move |i| (i, j)))
        .filter(|&(i, j)| grid.is_active(i, j))
        .collect()
}

/// Largest `|∂∂̄u_i + Σ_j (C_n)_{j,i} e^{u_j}|` over the active nodes.
pub fn toda_residual(p: &PolyPair, grid: &Grid2D, n: usize) -> Result<TodaResidual> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    require_unimodular(p)?;
    let field = MetricField::sample(p, grid, n)?;
    let (sx, _) = grid.shape();
    let cartan = cartan_matrix(n);
    let offsets: Vec<f64> = solution_components(0.0, n);
    let per_node: Vec<Vec<f64>> = active_nodes(grid)
        .par_iter()
        .map(|&(i, j)| {
            // the offsets are constant, so every ∂∂̄u_i equals ∂∂̄u
            let lap = dzdzbar(&field.u, sx, i, j, grid.h);
            let e: Vec<f64> = offsets.iter().map(|o| (field.at(i, j) + o).exp()).collect();
            (0..n)
                .map(|c| {
                    let rhs: f64 = (0..n).map(|r| e[r] * cartan[r][c]).sum();
                    (lap + rhs).abs()
                })
                .collect()
        })
        .collect();
    let mut per_component = vec![0.0f64; n];
    for row in &per_node {
        for (acc, v) in per_component.iter_mut().zip(row) {
            *acc = acc.max(*v);
        }
    }
    let max_res = per_component.iter().copied().fold(0.0, f64::max);
    Ok(TodaResidual {
        max_res,
        per_component,
    })
}

/// Largest `|ln(∂∂̄ ln N) - (u + ln n)|` with `N = ‖r_n(v₀, v₁)‖²`.
pub fn plucker_check(p: &PolyPair, grid: &Grid2D, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    require_unimodular(p)?;
    let log_norm = sample_field(grid, |z| {
        let (a, b) = p.eval(z);
        let lift = rational_normal_lift(a, b, n)
            .map_err(|_| Error::EvaluationAtCommonZero { re: z.re, im: z.im })?;
        Ok(lift.iter().map(|w| w.norm_sqr()).sum::<f64>().ln())
    })?;
    let (sx, _) = grid.shape();
    let ln_n = (n as f64).ln();
    let devs: Vec<Result<f64>> = active_nodes(grid)
        .par_iter()
        .map(|&(i, j)| {
            let lap = dzdzbar(&log_norm, sx, i, j, grid.h);
            let z = grid.node(i, j);
            if !(lap > 0.0) {
                return Err(Error::NonPositiveLaplacian {
                    x: z.re,
                    y: z.im,
                    value: lap,
                });
            }
            Ok((lap.ln() - (metric_density(p, z)? + ln_n)).abs())
        })
        .collect();
    devs.into_iter()
        .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)))
}

/// One rung of a grid-refinement ladder.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderStep {
    pub h: f64,
    pub max_res: f64,
    /// Residual at the previous (coarser) rung divided by this one.
    pub ratio: Option<f64>,
}

/// [`toda_residual`] on the same box at each spacing in turn.
pub fn residual_ladder(
    p: &PolyPair,
    template: &Grid2D,
    hs: &[f64],
    n: usize,
) -> Result<Vec<LadderStep>> {
    let mut out: Vec<LadderStep> = Vec::with_capacity(hs.len());
    for &h in hs {
        let zs: Vec<C64> = template
            .singular
            .iter()
            .map(|&[x, y]| C64::new(x, y))
            .collect();
        let grid = Grid2D::new(template.x_min, template.x_max, template.y_min, template.y_max, h)?
            .with_exclusions(&zs, template.r_ex)?;
        let max_res = toda_residual(p, &grid, n)?.max_res;
        let ratio = out.last().map(|prev| prev.max_res / max_res);
        out.push(LadderStep { h, max_res, ratio });
    }
    Ok(out)
}

/// `|v₀|² + |v₁|²` at `z`, the quantity preserved by unitary recombination.
pub fn pair_norm(p: &PolyPair, z: C64) -> f64 {
    let (a, b) = p.eval(z);
    a.norm_sqr() + b.norm_sqr()
}

/// `κ + 1/κ` for the coefficient matrix of a unimodular pair, `κ` its
/// condition number: the sum of squares of all coefficients.
pub fn pair_conditioning(p: &PolyPair) -> f64 {
    p.v0.coeffs()
        .iter()
        .chain(p.v1.coeffs())
        .map(|c| c.to_f64().unwrap_or(f64::INFINITY).powi(2))
        .sum()
}

/// Random unimodular Möbius pair with `pair_conditioning(p) <= bound`.
///
/// The metric of a pair with condition number `κ` is the Fubini-Study
/// metric rescaled by up to `κ`, so the finite-difference truncation error
/// at fixed `h` grows like `κ⁴`; an unconditioned draw says nothing about
/// the construction.
pub fn random_test_pair<R: Rng + ?Sized>(rng: &mut R, bound: f64) -> PolyPair {
    assert!(bound > 2.0, "conditioning is at least 2");
    loop {
        let p = random_mobius_pair(rng);
        if pair_conditioning(&p) <= bound {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_values() {
        let p = PolyPair::standard();
        assert_eq!(metric_density(&p, C64::new(0.0, 0.0)).unwrap(), 0.0);
        let u1 = metric_density(&p, C64::new(1.0, 0.0)).unwrap();
        assert!((u1 + 2.0 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn components() {
        let c = solution_components(0.0, 3);
        let expected = [3f64.ln(), 4f64.ln(), 3f64.ln()];
        assert!(c.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-15));
        assert_eq!(solution_components(-0.5, 1), vec![-0.5]);
        for n in 1..9 {
            let c = solution_components(0.3, n);
            assert!((0..n).all(|i| c[i] == c[n - 1 - i]));
        }
    }

    #[test]
    fn mixed_derivative_at_origin() {
        let p = PolyPair::standard();
        let h = 1e-3;
        let grid = Grid2D::new(-3.0 * h, 3.0 * h, -3.0 * h, 3.0 * h, h).unwrap();
        let field = MetricField::sample(&p, &grid, 1).unwrap();
        let lap = dzdzbar(&field.u, grid.shape().0, 3, 3, h);
        assert!((lap + 2.0).abs() < 1e-4);
    }

    #[test]
    fn coarse_grid_rejected() {
        assert_eq!(
            Grid2D::new(0.0, 1.0, 0.0, 1.0, 0.25),
            Err(Error::GridTooCoarse { nodes: 3 })
        );
    }

    #[test]
    fn cartan_shape() {
        let c = cartan_matrix(3);
        assert_eq!(c, vec![vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]]);
    }

    #[test]
    fn standard_pair_residual() {
        let p = PolyPair::standard();
        let grid = Grid2D::unit_box(0.02).unwrap();
        let r = toda_residual(&p, &grid, 2).unwrap();
        assert!(r.max_res < 4e-3);
        assert_eq!(r.per_component.len(), 2);
        assert!(plucker_check(&p, &grid, 2).unwrap() < 1e-2);
    }

    #[test]
    fn exclusions_skip_nodes() {
        let grid = Grid2D::unit_box(0.1)
            .unwrap()
            .with_exclusions(&[C64::new(0.0, 0.0)], 0.15)
            .unwrap();
        let (i0, j0) = (10, 10);
        assert!(!grid.is_active(i0, j0));
        assert!(!grid.is_active(i0 + 2, j0));
        assert!(grid.is_active(i0 + 3, j0));
    }
}
