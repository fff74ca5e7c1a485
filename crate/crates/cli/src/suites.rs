//! Seeded verification suites run by `verify`.
//!
//! Each suite draws from its own ChaCha stream of the run seed, so suites
//! can be run alone or together without changing each other's instances.

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use toda_core::groups::{self, sym_character};
use toda_core::linalg::{cholesky_unimodular, mat_mul, pattern_holds};
use toda_core::symrep::{intertwine_residual, sym_power_matrix};
use toda_core::toda::{plucker_check, random_test_pair, residual_ladder};
use toda_core::wronskian::{
    random_mobius_pair, random_poly, unimodular_lift_wronskian, verify_power_lemma,
    verify_scale_lemma,
};
use toda_core::{
    sampling, CurveTuple, Error, Grid2D, PolyPair, ProjectivePoint, Result, SubgroupSpec,
    Tolerances,
};

pub const ALL_FINITE_SPECS: &str = "c:1..12,d:1..12,e6,e7,e8";

pub const ROUND_TRIP_TOL: f64 = 1e-10;
pub const INTERTWINE_TOL: f64 = 1e-9;
pub const UNITARITY_TOL: f64 = 1e-9;
pub const TRACE_TOL: f64 = 1e-10;
/// Bound on `κ + 1/κ` for the random Möbius pair of the FD suites.
pub const PAIR_CONDITIONING: f64 = 2.2;

const WRONSKIAN_STREAM: u64 = 1;
const CHOLESKY_STREAM: u64 = 2;
const INTERTWINE_STREAM: u64 = 3;
const PAIR_STREAM: u64 = 4;

/// A numeric claim tagged with where it came from.
pub fn oracle<T: Serialize>(value: T) -> Value {
    json!({ "value": value, "source": "oracle" })
}

pub fn formula<T: Serialize>(value: T) -> Value {
    json!({ "value": value, "source": "formula" })
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub details: Value,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct WronskianParams {
    pub trials: usize,
    pub max_deg: usize,
    pub max_n: usize,
    pub lift_trials: usize,
    pub lift_max_n: usize,
}

/// Scale and power lemmas on random polynomials, Wronskian of the lift of
/// random Möbius pairs; all exact.
pub fn wronskian_suite(seed: u64, p: WronskianParams) -> Result<SuiteOutcome> {
    if p.max_n == 0 || p.lift_max_n == 0 || p.max_deg == 0 {
        return Err(Error::InvalidInput("degrees and n bounds must be positive".into()));
    }
    let mut rng = stream(seed, WRONSKIAN_STREAM);
    let (mut scale_failures, mut power_failures) = (0usize, 0usize);
    for _ in 0..p.trials {
        let n = rng.random_range(1..=p.max_n);
        let deg = rng.random_range(0..=p.max_deg);
        let v = random_poly(&mut rng, deg);
        let comps = (0..=n)
            .map(|_| {
                let d = rng.random_range(0..=p.max_deg);
                random_poly(&mut rng, d)
            })
            .collect();
        if !verify_scale_lemma(&v, &CurveTuple::new(comps)?) {
            scale_failures += 1;
        }
        let deg = rng.random_range(1..=p.max_deg);
        if !verify_power_lemma(&random_poly(&mut rng, deg), n) {
            power_failures += 1;
        }
    }
    let mut lift_failures = Vec::new();
    for _ in 0..p.lift_trials {
        let pair = random_mobius_pair(&mut rng);
        let n = rng.random_range(1..=p.lift_max_n);
        let (w, ok) = unimodular_lift_wronskian(&pair, n)?;
        if !ok {
            lift_failures.push(json!({ "pair": pair.to_file(), "n": n, "wronskian": w.to_strings() }));
        }
    }
    let pass = scale_failures == 0 && power_failures == 0 && lift_failures.is_empty();
    Ok(SuiteOutcome {
        name: "wronskian",
        pass,
        details: json!({
            "scale_lemma": { "instances": p.trials, "failures": oracle(scale_failures) },
            "power_lemma": { "instances": p.trials, "failures": oracle(power_failures) },
            "unimodular_lift": {
                "pairs": p.lift_trials,
                "failures": oracle(lift_failures.len()),
                "failed": lift_failures,
            },
        }),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CholeskyParams {
    pub dim: usize,
    pub trials: usize,
    pub ks: Vec<usize>,
    pub pattern_trials: usize,
}

/// Round trip `δ*δ = M` on random unimodular matrices and transfer of the
/// `k ∤ (i - j)` sparsity in both directions.
pub fn cholesky_suite(seed: u64, p: &CholeskyParams, tol: &Tolerances) -> Result<SuiteOutcome> {
    if p.dim == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let mut rng = stream(seed, CHOLESKY_STREAM);
    let mut max_err = 0.0f64;
    let mut factor_failures = 0usize;
    for _ in 0..p.trials {
        let m = sampling::unimodular_pd(&mut rng, p.dim, tol.det);
        match cholesky_unimodular(&m) {
            Ok(delta) => max_err = max_err.max(delta.gram().max_abs_diff(m.matrix())),
            Err(_) => factor_failures += 1,
        }
    }
    let mut sparsity = Vec::new();
    let mut sparsity_ok = true;
    for &k in &p.ks {
        let (mut forward, mut backward) = (0usize, 0usize);
        for _ in 0..p.pattern_trials {
            let m = sampling::unimodular_pd_patterned(&mut rng, p.dim, k, tol.det);
            match cholesky_unimodular(&m) {
                Ok(f) if pattern_holds(f.matrix(), k, tol.sparsity) => {}
                _ => forward += 1,
            }
            let delta = sampling::delta_patterned(&mut rng, p.dim, k);
            let gram = mat_mul(&delta.adjoint(), &delta)?;
            if !pattern_holds(&gram, k, tol.sparsity) {
                backward += 1;
            }
        }
        sparsity_ok &= forward == 0 && backward == 0;
        sparsity.push(json!({
            "k": k,
            "trials": p.pattern_trials,
            "matrix_to_factor_failures": oracle(forward),
            "factor_to_matrix_failures": oracle(backward),
        }));
    }
    let pass = factor_failures == 0 && max_err < ROUND_TRIP_TOL && sparsity_ok;
    Ok(SuiteOutcome {
        name: "cholesky",
        pass,
        details: json!({
            "round_trip": {
                "dim": p.dim,
                "trials": p.trials,
                "max_error": oracle(max_err),
                "bound": ROUND_TRIP_TOL,
                "factor_failures": factor_failures,
            },
            "sparsity": sparsity,
        }),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IntertwineParams {
    pub max_n: usize,
    pub trials: usize,
    pub group_max_n: usize,
    pub groups: Vec<SubgroupSpec>,
}

/// `r_n(Uz) = σ(U) r_n(z)` on random draws, then unitarity of `σ` and
/// `tr σ(g) = χ_n(g)` over every element of the listed groups.
pub fn intertwine_suite(seed: u64, p: &IntertwineParams) -> Result<SuiteOutcome> {
    if p.max_n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    let mut rng = stream(seed, INTERTWINE_STREAM);
    let mut max_res = 0.0f64;
    let mut max_unit = 0.0f64;
    for _ in 0..p.trials {
        let u = sampling::su2(&mut rng);
        let n = rng.random_range(1..=p.max_n);
        let z = loop {
            if let Ok(z) = ProjectivePoint::new(vec![sampling::complex(&mut rng), sampling::complex(&mut rng)]) {
                break z;
            }
        };
        max_res = max_res.max(intertwine_residual(&u, &z, n)?);
        max_unit = max_unit.max(sym_power_matrix(&u, n).mat.unitarity_defect());
    }
    let mut per_group = Vec::new();
    let (mut g_unit, mut g_trace) = (0.0f64, 0.0f64);
    for &spec in &p.groups {
        let group = groups::enumerate(spec)?;
        let (unit, trace) = group
            .elements
            .par_iter()
            .map(|g| {
                (0..=p.group_max_n).fold((0.0f64, 0.0f64), |(u, t), n| {
                    let s = sym_power_matrix(g, n).mat;
                    (
                        u.max(s.unitarity_defect()),
                        t.max((s.trace() - sym_character(g, n)).norm()),
                    )
                })
            })
            .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
        g_unit = g_unit.max(unit);
        g_trace = g_trace.max(trace);
        per_group.push(json!({
            "spec": spec.to_string(),
            "order": oracle(group.order()),
            "max_unitarity_defect": oracle(unit),
            "max_trace_defect": oracle(trace),
        }));
    }
    let pass = max_res < INTERTWINE_TOL
        && max_unit < UNITARITY_TOL
        && g_unit < UNITARITY_TOL
        && g_trace < TRACE_TOL;
    Ok(SuiteOutcome {
        name: "intertwine",
        pass,
        details: json!({
            "random": {
                "trials": p.trials,
                "max_n": p.max_n,
                "max_residual": oracle(max_res),
                "max_unitarity_defect": oracle(max_unit),
                "bound": INTERTWINE_TOL,
            },
            "groups": {
                "max_n": p.group_max_n,
                "max_unitarity_defect": oracle(g_unit),
                "max_trace_defect": oracle(g_trace),
                "unitarity_bound": UNITARITY_TOL,
                "trace_bound": TRACE_TOL,
                "per_group": per_group,
            },
        }),
    })
}

/// Pass thresholds for the finite-difference suites.
#[derive(Args, Clone, Copy, Debug, Serialize)]
pub struct FdTolerances {
    /// Largest admissible Toda residual at the coarsest spacing.
    #[arg(long, default_value_t = 1e-3)]
    pub max_res: f64,
    #[arg(long, default_value_t = 3.5)]
    pub ratio_min: f64,
    #[arg(long, default_value_t = 4.5)]
    pub ratio_max: f64,
    /// Largest admissible Plücker deviation.
    #[arg(long, default_value_t = 1e-2)]
    pub max_plucker: f64,
}

impl Default for FdTolerances {
    fn default() -> Self {
        Self {
            max_res: 1e-3,
            ratio_min: 3.5,
            ratio_max: 4.5,
            max_plucker: 1e-2,
        }
    }
}

/// A labelled developing map for the FD suites.
#[derive(Clone, Debug)]
pub struct LabelledPair {
    pub label: String,
    pub pair: PolyPair,
}

/// `(1, z)` and the seeded random Möbius pair.
pub fn default_pairs(seed: u64) -> Vec<LabelledPair> {
    let mut rng = stream(seed, PAIR_STREAM);
    vec![
        LabelledPair {
            label: "(1,z)".into(),
            pair: PolyPair::standard(),
        },
        LabelledPair {
            label: "random".into(),
            pair: random_test_pair(&mut rng, PAIR_CONDITIONING),
        },
    ]
}

#[derive(Clone, Debug)]
pub struct FdParams {
    pub pairs: Vec<LabelledPair>,
    pub ns: Vec<usize>,
    pub grid: Grid2D,
    pub levels: usize,
    pub tol: FdTolerances,
}

/// Toda residual ladder `h, h/2, ...` for every pair and n.
pub fn toda_suite(p: &FdParams) -> Result<SuiteOutcome> {
    if p.levels == 0 {
        return Err(Error::InvalidInput("ladder needs at least one level".into()));
    }
    let hs: Vec<f64> = (0..p.levels).map(|l| p.grid.h / f64::powi(2.0, l as i32)).collect();
    let mut rows = Vec::new();
    let mut pass = true;
    for lp in &p.pairs {
        for &n in &p.ns {
            let ladder = residual_ladder(&lp.pair, &p.grid, &hs, n)?;
            let ok = ladder[0].max_res < p.tol.max_res
                && ladder.iter().filter_map(|s| s.ratio).all(|r| (p.tol.ratio_min..=p.tol.ratio_max).contains(&r));
            pass &= ok;
            let steps: Vec<Value> = ladder
                .iter()
                .map(|s| json!({ "h": s.h, "max_res": oracle(s.max_res), "ratio": s.ratio.map(oracle) }))
                .collect();
            rows.push(json!({ "pair": lp.label, "coefficients": lp.pair.to_file(), "n": n, "ladder": steps, "pass": ok }));
        }
    }
    Ok(SuiteOutcome {
        name: "toda",
        pass,
        details: json!({ "tolerances": p.tol, "runs": rows }),
    })
}

/// `u₁ = u + ln n` through the log-Laplacian of the lift norm, at the
/// coarsest spacing.
pub fn plucker_suite(p: &FdParams) -> Result<SuiteOutcome> {
    let mut rows = Vec::new();
    let mut pass = true;
    for lp in &p.pairs {
        for &n in &p.ns {
            let (dev, ok) = match plucker_check(&lp.pair, &p.grid, n) {
                Ok(d) => (json!(oracle(d)), d < p.tol.max_plucker),
                Err(e @ Error::NonPositiveLaplacian { .. }) => (json!(e.to_string()), false),
                Err(e) => return Err(e),
            };
            pass &= ok;
            rows.push(json!({ "pair": lp.label, "coefficients": lp.pair.to_file(), "n": n, "h": p.grid.h, "deviation": dev, "pass": ok }));
        }
    }
    Ok(SuiteOutcome {
        name: "plucker",
        pass,
        details: json!({ "bound": p.tol.max_plucker, "runs": rows }),
    })
}
