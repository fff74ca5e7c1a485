//! `toda-forge`: dimension tables, group data and verification suites over
//! `toda-core`, with JSON or CSV reports.
//!
//! Exit codes: 0 pass, 1 usage or configuration error, 2 verification failure.

pub mod args;
pub mod suites;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use toda_core::commutant::{
    commutant_dim_character, commutant_dim_nullspace_with_tol, commutation_residual,
    delta_dim_formula, delta_pattern, dim_table, sample_reduced_delta, COMMUTATION_TOL,
};
use toda_core::groups::{conjugacy_classes, enumerate, parse_range, sym_character};
use toda_core::wronskian::PolyPairFile;
use toda_core::{ComplexMatrix, Error, Grid2D, PolyPair, SubgroupSpec, Tolerances, C64};

use args::{Check, Cli, Command, DimTableArgs, FdArgs, Format, GroupInfoArgs, SampleDeltaArgs, VerifySuite};
use suites::{formula, oracle, FdParams, LabelledPair, SuiteOutcome};

pub const THREADS_ENV: &str = "TODA_FORGE_THREADS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => f.write_str(m),
            Self::Core(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Core(e) => match e {
                Error::InfiniteSpec(_)
                | Error::Parse(_)
                | Error::InvalidInput(_)
                | Error::NotUnimodular
                | Error::GridTooCoarse { .. }
                | Error::UnsupportedCase(_)
                | Error::ZeroVector
                | Error::ClosureOverflow(_)
                | Error::EvaluationAtCommonZero { .. } => 1,
                _ => 2,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Echo of everything that determines a run.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub tolerances: Tolerances,
    pub params: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub results: Value,
    /// Conjunction of every sub-check.
    pub pass: bool,
    /// Seconds; the only field that differs between identical runs.
    pub wall_time: f64,
}

/// A finished run: the report and, when requested, its CSV rendering.
pub struct Outcome {
    pub report: Report,
    pub csv: Option<String>,
}

struct Section {
    results: Value,
    pass: bool,
    table: Option<Table>,
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn render(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Usage(e.to_string()))
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Usage(format!("csv: {e}"))
}

/// `a..b`, `k`, or a comma list of either; order kept, duplicates dropped.
pub fn parse_n_list(s: &str) -> CliResult<Vec<usize>> {
    let mut out: Vec<usize> = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (lo, hi) = parse_range(item)?;
        for v in lo..=hi {
            if !out.contains(&(v as usize)) {
                out.push(v as usize);
            }
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("empty range `{s}`")));
    }
    Ok(out)
}

fn parse_box(s: &str) -> CliResult<[f64; 4]> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("invalid box `{s}`")))?;
    match vals[..] {
        [a, b, c, d] => Ok([a, b, c, d]),
        _ => Err(CliError::Usage(format!("box needs XMIN,XMAX,YMIN,YMAX, got `{s}`"))),
    }
}

fn resolve_output(out: Option<&str>, format: Option<Format>) -> CliResult<(Format, Option<PathBuf>)> {
    let keyword = |f: Format| match format {
        Some(g) if g != f => Err(CliError::Usage("--out and --format disagree".into())),
        _ => Ok((f, None)),
    };
    match out {
        Some("json") => keyword(Format::Json),
        Some("csv") => keyword(Format::Csv),
        Some(path) => {
            let path = PathBuf::from(path);
            let by_ext = match path.extension().and_then(|e| e.to_str()) {
                Some("csv") => Format::Csv,
                _ => Format::Json,
            };
            Ok((format.unwrap_or(by_ext), Some(path)))
        }
        None => Ok((format.unwrap_or(Format::Json), None)),
    }
}

fn spec_k(spec: SubgroupSpec) -> String {
    spec.k().map(|k| k.to_string()).unwrap_or_default()
}

fn cmd_dim_table(args: &DimTableArgs, tol: &Tolerances) -> CliResult<Section> {
    let specs = SubgroupSpec::parse_list(&args.specs)?;
    let ns = parse_n_list(&args.n)?;
    let mut rows = Vec::new();
    let mut csv_rows = Vec::new();
    let mut failures = 0usize;
    let mut skipped = Vec::new();
    let header = match args.check {
        Check::Agreement => {
            for r in dim_table(&specs, &ns, tol.rank)? {
                failures += usize::from(!r.agree);
                rows.push(json!({
                    "spec": r.spec.to_string(),
                    "k": r.spec.k(),
                    "n": r.n,
                    "method": r.method,
                    "commutant_dim": oracle(r.commutant_dim),
                    "dim_oracle": oracle(r.dim_oracle),
                    "dim_formula": { "value": r.dim_formula, "raw": r.formula_raw, "source": "formula" },
                    "integral": r.integral,
                    "agree": r.agree,
                }));
                csv_rows.push(vec![
                    r.spec.to_string(),
                    spec_k(r.spec),
                    r.n.to_string(),
                    r.dim_oracle.to_string(),
                    r.dim_formula.to_string(),
                    r.formula_raw.to_string(),
                    r.agree.to_string(),
                ]);
            }
            vec!["spec", "k", "n", "dim_oracle", "dim_formula", "raw", "agree"]
        }
        Check::Integrality => {
            for &s in &specs {
                for &n in &ns {
                    let f = delta_dim_formula(s, n);
                    failures += usize::from(!f.is_integral());
                    rows.push(json!({
                        "spec": s.to_string(),
                        "k": s.k(),
                        "n": n,
                        "dim_formula": { "value": f.value, "raw": f.raw, "source": "formula" },
                        "gap": formula(f.gap()),
                        "integral": f.is_integral(),
                    }));
                    csv_rows.push(vec![
                        s.to_string(),
                        spec_k(s),
                        n.to_string(),
                        String::new(),
                        f.value.to_string(),
                        f.raw.to_string(),
                        f.is_integral().to_string(),
                    ]);
                }
            }
            vec!["spec", "k", "n", "dim_oracle", "dim_formula", "raw", "agree"]
        }
        Check::Dual => {
            let (finite, infinite): (Vec<SubgroupSpec>, Vec<SubgroupSpec>) = specs.iter().partition(|s| s.is_finite());
            skipped = infinite.iter().map(|s| s.to_string()).collect();
            let cells: Vec<(SubgroupSpec, usize)> = finite
                .iter()
                .flat_map(|&s| ns.iter().map(move |&n| (s, n)))
                .collect();
            let dims: Vec<(usize, usize)> = cells
                .par_iter()
                .map(|&(s, n)| {
                    Ok((commutant_dim_character(s, n)?, commutant_dim_nullspace_with_tol(s, n, tol.rank)))
                })
                .collect::<toda_core::Result<_>>()?;
            for (&(s, n), &(ch, ns_dim)) in cells.iter().zip(&dims) {
                let agree = ch == ns_dim;
                failures += usize::from(!agree);
                rows.push(json!({
                    "spec": s.to_string(),
                    "k": s.k(),
                    "n": n,
                    "character": oracle(ch),
                    "nullspace": oracle(ns_dim),
                    "agree": agree,
                }));
                csv_rows.push(vec![
                    s.to_string(),
                    spec_k(s),
                    n.to_string(),
                    ch.to_string(),
                    ns_dim.to_string(),
                    agree.to_string(),
                ]);
            }
            vec!["spec", "k", "n", "dim_character", "dim_nullspace", "agree"]
        }
    };
    Ok(Section {
        results: json!({
            "check": args.check,
            "cells": rows.len(),
            "failures": failures,
            "skipped": skipped,
            "rows": rows,
        }),
        pass: failures == 0,
        table: Some(Table { header, rows: csv_rows }),
    })
}

fn cmd_group_info(args: &GroupInfoArgs) -> CliResult<Section> {
    let spec: SubgroupSpec = args.spec.parse()?;
    let expected = spec.order().ok_or_else(|| Error::InfiniteSpec(spec.to_string()))?;
    let group = conjugacy_classes(enumerate(spec)?);
    let cards = group.class_cardinalities();
    let mut classes = Vec::new();
    let mut csv_rows = Vec::new();
    for c in &group.classes {
        let chi = args.n.map(|n| sym_character(&group.elements[c.representative], n).re);
        classes.push(json!({
            "cardinality": oracle(c.cardinality),
            "trace": oracle(c.trace),
            "character": chi.map(oracle),
        }));
        csv_rows.push(vec![
            c.cardinality.to_string(),
            c.trace.to_string(),
            chi.map(|x| x.to_string()).unwrap_or_default(),
        ]);
    }
    let pass = group.order() == expected && cards.iter().sum::<usize>() == expected;
    Ok(Section {
        results: json!({
            "spec": spec.to_string(),
            "order": oracle(group.order()),
            "expected_order": formula(expected),
            "class_cardinalities": oracle(&cards),
            "n": args.n,
            "classes": classes,
        }),
        pass,
        table: Some(Table {
            header: vec!["cardinality", "trace", "character"],
            rows: csv_rows,
        }),
    })
}

fn cmd_sample_delta(args: &SampleDeltaArgs, seed: u64) -> CliResult<Section> {
    let spec: SubgroupSpec = args.spec.parse()?;
    let n = args.n;
    let delta = sample_reduced_delta(spec, n, seed)?;
    let m = delta.matrix();
    let upper = m.is_upper_triangular(0.0);
    let positive = (0..=n).all(|i| m[(i, i)].im == 0.0 && m[(i, i)].re > 0.0);
    let det_dev = (m.determinant() - C64::new(1.0, 0.0)).norm();
    let comm = commutation_residual(spec, n, &delta.gram());
    let (pattern, pattern_ok) = match delta_pattern(spec, n) {
        Ok(p) => {
            let ok = p.holds(m, COMMUTATION_TOL);
            (json!({ "pattern": p, "describe": p.describe(), "holds": ok }), ok)
        }
        Err(Error::UnsupportedCase(_)) => (Value::Null, true),
        Err(e) => return Err(e.into()),
    };
    let pass = upper && positive && det_dev < COMMUTATION_TOL && comm < COMMUTATION_TOL && pattern_ok;
    Ok(Section {
        results: json!({
            "spec": spec.to_string(),
            "n": n,
            "delta": m.to_file(),
            "upper_triangular": upper,
            "positive_diagonal": positive,
            "det_deviation": oracle(det_dev),
            "commutation_residual": oracle(comm),
            "distance_to_identity": oracle(m.max_abs_diff(&ComplexMatrix::identity(n + 1))),
            "structure": pattern,
        }),
        pass,
        table: None,
    })
}

fn read_pair(path: &Path) -> CliResult<PolyPair> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let file: PolyPairFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid pair file {}: {e}", path.display())))?;
    Ok(PolyPair::from_file(&file)?)
}

fn fd_params(args: &FdArgs, seed: u64) -> CliResult<FdParams> {
    let pairs = match &args.pair {
        Some(path) => vec![LabelledPair {
            label: path.display().to_string(),
            pair: read_pair(path)?,
        }],
        None => suites::default_pairs(seed),
    };
    let [x0, x1, y0, y1] = parse_box(&args.bounds)?;
    Ok(FdParams {
        pairs,
        ns: parse_n_list(&args.n)?,
        grid: Grid2D::new(x0, x1, y0, y1, args.h)?,
        levels: args.levels,
        tol: args.tol,
    })
}

fn run_suite(suite: &VerifySuite, seed: u64, tol: &Tolerances) -> CliResult<Vec<SuiteOutcome>> {
    let out = match suite {
        VerifySuite::Wronskian(a) => suites::wronskian_suite(
            seed,
            suites::WronskianParams {
                trials: a.trials,
                max_deg: a.deg,
                max_n: a.max_n,
                lift_trials: a.lift_trials,
                lift_max_n: a.lift_max_n,
            },
        )?,
        VerifySuite::Cholesky(a) => suites::cholesky_suite(
            seed,
            &suites::CholeskyParams {
                dim: a.dim,
                trials: a.trials,
                ks: parse_n_list(&a.k)?,
                pattern_trials: a.pattern_trials,
            },
            tol,
        )?,
        VerifySuite::Intertwine(a) => suites::intertwine_suite(
            seed,
            &suites::IntertwineParams {
                max_n: a.n,
                trials: a.trials,
                group_max_n: a.group_n,
                groups: SubgroupSpec::parse_list(&a.groups)?,
            },
        )?,
        VerifySuite::Toda(a) => suites::toda_suite(&fd_params(a, seed)?)?,
        VerifySuite::Plucker(a) => suites::plucker_suite(&fd_params(a, seed)?)?,
        VerifySuite::All => {
            let fd = FdArgs::default();
            let all = [
                VerifySuite::Wronskian(Default::default()),
                VerifySuite::Cholesky(Default::default()),
                VerifySuite::Intertwine(Default::default()),
                VerifySuite::Toda(fd.clone()),
                VerifySuite::Plucker(fd),
            ];
            let mut out = Vec::new();
            for s in &all {
                out.extend(run_suite(s, seed, tol)?);
            }
            return Ok(out);
        }
    };
    Ok(vec![out])
}

fn suite_params(suite: &VerifySuite) -> Value {
    match suite {
        VerifySuite::Wronskian(a) => json!(a),
        VerifySuite::Cholesky(a) => json!(a),
        VerifySuite::Intertwine(a) => json!(a),
        VerifySuite::Toda(a) | VerifySuite::Plucker(a) => json!(a),
        VerifySuite::All => Value::Null,
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let start = Instant::now();
    let tol = Tolerances {
        det: cli.tol_det,
        rank: cli.tol_rank,
        sparsity: cli.tol_sparsity,
        ..Tolerances::default()
    };
    if !(tol.det > 0.0 && tol.rank > 0.0 && tol.sparsity > 0.0) {
        return Err(CliError::Usage("tolerances must be positive".into()));
    }
    let (format, out) = resolve_output(cli.out.as_deref(), cli.format)?;
    let (section, params) = match &cli.command {
        Command::DimTable(a) => (cmd_dim_table(a, &tol)?, json!(a)),
        Command::GroupInfo(a) => (cmd_group_info(a)?, json!(a)),
        Command::SampleDelta(a) => (cmd_sample_delta(a, cli.seed)?, json!(a)),
        Command::Verify { suite } => {
            let outcomes = run_suite(suite, cli.seed, &tol)?;
            let pass = outcomes.iter().all(|o| o.pass);
            (
                Section {
                    results: json!({ "suites": outcomes }),
                    pass,
                    table: None,
                },
                suite_params(suite),
            )
        }
    };
    let csv = match format {
        Format::Json => None,
        Format::Csv => match &section.table {
            Some(t) => Some(t.render()?),
            None => {
                return Err(CliError::Usage(format!(
                    "csv output is not available for {}",
                    cli.command.name()
                )))
            }
        },
    };
    let command = cli.command.name();
    let report = Report {
        command: command.clone(),
        config: RunConfig {
            command,
            seed: cli.seed,
            format,
            out,
            tolerances: tol,
            params,
        },
        results: section.results,
        pass: section.pass,
        wall_time: start.elapsed().as_secs_f64(),
    };
    Ok(Outcome { report, csv })
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn emit(outcome: &Outcome) -> CliResult<()> {
    let text = match &outcome.csv {
        Some(csv) => csv.clone(),
        None => {
            let mut s = serde_json::to_string_pretty(&outcome.report)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    match &outcome.report.config.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses `args`, runs, writes the report, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = configure_threads().and_then(|()| run(&cli)).and_then(|o| {
        emit(&o)?;
        Ok(o.report.pass)
    });
    match result {
        Ok(true) => 0,
        Ok(false) => 2,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_lists() {
        assert_eq!(parse_n_list("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_n_list("1,2,3,5").unwrap(), vec![1, 2, 3, 5]);
        assert_eq!(parse_n_list("4, 2..4").unwrap(), vec![4, 2, 3]);
        assert!(parse_n_list("").is_err());
        assert!(parse_n_list("5..2").is_err());
    }

    #[test]
    fn out_flag_is_format_or_path() {
        assert_eq!(resolve_output(Some("csv"), None).unwrap(), (Format::Csv, None));
        assert_eq!(resolve_output(None, None).unwrap(), (Format::Json, None));
        let (f, p) = resolve_output(Some("table.csv"), None).unwrap();
        assert_eq!((f, p.unwrap()), (Format::Csv, PathBuf::from("table.csv")));
        let (f, _) = resolve_output(Some("table.csv"), Some(Format::Json)).unwrap();
        assert_eq!(f, Format::Json);
        assert!(resolve_output(Some("json"), Some(Format::Csv)).is_err());
    }

    #[test]
    fn boxes() {
        assert_eq!(parse_box("-1,1,-2,2").unwrap(), [-1.0, 1.0, -2.0, 2.0]);
        assert!(parse_box("0,1,2").is_err());
        assert!(parse_box("a,b,c,d").is_err());
    }

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(CliError::Core(Error::InfiniteSpec("u1".into())).exit_code(), 1);
        assert_eq!(CliError::Core(Error::NonIntegral { raw: 0.5 }).exit_code(), 2);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
    }
}
