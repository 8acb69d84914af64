//! Command-line driver: config ingestion, subcommand dispatch and report emission.
//!
//! `widomlab <subcommand> --config <path> [--format text|csv|json] [--svg <path>] [--out <path>]`
//!
//! Exit codes: 0 success, 1 verification failure, 2 config or input error,
//! 3 numerical failure.

pub mod config;
pub mod report;
pub mod svg;

use std::fs;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use rayon::prelude::*;

use crate::chebyshev::{remez_with, sup_bounds, ChebyshevSolution, RemezOptions, WeightSpec};
use crate::error::{Error, Result};
use crate::interval_sets::IntervalSet;
use crate::orthopoly::{stieltjes, JacobiOnEq, OrthoData};
use crate::potential::{equilibrium, EquilibriumData, DEFAULT_QUAD_POINTS};
use crate::preimage::{
    affine_instance, bound_equalities, build_set, exact_invariants, saturation_verify, DEFAULT_ROOT_TOL,
};
use crate::verify;

use config::{Format, JobConfig, ResolvedSet};
use report::{Check, Provenance, Quantity, Report, Row};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const GREEN_SAMPLES: usize = 401;
const POLY_SAMPLES: usize = 801;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Subcommand {
    Capacity,
    Equilibrium,
    Green,
    Chebyshev,
    Orthopoly,
    Preimage,
    /// Checks the configured job; without `--config`, runs the built-in suite.
    Verify,
}

impl Subcommand {
    pub fn name(&self) -> &'static str {
        match self {
            Subcommand::Capacity => "capacity",
            Subcommand::Equilibrium => "equilibrium",
            Subcommand::Green => "green",
            Subcommand::Chebyshev => "chebyshev",
            Subcommand::Orthopoly => "orthopoly",
            Subcommand::Preimage => "preimage",
            Subcommand::Verify => "verify",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "widomlab",
    version,
    about = "Capacities, Chebyshev and orthogonal polynomials, and Widom factors on finite unions of intervals"
)]
pub struct Args {
    #[arg(value_enum)]
    pub subcommand: Subcommand,
    /// TOML job description.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides `output.format`.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Overrides `output.svg`.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Overrides `output.path`; standard output when neither is set.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A finished run: the report and, when requested, its SVG plot.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub svg: Option<String>,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Io(_) | Error::InvalidSet(_) | Error::InvalidArgument(_) | Error::Inadmissible(_) => {
            EXIT_CONFIG
        }
        Error::Convergence { .. } | Error::Quadrature(_) | Error::Numerical(_) => EXIT_NUMERICAL,
    }
}

/// Parses arguments, runs, writes outputs and returns the exit code.
pub fn execute(args: &Args) -> i32 {
    match execute_inner(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("widomlab: {e}");
            exit_code(&e)
        }
    }
}

fn execute_inner(args: &Args) -> Result<i32> {
    let (outcome, output) = match &args.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            let config = JobConfig::parse(&text).map_err(|e| match e {
                Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
                other => other,
            })?;
            let want_svg = args.svg.is_some() || config.output.svg.is_some();
            let outcome = run(&config, &JobConfig::hash(&text), args.subcommand, want_svg)?;
            (outcome, config.output)
        }
        None if args.subcommand == Subcommand::Verify => {
            (Outcome { report: run_suite(), svg: None }, config::OutputConfig::default())
        }
        None => return Err(Error::Config(format!("{} needs --config <path>", args.subcommand.name()))),
    };

    let format = args.format.unwrap_or(output.format);
    let rendered = match format {
        Format::Text => outcome.report.to_text(),
        Format::Csv => outcome.report.to_csv(),
        Format::Json => outcome.report.to_json()?,
    };
    match args.out.clone().or(output.path.clone().map(PathBuf::from)) {
        Some(path) => fs::write(&path, rendered)?,
        None => print!("{rendered}"),
    }
    if let (Some(svg), Some(path)) = (&outcome.svg, args.svg.clone().or(output.svg.map(PathBuf::from))) {
        fs::write(path, svg)?;
    }
    let failed = !outcome.report.passed();
    Ok(if args.subcommand == Subcommand::Verify && failed { EXIT_VERIFY } else { EXIT_OK })
}

struct Job {
    resolved: ResolvedSet,
    weight: WeightSpec,
    eq: EquilibriumData,
}

fn degrees(config: &JobConfig, resolved: &ResolvedSet) -> Result<Vec<usize>> {
    if !config.degrees.is_empty() {
        return Ok(config.degrees.clone());
    }
    match &resolved.spec {
        Some(spec) => Ok(vec![spec.degree()]),
        None => Err(Error::Config("degrees: required for this subcommand".into())),
    }
}

fn bands_of(set: &IntervalSet) -> Vec<[f64; 2]> {
    set.bands().iter().map(|&(a, b)| [a, b]).collect()
}

fn q(name: impl Into<String>, value: f64) -> Quantity {
    Quantity { name: name.into(), value }
}

fn check(name: impl Into<String>, deviation: f64, tolerance: f64) -> Check {
    Check { name: name.into(), deviation, tolerance, passed: deviation <= tolerance }
}

/// Runs one subcommand on a parsed config. `want_svg` also renders the plot.
pub fn run(config: &JobConfig, config_hash: &str, sub: Subcommand, want_svg: bool) -> Result<Outcome> {
    let resolved = config.resolve_set()?;
    let weight = config.resolve_weight(&resolved)?;
    let eq = equilibrium(&resolved.set, DEFAULT_QUAD_POINTS)?;
    let job = Job { resolved, weight, eq };
    let tol = config.tolerances;

    let mut summary = vec![q("capacity", job.eq.capacity()), q("log_capacity", job.eq.log_capacity())];
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let mut curve = Vec::new();
    let mut iterations = Vec::new();
    let mut last_solution = None;

    let mass: f64 = job.eq.band_masses().iter().sum();
    checks.push(check("equilibrium measure has unit mass", (mass - 1.0).abs(), tol.mass));

    match sub {
        Subcommand::Capacity => {}
        Subcommand::Equilibrium => {
            for (k, m) in job.eq.band_masses().iter().enumerate() {
                summary.push(q(format!("band_mass_{k}"), *m));
            }
            for (k, z) in job.eq.gap_zeros().iter().enumerate() {
                summary.push(q(format!("gap_zero_{k}"), *z));
            }
            summary.push(q("pw_sum", job.eq.pw_data().pw_sum));
        }
        Subcommand::Green => {
            let pw = job.eq.pw_data();
            for (k, v) in pw.critical_values.iter().enumerate() {
                summary.push(q(format!("green_at_gap_zero_{k}"), *v));
            }
            summary.push(q("pw_sum", pw.pw_sum));
            curve = green_samples(&job.eq).into_iter().map(|(x, g)| [x, g]).collect();
        }
        Subcommand::Chebyshev | Subcommand::Orthopoly | Subcommand::Preimage | Subcommand::Verify => {
            if sub == Subcommand::Preimage && job.resolved.spec.is_none() {
                return Err(Error::Config("preimage: needs [set.preimage] or [set.affine] with a preimage".into()));
            }
            let ns = degrees(config, &job.resolved)?;
            let sup = sub != Subcommand::Orthopoly;
            let l2 = sub != Subcommand::Chebyshev;
            let (computed, sols) = compute_rows(&job, &ns, sup, l2, &tol)?;
            rows = computed;
            iterations = sols.iter().map(|s| s.iterations).collect();
            last_solution = sols.into_iter().last();
            if matches!(sub, Subcommand::Preimage | Subcommand::Verify) {
                preimage_checks(&job, &tol, &mut summary, &mut checks)?;
            }
            if sub == Subcommand::Verify {
                for r in &rows {
                    checks.push(Check {
                        name: format!("n={} proven bounds hold", r.n),
                        deviation: if r.failed { 1.0 } else { 0.0 },
                        tolerance: 0.0,
                        passed: !r.failed,
                    });
                }
            }
        }
    }

    let svg = want_svg.then(|| {
        let green = green_samples(&job.eq);
        let panel = last_solution.as_ref().map(|s| poly_panel(&job, s));
        svg::render(&job.resolved.set, &green, panel.as_ref())
    });
    let report = Report {
        subcommand: sub.name().to_string(),
        set: bands_of(&job.resolved.set),
        weight: Some(job.weight),
        summary,
        rows,
        checks,
        curve,
        provenance: Provenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config_hash.to_string(),
            tolerances: tol,
            iterations,
            quad_points: Some(job.eq.points_per_band()),
        },
    };
    Ok(Outcome { report, svg })
}

fn compute_rows(
    job: &Job,
    ns: &[usize],
    sup: bool,
    l2: bool,
    tol: &config::Tolerances,
) -> Result<(Vec<Row>, Vec<ChebyshevSolution>)> {
    let (alpha, beta, _) = job.weight.jacobi_form();
    let classical = alpha <= 1 && beta <= 1;
    let cap = job.eq.capacity();
    let lower = classical.then(|| job.weight.saturation_level(cap));
    let upper = if alpha + beta == 1 { sup_bounds(&job.eq, job.weight)?.upper } else { None };

    let opts = RemezOptions { tol: tol.remez, ..RemezOptions::default() };
    let sols: Vec<ChebyshevSolution> = if sup {
        ns.par_iter().map(|&n| remez_with(&job.eq, job.weight, n, &opts)).collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let (ortho, improved): (Option<OrthoData>, bool) = if l2 {
        let measure = JacobiOnEq::from_weight(&job.eq, &job.weight)?;
        let max_n = ns.iter().copied().max().unwrap_or(1);
        (Some(stieltjes(&measure, max_n)?), alpha + beta >= 1 && measure.contains_reference_endpoints())
    } else {
        (None, false)
    };

    let rows = ns
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let mut row = Row {
                n,
                t_n: None,
                widom_inf: None,
                lower: None,
                upper: None,
                norm2: None,
                widom2_sq: None,
                two_s: None,
                eq_sup: None,
                eq_l2: None,
                failed: false,
            };
            if let Some(sol) = sols.get(i) {
                row.t_n = Some(sol.norm);
                row.widom_inf = Some(sol.widom_inf);
                row.lower = lower;
                row.upper = upper;
                row.eq_sup = lower.map(|l| (sol.widom_inf - l).abs() / l <= tol.verify);
            }
            if let Some(o) = &ortho {
                let two_s = 2.0 * o.entropy;
                row.norm2 = Some(o.norms[n]);
                row.widom2_sq = Some(o.widom2_sq[n]);
                row.two_s = Some(two_s);
                row.eq_l2 = Some((o.widom2_sq[n] - two_s).abs() / two_s <= tol.verify);
            }
            row.check(improved);
            row
        })
        .collect();
    Ok((rows, sols))
}

/// Closed-form data and saturation clauses for preimage-defined sets.
fn preimage_checks(
    job: &Job,
    tol: &config::Tolerances,
    summary: &mut Vec<Quantity>,
    checks: &mut Vec<Check>,
) -> Result<()> {
    let Some(spec) = &job.resolved.spec else {
        return Ok(());
    };
    let built = build_set(spec, DEFAULT_ROOT_TOL)?;
    let oracle = exact_invariants(spec)?;
    summary.push(q("degree_s", spec.degree() as f64));
    summary.push(q("degree_q", oracle.degree_q as f64));
    summary.push(q("reference_capacity_exact", oracle.capacity));
    summary.push(q("t_n_exact", oracle.t_exact));
    for (k, c) in built.critical_points.iter().enumerate() {
        summary.push(q(format!("critical_point_{k}"), c.x));
    }
    match job.resolved.target_hull {
        None => {
            let r = saturation_verify(spec, tol.verify)?;
            for c in &r.clauses {
                checks.push(check(format!("({}) {}", c.id, c.name), c.deviation, tol.verify));
            }
        }
        Some(hull) => {
            let inst = affine_instance(spec, hull)?;
            let n = spec.degree();
            let r = bound_equalities(&job.eq, job.weight, n, tol.verify, &spec.describe())?;
            for c in &r.clauses {
                checks.push(check(format!("({}) {}", c.id, c.name), c.deviation, tol.verify));
            }
            let exact = inst.exact_pn.to_poly();
            let numeric = r.ortho.polynomial(n);
            let scale = exact.coeffs().iter().fold(1.0f64, |m, c| m.max(c.abs()));
            let dev = (0..=n)
                .map(|k| (numeric.coeffs().get(k).unwrap_or(&0.0) - exact.coeffs().get(k).unwrap_or(&0.0)).abs())
                .fold(0.0, f64::max)
                / scale;
            checks.push(check("P_n equals the mapped closed form", dev, tol.verify));
        }
    }
    Ok(())
}

fn green_samples(eq: &EquilibriumData) -> Vec<(f64, f64)> {
    let (lo, hi) = eq.set().hull();
    let pad = 0.1 * (hi - lo);
    (0..GREEN_SAMPLES)
        .map(|i| {
            let x = lo - pad + (hi - lo + 2.0 * pad) * i as f64 / (GREEN_SAMPLES - 1) as f64;
            (x, eq.green(x))
        })
        .collect()
}

fn poly_panel(job: &Job, sol: &ChebyshevSolution) -> svg::PolyPanel {
    let (lo, hi) = job.resolved.set.hull();
    let samples = (0..POLY_SAMPLES)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (POLY_SAMPLES - 1) as f64;
            (x, job.weight.eval(x) * sol.eval(x))
        })
        .collect();
    svg::PolyPanel {
        degree: sol.degree,
        samples,
        norm: sol.norm,
        alternation: sol.alternation_points.iter().copied().zip(sol.alternation_values.iter().copied()).collect(),
    }
}

/// The embedded acceptance suite as a report, one check per criterion.
pub fn run_suite() -> Report {
    let outcomes = verify::run_all();
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let checks = outcomes
        .iter()
        .map(|o| Check {
            name: format!("{} {} ({} of {} checks failed)", o.id, o.title, o.failed, o.checks),
            // fraction of failed checks
            deviation: o.failed as f64 / o.checks.max(1) as f64,
            tolerance: 0.0,
            passed: o.passed,
        })
        .collect();
    Report {
        subcommand: "verify".into(),
        set: Vec::new(),
        weight: None,
        summary: vec![q("criteria", outcomes.len() as f64), q("criteria_passed", passed as f64)],
        rows: Vec::new(),
        checks,
        curve: Vec::new(),
        provenance: Provenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: "builtin".into(),
            tolerances: config::Tolerances::default(),
            iterations: Vec::new(),
            quad_points: None,
        },
    }
}
