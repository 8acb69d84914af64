//! Built-in verification suite: closed forms, sharp bounds, equality cases
//! and independent oracles, with a fixed catalog of preimage specs and
//! negative controls so it runs without any input files.
//!
//! Each `criterion_*` function returns a [`CriterionOutcome`]; checks are
//! evaluated in parallel and merged in a fixed order, so outcomes are
//! deterministic.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chebyshev::{enclosing_preimage, kind_polynomial, remez_with, sup_bounds, Kind, RemezOptions, WeightSpec};
use crate::error::{Error, Result};
use crate::interval_sets::IntervalSet;
use crate::orthopoly::{gram_oracle, stieltjes, JacobiOnEq};
use crate::poly::{chebyshev_t_values, Poly};
use crate::potential::{equilibrium, EquilibriumData, DEFAULT_QUAD_POINTS};
use crate::preimage::{
    affine_instance, bound_equalities, build_set, exact_invariants, saturation_verify, PreimageSpec, PreimageVariant,
    DEFAULT_ROOT_TOL,
};

const MAX_LISTED_FAILURES: usize = 64;

/// Result of one suite criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub title: String,
    pub passed: bool,
    pub checks: usize,
    pub failed: usize,
    /// Largest observed deviation/tolerance ratio; at most 1 when passing.
    pub worst_ratio: f64,
    pub worst_label: String,
    pub failures: Vec<String>,
}

impl CriterionOutcome {
    /// One-line summary, e.g. `[PASS] 1 closed forms on [-1, 1] (160 checks, worst 0.012)`.
    pub fn line(&self) -> String {
        format!(
            "[{}] {} {} ({} checks, {} failed, worst ratio {:.3e} at {})",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.checks,
            self.failed,
            self.worst_ratio,
            if self.worst_label.is_empty() { "-" } else { &self.worst_label }
        )
    }
}

/// Accumulates pass/fail checks.
#[derive(Debug, Clone, Default)]
pub struct Tally {
    checks: usize,
    failed: usize,
    worst_ratio: f64,
    worst_label: String,
    failures: Vec<String>,
}

impl Tally {
    fn record(&mut self, label: String, ratio: f64, detail: String) {
        self.checks += 1;
        let ratio = if ratio.is_nan() { f64::INFINITY } else { ratio };
        let ok = ratio <= 1.0;
        if ratio > self.worst_ratio || self.worst_label.is_empty() {
            self.worst_ratio = ratio;
            self.worst_label = label.clone();
        }
        if !ok {
            self.failed += 1;
            if self.failures.len() < MAX_LISTED_FAILURES {
                self.failures.push(format!("{label}: {detail}"));
            }
        }
    }

    /// Passes when `value ≤ tol`.
    pub fn le(&mut self, label: impl Into<String>, value: f64, tol: f64) {
        self.record(label.into(), value / tol, format!("{value:.3e} > {tol:.1e}"));
    }

    /// Passes when `value ≥ min`.
    pub fn ge(&mut self, label: impl Into<String>, value: f64, min: f64) {
        let ratio = if value > 0.0 { min / value } else { f64::INFINITY };
        self.record(label.into(), ratio, format!("{value:.3e} < {min:.1e}"));
    }

    pub fn truth(&mut self, label: impl Into<String>, ok: bool) {
        self.record(label.into(), if ok { 0.0 } else { f64::INFINITY }, "false".into());
    }

    pub fn error(&mut self, label: impl Into<String>, err: &Error) {
        self.record(label.into(), f64::INFINITY, err.to_string());
    }

    pub fn merge(&mut self, other: Tally) {
        self.checks += other.checks;
        self.failed += other.failed;
        if other.worst_ratio > self.worst_ratio || (self.worst_label.is_empty() && !other.worst_label.is_empty()) {
            self.worst_ratio = other.worst_ratio;
            self.worst_label = other.worst_label;
        }
        for f in other.failures {
            if self.failures.len() < MAX_LISTED_FAILURES {
                self.failures.push(f);
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0 && self.checks > 0
    }

    pub fn finish(self, id: u32, title: &str) -> CriterionOutcome {
        CriterionOutcome {
            id,
            title: title.to_string(),
            passed: self.passed(),
            checks: self.checks,
            failed: self.failed,
            worst_ratio: self.worst_ratio,
            worst_label: self.worst_label,
            failures: self.failures,
        }
    }
}

fn merged(parts: Vec<Tally>) -> Tally {
    parts.into_iter().fold(Tally::default(), |mut acc, t| {
        acc.merge(t);
        acc
    })
}

/// Admissible preimage specs with rational coefficients.
pub fn catalog() -> Vec<PreimageSpec> {
    let specs: [(PreimageVariant, &[&str]); 8] = [
        (PreimageVariant::OnePlus, &["0", "3"]),
        (PreimageVariant::OnePlus, &["-3/20", "3"]),
        (PreimageVariant::OneMinus, &["0", "3"]),
        (PreimageVariant::OnePlus, &["-1", "-2", "4"]),
        (PreimageVariant::OnePlus, &["1", "-4", "-4", "8"]),
        (PreimageVariant::OneMinus, &["-1", "2", "4"]),
        (PreimageVariant::OneMinusSq, &["0", "2"]),
        (PreimageVariant::OneMinusSq, &["-2", "0", "8"]),
    ];
    specs.iter().map(|(v, c)| PreimageSpec::parse(*v, c).expect("catalog spec parses")).collect()
}

/// Sets that are not preimage sets for the paired weight and degree.
pub fn negative_controls() -> Vec<(IntervalSet, WeightSpec, usize)> {
    let set = |b: &[(f64, f64)]| IntervalSet::new(b).expect("control set");
    vec![
        (set(&[(-1.0, -0.5), (0.5, 1.0)]), WeightSpec::SqrtOnePlus, 1),
        (set(&[(-1.0, -0.2), (0.3, 1.0)]), WeightSpec::SqrtOnePlus, 2),
        (set(&[(-1.0, 0.1), (0.4, 1.0)]), WeightSpec::SqrtOneMinus, 1),
        (set(&[(-1.0, -0.6), (-0.2, 0.3), (0.6, 1.0)]), WeightSpec::SqrtOneMinusSq, 2),
    ]
}

/// Random unions of 1–4 bands in [-1, 1] with band and gap widths at least
/// `min_width`. With `pin_ends` the hull is exactly [-1, 1].
pub fn random_sets(seed: u64, count: usize, pin_ends: bool, min_width: f64) -> Vec<IntervalSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let bands = rng.gen_range(1..=4usize);
        let mut pts: Vec<f64> = if pin_ends {
            let mut v: Vec<f64> = (0..2 * bands - 2).map(|_| rng.gen_range(-1.0..1.0)).collect();
            v.push(-1.0);
            v.push(1.0);
            v
        } else {
            (0..2 * bands).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        pts.sort_by(f64::total_cmp);
        if pts.windows(2).any(|w| w[1] - w[0] < min_width) {
            continue;
        }
        let pairs: Vec<(f64, f64)> = pts.chunks(2).map(|c| (c[0], c[1])).collect();
        out.push(IntervalSet::new(&pairs).expect("random set"));
    }
    out
}

fn eq_of(set: &IntervalSet) -> Result<EquilibriumData> {
    equilibrium(set, DEFAULT_QUAD_POINTS)
}

fn unit() -> IntervalSet {
    IntervalSet::interval(-1.0, 1.0).expect("unit interval")
}

fn max_coeff_diff(a: &Poly, b: &Poly) -> f64 {
    let n = a.coeffs().len().max(b.coeffs().len());
    (0..n).map(|k| (a.coeffs().get(k).unwrap_or(&0.0) - b.coeffs().get(k).unwrap_or(&0.0)).abs()).fold(0.0, f64::max)
}

fn fmt_set(set: &IntervalSet) -> String {
    let bands: Vec<String> = set.bands().iter().map(|(a, b)| format!("[{a:.4},{b:.4}]")).collect();
    bands.join("u")
}

/// Weighted sup-norms on [-1, 1] reproduce the four Chebyshev kinds.
pub fn criterion_1() -> CriterionOutcome {
    let eq = match eq_of(&unit()) {
        Ok(eq) => eq,
        Err(e) => {
            let mut t = Tally::default();
            t.error("equilibrium of [-1,1]", &e);
            return t.finish(1, "closed forms on [-1,1] for the four kinds");
        }
    };
    let jobs: Vec<(Kind, usize)> = Kind::ALL.iter().flat_map(|&k| (1..=20).map(move |n| (k, n))).collect();
    let parts = jobs
        .par_iter()
        .map(|&(kind, n)| {
            let mut t = Tally::default();
            let label = format!("{kind:?} n={n}");
            match remez_with(&eq, kind.weight(), n, &RemezOptions::default()) {
                Ok(sol) => {
                    let exact = kind_polynomial(kind, n);
                    t.le(format!("{label} W_inf"), (sol.widom_inf - exact.widom_inf).abs(), 1e-8);
                    t.le(format!("{label} coefficients"), max_coeff_diff(&sol.monomial(), &exact.monic), 1e-8);
                }
                Err(e) => t.error(label, &e),
            }
            t
        })
        .collect();
    merged(parts).finish(1, "closed forms on [-1,1] for the four kinds")
}

/// `[W_{2,n}]² = 2S(μ)` for the four classical Jacobi cases on [-1, 1].
pub fn criterion_2() -> CriterionOutcome {
    let title = "L2 equalities on [-1,1]";
    let eq = match eq_of(&unit()) {
        Ok(eq) => eq,
        Err(e) => {
            let mut t = Tally::default();
            t.error("equilibrium of [-1,1]", &e);
            return t.finish(2, title);
        }
    };
    let pairs = [(0u32, 0u32), (1, 1), (0, 1), (1, 0)];
    let parts = pairs
        .par_iter()
        .map(|&(alpha, beta)| {
            let mut t = Tally::default();
            let label = format!("alpha={alpha} beta={beta}");
            match JacobiOnEq::new(&eq, alpha, beta).and_then(|m| stieltjes(&m, 12)) {
                Ok(d) => {
                    for n in 1..=12 {
                        let two_s = 2.0 * d.entropy;
                        t.le(format!("{label} n={n}"), (d.widom2_sq[n] - two_s).abs() / two_s, 1e-8);
                    }
                }
                Err(e) => t.error(label, &e),
            }
            t
        })
        .collect();
    merged(parts).finish(2, title)
}

/// Exact identities for the preimage of `(1 + x)(3x)²`.
pub fn criterion_3() -> CriterionOutcome {
    let mut t = Tally::default();
    let result = (|| -> Result<()> {
        let spec = PreimageSpec::parse(PreimageVariant::OnePlus, &["0", "3"])?;
        let built = build_set(&spec, DEFAULT_ROOT_TOL)?;
        let eq = eq_of(&built.set)?;
        let cap = 36f64.powf(-1.0 / 3.0);
        t.le("Cap = 36^(-1/3)", (eq.capacity() - cap).abs() / cap, 1e-8);

        let sol = remez_with(&eq, WeightSpec::SqrtOnePlus, 1, &RemezOptions::default())?;
        t.le("t_1 = 1/3", (sol.norm - 1.0 / 3.0).abs(), 1e-8);
        t.le("T_1,w = x", max_coeff_diff(&sol.monomial(), &Poly::new(vec![0.0, 1.0])), 1e-8);

        let top = remez_with(&eq, WeightSpec::Unit, 3, &RemezOptions::default())?;
        let expected = Poly::new(vec![-1.0 / 18.0, 0.0, 1.0, 1.0]);
        t.le("T_3 = (1+z)z^2 - 1/18", max_coeff_diff(&top.monomial(), &expected), 1e-8);
        let oracle = exact_invariants(&spec)?;
        t.le("exact T_3 oracle", max_coeff_diff(&oracle.chebyshev_top.to_poly(), &expected), 1e-15);

        for (k, &(lo, hi)) in built.branches.iter().enumerate() {
            t.le(format!("branch {k} mass 1/3"), (eq.measure_of(lo, hi) - 1.0 / 3.0).abs(), 1e-8);
        }

        let d = stieltjes(&JacobiOnEq::new(&eq, 0, 1)?, 1)?;
        t.le("[W2,1]^2 = 2*36^(-1/3)", (d.widom2_sq[1] - 2.0 * cap).abs() / (2.0 * cap), 1e-8);
        t.le("N_1 = 1/18", (d.norms[1] - 1.0 / 18.0).abs() * 18.0, 1e-8);
        Ok(())
    })();
    if let Err(e) = result {
        t.error("preimage of (1+x)(3x)^2", &e);
    }
    t.finish(3, "exact identities for the preimage of (1+x)(3x)^2")
}

/// The sup-norm sandwich for `√(1 ± x)`, its strictness, and its collapse on `[-1, b]`.
pub fn criterion_4() -> CriterionOutcome {
    let sets = random_sets(0x5eed_0004, 25, false, 0.04);
    let mut jobs: Vec<(IntervalSet, WeightSpec, bool)> = Vec::new();
    for set in &sets {
        for w in [WeightSpec::SqrtOnePlus, WeightSpec::SqrtOneMinus] {
            jobs.push((set.clone(), w, false));
        }
    }
    for b in [0.1, 0.6, 1.0] {
        let s = IntervalSet::interval(-1.0, b).expect("interval");
        jobs.push((s.clone(), WeightSpec::SqrtOnePlus, true));
        jobs.push((s.reflect(), WeightSpec::SqrtOneMinus, true));
    }
    let parts = jobs
        .par_iter()
        .map(|(set, weight, equality)| {
            let mut t = Tally::default();
            let label = format!("{} {weight:?}", fmt_set(set));
            let eq = match eq_of(set) {
                Ok(eq) => eq,
                Err(e) => {
                    t.error(label, &e);
                    return t;
                }
            };
            let bounds = match sup_bounds(&eq, *weight) {
                Ok(b) => b,
                Err(e) => {
                    t.error(label, &e);
                    return t;
                }
            };
            let upper = bounds.upper.expect("sqrt weights have an upper bound");
            let far_end = if *weight == WeightSpec::SqrtOnePlus { -1.0 } else { 1.0 };
            let touches = set.contains(far_end);
            for n in 1..=8 {
                match remez_with(&eq, *weight, n, &RemezOptions::default()) {
                    Ok(sol) => {
                        let w = sol.widom_inf;
                        t.le(format!("{label} n={n} lower"), (bounds.lower - w).max(0.0), 1e-8);
                        t.le(format!("{label} n={n} upper"), (w - upper).max(0.0), 1e-8);
                        if *equality {
                            t.le(format!("{label} n={n} lower equality"), (w - bounds.lower).abs(), 1e-8);
                            t.le(format!("{label} n={n} upper equality"), (upper - w).abs(), 1e-8);
                        } else if set.num_bands() > 1 || !touches {
                            t.ge(format!("{label} n={n} strict upper"), upper - w, 1e-6);
                        }
                    }
                    Err(e) => t.error(format!("{label} n={n}"), &e),
                }
            }
            t
        })
        .collect();
    merged(parts).finish(4, "sup-norm bounds for sqrt(1+-x): sandwich, strictness, equality on [-1,b]")
}

/// `[W_{2,n}]² ≥ 2S(μ)` when ±1 ∈ K and `α + β ≥ 1`; `≥ S(μ)` always.
pub fn criterion_5() -> CriterionOutcome {
    let pinned = random_sets(0x5eed_0005, 15, true, 0.04);
    let free = random_sets(0x5eed_0105, 10, false, 0.04);
    let mut jobs: Vec<(IntervalSet, u32, u32, bool)> = Vec::new();
    for set in &pinned {
        for alpha in 0..=3 {
            for beta in 0..=3 {
                if alpha + beta >= 1 {
                    jobs.push((set.clone(), alpha, beta, true));
                }
            }
        }
    }
    for set in &free {
        for (alpha, beta) in [(0, 0), (0, 1), (1, 0), (1, 1), (2, 3), (3, 1)] {
            jobs.push((set.clone(), alpha, beta, false));
        }
    }
    let parts = jobs
        .par_iter()
        .map(|(set, alpha, beta, improved)| {
            let mut t = Tally::default();
            let label = format!("{} alpha={alpha} beta={beta}", fmt_set(set));
            let mut run = || -> Result<()> {
                let eq = eq_of(set)?;
                let d = stieltjes(&JacobiOnEq::new(&eq, *alpha, *beta)?, 10)?;
                for n in 1..=10 {
                    let w2 = d.widom2_sq[n];
                    t.le(format!("{label} n={n} universal"), (d.entropy - w2).max(0.0), 1e-9);
                    if *improved {
                        t.le(format!("{label} n={n} improved"), (2.0 * d.entropy - w2).max(0.0), 1e-9);
                    }
                }
                Ok(())
            };
            if let Err(e) = run() {
                t.error(label, &e);
            }
            t
        })
        .collect();
    merged(parts).finish(5, "L2 lower bounds [W2,n]^2 >= 2S (with +-1 in K) and >= S")
}

/// Every catalog spec saturates both bounds; every control misses both.
pub fn criterion_6() -> CriterionOutcome {
    let specs = catalog();
    let mut parts: Vec<Tally> = specs
        .par_iter()
        .map(|spec| {
            let mut t = Tally::default();
            let label = spec.describe();
            match saturation_verify(spec, 1e-7) {
                Ok(r) => {
                    for c in &r.clauses {
                        t.le(format!("{label} ({}) {}", c.id, c.name), c.deviation, 1e-7);
                    }
                }
                Err(e) => t.error(label, &e),
            }
            t
        })
        .collect();
    let controls = negative_controls();
    parts.extend(
        controls
            .par_iter()
            .map(|(set, weight, n)| {
                let mut t = Tally::default();
                let label = format!("control {} {weight:?} n={n}", fmt_set(set));
                match eq_of(set).and_then(|eq| bound_equalities(&eq, *weight, *n, 1e-7, &label)) {
                    Ok(r) => {
                        for c in &r.clauses {
                            t.ge(format!("{label} ({}) fails", c.id), c.deviation, 1e-6);
                        }
                    }
                    Err(e) => t.error(label, &e),
                }
                t
            })
            .collect::<Vec<_>>(),
    );
    merged(parts).finish(6, "saturation on catalog preimage sets, failure on controls")
}

/// `K ⊆ K_n` and `Cap(K_n)^{2n+1} = t_n²/4` for the `√(1+x)` problem.
pub fn criterion_7() -> CriterionOutcome {
    let sets = random_sets(0x5eed_0007, 10, false, 0.05);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0107);
    let jobs: Vec<(IntervalSet, usize)> = sets.into_iter().map(|s| (s, rng.gen_range(1..=6usize))).collect();
    let parts = jobs
        .par_iter()
        .map(|(set, n)| {
            let mut t = Tally::default();
            let label = format!("{} n={n}", fmt_set(set));
            let mut run = || -> Result<()> {
                let eq = eq_of(set)?;
                let sol = remez_with(&eq, WeightSpec::SqrtOnePlus, *n, &RemezOptions::default())?;
                let kn = enclosing_preimage(set, WeightSpec::SqrtOnePlus, &sol)?;
                t.truth(format!("{label} K in K_n"), set.is_subset_of(&kn, 1e-9));
                let eq_n = eq_of(&kn)?;
                let lhs = eq_n.log_capacity() * (2 * n + 1) as f64;
                let rhs = (sol.norm * sol.norm / 4.0).ln();
                t.le(format!("{label} Cap(K_n)^(2n+1) = t_n^2/4"), (lhs - rhs).abs(), 1e-8);
                Ok(())
            };
            if let Err(e) = run() {
                t.error(label, &e);
            }
            t
        })
        .collect();
    merged(parts).finish(7, "enclosing preimage K_n and its capacity identity")
}

/// Discrete minimax over a uniform grid of `points` per band, solved as a
/// linear program by cutting planes (the final value is the full-grid optimum).
pub fn brute_force_minimax(set: &IntervalSet, weight: WeightSpec, n: usize, points: usize) -> Result<f64> {
    let hull = set.hull();
    let grid: Vec<f64> = set
        .bands()
        .iter()
        .flat_map(|&(a, b)| (0..points).map(move |i| a + (b - a) * i as f64 / (points - 1) as f64))
        .collect();
    let lead = crate::poly::ChebSeries::monic_lead(n, hull);
    let mut tv = Vec::new();
    let rows: Vec<(f64, Vec<f64>)> = grid
        .iter()
        .map(|&x| {
            let t = (2.0 * x - hull.0 - hull.1) / (hull.1 - hull.0);
            chebyshev_t_values(n, t, &mut tv);
            (weight.eval(x), tv.clone())
        })
        .collect();
    let value = |c: &[f64], i: usize| {
        let (w, tv) = &rows[i];
        w * (lead * tv[n] + c.iter().zip(tv).map(|(c, t)| c * t).sum::<f64>())
    };

    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let coeffs: Vec<_> = (0..n).map(|_| problem.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    let level = problem.add_var(1.0, (0.0, f64::INFINITY));
    let add = |problem: &mut Problem, i: usize| {
        let (w, tv) = &rows[i];
        let mut upper: Vec<_> = coeffs.iter().zip(tv).map(|(&v, t)| (v, w * t)).collect();
        let mut lower: Vec<_> = coeffs.iter().zip(tv).map(|(&v, t)| (v, -w * t)).collect();
        upper.push((level, -1.0));
        lower.push((level, -1.0));
        problem.add_constraint(upper.as_slice(), ComparisonOp::Le, -w * lead * tv[n]);
        problem.add_constraint(lower.as_slice(), ComparisonOp::Le, w * lead * tv[n]);
    };
    let stride = (grid.len() / (40 * (n + 1))).max(1);
    let mut active = vec![false; grid.len()];
    for i in (0..grid.len()).step_by(stride) {
        add(&mut problem, i);
        active[i] = true;
    }
    for _ in 0..200 {
        let sol = problem.solve().map_err(|e| Error::Numerical(format!("brute-force LP failed: {e}")))?;
        let c: Vec<f64> = coeffs.iter().map(|&v| sol[v]).collect();
        let e = sol[level];
        let mut worst: Vec<(f64, usize)> = (0..grid.len())
            .filter(|&i| !active[i])
            .map(|i| (value(&c, i).abs(), i))
            .filter(|&(v, _)| v > e * (1.0 + 1e-12))
            .collect();
        if worst.is_empty() {
            return Ok(e);
        }
        worst.sort_by(|a, b| b.0.total_cmp(&a.0));
        for &(_, i) in worst.iter().take(4 * (n + 1)) {
            add(&mut problem, i);
            active[i] = true;
        }
    }
    Err(Error::Convergence { what: "brute-force cutting planes".into(), residual: f64::NAN })
}

/// Independent oracles: Hankel norms, brute-force minimax, closed-form capacities.
pub fn criterion_8() -> CriterionOutcome {
    let mut parts = Vec::new();

    let gram_sets = random_sets(0x5eed_0008, 4, false, 0.05)
        .into_iter()
        .chain([unit(), IntervalSet::new(&[(-1.0, -0.5), (0.5, 1.0)]).expect("set")])
        .collect::<Vec<_>>();
    let gram_jobs: Vec<(IntervalSet, u32, u32)> =
        gram_sets.iter().flat_map(|s| [(0, 0), (0, 1), (1, 1), (2, 1)].map(|(a, b)| (s.clone(), a, b))).collect();
    parts.extend(
        gram_jobs
            .par_iter()
            .map(|(set, alpha, beta)| {
                let mut t = Tally::default();
                let label = format!("{} alpha={alpha} beta={beta}", fmt_set(set));
                let mut run = || -> Result<()> {
                    let m = JacobiOnEq::new(&eq_of(set)?, *alpha, *beta)?;
                    let d = stieltjes(&m, 8)?;
                    let g = gram_oracle(&m, 8)?;
                    for (k, (s, h)) in d.norms.iter().zip(&g).enumerate() {
                        t.le(format!("{label} N_{k} Stieltjes vs Hankel"), (s - h).abs() / h, 1e-8);
                    }
                    Ok(())
                };
                if let Err(e) = run() {
                    t.error(label, &e);
                }
                t
            })
            .collect::<Vec<_>>(),
    );

    let brute_sets = [
        unit(),
        IntervalSet::new(&[(-1.0, -0.5), (0.5, 1.0)]).expect("set"),
        IntervalSet::new(&[(-0.9, -0.3), (0.0, 0.4), (0.7, 1.0)]).expect("set"),
    ];
    let brute_jobs: Vec<(IntervalSet, WeightSpec, usize)> = brute_sets
        .iter()
        .flat_map(|s| {
            [WeightSpec::Unit, WeightSpec::SqrtOnePlus, WeightSpec::SqrtOneMinusSq]
                .into_iter()
                .flat_map(move |w| (1..=4).map(move |n| (s.clone(), w, n)))
        })
        .collect();
    parts.extend(
        brute_jobs
            .par_iter()
            .map(|(set, weight, n)| {
                let mut t = Tally::default();
                let label = format!("{} {weight:?} n={n}", fmt_set(set));
                let mut run = || -> Result<()> {
                    let sol = remez_with(&eq_of(set)?, *weight, *n, &RemezOptions::default())?;
                    let brute = brute_force_minimax(set, *weight, *n, 20001)?;
                    t.le(format!("{label} Remez vs brute force"), (sol.norm - brute).abs() / sol.norm, 1e-6);
                    Ok(())
                };
                if let Err(e) = run() {
                    t.error(label, &e);
                }
                t
            })
            .collect::<Vec<_>>(),
    );

    let mut t = Tally::default();
    let mut closed: Vec<(String, IntervalSet, f64)> = vec![
        ("[-1,1]".into(), unit(), 0.5),
        ("[-0.3,0.7]".into(), IntervalSet::interval(-0.3, 0.7).expect("set"), 0.25),
        ("[2,5]".into(), IntervalSet::interval(2.0, 5.0).expect("set"), 0.75),
        ("[-1,-0.5]u[0.5,1]".into(), IntervalSet::new(&[(-1.0, -0.5), (0.5, 1.0)]).expect("set"), 0.75f64.sqrt() / 2.0),
        ("[-1,-0.2]u[0.2,1]".into(), IntervalSet::new(&[(-1.0, -0.2), (0.2, 1.0)]).expect("set"), 0.96f64.sqrt() / 2.0),
    ];
    for spec in catalog() {
        match (build_set(&spec, DEFAULT_ROOT_TOL), exact_invariants(&spec)) {
            (Ok(b), Ok(o)) => closed.push((spec.describe(), b.set, o.capacity)),
            (Err(e), _) | (_, Err(e)) => t.error(spec.describe(), &e),
        }
    }
    for (label, set, cap) in closed {
        match eq_of(&set) {
            Ok(eq) => t.le(format!("Cap {label}"), (eq.capacity() - cap).abs() / cap, 1e-9),
            Err(e) => t.error(label, &e),
        }
    }
    parts.push(t);
    merged(parts).finish(8, "oracle agreement: Hankel norms, brute-force minimax, closed-form capacities")
}

struct ProblemValues {
    widom_inf: f64,
    widom2_sq: f64,
    entropy: f64,
    eq_sup: bool,
    eq_l2: bool,
    pn: Poly,
}

fn problem_values(set: &IntervalSet, weight: WeightSpec, n: usize) -> Result<ProblemValues> {
    let eq = eq_of(set)?;
    let r = bound_equalities(&eq, weight, n, 1e-7, "")?;
    Ok(ProblemValues {
        widom_inf: r.chebyshev.widom_inf,
        widom2_sq: r.ortho.widom2_sq[n],
        entropy: r.ortho.entropy,
        eq_sup: r.clauses[0].passed,
        eq_l2: r.clauses[1].passed,
        pn: r.ortho.polynomial(n),
    })
}

/// Widom factors, entropy and equality flags are unchanged by affine maps;
/// the orthogonal polynomial on the image is the mapped closed form.
pub fn criterion_9() -> CriterionOutcome {
    let specs: Vec<PreimageSpec> = catalog().into_iter().take(3).chain(catalog().into_iter().skip(7)).collect();
    let targets = [(0.0, 4.0), (3.0, 7.0)];
    let mut jobs: Vec<(String, IntervalSet, WeightSpec, usize, Option<PreimageSpec>)> = Vec::new();
    for spec in &specs {
        match build_set(spec, DEFAULT_ROOT_TOL) {
            Ok(b) => jobs.push((spec.describe(), b.set, spec.weight(), spec.degree(), Some(spec.clone()))),
            Err(_) => jobs.push((spec.describe(), unit(), spec.weight(), 0, Some(spec.clone()))),
        }
    }
    let control = IntervalSet::new(&[(-1.0, -0.5), (0.5, 1.0)]).expect("set");
    for n in 1..=3 {
        jobs.push(("control [-1,-0.5]u[0.5,1]".into(), control.clone(), WeightSpec::SqrtOnePlus, n, None));
    }
    let parts = jobs
        .par_iter()
        .map(|(name, set, weight, n, spec)| {
            let mut t = Tally::default();
            let label = format!("{name} n={n}");
            let mut run = || -> Result<()> {
                if *n == 0 {
                    return Err(Error::Inadmissible(format!("{name} did not build")));
                }
                let base = problem_values(set, *weight, *n)?;
                let (alpha, beta, _) = weight.jacobi_form();
                for &(a, b) in &targets {
                    let tl = format!("{label} -> [{a},{b}]");
                    let mapped_set = crate::interval_sets::affine_map(set, (-1.0, 1.0), (a, b))?;
                    let mapped_weight = WeightSpec::JacobiRoot { alpha, beta, reference_hull: (a, b) };
                    let m = problem_values(&mapped_set, mapped_weight, *n)?;
                    t.le(format!("{tl} W_inf"), (m.widom_inf - base.widom_inf).abs() / base.widom_inf, 1e-9);
                    t.le(format!("{tl} W2^2"), (m.widom2_sq - base.widom2_sq).abs() / base.widom2_sq, 1e-9);
                    t.le(format!("{tl} S"), (m.entropy - base.entropy).abs() / base.entropy, 1e-9);
                    t.truth(format!("{tl} equality flags"), m.eq_sup == base.eq_sup && m.eq_l2 == base.eq_l2);
                    if let Some(spec) = spec {
                        t.truth(format!("{tl} reference saturates"), base.eq_sup && base.eq_l2);
                        let inst = affine_instance(spec, (a, b))?;
                        let exact = inst.exact_pn.to_poly();
                        let dev =
                            max_coeff_diff(&m.pn, &exact) / exact.coeffs().iter().fold(1.0f64, |s, c| s.max(c.abs()));
                        t.le(format!("{tl} P_n matches mapped closed form"), dev, 1e-9);
                    } else {
                        t.truth(format!("{tl} control stays strict"), !m.eq_sup && !m.eq_l2);
                    }
                }
                Ok(())
            };
            if let Err(e) = run() {
                t.error(label, &e);
            }
            t
        })
        .collect();
    merged(parts).finish(9, "affine invariance of Widom factors, entropy and equality cases")
}

/// Runs every criterion in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    let fns: [fn() -> CriterionOutcome; 9] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
    ];
    fns.iter().map(|f| f()).collect()
}
