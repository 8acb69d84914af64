//! Weighted Chebyshev (minimax) polynomials on a finite union of intervals.
//!
//! [`remez`] finds the monic degree-`n` polynomial `p` minimizing
//! `max_K |w·p|` by the exchange algorithm: solve the levelled alternation
//! equations on a reference of `n + 1` points, locate the local extrema of
//! `w·p` on the set (dense scan per band, then golden-section refinement), and
//! exchange the reference for the strongest alternating extrema. All linear
//! algebra uses the Chebyshev basis of the hull.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_sets::IntervalSet;
use crate::numeric::{bisect, golden_max};
use crate::poly::{chebyshev_t_values, ChebSeries, Poly};
use crate::potential::{equilibrium, EquilibriumData, DEFAULT_QUAD_POINTS};

const DOMAIN_SLACK: f64 = 1e-12;

/// The weight `w` in `‖w·p‖_K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSpec {
    Unit,
    SqrtOnePlus,
    SqrtOneMinus,
    SqrtOneMinusSq,
    /// `sqrt((1 - T)^α (1 + T)^β)` with `T` the increasing affine map of
    /// `reference_hull` onto [-1, 1].
    JacobiRoot {
        alpha: u32,
        beta: u32,
        reference_hull: (f64, f64),
    },
}

impl WeightSpec {
    /// Exponents `(α, β)` of `w² = (1 - T)^α (1 + T)^β` and the reference hull of `T`.
    pub fn jacobi_form(&self) -> (u32, u32, (f64, f64)) {
        match *self {
            WeightSpec::Unit => (0, 0, (-1.0, 1.0)),
            WeightSpec::SqrtOnePlus => (0, 1, (-1.0, 1.0)),
            WeightSpec::SqrtOneMinus => (1, 0, (-1.0, 1.0)),
            WeightSpec::SqrtOneMinusSq => (1, 1, (-1.0, 1.0)),
            WeightSpec::JacobiRoot { alpha, beta, reference_hull } => (alpha, beta, reference_hull),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            WeightSpec::Unit => 1.0,
            WeightSpec::SqrtOnePlus => (1.0 + x).max(0.0).sqrt(),
            WeightSpec::SqrtOneMinus => (1.0 - x).max(0.0).sqrt(),
            WeightSpec::SqrtOneMinusSq => ((1.0 - x).max(0.0) * (1.0 + x).max(0.0)).sqrt(),
            WeightSpec::JacobiRoot { alpha, beta, reference_hull: (a, b) } => {
                let t = (2.0 * x - a - b) / (b - a);
                ((1.0 - t).max(0.0).powi(alpha as i32) * (1.0 + t).max(0.0).powi(beta as i32)).sqrt()
            }
        }
    }

    /// Checks that `set` lies in the natural domain of the weight.
    pub fn validate(&self, set: &IntervalSet) -> Result<()> {
        let (alpha, beta, (a, b)) = self.jacobi_form();
        if let WeightSpec::JacobiRoot { .. } = self {
            if alpha + beta == 0 {
                return Err(Error::InvalidArgument("jacobi_root weight needs alpha + beta >= 1".into()));
            }
            if !(a < b) {
                return Err(Error::InvalidArgument(format!("degenerate reference hull [{a}, {b}]")));
            }
        }
        if alpha + beta == 0 {
            return Ok(());
        }
        let (lo, hi) = set.hull();
        let slack = DOMAIN_SLACK * (b - a).max(1.0);
        if lo < a - slack || hi > b + slack {
            return Err(Error::InvalidArgument(format!(
                "set hull [{lo}, {hi}] is not inside the weight domain [{a}, {b}]"
            )));
        }
        Ok(())
    }

    /// The weight `x ↦ w(-x)`.
    pub fn reflect(&self) -> Self {
        match *self {
            WeightSpec::SqrtOnePlus => WeightSpec::SqrtOneMinus,
            WeightSpec::SqrtOneMinus => WeightSpec::SqrtOnePlus,
            WeightSpec::JacobiRoot { alpha, beta, reference_hull: (a, b) } => {
                WeightSpec::JacobiRoot { alpha: beta, beta: alpha, reference_hull: (-b, -a) }
            }
            other => other,
        }
    }

    /// `W∞` value at which the set is extremal for this weight:
    /// `2·Cap_ref^{(α+β)/2}`, with `Cap_ref` the capacity measured in the
    /// coordinates of the reference hull. This is `2` for the unit weight,
    /// `2√Cap` for `√(1±x)` and `2·Cap` for `√(1-x²)`.
    pub fn saturation_level(&self, capacity: f64) -> f64 {
        let (alpha, beta, (a, b)) = self.jacobi_form();
        let cap_ref = capacity * 2.0 / (b - a);
        2.0 * cap_ref.powf(0.5 * (alpha + beta) as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RemezOptions {
    /// Relative gap between the observed sup and the levelled error at which
    /// the exchange stops.
    pub tol: f64,
    pub grid_per_band: usize,
    pub max_iter: usize,
    pub validation_factor: usize,
    pub validation_slack: f64,
}

impl Default for RemezOptions {
    fn default() -> Self {
        Self { tol: 1e-12, grid_per_band: 4096, max_iter: 100, validation_factor: 8, validation_slack: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevSolution {
    pub degree: usize,
    pub weight: WeightSpec,
    /// Monic polynomial in the Chebyshev basis of the hull.
    pub series: ChebSeries,
    pub alternation_points: Vec<f64>,
    /// `w·p` at the alternation points.
    pub alternation_values: Vec<f64>,
    /// `t_n = ‖w·p‖_K`.
    pub norm: f64,
    /// Levelled error of the final reference; `level ≤ t_n(K, w) ≤ norm`.
    pub level: f64,
    pub capacity: f64,
    pub widom_inf: f64,
    /// Largest `|w·p|` seen on the validation grid.
    pub validation_max: f64,
    pub iterations: usize,
}

impl ChebyshevSolution {
    pub fn eval(&self, x: f64) -> f64 {
        self.series.eval(x)
    }

    pub fn monomial(&self) -> Poly {
        self.series.to_poly()
    }

    /// `(norm - level) / norm`.
    pub fn residual(&self) -> f64 {
        (self.norm - self.level) / self.norm
    }
}

/// Weighted Chebyshev polynomial of degree `n` with default options.
pub fn remez(set: &IntervalSet, weight: WeightSpec, n: usize, tol: f64) -> Result<ChebyshevSolution> {
    let eq = equilibrium(set, DEFAULT_QUAD_POINTS)?;
    let opts = RemezOptions { tol, ..RemezOptions::default() };
    remez_with(&eq, weight, n, &opts)
}

pub fn remez_with(
    eq: &EquilibriumData,
    weight: WeightSpec,
    n: usize,
    opts: &RemezOptions,
) -> Result<ChebyshevSolution> {
    if n == 0 {
        return Err(Error::InvalidArgument("remez needs degree n >= 1".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("remez tolerance {} must be positive", opts.tol)));
    }
    let set = eq.set();
    weight.validate(set)?;
    let hull = set.hull();
    let lead = ChebSeries::monic_lead(n, hull);
    let per_band = opts.grid_per_band.max(2 * n + 8);
    let grid = cheb_grid(set, per_band);

    let mut reference = initial_reference(set, eq.band_masses(), n, &weight);
    let mut prev_level = f64::NAN;
    let mut iterations = 0;
    let (series, level, norm) = loop {
        iterations += 1;
        let (series, e) = solve_reference(&reference, &weight, n, lead, hull)?;
        let level = e.abs();
        if !(level > 0.0) || !level.is_finite() {
            return Err(Error::Numerical(format!("levelled error {e} on reference {reference:?}")));
        }
        let err = |x: f64| weight.eval(x) * series.eval(x);
        let mut cands = local_extrema(&grid, &err);
        cands.extend(reference.iter().map(|&x| (x, err(x))));
        let norm = cands.iter().fold(0.0f64, |m, c| m.max(c.1.abs()));
        let gap = (norm - level) / norm;
        let level_change = ((level - prev_level) / level).abs();
        if gap <= opts.tol.max(64.0 * f64::EPSILON) || (level_change <= opts.tol && gap <= 0.1 * opts.validation_slack)
        {
            break (series, level, norm);
        }
        if iterations >= opts.max_iter {
            return Err(Error::Convergence { what: format!("remez exchange (degree {n})"), residual: gap });
        }
        prev_level = level;
        cands.retain(|c| c.1.abs() >= level * (1.0 - 1e-10));
        let chosen = select_alternating(cands, n + 1)
            .ok_or_else(|| Error::Numerical(format!("fewer than {} alternating extrema (degree {n})", n + 1)))?;
        reference = chosen.into_iter().map(|c| c.0).collect();
        if reference.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Numerical(format!("reference degeneracy at degree {n}: {reference:?}")));
        }
    };

    let err = |x: f64| weight.eval(x) * series.eval(x);
    let validation = cheb_grid(set, per_band * opts.validation_factor.max(1));
    let validation_max = validation.iter().flatten().fold(0.0f64, |m, &x| m.max(err(x).abs()));
    if validation_max > level * (1.0 + opts.validation_slack) {
        return Err(Error::Convergence {
            what: format!("remez validation (degree {n})"),
            residual: validation_max / level - 1.0,
        });
    }

    let mut cands = local_extrema(&grid, &err);
    cands.extend(reference.iter().map(|&x| (x, err(x))));
    cands.retain(|c| c.1.abs() >= norm * (1.0 - 1e-9));
    let alternation = select_alternating(cands, n + 1)
        .ok_or_else(|| Error::Numerical(format!("could not certify {} alternation points (degree {n})", n + 1)))?;
    for (k, &(x, v)) in alternation.iter().enumerate() {
        let expected = if (n - k).is_multiple_of(2) { norm } else { -norm };
        if (v - expected).abs() > 1e-9 * norm {
            return Err(Error::Numerical(format!(
                "alternation sign pattern violated at x = {x}: w·p = {v}, expected {expected}"
            )));
        }
    }

    let capacity = eq.capacity();
    Ok(ChebyshevSolution {
        degree: n,
        weight,
        series,
        alternation_points: alternation.iter().map(|c| c.0).collect(),
        alternation_values: alternation.iter().map(|c| c.1).collect(),
        norm,
        level,
        capacity,
        widom_inf: norm / capacity.powi(n as i32),
        validation_max,
        iterations,
    })
}

/// Per-band Chebyshev-extrema grid including both endpoints; one vector per band.
fn cheb_grid(set: &IntervalSet, per_band: usize) -> Vec<Vec<f64>> {
    set.bands()
        .iter()
        .map(|&(a, b)| {
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            (0..per_band)
                .map(|i| {
                    if i == 0 {
                        a
                    } else if i == per_band - 1 {
                        b
                    } else {
                        mid - half * (PI * i as f64 / (per_band - 1) as f64).cos()
                    }
                })
                .collect()
        })
        .collect()
}

/// `n + 1` points split across bands in proportion to band mass,
/// Chebyshev-spaced (first kind, so interior) within each band.
fn initial_reference(set: &IntervalSet, masses: &[f64], n: usize, weight: &WeightSpec) -> Vec<f64> {
    let total = n + 1;
    let raw: Vec<f64> = masses.iter().map(|m| m * total as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&i, &j| (raw[j] - raw[j].floor()).total_cmp(&(raw[i] - raw[i].floor())).then(i.cmp(&j)));
    let assigned: usize = counts.iter().sum();
    for &i in order.iter().cycle().take(total - assigned) {
        counts[i] += 1;
    }
    let mut points = Vec::with_capacity(total);
    for (&(a, b), &k) in set.bands().iter().zip(&counts) {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        for i in 0..k {
            let x = mid - half * (PI * (2 * i + 1) as f64 / (2 * k) as f64).cos();
            points.push(x);
        }
    }
    debug_assert!(points.iter().all(|&x| weight.eval(x) > 0.0));
    points
}

/// Solves `w(x_k) p(x_k) = (-1)^{n-k} E` for the free coefficients and `E`.
fn solve_reference(
    reference: &[f64],
    weight: &WeightSpec,
    n: usize,
    lead: f64,
    hull: (f64, f64),
) -> Result<(ChebSeries, f64)> {
    let m = n + 1;
    let mut a = DMatrix::<f64>::zeros(m, m);
    let mut rhs = DVector::<f64>::zeros(m);
    let mut tv = Vec::with_capacity(m);
    for (k, &x) in reference.iter().enumerate() {
        let w = weight.eval(x);
        let t = (2.0 * x - hull.0 - hull.1) / (hull.1 - hull.0);
        chebyshev_t_values(n, t, &mut tv);
        for i in 0..n {
            a[(k, i)] = w * tv[i];
        }
        a[(k, n)] = if (n - k).is_multiple_of(2) { -1.0 } else { 1.0 };
        rhs[k] = -lead * w * tv[n];
    }
    let sol =
        a.lu().solve(&rhs).ok_or_else(|| Error::Numerical(format!("singular reference system on {reference:?}")))?;
    let mut coeffs: Vec<f64> = sol.iter().take(n).copied().collect();
    coeffs.push(lead);
    Ok((ChebSeries::new(coeffs, hull), sol[n]))
}

/// Local maxima of `|err|` on each band's grid, refined by golden section.
fn local_extrema<F: Fn(f64) -> f64>(grid: &[Vec<f64>], err: &F) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for band in grid {
        let vals: Vec<f64> = band.iter().map(|&x| err(x)).collect();
        let m = band.len();
        for i in 0..m {
            let v = vals[i].abs();
            if v == 0.0 {
                continue;
            }
            let left = if i > 0 { vals[i - 1].abs() } else { f64::NEG_INFINITY };
            let right = if i + 1 < m { vals[i + 1].abs() } else { f64::NEG_INFINITY };
            if v < left || v < right {
                continue;
            }
            let s = vals[i].signum();
            let lo = band[i.saturating_sub(1)];
            let hi = band[(i + 1).min(m - 1)];
            let (x, sv) = golden_max(|x| s * err(x), lo, hi);
            if sv >= v {
                out.push((x, s * sv));
            } else {
                out.push((band[i], vals[i]));
            }
        }
    }
    out
}

/// Picks `count` points with alternating signs of the value, keeping the
/// largest magnitudes.
fn select_alternating(mut cands: Vec<(f64, f64)>, count: usize) -> Option<Vec<(f64, f64)>> {
    cands.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut deduped: Vec<(f64, f64)> = Vec::with_capacity(cands.len());
    for c in cands {
        match deduped.last_mut() {
            Some(last) if (c.0 - last.0).abs() <= 1e-14 * c.0.abs().max(1.0) => {
                if c.1.abs() > last.1.abs() {
                    *last = c;
                }
            }
            _ => deduped.push(c),
        }
    }
    let mut alt: Vec<(f64, f64)> = Vec::with_capacity(deduped.len());
    for c in deduped {
        match alt.last_mut() {
            Some(last) if last.1.signum() == c.1.signum() => {
                if c.1.abs() > last.1.abs() {
                    *last = c;
                }
            }
            _ => alt.push(c),
        }
    }
    if alt.len() < count {
        return None;
    }
    while alt.len() > count {
        let last = alt.len() - 1;
        if alt.len() - count == 1 {
            if alt[0].1.abs() < alt[last].1.abs() {
                alt.remove(0);
            } else {
                alt.pop();
            }
            continue;
        }
        let j = (0..alt.len()).min_by(|&i, &k| alt[i].1.abs().total_cmp(&alt[k].1.abs())).expect("nonempty");
        if j == 0 || j == last {
            alt.remove(j);
        } else if alt[j - 1].1.abs() < alt[j + 1].1.abs() {
            alt.drain(j - 1..=j);
        } else {
            alt.drain(j..=j + 1);
        }
    }
    Some(alt)
}

/// Theoretical two-sided bounds on `W∞,n` for `√(1+x)` and `√(1-x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupBounds {
    pub lower: f64,
    pub upper: Option<f64>,
}

/// `2√Cap ≤ W∞,n ≤ 2√Cap·exp(½ g_K(∓1) + PW(K))`, with `-1` for `√(1+x)`
/// and `+1` for `√(1-x)`. Affine weights `√(1 ± T)` are handled in the
/// coordinates of their reference hull.
pub fn sup_bounds(eq: &EquilibriumData, weight: WeightSpec) -> Result<SupBounds> {
    let (alpha, beta, (a, b)) = weight.jacobi_form();
    let endpoint = match (alpha, beta) {
        (0, 1) => a,
        (1, 0) => b,
        _ => {
            return Err(Error::InvalidArgument(format!("no sup-norm bounds for weight {weight:?}")));
        }
    };
    weight.validate(eq.set())?;
    let lower = weight.saturation_level(eq.capacity());
    let upper = lower * (0.5 * eq.green(endpoint) + eq.pw_data().pw_sum).exp();
    Ok(SupBounds { lower, upper: Some(upper) })
}

/// Chebyshev polynomials of the four kinds on [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    First,
    Second,
    Third,
    Fourth,
}

impl Kind {
    pub const ALL: [Kind; 4] = [Kind::First, Kind::Second, Kind::Third, Kind::Fourth];

    /// The weight for which the monic polynomial of this kind is extremal on [-1, 1].
    pub fn weight(&self) -> WeightSpec {
        match self {
            Kind::First => WeightSpec::Unit,
            Kind::Second => WeightSpec::SqrtOneMinusSq,
            Kind::Third => WeightSpec::SqrtOnePlus,
            Kind::Fourth => WeightSpec::SqrtOneMinus,
        }
    }

    /// `W∞,n` on [-1, 1].
    pub fn widom_inf(&self) -> f64 {
        match self {
            Kind::First => 2.0,
            Kind::Second => 1.0,
            Kind::Third | Kind::Fourth => SQRT_2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KindPolynomial {
    pub kind: Kind,
    pub degree: usize,
    /// `T_n/2^{n-1}`, `U_n/2^n`, `V_n/2^n` or `W_n/2^n`.
    pub monic: Poly,
    /// `‖w·monic‖_{[-1,1]}`.
    pub norm: f64,
    pub widom_inf: f64,
}

/// Monic Chebyshev polynomial of the given kind by the three-term recurrence
/// `P_{k+1} = 2x P_k - P_{k-1}`.
pub fn kind_polynomial(kind: Kind, n: usize) -> KindPolynomial {
    let first = match kind {
        Kind::First => Poly::new(vec![0.0, 1.0]),
        Kind::Second => Poly::new(vec![0.0, 2.0]),
        Kind::Third => Poly::new(vec![-1.0, 2.0]),
        Kind::Fourth => Poly::new(vec![1.0, 2.0]),
    };
    let two_x = Poly::new(vec![0.0, 2.0]);
    let mut prev = Poly::constant(1.0);
    let mut cur = first;
    let raw = if n == 0 {
        prev.clone()
    } else {
        for _ in 1..n {
            let next = two_x.mul(&cur).sub(&prev);
            prev = cur;
            cur = next;
        }
        cur
    };
    let monic = raw.scale(1.0 / raw.leading());
    let widom_inf = kind.widom_inf();
    KindPolynomial { kind, degree: n, monic, norm: widom_inf * 0.5f64.powi(n as i32), widom_inf }
}

/// `K_n = {x : (1 ± x)·p(x)² ∈ [0, t_n²]}` for the solution `p` of the
/// `√(1+x)` (resp. `√(1-x)`) problem; contains `K` and has
/// `Cap(K_n)^{2n+1} = t_n²/4`.
pub fn enclosing_preimage(set: &IntervalSet, weight: WeightSpec, sol: &ChebyshevSolution) -> Result<IntervalSet> {
    let t2 = sol.norm * sol.norm;
    let n = sol.degree;
    let bands = match weight {
        WeightSpec::SqrtOnePlus => enclosing_one_plus(|x| sol.eval(x), &sol.alternation_points, t2)?,
        WeightSpec::SqrtOneMinus => {
            let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            let pts: Vec<f64> = sol.alternation_points.iter().rev().map(|x| -x).collect();
            enclosing_one_plus(|x| sign * sol.eval(-x), &pts, t2)?.into_iter().rev().map(|(a, b)| (-b, -a)).collect()
        }
        other => {
            return Err(Error::InvalidArgument(format!("enclosing preimage needs a √(1±x) weight, got {other:?}")));
        }
    };
    let kn = IntervalSet::new(&bands)?;
    let unit = IntervalSet::interval(-1.0, 1.0)?;
    if !set.is_subset_of(&kn, 1e-9) || !kn.is_subset_of(&unit, 1e-9) {
        return Err(Error::Numerical(format!(
            "enclosing preimage {:?} does not satisfy K ⊆ K_n ⊆ [-1, 1]",
            kn.bands()
        )));
    }
    Ok(kn)
}

fn enclosing_one_plus<F: Fn(f64) -> f64>(p: F, alternation: &[f64], t2: f64) -> Result<Vec<(f64, f64)>> {
    let n = alternation.len() - 1;
    let q = |x: f64| {
        let v = p(x);
        (1.0 + x) * v * v
    };
    let mut breaks = vec![-1.0];
    for k in 1..=n {
        let y = bisect(&p, alternation[k - 1], alternation[k]).ok_or_else(|| {
            Error::Numerical(format!(
                "no zero between alternation points {} and {}",
                alternation[k - 1],
                alternation[k]
            ))
        })?;
        breaks.push(y);
    }
    let mut bands = Vec::with_capacity(n + 1);
    let mut start = -1.0;
    for k in 0..n {
        let (lo, hi) = (breaks[k], breaks[k + 1]);
        let (xm, qm) = golden_max(q, lo, hi);
        if qm > t2 * (1.0 + 1e-9) {
            let r1 = bisect(|x| q(x) - t2, lo, xm);
            let r2 = bisect(|x| q(x) - t2, xm, hi);
            match (r1, r2) {
                (Some(r1), Some(r2)) => {
                    bands.push((start, r1));
                    start = r2;
                }
                _ => return Err(Error::Numerical("inconsistent root count for Q - t_n²".into())),
            }
        } else if qm < t2 * (1.0 - 1e-7) {
            return Err(Error::Numerical(format!(
                "Q has only {qm:e} < t_n² = {t2:e} between consecutive zeros: root count inconsistent with degree {}",
                2 * n + 1
            )));
        }
    }
    let last_zero = breaks[n];
    let mut hi = alternation[n].max(last_zero) + 1.0;
    while q(hi) <= t2 {
        hi += 1.0;
    }
    let end =
        bisect(|x| q(x) - t2, last_zero, hi).ok_or_else(|| Error::Numerical("no right endpoint for K_n".into()))?;
    bands.push((start, end));
    Ok(bands)
}
