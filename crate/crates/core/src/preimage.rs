//! Polynomial preimage sets `K = {x : Q(x) ∈ [0, 1]}` with
//! `Q = (1 + x)S²`, `(1 - x)S²` or `(1 - x²)S²`, their exact capacity and
//! top-degree Chebyshev polynomials, and saturation checks of the sharp
//! lower bounds on such sets.
//!
//! Coefficients are kept as exact rationals; floating-point specs are
//! converted exactly from their binary value.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::chebyshev::{remez_with, ChebyshevSolution, RemezOptions, WeightSpec};
use crate::error::{Error, Result};
use crate::interval_sets::{affine_map, IntervalSet};
use crate::numeric::bisect;
use crate::orthopoly::{stieltjes, JacobiOnEq, OrthoData};
use crate::poly::Poly;
use crate::potential::{equilibrium, EquilibriumData, DEFAULT_QUAD_POINTS};

/// Default snapping tolerance for critical values at 0 or 1.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

/// Imaginary parts below this (relative) are treated as rounding noise of
/// clustered real roots.
const REAL_ROOT_TOL: f64 = 1e-7;

/// Polynomial with exact rational coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoly(Vec<BigRational>);

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigRational::zero());
        }
        Self(coeffs)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn leading(&self) -> &BigRational {
        self.0.last().expect("nonempty")
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let zero = BigRational::zero();
        Self::new((0..n).map(|k| self.0.get(k).unwrap_or(&zero) + other.0.get(k).unwrap_or(&zero)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(self.0.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn derivative(&self) -> Self {
        if self.0.len() == 1 {
            return Self::new(vec![BigRational::zero()]);
        }
        Self::new(
            self.0.iter().enumerate().skip(1).map(|(k, c)| c * BigRational::from_integer(BigInt::from(k))).collect(),
        )
    }

    /// `p(q(x))`.
    pub fn compose(&self, q: &Self) -> Self {
        self.0.iter().rev().fold(Self::new(vec![]), |acc, c| acc.mul(q).add(&Self::new(vec![c.clone()])))
    }

    /// `p(-x)`.
    pub fn reflect(&self) -> Self {
        Self::new(self.0.iter().enumerate().map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() }).collect())
    }

    pub fn to_poly(&self) -> Poly {
        Poly::new(self.0.iter().map(rat_to_f64).collect())
    }
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite float.
pub fn rat_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidArgument(format!("non-finite coefficient {x}")))
}

/// Parses `"p/q"`, an integer, or a plain decimal such as `"-0.15"` exactly.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::InvalidArgument(format!("cannot parse {text:?} as an exact rational"));
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = BigRational::new(num, den);
    Ok(if negative { -r } else { r })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreimageVariant {
    /// `Q = (1 + x)S²`
    OnePlus,
    /// `Q = (1 - x)S²`
    OneMinus,
    /// `Q = (1 - x²)S²`
    OneMinusSq,
}

impl PreimageVariant {
    pub fn weight(&self) -> WeightSpec {
        match self {
            PreimageVariant::OnePlus => WeightSpec::SqrtOnePlus,
            PreimageVariant::OneMinus => WeightSpec::SqrtOneMinus,
            PreimageVariant::OneMinusSq => WeightSpec::SqrtOneMinusSq,
        }
    }

    /// `(α, β)` of the matching measure `(1 - x)^α (1 + x)^β dμ_K`.
    pub fn exponents(&self) -> (u32, u32) {
        match self {
            PreimageVariant::OnePlus => (0, 1),
            PreimageVariant::OneMinus => (1, 0),
            PreimageVariant::OneMinusSq => (1, 1),
        }
    }

    /// The factor multiplying `S²`.
    pub fn form(&self) -> RatPoly {
        match self {
            PreimageVariant::OnePlus => RatPoly::from_ints(&[1, 1]),
            PreimageVariant::OneMinus => RatPoly::from_ints(&[1, -1]),
            PreimageVariant::OneMinusSq => RatPoly::from_ints(&[1, 0, -1]),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PreimageVariant::OnePlus => "one_plus",
            PreimageVariant::OneMinus => "one_minus",
            PreimageVariant::OneMinusSq => "one_minus_sq",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreimageSpec {
    variant: PreimageVariant,
    s: RatPoly,
}

impl PreimageSpec {
    pub fn new(variant: PreimageVariant, coeffs: Vec<BigRational>) -> Result<Self> {
        let s = RatPoly::new(coeffs);
        if s.degree() == 0 {
            return Err(Error::InvalidArgument("S must have degree at least 1".into()));
        }
        Ok(Self { variant, s })
    }

    pub fn from_f64(variant: PreimageVariant, coeffs: &[f64]) -> Result<Self> {
        Self::new(variant, coeffs.iter().map(|&c| rat_from_f64(c)).collect::<Result<_>>()?)
    }

    /// Coefficients given as exact rational strings, e.g. `["-3/20", "3"]`.
    pub fn parse(variant: PreimageVariant, coeffs: &[&str]) -> Result<Self> {
        Self::new(variant, coeffs.iter().map(|c| parse_rational(c)).collect::<Result<_>>()?)
    }

    pub fn variant(&self) -> PreimageVariant {
        self.variant
    }

    pub fn s(&self) -> &RatPoly {
        &self.s
    }

    /// Degree `n` of `S`.
    pub fn degree(&self) -> usize {
        self.s.degree()
    }

    /// Leading coefficient `c` of `S`.
    pub fn leading(&self) -> &BigRational {
        self.s.leading()
    }

    pub fn q(&self) -> RatPoly {
        self.variant.form().mul(&self.s).mul(&self.s)
    }

    pub fn q_degree(&self) -> usize {
        self.q().degree()
    }

    pub fn weight(&self) -> WeightSpec {
        self.variant.weight()
    }

    /// The mirror spec: `(1 + x) ↔ (1 - x)` and `S(x) ↦ S(-x)`; its set is
    /// the reflection of this one.
    pub fn reflect(&self) -> Self {
        let variant = match self.variant {
            PreimageVariant::OnePlus => PreimageVariant::OneMinus,
            PreimageVariant::OneMinus => PreimageVariant::OnePlus,
            PreimageVariant::OneMinusSq => PreimageVariant::OneMinusSq,
        };
        Self { variant, s: self.s.reflect() }
    }

    /// Short description such as `one_plus S = [0, 3]`.
    pub fn describe(&self) -> String {
        let coeffs: Vec<String> = self.s.coeffs().iter().map(|c| c.to_string()).collect();
        format!("{} S = [{}]", self.variant.name(), coeffs.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub x: f64,
    pub value: f64,
    /// Critical value strictly inside (0, 1): the preimage spec is inadmissible.
    pub violates: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreimageSet {
    pub set: IntervalSet,
    /// One interval per monotone branch of `Q` over [0, 1], in increasing order.
    pub branches: Vec<(f64, f64)>,
    pub critical_points: Vec<CriticalPoint>,
}

fn real_roots(p: &Poly, what: &str) -> Result<Vec<f64>> {
    p.roots()
        .into_iter()
        .map(|z| {
            if z.im.abs() <= REAL_ROOT_TOL * z.re.abs().max(1.0) {
                Ok(z.re)
            } else {
                Err(Error::Inadmissible(format!("{what} has the non-real root {} + {}i", z.re, z.im)))
            }
        })
        .collect()
}

/// Builds `K = {x ∈ ℝ : Q(x) ∈ [0, 1]}` after checking that the complex
/// preimage of [0, 1] is real: every critical point of `Q` is real and no
/// critical value lies in the open interval (0, 1). Critical values within
/// `root_tol` of 0 or 1 are snapped and admitted.
pub fn build_set(spec: &PreimageSpec, root_tol: f64) -> Result<PreimageSet> {
    let q_exact = spec.q();
    let q = q_exact.to_poly();
    let n_q = q_exact.degree();
    // Q' = S·(ω'S + 2ωS'); the zeros of S are handled separately so that
    // double zeros of S do not degrade the eigenvalue problem.
    let form = spec.variant.form();
    let rest =
        form.derivative().mul(&spec.s).add(&form.mul(&spec.s.derivative()).scale(&BigRational::from_integer(2.into())));
    let s_roots = real_roots(&spec.s.to_poly(), "S")?;
    let r_roots = real_roots(&rest.to_poly(), "Q'")?;

    let mut critical: Vec<(f64, f64)> = s_roots.iter().map(|&x| (x, 0.0)).collect();
    critical.extend(r_roots.iter().map(|&x| (x, q.eval(x))));
    critical.sort_by(|a, b| a.0.total_cmp(&b.0));
    critical.dedup_by(|b, a| (b.0 - a.0).abs() <= 1e-10 * a.0.abs().max(1.0));

    let snap = |v: f64| {
        if v.abs() <= root_tol {
            0.0
        } else if (v - 1.0).abs() <= root_tol {
            1.0
        } else {
            v
        }
    };
    let critical_points: Vec<CriticalPoint> = critical
        .iter()
        .map(|&(x, v)| {
            let value = snap(v);
            CriticalPoint { x, value, violates: value > 0.0 && value < 1.0 }
        })
        .collect();
    if let Some(c) = critical_points.iter().find(|c| c.violates) {
        return Err(Error::Inadmissible(format!(
            "critical value {:.12} of Q at x = {:.12} lies in (0, 1)",
            c.value, c.x
        )));
    }

    let bound = q.root_bound().max(q.sub(&Poly::constant(1.0)).root_bound()) + 1.0;
    let mut knots = vec![(-bound, snap(q.eval(-bound)))];
    knots.extend(critical_points.iter().map(|c| (c.x, c.value)));
    knots.push((bound, snap(q.eval(bound))));

    let mut branches = Vec::new();
    for w in knots.windows(2) {
        let ((l, ql), (r, qr)) = (w[0], w[1]);
        let (lo_v, hi_v) = (ql.min(qr), ql.max(qr));
        if hi_v <= 0.0 || lo_v >= 1.0 {
            continue;
        }
        if lo_v > 0.0 || hi_v < 1.0 {
            return Err(Error::Inadmissible(format!(
                "monotone branch on [{l}, {r}] covers only [{lo_v}, {hi_v}] of [0, 1]"
            )));
        }
        let level_point = |v: f64| -> Result<f64> {
            if ql == v {
                Ok(l)
            } else if qr == v {
                Ok(r)
            } else {
                bisect(|x| q.eval(x) - v, l, r)
                    .ok_or_else(|| Error::Numerical(format!("no solution of Q = {v} on [{l}, {r}]")))
            }
        };
        let (x0, x1) = (level_point(0.0)?, level_point(1.0)?);
        branches.push((x0.min(x1), x0.max(x1)));
    }
    if branches.len() != n_q {
        return Err(Error::Inadmissible(format!(
            "only {} of {n_q} branches of Q over [0, 1] are real",
            branches.len()
        )));
    }
    let set = IntervalSet::new(&branches)?;
    let (lo, hi) = set.hull();
    if lo < -1.0 - 1e-12 || hi > 1.0 + 1e-12 {
        return Err(Error::Inadmissible(format!("the set [{lo}, {hi}] escapes [-1, 1]")));
    }
    Ok(PreimageSet { set, branches, critical_points })
}

/// Closed-form data of an admissible spec with `N = deg Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactOracle {
    pub degree_q: usize,
    /// `Cap(K)^N = 1/(4c²)`.
    pub capacity_pow: BigRational,
    pub capacity: f64,
    /// Monic Chebyshev polynomial of degree `N` on `K`.
    pub chebyshev_top: RatPoly,
    /// `t_n(K, w) = 1/|c|` at degree `n = deg S`.
    pub t_exact: f64,
    /// `S/c`: the weighted Chebyshev and orthogonal polynomial of degree `n`.
    pub s_monic: RatPoly,
}

pub fn exact_invariants(spec: &PreimageSpec) -> Result<ExactOracle> {
    build_set(spec, DEFAULT_ROOT_TOL)?;
    let c = spec.leading().clone();
    let c2 = &c * &c;
    let q = spec.q();
    let degree_q = q.degree();
    let capacity_pow = BigRational::one() / (BigRational::from_integer(4.into()) * &c2);
    let two_cap_pow = &capacity_pow * BigRational::from_integer(2.into());
    let q_over_c2 = q.scale(&(BigRational::one() / &c2));
    let constant = RatPoly::new(vec![two_cap_pow]);
    let chebyshev_top = match spec.variant {
        PreimageVariant::OnePlus => q_over_c2.sub(&constant),
        PreimageVariant::OneMinus | PreimageVariant::OneMinusSq => constant.sub(&q_over_c2),
    };
    debug_assert!(chebyshev_top.leading().is_one());
    let capacity = (rat_to_f64(&capacity_pow).ln() / degree_q as f64).exp();
    Ok(ExactOracle {
        degree_q,
        capacity,
        capacity_pow,
        chebyshev_top,
        t_exact: 1.0 / rat_to_f64(&c.abs()),
        s_monic: spec.s.scale(&(BigRational::one() / &c)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub id: char,
    pub name: String,
    /// Relative (or coefficient-wise absolute) deviation from equality.
    pub deviation: f64,
    pub passed: bool,
}

impl Clause {
    fn new(id: char, name: &str, deviation: f64, tol: f64) -> Self {
        Self { id, name: name.to_string(), deviation, passed: deviation <= tol }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaturationReport {
    pub label: String,
    pub degree: usize,
    pub clauses: Vec<Clause>,
    pub chebyshev: ChebyshevSolution,
    pub ortho: OrthoData,
}

impl SaturationReport {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn clause(&self, id: char) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.id == id)
    }
}

fn max_coeff_diff(a: &Poly, b: &Poly) -> f64 {
    let n = a.coeffs().len().max(b.coeffs().len());
    (0..n)
        .map(|k| {
            let x = a.coeffs().get(k).copied().unwrap_or(0.0);
            let y = b.coeffs().get(k).copied().unwrap_or(0.0);
            (x - y).abs() / y.abs().max(1.0)
        })
        .fold(0.0, f64::max)
}

/// Clauses (b) and (c) on an arbitrary set: `W∞,n(K, w)` against its
/// saturation level and `[W_{2,n}(w² dμ_K)]²` against `2S`.
pub fn bound_equalities(
    eq: &EquilibriumData,
    weight: WeightSpec,
    n: usize,
    tol: f64,
    label: &str,
) -> Result<SaturationReport> {
    let sol = remez_with(eq, weight, n, &RemezOptions::default())?;
    let level = weight.saturation_level(eq.capacity());
    let b = Clause::new('b', "sup-norm Widom factor at its lower bound", (sol.widom_inf - level).abs() / level, tol);
    let ortho = stieltjes(&JacobiOnEq::from_weight(eq, &weight)?, n)?;
    let two_s = 2.0 * ortho.entropy;
    let c = Clause::new('c', "[W2,n]^2 equals 2S", (ortho.widom2_sq[n] - two_s).abs() / two_s, tol);
    Ok(SaturationReport { label: label.to_string(), degree: n, clauses: vec![b, c], chebyshev: sol, ortho })
}

/// Builds the set of an admissible spec and checks every equality the
/// extremal case predicts:
///
/// - (a) numeric capacity equals the exact one;
/// - (b) `W∞,n(K, w)` equals `2√Cap` (`2·Cap` for `√(1-x²)`);
/// - (c) `[W_{2,n}]² = 2S(μ)` for `μ = w² dμ_K`;
/// - (d) the weighted Chebyshev polynomial and `P_n(·; μ)` both equal `S/c`;
/// - (e) the unweighted Chebyshev polynomial of degree `deg Q` is the closed form.
pub fn saturation_verify(spec: &PreimageSpec, tol: f64) -> Result<SaturationReport> {
    let built = build_set(spec, DEFAULT_ROOT_TOL)?;
    let oracle = exact_invariants(spec)?;
    let eq = equilibrium(&built.set, DEFAULT_QUAD_POINTS)?;
    let n = spec.degree();
    let mut report = bound_equalities(&eq, spec.weight(), n, tol, &spec.describe())?;

    let a = Clause::new(
        'a',
        "numeric capacity equals 1/(4c^2)^(1/deg Q)",
        (eq.capacity() - oracle.capacity).abs() / oracle.capacity,
        tol,
    );
    let target = oracle.s_monic.to_poly();
    let d_dev =
        max_coeff_diff(&report.chebyshev.monomial(), &target).max(max_coeff_diff(&report.ortho.polynomial(n), &target));
    let d = Clause::new('d', "T_n,w and P_n both equal S/c", d_dev, tol);
    let top = remez_with(&eq, WeightSpec::Unit, oracle.degree_q, &RemezOptions::default())?;
    let e = Clause::new(
        'e',
        "Chebyshev polynomial of degree deg Q matches the closed form",
        max_coeff_diff(&top.monomial(), &oracle.chebyshev_top.to_poly()),
        tol,
    );
    let mut clauses = vec![a];
    clauses.append(&mut report.clauses);
    clauses.push(d);
    clauses.push(e);
    report.clauses = clauses;
    Ok(report)
}

/// The problem transported by the increasing affine map of [-1, 1] onto
/// `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineInstance {
    pub set: IntervalSet,
    pub weight: WeightSpec,
    pub alpha: u32,
    pub beta: u32,
    /// `P_n(x; ν) = (1/c)((b - a)/2)^n S(T(x))`, exactly monic.
    pub exact_pn: RatPoly,
}

pub fn affine_instance(spec: &PreimageSpec, target_hull: (f64, f64)) -> Result<AffineInstance> {
    let (a, b) = target_hull;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(format!("degenerate target hull [{a}, {b}]")));
    }
    let built = build_set(spec, DEFAULT_ROOT_TOL)?;
    let set = affine_map(&built.set, (-1.0, 1.0), target_hull)?;
    let (alpha, beta) = spec.variant.exponents();
    let (ra, rb) = (rat_from_f64(a)?, rat_from_f64(b)?);
    let width = &rb - &ra;
    let two = BigRational::from_integer(2.into());
    let t = RatPoly::new(vec![-(&ra + &rb) / &width, &two / &width]);
    let half_width = &width / &two;
    let factor = num_traits::pow(half_width, spec.degree()) / spec.leading();
    let exact_pn = spec.s.compose(&t).scale(&factor);
    if !exact_pn.leading().is_one() {
        return Err(Error::Numerical(format!(
            "mapped polynomial has leading coefficient {} instead of 1",
            exact_pn.leading()
        )));
    }
    Ok(AffineInstance {
        set,
        weight: WeightSpec::JacobiRoot { alpha, beta, reference_hull: target_hull },
        alpha,
        beta,
        exact_pn,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn three_x() -> PreimageSpec {
        PreimageSpec::parse(PreimageVariant::OnePlus, &["0", "3"]).unwrap()
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("3/20").unwrap(), BigRational::new(3.into(), 20.into()));
        assert_eq!(parse_rational("-0.15").unwrap(), BigRational::new((-3).into(), 20.into()));
        assert_eq!(parse_rational("7").unwrap(), BigRational::from_integer(7.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn three_x_set_is_cubic_sublevel() {
        let built = build_set(&three_x(), DEFAULT_ROOT_TOL).unwrap();
        let bands = built.set.bands();
        assert_eq!(bands.len(), 2);
        // band edges solve 9x³ + 9x² = 1
        let cubic = |x: f64| 9.0 * x * x * x + 9.0 * x * x - 1.0;
        assert_eq!(bands[0].0, -1.0);
        for x in [bands[0].1, bands[1].0, bands[1].1] {
            assert!(cubic(x).abs() < 1e-13);
        }
        assert_abs_diff_eq!(bands[0].1, -0.844_03, epsilon = 1e-5);
        assert_abs_diff_eq!(bands[1].0, -0.449_10, epsilon = 1e-5);
        assert_abs_diff_eq!(bands[1].1, 0.293_13, epsilon = 1e-5);
        let crit = built.critical_points.iter().find(|c| (c.x + 2.0 / 3.0).abs() < 1e-12).unwrap();
        assert_abs_diff_eq!(crit.value, 4.0 / 3.0, epsilon = 1e-14);
        assert_eq!(built.branches.len(), 3);
    }

    #[test]
    fn rejects_small_critical_value() {
        let spec = PreimageSpec::parse(PreimageVariant::OnePlus, &["0", "1"]).unwrap();
        let err = build_set(&spec, DEFAULT_ROOT_TOL).unwrap_err().to_string();
        assert!(err.contains("0.148148148148"), "{err}");
    }

    #[test]
    fn boundary_critical_values_give_full_interval() {
        let spec = PreimageSpec::parse(PreimageVariant::OneMinusSq, &["0", "2"]).unwrap();
        let built = build_set(&spec, DEFAULT_ROOT_TOL).unwrap();
        assert_eq!(built.set.bands(), &[(-1.0, 1.0)]);
        let oracle = exact_invariants(&spec).unwrap();
        assert_abs_diff_eq!(oracle.capacity, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn exact_oracle_for_three_x() {
        let o = exact_invariants(&three_x()).unwrap();
        assert_eq!(o.capacity_pow, BigRational::new(1.into(), 36.into()));
        assert_abs_diff_eq!(o.capacity, 36f64.powf(-1.0 / 3.0), epsilon = 1e-15);
        let expected = RatPoly::new(vec![
            BigRational::new((-1).into(), 18.into()),
            BigRational::zero(),
            BigRational::one(),
            BigRational::one(),
        ]);
        assert_eq!(o.chebyshev_top, expected);
        assert_eq!(o.t_exact, 1.0 / 3.0);

        let mirror = exact_invariants(&PreimageSpec::parse(PreimageVariant::OneMinus, &["0", "3"]).unwrap()).unwrap();
        let expected = RatPoly::new(vec![
            BigRational::new(1.into(), 18.into()),
            BigRational::zero(),
            -BigRational::one(),
            BigRational::one(),
        ]);
        assert_eq!(mirror.chebyshev_top, expected);
    }

    #[test]
    fn mirror_spec_reflects_set() {
        let spec = PreimageSpec::parse(PreimageVariant::OnePlus, &["-3/20", "3"]).unwrap();
        let a = build_set(&spec, DEFAULT_ROOT_TOL).unwrap().set;
        let b = build_set(&spec.reflect(), DEFAULT_ROOT_TOL).unwrap().set;
        for (x, y) in a.reflect().bands().iter().zip(b.bands()) {
            assert_abs_diff_eq!(x.0, y.0, epsilon = 1e-13);
            assert_abs_diff_eq!(x.1, y.1, epsilon = 1e-13);
        }
    }

    #[test]
    fn saturation_on_three_x() {
        let r = saturation_verify(&three_x(), 1e-8).unwrap();
        assert!(r.passed(), "{:?}", r.clauses);
        let p1 = r.ortho.polynomial(1);
        assert_abs_diff_eq!(p1.coeffs()[0], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(r.ortho.norms[1], 1.0 / 18.0, epsilon = 1e-12);
    }

    #[test]
    fn negative_control_fails_equalities() {
        let set = IntervalSet::new(&[(-1.0, -0.5), (0.5, 1.0)]).unwrap();
        let eq = equilibrium(&set, DEFAULT_QUAD_POINTS).unwrap();
        let r = bound_equalities(&eq, WeightSpec::SqrtOnePlus, 1, 1e-7, "control").unwrap();
        for c in &r.clauses {
            assert!(!c.passed && c.deviation >= 1e-6, "{c:?}");
        }
        assert!(r.chebyshev.widom_inf > WeightSpec::SqrtOnePlus.saturation_level(eq.capacity()) + 1e-6);
    }

    #[test]
    fn affine_instance_is_exactly_monic() {
        let inst = affine_instance(&three_x(), (0.0, 4.0)).unwrap();
        // S(T(x)) = 3(x/2 - 1), scaled by 2/3: x - 2
        assert_eq!(inst.exact_pn, RatPoly::from_ints(&[-2, 1]));
        let bands = inst.set.bands();
        assert_eq!(bands[0].0, 0.0);
        assert_abs_diff_eq!(bands[0].1, 0.3119, epsilon = 1e-3);
        let same = affine_instance(&three_x(), (-1.0, 1.0)).unwrap();
        assert_eq!(same.exact_pn, RatPoly::from_ints(&[0, 1]));
        let original = build_set(&three_x(), DEFAULT_ROOT_TOL).unwrap().set;
        for (x, y) in same.set.bands().iter().zip(original.bands()) {
            assert_abs_diff_eq!(x.0, y.0, epsilon = 1e-15);
            assert_abs_diff_eq!(x.1, y.1, epsilon = 1e-15);
        }
    }
}
