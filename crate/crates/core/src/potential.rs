//! Equilibrium measure, logarithmic capacity, Green function and
//! Parreau-Widom data for a finite union of intervals.
//!
//! With band endpoints `e_0 < e_1 < … < e_{2g+1}` and one point `z_k` in each
//! of the `g` gaps, the equilibrium density on the bands is
//!
//! ```text
//! ρ(x) = |Π (x - z_k)| / (π · sqrt|Π (x - e_i)|)
//! ```
//!
//! where the monic numerator is fixed by requiring its signed integral against
//! `1/sqrt|Π (x - e_i)|` to vanish over every gap. Those conditions are linear
//! in the coefficients of the numerator, so the gap points are the roots of
//! the solution of a `g × g` linear system, one root per gap. Off the set the
//! same integrand, taken in absolute value, is the derivative of the Green
//! function.
//!
//! All band and gap integrals use `x = mid ∓ half·cos θ`, which cancels the
//! inverse square roots at the two ends of the piece being integrated.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::interval_sets::{Gap, IntervalSet};
use crate::numeric::bisect;
use crate::poly::{chebyshev_t_values, ChebSeries};
use crate::quadrature::{adaptive, GaussLegendre};

pub const DEFAULT_QUAD_POINTS: usize = 64;
pub const MAX_QUAD_POINTS: usize = 1024;
pub const MASS_TOL: f64 = 1e-10;

/// Nodes and weights integrating against `dμ_K` restricted to one band.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct EquilibriumData {
    set: IntervalSet,
    endpoints: Vec<f64>,
    gap_zeros: Vec<f64>,
    log_capacity: f64,
    band_rules: Vec<QuadRule>,
    band_masses: Vec<f64>,
    points_per_band: usize,
}

/// Green-function critical values over the gaps and their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct PwData {
    pub critical_values: Vec<f64>,
    pub pw_sum: f64,
}

/// Computes the equilibrium measure of `set`.
///
/// `quad_points_per_band` is the initial Gauss-Legendre size in the angle
/// variable; it doubles (up to [`MAX_QUAD_POINTS`]) until the total mass is
/// one within [`MASS_TOL`].
pub fn equilibrium(set: &IntervalSet, quad_points_per_band: usize) -> Result<EquilibriumData> {
    if quad_points_per_band < 8 {
        return Err(Error::InvalidArgument(format!(
            "need at least 8 quadrature points per band, got {quad_points_per_band}"
        )));
    }
    let endpoints: Vec<f64> = set.bands().iter().flat_map(|&(a, b)| [a, b]).collect();
    let gap_zeros = solve_gap_zeros(set, &endpoints)?;

    let mut eq = EquilibriumData {
        set: set.clone(),
        endpoints,
        gap_zeros,
        log_capacity: 0.0,
        band_rules: Vec::new(),
        band_masses: Vec::new(),
        points_per_band: 0,
    };

    let mut n = quad_points_per_band;
    loop {
        eq.build_rules(n);
        let mass: f64 = eq.band_masses.iter().sum();
        if (mass - 1.0).abs() <= MASS_TOL {
            break;
        }
        if n >= MAX_QUAD_POINTS {
            return Err(Error::Quadrature(format!("total equilibrium mass {mass:.15} with {n} points per band")));
        }
        n = (2 * n).min(MAX_QUAD_POINTS);
    }
    eq.log_capacity = eq.log_capacity_at(eq.default_anchor())?;
    Ok(eq)
}

fn adaptive_moments(gaps: &[Gap], endpoints: &[f64], g: usize, to_unit: &dyn Fn(f64) -> f64) -> Vec<Vec<f64>> {
    gaps.iter()
        .map(|gap| {
            let skip = [2 * gap.index + 1, 2 * gap.index + 2];
            let (mid, half) = (gap.midpoint(), 0.5 * gap.width());
            (0..=g)
                .map(|i| {
                    let mut tv = Vec::with_capacity(g + 1);
                    let f = |theta: f64| {
                        let x = mid - half * theta.cos();
                        let r = product_abs_excluding(endpoints, x, &skip).sqrt();
                        chebyshev_t_values(g, to_unit(x), &mut tv);
                        tv[i] / r
                    };
                    adaptive(f, 0.0, PI, 1e-14, 1e-300)
                })
                .collect()
        })
        .collect()
}

fn solve_gap_zeros(set: &IntervalSet, endpoints: &[f64]) -> Result<Vec<f64>> {
    let gaps = set.gaps();
    let g = gaps.len();
    if g == 0 {
        return Ok(Vec::new());
    }
    let hull = set.hull();
    let to_unit = |x: f64| (2.0 * x - hull.0 - hull.1) / (hull.1 - hull.0);

    // moments[j][i] = ∫_{gap j} T_i(t(x)) / sqrt|Π (x - e)| dx
    let moments_with = |n: usize| -> Vec<Vec<f64>> {
        let rule = GaussLegendre::new(n);
        let mut tv = Vec::with_capacity(g + 1);
        gaps.iter()
            .map(|gap| {
                let skip = [2 * gap.index + 1, 2 * gap.index + 2];
                let (mid, half) = (gap.midpoint(), 0.5 * gap.width());
                let mut row = vec![0.0; g + 1];
                for (theta, w) in rule.mapped(0.0, PI) {
                    let x = mid - half * theta.cos();
                    let r = product_abs_excluding(endpoints, x, &skip).sqrt();
                    chebyshev_t_values(g, to_unit(x), &mut tv);
                    for (acc, t) in row.iter_mut().zip(&tv) {
                        *acc += w * t / r;
                    }
                }
                row
            })
            .collect()
    };
    let mut n = 128;
    let mut moments = moments_with(n);
    loop {
        let finer = moments_with(2 * n);
        let scale = finer.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = moments.iter().flatten().zip(finer.iter().flatten()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        moments = finer;
        n *= 2;
        if diff <= 1e-14 * scale {
            break;
        }
        if n >= 16384 {
            // A band much thinner than its distance to a gap makes the
            // integrand nearly singular; refine adaptively instead.
            moments = adaptive_moments(&gaps, endpoints, g, &to_unit);
            break;
        }
    }

    let lead = ChebSeries::monic_lead(g, hull);
    let a = DMatrix::from_fn(g, g, |j, i| moments[j][i]);
    let rhs = DVector::from_fn(g, |j, _| -lead * moments[j][g]);
    let sol = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Convergence { what: "gap-zero linear system".into(), residual: f64::INFINITY })?;
    let mut coeffs: Vec<f64> = sol.iter().copied().collect();
    coeffs.push(lead);
    let numerator = ChebSeries::new(coeffs, hull);

    gaps.iter()
        .map(|gap| {
            bisect(|x| numerator.eval(x), gap.left, gap.right).ok_or_else(|| Error::Convergence {
                what: format!("gap zero in ({}, {})", gap.left, gap.right),
                residual: numerator.eval(gap.left).abs().min(numerator.eval(gap.right).abs()),
            })
        })
        .collect()
}

fn product_abs_excluding(endpoints: &[f64], x: f64, skip: &[usize]) -> f64 {
    endpoints.iter().enumerate().filter(|(i, _)| !skip.contains(i)).map(|(_, &e)| (x - e).abs()).product()
}

impl EquilibriumData {
    fn build_rules(&mut self, n: usize) {
        let rule = GaussLegendre::new(n);
        self.band_rules.clear();
        self.band_masses.clear();
        for j in 0..self.set.num_bands() {
            let mut nodes = Vec::with_capacity(n);
            let mut weights = Vec::with_capacity(n);
            for (theta, w) in rule.mapped(0.0, PI) {
                let (x, d) = self.theta_density(j, theta);
                nodes.push(x);
                weights.push(w * d);
            }
            self.band_masses.push(weights.iter().sum());
            self.band_rules.push(QuadRule { nodes, weights });
        }
        self.points_per_band = n;
    }

    /// Point of band `j` at angle `theta ∈ [0, π]` and the density of `μ_K`
    /// with respect to `dθ` there.
    pub fn theta_density(&self, j: usize, theta: f64) -> (f64, f64) {
        let (a, b) = self.set.bands()[j];
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let x = mid - half * theta.cos();
        let num: f64 = self.gap_zeros.iter().map(|z| (x - z).abs()).product();
        let den = product_abs_excluding(&self.endpoints, x, &[2 * j, 2 * j + 1]).sqrt();
        (x, num / (PI * den))
    }

    fn theta_of(&self, j: usize, x: f64) -> f64 {
        let (a, b) = self.set.bands()[j];
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        ((mid - x) / half).clamp(-1.0, 1.0).acos()
    }

    pub fn set(&self) -> &IntervalSet {
        &self.set
    }

    pub fn gap_zeros(&self) -> &[f64] {
        &self.gap_zeros
    }

    /// Natural log of the capacity, from the default anchor.
    pub fn log_capacity(&self) -> f64 {
        self.log_capacity
    }

    pub fn capacity(&self) -> f64 {
        self.log_capacity.exp()
    }

    pub fn band_rules(&self) -> &[QuadRule] {
        &self.band_rules
    }

    pub fn band_masses(&self) -> &[f64] {
        &self.band_masses
    }

    pub fn points_per_band(&self) -> usize {
        self.points_per_band
    }

    /// Right hull endpoint plus one.
    pub fn default_anchor(&self) -> f64 {
        self.set.hull().1 + 1.0
    }

    /// Rebuilds with at least `n` points per band, or clones if already there.
    pub fn with_min_points(&self, n: usize) -> Result<EquilibriumData> {
        if self.points_per_band >= n {
            return Ok(self.clone());
        }
        equilibrium(&self.set, n.min(MAX_QUAD_POINTS))
    }

    /// `log Cap(K) = ∫ log|z₀ - ζ| dμ_K(ζ) - g_K(z₀)` for an anchor outside the hull.
    pub fn log_capacity_at(&self, anchor: f64) -> Result<f64> {
        let (a, b) = self.set.hull();
        if (a..=b).contains(&anchor) || !anchor.is_finite() {
            return Err(Error::InvalidArgument(format!("capacity anchor {anchor} lies inside the hull [{a}, {b}]")));
        }
        let potential = self.integrate_dmu(|x| (anchor - x).abs().ln())?;
        Ok(potential - self.green(anchor))
    }

    /// Equilibrium density with respect to Lebesgue measure (zero off the set).
    pub fn density(&self, x: f64) -> f64 {
        if self.set.band_of(x).is_none() {
            return 0.0;
        }
        let num: f64 = self.gap_zeros.iter().map(|z| (x - z).abs()).product();
        let den: f64 = self.endpoints.iter().map(|e| (x - e).abs()).product();
        num / (PI * den.sqrt())
    }

    /// `∫ f dμ_K` with the stored band rules.
    pub fn integrate_dmu<F: FnMut(f64) -> f64>(&self, mut f: F) -> Result<f64> {
        let mut acc = 0.0;
        for rule in &self.band_rules {
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                let v = f(x);
                if !v.is_finite() {
                    return Err(Error::Quadrature(format!("integrand is {v} at node {x}")));
                }
                acc += w * v;
            }
        }
        Ok(acc)
    }

    /// `∫ f dμ_K` by adaptive refinement in the angle variable, for
    /// integrands with integrable singularities at band endpoints.
    pub fn integrate_dmu_adaptive<F: FnMut(f64) -> f64>(&self, mut f: F, rel_tol: f64) -> f64 {
        (0..self.set.num_bands())
            .map(|j| {
                adaptive(
                    |theta| {
                        let (x, d) = self.theta_density(j, theta);
                        f(x) * d
                    },
                    0.0,
                    PI,
                    rel_tol,
                    1e-300,
                )
            })
            .sum()
    }

    /// `μ_K([lo, hi])`.
    pub fn measure_of(&self, lo: f64, hi: f64) -> f64 {
        let mut acc = 0.0;
        for (j, &(a, b)) in self.set.bands().iter().enumerate() {
            let (u, v) = (lo.max(a), hi.min(b));
            if u >= v {
                continue;
            }
            let (t0, t1) = (self.theta_of(j, u), self.theta_of(j, v));
            acc += adaptive(|t| self.theta_density(j, t).1, t0, t1, 1e-14, 1e-300);
        }
        acc
    }

    /// Logarithmic potential `∫ log|x - ζ| dμ_K(ζ)`, valid on and off the set.
    pub fn log_potential(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (j, &(a, b)) in self.set.bands().iter().enumerate() {
            if (a..=b).contains(&x) {
                // |x - y| = 2·half·|sin((θ+θx)/2)·sin((θ-θx)/2)| avoids cancellation near x
                let half = 0.5 * (b - a);
                let tx = self.theta_of(j, x);
                let f = |t: f64| {
                    let d = self.theta_density(j, t).1;
                    let diff = 2.0 * half * (0.5 * (t + tx)).sin().abs() * (0.5 * (t - tx)).sin().abs();
                    if diff == 0.0 {
                        0.0
                    } else {
                        diff.ln() * d
                    }
                };
                acc += adaptive(f, 0.0, tx, 1e-14, 1e-300) + adaptive(f, tx, PI, 1e-14, 1e-300);
            } else {
                let f = |t: f64| {
                    let (y, d) = self.theta_density(j, t);
                    (x - y).abs().ln() * d
                };
                acc += adaptive(f, 0.0, PI, 1e-14, 1e-300);
            }
        }
        acc
    }

    /// Green function of the complement with pole at infinity; zero on the set.
    pub fn green(&self, x: f64) -> f64 {
        if self.set.contains(x) || !x.is_finite() {
            return if x.is_finite() { 0.0 } else { f64::INFINITY };
        }
        let (lo, hi) = self.set.hull();
        let last = self.endpoints.len() - 1;
        let edge = if x > hi {
            last
        } else if x < lo {
            0
        } else {
            let gap = self
                .set
                .gaps()
                .into_iter()
                .find(|g| g.left < x && x < g.right)
                .expect("point off the set inside the hull lies in a gap");
            if x - gap.left <= gap.right - x {
                2 * gap.index + 1
            } else {
                2 * gap.index + 2
            }
        };
        let e = self.endpoints[edge];
        let sign = if x > e { 1.0 } else { -1.0 };
        let upper = (x - e).abs().sqrt();
        // g' > 0 leaving the edge; it changes sign at the gap zero
        let orientation = self.gap_zeros.iter().map(|z| e - z).product::<f64>().signum();
        adaptive(
            |s| {
                let t = e + sign * s * s;
                let num: f64 = self.gap_zeros.iter().map(|z| t - z).product();
                let den = product_abs_excluding(&self.endpoints, t, &[edge]).sqrt();
                2.0 * orientation * num / den
            },
            0.0,
            upper,
            1e-14,
            1e-300,
        )
    }

    /// Green-function values at the gap critical points and their sum.
    pub fn pw_data(&self) -> PwData {
        let critical_values: Vec<f64> = self.gap_zeros.iter().map(|&z| self.green(z)).collect();
        let pw_sum = critical_values.iter().sum();
        PwData { critical_values, pw_sum }
    }
}

/// Free-function form of [`EquilibriumData::log_capacity_at`].
pub fn log_capacity(eq: &EquilibriumData, anchor: f64) -> Result<f64> {
    eq.log_capacity_at(anchor)
}

pub fn green(eq: &EquilibriumData, x: f64) -> f64 {
    eq.green(x)
}

pub fn pw_data(eq: &EquilibriumData) -> PwData {
    eq.pw_data()
}

pub fn integrate_dmu<F: FnMut(f64) -> f64>(eq: &EquilibriumData, f: F) -> Result<f64> {
    eq.integrate_dmu(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn eq_of(bands: &[(f64, f64)]) -> EquilibriumData {
        equilibrium(&IntervalSet::new(bands).unwrap(), DEFAULT_QUAD_POINTS).unwrap()
    }

    #[test]
    fn single_interval_is_arcsine() {
        let eq = eq_of(&[(-1.0, 1.0)]);
        assert!(eq.gap_zeros().is_empty());
        assert_abs_diff_eq!(eq.band_masses()[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eq.density(0.3), 1.0 / (PI * (1.0f64 - 0.09).sqrt()), epsilon = 1e-14);
        assert_abs_diff_eq!(eq.log_capacity(), 0.5f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(eq.integrate_dmu(|x| x * x).unwrap(), 0.5, epsilon = 1e-13);
        assert_abs_diff_eq!(eq.integrate_dmu(|x| 1.0 - x * x).unwrap(), 0.5, epsilon = 1e-13);
        assert_eq!(eq.green(0.3), 0.0);
        assert_abs_diff_eq!(eq.green(2.0), (2.0 + 3f64.sqrt()).ln(), epsilon = 1e-13);
        assert_eq!(eq.pw_data(), PwData { critical_values: vec![], pw_sum: 0.0 });
    }

    #[test]
    fn symmetric_two_band() {
        let eq = eq_of(&[(-1.0, -0.5), (0.5, 1.0)]);
        assert_abs_diff_eq!(eq.gap_zeros()[0], 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(eq.band_masses()[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(eq.band_masses()[1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(eq.capacity(), 0.75f64.sqrt() / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eq.green(0.0), 0.5 * 3f64.ln(), epsilon = 1e-12);
        let pw = eq.pw_data();
        assert_abs_diff_eq!(pw.pw_sum, 0.5 * 3f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn capacity_is_anchor_independent() {
        let eq = eq_of(&[(-1.0, -0.6), (-0.2, 0.1), (0.4, 0.9)]);
        let a1 = eq.log_capacity_at(eq.default_anchor()).unwrap();
        let a2 = eq.log_capacity_at(eq.default_anchor() + 1.0).unwrap();
        let a3 = eq.log_capacity_at(-3.0).unwrap();
        assert_abs_diff_eq!(a1, a2, epsilon = 1e-11);
        assert_abs_diff_eq!(a1, a3, epsilon = 1e-11);
        assert!(eq.log_capacity_at(0.0).is_err());
    }

    #[test]
    fn rejects_tiny_quadrature() {
        let set = IntervalSet::interval(-1.0, 1.0).unwrap();
        assert!(equilibrium(&set, 4).is_err());
    }

    #[test]
    fn integrate_rejects_non_finite() {
        let eq = eq_of(&[(-1.0, 1.0)]);
        assert!(eq.integrate_dmu(|x| 1.0 / (x - x)).is_err());
    }

    #[test]
    fn frostman_on_the_set() {
        let eq = eq_of(&[(-1.0, -0.4), (0.1, 0.3), (0.6, 1.0)]);
        for &(a, b) in eq.set().bands() {
            for s in [0.0, 0.13, 0.5, 0.91, 1.0] {
                let x = a + s * (b - a);
                assert_abs_diff_eq!(eq.log_potential(x), eq.log_capacity(), epsilon = 1e-9);
            }
        }
        // off the set the potential exceeds log Cap by exactly the Green function
        for x in [-0.2, -0.05, 0.45, 0.55, 1.5, -3.0] {
            assert_abs_diff_eq!(eq.log_potential(x) - eq.log_capacity(), eq.green(x), epsilon = 1e-9);
        }
    }
}
