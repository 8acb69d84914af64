//! Monic orthogonal polynomials and L2 Widom factors for generalized Jacobi
//! measures `dμ = (1 - T)^α (1 + T)^β dμ_K`, where `T` maps a reference hull
//! (by default [-1, 1]) onto [-1, 1].
//!
//! Recurrence data come from the Stieltjes procedure on the discrete measure
//! given by the equilibrium band rules; [`gram_oracle`] recomputes the norms
//! from Hankel moment matrices as an independent check.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::chebyshev::WeightSpec;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::potential::{EquilibriumData, MAX_QUAD_POINTS};
use crate::quadrature::adaptive;

/// Largest degree accepted by [`gram_oracle`].
pub const GRAM_MAX_DEGREE: usize = 12;

/// Relative agreement required between successive quadrature refinements.
const REFINE_TOL: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct JacobiOnEq {
    eq: EquilibriumData,
    alpha: u32,
    beta: u32,
    reference_hull: (f64, f64),
}

impl JacobiOnEq {
    /// `(1 - x)^α (1 + x)^β dμ_K`.
    pub fn new(eq: &EquilibriumData, alpha: u32, beta: u32) -> Result<Self> {
        Self::with_reference(eq, alpha, beta, (-1.0, 1.0))
    }

    pub fn with_reference(eq: &EquilibriumData, alpha: u32, beta: u32, reference_hull: (f64, f64)) -> Result<Self> {
        let (a, b) = reference_hull;
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument(format!("degenerate reference hull [{a}, {b}]")));
        }
        if alpha + beta > 0 {
            let (lo, hi) = eq.set().hull();
            let slack = 1e-12 * (b - a).max(1.0);
            if lo < a - slack || hi > b + slack {
                return Err(Error::InvalidArgument(format!(
                    "set hull [{lo}, {hi}] is not inside the reference hull [{a}, {b}]"
                )));
            }
        }
        Ok(Self { eq: eq.clone(), alpha, beta, reference_hull })
    }

    /// The measure `w² dμ_K` for a weight `w`.
    pub fn from_weight(eq: &EquilibriumData, weight: &WeightSpec) -> Result<Self> {
        let (alpha, beta, hull) = weight.jacobi_form();
        Self::with_reference(eq, alpha, beta, hull)
    }

    pub fn eq(&self) -> &EquilibriumData {
        &self.eq
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    pub fn reference_hull(&self) -> (f64, f64) {
        self.reference_hull
    }

    /// `(1 - T(x))^α (1 + T(x))^β`.
    pub fn factor(&self, x: f64) -> f64 {
        let (a, b) = self.reference_hull;
        let t = (2.0 * x - a - b) / (b - a);
        (1.0 - t).powi(self.alpha as i32) * (1.0 + t).powi(self.beta as i32)
    }

    /// Both reference endpoints belong to the set.
    pub fn contains_reference_endpoints(&self) -> bool {
        let (a, b) = self.reference_hull;
        let (lo, hi) = self.eq.set().hull();
        let slack = 1e-12 * (b - a);
        (lo - a).abs() <= slack && (hi - b).abs() <= slack
    }

    fn discrete(&self) -> (Vec<f64>, Vec<f64>) {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for rule in self.eq.band_rules() {
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                nodes.push(x);
                weights.push(w * self.factor(x));
            }
        }
        (nodes, weights)
    }

    fn refined(&self, points: usize) -> Result<Self> {
        Ok(Self { eq: self.eq.with_min_points(points)?, ..self.clone() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthoData {
    pub alpha: u32,
    pub beta: u32,
    /// `a_0 … a_{n-1}` in `P_{k+1} = (x - a_k) P_k - b_k P_{k-1}`.
    pub a: Vec<f64>,
    /// `b_1 … b_n`, with `b_k = N_k / N_{k-1}`.
    pub b: Vec<f64>,
    /// Squared norms `N_0 … N_n`.
    pub norms: Vec<f64>,
    /// `[W_{2,k}]² = N_k / Cap^{2k}` for `k = 0 … n`.
    pub widom2_sq: Vec<f64>,
    pub entropy: f64,
    pub capacity: f64,
    pub points_per_band: usize,
}

impl OrthoData {
    pub fn degree(&self) -> usize {
        self.a.len()
    }

    pub fn widom2(&self, k: usize) -> f64 {
        self.widom2_sq[k].sqrt()
    }

    /// Monic `P_k` in the monomial basis.
    pub fn polynomial(&self, k: usize) -> Poly {
        assert!(k <= self.degree(), "degree {k} beyond computed range {}", self.degree());
        let mut prev = Poly::constant(0.0);
        let mut cur = Poly::constant(1.0);
        for j in 0..k {
            let shifted = cur.mul(&Poly::new(vec![-self.a[j], 1.0]));
            let next = if j == 0 { shifted } else { shifted.sub(&prev.scale(self.b[j - 1])) };
            prev = cur;
            cur = next;
        }
        cur
    }
}

/// Recurrence coefficients, norms and Widom factors up to degree `n`.
///
/// The band rules are doubled until the last norm agrees between successive
/// rules to about 1e-13 relative.
pub fn stieltjes(measure: &JacobiOnEq, n: usize) -> Result<OrthoData> {
    if n == 0 {
        return Err(Error::InvalidArgument("stieltjes needs n >= 1".into()));
    }
    let needed = n + (measure.alpha + measure.beta) as usize / 2 + 2;
    let mut current = measure.refined(needed)?;
    let mut data = stieltjes_discrete(&current, n)?;
    loop {
        let points = current.eq.points_per_band();
        if points >= MAX_QUAD_POINTS {
            break;
        }
        let finer = current.refined(2 * points)?;
        let next = stieltjes_discrete(&finer, n)?;
        let close = data.norms.iter().zip(&next.norms).all(|(x, y)| (x - y).abs() <= REFINE_TOL * y.abs());
        current = finer;
        data = next;
        if close {
            break;
        }
    }
    data.entropy = entropy(&current)?;
    Ok(data)
}

fn stieltjes_discrete(measure: &JacobiOnEq, n: usize) -> Result<OrthoData> {
    let (x, w) = measure.discrete();
    let mut prev = vec![0.0; x.len()];
    let mut cur = vec![1.0; x.len()];
    let mut norms = vec![w.iter().sum::<f64>()];
    let mut a = Vec::with_capacity(n);
    let mut b: Vec<f64> = Vec::with_capacity(n);
    for k in 0..n {
        let nk = norms[k];
        let ak = x.iter().zip(&w).zip(&cur).map(|((x, w), p)| w * x * p * p).sum::<f64>() / nk;
        let bk = if k == 0 { 0.0 } else { b[k - 1] };
        let next: Vec<f64> = x.iter().zip(&cur).zip(&prev).map(|((x, p), q)| (x - ak) * p - bk * q).collect();
        let nk1: f64 = w.iter().zip(&next).map(|(w, p)| w * p * p).sum();
        if !(nk1 > 0.0) || !nk1.is_finite() {
            return Err(Error::Quadrature(format!(
                "squared norm N_{} = {nk1:e} is not positive; refine the quadrature",
                k + 1
            )));
        }
        a.push(ak);
        b.push(nk1 / nk);
        norms.push(nk1);
        prev = cur;
        cur = next;
    }
    let log_cap = measure.eq.log_capacity();
    let widom2_sq = norms.iter().enumerate().map(|(k, nk)| (nk.ln() - 2.0 * k as f64 * log_cap).exp()).collect();
    Ok(OrthoData {
        alpha: measure.alpha,
        beta: measure.beta,
        a,
        b,
        norms,
        widom2_sq,
        entropy: f64::NAN,
        capacity: measure.eq.capacity(),
        points_per_band: measure.eq.points_per_band(),
    })
}

/// `S(μ) = exp ∫ log((1 - T)^α (1 + T)^β) dμ_K`.
///
/// Evaluated as `Cap_ref^{α+β}·exp(α g(b) + β g(a))`, where `[a, b]` is the
/// reference hull and `Cap_ref` the capacity of `T(K)`; this reduces to
/// `Cap^{α+β}` when both reference endpoints lie in `K`. The value is
/// cross-checked against adaptive quadrature of the logarithmic integrand.
pub fn entropy(measure: &JacobiOnEq) -> Result<f64> {
    let (alpha, beta) = (measure.alpha as f64, measure.beta as f64);
    if alpha + beta == 0.0 {
        return Ok(1.0);
    }
    let eq = &measure.eq;
    let (ra, rb) = measure.reference_hull;
    let log_cap_ref = eq.log_capacity() + (2.0 / (rb - ra)).ln();
    let log_s = (alpha + beta) * log_cap_ref + alpha * eq.green(rb) + beta * eq.green(ra);
    let s = log_s.exp();

    let direct = entropy_quadrature(measure).exp();
    if (direct - s).abs() > 1e-6 * s {
        return Err(Error::Numerical(format!(
            "entropy cross-check diverges: closed form {s:e}, quadrature {direct:e}"
        )));
    }
    Ok(s)
}

/// `∫ (α log|1 - T| + β log|1 + T|) dμ_K` by adaptive quadrature in the
/// angle variable. Distances to the reference endpoints are split as
/// (reference endpoint to band endpoint) + (band endpoint to node), the
/// latter in closed trigonometric form, so nothing cancels near `±1`.
pub fn entropy_quadrature(measure: &JacobiOnEq) -> f64 {
    let (alpha, beta) = (measure.alpha as f64, measure.beta as f64);
    let (ra, rb) = measure.reference_hull;
    let scale = 2.0 / (rb - ra);
    let eq = &measure.eq;
    eq.set()
        .bands()
        .iter()
        .enumerate()
        .map(|(j, &(a, b))| {
            let half = 0.5 * (b - a);
            let integrand = |theta: f64| {
                let d = eq.theta_density(j, theta).1;
                let s = (0.5 * theta).sin();
                let c = (0.5 * theta).cos();
                let to_right = (rb - b) + 2.0 * half * c * c;
                let to_left = (a - ra) + 2.0 * half * s * s;
                let mut v = 0.0;
                if alpha > 0.0 {
                    v += alpha * (scale * to_right).ln();
                }
                if beta > 0.0 {
                    v += beta * (scale * to_left).ln();
                }
                if v.is_finite() {
                    v * d
                } else {
                    0.0
                }
            };
            adaptive(integrand, 0.0, PI, 1e-14, 1e-300)
        })
        .sum()
}

/// Squared norms `N_0 … N_n` from Cholesky pivots of the Hankel moment
/// matrix, i.e. `N_k = det H_{k+1} / det H_k`.
///
/// Moments are taken in the hull-centred variable `t ∈ [-1, 1]` for
/// conditioning and rescaled afterwards.
pub fn gram_oracle(measure: &JacobiOnEq, n: usize) -> Result<Vec<f64>> {
    if n > GRAM_MAX_DEGREE {
        return Err(Error::InvalidArgument(format!("gram oracle limited to n <= {GRAM_MAX_DEGREE}, got {n}")));
    }
    let needed = n + (measure.alpha + measure.beta) as usize / 2 + 2;
    let fine = measure.refined((4 * needed).max(measure.eq.points_per_band()))?;
    let (x, w) = fine.discrete();
    let (lo, hi) = measure.eq.set().hull();
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let mut moments = vec![0.0; 2 * n + 1];
    for (&xi, &wi) in x.iter().zip(&w) {
        let t = (xi - mid) / half;
        let mut p = wi;
        for m in moments.iter_mut() {
            *m += p;
            p *= t;
        }
    }
    let hankel = DMatrix::from_fn(n + 1, n + 1, |i, j| moments[i + j]);
    let chol = hankel.cholesky().ok_or_else(|| {
        Error::Numerical(format!("Hankel moment matrix of order {} has a non-positive leading minor", n + 1))
    })?;
    let l = chol.l();
    Ok((0..=n).map(|k| l[(k, k)] * l[(k, k)] * half.powi(2 * k as i32)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval_sets::IntervalSet;
    use crate::potential::equilibrium;
    use approx::assert_abs_diff_eq;

    fn eq_of(bands: &[(f64, f64)]) -> EquilibriumData {
        equilibrium(&IntervalSet::new(bands).unwrap(), 64).unwrap()
    }

    #[test]
    fn chebyshev_measure_on_interval() {
        let eq = eq_of(&[(-1.0, 1.0)]);
        let m = JacobiOnEq::new(&eq, 0, 0).unwrap();
        let d = stieltjes(&m, 3).unwrap();
        assert_abs_diff_eq!(d.norms[0], 1.0, epsilon = 1e-13);
        for k in 1..=3 {
            assert_abs_diff_eq!(d.norms[k], 2f64.powi(1 - 2 * k as i32), epsilon = 1e-14);
            assert_abs_diff_eq!(d.widom2_sq[k], 2.0, epsilon = 1e-12);
        }
        assert_eq!(d.entropy, 1.0);
    }

    #[test]
    fn second_kind_norms() {
        let eq = eq_of(&[(-1.0, 1.0)]);
        let m = JacobiOnEq::new(&eq, 1, 1).unwrap();
        let d = stieltjes(&m, 2).unwrap();
        for k in 0..=2 {
            assert_abs_diff_eq!(d.norms[k], 2f64.powi(-2 * k as i32 - 1), epsilon = 1e-14);
        }
        assert_abs_diff_eq!(d.widom2_sq[2], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(d.entropy, 0.25, epsilon = 1e-12);
        let p2 = d.polynomial(2);
        assert_abs_diff_eq!(p2.coeffs()[0], -0.25, epsilon = 1e-13);
        assert_abs_diff_eq!(p2.coeffs()[1], 0.0, epsilon = 1e-13);
    }

    #[test]
    fn gram_matches_arcsine_moments() {
        let eq = eq_of(&[(-1.0, 1.0)]);
        let norms = gram_oracle(&JacobiOnEq::new(&eq, 0, 0).unwrap(), 4).unwrap();
        assert_abs_diff_eq!(norms[0], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(norms[1], 0.5, epsilon = 1e-13);
        // (1 + x) dμ_K: monic V_k/2^k with N_k = 4^{-k}, so [W_{2,k}]² = 1 = 2S
        let norms = gram_oracle(&JacobiOnEq::new(&eq, 0, 1).unwrap(), 5).unwrap();
        for (k, nk) in norms.iter().enumerate() {
            assert_abs_diff_eq!(*nk, 4f64.powi(-(k as i32)), epsilon = 1e-12);
        }
    }

    #[test]
    fn entropy_without_reference_endpoints() {
        // K = [-0.5, 0.5]: ∫ log(1+x) dμ_K = log Cap + g(-1)
        let eq = eq_of(&[(-0.5, 0.5)]);
        let m = JacobiOnEq::new(&eq, 0, 1).unwrap();
        let cap: f64 = 0.25;
        let g = (2.0f64 + 3f64.sqrt()).ln();
        assert_abs_diff_eq!(entropy(&m).unwrap(), cap * g.exp(), epsilon = 1e-12);
    }

    #[test]
    fn orthogonality_on_three_bands() {
        let eq = eq_of(&[(-1.0, -0.6), (-0.3, 0.2), (0.5, 1.0)]);
        let m = JacobiOnEq::new(&eq, 2, 1).unwrap();
        let d = stieltjes(&m, 6).unwrap();
        let (x, w) = m.refined(512).unwrap().discrete();
        for j in 0..=6 {
            for k in 0..j {
                let (pj, pk) = (d.polynomial(j), d.polynomial(k));
                let ip: f64 = x.iter().zip(&w).map(|(&x, &w)| w * pj.eval(x) * pk.eval(x)).sum();
                assert!(ip.abs() <= 1e-9 * (d.norms[j] * d.norms[k]).sqrt(), "<P_{j}, P_{k}> = {ip:e}");
            }
        }
        for k in 1..=6 {
            assert!((d.norms[k] / d.norms[k - 1] - d.b[k - 1]).abs() <= 1e-10 * d.b[k - 1]);
        }
    }
}
