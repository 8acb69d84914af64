//! Gauss-Legendre rules and an adaptive bisection integrator.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, w * half))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn panel_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20))
}

const MAX_PANELS: usize = 20_000;

struct Panel {
    a: f64,
    b: f64,
    coarse: f64,
    fine: f64,
}

impl Panel {
    fn new<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, coarse: f64) -> (Self, f64, f64) {
        let m = 0.5 * (a + b);
        let rule = panel_rule();
        let left = rule.integrate(a, m, &mut *f);
        let right = rule.integrate(m, b, &mut *f);
        (Self { a, b, coarse, fine: left + right }, left, right)
    }

    fn error(&self) -> f64 {
        (self.fine - self.coarse).abs()
    }
}

/// Globally adaptive bisection with a 20-point Gauss-Legendre panel.
///
/// The panel with the largest error estimate (difference between the panel
/// rule and the sum over its two halves) is split until the summed estimate
/// drops below `max(rel_tol·Σ|panel|, abs_floor)` or rounding level.
/// Handles integrable endpoint singularities (logarithmic, inverse square
/// root) by geometric refinement toward them.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64, abs_floor: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let coarse = panel_rule().integrate(a, b, &mut f);
    let (root, l, r) = Panel::new(&mut f, a, b, coarse);
    let mut halves = vec![(l, r)];
    let mut panels = vec![root];
    loop {
        let total_err: f64 = panels.iter().map(Panel::error).sum();
        let scale: f64 = panels.iter().map(|p| p.fine.abs()).sum();
        let target = (rel_tol * scale).max(abs_floor).max(16.0 * f64::EPSILON * scale);
        if total_err <= target || panels.len() >= MAX_PANELS {
            break;
        }
        let worst =
            (0..panels.len()).max_by(|&i, &j| panels[i].error().total_cmp(&panels[j].error())).expect("nonempty");
        let Panel { a, b, .. } = panels[worst];
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            // cannot split further; freeze it by accepting its estimate
            panels[worst].coarse = panels[worst].fine;
            continue;
        }
        let (left, right) = halves[worst];
        let (pl, ll, lr) = Panel::new(&mut f, a, m, left);
        let (pr, rl, rr) = Panel::new(&mut f, m, b, right);
        panels[worst] = pl;
        halves[worst] = (ll, lr);
        panels.push(pr);
        halves.push((rl, rr));
    }
    panels.iter().map(|p| p.fine).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn weights_sum_to_two_and_nodes_symmetric() {
        for n in [1, 2, 7, 64, 257, 1024] {
            let r = GaussLegendre::new(n);
            let s: f64 = r.weights().iter().sum();
            assert_abs_diff_eq!(s, 2.0, epsilon = 1e-13);
            for i in 0..n {
                assert_abs_diff_eq!(r.nodes()[i], -r.nodes()[n - 1 - i], epsilon = 1e-15);
            }
            assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let r = GaussLegendre::new(6);
        for k in 0..12 {
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert_abs_diff_eq!(r.integrate(-1.0, 1.0, |x| x.powi(k)), exact, epsilon = 1e-14);
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularities() {
        // ∫_0^1 log x dx = -1, ∫_0^1 x^{-1/2} dx = 2
        let v = adaptive(|x: f64| x.ln(), 0.0, 1.0, 1e-14, 1e-16);
        assert_abs_diff_eq!(v, -1.0, epsilon = 1e-12);
        let v = adaptive(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-14, 1e-16);
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-8);
    }
}
