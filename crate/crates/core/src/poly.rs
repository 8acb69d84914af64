//! Real polynomials in the monomial basis and Chebyshev series on an interval.

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

/// Polynomial with coefficients in ascending powers of `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The monic polynomial with the given roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots.iter().fold(Self::constant(1.0), |acc, &r| acc.mul(&Self::new(vec![-r, 1.0])))
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().expect("nonempty")
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex<f64>) -> Complex<f64> {
        self.coeffs.iter().rev().fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(0.0);
        }
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeffs.get(k).unwrap_or(&0.0) + other.coeffs.get(k).unwrap_or(&0.0)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// `p(scale·x + shift)`.
    pub fn compose_affine(&self, scale: f64, shift: f64) -> Self {
        let inner = Self::new(vec![shift, scale]);
        self.coeffs.iter().rev().fold(Self::constant(0.0), |acc, &c| acc.mul(&inner).add(&Self::constant(c)))
    }

    /// `p(-x)`.
    pub fn reflect(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().map(|(k, &c)| if k % 2 == 1 { -c } else { c }).collect())
    }

    /// All complex roots: companion-matrix eigenvalues refined by Newton steps.
    pub fn roots(&self) -> Vec<Complex<f64>> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = self.leading();
        let mut companion = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            companion[(i, n - 1)] = -self.coeffs[i] / lead;
        }
        let deriv = self.derivative();
        let mut roots: Vec<Complex<f64>> = companion
            .complex_eigenvalues()
            .iter()
            .map(|&z| {
                let mut z = z;
                for _ in 0..8 {
                    let d = deriv.eval_complex(z);
                    if d.norm() == 0.0 {
                        break;
                    }
                    let step = self.eval_complex(z) / d;
                    let next = z - step;
                    if !next.re.is_finite() || !next.im.is_finite() {
                        break;
                    }
                    // accept only improving steps; multiple roots stall Newton
                    if self.eval_complex(next).norm() > self.eval_complex(z).norm() {
                        break;
                    }
                    z = next;
                    if step.norm() <= 1e-16 * z.norm().max(1.0) {
                        break;
                    }
                }
                z
            })
            .collect();
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        roots
    }

    /// Cauchy bound on the modulus of every root.
    pub fn root_bound(&self) -> f64 {
        let lead = self.leading().abs();
        1.0 + self.coeffs[..self.degree()].iter().map(|c| c.abs() / lead).fold(0.0, f64::max)
    }
}

/// Chebyshev series `Σ c_i T_i(t)` with `t = (2x - a - b)/(b - a)` on a hull `[a, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebSeries {
    coeffs: Vec<f64>,
    hull: (f64, f64),
}

impl ChebSeries {
    pub fn new(coeffs: Vec<f64>, hull: (f64, f64)) -> Self {
        assert!(!coeffs.is_empty());
        Self { coeffs, hull }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn hull(&self) -> (f64, f64) {
        self.hull
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn to_unit(&self, x: f64) -> f64 {
        (2.0 * x - self.hull.0 - self.hull.1) / (self.hull.1 - self.hull.0)
    }

    /// Coefficient on `T_n(t)` that makes the degree-`n` series monic in `x`.
    pub fn monic_lead(n: usize, hull: (f64, f64)) -> f64 {
        if n == 0 {
            return 1.0;
        }
        let half = 0.5 * (hull.1 - hull.0);
        half.powi(n as i32) / 2f64.powi(n as i32 - 1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        clenshaw(&self.coeffs, self.to_unit(x))
    }

    /// Converts to the monomial basis in `x`.
    pub fn to_poly(&self) -> Poly {
        let (a, b) = self.hull;
        let t = Poly::new(vec![-(a + b) / (b - a), 2.0 / (b - a)]);
        let mut prev = Poly::constant(1.0);
        let mut acc = prev.scale(self.coeffs[0]);
        if self.coeffs.len() == 1 {
            return acc;
        }
        let mut cur = t.clone();
        acc = acc.add(&cur.scale(self.coeffs[1]));
        let two_t = t.scale(2.0);
        for &c in &self.coeffs[2..] {
            let next = two_t.mul(&cur).sub(&prev);
            acc = acc.add(&next.scale(c));
            prev = cur;
            cur = next;
        }
        acc
    }
}

/// Evaluates `Σ c_i T_i(t)`.
pub fn clenshaw(coeffs: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + coeffs[0]
}

/// Values `T_0(t), …, T_n(t)`.
pub fn chebyshev_t_values(n: usize, t: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if n == 0 {
        return;
    }
    out.push(t);
    for k in 2..=n {
        let v = 2.0 * t * out[k - 1] - out[k - 2];
        out.push(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn roots_of_cubic() {
        // 9x^3 + 9x^2 - 1
        let p = Poly::new(vec![-1.0, 0.0, 9.0, 9.0]);
        let r = p.roots();
        assert_eq!(r.len(), 3);
        for z in &r {
            assert!(z.im.abs() < 1e-12);
            assert!(p.eval(z.re).abs() < 1e-13);
        }
        assert_abs_diff_eq!(r[0].re, -0.844_03, epsilon = 1e-4);
    }

    #[test]
    fn cheb_series_to_poly_matches_eval() {
        let s = ChebSeries::new(vec![0.3, -1.2, 0.5, 2.0], (0.0, 4.0));
        let p = s.to_poly();
        for x in [0.0, 0.7, 2.2, 4.0] {
            assert_abs_diff_eq!(s.eval(x), p.eval(x), epsilon = 1e-12);
        }
    }

    #[test]
    fn monic_lead_gives_unit_leading_coefficient() {
        for n in 1..8 {
            let hull = (-0.3, 2.1);
            let mut c = vec![0.0; n + 1];
            c[n] = ChebSeries::monic_lead(n, hull);
            let p = ChebSeries::new(c, hull).to_poly();
            assert_abs_diff_eq!(p.leading(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn compose_and_reflect() {
        let p = Poly::new(vec![1.0, 2.0, 3.0]);
        let q = p.compose_affine(2.0, -1.0);
        assert_abs_diff_eq!(q.eval(0.4), p.eval(-0.2), epsilon = 1e-14);
        assert_abs_diff_eq!(p.reflect().eval(0.7), p.eval(-0.7), epsilon = 1e-14);
    }
}
