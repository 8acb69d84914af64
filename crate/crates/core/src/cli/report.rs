//! Report model and its text, CSV and JSON renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::chebyshev::WeightSpec;
use crate::error::{Error, Result};

use super::config::Tolerances;

pub const CSV_HEADER: &str = "n,t_n,widom_inf,lower,upper,norm2,widom2_sq,two_S,eq_sup,eq_l2";

/// Slack allowed on the sup-norm bounds before a row is marked FAILED.
pub const SUP_SLACK: f64 = 1e-8;
/// Slack allowed on the L2 lower bounds before a row is marked FAILED.
pub const L2_SLACK: f64 = 1e-9;

/// One degree of a Chebyshev and/or orthogonal-polynomial computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub n: usize,
    pub t_n: Option<f64>,
    pub widom_inf: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub norm2: Option<f64>,
    pub widom2_sq: Option<f64>,
    pub two_s: Option<f64>,
    pub eq_sup: Option<bool>,
    pub eq_l2: Option<bool>,
    /// A proven inequality is violated beyond slack.
    pub failed: bool,
}

impl Row {
    /// Marks the row FAILED if `lower ≤ W∞ ≤ upper` or `W2² ≥ S`
    /// (`≥ 2S` when `improved`) is violated.
    pub fn check(&mut self, improved: bool) {
        let mut failed = false;
        if let Some(w) = self.widom_inf {
            failed |= self.lower.is_some_and(|l| l - SUP_SLACK > w);
            failed |= self.upper.is_some_and(|u| w > u + SUP_SLACK);
        }
        if let (Some(w2), Some(two_s)) = (self.widom2_sq, self.two_s) {
            let bound = if improved { two_s } else { 0.5 * two_s };
            failed |= w2 < bound - L2_SLACK;
        }
        self.failed = failed;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    /// SHA-256 of the config text, or `builtin` for the embedded suite.
    pub config_hash: String,
    pub tolerances: Tolerances,
    /// Remez iterations per row.
    pub iterations: Vec<usize>,
    /// Quadrature points per band of the equilibrium measure.
    pub quad_points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub subcommand: String,
    pub set: Vec<[f64; 2]>,
    pub weight: Option<WeightSpec>,
    pub summary: Vec<Quantity>,
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
    /// `(x, g_K(x))` samples for the green subcommand.
    pub curve: Vec<[f64; 2]>,
    pub provenance: Provenance,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.rows.iter().all(|r| !r.failed)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Numerical(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("report: {e}")))
    }

    /// Rows as CSV; reports without rows list their summary as `quantity,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if self.rows.is_empty() {
            out.push_str("quantity,value\n");
            for q in &self.summary {
                let _ = writeln!(out, "{},{}", q.name, num(q.value));
            }
            return out;
        }
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let fields = [
                r.n.to_string(),
                opt(r.t_n),
                opt(r.widom_inf),
                opt(r.lower),
                opt(r.upper),
                opt(r.norm2),
                opt(r.widom2_sq),
                opt(r.two_s),
                flag(r.eq_sup),
                flag(r.eq_l2),
            ];
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let bands: Vec<String> = self.set.iter().map(|[a, b]| format!("[{a}, {b}]")).collect();
        let _ = writeln!(out, "widomlab {}", self.subcommand);
        if !bands.is_empty() {
            let _ = writeln!(out, "set: {}", bands.join(" u "));
        }
        if let Some(w) = &self.weight {
            let _ = writeln!(out, "weight: {}", weight_label(w));
        }
        if !self.summary.is_empty() {
            out.push('\n');
            let width = self.summary.iter().map(|q| q.name.len()).max().unwrap_or(0);
            for q in &self.summary {
                let _ = writeln!(out, "{:<width$}  {}", q.name, num(q.value));
            }
        }
        if !self.rows.is_empty() {
            out.push('\n');
            let header =
                ["n", "t_n", "widom_inf", "lower", "upper", "norm2", "widom2_sq", "two_S", "eq_sup", "eq_l2", "status"];
            let _ = writeln!(
                out,
                "{:>3} {:>23} {:>23} {:>23} {:>23} {:>23} {:>23} {:>23} {:>6} {:>6} {}",
                header[0],
                header[1],
                header[2],
                header[3],
                header[4],
                header[5],
                header[6],
                header[7],
                header[8],
                header[9],
                header[10]
            );
            for r in &self.rows {
                let _ = writeln!(
                    out,
                    "{:>3} {:>23} {:>23} {:>23} {:>23} {:>23} {:>23} {:>23} {:>6} {:>6} {}",
                    r.n,
                    dash(r.t_n),
                    dash(r.widom_inf),
                    dash(r.lower),
                    dash(r.upper),
                    dash(r.norm2),
                    dash(r.widom2_sq),
                    dash(r.two_s),
                    dash_flag(r.eq_sup),
                    dash_flag(r.eq_l2),
                    if r.failed { "FAILED" } else { "ok" }
                );
            }
        }
        if !self.checks.is_empty() {
            out.push('\n');
            for c in &self.checks {
                let _ = writeln!(
                    out,
                    "[{}] {} (deviation {:.3e}, tolerance {:.1e})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.deviation,
                    c.tolerance
                );
            }
        }
        if !self.curve.is_empty() {
            let _ = writeln!(out, "\n{} samples of g_K (use --format json for values)", self.curve.len());
        }
        let p = &self.provenance;
        let _ = writeln!(out, "\nwidomlab {} config {}", p.version, p.config_hash);
        let _ = writeln!(
            out,
            "tolerances: remez {:e}, mass {:e}, verify {:e}",
            p.tolerances.remez, p.tolerances.mass, p.tolerances.verify
        );
        if let Some(q) = p.quad_points {
            let _ = writeln!(out, "quadrature points per band: {q}");
        }
        if !p.iterations.is_empty() {
            let its: Vec<String> = p.iterations.iter().map(|i| i.to_string()).collect();
            let _ = writeln!(out, "remez iterations: {}", its.join(" "));
        }
        out
    }
}

pub fn weight_label(w: &WeightSpec) -> String {
    match w {
        WeightSpec::Unit => "unit".into(),
        WeightSpec::SqrtOnePlus => "sqrt(1 + x)".into(),
        WeightSpec::SqrtOneMinus => "sqrt(1 - x)".into(),
        WeightSpec::SqrtOneMinusSq => "sqrt(1 - x^2)".into(),
        WeightSpec::JacobiRoot { alpha, beta, reference_hull: (a, b) } => {
            format!("sqrt((1 - T)^{alpha} (1 + T)^{beta}), T maps [{a}, {b}] onto [-1, 1]")
        }
    }
}

/// 17 significant digits; negative zero prints as zero.
pub fn num(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn flag(x: Option<bool>) -> String {
    x.map(|b| b.to_string()).unwrap_or_default()
}

fn dash(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "-".into())
}

fn dash_flag(x: Option<bool>) -> String {
    x.map(|b| b.to_string()).unwrap_or_else(|| "-".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(widom_inf: f64, lower: f64, upper: f64, w2: f64, two_s: f64) -> Row {
        Row {
            n: 1,
            t_n: Some(1.0),
            widom_inf: Some(widom_inf),
            lower: Some(lower),
            upper: Some(upper),
            norm2: Some(1.0),
            widom2_sq: Some(w2),
            two_s: Some(two_s),
            eq_sup: None,
            eq_l2: None,
            failed: false,
        }
    }

    #[test]
    fn failed_rows() {
        let mut r = row(1.5, 1.0, 2.0, 1.0, 1.0);
        r.check(true);
        assert!(!r.failed);
        let mut r = row(0.9, 1.0, 2.0, 1.0, 1.0);
        r.check(true);
        assert!(r.failed);
        let mut r = row(1.5, 1.0, 2.0, 0.8, 1.0);
        r.check(true);
        assert!(r.failed);
        r.check(false);
        assert!(!r.failed);
    }

    #[test]
    fn csv_leaves_missing_columns_empty() {
        let mut r = row(1.5, 1.0, 2.0, 1.0, 1.0);
        r.upper = None;
        r.eq_sup = Some(true);
        let report = Report {
            subcommand: "chebyshev".into(),
            set: vec![[-1.0, 1.0]],
            weight: None,
            summary: vec![],
            rows: vec![r],
            checks: vec![],
            curve: vec![],
            provenance: Provenance {
                version: "0".into(),
                config_hash: "x".into(),
                tolerances: Tolerances::default(),
                iterations: vec![],
                quad_points: None,
            },
        };
        let csv = report.to_csv();
        let line = csv.lines().nth(1).unwrap();
        assert_eq!(line.split(',').count(), 10);
        assert!(line.contains(",,"));
        assert!(line.ends_with("true,"));
        assert_eq!(Report::from_json(&report.to_json().unwrap()).unwrap(), report);
    }
}
