//! TOML job configuration.
//!
//! ```toml
//! degrees = [1, 2, 3]
//!
//! [set]
//! bands = [[-1.0, -0.5], [0.5, 1.0]]
//!
//! [weight]
//! variant = "sqrt_one_plus"
//!
//! [tolerances]
//! remez = 1e-12
//!
//! [output]
//! format = "csv"
//! ```
//!
//! The set may instead be `[set.preimage]` (`variant`, `coeffs`) or
//! `[set.affine]` (`target_hull` plus `bands` or a nested `preimage`, mapped
//! increasingly from [-1, 1]). Unknown keys are rejected.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chebyshev::WeightSpec;
use crate::error::{Error, Result};
use crate::interval_sets::{affine_map, IntervalSet};
use crate::preimage::{build_set, parse_rational, PreimageSpec, PreimageVariant, DEFAULT_ROOT_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub degrees: Vec<usize>,
    pub set: SetConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bands: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preimage: Option<PreimageConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affine: Option<AffineConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreimageConfig {
    pub variant: PreimageVariant,
    /// Coefficients of `S`, constant term first.
    pub coeffs: Vec<Coeff>,
}

/// A coefficient written as an integer, a decimal, or a rational string such as `"-3/20"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineConfig {
    pub target_hull: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bands: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preimage: Option<PreimageConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightVariant {
    Unit,
    SqrtOnePlus,
    SqrtOneMinus,
    SqrtOneMinusSq,
    JacobiRoot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub variant: WeightVariant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_hull: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_remez")]
    pub remez: f64,
    #[serde(default = "default_mass")]
    pub mass: f64,
    #[serde(default = "default_verify")]
    pub verify: f64,
}

fn default_remez() -> f64 {
    1e-12
}

fn default_mass() -> f64 {
    1e-10
}

fn default_verify() -> f64 {
    1e-7
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { remez: default_remez(), mass: default_mass(), verify: default_verify() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
    /// Destination file; standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

/// The set described by a config, with the preimage spec it came from.
#[derive(Debug, Clone)]
pub struct ResolvedSet {
    pub set: IntervalSet,
    pub spec: Option<PreimageSpec>,
    /// Hull the reference problem was mapped onto, for `[set.affine]`.
    pub target_hull: Option<(f64, f64)>,
}

impl JobConfig {
    /// Parses and validates; TOML diagnostics carry line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let config: JobConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(pos) = self.degrees.iter().position(|&n| n == 0) {
            return Err(Error::Config(format!("degrees[{pos}]: degree must be at least 1")));
        }
        let t = &self.tolerances;
        for (name, v) in [("remez", t.remez), ("mass", t.mass), ("verify", t.verify)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("tolerances.{name}: must be positive, got {v}")));
            }
        }
        let s = &self.set;
        let count = [s.bands.is_some(), s.preimage.is_some(), s.affine.is_some()].iter().filter(|&&b| b).count();
        if count != 1 {
            return Err(Error::Config(format!(
                "set: exactly one of bands, preimage, affine is required (found {count})"
            )));
        }
        if let Some(affine) = &s.affine {
            if affine.bands.is_some() == affine.preimage.is_some() {
                return Err(Error::Config("set.affine: exactly one of bands, preimage is required".into()));
            }
        }
        if let Some(w) = &self.weight {
            let jacobi = w.variant == WeightVariant::JacobiRoot;
            if !jacobi && (w.alpha.is_some() || w.beta.is_some() || w.reference_hull.is_some()) {
                return Err(Error::Config(
                    "weight: alpha, beta and reference_hull are only allowed with variant = \"jacobi_root\"".into(),
                ));
            }
            if jacobi && (w.alpha.is_none() || w.beta.is_none()) {
                return Err(Error::Config("weight: jacobi_root needs alpha and beta".into()));
            }
        }
        Ok(())
    }

    /// SHA-256 of the raw config text, hex encoded.
    pub fn hash(text: &str) -> String {
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn resolve_set(&self) -> Result<ResolvedSet> {
        let s = &self.set;
        if let Some(bands) = &s.bands {
            return Ok(ResolvedSet { set: bands_to_set(bands, "set.bands")?, spec: None, target_hull: None });
        }
        if let Some(p) = &s.preimage {
            let spec = p.to_spec("set.preimage")?;
            let set = build_set(&spec, DEFAULT_ROOT_TOL)?.set;
            return Ok(ResolvedSet { set, spec: Some(spec), target_hull: None });
        }
        let affine = s.affine.as_ref().ok_or_else(|| Error::Config("set: missing".into()))?;
        let target = (affine.target_hull[0], affine.target_hull[1]);
        if !(target.0 < target.1) {
            return Err(Error::Config(format!("set.affine.target_hull: need a < b, got {target:?}")));
        }
        let (reference, spec) = match (&affine.bands, &affine.preimage) {
            (Some(bands), _) => (bands_to_set(bands, "set.affine.bands")?, None),
            (_, Some(p)) => {
                let spec = p.to_spec("set.affine.preimage")?;
                (build_set(&spec, DEFAULT_ROOT_TOL)?.set, Some(spec))
            }
            _ => return Err(Error::Config("set.affine: missing reference".into())),
        };
        Ok(ResolvedSet { set: affine_map(&reference, (-1.0, 1.0), target)?, spec, target_hull: Some(target) })
    }

    /// The configured weight; without `[weight]` it is the preimage spec's
    /// weight (transported to the target hull for affine sets) or unit.
    pub fn resolve_weight(&self, resolved: &ResolvedSet) -> Result<WeightSpec> {
        let weight = match &self.weight {
            Some(w) => match w.variant {
                WeightVariant::Unit => WeightSpec::Unit,
                WeightVariant::SqrtOnePlus => WeightSpec::SqrtOnePlus,
                WeightVariant::SqrtOneMinus => WeightSpec::SqrtOneMinus,
                WeightVariant::SqrtOneMinusSq => WeightSpec::SqrtOneMinusSq,
                WeightVariant::JacobiRoot => {
                    let hull = match (w.reference_hull, resolved.target_hull) {
                        (Some([a, b]), _) => (a, b),
                        (None, Some(h)) => h,
                        (None, None) => (-1.0, 1.0),
                    };
                    WeightSpec::JacobiRoot {
                        alpha: w.alpha.unwrap_or(0),
                        beta: w.beta.unwrap_or(0),
                        reference_hull: hull,
                    }
                }
            },
            None => match (&resolved.spec, resolved.target_hull) {
                (Some(spec), Some(hull)) => {
                    let (alpha, beta) = spec.variant().exponents();
                    WeightSpec::JacobiRoot { alpha, beta, reference_hull: hull }
                }
                (Some(spec), None) => spec.weight(),
                (None, _) => WeightSpec::Unit,
            },
        };
        weight.validate(&resolved.set).map_err(|e| Error::Config(format!("weight: {e}")))?;
        Ok(weight)
    }
}

impl PreimageConfig {
    pub fn to_spec(&self, field: &str) -> Result<PreimageSpec> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let text = match c {
                    Coeff::Int(v) => v.to_string(),
                    Coeff::Float(v) => v.to_string(),
                    Coeff::Text(s) => s.clone(),
                };
                parse_rational(&text).map_err(|e| Error::Config(format!("{field}.coeffs[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        PreimageSpec::new(self.variant, coeffs).map_err(|e| Error::Config(format!("{field}: {e}")))
    }
}

fn bands_to_set(bands: &[[f64; 2]], field: &str) -> Result<IntervalSet> {
    let pairs: Vec<(f64, f64)> = bands.iter().map(|b| (b[0], b[1])).collect();
    IntervalSet::new(&pairs).map_err(|e| Error::Config(format!("{field}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_set_form() {
        let c = JobConfig::parse("degrees = [1, 2]\n[set]\nbands = [[-1.0, 1.0]]\n").unwrap();
        assert_eq!(c.degrees, vec![1, 2]);
        assert_eq!(c.tolerances, Tolerances::default());

        let c = JobConfig::parse("[set.preimage]\nvariant = \"one_plus\"\ncoeffs = [\"-3/20\", 3]\n").unwrap();
        let r = c.resolve_set().unwrap();
        assert_eq!(r.spec.unwrap().degree(), 1);
        assert_eq!(c.resolve_weight(&c.resolve_set().unwrap()).unwrap(), WeightSpec::SqrtOnePlus);

        let c = JobConfig::parse(
            "[set.affine]\ntarget_hull = [0.0, 4.0]\n[set.affine.preimage]\nvariant = \"one_plus\"\ncoeffs = [0, 3]\n",
        )
        .unwrap();
        let r = c.resolve_set().unwrap();
        assert_eq!(r.set.hull().0, 0.0);
        assert_eq!(
            c.resolve_weight(&r).unwrap(),
            WeightSpec::JacobiRoot { alpha: 0, beta: 1, reference_hull: (0.0, 4.0) }
        );
    }

    #[test]
    fn rejects_bad_configs_with_field_names() {
        let unknown = JobConfig::parse("[set]\nbands = [[0.0, 1.0]]\ncolour = 3\n").unwrap_err();
        assert!(unknown.to_string().contains("colour"), "{unknown}");
        let two =
            JobConfig::parse("[set]\nbands = [[0.0, 1.0]]\n[set.preimage]\nvariant = \"one_plus\"\ncoeffs = [1]\n")
                .unwrap_err();
        assert!(two.to_string().contains("exactly one"), "{two}");
        let zero = JobConfig::parse("degrees = [0]\n[set]\nbands = [[0.0, 1.0]]\n").unwrap_err();
        assert!(zero.to_string().contains("degrees[0]"), "{zero}");
        let tol = JobConfig::parse("[set]\nbands = [[0.0, 1.0]]\n[tolerances]\nverify = -1.0\n").unwrap_err();
        assert!(tol.to_string().contains("tolerances.verify"), "{tol}");
        let domain = JobConfig::parse("[set]\nbands = [[0.0, 2.0]]\n[weight]\nvariant = \"sqrt_one_minus\"\n").unwrap();
        assert!(domain.resolve_weight(&domain.resolve_set().unwrap()).is_err());
    }

    #[test]
    fn serialization_is_idempotent() {
        let text = "degrees = [3, 1]\n[set.preimage]\nvariant = \"one_minus\"\ncoeffs = [\"-1\", 2, 4.5]\n\
                    [weight]\nvariant = \"jacobi_root\"\nalpha = 1\nbeta = 0\n[output]\nformat = \"json\"\n";
        let once = JobConfig::parse(text).unwrap().to_toml().unwrap();
        let twice = JobConfig::parse(&once).unwrap().to_toml().unwrap();
        assert_eq!(once, twice);
        assert_eq!(JobConfig::parse(&once).unwrap(), JobConfig::parse(text).unwrap());
    }
}
