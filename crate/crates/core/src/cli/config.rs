use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{
    gaussian_set, generate_level, noon_set, werner_set, ObservabilityPolicy, StateSource, StringSet,
};
use crate::pipeline::{
    assemblage_scenario, gaussian_scenario, noon_scenario, werner_scenario, Scenario,
    ScenarioSource,
};
use crate::scenarios::{
    assemblage_from_json, random_unsteerable_assemblage, two_mode_squeezed_std_form,
    GaussianStdForm,
};

/// Version tag of the run-configuration schema.
pub const CONFIG_SCHEMA_VERSION: u32 = 1;

/// Scenario family and parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScenarioSpec {
    /// Two-qubit Werner state with Pauli measurements.
    Werner { w: f64 },
    /// Lossy N00N state. `alice_sign = −1` negates Alice's outcome labels.
    Noon {
        #[serde(default = "one_u32")]
        n: u32,
        eta: f64,
        #[serde(default = "six")]
        d: usize,
        #[serde(default)]
        window: Option<usize>,
        #[serde(default)]
        alice_sign: Option<f64>,
    },
    /// Gaussian standard form, either explicit `(a, b, c1, c2)` or the
    /// two-mode squeezed vacuum with squeezing `r`.
    GaussianStd {
        #[serde(default)]
        r: Option<f64>,
        #[serde(default)]
        a: Option<f64>,
        #[serde(default)]
        b: Option<f64>,
        #[serde(default)]
        c1: Option<f64>,
        #[serde(default)]
        c2: Option<f64>,
    },
    /// Assemblage document on disk (relative paths resolve against the
    /// configuration file).
    AssemblageFile { path: PathBuf },
    /// Random unsteerable assemblage drawn with the run seed.
    RandomUnsteerable {
        n_inputs: usize,
        n_outcomes: usize,
        dim_b: usize,
        n_lambda: usize,
    },
}

fn one_u32() -> u32 {
    1
}

fn six() -> usize {
    6
}

/// Choice of string set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StringSetSpec {
    /// All strings up to length `k`.
    Level { k: usize },
    /// A named set: `werner`, `noon` or `gaussian`.
    Named { name: String },
}

/// A complete run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Schema version.
    pub version: u32,
    /// Data.
    pub scenario: ScenarioSpec,
    /// String set; defaults to the scenario's own set (level 2 for
    /// assemblages).
    #[serde(default)]
    pub string_set: Option<StringSetSpec>,
    /// Observability policy.
    #[serde(default)]
    pub policy: ObservabilityPolicy,
    /// Solver tolerance (overridden by `--tol`).
    #[serde(default)]
    pub tol: Option<f64>,
    /// Seed for randomized scenarios (overridden by `--seed`).
    #[serde(default)]
    pub seed: Option<u64>,
}

impl RunConfig {
    /// Parses and validates a configuration document.
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))?;
        if cfg.version != CONFIG_SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "configuration schema version {} (expected {CONFIG_SCHEMA_VERSION})",
                cfg.version
            )));
        }
        Ok(cfg)
    }

    /// Reads a configuration file.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_json(&std::fs::read_to_string(path)?)?;
        if let ScenarioSpec::AssemblageFile { path: p } = &mut cfg.scenario {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }
}

impl ScenarioSpec {
    /// Copy with the named numeric parameter replaced.
    pub fn with_param(&self, name: &str, v: f64) -> Result<Self> {
        let mut s = self.clone();
        let slot: &mut f64 = match (&mut s, name) {
            (Self::Werner { w }, "w") => w,
            (Self::Noon { eta, .. }, "eta") => eta,
            (Self::GaussianStd { r: Some(r), .. }, "r") => r,
            (Self::GaussianStd { a: Some(x), .. }, "a")
            | (Self::GaussianStd { b: Some(x), .. }, "b")
            | (Self::GaussianStd { c1: Some(x), .. }, "c1")
            | (Self::GaussianStd { c2: Some(x), .. }, "c2") => x,
            _ => {
                return Err(Error::Config(format!(
                    "parameter {name:?} cannot be scanned for this scenario"
                )))
            }
        };
        *slot = v;
        Ok(s)
    }

    /// Builds the scenario; `seed` is used by randomized families.
    pub fn build(&self, seed: u64) -> Result<Scenario> {
        match self {
            Self::Werner { w } => werner_scenario(*w),
            Self::Noon {
                n,
                eta,
                d,
                window,
                alice_sign,
            } => {
                let sc = noon_scenario(*n, *eta, *d, window.unwrap_or(*d))?;
                match alice_sign {
                    None => Ok(sc),
                    Some(s) if *s == 1.0 => Ok(sc),
                    Some(s) if *s == -1.0 => relabel_alice(sc, -1.0),
                    Some(s) => Err(Error::Config(format!("alice_sign must be ±1, got {s}"))),
                }
            }
            Self::GaussianStd { r, a, b, c1, c2 } => {
                let g = match (r, a, b, c1, c2) {
                    (Some(r), None, None, None, None) => two_mode_squeezed_std_form(*r)?,
                    (None, Some(a), Some(b), Some(c1), Some(c2)) => {
                        GaussianStdForm::new(*a, *b, *c1, *c2)?
                    }
                    _ => {
                        return Err(Error::Config(
                            "gaussian-std needs either r or all of a, b, c1, c2".into(),
                        ))
                    }
                };
                gaussian_scenario(g)
            }
            Self::AssemblageFile { path } => {
                let asm = assemblage_from_json(&std::fs::read_to_string(path)?)?;
                assemblage_scenario(
                    &format!("assemblage-file({})", path.display()),
                    asm,
                    None,
                    2,
                )
            }
            Self::RandomUnsteerable {
                n_inputs,
                n_outcomes,
                dim_b,
                n_lambda,
            } => {
                let (asm, _) =
                    random_unsteerable_assemblage(*n_inputs, *n_outcomes, *dim_b, *n_lambda, seed)?;
                assemblage_scenario(&format!("random-unsteerable(seed={seed})"), asm, None, 2)
            }
        }
    }
}

impl StringSetSpec {
    /// Resolves the set for a scenario.
    pub fn resolve(&self, scenario: &Scenario) -> Result<StringSet> {
        match self {
            Self::Level { k } => Ok(generate_level(
                scenario.source.moments().n_inputs(),
                scenario.bob.len(),
                *k,
            )),
            Self::Named { name } => match name.as_str() {
                "werner" => Ok(werner_set()),
                "noon" => Ok(noon_set()),
                "gaussian" => Ok(gaussian_set()),
                other => Err(Error::Config(format!("unknown string set {other:?}"))),
            },
        }
    }
}

/// Negates (or rescales) Alice's outcome labels of a state-based scenario.
pub fn relabel_alice(mut sc: Scenario, factor: f64) -> Result<Scenario> {
    if let ScenarioSource::State(src) = &sc.source {
        let ms = src
            .measurements()
            .iter()
            .map(|m| m.scaled(factor))
            .collect();
        let rebuilt = StateSource::new(src.state().clone(), ms, src.bob_ops().to_vec())?;
        sc.source = ScenarioSource::State(rebuilt);
        sc.id = format!("{}[alice×{factor}]", sc.id);
        Ok(sc)
    } else {
        Err(Error::Config(
            "outcome relabeling needs a state-based scenario".into(),
        ))
    }
}

/// Builds the scenario of a configuration with its string set applied.
pub fn build_scenario(cfg: &RunConfig, seed: u64) -> Result<Scenario> {
    let sc = cfg.scenario.build(seed)?;
    match &cfg.string_set {
        None => Ok(sc),
        Some(spec) => {
            let words = spec.resolve(&sc)?;
            Ok(sc.with_words(words))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects() {
        let cfg = RunConfig::from_json(
            r#"{"version":1,"scenario":{"family":"noon","eta":0.6},"policy":"local-restricted"}"#,
        )
        .unwrap();
        assert_eq!(cfg.policy, ObservabilityPolicy::LocalRestricted);
        assert!(matches!(
            cfg.scenario,
            ScenarioSpec::Noon { n: 1, d: 6, .. }
        ));
        assert!(RunConfig::from_json(
            r#"{"version":1,"scenario":{"family":"werner","w":0.5},"bogus":1}"#
        )
        .is_err());
        assert!(RunConfig::from_json(
            r#"{"version":1,"scenario":{"family":"werner","w":0.5,"x":1}}"#
        )
        .is_err());
        assert!(
            RunConfig::from_json(r#"{"version":2,"scenario":{"family":"werner","w":0.5}}"#)
                .is_err()
        );
        assert!(RunConfig::from_json(r#"{"version":1,"scenario":{"family":"nope"}}"#).is_err());
    }

    #[test]
    fn parameter_substitution() {
        let s = ScenarioSpec::Werner { w: 0.1 };
        assert_eq!(
            s.with_param("w", 0.7).unwrap(),
            ScenarioSpec::Werner { w: 0.7 }
        );
        assert!(s.with_param("eta", 0.7).is_err());
        let g = ScenarioSpec::GaussianStd {
            r: Some(0.1),
            a: None,
            b: None,
            c1: None,
            c2: None,
        };
        assert!(g.with_param("r", 0.3).unwrap().build(0).is_ok());
    }
}
