//! Experiment configuration file: a flat JSON document with an exhaustive
//! key set. Unknown keys are rejected so typos never pass silently.

use serde::Deserialize;

use reftrend_core::dsl::FunctionSpec;
use reftrend_core::error::Error as CoreError;
use reftrend_core::estimator::IncrementConvention;
use reftrend_core::experiments::{BandwidthRule, ExperimentConfig};
use reftrend_core::kernels::{KernelFamily, KernelSpec};
use reftrend_core::reflect::TubeSpec;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(rename = "H")]
    pub hurst: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub n: usize,
    pub x0: f64,
    pub drift: RawDrift,
    pub tube: RawTube,
    pub kernel: RawKernel,
    pub epsilons: Vec<f64>,
    pub bandwidth: RawBandwidth,
    pub replications: usize,
    pub seed: u64,
    #[serde(default)]
    pub eval_times: Option<Vec<f64>>,
    #[serde(default)]
    pub increment_convention: Option<IncrementConvention>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum RawDrift {
    Source(String),
    Full {
        expr: String,
        #[serde(default)]
        lipschitz: Option<f64>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTube {
    pub lower: String,
    pub upper: String,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum RawKernel {
    Name(String),
    Full {
        name: String,
        #[serde(default)]
        support: Option<[f64; 2]>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum RawBandwidth {
    Rule(String),
    Fixed { fixed: f64 },
}

impl RawConfig {
    /// Validate and convert into the core experiment configuration,
    /// collecting non-fatal warnings (declared Lipschitz violations,
    /// non-C^1 boundaries).
    pub fn build(&self) -> Result<(ExperimentConfig, Vec<String>), CoreError> {
        let mut warnings = Vec::new();

        let (drift_src, lipschitz) = match &self.drift {
            RawDrift::Source(s) => (s.as_str(), None),
            RawDrift::Full { expr, lipschitz } => (expr.as_str(), *lipschitz),
        };
        let mut drift = FunctionSpec::parse(drift_src, "x")
            .map_err(|e| annotate(e, "drift"))?;
        if let Some(l) = lipschitz {
            drift = drift.with_declared_lipschitz(l)?;
        }

        let lower = FunctionSpec::parse(&self.tube.lower, "t")
            .map_err(|e| annotate(e, "tube.lower"))?;
        let upper = FunctionSpec::parse(&self.tube.upper, "t")
            .map_err(|e| annotate(e, "tube.upper"))?;
        let tube = TubeSpec::new(lower, upper);
        warnings.extend(tube.c1_warnings());

        let kernel = match &self.kernel {
            RawKernel::Name(name) => KernelSpec::new(KernelFamily::parse_name(name)?),
            RawKernel::Full { name, support } => {
                let family = KernelFamily::parse_name(name)?;
                match support {
                    Some([lo, hi]) => KernelSpec::with_support(family, *lo, *hi)?,
                    None => KernelSpec::new(family),
                }
            }
        };

        let bandwidth = match &self.bandwidth {
            RawBandwidth::Rule(name) if name == "power" => BandwidthRule::Power,
            RawBandwidth::Rule(name) => {
                return Err(CoreError::InvalidConfig(format!(
                    "bandwidth: unknown rule `{name}`; expected \"power\" or {{\"fixed\": h}}"
                )))
            }
            RawBandwidth::Fixed { fixed } => BandwidthRule::Fixed(*fixed),
        };

        let cfg = ExperimentConfig {
            hurst: self.hurst,
            horizon: self.horizon,
            steps: self.n,
            x0: self.x0,
            drift,
            tube,
            kernel,
            epsilons: self.epsilons.clone(),
            bandwidth,
            replications: self.replications,
            master_seed: self.seed,
            eval_times: self.eval_times.clone(),
            convention: self.increment_convention.unwrap_or_default(),
        };
        cfg.validate()?;

        // sample the declared drift bound over a range covering the tube
        if cfg.drift.declared_lipschitz().is_some() {
            if let Ok(grid) = reftrend_core::grid::Grid::new(cfg.steps, cfg.horizon) {
                if let Ok(tg) = cfg.tube.discretize(&grid) {
                    let lo = tg.lower.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
                    let hi = tg.upper.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1.0;
                    if let Some(w) = cfg.drift.check_declared_lipschitz(lo, hi, 512) {
                        warnings.push(format!(
                            "drift: sampled slope {:.4} at x = {:.4} exceeds declared \
                             Lipschitz bound {:.4}",
                            w.observed, w.at, w.declared
                        ));
                    }
                }
            }
        }

        Ok((cfg, warnings))
    }
}

fn annotate(e: CoreError, key: &str) -> CoreError {
    match e {
        CoreError::Syntax { offset, expected } => CoreError::InvalidConfig(format!(
            "{key}: syntax error at byte {offset}: expected {expected}"
        )),
        CoreError::UnknownIdentifier { name, offset } => CoreError::InvalidConfig(format!(
            "{key}: unknown identifier `{name}` at byte {offset}"
        )),
        CoreError::EmptySource => {
            CoreError::InvalidConfig(format!("{key}: empty expression source"))
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
    {
      "H": 0.75, "T": 1.0, "n": 128, "x0": 1.0,
      "drift": "-x",
      "tube": {"lower": "-2", "upper": "2"},
      "kernel": "triangular",
      "epsilons": [0.25, 0.125],
      "bandwidth": "power",
      "replications": 4,
      "seed": 7
    }"#;

    #[test]
    fn minimal_config_parses_and_builds() {
        let raw: RawConfig = serde_json::from_str(BASE).unwrap();
        let (cfg, warnings) = raw.build().unwrap();
        assert_eq!(cfg.steps, 128);
        assert!(warnings.is_empty());
    }

    #[test]
    fn unknown_top_level_key_rejected() {
        let doc = BASE.replace("\"seed\": 7", "\"seed\": 7, \"sedd\": 1");
        let err = serde_json::from_str::<RawConfig>(&doc).unwrap_err();
        assert!(err.to_string().contains("sedd"), "{err}");
    }

    #[test]
    fn kernel_with_support_and_fixed_bandwidth() {
        let doc = BASE
            .replace(
                "\"kernel\": \"triangular\"",
                "\"kernel\": {\"name\": \"box\", \"support\": [0.0, 1.0]}",
            )
            .replace("\"bandwidth\": \"power\"", "\"bandwidth\": {\"fixed\": 0.125}");
        let raw: RawConfig = serde_json::from_str(&doc).unwrap();
        let (cfg, _) = raw.build().unwrap();
        assert_eq!(cfg.kernel.support(), (0.0, 1.0));
        assert_eq!(cfg.bandwidth_for(0.25), 0.125);
    }

    #[test]
    fn bad_drift_names_the_key_and_offset() {
        let doc = BASE.replace("\"-x\"", "\"2 +\"");
        let raw: RawConfig = serde_json::from_str(&doc).unwrap();
        let err = raw.build().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("drift") && msg.contains("byte 3"), "{msg}");
    }

    #[test]
    fn lipschitz_violation_is_a_warning_not_error() {
        let doc = BASE.replace(
            "\"drift\": \"-x\"",
            "\"drift\": {\"expr\": \"x^2\", \"lipschitz\": 0.5}",
        );
        let raw: RawConfig = serde_json::from_str(&doc).unwrap();
        let (_, warnings) = raw.build().unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("Lipschitz"));
    }

    #[test]
    fn unknown_bandwidth_rule_rejected() {
        let doc = BASE.replace("\"power\"", "\"adaptive\"");
        let raw: RawConfig = serde_json::from_str(&doc).unwrap();
        assert!(raw.build().is_err());
    }
}
