//! Problem configuration and its JSON file format.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::loss::LossModel;
use crate::model::mollifier::Mollifier;
use crate::model::signal::SignalModel;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MollifierConfig {
    pub width: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Number of intervals of the uniform `pi` grid.
    pub n_space: usize,
    /// Number of intervals of the uniform time grid.
    pub n_time: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub paths: usize,
    pub dt: f64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPointConfig {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub loss: LossModel,
    pub signal: SignalModel,
    pub mollifier: MollifierConfig,
    /// Observation cost per unit time.
    pub c: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub prior: f64,
    pub grid: GridConfig,
    pub mc: McConfig,
    pub fixed_point: FixedPointConfig,
}

impl Default for ProblemConfig {
    /// Cross-entropy loss, `lambda0 = 1`, `lambda1 = 0`, `c = 0.1`, `T = 5`, prior 1/2.
    fn default() -> Self {
        ProblemConfig {
            loss: LossModel::CrossEntropy,
            signal: SignalModel {
                lambda0: 1.0,
                lambda1: 0.0,
            },
            mollifier: MollifierConfig { width: 0.5 },
            c: 0.1,
            horizon: 5.0,
            prior: 0.5,
            grid: GridConfig {
                n_space: 1000,
                n_time: 1000,
            },
            mc: McConfig {
                paths: 100_000,
                dt: 0.005,
                seed: 20_240_601,
            },
            fixed_point: FixedPointConfig {
                damping: 0.5,
                tol: 1e-3,
                max_iter: 50,
            },
        }
    }
}

impl ProblemConfig {
    pub fn validate(&self) -> Result<()> {
        self.loss.validate()?;
        self.signal.validate()?;
        Mollifier::new(self.mollifier.width)?;
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("c", self.c)?;
        positive("T", self.horizon)?;
        positive("mc.dt", self.mc.dt)?;
        positive("fixed_point.tol", self.fixed_point.tol)?;
        if !(self.prior > 0.0 && self.prior < 1.0) {
            return Err(Error::Config(format!("prior must lie in (0, 1), got {}", self.prior)));
        }
        if self.grid.n_space < 2 || self.grid.n_time < 2 {
            return Err(Error::Config("grid.n_space and grid.n_time must be at least 2".into()));
        }
        if self.mc.paths < 2 {
            return Err(Error::Config("mc.paths must be at least 2".into()));
        }
        if self.fixed_point.max_iter < 1 {
            return Err(Error::Config("fixed_point.max_iter must be at least 1".into()));
        }
        if self.mc.dt > self.horizon / 10.0 {
            return Err(Error::Config(format!("mc.dt must not exceed T/10, got {}", self.mc.dt)));
        }
        let rho = self.fixed_point.damping;
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::Config(format!(
                "fixed_point.damping must lie in (0, 1], got {rho}"
            )));
        }
        Ok(())
    }

    pub fn mollifier(&self) -> Result<Mollifier> {
        Mollifier::new(self.mollifier.width)
    }

    /// Parses and validates a JSON document.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<Self> {
        let cfg: ProblemConfig = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file and applies `key=value` overrides (dotted keys,
    /// JSON-parsed values) before validation.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut value: Value = serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        for item in overrides {
            apply_override(&mut value, item)?;
        }
        Self::from_value(value)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

/// Applies a single `a.b.c=value` override to a JSON tree.
pub fn apply_override(root: &mut Value, item: &str) -> Result<()> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{item}` is not key=value")))?;
    let parsed: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::Config(format!("override key `{key}` walks into a non-object")))?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), parsed);
            return Ok(());
        }
        node = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Err(Error::Config(format!("empty override key in `{item}`")))
}
