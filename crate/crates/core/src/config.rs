//! Run configuration: a TOML file with `[model]`, `[controller]` and `[truth]`
//! tables plus top-level run keys. Every key has a default, so an empty file
//! is a valid configuration. `section.key=value` overrides are applied on top
//! of the file before validation.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::absorption::OpticalModelConfig;
use crate::analysis::ComparisonPlan;
use crate::controller::ControllerConfig;
use crate::error::{MetrologyError, Result};
use crate::simulator::{StrategyKind, TruthConfig};

const SECTIONS: [&str; 3] = ["model", "controller", "truth"];
const RUN_KEYS: [&str; 5] = ["strategies", "k_max", "repeats", "output_dir", "seed"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: OpticalModelConfig,
    pub controller: ControllerConfig,
    pub truth: TruthConfig,
    pub strategies: Vec<StrategyKind>,
    pub k_max: usize,
    pub repeats: usize,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: OpticalModelConfig::default(),
            controller: ControllerConfig::default(),
            truth: TruthConfig::default(),
            strategies: StrategyKind::all().to_vec(),
            k_max: 30,
            repeats: 100,
            output_dir: PathBuf::from("out"),
            seed: 1,
        }
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RunKeys {
    strategies: Vec<StrategyKind>,
    k_max: usize,
    repeats: usize,
    output_dir: PathBuf,
    seed: u64,
}

impl Default for RunKeys {
    fn default() -> Self {
        let d = RunConfig::default();
        Self {
            strategies: d.strategies,
            k_max: d.k_max,
            repeats: d.repeats,
            output_dir: d.output_dir,
            seed: d.seed,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_toml_with_overrides(text, &[])
    }

    /// Parses `text`, applies `key=value` overrides, and validates.
    pub fn from_toml_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        if let Some(key) = find_empty_value(text) {
            return Err(MetrologyError::config(key, "value is empty"));
        }
        let mut table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| MetrologyError::config("config", e.message().to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg = Self::from_table(table)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            MetrologyError::config("config", format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_toml_with_overrides(&text, overrides)
    }

    /// Defaults with overrides, for runs without a config file.
    pub fn from_overrides(overrides: &[String]) -> Result<Self> {
        Self::from_toml_with_overrides("", overrides)
    }

    fn from_table(mut table: Table) -> Result<Self> {
        let model = section(&mut table, "model")?;
        let controller = section(&mut table, "controller")?;
        let mut truth: TruthConfig = section(&mut table, "truth")?;
        for key in table.keys() {
            if !RUN_KEYS.contains(&key.as_str()) {
                return Err(MetrologyError::config(key.as_str(), "unknown key"));
            }
        }
        let run: RunKeys = deserialize_named(table, "")?;
        truth.seed = run.seed;
        Ok(Self {
            model,
            controller,
            truth,
            strategies: run.strategies,
            k_max: run.k_max,
            repeats: run.repeats,
            output_dir: run.output_dir,
            seed: run.seed,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.controller.validate()?;
        self.truth.validate()?;
        if self.strategies.is_empty() {
            return Err(MetrologyError::config("strategies", "must not be empty"));
        }
        if self.k_max == 0 {
            return Err(MetrologyError::config("k_max", "must be at least 1"));
        }
        if self.repeats == 0 {
            return Err(MetrologyError::config("repeats", "must be at least 1"));
        }
        Ok(())
    }

    pub fn plan(&self) -> ComparisonPlan {
        ComparisonPlan {
            strategies: self.strategies.clone(),
            repeats: self.repeats,
            k_max: self.k_max,
            seed: self.seed,
            truth: self.truth.with_seed(self.seed),
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).unwrap_or_default()
    }
}

fn section<T: DeserializeOwned + Default>(table: &mut Table, name: &str) -> Result<T> {
    match table.remove(name) {
        None => Ok(T::default()),
        Some(Value::Table(t)) => deserialize_named(t, name),
        Some(_) => Err(MetrologyError::config(name, "expected a table")),
    }
}

/// Deserializes `t`; on failure retries key by key to name the culprit.
fn deserialize_named<T: DeserializeOwned>(t: Table, prefix: &str) -> Result<T> {
    match t.clone().try_into::<T>() {
        Ok(v) => Ok(v),
        Err(e) => {
            let qualify = |k: &str| {
                if prefix.is_empty() {
                    k.to_string()
                } else {
                    format!("{prefix}.{k}")
                }
            };
            for (k, v) in t {
                let mut single = Table::new();
                single.insert(k.clone(), v);
                if let Err(e) = single.try_into::<T>() {
                    return Err(MetrologyError::config(qualify(&k), e.message().to_string()));
                }
            }
            let field = if prefix.is_empty() { "config" } else { prefix };
            Err(MetrologyError::config(field, e.message().to_string()))
        }
    }
}

/// First `key =` line with nothing after the equals sign.
fn find_empty_value(text: &str) -> Option<String> {
    let mut section = String::new();
    for line in text.lines() {
        let line = line.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.trim().to_string();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            continue;
        };
        let key = key.trim();
        let value = value.split('#').next().unwrap_or("").trim();
        if value.is_empty() && !key.is_empty() && !key.starts_with('#') {
            return Some(if section.is_empty() {
                key.to_string()
            } else {
                format!("{section}.{key}")
            });
        }
    }
    None
}

/// Applies `key=value` or `section.key=value`. The value is read as a TOML
/// literal, falling back to a bare string.
pub fn apply_override(table: &mut Table, assignment: &str) -> Result<()> {
    let (path, raw) = assignment.split_once('=').ok_or_else(|| {
        MetrologyError::config(assignment, "override must look like key=value")
    })?;
    let path = path.trim();
    let raw = raw.trim();
    if raw.is_empty() {
        return Err(MetrologyError::config(path, "value is empty"));
    }
    let value = match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap_or(Value::String(raw.to_string())),
        Err(_) => Value::String(raw.to_string()),
    };
    let value = match (path, value) {
        ("strategies", Value::String(s)) => Value::Array(
            s.split(',').map(|x| Value::String(x.trim().to_string())).collect(),
        ),
        (_, v) => v,
    };
    match path.split_once('.') {
        Some((sec, key)) => {
            if !SECTIONS.contains(&sec) {
                return Err(MetrologyError::config(path, "unknown section"));
            }
            let entry = table
                .entry(sec.to_string())
                .or_insert_with(|| Value::Table(Table::new()));
            match entry {
                Value::Table(t) => {
                    t.insert(key.to_string(), value);
                }
                _ => return Err(MetrologyError::config(sec, "expected a table")),
            }
        }
        None => {
            table.insert(path.to_string(), value);
        }
    }
    Ok(())
}
