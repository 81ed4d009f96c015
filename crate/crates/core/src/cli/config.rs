use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::hamiltonians::ModelParams;
use crate::suites::SuiteConfig;

pub const SEED_ENV: &str = "OPTOMECH_SEED";

/// Observables that `evolve` can record.
pub const OBSERVABLE_CATALOG: [&str; 4] = ["n_a", "n_b", "sz", "x_b"];

/// One run's settings: a flat JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Physical parameters, stored under their own flat keys.
    #[serde(skip)]
    pub params: ModelParams,
    pub n_cavity: usize,
    pub n_mech: usize,
    /// `None` lets the model decide.
    pub has_qubit: Option<bool>,
    pub buffer_cav: usize,
    pub buffer_mech: usize,
    /// Propagation length; defaults to ten mechanical periods.
    pub t_max: Option<f64>,
    /// RK4 step; defaults to a thousandth of a mechanical period.
    pub dt: Option<f64>,
    pub record_every: usize,
    pub observables: Vec<String>,
    pub seed: u64,
    /// Sampled times per time-dependent identity.
    pub n_times: usize,
    /// Evaluation time for `build` on time-dependent models.
    pub t_eval: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_points: usize,
    pub s_max: u32,
    /// Default output path, overridden by `--out`.
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: ModelParams::default(),
            n_cavity: 8,
            n_mech: 24,
            has_qubit: None,
            buffer_cav: 1,
            buffer_mech: 4,
            t_max: None,
            dt: None,
            record_every: 100,
            observables: vec!["n_a".into(), "n_b".into()],
            seed: 1,
            n_times: 10,
            t_eval: 0.0,
            alpha_min: 0.0,
            alpha_max: 0.3,
            alpha_points: 4,
            s_max: 2,
            out: None,
        }
    }
}

impl RunConfig {
    /// Every key a config document may contain.
    pub fn known_keys() -> BTreeSet<String> {
        RunConfig::default().to_map().keys().cloned().collect()
    }

    fn param_keys() -> BTreeSet<String> {
        object(serde_json::to_value(ModelParams::default())).keys().cloned().collect()
    }

    /// The flat document: parameter keys next to run settings.
    pub fn to_map(&self) -> Map<String, Value> {
        let mut map = object(serde_json::to_value(self));
        map.extend(object(serde_json::to_value(self.params)));
        map
    }

    /// Parse a JSON document, rejecting unknown keys.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let Value::Object(map) = value else {
            return Err(Error::Config("config must be a JSON object".into()));
        };
        Self::from_map(map)
    }

    pub fn from_map(map: Map<String, Value>) -> Result<Self> {
        let known = Self::known_keys();
        let unknown: Vec<&str> = map.keys().filter(|k| !known.contains(*k)).map(String::as_str).collect();
        if !unknown.is_empty() {
            return Err(Error::Config(format!("unknown key(s): {}", unknown.join(", "))));
        }
        let param_keys = Self::param_keys();
        let (params, rest): (Map<String, Value>, Map<String, Value>) =
            map.into_iter().partition(|(k, _)| param_keys.contains(k));
        let mut cfg: RunConfig =
            serde_json::from_value(Value::Object(rest)).map_err(|e| Error::Config(e.to_string()))?;
        cfg.params = serde_json::from_value(Value::Object(params)).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Config file (or defaults), then the seed override from the environment.
    pub fn load(path: Option<&Path>, seed_override: Option<&str>) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
                Self::from_json(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(raw) = seed_override {
            cfg.seed = raw
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{SEED_ENV} = `{raw}` is not an unsigned integer")))?;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.n_cavity < 2 || self.n_mech < 2 {
            return Err(Error::Config(format!(
                "dimensions must be ≥ 2 (n_cavity = {}, n_mech = {})",
                self.n_cavity, self.n_mech
            )));
        }
        if self.buffer_cav >= self.n_cavity || self.buffer_mech >= self.n_mech {
            return Err(Error::Config("buffers leave no interior".into()));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::Config(format!("dt = {dt} must be > 0")));
            }
        }
        if let Some(t) = self.t_max {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("t_max = {t} must be > 0")));
            }
        }
        let mut seen = BTreeSet::new();
        for name in &self.observables {
            if !OBSERVABLE_CATALOG.contains(&name.as_str()) {
                return Err(Error::Config(format!(
                    "unknown observable `{name}`; valid observables: {}",
                    OBSERVABLE_CATALOG.join(", ")
                )));
            }
            if !seen.insert(name) {
                return Err(Error::Config(format!("observable `{name}` listed twice")));
            }
        }
        if !(self.alpha_min >= 0.0 && self.alpha_max >= self.alpha_min && self.alpha_max.is_finite()) {
            return Err(Error::Config(format!(
                "alpha grid [{}, {}] must satisfy 0 ≤ alpha_min ≤ alpha_max",
                self.alpha_min, self.alpha_max
            )));
        }
        if self.alpha_points == 0 {
            return Err(Error::Config("alpha_points must be ≥ 1".into()));
        }
        if !self.t_eval.is_finite() {
            return Err(Error::Config("t_eval must be finite".into()));
        }
        Ok(())
    }

    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.params.omega_m
    }

    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or(1e-3 * self.period())
    }

    pub fn t_max(&self) -> f64 {
        self.t_max.unwrap_or(10.0 * self.period())
    }

    pub fn alpha_grid(&self) -> Vec<f64> {
        linspace(self.alpha_min, self.alpha_max, self.alpha_points)
    }

    pub fn suite_config(&self) -> SuiteConfig {
        SuiteConfig {
            params: self.params,
            n_cavity: self.n_cavity,
            n_mech: self.n_mech,
            seed: self.seed,
            n_times: self.n_times,
            buffer_cav: self.buffer_cav,
            buffer_mech: self.buffer_mech,
            dt_periods: self.dt() / self.period(),
        }
    }

    /// Copy with one top-level key replaced, type-checked through serde.
    pub fn with_value(&self, key: &str, value: f64) -> Result<Self> {
        let mut map = self.to_map();
        if !map.contains_key(key) {
            return Err(Error::Config(format!("sweep key `{key}` is not a config key")));
        }
        let number = if value.fract() == 0.0 && value.abs() < 9.0e15 {
            Value::from(value as i64)
        } else {
            serde_json::Number::from_f64(value)
                .map(Value::Number)
                .ok_or_else(|| Error::Config(format!("sweep value {value} is not finite")))?
        };
        map.insert(key.to_string(), number);
        Self::from_map(map).map_err(|e| Error::Config(format!("sweep {key} = {value}: {e}")))
    }
}

fn object(v: serde_json::Result<Value>) -> Map<String, Value> {
    match v {
        Ok(Value::Object(map)) => map,
        _ => unreachable!("config structs serialize to objects"),
    }
}

/// `n` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        // the last point is pinned so sweeps end exactly at `stop`
        _ => {
            (0..n).map(|i| if i + 1 == n { stop } else { start + (stop - start) * i as f64 / (n - 1) as f64 }).collect()
        }
    }
}

/// Parsed `KEY=START:STOP:N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub key: String,
    pub start: f64,
    pub stop: f64,
    pub n: usize,
}

impl Sweep {
    pub fn parse(raw: &str) -> Result<Self> {
        let bad = || Error::Config(format!("sweep `{raw}` must look like KEY=START:STOP:N"));
        let (key, range) = raw.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        let [start, stop, n] = parts.as_slice() else {
            return Err(bad());
        };
        let start: f64 = start.trim().parse().map_err(|_| bad())?;
        let stop: f64 = stop.trim().parse().map_err(|_| bad())?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        if key.trim().is_empty() || n == 0 || !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        Ok(Sweep { key: key.trim().to_string(), start, stop, n })
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.n)
    }
}
