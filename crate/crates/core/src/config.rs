//! Scenario configuration.
//!
//! On disk a configuration is a flat JSON object with dotted keys
//! (`"bias.r2"`, `"norms.w"`, ...). Keys that are absent keep their defaults,
//! and an optional `"preset"` key names a built-in preset to start from.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::bias::BiasParams;
use crate::company::{round_count, DEFAULT_CAPACITIES, LEVELS};
use crate::error::{Error, Result};
use crate::intervention::{InterventionParams, TurnRange};
use crate::norms::NormsParams;
use crate::presets;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunControls {
    pub n_runs: u32,
    pub master_seed: u64,
    pub out_dir: Option<PathBuf>,
}

impl Default for RunControls {
    fn default() -> Self {
        Self {
            n_runs: 100,
            master_seed: 42,
            out_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Project turns per run.
    pub n_sim: u32,
    /// Share of men among initial and newly hired agents.
    pub p_male: f64,
    /// Positions per level, entry level first.
    pub capacities: [usize; LEVELS],
    /// Turns between promotion cycles.
    pub n_promotion: u32,
    pub p_leave: f64,
    /// Probability a project succeeds.
    pub p_s: f64,
    pub mu_o: f64,
    pub sigma_o: f64,
    pub mu_r: f64,
    pub sigma_r: f64,
    pub mu_st: f64,
    pub sigma_st: f64,
    pub p_individual: f64,
    pub p_stretch: f64,
    /// Turns between stretch turns.
    pub n_stretch: u32,
    pub bias: BiasParams,
    pub norms: NormsParams,
    pub intervention: InterventionParams,
    pub run: RunControls,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_sim: 480,
            p_male: 0.5,
            capacities: DEFAULT_CAPACITIES,
            n_promotion: 24,
            p_leave: 0.15,
            p_s: 0.5,
            mu_o: 50.0,
            sigma_o: 1.0,
            mu_r: 10.0,
            sigma_r: 1.0,
            mu_st: 30.0,
            sigma_st: 1.0,
            p_individual: 0.5,
            p_stretch: 0.1,
            n_stretch: 12,
            bias: BiasParams::default(),
            norms: NormsParams::default(),
            intervention: InterventionParams::default(),
            run: RunControls::default(),
        }
    }
}

/// Every key accepted in a configuration file, in output order.
pub const KEYS: &[&str] = &[
    "n_sim",
    "p_male",
    "capacities",
    "n_promotion",
    "p_leave",
    "p_s",
    "mu_o",
    "sigma_o",
    "mu_r",
    "sigma_r",
    "mu_st",
    "sigma_st",
    "p_individual",
    "p_stretch",
    "n_stretch",
    "bias.r2",
    "bias.r2_group",
    "bias.p_female",
    "bias.p_com",
    "bias.f_dis",
    "bias.on_success",
    "bias.on_failure",
    "norms.enabled",
    "norms.b_macro",
    "norms.b_macro_group",
    "norms.p_m",
    "norms.w",
    "norms.w0",
    "intervention.k",
    "intervention.i_range",
    "run.n_runs",
    "run.master_seed",
    "run.out_dir",
];

/// Keys that can be varied by a sweep.
pub fn is_sweepable(key: &str) -> bool {
    KEYS.contains(&key) && key != "capacities" && !key.starts_with("run.")
}

fn real(key: &str, v: &Value) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::invalid(key, format!("expected a number, got {v}")))
}

fn whole(key: &str, v: &Value) -> Result<u64> {
    if let Some(n) = v.as_u64() {
        return Ok(n);
    }
    match v.as_f64() {
        Some(x) if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 => Ok(x as u64),
        _ => Err(Error::invalid(key, format!("expected a non-negative integer, got {v}"))),
    }
}

fn count(key: &str, v: &Value) -> Result<u32> {
    u32::try_from(whole(key, v)?).map_err(|_| Error::invalid(key, "value too large"))
}

fn flag(key: &str, v: &Value) -> Result<bool> {
    v.as_bool()
        .ok_or_else(|| Error::invalid(key, format!("expected true or false, got {v}")))
}

fn range(key: &str, v: &Value) -> Result<TurnRange> {
    match v.as_array().map(Vec::as_slice) {
        Some([a, b]) => Ok(TurnRange {
            start: count(key, a)?,
            end: count(key, b)?,
        }),
        _ => Err(Error::invalid(key, format!("expected [start, end], got {v}"))),
    }
}

fn levels(key: &str, v: &Value) -> Result<[usize; LEVELS]> {
    let items = v
        .as_array()
        .filter(|a| a.len() == LEVELS)
        .ok_or_else(|| Error::invalid(key, format!("expected {LEVELS} level sizes, got {v}")))?;
    let mut out = [0; LEVELS];
    for (slot, item) in out.iter_mut().zip(items) {
        *slot = whole(key, item)? as usize;
    }
    Ok(out)
}

impl ScenarioConfig {
    /// Current value of a dotted key.
    pub fn get(&self, key: &str) -> Option<Value> {
        let v = match key {
            "n_sim" => json!(self.n_sim),
            "p_male" => json!(self.p_male),
            "capacities" => json!(self.capacities),
            "n_promotion" => json!(self.n_promotion),
            "p_leave" => json!(self.p_leave),
            "p_s" => json!(self.p_s),
            "mu_o" => json!(self.mu_o),
            "sigma_o" => json!(self.sigma_o),
            "mu_r" => json!(self.mu_r),
            "sigma_r" => json!(self.sigma_r),
            "mu_st" => json!(self.mu_st),
            "sigma_st" => json!(self.sigma_st),
            "p_individual" => json!(self.p_individual),
            "p_stretch" => json!(self.p_stretch),
            "n_stretch" => json!(self.n_stretch),
            "bias.r2" => json!(self.bias.r2),
            "bias.r2_group" => json!(self.bias.r2_group),
            "bias.p_female" => json!(self.bias.p_female),
            "bias.p_com" => json!(self.bias.p_com),
            "bias.f_dis" => json!(self.bias.f_dis),
            "bias.on_success" => json!(self.bias.on_success),
            "bias.on_failure" => json!(self.bias.on_failure),
            "norms.enabled" => json!(self.norms.enabled),
            "norms.b_macro" => json!(self.norms.b_macro),
            "norms.b_macro_group" => json!(self.norms.b_macro_group),
            "norms.p_m" => json!(self.norms.p_m),
            "norms.w" => json!(self.norms.w),
            "norms.w0" => json!(self.norms.w0),
            "intervention.k" => json!(self.intervention.k),
            "intervention.i_range" => json!([self.intervention.i_range.start, self.intervention.i_range.end]),
            "run.n_runs" => json!(self.run.n_runs),
            "run.master_seed" => json!(self.run.master_seed),
            "run.out_dir" => json!(self.run.out_dir),
            _ => return None,
        };
        Some(v)
    }

    /// Sets a dotted key. Type-checks the value; range checks happen in [`validate`](Self::validate).
    pub fn set(&mut self, key: &str, v: &Value) -> Result<()> {
        match key {
            "n_sim" => self.n_sim = count(key, v)?,
            "p_male" => self.p_male = real(key, v)?,
            "capacities" => self.capacities = levels(key, v)?,
            "n_promotion" => self.n_promotion = count(key, v)?,
            "p_leave" => self.p_leave = real(key, v)?,
            "p_s" => self.p_s = real(key, v)?,
            "mu_o" => self.mu_o = real(key, v)?,
            "sigma_o" => self.sigma_o = real(key, v)?,
            "mu_r" => self.mu_r = real(key, v)?,
            "sigma_r" => self.sigma_r = real(key, v)?,
            "mu_st" => self.mu_st = real(key, v)?,
            "sigma_st" => self.sigma_st = real(key, v)?,
            "p_individual" => self.p_individual = real(key, v)?,
            "p_stretch" => self.p_stretch = real(key, v)?,
            "n_stretch" => self.n_stretch = count(key, v)?,
            "bias.r2" => self.bias.r2 = real(key, v)?,
            "bias.r2_group" => self.bias.r2_group = real(key, v)?,
            "bias.p_female" => self.bias.p_female = real(key, v)?,
            "bias.p_com" => self.bias.p_com = real(key, v)?,
            "bias.f_dis" => self.bias.f_dis = real(key, v)?,
            "bias.on_success" => self.bias.on_success = flag(key, v)?,
            "bias.on_failure" => self.bias.on_failure = flag(key, v)?,
            "norms.enabled" => self.norms.enabled = flag(key, v)?,
            "norms.b_macro" => self.norms.b_macro = real(key, v)?,
            "norms.b_macro_group" => self.norms.b_macro_group = real(key, v)?,
            "norms.p_m" => self.norms.p_m = real(key, v)?,
            "norms.w" => self.norms.w = real(key, v)?,
            "norms.w0" => self.norms.w0 = real(key, v)?,
            "intervention.k" => self.intervention.k = real(key, v)?,
            "intervention.i_range" => self.intervention.i_range = range(key, v)?,
            "run.n_runs" => self.run.n_runs = count(key, v)?,
            "run.master_seed" => self.run.master_seed = whole(key, v)?,
            "run.out_dir" => {
                self.run.out_dir = match v {
                    Value::Null => None,
                    Value::String(s) => Some(PathBuf::from(s)),
                    _ => return Err(Error::invalid(key, format!("expected a path or null, got {v}"))),
                }
            }
            _ => return Err(Error::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Sets a key from command-line text. Ranges are written `start:end`.
    pub fn set_from_str(&mut self, key: &str, text: &str) -> Result<()> {
        let current = self.get(key).ok_or_else(|| Error::UnknownKey(key.to_string()))?;
        let text = text.trim();
        let value = match current {
            Value::Bool(_) => json!(text
                .parse::<bool>()
                .map_err(|_| Error::invalid(key, format!("expected true or false, got `{text}`")))?),
            Value::Number(_) => {
                let x: f64 = text
                    .parse()
                    .map_err(|_| Error::invalid(key, format!("expected a number, got `{text}`")))?;
                json!(x)
            }
            Value::Array(_) if key == "intervention.i_range" => {
                let parsed = text
                    .split_once(':')
                    .and_then(|(a, b)| Some((a.trim().parse::<u32>().ok()?, b.trim().parse::<u32>().ok()?)));
                let (a, b) = parsed.ok_or_else(|| Error::invalid(key, format!("expected start:end, got `{text}`")))?;
                json!([a, b])
            }
            _ => return Err(Error::NotSweepable(key.to_string())),
        };
        self.set(key, &value)
    }

    /// Flat `{dotted.key: value}` form, keys sorted.
    pub fn to_flat(&self) -> Map<String, Value> {
        KEYS.iter()
            .map(|&k| (k.to_string(), self.get(k).expect("every listed key is readable")))
            .collect()
    }

    /// Applies a flat object on top of `self`. A `"preset"` entry is not
    /// accepted here; see [`from_flat`](Self::from_flat).
    pub fn apply_flat(&mut self, map: &Map<String, Value>) -> Result<()> {
        for (k, v) in map {
            self.set(k, v)?;
        }
        Ok(())
    }

    /// Builds a validated config from a flat object, starting from the named
    /// preset if a `"preset"` key is present and from defaults otherwise.
    pub fn from_flat(map: &Map<String, Value>) -> Result<Self> {
        let mut cfg = match map.get("preset") {
            None => Self::default(),
            Some(Value::String(name)) => presets::resolve(name)?,
            Some(other) => return Err(Error::invalid("preset", format!("expected a preset name, got {other}"))),
        };
        for (k, v) in map.iter().filter(|(k, _)| k.as_str() != "preset") {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&Value::Object(self.to_flat())).expect("flat config serializes");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let value: Value = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        match value {
            Value::Object(map) => Self::from_flat(&map),
            _ => Err(Error::invalid("<root>", "configuration must be a JSON object")),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string()).map_err(|e| Error::io(path, e))
    }

    pub fn validate(&self) -> Result<()> {
        fn fraction(key: &str, x: f64) -> Result<()> {
            if (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(Error::invalid(key, format!("must lie in [0, 1], got {x}")))
            }
        }
        fn positive(key: &str, x: f64) -> Result<()> {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(key, format!("must be positive and finite, got {x}")))
            }
        }
        fn finite(key: &str, x: f64) -> Result<()> {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(key, format!("must be finite, got {x}")))
            }
        }
        fn below_one(key: &str, x: f64) -> Result<()> {
            if x.abs() < 1.0 {
                Ok(())
            } else {
                Err(Error::invalid(key, format!("must satisfy |x| < 1, got {x}")))
            }
        }

        for (key, x) in [
            ("p_male", self.p_male),
            ("p_leave", self.p_leave),
            ("p_s", self.p_s),
            ("p_individual", self.p_individual),
            ("p_stretch", self.p_stretch),
            ("bias.p_com", self.bias.p_com),
            ("norms.p_m", self.norms.p_m),
            ("norms.w", self.norms.w),
            ("norms.w0", self.norms.w0),
        ] {
            fraction(key, x)?;
        }
        for (key, x) in [
            ("sigma_o", self.sigma_o),
            ("sigma_r", self.sigma_r),
            ("sigma_st", self.sigma_st),
        ] {
            positive(key, x)?;
        }
        for (key, x) in [
            ("mu_o", self.mu_o),
            ("mu_r", self.mu_r),
            ("mu_st", self.mu_st),
            ("norms.b_macro", self.norms.b_macro),
            ("norms.b_macro_group", self.norms.b_macro_group),
        ] {
            finite(key, x)?;
        }
        below_one("bias.r2", self.bias.r2)?;
        below_one("bias.r2_group", self.bias.r2_group)?;
        if !(self.bias.f_dis > 0.0 && self.bias.f_dis <= 1.0) {
            return Err(Error::invalid("bias.f_dis", format!("must lie in (0, 1], got {}", self.bias.f_dis)));
        }
        if !(self.bias.p_female >= 0.0 && self.bias.p_female.is_finite()) {
            return Err(Error::invalid("bias.p_female", format!("must be non-negative, got {}", self.bias.p_female)));
        }
        if self.norms.p_m == 0.5 {
            return Err(Error::invalid("norms.p_m", "must differ from 0.5"));
        }
        if let Some(i) = self.capacities.iter().position(|&n| n == 0) {
            return Err(Error::invalid("capacities", format!("level {} has no positions", i + 1)));
        }
        if self.n_promotion == 0 {
            return Err(Error::invalid("n_promotion", "must be at least 1"));
        }
        if self.n_stretch == 0 {
            return Err(Error::invalid("n_stretch", "must be at least 1"));
        }
        if self.n_sim > 0 && self.n_promotion > self.n_sim {
            return Err(Error::invalid(
                "n_promotion",
                format!("{} exceeds n_sim = {}", self.n_promotion, self.n_sim),
            ));
        }
        let iv = &self.intervention;
        if !(0.0..=100.0).contains(&iv.k) {
            return Err(Error::invalid("intervention.k", format!("must lie in [0, 100], got {}", iv.k)));
        }
        if iv.i_range.start > iv.i_range.end || iv.i_range.end > self.n_sim {
            return Err(Error::invalid(
                "intervention.i_range",
                format!(
                    "[{}, {}] must satisfy start <= end <= n_sim = {}",
                    iv.i_range.start, iv.i_range.end, self.n_sim
                ),
            ));
        }
        if self.run.n_runs == 0 {
            return Err(Error::invalid("run.n_runs", "must be at least 1"));
        }
        self.check_cascade()
    }

    /// Each level must keep enough agents after attrition to refill every
    /// vacancy that cascades down from above it.
    fn check_cascade(&self) -> Result<()> {
        let leaving: Vec<usize> = self
            .capacities
            .iter()
            .map(|&n| round_count(n as f64 * self.p_leave).min(n))
            .collect();
        let mut needed = 0;
        for level in (2..=LEVELS).rev() {
            needed += leaving[level - 1];
            let available = self.capacities[level - 2] - leaving[level - 2];
            if available < needed {
                return Err(Error::invalid(
                    "capacities",
                    format!(
                        "level {} keeps {available} agents after attrition but must supply {needed} promotions",
                        level - 1
                    ),
                ));
            }
        }
        Ok(())
    }
}
