//! Structured key-value text configuration.
//!
//! The format is flat `key = value` lines, `#` comments, blank lines allowed.
//! Physical parameters use the field names of
//! [`PhysicalParams`](crate::model::PhysicalParams) in SI units; the distance
//! can be given either as `d` (meters) or `d_over_r0` (ratio), mutually
//! exclusive. Unknown keys are rejected.

use crate::error::ConfigError;
use crate::model::PhysicalParams;
use crate::real::Real;

/// Parsed `key = value` pairs with their line numbers, in file order.
#[derive(Debug, Clone, Default)]
pub struct KvFile {
    pairs: Vec<(usize, String, String)>,
}

impl KvFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut pairs: Vec<(usize, String, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.split_once('#') {
                Some((before, _)) => before,
                None => raw,
            }
            .trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Malformed {
                line,
                text: content.to_string(),
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Malformed {
                    line,
                    text: content.to_string(),
                });
            }
            if pairs.iter().any(|(_, k, _)| *k == key) {
                return Err(ConfigError::DuplicateKey { line, key });
            }
            pairs.push((line, key, value));
        }
        Ok(Self { pairs })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(_, k, _)| k == key)
            .map(|(_, _, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.pairs.iter().find(|(_, k, _)| k == key) {
            None => Ok(None),
            Some((line, k, v)) => v.parse::<f64>().map(Some).map_err(|_| ConfigError::BadValue {
                line: *line,
                key: k.clone(),
                value: v.clone(),
            }),
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.pairs.iter().map(|(_, k, _)| k.as_str())
    }

    /// Reject any key outside the allowed set.
    pub fn ensure_only(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        for (line, key, _) in &self.pairs {
            if !allowed.contains(&key.as_str()) {
                return Err(ConfigError::UnknownKey {
                    line: *line,
                    key: key.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Keys accepted in a physical-parameter config.
pub const PARAM_KEYS: [&str; 15] = [
    "preset", "p_stat", "p_v", "sigma", "rho", "eta_l", "c", "gamma", "chi", "kappa_s", "r0",
    "d", "d_over_r0", "p_ac", "omega",
];

/// Built-in parameter sets.
pub fn preset<S: Real>(name: &str) -> Result<PhysicalParams<S>, ConfigError> {
    match name {
        "sonovue-1.72um" => Ok(PhysicalParams::sonovue_1_72um()),
        other => Err(ConfigError::UnknownPreset(other.to_string())),
    }
}

/// Names of the available presets (for `--help` and error messages).
pub const PRESET_NAMES: [&str; 1] = ["sonovue-1.72um"];

/// Build physical parameters from a key-value file, starting from the preset
/// named inside it (key `preset`, default `sonovue-1.72um`) and applying
/// field overrides on top.
pub fn params_from_kv(kv: &KvFile) -> Result<PhysicalParams<f64>, ConfigError> {
    kv.ensure_only(&PARAM_KEYS)?;
    let base = preset(kv.get("preset").unwrap_or("sonovue-1.72um"))?;
    apply_param_overrides(base, kv)
}

/// Apply `PhysicalParams` field overrides from a key-value file onto `base`.
pub fn apply_param_overrides(
    mut p: PhysicalParams<f64>,
    kv: &KvFile,
) -> Result<PhysicalParams<f64>, ConfigError> {
    if kv.get("d").is_some() && kv.get("d_over_r0").is_some() {
        return Err(ConfigError::DistanceConflict);
    }
    let set = |field: &str, slot: &mut f64| -> Result<(), ConfigError> {
        if let Some(v) = kv.get_f64(field)? {
            *slot = v;
        }
        Ok(())
    };
    set("p_stat", &mut p.p_stat)?;
    set("p_v", &mut p.p_v)?;
    set("sigma", &mut p.sigma)?;
    set("rho", &mut p.rho)?;
    set("eta_l", &mut p.eta_l)?;
    set("c", &mut p.c)?;
    set("gamma", &mut p.gamma)?;
    set("chi", &mut p.chi)?;
    set("kappa_s", &mut p.kappa_s)?;
    set("r0", &mut p.r0)?;
    set("p_ac", &mut p.p_ac)?;
    set("omega", &mut p.omega)?;
    if let Some(d) = kv.get_f64("d")? {
        p.d = d;
    }
    if let Some(ratio) = kv.get_f64("d_over_r0")? {
        p.d = ratio * p.r0;
    }
    p.validate()?;
    Ok(p)
}
