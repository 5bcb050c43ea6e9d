//! Run configuration: a TOML document with fixed sections. Unknown keys
//! are rejected.
//!
//! Numbers may be written as literals or as short expressions in `pi`,
//! e.g. `"pi/50"`, `"-pi/4"`, `"2*pi"`.

use std::collections::BTreeMap;

use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;
use thiserror::Error;
use xyz_dynamics::{DriveProfile, ModelParams};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// A real number written as a literal or a `pi` expression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Num {
    pub fn parse(text: &str) -> Result<f64, String> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (-1.0, rest),
            None => (1.0, s.strip_prefix('+').unwrap_or(&s)),
        };
        if body.is_empty() {
            return Err(format!("empty number `{text}`"));
        }
        let mut value = 1.0;
        let mut divide = false;
        let mut start = 0;
        let bytes = body.as_bytes();
        for i in 0..=bytes.len() {
            if i < bytes.len() && bytes[i] != b'*' && bytes[i] != b'/' {
                continue;
            }
            let factor = match &body[start..i] {
                "pi" | "PI" | "π" => std::f64::consts::PI,
                f => f
                    .parse::<f64>()
                    .map_err(|_| format!("cannot read `{text}` as a number"))?,
            };
            value = if divide { value / factor } else { value * factor };
            if i < bytes.len() {
                divide = bytes[i] == b'/';
            }
            start = i + 1;
        }
        if !value.is_finite() {
            return Err(format!("`{text}` is not finite"));
        }
        Ok(sign * value)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct NumVisitor;
        impl Visitor<'_> for NumVisitor {
            type Value = Num;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number or an expression such as \"pi/50\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
                Ok(Num(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                Num::parse(v).map(Num).map_err(E::custom)
            }
        }
        d.deserialize_any(NumVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Ic1,
    Ic2,
    Rwa,
    Perturbation,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    #[default]
    Signed,
    Magnitude,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    /// Free text echoed into the output header.
    pub description: Option<String>,
    /// File stem for outputs; defaults to the config file's stem.
    pub output: Option<String>,
    #[serde(default)]
    pub phase_convention: Convention,
    pub model: Option<BTreeMap<String, toml::Value>>,
    pub ic2: Option<Ic2Spec>,
    pub rwa: Option<RwaSpec>,
    pub perturbation: Option<PerturbationSpec>,
    pub initial: InitialSpec,
    pub time: TimeSpec,
    pub sweep: Option<SweepSpec>,
    pub numeric: Option<NumericSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ic2Spec {
    pub kappa: Num,
    pub chi: Option<Num>,
    pub theta10: Num,
    pub theta20: Option<Num>,
    pub lambda_m: Option<toml::Value>,
    pub lambda_p: Option<toml::Value>,
    pub lambda_z: Option<toml::Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RwaDrive {
    LambdaDrive,
    FieldDrive,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RwaSpec {
    pub drive: RwaDrive,
    /// `ω+` for `lambda_drive`, `λm` for `field_drive`.
    #[serde(rename = "static")]
    pub static_value: Num,
    pub amplitude: Num,
    pub frequency: Num,
    pub phase: Option<Num>,
    pub theta10: Option<Num>,
    pub lambda_z: Option<toml::Value>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub omega_plus: Num,
    pub amplitude: Num,
    pub frequency: Num,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub state: Option<String>,
    /// `[re, im]` pairs in the order `++, --, +-, -+`.
    pub amplitudes: Option<Vec<[Num; 2]>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub t_end: Num,
    pub samples: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Dotted path into the document, e.g. `"ic2.lambda_m.frequency"`.
    pub parameter: String,
    pub values: Vec<Num>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodSpec {
    Rk4Fixed,
    Rk4Doubling,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericSpec {
    pub step: Option<Num>,
    pub method: Option<MethodSpec>,
    pub norm_tolerance: Option<Num>,
}

/// A parsed document: the typed config plus the raw tree it came from,
/// which is echoed into output headers and used for sweeps.
#[derive(Debug, Clone)]
pub struct Document {
    pub config: RunConfig,
    pub raw: toml::Table,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        Self::from_table(raw)
    }

    pub fn from_table(raw: toml::Table) -> Result<Self, ConfigError> {
        let config: RunConfig = toml::Value::Table(raw.clone())
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(Document { config, raw })
    }

    /// The document with `path` set to `value` and the sweep block removed.
    pub fn with_value(&self, path: &str, value: f64) -> Result<Self, ConfigError> {
        let mut raw = self.raw.clone();
        raw.remove("sweep");
        let keys: Vec<&str> = path.split('.').collect();
        let (last, parents) = keys.split_last().ok_or_else(|| invalid("empty sweep parameter"))?;
        let mut table = &mut raw;
        for key in parents {
            table = match table.get_mut(*key) {
                Some(toml::Value::Table(t)) => t,
                Some(_) => return Err(invalid(format!("sweep path `{path}`: `{key}` is not a table"))),
                None => return Err(invalid(format!("sweep path `{path}`: no key `{key}`"))),
            };
        }
        table.insert((*last).to_string(), toml::Value::Float(value));
        Self::from_table(raw)
    }

    /// The document as `# `-prefixed lines.
    pub fn echo(&self) -> Vec<String> {
        toml::to_string(&self.raw)
            .unwrap_or_default()
            .lines()
            .filter(|l| !l.is_empty())
            .map(|l| format!("# {l}"))
            .collect()
    }
}

impl RunConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        if self.time.samples < 2 {
            return Err(invalid(format!(
                "time.samples must be at least 2, got {}",
                self.time.samples
            )));
        }
        if self.time.t_end.0.is_nan() || self.time.t_end.0 < 0.0 {
            return Err(invalid(format!(
                "time.t_end must be non-negative, got {}",
                self.time.t_end.0
            )));
        }
        if let Some(stem) = &self.output {
            if stem.is_empty() || stem.contains(['/', '\\']) || stem.starts_with('.') {
                return Err(invalid(format!("output must be a plain file stem, got `{stem}`")));
            }
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return Err(invalid("sweep.values must not be empty"));
            }
        }
        match (&self.initial.state, &self.initial.amplitudes) {
            (Some(_), Some(_)) => return Err(invalid("give either initial.state or initial.amplitudes, not both")),
            (None, None) => return Err(invalid("initial.state or initial.amplitudes is required")),
            (None, Some(a)) if a.len() != 4 => {
                return Err(invalid(format!("initial.amplitudes needs 4 entries, got {}", a.len())))
            }
            _ => {}
        }
        let need = |present: bool, section: &str| {
            if present {
                Ok(())
            } else {
                Err(invalid(format!("mode {:?} needs a [{section}] section", self.mode)))
            }
        };
        match self.mode {
            Mode::Ic1 => need(self.model.is_some(), "model"),
            Mode::Ic2 => need(self.ic2.is_some(), "ic2"),
            Mode::Rwa => need(self.rwa.is_some(), "rwa"),
            Mode::Perturbation => need(self.perturbation.is_some(), "perturbation"),
            Mode::Numeric => need(
                self.model.is_some() || self.ic2.is_some() || self.rwa.is_some(),
                "model], [ic2] or [rwa",
            ),
        }
    }

    pub fn time_grid(&self) -> Vec<f64> {
        let n = self.time.samples;
        let t_end = self.time.t_end.0;
        (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect()
    }
}

const AXIS_KEYS: [&str; 4] = ["lambda_x", "lambda_y", "omega_1", "omega_2"];
const COMBINATION_KEYS: [&str; 4] = ["omega_plus", "omega_minus", "lambda_p", "lambda_m"];
const MAX_REFERENCE_DEPTH: usize = 16;

/// Build the model from a `[model]` table keyed by axis names
/// (`lambda_x, lambda_y, lambda_z, omega_1, omega_2`) or by combinations
/// (`omega_plus, omega_minus, lambda_p, lambda_m, lambda_z`). Missing keys
/// are zero.
pub fn model_params(model: &BTreeMap<String, toml::Value>) -> Result<ModelParams, ConfigError> {
    for key in model.keys() {
        if !AXIS_KEYS.contains(&key.as_str()) && !COMBINATION_KEYS.contains(&key.as_str()) && key != "lambda_z" {
            return Err(invalid(format!("unknown model key `{key}`")));
        }
    }
    let axes = AXIS_KEYS.iter().any(|k| model.contains_key(*k));
    let combos = COMBINATION_KEYS.iter().any(|k| model.contains_key(*k));
    if axes && combos {
        return Err(invalid("model mixes axis keys with combination keys"));
    }
    let get = |key: &str| -> Result<DriveProfile, ConfigError> {
        match model.get(key) {
            Some(v) => profile(v, key, model, 0),
            None => Ok(DriveProfile::zero()),
        }
    };
    if axes {
        Ok(ModelParams::from_axes(
            get("lambda_x")?,
            get("lambda_y")?,
            get("lambda_z")?,
            get("omega_1")?,
            get("omega_2")?,
        ))
    } else {
        Ok(ModelParams::from_combinations(
            get("omega_plus")?,
            get("omega_minus")?,
            get("lambda_p")?,
            get("lambda_m")?,
            get("lambda_z")?,
        ))
    }
}

/// Read a drive profile: a bare number (constant) or a table with `type`
/// one of `constant`, `sinusoid`, `scaled`, `sum`. A `scaled` base may
/// name another entry of `siblings`.
pub fn profile(
    v: &toml::Value,
    path: &str,
    siblings: &BTreeMap<String, toml::Value>,
    depth: usize,
) -> Result<DriveProfile, ConfigError> {
    if depth > MAX_REFERENCE_DEPTH {
        return Err(invalid(format!("{path}: profile references nest too deeply (cycle?)")));
    }
    let number = |v: &toml::Value, what: &str| -> Result<f64, ConfigError> {
        match v {
            toml::Value::Float(x) => Ok(*x),
            toml::Value::Integer(i) => Ok(*i as f64),
            toml::Value::String(s) => Num::parse(s).map_err(|e| invalid(format!("{path}.{what}: {e}"))),
            _ => Err(invalid(format!("{path}.{what}: expected a number"))),
        }
    };
    let table = match v {
        toml::Value::Table(t) => t,
        other => return Ok(DriveProfile::constant(number(other, "value")?)),
    };
    let kind = table
        .get("type")
        .and_then(|t| t.as_str())
        .ok_or_else(|| invalid(format!("{path}: profile table needs a string `type`")))?;
    let allowed: &[&str] = match kind {
        "constant" => &["type", "value"],
        "sinusoid" => &["type", "amplitude", "frequency", "phase"],
        "scaled" => &["type", "factor", "base"],
        "sum" => &["type", "terms"],
        other => return Err(invalid(format!("{path}: unknown profile type `{other}`"))),
    };
    if let Some(k) = table.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(invalid(format!("{path}: unknown key `{k}` for a {kind} profile")));
    }
    let field = |name: &str| {
        table
            .get(name)
            .ok_or_else(|| invalid(format!("{path}: missing `{name}`")))
    };
    let drive = |e: xyz_dynamics::DriveError| invalid(format!("{path}: {e}"));
    match kind {
        "constant" => Ok(DriveProfile::constant(number(field("value")?, "value")?)),
        "sinusoid" => {
            let phase = match table.get("phase") {
                Some(p) => number(p, "phase")?,
                None => 0.0,
            };
            DriveProfile::sinusoid(
                number(field("amplitude")?, "amplitude")?,
                number(field("frequency")?, "frequency")?,
                phase,
            )
            .map_err(drive)
        }
        "scaled" => {
            let factor = number(field("factor")?, "factor")?;
            let base = match field("base")? {
                toml::Value::String(name) => {
                    let target = siblings
                        .get(name)
                        .ok_or_else(|| invalid(format!("{path}: base `{name}` is not defined alongside it")))?;
                    profile(target, name, siblings, depth + 1)?
                }
                other => profile(other, &format!("{path}.base"), siblings, depth + 1)?,
            };
            DriveProfile::scaled(factor, base).map_err(drive)
        }
        _ => {
            let terms = field("terms")?
                .as_array()
                .ok_or_else(|| invalid(format!("{path}.terms: expected an array")))?;
            let terms = terms
                .iter()
                .enumerate()
                .map(|(i, t)| profile(t, &format!("{path}.terms[{i}]"), siblings, depth + 1))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(DriveProfile::sum(terms))
        }
    }
}

/// Profile for an optional key of a non-model section.
pub fn optional_profile(v: Option<&toml::Value>, path: &str) -> Result<DriveProfile, ConfigError> {
    match v {
        Some(v) => profile(v, path, &BTreeMap::new(), 0),
        None => Ok(DriveProfile::zero()),
    }
}
