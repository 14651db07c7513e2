//! Flat `key = value` scenario files; `#` starts a comment.
//!
//! ```text
//! name = fig1
//! sigma = 0.02
//! x0 = 0.5
//! levels = 30            # or: c_const = 1e-3
//! horizon = 199 revivals # or a number; or: energy = <Σ B_k² T>
//! models = rwa, analytic
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::state::ModelTag;
use crate::welltrap::Profile;

/// Environment variable naming the default parent directory for outputs.
pub const OUTPUT_DIR_ENV: &str = "WELLSQUEEZE_OUTPUT_DIR";
const DEFAULT_OUTPUT_PARENT: &str = "out";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    Levels(usize),
    Residual(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon {
    Time(f64),
    /// Multiple of the well's revival period `4mL²/(πħ)`.
    Revivals(f64),
    /// Total field energy `Σ B_k² T`.
    Energy(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub length: f64,
    pub mass: f64,
    pub hbar: f64,
    pub sigma: f64,
    pub x0: f64,
    pub truncation: Truncation,
    pub horizon: Horizon,
    pub models: Vec<ModelTag>,
    pub grid: usize,
    pub samples: usize,
    pub tol: f64,
    pub profile: String,
    pub output_dir: PathBuf,
}

const KEYS: &[&str] = &[
    "name",
    "length",
    "mass",
    "hbar",
    "sigma",
    "x0",
    "levels",
    "c_const",
    "horizon",
    "energy",
    "models",
    "grid",
    "samples",
    "tol",
    "profile",
    "output_dir",
];

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(
                    format!("line {}", lineno + 1),
                    format!("expected `key = value`, got `{line}`"),
                ));
            };
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::config(key, "unknown key"));
            }
            if map.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(Error::config(key, "given more than once"));
            }
        }
        Self::from_map(&map)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| map.get(k).map(String::as_str);
        let name = get("name")
            .filter(|s| !s.is_empty())
            .ok_or_else(|| Error::config("name", "required"))?
            .to_string();
        if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(Error::config("name", "use letters, digits, `-` or `_` only"));
        }
        let length = positive(get("length"), "length", 1.0)?;
        let mass = positive(get("mass"), "mass", 1.0)?;
        let hbar = positive(get("hbar"), "hbar", 1.0)?;
        let sigma = number(get("sigma").ok_or_else(|| Error::config("sigma", "required"))?, "sigma")?;
        if !(sigma > 0.0 && sigma < length) {
            return Err(Error::config("sigma", format!("must lie in (0, length), got {sigma}")));
        }
        let x0 = match get("x0") {
            Some(v) => number(v, "x0")?,
            None => 0.5 * length,
        };
        if !(x0 > 0.0 && x0 < length) {
            return Err(Error::config("x0", format!("must lie in (0, length), got {x0}")));
        }

        let truncation = match (get("levels"), get("c_const")) {
            (Some(_), Some(_)) => return Err(Error::config("levels", "give either `levels` or `c_const`, not both")),
            (None, None) => return Err(Error::config("levels", "one of `levels` or `c_const` is required")),
            (Some(n), None) => {
                let n: usize = n
                    .parse()
                    .map_err(|_| Error::config("levels", format!("not an integer: `{n}`")))?;
                if n < 2 {
                    return Err(Error::config("levels", "at least 2 levels are required"));
                }
                Truncation::Levels(n)
            }
            (None, Some(c)) => {
                let c = number(c, "c_const")?;
                if !(c > 0.0 && c <= 1.0) {
                    return Err(Error::config("c_const", format!("must lie in (0, 1], got {c}")));
                }
                Truncation::Residual(c)
            }
        };

        let horizon = match (get("horizon"), get("energy")) {
            (Some(_), Some(_)) => return Err(Error::config("horizon", "give either `horizon` or `energy`, not both")),
            (None, None) => return Err(Error::config("horizon", "one of `horizon` or `energy` is required")),
            (Some(h), None) => parse_horizon(h)?,
            (None, Some(e)) => Horizon::Energy(positive(Some(e), "energy", 0.0)?),
        };

        let models_raw = get("models").unwrap_or("");
        let mut models = Vec::new();
        for m in models_raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let tag = ModelTag::parse_model(m).map_err(|e| Error::config("models", e.to_string()))?;
            if !models.contains(&tag) {
                models.push(tag);
            }
        }
        if models.is_empty() {
            return Err(Error::config("models", "at least one model is required"));
        }

        let grid = integer(get("grid"), "grid", 2048)?;
        if grid < crate::dynamics::MIN_GRID {
            return Err(Error::config(
                "grid",
                format!("at least {} points required", crate::dynamics::MIN_GRID),
            ));
        }
        let samples = integer(get("samples"), "samples", 200)?;
        if samples < 2 {
            return Err(Error::config("samples", "at least 2 samples required"));
        }
        let tol = positive(get("tol"), "tol", 1e-10)?;
        if !(crate::dynamics::full_tolerance_range().contains(&tol)) {
            return Err(Error::config("tol", format!("must lie in [1e-12, 1e-4], got {tol:e}")));
        }
        let profile = get("profile").unwrap_or("linear").to_string();
        Profile::parse(&profile).map_err(|e| Error::config("profile", e.to_string()))?;
        let output_dir = match get("output_dir") {
            Some(d) if !d.is_empty() => PathBuf::from(d),
            _ => default_output_parent().join(&name),
        };

        Ok(Self {
            name,
            length,
            mass,
            hbar,
            sigma,
            x0,
            truncation,
            horizon,
            models,
            grid,
            samples,
            tol,
            profile,
            output_dir,
        })
    }

    /// Key/value form; parsing it back gives an equal config.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("name", self.name.clone());
        put("length", fmt_f64(self.length));
        put("mass", fmt_f64(self.mass));
        put("hbar", fmt_f64(self.hbar));
        put("sigma", fmt_f64(self.sigma));
        put("x0", fmt_f64(self.x0));
        match self.truncation {
            Truncation::Levels(n) => put("levels", n.to_string()),
            Truncation::Residual(c) => put("c_const", fmt_f64(c)),
        }
        match self.horizon {
            Horizon::Time(t) => put("horizon", fmt_f64(t)),
            Horizon::Revivals(n) => put("horizon", format!("{} revivals", fmt_f64(n))),
            Horizon::Energy(e) => put("energy", fmt_f64(e)),
        }
        put(
            "models",
            self.models.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(","),
        );
        put("grid", self.grid.to_string());
        put("samples", self.samples.to_string());
        put("tol", fmt_f64(self.tol));
        put("profile", self.profile.clone());
        put("output_dir", self.output_dir.display().to_string());
        m
    }

    pub fn to_text(&self) -> String {
        self.to_map().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Built-in scenarios: `fig1`, `smallsigma`, `reduced-scale`.
    pub fn builtin(name: &str) -> Result<Self> {
        let text = match name {
            "fig1" => FIG1,
            "smallsigma" => SMALL_SIGMA,
            "reduced-scale" => REDUCED_SCALE,
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown scenario `{other}` (built-ins: fig1, smallsigma, reduced-scale)"
                )))
            }
        };
        Self::parse(text)
    }
}

/// N = 30, σ = L/50 centred; 199 revival periods so the 200 uniform samples
/// land on revivals and the free phases drop out of the sampled densities.
pub const FIG1: &str = "\
name = fig1
sigma = 0.02
x0 = 0.5
levels = 30
horizon = 199 revivals
models = rwa, analytic
grid = 2048
samples = 200
";

pub const SMALL_SIGMA: &str = "\
name = smallsigma
sigma = 0.01
x0 = 0.5
c_const = 1e-3
horizon = 199 revivals
models = rwa, reduced
grid = 2048
samples = 200
";

/// T = 500 periods of the 1→2 carrier, `500 · 2π/ω_12 = 2000/(3π)`.
pub const REDUCED_SCALE: &str = "\
name = reduced-scale
sigma = 0.1
x0 = 0.5
levels = 10
horizon = 212.20659078919378
models = full, rwa
grid = 1024
samples = 101
tol = 1e-10
";

fn default_output_parent() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_PARENT))
}

fn parse_horizon(s: &str) -> Result<Horizon> {
    let s = s.trim();
    if let Some(n) = s.strip_suffix("revivals").or_else(|| s.strip_suffix("revival")) {
        let n = number(n.trim(), "horizon")?;
        if n <= 0.0 || n.is_nan() {
            return Err(Error::config("horizon", "revival count must be positive"));
        }
        return Ok(Horizon::Revivals(n));
    }
    let t = number(s, "horizon")?;
    if t <= 0.0 || t.is_nan() {
        return Err(Error::config("horizon", format!("must be positive, got {t}")));
    }
    Ok(Horizon::Time(t))
}

fn number(s: &str, field: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::config(field, format!("not a number: `{s}`")))?;
    if !v.is_finite() {
        return Err(Error::config(field, "must be finite"));
    }
    Ok(v)
}

fn positive(s: Option<&str>, field: &str, default: f64) -> Result<f64> {
    match s {
        None => Ok(default),
        Some(s) => {
            let v = number(s, field)?;
            if v > 0.0 {
                Ok(v)
            } else {
                Err(Error::config(field, format!("must be positive, got {v}")))
            }
        }
    }
}

fn integer(s: Option<&str>, field: &str, default: usize) -> Result<usize> {
    match s {
        None => Ok(default),
        Some(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::config(field, format!("not a non-negative integer: `{s}`"))),
    }
}

/// Shortest representation that parses back to the same value.
fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}
