// SPDX-License-Identifier: Apache-2.0
//! Experiment configuration.
//!
//! A config file is either a JSON object or flat `key = value` lines with
//! dotted sections (`potential.family = eckart`). Both are merged over the
//! defaults, then command-line overrides are applied with the same dotted
//! keys, and the result is validated.

use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{Map, Value};
use superwave_core::potential::{EnergyWindow, Family, PotentialModel};
use superwave_core::scale::ScaleConfig;
use superwave_core::stationary::{StationaryConfig, EPS_FLOOR};
use superwave_core::superadiabatic::CoefficientSource;
use superwave_core::wavepacket::{GaussianDensity, RegionConstants};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialBlock {
    pub family: String,
    pub v0: f64,
    pub a: f64,
}

impl Default for PotentialBlock {
    fn default() -> Self {
        Self { family: "eckart".into(), v0: 1.0, a: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyBlock {
    /// Energy for single-energy commands.
    pub e: f64,
    pub window: [f64; 2],
}

impl Default for EnergyBlock {
    fn default() -> Self {
        Self { e: 2.0, window: [1.2, 2.8] }
    }
}

/// G = (E − E₀)²/(2s²), J = 0, P = amplitude, on the energy window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityBlock {
    pub e0: f64,
    pub s: f64,
    pub amplitude: f64,
}

impl Default for DensityBlock {
    fn default() -> Self {
        let d = GaussianDensity::default();
        Self { e0: d.e0, s: d.s, amplitude: d.amplitude.re }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegionBlock {
    pub delta: f64,
    pub beta: f64,
    pub c0: f64,
    pub c1: f64,
}

impl Default for RegionBlock {
    fn default() -> Self {
        let r = RegionConstants::default();
        Self { delta: r.delta, beta: r.beta, c0: r.c0, c1: r.c1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub quad_tol: f64,
    pub inv_tol: f64,
    pub ode_abs_tol: f64,
    pub ode_rel_tol: f64,
    pub tail_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let s = ScaleConfig::default();
        let o = StationaryConfig::default();
        Self { quad_tol: s.quad_tol, inv_tol: s.inv_tol, ode_abs_tol: o.abs_tol, ode_rel_tol: o.rel_tol, tail_tol: o.tail_tol }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyBlock {
    /// Multiplies every tolerance-type threshold; 0 forces those checks to fail.
    pub tolerance_scale: f64,
    pub quick: bool,
}

impl Default for VerifyBlock {
    fn default() -> Self {
        Self { tolerance_scale: 1.0, quick: false }
    }
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(f64),
        Many(Vec<f64>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub potential: PotentialBlock,
    pub energy: EnergyBlock,
    /// Strictly decreasing ε ladder; a single number is a one-rung ladder.
    #[serde(deserialize_with = "one_or_many")]
    pub eps: Vec<f64>,
    pub density: DensityBlock,
    pub regions: RegionBlock,
    pub tolerances: Tolerances,
    /// `numeric` or `pole`.
    pub coeff_source: String,
    pub output: PathBuf,
    /// Seed for grid jitter.
    pub seed: u64,
    pub verify: VerifyBlock,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            potential: PotentialBlock::default(),
            energy: EnergyBlock::default(),
            eps: vec![0.2, 0.1, 0.05],
            density: DensityBlock::default(),
            regions: RegionBlock::default(),
            tolerances: Tolerances::default(),
            coeff_source: "numeric".into(),
            output: PathBuf::from("superwave-out"),
            seed: 0,
            verify: VerifyBlock::default(),
        }
    }
}

/// Reads a right-hand side: any JSON literal, else a bare comma list of
/// numbers, else a plain string (surrounding quotes optional).
pub fn parse_scalar(raw: &str) -> Value {
    let raw = raw.trim();
    if let Ok(v) = serde_json::from_str::<Value>(raw) {
        return v;
    }
    if raw.contains(',') {
        if let Ok(list) = crate::lists::parse_f64_list(raw) {
            return Value::Array(list.into_iter().map(Value::from).collect());
        }
    }
    let unquoted = raw
        .strip_prefix('\'')
        .and_then(|r| r.strip_suffix('\''))
        .unwrap_or(raw);
    Value::String(unquoted.to_string())
}

fn valid_key(key: &str) -> bool {
    !key.is_empty()
        && key
            .split('.')
            .all(|seg| !seg.is_empty() && seg.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'))
}

/// Writes `value` at a dotted path, creating intermediate tables.
pub fn set_path(root: &mut Value, key: &str, value: Value) -> CliResult<()> {
    if !valid_key(key) {
        return Err(CliError::config(format!("invalid key `{key}`")));
    }
    let mut node = root;
    let segs: Vec<&str> = key.split('.').collect();
    for (i, seg) in segs.iter().enumerate() {
        let map = node
            .as_object_mut()
            .ok_or_else(|| CliError::config(format!("`{}` is not a section", segs[..i].join("."))))?;
        if i + 1 == segs.len() {
            map.insert((*seg).to_string(), value);
            return Ok(());
        }
        node = map.entry((*seg).to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
    unreachable!("key has at least one segment")
}

/// Parses flat `key = value` text. Blank lines and `#` comments are skipped;
/// a key may appear only once.
pub fn parse_flat(text: &str) -> CliResult<Value> {
    let mut root = Value::Object(Map::new());
    let mut seen = std::collections::HashSet::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, val) = line
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim();
        if !seen.insert(key.to_string()) {
            return Err(CliError::config(format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
        set_path(&mut root, key, parse_scalar(val))
            .map_err(|e| CliError::config(format!("line {}: {}", lineno + 1, e.to_string().trim_start_matches("configuration error: "))))?;
    }
    Ok(root)
}

/// Parses a config file body in either format.
pub fn parse_config_text(text: &str) -> CliResult<Value> {
    let body = text.trim_start_matches('\u{feff}');
    if body.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(body).map_err(|e| CliError::config(format!("JSON: {e}")))?;
        if !v.is_object() {
            return Err(CliError::config("JSON config must be an object"));
        }
        Ok(v)
    } else {
        parse_flat(body)
    }
}

/// Recursively overlays `top` onto `base`.
pub fn merge(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, t) => *b = t,
    }
}

impl ExperimentConfig {
    /// Defaults, then the file body, then `key=value` overrides in order.
    pub fn load(file: Option<&str>, overrides: &[(String, Value)]) -> CliResult<Self> {
        let mut v = serde_json::to_value(Self::default()).expect("defaults serialize");
        if let Some(text) = file {
            merge(&mut v, parse_config_text(text)?);
        }
        for (k, val) in overrides {
            set_path(&mut v, k, val.clone())?;
        }
        let cfg: Self = serde_json::from_value(v).map_err(|e| CliError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        let model = self.model()?;
        if !(self.energy.e > model.sup()) {
            return bad(format!("energy {} does not exceed the barrier maximum {}", self.energy.e, model.sup()));
        }
        let [e1, e2] = self.energy.window;
        EnergyWindow::new(&model, e1, e2).map_err(|e| CliError::config(e.to_string()))?;
        if self.eps.is_empty() || self.eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return bad(format!("ε ladder must hold positive numbers: {:?}", self.eps));
        }
        if self.eps.windows(2).any(|w| w[1] >= w[0]) {
            return bad(format!("ε ladder must be strictly decreasing: {:?}", self.eps));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("quad_tol", t.quad_tol),
            ("inv_tol", t.inv_tol),
            ("ode_abs_tol", t.ode_abs_tol),
            ("ode_rel_tol", t.ode_rel_tol),
            ("tail_tol", t.tail_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        let r = &self.regions;
        if !(r.delta > 0.0 && r.delta < 0.5) || !(r.beta > 0.0 && r.beta < 0.125) || !(r.c0 > 0.0) || !(r.c1 > 0.0) {
            return bad(format!("region constants need 0<δ<1/2, 0<β<1/8, C₀, C₁ > 0: {r:?}"));
        }
        self.density()?;
        self.source()?;
        if !(self.verify.tolerance_scale >= 0.0 && self.verify.tolerance_scale.is_finite()) {
            return bad(format!("verify.tolerance_scale must be ≥ 0, got {}", self.verify.tolerance_scale));
        }
        Ok(())
    }

    pub fn model(&self) -> CliResult<PotentialModel> {
        let family: Family = self.potential.family.parse().map_err(|e: superwave_core::Error| CliError::config(e.to_string()))?;
        PotentialModel::new(family, self.potential.v0, self.potential.a).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn density(&self) -> CliResult<GaussianDensity> {
        let d = &self.density;
        let mut g = GaussianDensity::new(d.e0, d.s, (self.energy.window[0], self.energy.window[1]))
            .map_err(|e| CliError::config(e.to_string()))?;
        if !d.amplitude.is_finite() {
            return Err(CliError::config("density amplitude must be finite"));
        }
        g.amplitude = d.amplitude.into();
        Ok(g)
    }

    pub fn regions(&self) -> RegionConstants {
        let r = &self.regions;
        RegionConstants { delta: r.delta, beta: r.beta, c0: r.c0, c1: r.c1 }
    }

    pub fn source(&self) -> CliResult<CoefficientSource> {
        self.coeff_source.parse().map_err(|e: superwave_core::Error| CliError::config(e.to_string()))
    }

    pub fn scale_config(&self) -> ScaleConfig {
        ScaleConfig { quad_tol: self.tolerances.quad_tol, inv_tol: self.tolerances.inv_tol, ..ScaleConfig::default() }
    }

    pub fn stationary_config(&self) -> StationaryConfig {
        let t = &self.tolerances;
        StationaryConfig { abs_tol: t.ode_abs_tol, rel_tol: t.ode_rel_tol, tail_tol: t.tail_tol, eps_floor: EPS_FLOOR, ..StationaryConfig::default() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_and_json_agree() {
        let flat = "# comment\npotential.family = gaussian\npotential.v0=0.5\neps = 0.3,0.2\nenergy.window = [1.0, 2.0]\ndensity.e0 = 1.5\n";
        let json = r#"{"potential": {"family": "gaussian", "v0": 0.5}, "eps": [0.3, 0.2], "energy": {"window": [1.0, 2.0]}, "density": {"e0": 1.5}}"#;
        let a = ExperimentConfig::load(Some(flat), &[]).unwrap();
        let b = ExperimentConfig::load(Some(json), &[]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.potential.a, 1.0);
        assert_eq!(a.eps, vec![0.3, 0.2]);
    }

    #[test]
    fn overrides_win() {
        let c = ExperimentConfig::load(Some("energy.e = 3"), &[("energy.e".into(), Value::from(2.5))]).unwrap();
        assert_eq!(c.energy.e, 2.5);
    }

    #[test]
    fn rejections() {
        for body in [
            "eps = 0.1,0.2",
            "tolerances.quad_tol = 0",
            "potential.colour = red",
            "energy.window = 0.5,2",
            "potential.family = square",
            "a = 1\na = 2",
            "justtext",
            "potential = 3\npotential.v0 = 1",
            "regions.beta = 0.2",
            "[1,2]",
        ] {
            assert!(matches!(ExperimentConfig::load(Some(body), &[]), Err(CliError::Config(_))), "{body}");
        }
    }

    #[test]
    fn scalars() {
        assert_eq!(parse_scalar("3"), Value::from(3));
        assert_eq!(parse_scalar(" true "), Value::Bool(true));
        assert_eq!(parse_scalar("eckart"), Value::from("eckart"));
        assert_eq!(parse_scalar("'x y'"), Value::from("x y"));
        assert_eq!(parse_scalar("1, 2"), serde_json::json!([1.0, 2.0]));
    }
}
