//! TOML experiment configuration.
//!
//! Scalar-or-grid fields accept a number, a list, or `{ start, stop, step }`.
//! Momenta additionally accept strings such as `"pi/2"` or `"-0.25pi"`.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::basis::Spin;
use crate::wavepacket::WavepacketSpec;

pub const SCHEMA_VERSION: u32 = 1;

/// Largest number of points a grid or sweep may expand to.
pub const MAX_POINTS: usize = 10_000;

const MAX_TIME_SAMPLES: usize = 100_000;

/// Configuration problem, with the dotted path of the offending field.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { path: path.into(), message: message.into() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExperimentKind {
    #[serde(rename = "fig2-fidelity")]
    Fig2Fidelity,
    #[serde(rename = "regime-gallery")]
    RegimeGallery,
    #[serde(rename = "resonance-sweep")]
    ResonanceSweep,
    #[serde(rename = "bethe-check")]
    BetheCheck,
    #[serde(rename = "cascade-1vN")]
    Cascade1vN,
    #[serde(rename = "cascade-2v2")]
    Cascade2v2,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Fig2Fidelity => "fig2-fidelity",
            ExperimentKind::RegimeGallery => "regime-gallery",
            ExperimentKind::ResonanceSweep => "resonance-sweep",
            ExperimentKind::BetheCheck => "bethe-check",
            ExperimentKind::Cascade1vN => "cascade-1vN",
            ExperimentKind::Cascade2v2 => "cascade-2v2",
        }
    }
}

/// A real number, or `[-]a·pi[/b]` written as a string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Real {
    Number(f64),
    Expr(String),
}

impl Real {
    pub fn value(&self) -> Result<f64, String> {
        match self {
            Real::Number(x) => Ok(*x),
            Real::Expr(s) => parse_pi_expr(s),
        }
    }
}

fn parse_pi_expr(s: &str) -> Result<f64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    if let Ok(x) = f64::from_str(&t) {
        return Ok(x);
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (t.as_str(), None),
    };
    let coeff = num
        .strip_suffix("pi")
        .map(|c| c.trim_end_matches('*'))
        .ok_or_else(|| format!("cannot parse {s:?}: expected a number or a multiple of pi"))?;
    let a = match coeff {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => f64::from_str(c).map_err(|_| format!("cannot parse coefficient in {s:?}"))?,
    };
    let b = match den {
        None => 1.0,
        Some(d) => f64::from_str(d).map_err(|_| format!("cannot parse denominator in {s:?}"))?,
    };
    if b == 0.0 {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(a * PI / b)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

/// Scalar or grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Scalar(Real),
    List(Vec<Real>),
    Range(Range),
}

impl Axis {
    pub fn values(&self, path: &str) -> Result<Vec<f64>, ConfigError> {
        let vals = match self {
            Axis::Scalar(r) => vec![r.value().map_err(|m| ConfigError::new(path, m))?],
            Axis::List(v) => v
                .iter()
                .enumerate()
                .map(|(i, r)| r.value().map_err(|m| ConfigError::new(format!("{path}[{i}]"), m)))
                .collect::<Result<_, _>>()?,
            Axis::Range(r) => {
                if !(r.step > 0.0) || !r.start.is_finite() || !r.stop.is_finite() {
                    return Err(ConfigError::new(path, "range needs finite bounds and step > 0"));
                }
                if r.stop < r.start {
                    return Err(ConfigError::new(path, "range stop precedes start"));
                }
                let n = ((r.stop - r.start) / r.step + 1e-9).floor();
                if n + 1.0 > MAX_POINTS as f64 {
                    return Err(ConfigError::new(path, format!("range has more than {MAX_POINTS} points")));
                }
                (0..=n as usize).map(|i| r.start + r.step * i as f64).collect()
            }
        };
        if vals.is_empty() {
            return Err(ConfigError::new(path, "grid is empty"));
        }
        if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
            return Err(ConfigError::new(format!("{path}[{i}]"), "value is not finite"));
        }
        Ok(vals)
    }

    pub fn is_grid(&self) -> bool {
        !matches!(self, Axis::Scalar(_))
    }
}

impl From<f64> for Axis {
    fn from(x: f64) -> Self {
        Axis::Scalar(Real::Number(x))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinName {
    Up,
    Down,
}

impl From<SpinName> for Spin {
    fn from(s: SpinName) -> Spin {
        match s {
            SpinName::Up => Spin::Up,
            SpinName::Down => Spin::Down,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketConfig {
    pub center: f64,
    pub momentum: Real,
    pub spin: SpinName,
}

/// How `interaction` values are read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InteractionUnits {
    /// Plain `U`.
    #[default]
    Absolute,
    /// Multiples of `|v_rel|` of the two packets.
    RelativeVelocity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl TimeGrid {
    pub fn samples(&self) -> Result<Vec<f64>, ConfigError> {
        if !self.start.is_finite() || !self.stop.is_finite() || !(self.step > 0.0) || !self.step.is_finite() {
            return Err(ConfigError::new("time", "needs finite start/stop and step > 0"));
        }
        if self.stop < self.start {
            return Err(ConfigError::new("time.stop", "precedes time.start"));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor();
        if n + 1.0 > MAX_TIME_SAMPLES as f64 {
            return Err(ConfigError::new("time", format!("more than {MAX_TIME_SAMPLES} samples")));
        }
        Ok((0..=n as usize).map(|i| self.start + self.step * i as f64).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: ExperimentKind,
    #[serde(default = "one")]
    pub hopping: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interaction: Option<Axis>,
    #[serde(default)]
    pub interaction_units: InteractionUnits,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Axis>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub packets: Vec<PacketConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeGrid>,
    /// Centers of the left and right outgoing packets in the target state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_centers: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain_length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_momentum: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_momentum: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train_length: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_velocity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_spins: Option<Vec<SpinName>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_spins: Option<Vec<SpinName>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn one() -> f64 {
    1.0
}

/// Grid-capable fields, in expansion order (last varies fastest).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisName {
    Interaction,
    Alpha,
    RelativeMomentum,
    TrainLength,
    Theta,
}

impl AxisName {
    pub const ALL: [AxisName; 5] =
        [AxisName::Interaction, AxisName::Alpha, AxisName::RelativeMomentum, AxisName::TrainLength, AxisName::Theta];

    pub fn key(self) -> &'static str {
        match self {
            AxisName::Interaction => "interaction",
            AxisName::Alpha => "alpha",
            AxisName::RelativeMomentum => "relative_momentum",
            AxisName::TrainLength => "train_length",
            AxisName::Theta => "theta",
        }
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let path = e.span().map(|s| format!("byte {}", s.start)).unwrap_or_else(|| "config".into());
            ConfigError::new(path, e.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(json))
    }

    pub fn axis(&self, name: AxisName) -> Option<&Axis> {
        match name {
            AxisName::Interaction => self.interaction.as_ref(),
            AxisName::Alpha => self.alpha.as_ref(),
            AxisName::RelativeMomentum => self.relative_momentum.as_ref(),
            AxisName::TrainLength => self.train_length.as_ref(),
            AxisName::Theta => self.theta.as_ref(),
        }
    }

    pub fn set_axis(&mut self, name: AxisName, axis: Axis) {
        let slot = match name {
            AxisName::Interaction => &mut self.interaction,
            AxisName::Alpha => &mut self.alpha,
            AxisName::RelativeMomentum => &mut self.relative_momentum,
            AxisName::TrainLength => &mut self.train_length,
            AxisName::Theta => &mut self.theta,
        };
        *slot = Some(axis);
    }

    fn required_axes(&self) -> &'static [AxisName] {
        match self.experiment {
            ExperimentKind::Fig2Fidelity | ExperimentKind::RegimeGallery | ExperimentKind::ResonanceSweep => {
                &[AxisName::Interaction, AxisName::Alpha]
            }
            ExperimentKind::BetheCheck => &[AxisName::Interaction, AxisName::Alpha, AxisName::RelativeMomentum],
            ExperimentKind::Cascade1vN => &[AxisName::TrainLength, AxisName::Theta],
            ExperimentKind::Cascade2v2 => &[AxisName::Theta],
        }
    }

    pub fn packet_specs(&self, alpha: f64) -> Result<Vec<WavepacketSpec>, ConfigError> {
        self.packets
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let k = p.momentum.value().map_err(|m| ConfigError::new(format!("packets[{i}].momentum"), m))?;
                Ok(WavepacketSpec::new(p.center, alpha, k, p.spin.into()))
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::new(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        if !self.hopping.is_finite() || self.hopping == 0.0 {
            return Err(ConfigError::new("hopping", "must be finite and non-zero"));
        }
        if let Some(t) = self.tolerance {
            if !(t >= 1e-14) || !t.is_finite() {
                return Err(ConfigError::new("tolerance", "must be finite and at least 1e-14"));
            }
        }
        let required = self.required_axes();
        for name in AxisName::ALL {
            match (self.axis(name), required.contains(&name)) {
                (Some(axis), true) => {
                    axis.values(name.key())?;
                }
                (None, true) => return Err(ConfigError::new(name.key(), "required for this experiment")),
                (Some(_), false) => {
                    return Err(ConfigError::new(
                        name.key(),
                        format!("not used by experiment {}", self.experiment.name()),
                    ))
                }
                (None, false) => {}
            }
        }
        let points: usize = required.iter().map(|&n| self.axis(n).unwrap().values(n.key()).unwrap().len()).product();
        if points > MAX_POINTS {
            return Err(ConfigError::new("config", format!("grid expands to {points} points, cap is {MAX_POINTS}")));
        }
        if let Some(a) = &self.alpha {
            if a.values("alpha")?.iter().any(|&x| x <= 0.0) {
                return Err(ConfigError::new("alpha", "must be positive"));
            }
        }
        for (i, p) in self.packets.iter().enumerate() {
            if !p.center.is_finite() {
                return Err(ConfigError::new(format!("packets[{i}].center"), "not finite"));
            }
            let k = p.momentum.value().map_err(|m| ConfigError::new(format!("packets[{i}].momentum"), m))?;
            if !k.is_finite() {
                return Err(ConfigError::new(format!("packets[{i}].momentum"), "not finite"));
            }
        }
        match self.experiment {
            ExperimentKind::Fig2Fidelity | ExperimentKind::RegimeGallery | ExperimentKind::ResonanceSweep => {
                let sites = self.sites.ok_or_else(|| ConfigError::new("sites", "required"))?;
                if !(2..=crate::basis::MAX_SITES).contains(&sites) {
                    return Err(ConfigError::new("sites", format!("must lie in 2..={}", crate::basis::MAX_SITES)));
                }
                if self.packets.len() != 2 {
                    return Err(ConfigError::new("packets", "exactly two packets required"));
                }
                if self.time.is_none() {
                    return Err(ConfigError::new("time", "required"));
                }
                self.time.as_ref().unwrap().samples()?;
            }
            ExperimentKind::BetheCheck => {
                let len = self.chain_length.ok_or_else(|| ConfigError::new("chain_length", "required"))?;
                if len < 3 {
                    return Err(ConfigError::new("chain_length", "at least 3 sites"));
                }
                if self.interaction_units != InteractionUnits::Absolute {
                    return Err(ConfigError::new("interaction_units", "bethe-check takes absolute U"));
                }
                if let Some(k) = &self.total_momentum {
                    k.value().map_err(|m| ConfigError::new("total_momentum", m))?;
                }
            }
            ExperimentKind::Cascade1vN => {
                let ns = self.train_length.as_ref().unwrap().values("train_length")?;
                if ns.iter().any(|&n| n < 1.0 || n.fract() != 0.0 || n > (crate::spin::MAX_TRAIN_SPINS - 1) as f64) {
                    return Err(ConfigError::new(
                        "train_length",
                        format!("integers in 1..={}", crate::spin::MAX_TRAIN_SPINS - 1),
                    ));
                }
                if let Some(v) = self.relative_velocity {
                    if v == 0.0 || !v.is_finite() {
                        return Err(ConfigError::new("relative_velocity", "must be finite and non-zero"));
                    }
                }
            }
            ExperimentKind::Cascade2v2 => {
                let l = self.left_spins.as_ref().map_or(2, Vec::len);
                let r = self.right_spins.as_ref().map_or(2, Vec::len);
                if l == 0 || r == 0 || l + r > crate::spin::MAX_TRAIN_SPINS {
                    return Err(ConfigError::new(
                        "left_spins",
                        format!("each train needs 1 or more spins, {} in total at most", crate::spin::MAX_TRAIN_SPINS),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Cartesian product of the grid axes, one single-point config per
    /// point, in expansion order.
    pub fn expand(&self) -> Result<Vec<ExperimentConfig>, ConfigError> {
        let mut points = vec![self.clone()];
        for &name in self.required_axes() {
            let values = self.axis(name).unwrap().values(name.key())?;
            let mut next = Vec::with_capacity(points.len() * values.len());
            for p in &points {
                for &v in &values {
                    let mut q = p.clone();
                    q.set_axis(name, Axis::from(v));
                    next.push(q);
                }
            }
            if next.len() > MAX_POINTS {
                return Err(ConfigError::new("config", format!("grid expands past {MAX_POINTS} points")));
            }
            points = next;
        }
        Ok(points)
    }

    /// Value of a single-point axis.
    pub fn scalar(&self, name: AxisName) -> Result<f64, ConfigError> {
        match self.axis(name) {
            Some(Axis::Scalar(r)) => r.value().map_err(|m| ConfigError::new(name.key(), m)),
            Some(_) => Err(ConfigError::new(name.key(), "expected a single value")),
            None => Err(ConfigError::new(name.key(), "missing")),
        }
    }

    /// `(axis, value)` labels of a single-point config.
    pub fn point_label(&self) -> Vec<(AxisName, f64)> {
        self.required_axes().iter().filter_map(|&n| self.scalar(n).ok().map(|v| (n, v))).collect()
    }

    pub fn axis_names(&self) -> &'static [AxisName] {
        self.required_axes()
    }
}
