//! JSON configuration documents. Keys are flat and carry their unit as a
//! suffix (`_khz` for ordinary frequencies, `_us` for times, `_rad` for
//! angles); the document type is told apart by `kind` (sweep), `t_max_us`
//! (evolve) or `theta_rad` (protocol).

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::model::{Basis, BasisLabel, ModelParams};
use crate::propagator::{LAB_TOL_RANGE, MIN_SAMPLES};
use crate::units::{khz_to_rad, s_to_us, us_to_s};

pub const DEFAULT_EPSILON_KHZ: f64 = 200.0;
pub const DEFAULT_OMEGA_KHZ: f64 = 30.0;
pub const DEFAULT_HORIZON_PERIODS: f64 = 40.0;
pub const DEFAULT_SAMPLES: usize = 4096;
/// Shortest accepted spectral horizon, in periods of the expected coupling.
pub const MIN_HORIZON_PERIODS: f64 = 20.0;
/// Lab-frame carrier in units of ε when `carrier_khz` is not given.
pub const DEFAULT_CARRIER_RATIO: f64 = 1e3;

const MODEL_KEYS: [&str; 8] = [
    "epsilon_khz",
    "omega_a_khz",
    "omega_b_khz",
    "delta_khz",
    "detuning_a_khz",
    "detuning_b_khz",
    "phi_a_rad",
    "phi_b_rad",
];

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON_KHZ
}

fn default_omega() -> f64 {
    DEFAULT_OMEGA_KHZ
}

fn default_horizon_periods() -> f64 {
    DEFAULT_HORIZON_PERIODS
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

/// Model parameters as written in a config (kHz, rad).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default = "default_epsilon")]
    pub epsilon_khz: f64,
    #[serde(default = "default_omega")]
    pub omega_a_khz: f64,
    #[serde(default = "default_omega")]
    pub omega_b_khz: f64,
    /// Auxiliary-state gap δ.
    #[serde(default)]
    pub delta_khz: f64,
    #[serde(default)]
    pub detuning_a_khz: f64,
    #[serde(default)]
    pub detuning_b_khz: f64,
    #[serde(default)]
    pub phi_a_rad: f64,
    #[serde(default)]
    pub phi_b_rad: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            epsilon_khz: DEFAULT_EPSILON_KHZ,
            omega_a_khz: DEFAULT_OMEGA_KHZ,
            omega_b_khz: DEFAULT_OMEGA_KHZ,
            delta_khz: 0.0,
            detuning_a_khz: 0.0,
            detuning_b_khz: 0.0,
            phi_a_rad: 0.0,
            phi_b_rad: 0.0,
        }
    }
}

impl ModelConfig {
    pub fn to_params(&self) -> Result<ModelParams> {
        if !(self.epsilon_khz > 0.0) {
            return Err(Error::Config(format!(
                "epsilon_khz must be positive, got {}",
                self.epsilon_khz
            )));
        }
        for (key, value) in [
            ("omega_a_khz", self.omega_a_khz),
            ("omega_b_khz", self.omega_b_khz),
        ] {
            if !(value >= 0.0) {
                return Err(Error::Config(format!("{key} must be non-negative, got {value}")));
            }
        }
        let params = ModelParams::new(khz_to_rad(self.epsilon_khz))
            .with_couplings(khz_to_rad(self.omega_a_khz), khz_to_rad(self.omega_b_khz))
            .with_gap(khz_to_rad(self.delta_khz))
            .with_detunings(khz_to_rad(self.detuning_a_khz), khz_to_rad(self.detuning_b_khz))
            .with_phases(self.phi_a_rad, self.phi_b_rad);
        params.validate()?;
        Ok(params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// Δ_a = Δ_b = Δ swept at δ = 0.
    Detuning,
    /// Ω_a = Ω_b = Ω swept at Δ = δ = 0.
    Coupling,
    /// δ swept with the Stark-compensated detunings Δ_a = −δ/2 − ξ/2,
    /// Δ_b = δ/2 + ξ/2.
    Degeneracy,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Detuning => "detuning",
            Self::Coupling => "coupling",
            Self::Degeneracy => "degeneracy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSettings {
    kind: SweepKind,
    #[serde(alias = "start")]
    start_khz: f64,
    #[serde(alias = "stop")]
    stop_khz: f64,
    points: usize,
    #[serde(default = "default_horizon_periods")]
    horizon_periods: f64,
    #[serde(default = "default_samples")]
    samples: usize,
}

/// A validated parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub model: ModelConfig,
    /// Fixed parameters; the swept quantity is overwritten per point.
    pub fixed: ModelParams,
    pub start_khz: f64,
    pub stop_khz: f64,
    pub points: usize,
    pub horizon_periods: f64,
    pub samples: usize,
}

impl SweepSpec {
    pub fn new(
        kind: SweepKind,
        model: ModelConfig,
        start_khz: f64,
        stop_khz: f64,
        points: usize,
        horizon_periods: f64,
        samples: usize,
    ) -> Result<Self> {
        if points < 2 {
            return Err(Error::Config(format!("points must be at least 2, got {points}")));
        }
        if !(start_khz.is_finite() && stop_khz.is_finite() && start_khz < stop_khz) {
            return Err(Error::Config(format!(
                "start_khz ({start_khz}) must be below stop_khz ({stop_khz})"
            )));
        }
        if kind == SweepKind::Coupling && start_khz < 0.0 {
            return Err(Error::Config(
                "coupling sweep must start at a non-negative value".into(),
            ));
        }
        if !(horizon_periods >= MIN_HORIZON_PERIODS) {
            return Err(Error::Config(format!(
                "horizon_periods must be at least {MIN_HORIZON_PERIODS}, got {horizon_periods}"
            )));
        }
        if samples < MIN_SAMPLES {
            return Err(Error::Config(format!(
                "samples must be at least {MIN_SAMPLES}, got {samples}"
            )));
        }
        Ok(Self {
            kind,
            fixed: model.to_params()?,
            model,
            start_khz,
            stop_khz,
            points,
            horizon_periods,
            samples,
        })
    }

    /// Swept values (kHz), endpoints exact.
    pub fn grid(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                let k = k as f64;
                (self.start_khz * (last - k) + self.stop_khz * k) / last
            })
            .collect()
    }

    /// The equivalent config document.
    pub fn to_json(&self) -> Value {
        let settings = SweepSettings {
            kind: self.kind,
            start_khz: self.start_khz,
            stop_khz: self.stop_khz,
            points: self.points,
            horizon_periods: self.horizon_periods,
            samples: self.samples,
        };
        merge(&settings, &self.model)
    }

    /// Built-in sweeps over detuning, coupling and degeneracy at the
    /// headline ε = 200 kHz, Ω = 30 kHz point.
    pub fn preset(name: &str) -> Result<Self> {
        let model = ModelConfig::default();
        let (kind, start, stop, points) = match name {
            "fig4b" => (SweepKind::Detuning, -600.0, 600.0, 241),
            "fig5b" => (SweepKind::Coupling, 10.0, 1600.0, 200),
            "fig6" => (SweepKind::Degeneracy, -2000.0, 2000.0, 201),
            other => {
                return Err(Error::Config(format!(
                    "unknown preset `{other}` (expected one of {})",
                    PRESETS.join(", ")
                )))
            }
        };
        Self::new(kind, model, start, stop, points, 80.0, 8192)
    }
}

pub const PRESETS: [&str; 3] = ["fig4b", "fig5b", "fig6"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Rwa,
    Lab,
}

fn default_trace_points() -> usize {
    1001
}

fn default_frame() -> Frame {
    Frame::Rwa
}

fn default_tol() -> f64 {
    1e-10
}

fn default_initial() -> BasisLabel {
    BasisLabel::Down0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvolveSettings {
    t_max_us: f64,
    #[serde(default = "default_trace_points")]
    points: usize,
    #[serde(default = "default_frame")]
    frame: Frame,
    #[serde(default)]
    carrier_khz: Option<f64>,
    #[serde(default = "default_tol")]
    tol: f64,
    #[serde(default = "default_initial")]
    initial: BasisLabel,
}

/// A single time evolution sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolveSpec {
    pub params: ModelParams,
    pub t_max: f64,
    pub points: usize,
    pub frame: Frame,
    pub tol: f64,
    pub initial: BasisLabel,
}

impl EvolveSpec {
    fn from_parts(settings: EvolveSettings, model: ModelConfig) -> Result<Self> {
        if !(settings.t_max_us > 0.0 && settings.t_max_us.is_finite()) {
            return Err(Error::Config(format!(
                "t_max_us must be positive, got {}",
                settings.t_max_us
            )));
        }
        if settings.points < 2 {
            return Err(Error::Config(format!(
                "points must be at least 2, got {}",
                settings.points
            )));
        }
        if Basis::BARE.index_of(settings.initial).is_none() {
            return Err(Error::Config(format!(
                "initial must be a bare state (up0, down0, up2, down2), got {}",
                settings.initial
            )));
        }
        let mut params = model.to_params()?;
        if settings.frame == Frame::Lab {
            if !LAB_TOL_RANGE.contains(&settings.tol) {
                return Err(Error::Config(format!(
                    "tol {} outside [1e-12, 1e-4]",
                    settings.tol
                )));
            }
            let carrier = match settings.carrier_khz {
                Some(khz) if khz > 0.0 => khz_to_rad(khz),
                Some(khz) => return Err(Error::Config(format!("carrier_khz must be positive, got {khz}"))),
                None => DEFAULT_CARRIER_RATIO * params.epsilon,
            };
            params = params.with_lab_frame(carrier);
            params.validate()?;
        } else if settings.carrier_khz.is_some() {
            return Err(Error::Config("carrier_khz only applies to frame \"lab\"".into()));
        }
        Ok(Self {
            params,
            t_max: us_to_s(settings.t_max_us),
            points: settings.points,
            frame: settings.frame,
            tol: settings.tol,
            initial: settings.initial,
        })
    }

    pub fn times(&self) -> Vec<f64> {
        // Built on the µs grid so the exported times are the decimal values.
        let last = (self.points - 1) as f64;
        let t_max_us = s_to_us(self.t_max);
        (0..self.points)
            .map(|k| {
                if k == self.points - 1 {
                    self.t_max
                } else {
                    us_to_s(t_max_us * k as f64 / last)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProtocolSettings {
    theta_rad: f64,
    #[serde(default)]
    simulate: bool,
}

/// The superposition protocol; `simulate` carries the model used for the
/// dynamical inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSpec {
    pub theta: f64,
    pub simulate: Option<ModelParams>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedConfig {
    Sweep(SweepSpec),
    Evolve(EvolveSpec),
    Protocol(ProtocolSpec),
}

impl ParsedConfig {
    /// The model parameters of the document (the fixed set for sweeps).
    pub fn params(&self) -> Option<&ModelParams> {
        match self {
            Self::Sweep(s) => Some(&s.fixed),
            Self::Evolve(e) => Some(&e.params),
            Self::Protocol(p) => p.simulate.as_ref(),
        }
    }
}

fn merge<A: Serialize, B: Serialize>(a: &A, b: &B) -> Value {
    let mut map = Map::new();
    for part in [serde_json::to_value(a), serde_json::to_value(b)] {
        if let Ok(Value::Object(m)) = part {
            map.extend(m);
        }
    }
    Value::Object(map)
}

fn typed<T: DeserializeOwned>(map: Map<String, Value>) -> Result<T> {
    serde_path_to_error::deserialize(Value::Object(map)).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            Error::Config(e.into_inner().to_string())
        } else {
            Error::Config(format!("at `{path}`: {}", e.into_inner()))
        }
    })
}

/// Parses and validates a config document, applying defaults.
pub fn parse_config(text: &str) -> Result<ParsedConfig> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed document: {e}")))?;
    let Value::Object(map) = value else {
        return Err(Error::Config("config must be a JSON object".into()));
    };
    let markers: Vec<&str> = ["kind", "t_max_us", "theta_rad"]
        .into_iter()
        .filter(|k| map.contains_key(*k))
        .collect();
    let (model_part, rest): (Map<String, Value>, Map<String, Value>) = map
        .into_iter()
        .partition(|(k, _)| MODEL_KEYS.contains(&k.as_str()));
    let has_model_keys = !model_part.is_empty();
    let model: ModelConfig = typed(model_part)?;

    match markers.as_slice() {
        ["kind"] => {
            let s: SweepSettings = typed(rest)?;
            Ok(ParsedConfig::Sweep(SweepSpec::new(
                s.kind,
                model,
                s.start_khz,
                s.stop_khz,
                s.points,
                s.horizon_periods,
                s.samples,
            )?))
        }
        ["t_max_us"] => Ok(ParsedConfig::Evolve(EvolveSpec::from_parts(typed(rest)?, model)?)),
        ["theta_rad"] => {
            let s: ProtocolSettings = typed(rest)?;
            if !s.theta_rad.is_finite() {
                return Err(Error::Config("theta_rad must be finite".into()));
            }
            if has_model_keys && !s.simulate {
                return Err(Error::Config(
                    "model keys in a protocol config require \"simulate\": true".into(),
                ));
            }
            Ok(ParsedConfig::Protocol(ProtocolSpec {
                theta: s.theta_rad,
                simulate: if s.simulate { Some(model.to_params()?) } else { None },
            }))
        }
        [] => Err(Error::Config(
            "cannot tell the config type: expected `kind` (sweep), `t_max_us` (evolve) or `theta_rad` (protocol)"
                .into(),
        )),
        several => Err(Error::Config(format!(
            "conflicting config type keys: {}",
            several.join(", ")
        ))),
    }
}
