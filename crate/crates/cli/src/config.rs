// Copyright 2026 The detune Authors
// SPDX-License-Identifier: Apache-2.0

//! Flat `key = value` run configuration.
//!
//! Blank lines and `#` comments are ignored. Every frequency-valued key is
//! angular (rad/us) unless `frequency_convention = cyclic`, in which case
//! those values are read as cycles/us and multiplied by 2 pi on input.

use std::fmt;
use std::path::Path;

use detune_core::experiment::{default_dt, default_duration, default_stride, snap_dt};
use detune_core::{
    Error as CoreError, ExperimentConfig, InitialState, NoiseConfig, NoiseToggles, RwaMode, SchemeKind, SchemeSpec,
    SignalAxis, SignalSpec,
};

/// Keys that configure a run.
pub const KEYS: &[&str] = &[
    "scheme",
    "omega0",
    "omega1",
    "omega2",
    "second_drive_freq",
    "t2_star",
    "tau_b",
    "delta_omega",
    "tau_omega",
    "duration",
    "dt",
    "stride",
    "trajectories",
    "seed",
    "rwa_mode",
    "signal_axis",
    "signal_g",
    "signal_omega_d",
    "signal_in_reference",
    "initial_state",
    "noise_b",
    "noise_d1",
    "noise_d2",
    "frequency_convention",
];

/// Keys written by manifests that carry no configuration.
pub const META_KEYS: &[&str] = &["version", "command", "runtime_s", "output", "plot", "input_frequency_convention"];

/// Keys whose values are angular frequencies.
const FREQUENCY_KEYS: &[&str] = &["omega0", "omega1", "omega2", "second_drive_freq", "signal_g", "signal_omega_d"];

/// A configuration error, tied to a key where one is responsible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: Option<String>,
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(key: &str, line: Option<usize>, message: impl Into<String>) -> Self {
        Self { key: Some(key.to_string()), line, message: message.into() }
    }

    fn general(message: impl Into<String>) -> Self {
        Self { key: None, line: None, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(key) = &self.key {
            write!(f, "key `{key}`: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

impl From<CoreError> for ConfigError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { name, reason } => ConfigError::at(name, None, reason),
            other => ConfigError::general(other.to_string()),
        }
    }
}

/// How frequency inputs are to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrequencyConvention {
    #[default]
    Angular,
    Cyclic,
}

impl FrequencyConvention {
    pub fn name(self) -> &'static str {
        match self {
            FrequencyConvention::Angular => "angular",
            FrequencyConvention::Cyclic => "cyclic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "angular" => Some(FrequencyConvention::Angular),
            "cyclic" => Some(FrequencyConvention::Cyclic),
            _ => None,
        }
    }

    /// Factor turning an input value into rad/us.
    pub fn factor(self) -> f64 {
        match self {
            FrequencyConvention::Angular => 1.0,
            FrequencyConvention::Cyclic => std::f64::consts::TAU,
        }
    }
}

/// Ordered `key = value` entries as written, before interpretation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    key: String,
    value: String,
    line: Option<usize>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError {
                    key: None,
                    line: Some(line_no),
                    message: format!("expected `key = value`, got `{content}`"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) && !META_KEYS.contains(&key) {
                return Err(ConfigError::at(key, Some(line_no), "unknown key"));
            }
            if raw.get(key).is_some() {
                return Err(ConfigError::at(key, Some(line_no), "given more than once"));
            }
            raw.entries.push(Entry { key: key.to_string(), value: value.to_string(), line: Some(line_no) });
        }
        Ok(raw)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|e| e.key == key).map(|e| e.value.as_str())
    }

    /// Sets or replaces a configuration key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if !KEYS.contains(&key) {
            return Err(ConfigError::at(key, None, "unknown key"));
        }
        match self.entries.iter_mut().find(|e| e.key == key) {
            Some(e) => {
                e.value = value.to_string();
                e.line = None;
            }
            None => self.entries.push(Entry { key: key.to_string(), value: value.to_string(), line: None }),
        }
        Ok(())
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.entries.iter().find(|e| e.key == key).and_then(|e| e.line)
    }

    fn number(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let Some(v) = self.get(key) else {
            return Ok(None);
        };
        let x: f64 = v.parse().map_err(|_| ConfigError::at(key, self.line(key), format!("`{v}` is not a number")))?;
        if !x.is_finite() {
            return Err(ConfigError::at(key, self.line(key), "must be finite"));
        }
        Ok(Some(x))
    }

    fn integer(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| ConfigError::at(key, self.line(key), format!("`{v}` is not a non-negative integer")))
            })
            .transpose()
    }

    fn flag(&self, key: &str) -> Result<Option<bool>, ConfigError> {
        self.get(key)
            .map(|v| match v {
                "true" | "on" | "yes" | "1" => Ok(true),
                "false" | "off" | "no" | "0" => Ok(false),
                _ => Err(ConfigError::at(key, self.line(key), format!("`{v}` is not a boolean"))),
            })
            .transpose()
    }

    fn choice<T>(&self, key: &str, parse: impl Fn(&str) -> Option<T>, allowed: &str) -> Result<Option<T>, ConfigError> {
        self.get(key)
            .map(|v| {
                parse(v).ok_or_else(|| ConfigError::at(key, self.line(key), format!("`{v}` is not one of {allowed}")))
            })
            .transpose()
    }

    /// Interprets the entries, filling in defaults and validating the result.
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let kind = self
            .choice("scheme", SchemeKind::parse, "free, single, double, tdd")?
            .ok_or_else(|| ConfigError::general("scheme missing"))?;
        let convention =
            self.choice("frequency_convention", FrequencyConvention::parse, "angular, cyclic")?.unwrap_or_default();
        let freq = |key: &str| -> Result<Option<f64>, ConfigError> {
            debug_assert!(FREQUENCY_KEYS.contains(&key));
            Ok(self.number(key)?.map(|v| v * convention.factor()))
        };

        // Built-in frequency defaults are read in the chosen convention too.
        let mut spec = SchemeSpec::new(kind);
        spec.omega0 = freq("omega0")?;
        spec.omega1 = freq("omega1")?.unwrap_or(spec.omega1 * convention.factor());
        spec.omega2 = freq("omega2")?.unwrap_or(spec.omega2 * convention.factor());
        spec.second_drive_freq = freq("second_drive_freq")?.unwrap_or(spec.omega1);
        if let Some(m) = self.choice("rwa_mode", RwaMode::parse, "rwa, counter-rotating")? {
            spec.rwa_mode = m;
        }
        spec.noise = NoiseToggles {
            magnetic: self.flag("noise_b")?.unwrap_or(true),
            drive1: self.flag("noise_d1")?.unwrap_or(true),
            drive2: self.flag("noise_d2")?.unwrap_or(true),
        };
        if spec.omega2 > 0.0 && spec.omega2 >= spec.omega1 {
            return Err(ConfigError::at(
                "omega2",
                self.line("omega2"),
                format!("must be smaller than omega1 = {}", spec.omega1),
            ));
        }

        let signal_axis = self.choice("signal_axis", SignalAxis::parse, "z, x")?;
        let signal_g = freq("signal_g")?;
        let signal_omega_d = freq("signal_omega_d")?;
        let signal = match (signal_axis, signal_g, signal_omega_d) {
            (Some(axis), Some(g), Some(omega_d)) => Some(SignalSpec { axis, g, omega_d }),
            (_, _, Some(_)) => {
                return Err(ConfigError::at(
                    "signal_omega_d",
                    self.line("signal_omega_d"),
                    "needs signal_axis and signal_g",
                ))
            }
            _ => None,
        };

        let mut noise = NoiseConfig::default();
        for (key, slot) in [
            ("t2_star", &mut noise.t2_star),
            ("tau_b", &mut noise.tau_b),
            ("delta_omega", &mut noise.delta_omega),
            ("tau_omega", &mut noise.tau_omega),
        ] {
            if let Some(v) = self.number(key)? {
                *slot = v;
            }
        }

        let duration_given = self.get("duration").is_some();
        let duration = self.number("duration")?.unwrap_or_else(|| default_duration(kind));
        let dt = self.number("dt")?.unwrap_or_else(|| snap_dt(duration, default_dt(&spec, signal.as_ref())));
        if duration.is_nan() || duration <= 0.0 {
            return Err(ConfigError::at("duration", self.line("duration"), "must be positive"));
        }
        if dt.is_nan() || dt <= 0.0 {
            return Err(ConfigError::at("dt", self.line("dt"), "must be positive"));
        }
        let steps = (duration / dt).round() as usize;
        let stride_given = self.get("stride").is_some();
        let sample_stride = match self.integer("stride")? {
            Some(s) => s as usize,
            None => default_stride(steps, 200),
        };

        let mut cfg = ExperimentConfig {
            scheme: spec,
            signal,
            duration,
            dt,
            sample_stride,
            n_traj: self.integer("trajectories")?.unwrap_or(1000) as usize,
            master_seed: self.integer("seed")?.unwrap_or(1),
            noise,
            initial_state: self.choice(
                "initial_state",
                InitialState::parse,
                "ground, excited, plus_x, minus_x, plus_y",
            )?,
            signal_in_reference: self.flag("signal_in_reference")?.unwrap_or(true),
        };
        cfg.initial_state = Some(cfg.initial());
        cfg.validate().map_err(|e| self.locate(e.into()))?;
        Ok(RunConfig { experiment: cfg, convention, signal_axis, signal_g, duration_given, stride_given })
    }

    fn locate(&self, mut e: ConfigError) -> ConfigError {
        if let Some(key) = &e.key {
            e.line = self.line(key);
        }
        e
    }
}

/// A resolved configuration. All frequencies are angular.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub experiment: ExperimentConfig,
    /// Convention the frequency inputs were given in.
    pub convention: FrequencyConvention,
    pub signal_axis: Option<SignalAxis>,
    /// Signal amplitude, also when the signal frequency is left to a sensing protocol.
    pub signal_g: Option<f64>,
    /// Whether `duration` was set explicitly rather than defaulted.
    pub duration_given: bool,
    pub stride_given: bool,
}

/// Parses and resolves configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    RawConfig::parse(text)?.resolve()
}

/// Reads configuration text from `path`.
pub fn read_raw_config(path: &Path) -> anyhow::Result<RawConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
    RawConfig::parse(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

/// `key = value` lines that resolve back to exactly `cfg`, frequencies in angular units.
pub fn render_config(cfg: &ExperimentConfig) -> String {
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    let s = &cfg.scheme;
    put("scheme", s.kind.name().into());
    put("frequency_convention", FrequencyConvention::Angular.name().into());
    if let Some(w0) = s.omega0 {
        put("omega0", w0.to_string());
    }
    put("omega1", s.omega1.to_string());
    put("omega2", s.omega2.to_string());
    put("second_drive_freq", s.second_drive_freq.to_string());
    put("rwa_mode", s.rwa_mode.name().into());
    put("noise_b", s.noise.magnetic.to_string());
    put("noise_d1", s.noise.drive1.to_string());
    put("noise_d2", s.noise.drive2.to_string());
    put("t2_star", cfg.noise.t2_star.to_string());
    put("tau_b", cfg.noise.tau_b.to_string());
    put("delta_omega", cfg.noise.delta_omega.to_string());
    put("tau_omega", cfg.noise.tau_omega.to_string());
    if let Some(sig) = &cfg.signal {
        put("signal_axis", sig.axis.name().into());
        put("signal_g", sig.g.to_string());
        put("signal_omega_d", sig.omega_d.to_string());
    }
    put("signal_in_reference", cfg.signal_in_reference.to_string());
    put("initial_state", cfg.initial().name().into());
    put("duration", cfg.duration.to_string());
    put("dt", cfg.dt.to_string());
    put("stride", cfg.sample_stride.to_string());
    put("trajectories", cfg.n_traj.to_string());
    put("seed", cfg.master_seed.to_string());
    out
}
