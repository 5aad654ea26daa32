//! Flat TOML sweep configuration.
//!
//! ```toml
//! readout = "homodyne"        # homodyne | variational | synodyne | stitched
//! rho_min = -10.0
//! rho_max = 10.0
//! rho_count = 201
//! rho_spacing = "linear"      # or "log-symmetric"
//! powers = [14.0]
//! angles_deg = [45.0, 90.0]   # homodyne and stitched readouts
//! epsilon = 0.35              # default 1
//! n_th = 1.29                 # default 0
//! include_thermal = true
//! include_zpm = true
//! beta = 1.02                 # synodyne only
//! synodyne_phi_deg = 0.0      # synodyne only
//! c_aa = 0.0                  # classical laser noise, shot-noise units
//! c_pp = 0.0
//! ```
//!
//! The physical parameters `omega_m_hz`, `gamma_hz`, `kappa_hz`, `g_hz` and
//! `n_ba` only matter when classical noise is switched on; they default to the
//! membrane-in-cavity values of [`SystemParams::membrane_experiment`].
//!
//! For `log-symmetric` spacing `rho_min` and `rho_max` are the smallest and
//! largest `|rho|`; the grid mirrors a logarithmic ladder onto both signs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homodyne::ClassicalNoise;
use crate::model::{
    hz, Detection, MechanicalMode, OpticalCavity, SystemParams,
};
use crate::synodyne::SynodyneLO;

pub const KNOWN_KEYS: &[&str] = &[
    "readout",
    "rho_min",
    "rho_max",
    "rho_count",
    "rho_spacing",
    "powers",
    "angles_deg",
    "epsilon",
    "n_th",
    "include_thermal",
    "include_zpm",
    "beta",
    "synodyne_phi_deg",
    "c_aa",
    "c_pp",
    "omega_m_hz",
    "gamma_hz",
    "kappa_hz",
    "g_hz",
    "n_ba",
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    #[default]
    Linear,
    LogSymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReadoutKind {
    Homodyne,
    Variational,
    Synodyne,
    Stitched,
}

/// Readout with its parameters resolved.
#[derive(Debug, Clone, PartialEq)]
pub enum Readout {
    /// Angles in degrees.
    Homodyne(Vec<f64>),
    Variational,
    Synodyne(SynodyneLO),
    /// Angles in degrees.
    Stitched(Vec<f64>),
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

fn default_omega_m_hz() -> f64 {
    1.596e6
}

fn default_gamma_hz() -> f64 {
    340.0
}

fn default_kappa_hz() -> f64 {
    2.5e6
}

fn default_g_hz() -> f64 {
    39.0
}

fn default_n_ba() -> f64 {
    0.16
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub readout: ReadoutKind,
    pub rho_min: f64,
    pub rho_max: f64,
    pub rho_count: usize,
    #[serde(default)]
    pub rho_spacing: Spacing,
    pub powers: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub angles_deg: Vec<f64>,
    #[serde(default = "one")]
    pub epsilon: f64,
    #[serde(default)]
    pub n_th: f64,
    #[serde(default = "yes")]
    pub include_thermal: bool,
    #[serde(default = "yes")]
    pub include_zpm: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synodyne_phi_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub c_aa: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub c_pp: f64,
    #[serde(default = "default_omega_m_hz")]
    pub omega_m_hz: f64,
    #[serde(default = "default_gamma_hz")]
    pub gamma_hz: f64,
    #[serde(default = "default_kappa_hz")]
    pub kappa_hz: f64,
    #[serde(default = "default_g_hz")]
    pub g_hz: f64,
    #[serde(default = "default_n_ba")]
    pub n_ba: f64,
}

/// Parsed spec plus the unknown keys that were ignored in lenient mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub spec: SweepSpec,
    pub ignored_keys: Vec<String>,
}

fn line_of(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        l.trim_start()
            .strip_prefix(key)
            .is_some_and(|rest| rest.trim_start().starts_with('='))
    })
}

/// Parses and validates a config. In strict mode any unknown key is an error.
pub fn parse_config(text: &str, strict: bool) -> Result<Parsed> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    let mut ignored_keys = Vec::new();
    for (key, value) in &table {
        if KNOWN_KEYS.contains(&key.as_str()) {
            continue;
        }
        if strict {
            let at = line_of(text, key).map(|l| format!(" at line {}", l + 1)).unwrap_or_default();
            return Err(Error::Config(format!("unknown key `{key}`{at}")));
        }
        if value.is_table() {
            return Err(Error::Config(format!(
                "unexpected section `[{key}]`; the config is a flat key-value document"
            )));
        }
        ignored_keys.push(key.clone());
    }
    let known: toml::Table = table
        .into_iter()
        .filter(|(k, _)| KNOWN_KEYS.contains(&k.as_str()))
        .collect();
    let spec: SweepSpec = known
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
    spec.validate()?;
    Ok(Parsed { spec, ignored_keys })
}

fn config_err(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("`{key}`: {msg}"))
}

fn finite(key: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(config_err(key, "must be finite"))
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(config_err(key, format!("must be > 0, got {v}")))
    }
}

impl SweepSpec {
    /// Minimal spec with all defaults applied.
    pub fn new(readout: ReadoutKind, rho_min: f64, rho_max: f64, rho_count: usize, powers: Vec<f64>) -> Self {
        Self {
            readout,
            rho_min,
            rho_max,
            rho_count,
            rho_spacing: Spacing::Linear,
            powers,
            angles_deg: Vec::new(),
            epsilon: 1.0,
            n_th: 0.0,
            include_thermal: true,
            include_zpm: true,
            beta: None,
            synodyne_phi_deg: None,
            c_aa: 0.0,
            c_pp: 0.0,
            omega_m_hz: default_omega_m_hz(),
            gamma_hz: default_gamma_hz(),
            kappa_hz: default_kappa_hz(),
            g_hz: default_g_hz(),
            n_ba: default_n_ba(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        finite("rho_min", self.rho_min)?;
        finite("rho_max", self.rho_max)?;
        if self.rho_count < 2 {
            return Err(config_err("rho_count", format!("grid needs at least 2 points, got {}", self.rho_count)));
        }
        match self.rho_spacing {
            Spacing::Linear if self.rho_max <= self.rho_min => {
                return Err(config_err("rho_max", "must exceed rho_min"));
            }
            Spacing::LogSymmetric if !(self.rho_min > 0.0 && self.rho_max > self.rho_min) => {
                return Err(config_err(
                    "rho_min",
                    "log-symmetric spacing needs 0 < rho_min < rho_max (magnitudes)",
                ));
            }
            _ => {}
        }
        if self.powers.is_empty() {
            return Err(config_err("powers", "at least one power is required"));
        }
        for &p in &self.powers {
            positive("powers", p)?;
        }
        for &a in &self.angles_deg {
            finite("angles_deg", a)?;
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(config_err("epsilon", format!("must lie in (0, 1], got {}", self.epsilon)));
        }
        if !(self.n_th.is_finite() && self.n_th >= 0.0) {
            return Err(config_err("n_th", format!("must be >= 0, got {}", self.n_th)));
        }
        for (key, v) in [("c_aa", self.c_aa), ("c_pp", self.c_pp), ("n_ba", self.n_ba)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(config_err(key, format!("must be >= 0, got {v}")));
            }
        }
        for (key, v) in [
            ("omega_m_hz", self.omega_m_hz),
            ("gamma_hz", self.gamma_hz),
            ("kappa_hz", self.kappa_hz),
            ("g_hz", self.g_hz),
        ] {
            positive(key, v)?;
        }
        match self.readout {
            ReadoutKind::Homodyne if self.angles_deg.is_empty() => {
                Err(config_err("angles_deg", "homodyne readout needs at least one angle"))
            }
            ReadoutKind::Stitched if self.angles_deg.len() < 2 => {
                Err(config_err("angles_deg", "stitched readout needs at least two angles"))
            }
            ReadoutKind::Synodyne if self.c_aa > 0.0 || self.c_pp > 0.0 => Err(config_err(
                "c_aa",
                "classical laser noise is only modeled for homodyne readouts",
            )),
            ReadoutKind::Synodyne => {
                let beta = self.beta.ok_or_else(|| config_err("beta", "required for synodyne readout"))?;
                positive("beta", beta)?;
                finite("synodyne_phi_deg", self.synodyne_phi_deg.unwrap_or(0.0))?;
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat spec always serializes")
    }

    pub fn readout(&self) -> Readout {
        match self.readout {
            ReadoutKind::Homodyne => Readout::Homodyne(self.angles_deg.clone()),
            ReadoutKind::Stitched => Readout::Stitched(self.angles_deg.clone()),
            ReadoutKind::Variational => Readout::Variational,
            ReadoutKind::Synodyne => Readout::Synodyne(SynodyneLO {
                beta: self.beta.unwrap_or(1.0),
                phi: self.synodyne_phi_deg.unwrap_or(0.0).to_radians(),
            }),
        }
    }

    pub fn rho_grid(&self) -> Vec<f64> {
        let n = self.rho_count;
        match self.rho_spacing {
            Spacing::Linear => super::linspace(self.rho_min, self.rho_max, n),
            Spacing::LogSymmetric => {
                let ladder = |k: usize| -> Vec<f64> {
                    if k == 1 {
                        vec![self.rho_min]
                    } else {
                        super::logspace(self.rho_min, self.rho_max, k)
                    }
                };
                let neg = n / 2;
                let mut out: Vec<f64> = ladder(neg).into_iter().rev().map(|r| -r).collect();
                out.extend(ladder(n - neg));
                out
            }
        }
    }

    pub fn detection(&self) -> Result<Detection> {
        Detection::new(self.epsilon)
    }

    pub fn classical_noise(&self) -> Result<ClassicalNoise> {
        ClassicalNoise::new(self.c_aa, self.c_pp)
    }

    /// Mechanical mode with the configured occupation. The thermal and
    /// zero-point switches are applied separately by the sweep.
    pub fn mode(&self) -> Result<MechanicalMode> {
        MechanicalMode::new(hz(self.omega_m_hz), hz(self.gamma_hz), self.n_th, self.n_ba)
    }

    pub fn system(&self) -> Result<SystemParams> {
        SystemParams::new(
            self.mode()?,
            OpticalCavity::resonant(hz(self.kappa_hz))?,
            hz(self.g_hz),
            self.detection()?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
readout = "variational"
rho_min = -10
rho_max = 10
rho_count = 21
powers = [50]
"#;

    #[test]
    fn minimal_config_defaults() {
        let spec = parse_config(MINIMAL, true).unwrap().spec;
        assert_eq!(spec.epsilon, 1.0);
        assert_eq!(spec.n_th, 0.0);
        assert_eq!(spec.rho_spacing, Spacing::Linear);
        assert!(spec.include_thermal && spec.include_zpm);
        assert_eq!(spec.rho_grid().len(), 21);
        assert_eq!(spec.rho_grid()[10], 0.0);
    }

    #[test]
    fn single_point_grid_rejected() {
        let text = MINIMAL.replace("rho_count = 21", "rho_count = 1");
        let err = parse_config(&text, true).unwrap_err();
        assert!(err.to_string().contains("rho_count"), "{err}");
    }

    #[test]
    fn unknown_key_named_in_strict_mode() {
        let text = format!("{MINIMAL}colour = \"blue\"\n");
        let err = parse_config(&text, true).unwrap_err();
        assert!(err.to_string().contains("`colour`"), "{err}");
        assert!(err.to_string().contains("line 7"), "{err}");
        let lenient = parse_config(&text, false).unwrap();
        assert_eq!(lenient.ignored_keys, vec!["colour".to_string()]);
    }

    #[test]
    fn missing_required_key() {
        let text = MINIMAL.replace("powers = [50]", "");
        let err = parse_config(&text, true).unwrap_err();
        assert!(err.to_string().contains("powers"), "{err}");
    }

    #[test]
    fn homodyne_needs_angles() {
        let text = MINIMAL.replace("variational", "homodyne");
        assert!(parse_config(&text, true).is_err());
        let ok = format!("{text}angles_deg = [90]\n");
        assert!(parse_config(&ok, true).is_ok());
    }

    #[test]
    fn non_positive_power_rejected() {
        let text = MINIMAL.replace("[50]", "[50, 0]");
        assert!(parse_config(&text, true).is_err());
    }

    #[test]
    fn device_parameters_round_trip() {
        let mut spec = SweepSpec::new(ReadoutKind::Homodyne, -10.0, 10.0, 201, vec![14.0]);
        spec.angles_deg = vec![45.0, 90.0];
        spec.epsilon = 0.35;
        spec.n_th = 1.29;
        spec.gamma_hz = 340.0;
        let back = parse_config(&spec.to_toml(), true).unwrap().spec;
        assert_eq!(back, spec);
    }

    #[test]
    fn log_symmetric_grid() {
        let mut spec = SweepSpec::new(ReadoutKind::Variational, 0.1, 100.0, 8, vec![1.0]);
        spec.rho_spacing = Spacing::LogSymmetric;
        spec.validate().unwrap();
        let g = spec.rho_grid();
        assert_eq!(g.len(), 8);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!((g[0] + 100.0).abs() < 1e-9 && (g[7] - 100.0).abs() < 1e-9);
        assert!((g[3] + 0.1).abs() < 1e-12 && (g[4] - 0.1).abs() < 1e-12);
    }
}
