//! Physical parameters, unit conventions and susceptibilities.
//!
//! All frequencies are angular (rad/s) and all angles are radians. Conversion
//! from ordinary frequency (Hz) and degrees happens at the configuration
//! boundary via [`hz`] and [`f64::to_radians`].
//!
//! Two normalizations are used by every spectrum in the crate:
//!
//! * the dimensionless mechanical detuning `rho = 2 (omega - omega_m) / Gamma`;
//! * the probe power `p`, normalized to the photon number needed to reach the
//!   standard quantum limit on mechanical resonance. The cooperativity is `p / 4`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Linewidth-to-frequency ratio below which the mode counts as high-Q.
pub const HIGH_Q_THRESHOLD: f64 = 1e-3;

/// Converts an ordinary frequency in Hz to angular frequency in rad/s.
pub fn hz(f: f64) -> f64 {
    2.0 * PI * f
}

/// Converts an angular frequency in rad/s to ordinary frequency in Hz.
pub fn to_hz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

/// Dimensionless mechanical detuning `2 (omega - omega_m) / Gamma`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Rho(pub f64);

impl Rho {
    pub fn from_omega(omega: f64, mode: &MechanicalMode) -> Self {
        Rho(2.0 * (omega - mode.omega_m) / mode.gamma)
    }

    pub fn to_omega(self, mode: &MechanicalMode) -> f64 {
        mode.omega_m + 0.5 * self.0 * mode.gamma
    }

    /// `|chi_m(rho)|^2 = 1 / (1 + rho^2)`.
    pub fn chi_sq(self) -> f64 {
        1.0 / (1.0 + self.0 * self.0)
    }
}

impl From<f64> for Rho {
    fn from(rho: f64) -> Self {
        Rho(rho)
    }
}

/// Probe power normalized to the on-resonance SQL power.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Power(pub f64);

impl Power {
    pub fn cooperativity(self) -> f64 {
        self.0 / 4.0
    }

    pub(crate) fn checked(self) -> Result<f64> {
        if !self.0.is_finite() || self.0 < 0.0 {
            return Err(Error::InvalidParameter {
                name: "p",
                value: self.0,
                reason: "must be finite and >= 0",
            });
        }
        if self.0 == 0.0 {
            return Err(Error::Divergence(
                "zero probe power gives infinite imprecision",
            ));
        }
        Ok(self.0)
    }
}

impl From<f64> for Power {
    fn from(p: f64) -> Self {
        Power(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanicalMode {
    /// Resonance frequency (rad/s).
    pub omega_m: f64,
    /// Effective linewidth including optical damping (rad/s).
    pub gamma: f64,
    /// Mean thermal phonon occupation.
    pub n_th: f64,
    /// Backaction cooling floor.
    pub n_ba: f64,
}

impl MechanicalMode {
    pub fn new(omega_m: f64, gamma: f64, n_th: f64, n_ba: f64) -> Result<Self> {
        Ok(Self {
            omega_m: ensure_positive("omega_m", omega_m)?,
            gamma: ensure_positive("gamma", gamma)?,
            n_th: ensure_non_negative("n_th", n_th)?,
            n_ba: ensure_non_negative("n_ba", n_ba)?,
        })
    }

    /// Mode used by the purely dimensionless spectra, where only `n_th` matters.
    pub fn with_occupation(n_th: f64) -> Result<Self> {
        let reference = SystemParams::membrane_experiment();
        Self::new(reference.mode.omega_m, reference.mode.gamma, n_th, 0.0)
    }

    pub fn quality_factor(&self) -> f64 {
        self.omega_m / self.gamma
    }

    /// The dimensionless spectra drop terms of order `Gamma / omega_m`.
    pub fn is_high_q(&self) -> bool {
        self.gamma / self.omega_m < HIGH_Q_THRESHOLD
    }

    pub fn rho(&self, omega: f64) -> Rho {
        Rho::from_omega(omega, self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalCavity {
    /// Energy decay rate (rad/s).
    pub kappa: f64,
    /// Probe detuning from the cavity resonance (rad/s).
    pub delta: f64,
}

impl OpticalCavity {
    pub fn new(kappa: f64, delta: f64) -> Result<Self> {
        if !delta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "delta",
                value: delta,
                reason: "must be finite",
            });
        }
        Ok(Self {
            kappa: ensure_positive("kappa", kappa)?,
            delta,
        })
    }

    pub fn resonant(kappa: f64) -> Result<Self> {
        Self::new(kappa, 0.0)
    }

    pub fn is_resonant(&self) -> bool {
        self.delta == 0.0
    }

    pub(crate) fn require_resonant(&self, what: &'static str) -> Result<()> {
        if self.is_resonant() {
            Ok(())
        } else {
            Err(Error::Unsupported(what))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    /// Total quantum efficiency, in (0, 1].
    pub epsilon: f64,
}

impl Detection {
    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon.is_finite() && epsilon > 0.0 && epsilon <= 1.0 {
            Ok(Self { epsilon })
        } else {
            Err(Error::InvalidParameter {
                name: "epsilon",
                value: epsilon,
                reason: "quantum efficiency must lie in (0, 1]",
            })
        }
    }

    pub fn ideal() -> Self {
        Self { epsilon: 1.0 }
    }
}

/// Zero-point displacement and momentum scales of the mechanical mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroPoint {
    /// m
    pub x_zp: f64,
    /// `hbar / (2 x_zp)`
    pub p_zp: f64,
}

impl ZeroPoint {
    pub const HBAR: f64 = 1.054_571_817e-34;

    pub fn from_mass(mass_kg: f64, omega_m: f64) -> Result<Self> {
        let mass = ensure_positive("mass", mass_kg)?;
        let omega = ensure_positive("omega_m", omega_m)?;
        let x_zp = (Self::HBAR / (2.0 * mass * omega)).sqrt();
        Ok(Self {
            x_zp,
            p_zp: Self::HBAR / (2.0 * x_zp),
        })
    }

    /// On-resonance SQL displacement PSD `2 x_zp^2 / Gamma` (m^2/Hz).
    pub fn sql_displacement(&self, gamma: f64) -> f64 {
        2.0 * self.x_zp * self.x_zp / gamma
    }

    /// On-resonance SQL force PSD `p_zp^2 Gamma / 2` (N^2/Hz).
    pub fn sql_force(&self, gamma: f64) -> f64 {
        self.p_zp * self.p_zp * gamma / 2.0
    }
}

/// Full set of physical parameters for the cavity-resolved expressions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub mode: MechanicalMode,
    pub cavity: OpticalCavity,
    /// Single-photon optomechanical coupling (rad/s).
    pub g: f64,
    pub detection: Detection,
}

impl SystemParams {
    pub fn new(
        mode: MechanicalMode,
        cavity: OpticalCavity,
        g: f64,
        detection: Detection,
    ) -> Result<Self> {
        Ok(Self {
            mode,
            cavity,
            g: ensure_positive("g", g)?,
            detection,
        })
    }

    /// Membrane-in-cavity parameters: (2,2) mode at 1.596 MHz damped to
    /// 340 Hz, 2.50 MHz cavity, g/2pi = 39 Hz, 35 % detection efficiency,
    /// 1.29 thermal phonons above a 0.16 backaction floor.
    pub fn membrane_experiment() -> Self {
        Self {
            mode: MechanicalMode {
                omega_m: hz(1.596e6),
                gamma: hz(340.0),
                n_th: 1.29,
                n_ba: 0.16,
            },
            cavity: OpticalCavity {
                kappa: hz(2.50e6),
                delta: 0.0,
            },
            g: hz(39.0),
            detection: Detection { epsilon: 0.35 },
        }
    }

    /// Intracavity photon number for a normalized power.
    pub fn photons(&self, p: Power) -> Result<f64> {
        Ok(p.0 * sql_photon_number(self.mode.omega_m, self.g, &self.mode, &self.cavity)?)
    }

    /// Normalized power for an intracavity photon number.
    pub fn power(&self, photons: f64) -> Result<Power> {
        Ok(Power(
            photons / sql_photon_number(self.mode.omega_m, self.g, &self.mode, &self.cavity)?,
        ))
    }
}

/// `chi_m(omega) = (Gamma/2 - i (omega - omega_m))^-1`.
pub fn chi_m(omega: f64, mode: &MechanicalMode) -> Complex64 {
    Complex64::new(0.5 * mode.gamma, -(omega - mode.omega_m)).inv()
}

/// `chi_m(rho) / |chi_m(omega_m)| = (1 - i rho)^-1`.
pub fn chi_m_dimensionless(rho: Rho) -> Complex64 {
    Complex64::new(1.0, -rho.0).inv()
}

/// `chi_c(omega) = (kappa/2 - i (omega + Delta))^-1`.
pub fn chi_c(omega: f64, cav: &OpticalCavity) -> Complex64 {
    Complex64::new(0.5 * cav.kappa, -(omega + cav.delta)).inv()
}

/// Constructive interference `chi_c*(-omega) + chi_c(omega)`.
pub fn pi_plus(omega: f64, cav: &OpticalCavity) -> Complex64 {
    chi_c(-omega, cav).conj() + chi_c(omega, cav)
}

/// Destructive interference `i (chi_c*(-omega) - chi_c(omega))`.
pub fn pi_minus(omega: f64, cav: &OpticalCavity) -> Complex64 {
    Complex64::i() * (chi_c(-omega, cav).conj() - chi_c(omega, cav))
}

/// Cavity susceptibility normalized to its value on mechanical resonance.
pub fn chi_c_dimensionless(omega: f64, omega_m: f64, cav: &OpticalCavity) -> Complex64 {
    chi_c(omega, cav) / chi_c(omega_m, cav).norm()
}

/// Intracavity photon number reaching the SQL at `omega`:
/// `Gamma sqrt(1 + rho^2) / (4 kappa g^2 |chi_c(omega)|^2)`.
pub fn sql_photon_number(
    omega: f64,
    g: f64,
    mode: &MechanicalMode,
    cav: &OpticalCavity,
) -> Result<f64> {
    cav.require_resonant("SQL photon number is defined for a resonant probe (delta = 0)")?;
    ensure_positive("g", g)?;
    let rho = mode.rho(omega);
    Ok(mode.gamma * (1.0 + rho.0 * rho.0).sqrt()
        / (4.0 * cav.kappa * g * g * chi_c(omega, cav).norm_sqr()))
}
