//! Homodyne displacement and light spectra in dimensionless units.
//!
//! Displacement PSDs are normalized so that zero-point motion contributes 1 on
//! mechanical resonance, which is also the added noise at the on-resonance SQL.
//! The light PSD is in shot-noise units.

mod full;

pub use full::{
    classical_noise_psd, displacement_psd_full, light_psd_full, mechanical_psd_full,
    mechanical_psd_on_grid, squashing_ratio, transfer_function, LightPsdTerms,
};
pub(crate) use full::force_line_mass;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, Error, Result};
use crate::model::{
    chi_c_dimensionless, Detection, MechanicalMode, OpticalCavity, Power, Rho,
};

/// Below this |sin(phi)| the readout is treated as pure amplitude quadrature.
pub const AMPLITUDE_QUADRATURE_EPS: f64 = 1e-12;

/// The additive terms of the displacement PSD at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumComponents {
    /// Thermal plus zero-point motion.
    pub s_m: f64,
    /// Shot-noise imprecision.
    pub s_ii: f64,
    /// Backaction, already filtered by `|chi_m|^2`.
    pub s_ff: f64,
    /// Imprecision-backaction cross-correlation `2 Im[chi_m S_IF]`.
    pub s_corr: f64,
    /// Classical laser noise, including its correlation with the motion.
    pub s_ln: f64,
    pub total: f64,
}

impl SpectrumComponents {
    pub fn new(s_m: f64, s_ii: f64, s_ff: f64, s_corr: f64, s_ln: f64) -> Self {
        Self {
            s_m,
            s_ii,
            s_ff,
            s_corr,
            s_ln,
            total: s_m + s_ii + s_ff + s_corr + s_ln,
        }
    }

    pub fn with_s_m(self, s_m: f64) -> Self {
        Self::new(s_m, self.s_ii, self.s_ff, self.s_corr, self.s_ln)
    }

    pub fn with_s_ln(self, s_ln: f64) -> Self {
        Self::new(self.s_m, self.s_ii, self.s_ff, self.s_corr, s_ln)
    }

    /// Noise added by the probe: everything except the mechanical term.
    pub fn added(&self) -> f64 {
        self.total - self.s_m
    }
}

/// Classical laser noise as a fraction of intracavity shot noise.
///
/// The amplitude-phase cross term is always `sqrt(c_aa * c_pp)` (fully
/// correlated), see [`ClassicalNoise::c_ap`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassicalNoise {
    pub c_aa: f64,
    pub c_pp: f64,
}

impl ClassicalNoise {
    pub fn new(c_aa: f64, c_pp: f64) -> Result<Self> {
        Ok(Self {
            c_aa: ensure_non_negative("c_aa", c_aa)?,
            c_pp: ensure_non_negative("c_pp", c_pp)?,
        })
    }

    pub fn c_ap(&self) -> f64 {
        (self.c_aa * self.c_pp).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.c_aa == 0.0 && self.c_pp == 0.0
    }
}

/// A sinusoidal force applied to the resonator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExternalForce {
    /// N
    pub amplitude: f64,
    /// rad/s
    pub omega_f: f64,
    /// Relative phase (rad); only the synodyne readout resolves it.
    pub phi_f: f64,
}

impl ExternalForce {
    pub fn new(amplitude: f64, omega_f: f64, phi_f: f64) -> Result<Self> {
        Ok(Self {
            amplitude: ensure_non_negative("amplitude", amplitude)?,
            omega_f,
            phi_f,
        })
    }
}

pub(crate) fn cot_checked(phi: f64) -> Result<f64> {
    let s = phi.sin();
    if !phi.is_finite() || s.abs() < AMPLITUDE_QUADRATURE_EPS {
        return Err(Error::Divergence(
            "amplitude-quadrature readout (phi = 0 or 180 deg) carries no displacement information",
        ));
    }
    Ok(phi.cos() / s)
}

/// Mechanical term `2 (n_th + 1/2) |chi_m(rho)|^2`.
pub fn mechanical_term(rho: Rho, mode: &MechanicalMode) -> f64 {
    2.0 * (mode.n_th + 0.5) * rho.chi_sq()
}

fn components(
    rho: Rho,
    p: Power,
    phi: f64,
    det: &Detection,
    mode: &MechanicalMode,
    cavity_sq: f64,
) -> Result<SpectrumComponents> {
    let p = p.checked()?;
    let cot = cot_checked(phi)?;
    let chi_sq = rho.chi_sq();
    Ok(SpectrumComponents::new(
        mechanical_term(rho, mode),
        (1.0 + cot * cot) / (2.0 * det.epsilon * p * cavity_sq),
        0.5 * p * chi_sq * cavity_sq,
        -cot * rho.0 * chi_sq,
        0.0,
    ))
}

/// Displacement PSD for a broadband cavity (`|chi_c|^2 = 1`).
pub fn displacement_psd(
    rho: Rho,
    p: Power,
    phi: f64,
    det: &Detection,
    mode: &MechanicalMode,
) -> Result<SpectrumComponents> {
    components(rho, p, phi, det, mode, 1.0)
}

/// Displacement PSD keeping the weak cavity filtering of imprecision and
/// backaction. `omega` is the absolute angular frequency.
pub fn displacement_psd_cavity(
    omega: f64,
    p: Power,
    phi: f64,
    det: &Detection,
    mode: &MechanicalMode,
    cav: &OpticalCavity,
) -> Result<SpectrumComponents> {
    cav.require_resonant("cavity-filtered displacement PSD assumes a resonant probe")?;
    let cavity_sq = chi_c_dimensionless(omega, mode.omega_m, cav).norm_sqr();
    components(mode.rho(omega), p, phi, det, mode, cavity_sq)
}

/// Light PSD in shot-noise units, `2 eps p sin^2(phi) S_xx`, written so that
/// the amplitude quadrature and `p = 0` are finite.
pub fn light_psd(
    rho: Rho,
    phi: f64,
    p: Power,
    det: &Detection,
    mode: &MechanicalMode,
) -> Result<f64> {
    let p = ensure_non_negative("p", p.0)?;
    if !phi.is_finite() {
        return Err(Error::InvalidParameter {
            name: "phi",
            value: phi,
            reason: "must be finite",
        });
    }
    let (a, b) = light_coefficients(rho, p, det, mode);
    let s = phi.sin();
    Ok(1.0 + a * s * s - b * (2.0 * phi).sin())
}

// S_phi = 1 + a sin^2(phi) - b sin(2 phi)
fn light_coefficients(rho: Rho, p: f64, det: &Detection, mode: &MechanicalMode) -> (f64, f64) {
    let chi_sq = rho.chi_sq();
    let a = 2.0 * det.epsilon * p * (mechanical_term(rho, mode) + 0.5 * p * chi_sq);
    let b = det.epsilon * p * rho.0 * chi_sq;
    (a, b)
}

/// Quadrature of maximal ponderomotive squeezing and the light PSD there.
/// Returns `(phi, S_phi)` with `phi` in `[0, pi)`.
pub fn squeezing_optimum(
    rho: Rho,
    p: Power,
    det: &Detection,
    mode: &MechanicalMode,
) -> Result<(f64, f64)> {
    let p = ensure_non_negative("p", p.0)?;
    let (a, b) = light_coefficients(rho, p, det, mode);
    let half = 0.5 * a;
    let mut phi = 0.5 * b.atan2(half);
    if phi < 0.0 {
        phi += std::f64::consts::PI;
    }
    Ok((phi, 1.0 + half - half.hypot(b)))
}
