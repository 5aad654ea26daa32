//! Two-tone local-oscillator (synodyne) readout.
//!
//! The LO tones sit at `omega_L -/+ omega_m`, which demodulates the mechanical
//! resonance to DC. Every `rho` in this module is therefore measured from the
//! demodulated resonance; use [`rho_from_baseband`] or [`baseband_from_lab`]
//! to convert from other frequency axes.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::grid::FrequencyGrid;
use crate::homodyne::{force_line_mass, mechanical_term, ExternalForce, SpectrumComponents};
use crate::limits::PowerOptimum;
use crate::model::{chi_c, Detection, MechanicalMode, OpticalCavity, Power, Rho, ZeroPoint};

/// Below this `|alpha_p|` the LO carries no phase information.
const MIN_PHASE_WEIGHT: f64 = 1e-12;

/// Largest tolerated relative difference between the cavity response at the
/// two signal sidebands.
pub const MAX_CAVITY_ASYMMETRY: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynodyneLO {
    /// Sideband amplitude ratio `alpha_+ / alpha_-`.
    pub beta: f64,
    /// Global LO phase (rad).
    pub phi: f64,
}

impl SynodyneLO {
    pub fn new(beta: f64, phi: f64) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::InvalidParameter {
                name: "phi",
                value: phi,
                reason: "must be finite",
            });
        }
        Ok(Self {
            beta: ensure_positive("beta", beta)?,
            phi,
        })
    }

    /// Like [`new`](Self::new), but also checks that the cavity treats the
    /// upper and lower signal sidebands alike out to `max_rho` linewidths.
    pub fn for_cavity(
        beta: f64,
        phi: f64,
        mode: &MechanicalMode,
        cav: &OpticalCavity,
        max_rho: f64,
    ) -> Result<Self> {
        let asym = cavity_asymmetry(mode, cav, max_rho)?;
        if asym >= MAX_CAVITY_ASYMMETRY {
            return Err(Error::OutOfRange {
                value: asym,
                min: 0.0,
                max: MAX_CAVITY_ASYMMETRY,
            });
        }
        Self::new(beta, phi)
    }

    /// `(alpha_a, alpha_p)` normalized by `alpha_-`.
    pub fn coefficients(&self) -> (Complex64, Complex64) {
        let lower = Complex64::from_polar(1.0, -self.phi);
        let upper = Complex64::from_polar(self.beta, self.phi);
        let alpha_a = 0.5 * (lower + upper);
        let alpha_p = Complex64::new(0.0, -0.5) * (lower - upper);
        (alpha_a, alpha_p)
    }

    /// `(|alpha_a|^2 + |alpha_p|^2) / |alpha_p|^2`.
    pub fn shot_noise_factor(&self) -> f64 {
        let b = self.beta;
        2.0 * (1.0 + b * b) / self.denominator()
    }

    /// `Im[alpha_a* alpha_p] / |alpha_p|^2`.
    pub fn correlation_factor(&self) -> f64 {
        let b = self.beta;
        (b * b - 1.0) / self.denominator()
    }

    // 4 |alpha_p|^2
    fn denominator(&self) -> f64 {
        let b = self.beta;
        (1.0 - b).powi(2) + 2.0 * b * (1.0 - (2.0 * self.phi).cos())
    }

    fn require_phase_weight(&self) -> Result<()> {
        if self.denominator().sqrt() / 2.0 < MIN_PHASE_WEIGHT {
            return Err(Error::Divergence(
                "LO has no phase component (alpha_p = 0); the readout carries no displacement information",
            ));
        }
        Ok(())
    }
}

pub fn lo_coefficients(lo: &SynodyneLO) -> Result<(Complex64, Complex64)> {
    ensure_positive("beta", lo.beta)?;
    Ok(lo.coefficients())
}

/// Maximum relative difference of `|chi_c|^2` between the two signal
/// sidebands `+omega_m + delta` and `-omega_m + delta` that demodulate to the
/// same baseband frequency, for `|delta| <= max_rho * Gamma / 2`.
pub fn cavity_asymmetry(mode: &MechanicalMode, cav: &OpticalCavity, max_rho: f64) -> Result<f64> {
    let max_rho = ensure_non_negative("max_rho", max_rho)?;
    const STEPS: i32 = 64;
    let mut worst: f64 = 0.0;
    for i in -STEPS..=STEPS {
        let delta = 0.5 * mode.gamma * max_rho * f64::from(i) / f64::from(STEPS);
        let upper = chi_c(mode.omega_m + delta, cav).norm_sqr();
        let lower = chi_c(-mode.omega_m + delta, cav).norm_sqr();
        worst = worst.max((upper - lower).abs() / upper.max(lower));
    }
    Ok(worst)
}

/// Baseband frequency after demodulation of a lab-frame sideband frequency.
pub fn baseband_from_lab(omega_lab: f64, mode: &MechanicalMode) -> f64 {
    omega_lab - mode.omega_m
}

/// `rho` of a baseband frequency (the demodulated resonance sits at 0).
pub fn rho_from_baseband(omega_baseband: f64, mode: &MechanicalMode) -> Rho {
    Rho(2.0 * omega_baseband / mode.gamma)
}

/// Synodyne displacement PSD split into the same components as homodyne.
/// `s_corr` holds `-|chi_m|^2 Im[alpha_a* alpha_p] / |alpha_p|^2`.
pub fn synodyne_components(
    rho: Rho,
    p: Power,
    lo: &SynodyneLO,
    det: &Detection,
    mode: &MechanicalMode,
) -> Result<SpectrumComponents> {
    let p = p.checked()?;
    lo.require_phase_weight()?;
    let chi_sq = rho.chi_sq();
    Ok(SpectrumComponents::new(
        mechanical_term(rho, mode),
        lo.shot_noise_factor() / (2.0 * det.epsilon * p),
        0.5 * p * chi_sq,
        -chi_sq * lo.correlation_factor(),
        0.0,
    ))
}

pub fn synodyne_psd(
    rho: Rho,
    p: Power,
    lo: &SynodyneLO,
    det: &Detection,
    mode: &MechanicalMode,
) -> Result<f64> {
    Ok(synodyne_components(rho, p, lo, det, mode)?.total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `phi = 90 deg`, valid while `eps p |chi_m|^2 < 1`.
    Phase,
    /// `phi = 0`, valid once `eps p |chi_m|^2 > 1`.
    Amplitude,
    Auto,
}

/// Optimal LO at fixed `(rho, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaOptimum {
    pub beta: f64,
    pub branch: Branch,
    pub lo: SynodyneLO,
}

/// Optimal sideband ratio `(1 + x) / |1 - x|` with `x = eps p |chi_m|^2`.
pub fn beta_opt(rho: Rho, p: Power, det: &Detection, branch: Branch) -> Result<BetaOptimum> {
    let p = p.checked()?;
    let x = det.epsilon * p * rho.chi_sq();
    if x == 1.0 {
        return Err(Error::BranchPole(x));
    }
    let natural = if x < 1.0 { Branch::Phase } else { Branch::Amplitude };
    let chosen = match branch {
        Branch::Auto => natural,
        b if b == natural => b,
        Branch::Phase => {
            return Err(Error::Unsupported(
                "phase branch needs eps p |chi_m|^2 < 1; use the amplitude branch",
            ))
        }
        Branch::Amplitude => {
            return Err(Error::Unsupported(
                "amplitude branch needs eps p |chi_m|^2 > 1; use the phase branch",
            ))
        }
    };
    let beta = (1.0 + x) / (1.0 - x).abs();
    let phi = match chosen {
        Branch::Phase => FRAC_PI_2,
        _ => 0.0,
    };
    Ok(BetaOptimum {
        beta,
        branch: chosen,
        lo: SynodyneLO { beta, phi },
    })
}

/// Variational synodyne PSD:
/// `2 (n_th + 1/2) |chi|^2 + 1 / (2 eps p) + (p/2) ((1 - eps) + rho^2) |chi|^4`.
pub fn synodyne_variational(
    rho: Rho,
    p: Power,
    det: &Detection,
    mode: &MechanicalMode,
) -> Result<f64> {
    let p = p.checked()?;
    let eps = det.epsilon;
    let chi_sq = rho.chi_sq();
    Ok(mechanical_term(rho, mode)
        + 1.0 / (2.0 * eps * p)
        + 0.5 * p * ((1.0 - eps) + rho.0 * rho.0) * chi_sq * chi_sq)
}

/// Power minimizing [`synodyne_variational`]. Saturates for an ideal
/// detector on resonance, where the optimum lies at infinite power.
pub fn synodyne_p_opt(rho: Rho, det: &Detection) -> PowerOptimum {
    let eps = det.epsilon;
    PowerOptimum::capped(1.0 / ((eps * ((1.0 - eps) + rho.0 * rho.0)).sqrt() * rho.chi_sq()))
}

/// Variational synodyne PSD at the optimal power. In the saturated case this
/// is the limiting value, with no added noise.
pub fn synodyne_ql(rho: Rho, det: &Detection, mode: &MechanicalMode) -> f64 {
    let eps = det.epsilon;
    mechanical_term(rho, mode) + ((1.0 - eps) / eps + rho.0 * rho.0 / eps).sqrt() * rho.chi_sq()
}

/// Displacement PSD of an external force, binned on a baseband grid.
///
/// The force appears at `omega_f - omega_m` and `omega_m - omega_f`. When
/// both land in the same bin they interfere, so an on-resonance force is
/// seen in a single quadrature.
pub fn synodyne_force_response(
    force: &ExternalForce,
    lo: &SynodyneLO,
    mode: &MechanicalMode,
    zp: &ZeroPoint,
    grid: &FrequencyGrid,
) -> Result<Vec<f64>> {
    lo.require_phase_weight()?;
    let (_, alpha_p) = lo.coefficients();
    let mass = force_line_mass(force, zp, mode) / grid.step;
    let up = grid.bin_of(force.omega_f - mode.omega_m)?;
    let down = grid.bin_of(mode.omega_m - force.omega_f)?;

    let mut out = vec![0.0; grid.count];
    if up == down {
        let rotated = alpha_p * Complex64::from_polar(1.0, -force.phi_f);
        let sum = rotated + rotated.conj();
        out[up] += mass * sum.norm_sqr() / (2.0 * alpha_p.norm_sqr());
    } else {
        out[up] += 0.5 * mass;
        out[down] += 0.5 * mass;
    }
    Ok(out)
}
