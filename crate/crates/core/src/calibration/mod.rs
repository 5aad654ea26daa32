//! Parameter extraction: sideband-asymmetry thermometry, coupling
//! calibration, occupation rescaling and detection-efficiency composition.

mod fit;
mod synth;

pub use fit::{
    fit_lorentzian, initial_guess, Lorentzian, LorentzianFit, GRADIENT_TOLERANCE, MAX_ITERATIONS,
    MIN_SAMPLES, MIN_SPAN_LINEWIDTHS,
};
pub use synth::{
    linear_omegas, read_spectrum_csv, synth_sideband_spectrum, write_spectrum_csv, SPECTRUM_HEADER,
};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::model::{chi_c, hz, Detection, OpticalCavity};

/// `(omega, psd)` pairs, rad/s and shot-noise units.
pub type Samples = Vec<(f64, f64)>;

/// Red and blue heterodyne sidebands fitted with a shared linewidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidebandFit {
    /// rad/s
    pub gamma_fit: f64,
    pub a_red: f64,
    pub a_blue: f64,
    pub offset: f64,
    pub residual_rms: f64,
}

impl SidebandFit {
    pub fn n_th(&self) -> Result<f64> {
        n_th_from_sidebands(self.a_red, self.a_blue)
    }
}

/// Fits both sidebands independently and combines them. The linewidth and
/// offset are averaged; the residual is the rms over both spectra.
pub fn fit_sidebands(red: &[(f64, f64)], blue: &[(f64, f64)]) -> Result<SidebandFit> {
    let r = fit_lorentzian(red, None)?;
    let b = fit_lorentzian(blue, None)?;
    let n_r = red.len() as f64;
    let n_b = blue.len() as f64;
    Ok(SidebandFit {
        gamma_fit: 0.5 * (r.params.gamma + b.params.gamma),
        a_red: r.params.amplitude,
        a_blue: b.params.amplitude,
        offset: 0.5 * (r.params.offset + b.params.offset),
        residual_rms: ((n_r * r.residual_rms.powi(2) + n_b * b.residual_rms.powi(2)) / (n_r + n_b))
            .sqrt(),
    })
}

/// Synthetic red and blue sidebands: shared linewidth 2 pi x 325 Hz, red
/// amplitude 1.35, blue amplitude 0.78 on a unit shot-noise baseline, 400
/// points over +/- 5 linewidths. The two spectra use independent seeds
/// derived from `seed`.
pub fn synthetic_sidebands(seed: u64, sigma: f64) -> Result<(Samples, Samples)> {
    let center = hz(1.596e6);
    let gamma = hz(325.0);
    let omegas = linear_omegas(center, 5.0 * gamma, 400);
    let line = |amplitude| Lorentzian {
        center,
        gamma,
        amplitude,
        offset: 1.0,
    };
    let red = synth_sideband_spectrum(&line(1.35), &omegas, sigma, seed.wrapping_mul(2))?;
    let blue = synth_sideband_spectrum(&line(0.78), &omegas, sigma, seed.wrapping_mul(2).wrapping_add(1))?;
    Ok((red, blue))
}

/// `n_th = 1 / (A_r / A_b - 1)`; only the ratio of the amplitudes enters.
pub fn n_th_from_sidebands(a_red: f64, a_blue: f64) -> Result<f64> {
    let a_red = ensure_positive("a_red", a_red)?;
    let a_blue = ensure_positive("a_blue", a_blue)?;
    if a_red <= a_blue {
        return Err(Error::InvalidParameter {
            name: "a_red",
            value: a_red,
            reason: "red sideband must exceed the blue sideband for a thermal state",
        });
    }
    Ok(a_blue / (a_red - a_blue))
}

/// Inputs of the blue-sideband coupling calibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlueSidebandSetup {
    /// Mechanical linewidth (rad/s).
    pub gamma: f64,
    pub n_th: f64,
    /// rad/s
    pub omega_m: f64,
    /// Intracavity photons of the damping beam.
    pub n_damp: f64,
    pub detection: Detection,
    pub cavity: OpticalCavity,
}

impl BlueSidebandSetup {
    fn validated(&self) -> Result<(f64, f64)> {
        ensure_positive("gamma", self.gamma)?;
        ensure_positive("n_th", self.n_th)?;
        ensure_positive("omega_m", self.omega_m)?;
        ensure_positive("n_damp", self.n_damp)?;
        // A_b = g^2 N_damp * factor
        let factor = self.detection.epsilon
            * self.cavity.kappa
            * chi_c(self.omega_m, &self.cavity).norm()
            * 4.0
            * self.n_th
            / self.gamma;
        Ok((factor, self.n_damp))
    }
}

/// `g = sqrt(A_b Gamma / (eps kappa |chi_c(omega_m)| 4 n_th N_damp))` (rad/s).
pub fn g_from_blue_sideband(a_blue: f64, setup: &BlueSidebandSetup) -> Result<f64> {
    let a_blue = ensure_positive("a_blue", a_blue)?;
    let (factor, n_damp) = setup.validated()?;
    Ok((a_blue / (factor * n_damp)).sqrt())
}

/// Blue-sideband amplitude expected for coupling `g` (rad/s).
pub fn blue_sideband_amplitude(g: f64, setup: &BlueSidebandSetup) -> Result<f64> {
    let g = ensure_positive("g", g)?;
    let (factor, n_damp) = setup.validated()?;
    Ok(g * g * n_damp * factor)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingFit {
    /// rad/s
    pub g: f64,
    /// One-sigma uncertainty of `g` from the slope standard error.
    pub g_std: f64,
}

/// Fits `g^2 N_damp = g^2 * N_damp` through the origin over a series of
/// `(N_damp, g^2 N_damp)` points.
pub fn fit_coupling_slope(series: &[(f64, f64)]) -> Result<CouplingFit> {
    if series.len() < 2 {
        return Err(Error::Shape(format!(
            "slope fit needs at least two points, got {}",
            series.len()
        )));
    }
    let sxx: f64 = series.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = series.iter().map(|(x, y)| x * y).sum();
    if !(sxx > 0.0) {
        return Err(Error::Shape("all damping photon numbers are zero".into()));
    }
    let slope = sxy / sxx;
    if !(slope > 0.0) {
        return Err(Error::InvalidParameter {
            name: "slope",
            value: slope,
            reason: "g^2 must be positive",
        });
    }
    let dof = (series.len() - 1) as f64;
    let ssr: f64 = series.iter().map(|(x, y)| (y - slope * x).powi(2)).sum();
    let slope_std = (ssr / dof / sxx).sqrt();
    let g = slope.sqrt();
    Ok(CouplingFit {
        g,
        g_std: slope_std / (2.0 * g),
    })
}

/// `n_th = n0 Gamma0 / Gamma + n_ba`.
pub fn rescale_occupation(n0_gamma0: f64, gamma: f64, n_ba: f64) -> Result<f64> {
    let n0_gamma0 = ensure_non_negative("n0_gamma0", n0_gamma0)?;
    let gamma = ensure_positive("gamma", gamma)?;
    let n_ba = ensure_non_negative("n_ba", n_ba)?;
    Ok(n0_gamma0 / gamma + n_ba)
}

/// Thermal bath product `n0 Gamma0 = (n_th - n_ba) Gamma` from one measurement.
pub fn n0_gamma0(n_th: f64, gamma: f64, n_ba: f64) -> Result<f64> {
    let n_th = ensure_non_negative("n_th", n_th)?;
    let gamma = ensure_positive("gamma", gamma)?;
    let n_ba = ensure_non_negative("n_ba", n_ba)?;
    Ok((n_th - n_ba) * gamma)
}

fn ensure_fraction(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v,
            reason: "efficiency factor must lie in (0, 1]",
        })
    }
}

/// Detection efficiency factors; `eps = eps_meas eps_opt eps_vis^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyBudget {
    pub eps_meas: f64,
    pub eps_opt: f64,
    pub eps_vis: f64,
}

impl EfficiencyBudget {
    pub fn new(eps_meas: f64, eps_opt: f64, eps_vis: f64) -> Result<Self> {
        Ok(Self {
            eps_meas: ensure_fraction("eps_meas", eps_meas)?,
            eps_opt: ensure_fraction("eps_opt", eps_opt)?,
            eps_vis: ensure_fraction("eps_vis", eps_vis)?,
        })
    }

    /// Takes the measurement efficiency from a squeezing measurement,
    /// `eps_sq = eps_en eps_meas`, with `eps_en` the electronic-noise factor.
    pub fn from_squeezing(eps_sq: f64, eps_en: f64, eps_opt: f64, eps_vis: f64) -> Result<Self> {
        let eps_sq = ensure_fraction("eps_sq", eps_sq)?;
        let eps_en = ensure_fraction("eps_en", eps_en)?;
        Self::new(eps_sq / eps_en, eps_opt, eps_vis)
    }

    pub fn detection(&self) -> Result<Detection> {
        Detection::new(compose_efficiency(self))
    }
}

pub fn compose_efficiency(budget: &EfficiencyBudget) -> f64 {
    budget.eps_meas * budget.eps_opt * budget.eps_vis * budget.eps_vis
}
