// Cavity-resolved light and displacement spectra, including classical laser
// noise. Inputs are absolute: angular frequency, intracavity photon number.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{cot_checked, ClassicalNoise, ExternalForce, SpectrumComponents};
use crate::error::{ensure_non_negative, Error, Result};
use crate::grid::FrequencyGrid;
use crate::model::{
    chi_c, chi_m, chi_m_dimensionless, pi_minus, pi_plus, Detection, MechanicalMode, OpticalCavity,
    SystemParams, ZeroPoint,
};

/// Decomposition of the symmetrized light PSD (shot-noise units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightPsdTerms {
    pub shot: f64,
    /// Classical laser noise `S_LN`.
    pub classical: f64,
    /// `f_xx <xx>`: transduced resonator motion.
    pub motion: f64,
    /// Shot noise / resonator cross-correlation `S_mu_x`.
    pub shot_cross: f64,
    /// Classical noise / resonator cross-correlation `S_dy_x`.
    pub classical_cross: f64,
    pub total: f64,
}

struct CavityTerms {
    /// `|chi_c(-w)|^2 + |chi_c(w)|^2`
    sum_sq: f64,
    /// `|chi_c(-w)|^2 - |chi_c(w)|^2`
    diff_sq: f64,
    /// `chi_c(-w) chi_c(w)`
    product: Complex64,
    pi_plus: Complex64,
    pi_minus: Complex64,
}

impl CavityTerms {
    fn new(omega: f64, cav: &OpticalCavity) -> Self {
        let lower = chi_c(-omega, cav);
        let upper = chi_c(omega, cav);
        Self {
            sum_sq: lower.norm_sqr() + upper.norm_sqr(),
            diff_sq: lower.norm_sqr() - upper.norm_sqr(),
            product: lower * upper,
            pi_plus: pi_plus(omega, cav),
            pi_minus: pi_minus(omega, cav),
        }
    }

    /// `chi_c(-w) chi_c(w) e^{-2 i phi}`
    fn rotated(&self, phi: f64) -> Complex64 {
        self.product * Complex64::from_polar(1.0, -2.0 * phi)
    }
}

/// Displacement-to-light transfer function `f_xx(omega, phi)` (rad/s).
pub fn transfer_function(omega: f64, phi: f64, photons: f64, sys: &SystemParams) -> f64 {
    let c = CavityTerms::new(omega, &sys.cavity);
    let drive = sys.g * sys.g * photons;
    sys.detection.epsilon * sys.cavity.kappa * drive * (c.sum_sq - 2.0 * c.rotated(phi).re)
}

/// Classical laser noise in the detected light, `S_LN(omega, phi)`.
pub fn classical_noise_psd(
    omega: f64,
    phi: f64,
    det: &Detection,
    cav: &OpticalCavity,
    noise: &ClassicalNoise,
) -> f64 {
    let c = CavityTerms::new(omega, cav);
    let z = c.rotated(phi);
    let half_kappa_sq = 0.25 * cav.kappa * cav.kappa;
    det.epsilon
        * half_kappa_sq
        * (2.0 * (noise.c_aa + noise.c_pp) * c.sum_sq + 4.0 * (noise.c_aa - noise.c_pp) * z.re
            - 8.0 * noise.c_ap() * z.im)
}

/// Displacement-equivalent squashing from the correlation between classical
/// noise and the driven motion, in units of the on-resonance SQL:
/// `-(cot(phi) C_AA + C_AP) Im[kappa chi_c(omega) chi_m(rho)]`.
pub fn squashing_ratio(
    omega: f64,
    phi: f64,
    cav: &OpticalCavity,
    mode: &MechanicalMode,
    noise: &ClassicalNoise,
) -> Result<f64> {
    cav.require_resonant("squashing estimate assumes a resonant probe")?;
    if noise.is_zero() {
        return Ok(0.0);
    }
    let cot = cot_checked(phi)?;
    let response = cav.kappa * chi_c(omega, cav) * chi_m_dimensionless(mode.rho(omega));
    Ok(-(cot * noise.c_aa + noise.c_ap()) * response.im)
}

fn motion_terms(omega: f64, photons: f64, sys: &SystemParams, noise: &ClassicalNoise) -> (f64, f64, f64) {
    let mode = &sys.mode;
    let c = CavityTerms::new(omega, &sys.cavity);
    let chi_sq = chi_m(omega, mode).norm_sqr();
    let drive = sys.g * sys.g * photons;
    let half_kappa = 0.5 * sys.cavity.kappa;
    let thermal = mode.gamma * (mode.n_th + 0.5) * chi_sq;
    let backaction = drive * chi_sq * half_kappa * c.sum_sq;
    let classical = drive
        * chi_sq
        * half_kappa
        * (c.pi_plus.norm_sqr() * noise.c_aa + c.pi_minus.norm_sqr() * noise.c_pp
            - 4.0 * c.product.im * noise.c_ap());
    (thermal, backaction, classical)
}

/// Symmetrized resonator displacement PSD `<xx>(omega)` in units of `x_zp^2`
/// per rad/s: thermal, quantum backaction and classical-noise driven motion.
pub fn mechanical_psd_full(
    omega: f64,
    photons: f64,
    sys: &SystemParams,
    noise: &ClassicalNoise,
) -> Result<f64> {
    ensure_non_negative("photons", photons)?;
    let (thermal, backaction, classical) = motion_terms(omega, photons, sys, noise);
    Ok(thermal + backaction + classical)
}

/// `<xx>` on every bin of `grid`, plus an optional external force. The force
/// line `(F / 4 p_zp)^2 |chi_m|^2 delta(omega - omega_f)` is deposited into
/// the bin containing `omega_f` as bin mass divided by bin width.
pub fn mechanical_psd_on_grid(
    grid: &FrequencyGrid,
    photons: f64,
    sys: &SystemParams,
    noise: &ClassicalNoise,
    force: Option<(&ExternalForce, &ZeroPoint)>,
) -> Result<Vec<f64>> {
    let mut out = grid
        .centers()
        .map(|omega| mechanical_psd_full(omega, photons, sys, noise))
        .collect::<Result<Vec<_>>>()?;
    if let Some((f, zp)) = force {
        let bin = grid.bin_of(f.omega_f)?;
        out[bin] += force_line_mass(f, zp, &sys.mode) / grid.step;
    }
    Ok(out)
}

pub(crate) fn force_line_mass(f: &ExternalForce, zp: &ZeroPoint, mode: &MechanicalMode) -> f64 {
    let scaled = f.amplitude / (4.0 * zp.p_zp);
    scaled * scaled * chi_m(f.omega_f, mode).norm_sqr()
}

/// Full light PSD `1 + S_LN + f_xx <xx> + S_mu_x + S_dy_x`.
pub fn light_psd_full(
    omega: f64,
    phi: f64,
    photons: f64,
    sys: &SystemParams,
    noise: &ClassicalNoise,
) -> Result<LightPsdTerms> {
    ensure_non_negative("photons", photons)?;
    let eps = sys.detection.epsilon;
    let kappa = sys.cavity.kappa;
    let c = CavityTerms::new(omega, &sys.cavity);
    let z = c.rotated(phi);
    let drive = sys.g * sys.g * photons;
    let i_chi = Complex64::i() * chi_m(omega, &sys.mode);

    let classical = classical_noise_psd(omega, phi, &sys.detection, &sys.cavity, noise);
    let motion = transfer_function(omega, phi, photons, sys) * mechanical_psd_full(omega, photons, sys, noise)?;
    let shot_cross =
        eps * kappa * drive * (c.diff_sq * i_chi.im - 2.0 * z.im * i_chi.re);

    let half_kappa_sq = 0.25 * kappa * kappa;
    let (aa, pp, ap) = (noise.c_aa, noise.c_pp, noise.c_ap());
    let plus = i_chi * c.pi_plus;
    let minus = i_chi * c.pi_minus;
    let classical_cross = 4.0 * eps * drive * half_kappa_sq
        * (c.diff_sq * (aa * plus.im - ap * minus.im) + c.sum_sq * (ap * plus.re - pp * minus.re))
        - 8.0 * eps * drive * half_kappa_sq
            * (z.im * (aa * plus.re - ap * minus.re) + z.re * (ap * plus.re - pp * minus.re));

    Ok(LightPsdTerms {
        shot: 1.0,
        classical,
        motion,
        shot_cross,
        classical_cross,
        total: 1.0 + classical + motion + shot_cross + classical_cross,
    })
}

/// The full light PSD mapped back to displacement units: every term divided
/// by `f_xx` and normalized to the on-resonance SQL. Classical-noise terms
/// (imprecision, driven motion and the squashing cross-correlation) are
/// collected in `s_ln`, which is signed.
pub fn displacement_psd_full(
    omega: f64,
    phi: f64,
    photons: f64,
    sys: &SystemParams,
    noise: &ClassicalNoise,
) -> Result<SpectrumComponents> {
    let f_xx = transfer_function(omega, phi, photons, sys);
    if !(f_xx > 0.0) {
        return Err(Error::Divergence(
            "displacement transduction vanishes in this quadrature",
        ));
    }
    let light = light_psd_full(omega, phi, photons, sys, noise)?;
    let (thermal, backaction, classical_motion) = motion_terms(omega, photons, sys, noise);
    let half_gamma = 0.5 * sys.mode.gamma;
    Ok(SpectrumComponents::new(
        half_gamma * thermal,
        half_gamma / f_xx,
        half_gamma * backaction,
        half_gamma * light.shot_cross / f_xx,
        half_gamma * ((light.classical + light.classical_cross) / f_xx + classical_motion),
    ))
}
