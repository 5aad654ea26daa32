//! Standard and quantum limits, optimal quadrature and power, variational
//! readout, quadrature stitching and force sensitivity.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::homodyne::{cot_checked, displacement_psd, mechanical_term, SpectrumComponents};
use crate::model::{Detection, MechanicalMode, Power, Rho};

/// Optimal powers are capped here; hitting the cap sets `saturated`.
pub const POWER_CAP: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerOptimum {
    pub p: Power,
    pub saturated: bool,
}

impl PowerOptimum {
    pub(crate) fn capped(p: f64) -> Self {
        if p.is_finite() && p <= POWER_CAP {
            Self {
                p: Power(p),
                saturated: false,
            }
        } else {
            Self {
                p: Power(POWER_CAP),
                saturated: true,
            }
        }
    }
}

/// SQL added noise `|chi_m(rho)| = 1 / sqrt(1 + rho^2)`.
pub fn sql_psd(rho: Rho) -> f64 {
    1.0 / (1.0 + rho.0 * rho.0).sqrt()
}

/// `cot(phi_opt) = eps p rho |chi_m(rho)|^2`.
pub fn cot_phi_opt(rho: Rho, p: Power, det: &Detection) -> Result<f64> {
    let p = p.checked()?;
    Ok(det.epsilon * p * rho.0 * rho.chi_sq())
}

/// Quadrature minimizing the displacement PSD at fixed power, in `(0, pi)`.
pub fn phi_opt(rho: Rho, p: Power, det: &Detection) -> Result<f64> {
    Ok(1.0f64.atan2(cot_phi_opt(rho, p, det)?))
}

/// Displacement PSD at the optimal quadrature:
/// `2 (n_th + 1/2) |chi|^2 + 1 / (2 eps p) + (p/2) (1 + (1 - eps) rho^2) |chi|^4`.
pub fn psd_at_phi_opt(rho: Rho, p: Power, det: &Detection, mode: &MechanicalMode) -> Result<f64> {
    let p = p.checked()?;
    let eps = det.epsilon;
    let chi_sq = rho.chi_sq();
    Ok(mechanical_term(rho, mode)
        + 1.0 / (2.0 * eps * p)
        + 0.5 * p * (1.0 + (1.0 - eps) * rho.0 * rho.0) * chi_sq * chi_sq)
}

/// Component breakdown of the variational readout at one frequency.
pub fn variational_components(
    rho: Rho,
    p: Power,
    det: &Detection,
    mode: &MechanicalMode,
) -> Result<(f64, SpectrumComponents)> {
    let phi = phi_opt(rho, p, det)?;
    Ok((phi, displacement_psd(rho, p, phi, det, mode)?))
}

/// Power reaching the quantum limit at `rho` with optimal quadrature.
pub fn p_opt(rho: Rho, det: &Detection) -> PowerOptimum {
    let eps = det.epsilon;
    PowerOptimum::capped(
        1.0 / ((eps * (1.0 + (1.0 - eps) * rho.0 * rho.0)).sqrt() * rho.chi_sq()),
    )
}

/// Added noise at the quantum limit, `sqrt(1/eps + (1-eps)/eps rho^2) |chi|^2`.
pub fn ql_added(rho: Rho, det: &Detection) -> f64 {
    let eps = det.epsilon;
    (1.0 / eps + (1.0 - eps) / eps * rho.0 * rho.0).sqrt() * rho.chi_sq()
}

/// Total PSD at the efficiency-limited quantum limit.
pub fn ql_psd(rho: Rho, det: &Detection, mode: &MechanicalMode) -> f64 {
    mechanical_term(rho, mode) + ql_added(rho, det)
}

/// Optimal power for a fixed quadrature:
/// `sqrt((1 + cot^2 phi) / (eps |chi|^2))`, balancing imprecision and backaction.
pub fn p_opt_fixed_angle(rho: Rho, phi: f64, det: &Detection) -> Result<PowerOptimum> {
    let cot = cot_checked(phi)?;
    Ok(PowerOptimum::capped(
        ((1.0 + cot * cot) / (det.epsilon * rho.chi_sq())).sqrt(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyProduct {
    /// `S_II S_FF`
    pub lhs: f64,
    /// `1/4 + S_IF^2`
    pub rhs: f64,
}

impl UncertaintyProduct {
    pub fn excess(&self) -> f64 {
        self.lhs - self.rhs
    }
}

pub fn uncertainty_product(phi: f64, p: Power, det: &Detection) -> Result<UncertaintyProduct> {
    let p = p.checked()?;
    let cot = cot_checked(phi)?;
    let s_ii = (1.0 + cot * cot) / (2.0 * det.epsilon * p);
    let s_ff = 0.5 * p;
    let s_if = -0.5 * cot;
    Ok(UncertaintyProduct {
        lhs: s_ii * s_ff,
        rhs: 0.25 + s_if * s_if,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    Sql,
    /// SQL added noise plus thermal and zero-point motion.
    SqlTotal,
    Ql,
    VariationalFixedP,
    FixedAngle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveParams {
    pub p: Option<f64>,
    pub epsilon: Option<f64>,
    pub n_th: Option<f64>,
    pub phi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCurve {
    pub kind: CurveKind,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub params: CurveParams,
}

impl LimitCurve {
    /// SQL added noise only; the mechanical state is excluded.
    pub fn sql(grid: &[f64]) -> Self {
        Self {
            kind: CurveKind::Sql,
            grid: grid.to_vec(),
            values: grid.iter().map(|&r| sql_psd(Rho(r))).collect(),
            params: CurveParams {
                p: None,
                epsilon: Some(1.0),
                n_th: None,
                phi: Some(FRAC_PI_2),
            },
        }
    }

    /// SQL added noise on top of thermal and zero-point motion.
    pub fn sql_total(grid: &[f64], mode: &MechanicalMode) -> Self {
        Self {
            kind: CurveKind::SqlTotal,
            grid: grid.to_vec(),
            values: grid
                .iter()
                .map(|&r| mechanical_term(Rho(r), mode) + sql_psd(Rho(r)))
                .collect(),
            params: CurveParams {
                p: None,
                epsilon: Some(1.0),
                n_th: Some(mode.n_th),
                phi: Some(FRAC_PI_2),
            },
        }
    }

    pub fn ql(grid: &[f64], det: &Detection, mode: &MechanicalMode) -> Self {
        Self {
            kind: CurveKind::Ql,
            grid: grid.to_vec(),
            values: grid.iter().map(|&r| ql_psd(Rho(r), det, mode)).collect(),
            params: CurveParams {
                p: None,
                epsilon: Some(det.epsilon),
                n_th: Some(mode.n_th),
                phi: None,
            },
        }
    }

    pub fn fixed_angle(
        grid: &[f64],
        p: Power,
        phi: f64,
        det: &Detection,
        mode: &MechanicalMode,
        exec: Execution,
    ) -> Result<Self> {
        let values = exec.try_map(grid, |&r| {
            displacement_psd(Rho(r), p, phi, det, mode).map(|c| c.total)
        })?;
        Ok(Self {
            kind: CurveKind::FixedAngle,
            grid: grid.to_vec(),
            values,
            params: CurveParams {
                p: Some(p.0),
                epsilon: Some(det.epsilon),
                n_th: Some(mode.n_th),
                phi: Some(phi),
            },
        })
    }
}

/// Variational readout at fixed power: optimal quadrature at every point.
pub fn variational_spectrum(
    grid: &[f64],
    p: Power,
    det: &Detection,
    mode: &MechanicalMode,
    exec: Execution,
) -> Result<LimitCurve> {
    let values = exec.try_map(grid, |&r| psd_at_phi_opt(Rho(r), p, det, mode))?;
    Ok(LimitCurve {
        kind: CurveKind::VariationalFixedP,
        grid: grid.to_vec(),
        values,
        params: CurveParams {
            p: Some(p.0),
            epsilon: Some(det.epsilon),
            n_th: Some(mode.n_th),
            phi: None,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StitchedSpectrum {
    pub grid: Vec<f64>,
    pub chosen_phi: Vec<f64>,
    pub values: Vec<f64>,
}

/// Whether `(phi, value)` beats `best`: lower value, with exact ties going to
/// the quadrature closer to 90 degrees.
pub(crate) fn prefer(candidate: (f64, f64), best: (f64, f64)) -> bool {
    let distance = |phi: f64| (phi - FRAC_PI_2).abs();
    candidate.1 < best.1 || (candidate.1 == best.1 && distance(candidate.0) < distance(best.0))
}

/// Lower envelope of fixed-quadrature spectra measured at a common power.
/// Exact ties go to the quadrature closest to 90 degrees.
pub fn stitch_quadratures(curves: &[LimitCurve]) -> Result<StitchedSpectrum> {
    if curves.len() < 2 {
        return Err(Error::Shape(format!(
            "stitching needs at least two fixed-angle spectra, got {}",
            curves.len()
        )));
    }
    let first = &curves[0];
    for (i, c) in curves.iter().enumerate() {
        if c.kind != CurveKind::FixedAngle || c.params.phi.is_none() {
            return Err(Error::Shape(format!("spectrum {i} is not a fixed-angle spectrum")));
        }
        if c.grid != first.grid || c.values.len() != first.grid.len() {
            return Err(Error::Shape(format!("spectrum {i} is on a different grid")));
        }
        if c.params.p != first.params.p
            || c.params.epsilon != first.params.epsilon
            || c.params.n_th != first.params.n_th
        {
            return Err(Error::Shape(format!(
                "spectrum {i} was taken with different (p, eps, n_th)"
            )));
        }
    }

    let mut chosen_phi = Vec::with_capacity(first.grid.len());
    let mut values = Vec::with_capacity(first.grid.len());
    for i in 0..first.grid.len() {
        let mut best = &curves[0];
        for c in &curves[1..] {
            let phi = |c: &LimitCurve| c.params.phi.unwrap_or(FRAC_PI_2);
            if prefer((phi(c), c.values[i]), (phi(best), best.values[i])) {
                best = c;
            }
        }
        chosen_phi.push(best.params.phi.unwrap_or(FRAC_PI_2));
        values.push(best.values[i]);
    }
    Ok(StitchedSpectrum {
        grid: first.grid.clone(),
        chosen_phi,
        values,
    })
}

/// Dimensionless force PSD `S_xx / |chi_m|^2`.
pub fn force_psd(
    rho: Rho,
    p: Power,
    phi: f64,
    det: &Detection,
    mode: &MechanicalMode,
) -> Result<f64> {
    Ok(displacement_psd(rho, p, phi, det, mode)?.total / rho.chi_sq())
}

/// Force SQL relative to its on-resonance value, `sqrt(1 + rho^2)`.
pub fn force_sql(rho: Rho) -> f64 {
    (1.0 + rho.0 * rho.0).sqrt()
}

/// Force PSD at the optimal quadrature, and also at the optimal power when
/// `p` is `None`.
pub fn force_psd_opt(
    rho: Rho,
    det: &Detection,
    mode: &MechanicalMode,
    p: Option<Power>,
) -> Result<f64> {
    match p {
        Some(p) => Ok(psd_at_phi_opt(rho, p, det, mode)? / rho.chi_sq()),
        None => {
            let eps = det.epsilon;
            Ok(2.0 * (mode.n_th + 0.5) + (1.0 / eps + (1.0 - eps) / eps * rho.0 * rho.0).sqrt())
        }
    }
}
