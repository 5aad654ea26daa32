//! Model curves behind the built-in figures, as data tables.
//!
//! Ids ending in `-model` cover figures that also show measured points; only
//! the theory curves are produced for those.

use std::fmt;
use std::str::FromStr;

use super::table::{DataTable, TableMetadata};
use super::{linspace, logspace};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::homodyne::{displacement_psd, light_psd, mechanical_term, squeezing_optimum};
use crate::limits::{
    phi_opt, psd_at_phi_opt, ql_psd, sql_psd, stitch_quadratures, variational_spectrum, LimitCurve,
};
use crate::model::{Detection, MechanicalMode, Power, Rho};
use crate::synodyne::{synodyne_psd, synodyne_variational, SynodyneLO};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig1a,
    Fig1b,
    Fig1d,
    Fig2aModel,
    Fig2bModel,
    Fig3aModel,
    Fig3bModel,
    FigS2a,
    FigS2b,
}

impl FigureId {
    pub const ALL: [FigureId; 9] = [
        FigureId::Fig1a,
        FigureId::Fig1b,
        FigureId::Fig1d,
        FigureId::Fig2aModel,
        FigureId::Fig2bModel,
        FigureId::Fig3aModel,
        FigureId::Fig3bModel,
        FigureId::FigS2a,
        FigureId::FigS2b,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Fig1a => "1a",
            FigureId::Fig1b => "1b",
            FigureId::Fig1d => "1d",
            FigureId::Fig2aModel => "2a-model",
            FigureId::Fig2bModel => "2b-model",
            FigureId::Fig3aModel => "3a-model",
            FigureId::Fig3bModel => "3b-model",
            FigureId::FigS2a => "S2a",
            FigureId::FigS2b => "S2b",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| {
                let supported: Vec<&str> = FigureId::ALL.iter().map(|id| id.as_str()).collect();
                Error::Config(format!(
                    "unknown figure id `{s}`; supported: {}",
                    supported.join(", ")
                ))
            })
    }
}

const MEASURED_NOTE: &str =
    "model curves only; the measured data points of this figure are experimental and are not regenerated";

fn table_over<F>(meta: TableMetadata, axis: &[f64], exec: Execution, f: F) -> Result<DataTable>
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync + Send,
{
    let rows = exec.try_map(axis, |&x| f(x))?;
    Ok(DataTable {
        metadata: meta,
        rows,
    })
}

fn total(rho: f64, p: f64, phi_deg: f64, det: &Detection, mode: &MechanicalMode) -> Result<f64> {
    Ok(displacement_psd(Rho(rho), Power(p), phi_deg.to_radians(), det, mode)?.total)
}

fn fig1a(exec: Execution) -> Result<Vec<DataTable>> {
    let (p, det, mode) = (50.0, Detection::ideal(), MechanicalMode::with_occupation(0.0)?);
    let meta = TableMetadata::new(
        "1a",
        &[
            "rho",
            "zpm",
            "shot_noise_phi90",
            "backaction",
            "sql_total",
            "ql_total",
            "phi90_total",
            "phi25_total",
            "variational_total",
            "variational_phi_deg",
        ],
    )
    .with_parameter("p", p)
    .with_parameter("epsilon", 1.0)
    .with_parameter("n_th", 0.0);
    let t = table_over(meta, &linspace(-20.0, 20.0, 401), exec, |rho| {
        let r = Rho(rho);
        let c90 = displacement_psd(r, Power(p), 90f64.to_radians(), &det, &mode)?;
        Ok(vec![
            rho,
            c90.s_m,
            c90.s_ii,
            c90.s_ff,
            c90.s_m + sql_psd(r),
            ql_psd(r, &det, &mode),
            c90.total,
            total(rho, p, 25.0, &det, &mode)?,
            psd_at_phi_opt(r, Power(p), &det, &mode)?,
            phi_opt(r, Power(p), &det)?.to_degrees(),
        ])
    })?;
    Ok(vec![t])
}

fn fig1b(exec: Execution) -> Result<Vec<DataTable>> {
    let (rho, det, mode) = (5.0, Detection::ideal(), MechanicalMode::with_occupation(0.0)?);
    let r = Rho(rho);
    let meta = TableMetadata::new(
        "1b",
        &[
            "p",
            "zpm",
            "shot_noise_phi90",
            "backaction",
            "sql_total",
            "ql_total",
            "phi90_total",
            "phi25_total",
            "variational_total",
        ],
    )
    .with_parameter("rho", rho)
    .with_parameter("epsilon", 1.0)
    .with_parameter("n_th", 0.0);
    let t = table_over(meta, &logspace(1e-2, 1e3, 251), exec, |p| {
        let c90 = displacement_psd(r, Power(p), 90f64.to_radians(), &det, &mode)?;
        Ok(vec![
            p,
            c90.s_m,
            c90.s_ii,
            c90.s_ff,
            c90.s_m + sql_psd(r),
            ql_psd(r, &det, &mode),
            c90.total,
            total(rho, p, 25.0, &det, &mode)?,
            psd_at_phi_opt(r, Power(p), &det, &mode)?,
        ])
    })?;
    Ok(vec![t])
}

fn fig1d(exec: Execution) -> Result<Vec<DataTable>> {
    let (rho, p, det, mode) = (5.0, 6.0, Detection::ideal(), MechanicalMode::with_occupation(0.0)?);
    let r = Rho(rho);
    let (phi_sq, s_min) = squeezing_optimum(r, Power(p), &det, &mode)?;
    let meta = TableMetadata::new("1d", &["phi_deg", "light_psd", "shot_noise"])
        .with_parameter("rho", rho)
        .with_parameter("p", p)
        .with_parameter("phi_opt_deg", phi_opt(r, Power(p), &det)?.to_degrees())
        .with_parameter("phi_max_squeezing_deg", phi_sq.to_degrees())
        .with_parameter("light_psd_min", s_min);
    let t = table_over(meta, &linspace(0.0, 180.0, 721), exec, |deg| {
        Ok(vec![deg, light_psd(r, deg.to_radians(), Power(p), &det, &mode)?, 1.0])
    })?;
    Ok(vec![t])
}

fn lossy_setup() -> Result<(Detection, MechanicalMode)> {
    Ok((Detection::new(0.35)?, MechanicalMode::with_occupation(1.29)?))
}

fn fig2a(exec: Execution) -> Result<Vec<DataTable>> {
    let (det, mode) = lossy_setup()?;
    let ideal = Detection::ideal();
    let meta = TableMetadata::new(
        "2a-model",
        &[
            "p",
            "total_rho_0",
            "total_rho_2p5",
            "total_rho_5",
            "total_rho_10",
            "shot_noise",
            "shot_noise_ideal",
        ],
    )
    .with_parameter("phi_deg", 90.0)
    .with_parameter("epsilon", 0.35)
    .with_parameter("n_th", 1.29)
    .with_note(MEASURED_NOTE);
    let t = table_over(meta, &logspace(0.1, 1e3, 201), exec, |p| {
        let mut row = vec![p];
        for rho in [0.0, 2.5, 5.0, 10.0] {
            row.push(total(rho, p, 90.0, &det, &mode)?);
        }
        row.push(displacement_psd(Rho(0.0), Power(p), 90f64.to_radians(), &det, &mode)?.s_ii);
        row.push(displacement_psd(Rho(0.0), Power(p), 90f64.to_radians(), &ideal, &mode)?.s_ii);
        Ok(row)
    })?;
    Ok(vec![t])
}

fn fig2b(exec: Execution) -> Result<Vec<DataTable>> {
    let (det, mode) = lossy_setup()?;
    let meta = TableMetadata::new(
        "2b-model",
        &["p", "phi90_rho_5", "phi45_rho_5", "phi45_rho_m5", "shot_noise_phi90", "ql_rho_5"],
    )
    .with_parameter("epsilon", 0.35)
    .with_parameter("n_th", 1.29)
    .with_note(MEASURED_NOTE);
    let main = table_over(meta, &logspace(0.1, 1e3, 201), exec, |p| {
        Ok(vec![
            p,
            total(5.0, p, 90.0, &det, &mode)?,
            total(5.0, p, 45.0, &det, &mode)?,
            total(-5.0, p, 45.0, &det, &mode)?,
            displacement_psd(Rho(5.0), Power(p), 90f64.to_radians(), &det, &mode)?.s_ii,
            ql_psd(Rho(5.0), &det, &mode),
        ])
    })?;
    let p = 14.0;
    let meta = TableMetadata::new("2b-model-inset", &["rho", "phi90_total", "phi45_total"])
        .with_parameter("p", p)
        .with_parameter("epsilon", 0.35)
        .with_parameter("n_th", 1.29)
        .with_note(MEASURED_NOTE);
    let inset = table_over(meta, &linspace(-10.0, 10.0, 201), exec, |rho| {
        Ok(vec![rho, total(rho, p, 90.0, &det, &mode)?, total(rho, p, 45.0, &det, &mode)?])
    })?;
    Ok(vec![main, inset])
}

const STITCH_ANGLES: [f64; 4] = [45.0, 60.0, 75.0, 90.0];

fn fig3a(exec: Execution) -> Result<Vec<DataTable>> {
    let (det, mode) = lossy_setup()?;
    let meta = TableMetadata::new(
        "3a-model",
        &[
            "p",
            "ratio45_rho_5",
            "ratio60_rho_5",
            "ratio75_rho_5",
            "ratio45_rho_m5",
            "ratio60_rho_m5",
            "ratio75_rho_m5",
        ],
    )
    .with_parameter("epsilon", 0.35)
    .with_parameter("n_th", 1.29)
    .with_note("ratio of the PSD at the given quadrature to the PSD at 90 deg")
    .with_note(MEASURED_NOTE);
    let t = table_over(meta, &logspace(0.1, 1e3, 201), exec, |p| {
        let mut row = vec![p];
        for rho in [5.0, -5.0] {
            let reference = total(rho, p, 90.0, &det, &mode)?;
            for deg in [45.0, 60.0, 75.0] {
                row.push(total(rho, p, deg, &det, &mode)? / reference);
            }
        }
        Ok(row)
    })?;
    Ok(vec![t])
}

fn fig3b(exec: Execution) -> Result<Vec<DataTable>> {
    let (det, mode) = lossy_setup()?;
    let grid = linspace(-15.0, 15.0, 301);

    let p = 14.0;
    let curves = STITCH_ANGLES
        .iter()
        .map(|&deg| LimitCurve::fixed_angle(&grid, Power(p), deg.to_radians(), &det, &mode, exec))
        .collect::<Result<Vec<_>>>()?;
    let stitched = stitch_quadratures(&curves)?;
    let variational = variational_spectrum(&grid, Power(p), &det, &mode, exec)?;
    let mut main = DataTable::new(
        TableMetadata::new(
            "3b-model",
            &[
                "rho",
                "phi45_total",
                "phi60_total",
                "phi75_total",
                "phi90_total",
                "stitched_total",
                "stitched_phi_deg",
                "variational_total",
            ],
        )
        .with_parameter("p", p)
        .with_parameter("epsilon", 0.35)
        .with_parameter("n_th", 1.29)
        .with_note(MEASURED_NOTE),
    );
    for (i, &rho) in grid.iter().enumerate() {
        let mut row = vec![rho];
        row.extend(curves.iter().map(|c| c.values[i]));
        row.push(stitched.values[i]);
        row.push(stitched.chosen_phi[i].to_degrees().round());
        row.push(variational.values[i]);
        main.push(row);
    }

    let p = 28.0;
    let meta = TableMetadata::new(
        "3b-model-inset",
        &["rho", "phi45_over_sql", "phi60_over_sql", "phi75_over_sql", "phi90_over_sql", "sql"],
    )
    .with_parameter("p", p)
    .with_parameter("epsilon", 0.35)
    .with_parameter("n_th", 1.29)
    .with_note("totals divided by the SQL added noise 1/sqrt(1 + rho^2) at each frequency")
    .with_note(MEASURED_NOTE);
    let inset = table_over(meta, &grid, exec, |rho| {
        let sql = sql_psd(Rho(rho));
        let mut row = vec![rho];
        for deg in STITCH_ANGLES {
            row.push(total(rho, p, deg, &det, &mode)? / sql);
        }
        row.push(sql);
        Ok(row)
    })?;
    Ok(vec![main, inset])
}

fn synodyne_setup() -> Result<(f64, Detection, MechanicalMode)> {
    Ok((100.0, Detection::ideal(), MechanicalMode::with_occupation(0.0)?))
}

fn figs2a(exec: Execution) -> Result<Vec<DataTable>> {
    let (p, det, mode) = synodyne_setup()?;
    let lo = SynodyneLO::new(1.02, 0.0)?;
    let meta = TableMetadata::new(
        "S2a",
        &[
            "rho",
            "zpm",
            "shot_noise_phi90",
            "backaction",
            "sql_total",
            "ql_total",
            "homodyne_phi90_total",
            "homodyne_phi5p8_total",
            "synodyne_beta1p02_total",
        ],
    )
    .with_parameter("p", p)
    .with_parameter("epsilon", 1.0)
    .with_parameter("n_th", 0.0)
    .with_parameter("homodyne_phi_deg", 5.8)
    .with_parameter("synodyne_beta", 1.02)
    .with_parameter("synodyne_phi_deg", 0.0)
    .with_note("synodyne rho is measured from the demodulated mechanical resonance");
    let t = table_over(meta, &linspace(-15.0, 15.0, 301), exec, |rho| {
        let r = Rho(rho);
        let c90 = displacement_psd(r, Power(p), 90f64.to_radians(), &det, &mode)?;
        Ok(vec![
            rho,
            c90.s_m,
            c90.s_ii,
            c90.s_ff,
            c90.s_m + sql_psd(r),
            ql_psd(r, &det, &mode),
            c90.total,
            total(rho, p, 5.8, &det, &mode)?,
            synodyne_psd(r, Power(p), &lo, &det, &mode)?,
        ])
    })?;
    Ok(vec![t])
}

fn figs2b(exec: Execution) -> Result<Vec<DataTable>> {
    let (p, det, mode) = synodyne_setup()?;
    let meta = TableMetadata::new(
        "S2b",
        &[
            "rho",
            "zpm",
            "sql_total",
            "ql_total",
            "homodyne_variational_total",
            "synodyne_variational_total",
        ],
    )
    .with_parameter("p", p)
    .with_parameter("epsilon", 1.0)
    .with_parameter("n_th", 0.0);
    let t = table_over(meta, &linspace(-15.0, 15.0, 301), exec, |rho| {
        let r = Rho(rho);
        Ok(vec![
            rho,
            mechanical_term(r, &mode),
            mechanical_term(r, &mode) + sql_psd(r),
            ql_psd(r, &det, &mode),
            psd_at_phi_opt(r, Power(p), &det, &mode)?,
            synodyne_variational(r, Power(p), &det, &mode)?,
        ])
    })?;
    Ok(vec![t])
}

/// Tables for one figure: the main panel first, then any inset.
pub fn reproduce_figure(id: FigureId, exec: Execution) -> Result<Vec<DataTable>> {
    match id {
        FigureId::Fig1a => fig1a(exec),
        FigureId::Fig1b => fig1b(exec),
        FigureId::Fig1d => fig1d(exec),
        FigureId::Fig2aModel => fig2a(exec),
        FigureId::Fig2bModel => fig2b(exec),
        FigureId::Fig3aModel => fig3a(exec),
        FigureId::Fig3bModel => fig3b(exec),
        FigureId::FigS2a => figs2a(exec),
        FigureId::FigS2b => figs2b(exec),
    }
}
