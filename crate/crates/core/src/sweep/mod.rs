//! Deterministic parameter sweeps and figure-data tables.
//!
//! Rows are ordered rho-major, then power, then angle. Grid points are
//! evaluated independently (in parallel with the `parallel` feature) and
//! collected in order, so the output does not depend on the worker count.

pub mod config;
pub mod figures;
pub mod table;

pub use config::{parse_config, Parsed, Readout, ReadoutKind, Spacing, SweepSpec};
pub use figures::{reproduce_figure, FigureId};
pub use table::{
    emit_table, parse_csv_table, read_csv_table, write_table, DataTable, Format, SpectrumRow,
    SpectrumTable, TableMetadata, NORMALIZATION, SPECTRUM_COLUMNS,
};

use crate::calibration::SidebandFit;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::homodyne::{
    displacement_psd, displacement_psd_full, mechanical_term, ClassicalNoise, SpectrumComponents,
};
use crate::limits::{p_opt, prefer, ql_added, sql_psd, variational_components};
use crate::model::{to_hz, Detection, MechanicalMode, Power, Rho, SystemParams};
use crate::synodyne::{synodyne_components, synodyne_p_opt, synodyne_ql};

/// `n` evenly spaced points from `a` to `b` inclusive; both ends are exact.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let d = (n - 1) as f64;
    (0..n)
        .map(|i| (a * (d - i as f64) + b * i as f64) / d)
        .collect()
}

/// `n` logarithmically spaced points from `a` to `b` inclusive (`a, b > 0`).
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let mut out: Vec<f64> = linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect();
    if n > 1 {
        out[0] = a;
        out[n - 1] = b;
    }
    out
}

struct Context {
    det: Detection,
    mode: MechanicalMode,
    noise: ClassicalNoise,
    system: Option<SystemParams>,
    thermal_weight: f64,
    zpm_weight: f64,
}

impl Context {
    fn new(spec: &SweepSpec) -> Result<Self> {
        let noise = spec.classical_noise()?;
        Ok(Self {
            det: spec.detection()?,
            mode: spec.mode()?,
            system: if noise.is_zero() { None } else { Some(spec.system()?) },
            noise,
            thermal_weight: if spec.include_thermal { 1.0 } else { 0.0 },
            zpm_weight: if spec.include_zpm { 1.0 } else { 0.0 },
        })
    }

    fn s_m(&self, rho: Rho) -> f64 {
        2.0 * (self.thermal_weight * self.mode.n_th + self.zpm_weight * 0.5) * rho.chi_sq()
    }

    fn homodyne(&self, rho: Rho, p: Power, phi: f64) -> Result<SpectrumComponents> {
        let c = displacement_psd(rho, p, phi, &self.det, &self.mode)?.with_s_m(self.s_m(rho));
        match &self.system {
            None => Ok(c),
            Some(sys) => {
                let full = displacement_psd_full(
                    rho.to_omega(&sys.mode),
                    phi,
                    sys.photons(p)?,
                    sys,
                    &self.noise,
                )?;
                Ok(c.with_s_ln(full.s_ln))
            }
        }
    }
}

fn annotate(rho: f64, p: f64, phi_deg: f64) -> impl FnOnce(Error) -> Error {
    move |e| Error::Row {
        rho,
        p,
        phi_deg,
        source: Box::new(e),
    }
}

fn rows_at(rho: f64, spec: &SweepSpec, readout: &Readout, ctx: &Context) -> Result<Vec<SpectrumRow>> {
    let r = Rho(rho);
    let sql = sql_psd(r);
    let mut rows = Vec::new();
    for &p in &spec.powers {
        let power = Power(p);
        match readout {
            Readout::Homodyne(angles) => {
                for &deg in angles {
                    let c = ctx
                        .homodyne(r, power, deg.to_radians())
                        .map_err(annotate(rho, p, deg))?;
                    rows.push(SpectrumRow::new(rho, deg, p, &c, sql));
                }
            }
            Readout::Variational => {
                let (phi, _) = variational_components(r, power, &ctx.det, &ctx.mode)
                    .map_err(annotate(rho, p, f64::NAN))?;
                let deg = phi.to_degrees();
                let c = ctx.homodyne(r, power, phi).map_err(annotate(rho, p, deg))?;
                rows.push(SpectrumRow::new(rho, deg, p, &c, sql));
            }
            Readout::Synodyne(lo) => {
                let deg = spec.synodyne_phi_deg.unwrap_or(0.0);
                let c = synodyne_components(r, power, lo, &ctx.det, &ctx.mode)
                    .map_err(annotate(rho, p, deg))?
                    .with_s_m(ctx.s_m(r));
                rows.push(SpectrumRow::new(rho, deg, p, &c, sql));
            }
            Readout::Stitched(angles) => {
                let mut best: Option<(f64, SpectrumComponents)> = None;
                for &deg in angles {
                    let phi = deg.to_radians();
                    let c = ctx.homodyne(r, power, phi).map_err(annotate(rho, p, deg))?;
                    let wins = best.is_none_or(|(b_deg, bc): (f64, SpectrumComponents)| {
                        prefer((phi, c.total), (b_deg.to_radians(), bc.total))
                    });
                    if wins {
                        best = Some((deg, c));
                    }
                }
                let (deg, c) = best.expect("validated: at least two angles");
                rows.push(SpectrumRow::new(rho, deg, p, &c, sql));
            }
        }
    }
    Ok(rows)
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SpectrumTable> {
    run_sweep_with(spec, Execution::default())
}

pub fn run_sweep_with(spec: &SweepSpec, exec: Execution) -> Result<SpectrumTable> {
    spec.validate()?;
    let ctx = Context::new(spec)?;
    let readout = spec.readout();
    let grid = spec.rho_grid();
    let per_rho = exec.try_map(&grid, |&rho| rows_at(rho, spec, &readout, &ctx))?;
    let mut metadata = TableMetadata::new("sweep", &SPECTRUM_COLUMNS);
    metadata.spec = Some(spec.clone());
    Ok(SpectrumTable {
        metadata,
        rows: per_rho.into_iter().flatten().collect(),
    })
}

/// SQL, QL and optimal-power curves on the spec's grid.
pub fn limits_table(spec: &SweepSpec, exec: Execution) -> Result<DataTable> {
    spec.validate()?;
    let ctx = Context::new(spec)?;
    let mut metadata = TableMetadata::new(
        "limits",
        &[
            "rho",
            "s_m",
            "sql",
            "sql_total",
            "ql_added",
            "ql_total",
            "p_opt",
            "p_opt_saturated",
            "synodyne_ql_total",
            "synodyne_p_opt",
            "synodyne_p_opt_saturated",
        ],
    )
    .with_note("saturated optimal powers are capped; the flag columns are 1 where the cap applies");
    metadata.spec = Some(spec.clone());
    let rows = exec.map(&spec.rho_grid(), |&rho| {
        let r = Rho(rho);
        let s_m = ctx.s_m(r);
        let ql = ql_added(r, &ctx.det);
        let hom = p_opt(r, &ctx.det);
        let syn = synodyne_p_opt(r, &ctx.det);
        let syn_added = synodyne_ql(r, &ctx.det, &ctx.mode) - mechanical_term(r, &ctx.mode);
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        vec![
            rho,
            s_m,
            sql_psd(r),
            s_m + sql_psd(r),
            ql,
            s_m + ql,
            hom.p.0,
            flag(hom.saturated),
            s_m + syn_added,
            syn.p.0,
            flag(syn.saturated),
        ]
    });
    Ok(DataTable { metadata, rows })
}

/// One-row table summarizing a sideband fit.
pub fn calibration_table(fit: &SidebandFit, seed: Option<u64>) -> Result<DataTable> {
    let mut metadata = TableMetadata::new(
        "calibration",
        &["gamma_fit_hz", "a_red", "a_blue", "offset", "residual_rms", "n_th"],
    );
    if let Some(seed) = seed {
        metadata = metadata.with_note(format!("synthetic sideband spectra, seed {seed}"));
    }
    let mut t = DataTable::new(metadata);
    t.push(vec![
        to_hz(fit.gamma_fit),
        fit.a_red,
        fit.a_blue,
        fit.offset,
        fit.residual_rms,
        fit.n_th()?,
    ]);
    Ok(t)
}
