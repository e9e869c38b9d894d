//! Parameter sweeps: independent simulations over a Cartesian grid.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deformations::{DeformationSpec, Variant};
use crate::error::{Error, Result};
use crate::integrator::fmt_f64;
use crate::simulate::{ModelKind, RunConfig};
use crate::vector::{norm, sub};

/// Value lists per swept parameter; an empty list keeps the base value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepGrid {
    #[serde(default)]
    pub kappa: Vec<f64>,
    #[serde(default)]
    pub tau: Vec<f64>,
    #[serde(default)]
    pub variant: Vec<Variant>,
    #[serde(default)]
    pub m: Vec<f64>,
    #[serde(default)]
    pub omega: Vec<f64>,
}

/// Sweep description as read from a JSON grid file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub base: RunConfig,
    pub grid: SweepGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub index: usize,
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub model: ModelKind,
    pub family: String,
    pub variant: String,
    pub kappa: f64,
    pub tau: Option<f64>,
    pub m: f64,
    pub omega: Option<f64>,
    pub final_x: [f64; 3],
    /// `‖x(t_end) − x(t0)‖`.
    pub displacement: f64,
    /// `‖x(t_end) − x_classical(t_end)‖` against the same cell with `κ = 0`.
    pub deviation: f64,
    pub energy_drift: f64,
    pub max_curl: f64,
    pub error: Option<String>,
}

fn values_or(list: &[f64], base: f64) -> Vec<f64> {
    if list.is_empty() {
        vec![base]
    } else {
        list.to_vec()
    }
}

impl SweepGrid {
    /// Cells in grid order: variant, κ, τ, m, ω (last varies fastest).
    pub fn cells(&self, base: &RunConfig) -> Result<Vec<SweepCell>> {
        let spec = base.deformation;
        let variants = if self.variant.is_empty() {
            vec![spec.variant()]
        } else {
            self.variant.clone()
        };
        let kappas = values_or(&self.kappa, spec.kappa());
        let taus = if self.tau.is_empty() {
            vec![spec.tau().unwrap_or(1.0)]
        } else {
            self.tau.clone()
        };
        let masses = values_or(&self.m, base.params.m);
        let omegas: Vec<Option<f64>> = if self.omega.is_empty() {
            vec![base.params.omega]
        } else {
            self.omega.iter().copied().map(Some).collect()
        };

        let mut cells = Vec::new();
        for &variant in &variants {
            // τ is irrelevant in the limit; sweep it only once there
            let taus_here: &[f64] = if variant == Variant::GalileanLimit {
                &taus[..1]
            } else {
                &taus
            };
            for &kappa in &kappas {
                for &tau in taus_here {
                    for &m in &masses {
                        for &omega in &omegas {
                            let mut cfg = base.clone();
                            cfg.deformation =
                                DeformationSpec::new(spec.family(), variant, kappa, Some(tau))?;
                            cfg.params.m = m;
                            cfg.params.omega = omega;
                            cells.push(SweepCell {
                                index: cells.len(),
                                config: cfg,
                            });
                        }
                    }
                }
            }
        }
        if cells.is_empty() {
            return Err(Error::config("sweep grid is empty"));
        }
        Ok(cells)
    }
}

fn run_cell(cell: &SweepCell) -> SweepRow {
    let cfg = &cell.config;
    let spec = cfg.deformation;
    let mut row = SweepRow {
        index: cell.index,
        model: cfg.model,
        family: spec.family().to_string(),
        variant: spec.variant().to_string(),
        kappa: spec.kappa(),
        tau: spec.tau(),
        m: cfg.params.m,
        omega: cfg.params.omega,
        final_x: [f64::NAN; 3],
        displacement: f64::NAN,
        deviation: f64::NAN,
        energy_drift: f64::NAN,
        max_curl: f64::NAN,
        error: None,
    };
    let result = (|| -> Result<()> {
        cfg.validate()?;
        let model = cfg.build_model()?;
        let traj = model.run(&cfg.initial, &cfg.integration)?;
        let classical = model
            .with_spec(DeformationSpec::undeformed())
            .run(&cfg.initial, &cfg.integration)?;
        let first = traj.first().expect("non-empty trajectory");
        let last = traj.last().expect("non-empty trajectory");
        row.final_x = last.x;
        row.displacement = norm(&sub(&last.x, &first.x));
        row.deviation = norm(&sub(
            &last.x,
            &classical.last().expect("non-empty trajectory").x,
        ));
        row.energy_drift = model.energy(last) - model.energy(first);
        row.max_curl = model.max_curl(&traj.samples);
        Ok(())
    })();
    if let Err(e) = result {
        row.error = Some(e.to_string());
    }
    row
}

/// Runs every cell in parallel; rows come back in grid order.
pub fn run_sweep(cells: &[SweepCell]) -> Vec<SweepRow> {
    cells.par_iter().map(run_cell).collect()
}

pub fn run_sweep_serial(cells: &[SweepCell]) -> Vec<SweepRow> {
    cells.iter().map(run_cell).collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn write_rows_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "index",
        "model",
        "family",
        "variant",
        "kappa",
        "tau",
        "m",
        "omega",
        "final_x1",
        "final_x2",
        "final_x3",
        "displacement",
        "deviation",
        "energy_drift",
        "max_curl",
        "error",
    ])?;
    for r in rows {
        let mut rec = vec![
            r.index.to_string(),
            r.model.to_string(),
            r.family.clone(),
            r.variant.clone(),
            fmt_f64(r.kappa),
            opt(r.tau),
            fmt_f64(r.m),
            opt(r.omega),
        ];
        rec.extend(r.final_x.iter().map(|v| fmt_f64(*v)));
        rec.extend([r.displacement, r.deviation, r.energy_drift, r.max_curl].map(fmt_f64));
        rec.push(r.error.clone().unwrap_or_default());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
