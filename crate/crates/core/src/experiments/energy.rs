//! Energy inequality E(t) ≤ E(0) along Verlet trajectories, with a
//! step-size refinement to expose the O(dt²) drift.

use rayon::prelude::*;
use serde_json::json;

use crate::dynamics::{simulate_with, SimConfig, Trajectory};
use crate::error::{Error, Result};
use crate::output::LinePlot;
use crate::potentials::{Potential, Regularity};
use crate::spectral::{build_operator, SpectralOperator};

use super::{ExperimentReport, SeriesTable, Verdict};

/// Accepted drift for step dt: dt²·(λ_max + Lip ∇W)·E(0). For a harmonic
/// mode of frequency ω the Verlet energy error is at most about ω²dt²/4
/// relative, so this allows a factor of four.
pub fn energy_tolerance(op: &SpectralOperator, potential: &Potential, dt: f64, e0: f64) -> f64 {
    dt * dt * (op.lambda_max() + potential.gradient_lipschitz()) * e0.abs()
}

/// Smallest drift for which a refinement ratio is meaningful, relative to E(0).
const RATIO_FLOOR: f64 = 1e-12;

/// Runs `config` at dt, dt/2, …, dt/2^refinements and checks the energy
/// inequality for each; with refinements the drift ratio per halving must
/// lie in [3, 5].
pub fn run_energy_inequality(config: &SimConfig, refinements: usize) -> Result<ExperimentReport> {
    if config.potential.regularity() != Regularity::C1Uniform {
        return Err(Error::Uncertified(format!(
            "{} has a discontinuous gradient; the energy inequality needs a C¹ potential",
            config.potential.name()
        )));
    }
    let op = build_operator(&config.domain)?;
    let runs: Vec<(f64, Trajectory)> = (0..=refinements)
        .into_par_iter()
        .map(|j| {
            let factor = 1usize << j;
            let mut c = config.clone();
            c.dt = config.dt / factor as f64;
            c.record_every = config.record_every * factor;
            simulate_with(&op, &c).map(|t| (c.dt, t))
        })
        .collect::<Result<_>>()?;

    let mut report = ExperimentReport::new(
        "energy_inequality",
        json!({
            "potential": config.potential.name(),
            "domain": config.domain.mode().name(),
            "d": config.domain.dim(),
            "s": config.domain.order(),
            "n": config.domain.resolution(),
            "t_final": config.t_final,
            "dt": runs.iter().map(|r| r.0).collect::<Vec<_>>(),
        }),
    );
    let mut drift_table = SeriesTable::new("drift", &["dt", "max_drift", "max_excess", "tol_E"]);
    let mut energy_plot = LinePlot::new("energy deviation E(t) - E(0)", "t", "E - E0");
    let mut sup_plot = LinePlot::new("max |u| over the grid", "t", "max |u|").with_threshold(1.0);
    let mut drifts = Vec::new();
    let e0 = runs[0].1.energies[0].total;
    for (j, (dt, traj)) in runs.iter().enumerate() {
        let tol = energy_tolerance(&op, &config.potential, *dt, e0);
        let drift = traj.max_energy_drift();
        let excess = traj.max_energy_excess();
        drifts.push(drift);
        drift_table.push(vec![*dt, drift, excess, tol]);
        report
            .verdicts
            .push(Verdict::at_most(format!("energy inequality max(E(t) - E(0)), dt = {dt}"), excess, tol));
        report
            .verdicts
            .push(Verdict::at_most(format!("energy drift max|E(t) - E(0)|, dt = {dt}"), drift, tol));

        let mut table = SeriesTable::new(format!("energy_dt{j}"), &["t", "kinetic", "elastic", "adhesive", "total"]);
        for (t, e) in traj.times.iter().zip(&traj.energies) {
            table.push(vec![*t, e.kinetic, e.elastic, e.adhesive, e.total]);
        }
        report.series.push(table);
        energy_plot = energy_plot.with_series(
            format!("dt = {dt:.3e}"),
            traj.times.iter().zip(&traj.energies).map(|(t, e)| (*t, e.total - e0)).collect(),
        );
        sup_plot = sup_plot.with_series(
            format!("dt = {dt:.3e}"),
            traj.times.iter().zip(&traj.states).map(|(t, s)| (*t, s.u.max_norm())).collect(),
        );
    }
    for (j, w) in drifts.windows(2).enumerate() {
        if w[0] <= RATIO_FLOOR * e0.abs() {
            report.notes.push(format!(
                "drift {:.3e} at refinement {j} is at round-off level; ratio not checked",
                w[0]
            ));
            continue;
        }
        report.verdicts.push(Verdict::within(
            format!("drift ratio per dt halving (level {j} to {})", j + 1),
            w[0] / w[1],
            3.0,
            5.0,
        ));
    }
    report.series.push(drift_table);
    report.plots.push(("energy".into(), energy_plot));
    report.plots.push(("max_abs_u".into(), sup_plot));
    Ok(report)
}
