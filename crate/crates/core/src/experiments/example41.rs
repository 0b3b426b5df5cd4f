//! The constant-state obstruction: u^ε ≡ 1+ε solves the regularized
//! Neumann problem exactly, u^ε → 1 uniformly, yet the limit leaves the
//! residual 2∫χ∫ψ in the weak formulation because W'(1) = 2 while
//! W'_ε(1+ε) = 0.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::dynamics::{
    simulate_with, stability_bound, weak_residual, EnergyBreakdown, FieldState, SimConfig,
    TestFunction, TimeWeight, Trajectory, DEFAULT_CFL_SAFETY,
};
use crate::error::{Error, Result};
use crate::output::LinePlot;
use crate::potentials::{clipped_quadratic, example41_member};
use crate::spectral::{build_operator, inner, Domain, Field};

use super::data::interior_bump;
use super::{ExperimentReport, SeriesTable, Verdict};

#[derive(Debug, Clone, Serialize)]
pub struct Example41Setup {
    pub eps_list: Vec<f64>,
    pub t_final: f64,
    pub length: f64,
    pub n: usize,
}

impl Default for Example41Setup {
    fn default() -> Self {
        Example41Setup {
            eps_list: vec![0.4, 0.2, 0.1],
            t_final: 10.0,
            length: 1.0,
            n: 32,
        }
    }
}

pub const CONSTANCY_TOL: f64 = 1e-10;
pub const APPROX_RESIDUAL_TOL: f64 = 1e-10;
pub const LIMIT_RESIDUAL_REL_TOL: f64 = 1e-6;

fn constant_trajectory(domain: &Domain, value: f64, times: &[f64], dt: f64) -> Trajectory {
    Trajectory {
        times: times.to_vec(),
        states: times
            .iter()
            .map(|&t| FieldState {
                u: Field::constant(domain, &[value]),
                v: Field::zeros(domain, 1),
                t,
            })
            .collect(),
        energies: vec![EnergyBreakdown::new(0.0, 0.0, 0.0); times.len()],
        dt,
        steps: times.len().saturating_sub(1),
    }
}

pub fn run_example41(setup: &Example41Setup) -> Result<ExperimentReport> {
    if setup.eps_list.is_empty() {
        return Err(Error::InvalidConfig("eps_list is empty".into()));
    }
    if !(setup.t_final > 0.0) {
        return Err(Error::InvalidConfig(format!("final time must be positive, got {}", setup.t_final)));
    }
    let members = setup
        .eps_list
        .iter()
        .map(|&e| example41_member(e))
        .collect::<Result<Vec<_>>>()?;
    let domain = Domain::neumann_1d(setup.length, setup.n)?;
    let op = build_operator(&domain)?;

    // One dt for all members, dividing T exactly, so snapshot times coincide.
    let bound = members
        .iter()
        .map(|w| stability_bound(&op, w, DEFAULT_CFL_SAFETY))
        .fold(f64::INFINITY, f64::min);
    let steps = (setup.t_final / bound).ceil() as usize;
    let dt = setup.t_final / steps as f64;

    let t_final = setup.t_final;
    let tests = vec![
        TestFunction {
            psi: Field::constant(&domain, &[1.0]),
            weight: TimeWeight::One,
        },
        TestFunction {
            psi: interior_bump(&domain, 1, 1.0),
            weight: TimeWeight::SinWindow { start: 0.0, end: t_final },
        },
    ];
    let time_integrals = [t_final, 0.5 * t_final];
    let one = Field::constant(&domain, &[1.0]);
    let expected: Vec<f64> = tests
        .iter()
        .zip(time_integrals)
        .map(|(tf, chi)| Ok(2.0 * chi * inner(&domain, &one, &tf.psi)?))
        .collect::<Result<_>>()?;

    struct Run {
        dev_const: f64,
        dev_limit: f64,
        residuals: Vec<f64>,
        times: Vec<f64>,
    }
    let runs: Vec<Run> = setup
        .eps_list
        .par_iter()
        .zip(&members)
        .map(|(&eps, w)| {
            let config = SimConfig {
                domain: domain.clone(),
                potential: w.clone(),
                t_final,
                dt,
                u0: Field::constant(&domain, &[1.0 + eps]),
                v0: Field::zeros(&domain, 1),
                record_every: 1,
                cfl_safety: DEFAULT_CFL_SAFETY,
            };
            let traj = simulate_with(&op, &config)?;
            let mut dev_const: f64 = 0.0;
            let mut dev_limit: f64 = 0.0;
            for s in &traj.states {
                for &u in s.u.values() {
                    dev_const = dev_const.max((u - (1.0 + eps)).abs());
                    dev_limit = dev_limit.max((u - 1.0).abs());
                }
            }
            let residuals = weak_residual(&op, &traj, &tests, w)?;
            Ok(Run {
                dev_const,
                dev_limit,
                residuals,
                times: traj.times,
            })
        })
        .collect::<Result<_>>()?;

    let limit = constant_trajectory(&domain, 1.0, &runs[0].times, dt);
    let limit_residuals = weak_residual(&op, &limit, &tests, &clipped_quadratic(1.0)?)?;

    let mut report = ExperimentReport::new(
        "example41",
        json!({
            "eps_list": setup.eps_list,
            "t_final": t_final,
            "length": setup.length,
            "n": setup.n,
            "dt": dt,
            "test_functions": ["psi = 1, chi = 1", "psi = interior bump, chi = sin^2 window on [0, T]"],
        }),
    );
    let mut table = SeriesTable::new(
        "example41",
        &["eps", "max_dev_from_constant", "max_dev_from_limit", "residual_const_test", "residual_bump_test"],
    );
    for (&eps, run) in setup.eps_list.iter().zip(&runs) {
        table.push(vec![eps, run.dev_const, run.dev_limit, run.residuals[0], run.residuals[1]]);
        report.verdicts.push(Verdict::at_most(
            format!("approximate solution stays constant max|u - (1+eps)|, eps = {eps}"),
            run.dev_const,
            CONSTANCY_TOL,
        ));
        report.verdicts.push(Verdict::at_most(
            format!("uniform distance to the limit |max|u - 1| - eps|, eps = {eps}"),
            (run.dev_limit - eps).abs(),
            CONSTANCY_TOL,
        ));
        for (j, r) in run.residuals.iter().enumerate() {
            report.verdicts.push(Verdict::at_most(
                format!("approximate solution weak residual |R|, eps = {eps}, test {j}"),
                r.abs(),
                APPROX_RESIDUAL_TOL,
            ));
        }
    }
    let mut limit_table = SeriesTable::new("limit_residual", &["test", "residual", "expected"]);
    for (j, (r, e)) in limit_residuals.iter().zip(&expected).enumerate() {
        limit_table.push(vec![j as f64, *r, *e]);
        report.verdicts.push(Verdict::at_most(
            format!("limit weak residual relative error vs 2*int(chi)*int(psi), test {j}"),
            (r - e).abs() / e.abs(),
            LIMIT_RESIDUAL_REL_TOL,
        ));
    }
    // Gap between the limit and the smallest-ε approximate solution.
    let finest = runs
        .iter()
        .zip(&setup.eps_list)
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(r, _)| r)
        .expect("nonempty");
    let gap = limit_residuals[0] - finest.residuals[0];
    report.verdicts.push(Verdict::at_most(
        "obstruction gap relative error R(limit) - R(u^eps) vs 2TL",
        (gap - expected[0]).abs() / expected[0].abs(),
        LIMIT_RESIDUAL_REL_TOL,
    ));
    report.plots.push((
        "deviation".into(),
        LinePlot::new("uniform distance of u^eps to the limit", "eps", "max |u - 1|")
            .with_series(
                "measured",
                setup.eps_list.iter().zip(&runs).map(|(e, r)| (*e, r.dev_limit)).collect(),
            )
            .log_axes(true, true),
    ));
    report.series.push(table);
    report.series.push(limit_table);
    Ok(report)
}
