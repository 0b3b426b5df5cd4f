//! ε → 0 study: consecutive-ε distances max_t ‖u^{ε_i}(t) − u^{ε_{i+1}}(t)‖_{L²}
//! as a Cauchy proxy for strong convergence in C⁰([0,T]; L²).

use rayon::prelude::*;
use serde_json::json;

use crate::dynamics::{simulate_with, SimConfig, Trajectory};
use crate::error::{Error, Result};
use crate::output::LinePlot;
use crate::potentials::{certify_family, RegularizedFamily, DISTANCE_FLOOR};
use crate::spectral::{build_operator, l2_norm};

use super::{ExperimentReport, SeriesTable, Verdict};

pub const CERTIFICATION_SAMPLE: usize = 2000;
pub const CERTIFICATION_SEED: u64 = 7;

/// max over common snapshots of ‖a(t) − b(t)‖_{L²}.
pub fn cauchy_distance(domain: &crate::spectral::Domain, a: &Trajectory, b: &Trajectory) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (sa, sb) in a.states.iter().zip(&b.states) {
        worst = worst.max(l2_norm(domain, &sa.u.difference(&sb.u)?)?);
    }
    Ok(worst)
}

/// Simulates `config` with W_ε for every ε of a strictly decreasing list
/// and checks that consecutive distances decrease. The family must pass
/// certification on `eps_list` first. No convergence rate is asserted; the
/// observed ratios are reported as notes.
pub fn run_epsilon_convergence(
    fam: &RegularizedFamily,
    eps_list: &[f64],
    config: &SimConfig,
) -> Result<ExperimentReport> {
    if eps_list.len() < 2 {
        return Err(Error::InvalidConfig("an epsilon study needs at least two values".into()));
    }
    let cert = certify_family(fam, eps_list, CERTIFICATION_SAMPLE, CERTIFICATION_SEED)?;
    if !cert.passed {
        return Err(Error::Uncertified(format!(
            "{}: {}",
            fam.describe(),
            cert.failures.join("; ")
        )));
    }
    let op = build_operator(&config.domain)?;
    let trajectories: Vec<Trajectory> = eps_list
        .par_iter()
        .map(|&eps| {
            let mut c = config.clone();
            c.potential = fam.make(eps)?;
            simulate_with(&op, &c)
        })
        .collect::<Result<_>>()?;
    let distances: Vec<f64> = trajectories
        .windows(2)
        .map(|w| cauchy_distance(&config.domain, &w[0], &w[1]))
        .collect::<Result<_>>()?;

    let mut report = ExperimentReport::new(
        "epsilon_convergence",
        json!({
            "family": fam.describe(),
            "mode": fam.mode(),
            "eps_list": eps_list,
            "domain": config.domain.mode().name(),
            "d": config.domain.dim(),
            "s": config.domain.order(),
            "n": config.domain.resolution(),
            "t_final": config.t_final,
            "dt": config.dt,
        }),
    );
    let mut table = SeriesTable::new("epsilon_study", &["eps", "sup_W_dist", "sup_grad_dist", "l2_cauchy_dist"]);
    for (i, entry) in cert.entries.iter().enumerate() {
        let dist = if i == 0 { f64::NAN } else { distances[i - 1] };
        table.push(vec![entry.eps, entry.sup_value_dist, entry.sup_grad_dist, dist]);
    }
    for (i, w) in distances.windows(2).enumerate() {
        let name = format!(
            "Cauchy distance decreases: d(eps {} , {}) vs d(eps {}, {})",
            eps_list[i + 1],
            eps_list[i + 2],
            eps_list[i],
            eps_list[i + 1]
        );
        if w[0] <= DISTANCE_FLOOR {
            report.verdicts.push(Verdict::at_most(name, w[1], DISTANCE_FLOOR));
        } else {
            report.verdicts.push(Verdict::less_than(name, w[1], w[0]));
            report.notes.push(format!("observed distance ratio {:.4}", w[0] / w[1]));
        }
    }
    report.plots.push((
        "epsilon_study".into(),
        LinePlot::new("consecutive-eps L2 Cauchy distance", "eps", "distance")
            .with_series(
                "max_t ||u_i - u_(i+1)||",
                eps_list[1..].iter().copied().zip(distances.iter().copied()).collect(),
            )
            .log_axes(true, true),
    ));
    report.series.push(table);
    Ok(report)
}
