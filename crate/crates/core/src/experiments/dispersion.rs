//! Linear dispersion check: with W ≡ 0 a single Fourier mode sin(kx) on the
//! torus must oscillate at ω = |ξ_k|ˢ up to the O(dt²) Verlet phase error.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::dynamics::{stability_bound, FieldState, Stepper};
use crate::error::Result;
use crate::potentials::Potential;
use crate::spectral::{build_operator, inner, Domain, Field};

use super::{ExperimentReport, SeriesTable, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionCase {
    pub k: usize,
    pub s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DispersionSetup {
    pub box_length: f64,
    pub n: usize,
    /// Number of oscillation periods simulated.
    pub periods: f64,
    /// dt = min(stability bound, phase_step/ω).
    pub phase_step: f64,
}

impl Default for DispersionSetup {
    fn default() -> Self {
        DispersionSetup {
            box_length: 2.0 * std::f64::consts::PI,
            n: 32,
            periods: 4.0,
            phase_step: 0.05,
        }
    }
}

/// Frequency of a sampled linear oscillation from the three-term recurrence
/// a_{n+1} + a_{n−1} = 2cos(ωdt)·a_n, solved in the least-squares sense.
pub fn fit_frequency(samples: &[f64], dt: f64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for w in samples.windows(3) {
        num += w[1] * (w[0] + w[2]);
        den += w[1] * w[1];
    }
    let c = (num / (2.0 * den)).clamp(-1.0, 1.0);
    c.acos() / dt
}

struct CaseResult {
    xi: f64,
    omega: f64,
    dt: f64,
    tol: f64,
}

fn run_case(case: DispersionCase, setup: &DispersionSetup) -> Result<CaseResult> {
    let domain = Domain::periodic(case.s, vec![setup.box_length], vec![setup.n])?;
    let op = build_operator(&domain)?;
    let potential = Potential::zero(1)?;
    let xi = 2.0 * std::f64::consts::PI * case.k as f64 / setup.box_length;
    let exact = xi.powf(case.s);
    let dt = stability_bound(&op, &potential, 0.9).min(setup.phase_step / exact);
    let steps = (setup.periods * 2.0 * std::f64::consts::PI / exact / dt).ceil() as usize;
    let mode = Field::from_fn(&domain, 1, |x, o| o[0] = (xi * x[0]).sin());
    let state = FieldState::new(mode.clone(), Field::zeros(&domain, 1))?;
    let mut stepper = Stepper::new(&op, &potential, dt, state)?;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(inner(&domain, &stepper.state().u, &mode)?);
    for _ in 0..steps {
        stepper.advance()?;
        samples.push(inner(&domain, &stepper.state().u, &mode)?);
    }
    Ok(CaseResult {
        xi,
        omega: fit_frequency(&samples, dt),
        dt,
        tol: 5.0 * dt * dt * xi.powf(3.0 * case.s),
    })
}

/// Fits ω for each (k, s) and checks |ω − |ξ_k|ˢ| ≤ 5·dt²·|ξ_k|^{3s}.
pub fn run_dispersion_check(cases: &[DispersionCase], setup: &DispersionSetup) -> Result<ExperimentReport> {
    let results: Vec<CaseResult> = cases
        .par_iter()
        .map(|&c| run_case(c, setup))
        .collect::<Result<_>>()?;
    let mut report = ExperimentReport::new(
        "dispersion",
        json!({ "cases": cases, "setup": setup }),
    );
    let mut table = SeriesTable::new("dispersion", &["k", "s", "xi", "dt", "omega_fit", "omega_exact", "abs_error", "tolerance"]);
    for (case, r) in cases.iter().zip(&results) {
        let exact = r.xi.powf(case.s);
        let err = (r.omega - exact).abs();
        table.push(vec![case.k as f64, case.s, r.xi, r.dt, r.omega, exact, err, r.tol]);
        report.verdicts.push(Verdict::at_most(
            format!("dispersion |omega - |xi|^s|, k = {}, s = {}", case.k, case.s),
            err,
            r.tol,
        ));
    }
    report.series.push(table);
    Ok(report)
}
