//! Small-data confinement: for ‖u₀‖_{Hˢ} ≤ ε₁, ‖v₀‖_{L²} ≤ ε₂ the chain
//!
//!   ‖W_ε(u₀)‖_{L¹} ≤ ‖W(u₀)‖_{L¹} + ε₃|Ω| ≤ |Ω|ε₁² + ε₃|Ω|,
//!   E_ε(t) ≤ C := ½ε₂² + ½ε₁² + |Ω|ε₁² + ε₃|Ω|,
//!   ‖u(t)‖_{L²} ≤ ε₁ + T√(2C),
//!   sup|u| ≤ C_emb·max_t‖u(t)‖_{Hˢ} ≤ C_emb·√((ε₁ + T√(2C))² + 2C),
//!
//! with ε₃ = sup|W_ε − W|, keeps |u| ≤ 1 − η away from the critical sphere.
//! Each link is measured on a simulation under W_ε and reported.

use serde_json::json;

use crate::dynamics::{
    apriori_l2_bound, energy, simulate_with, stability_bound, sup_bound_from_bounds,
    sup_bound_from_energy, SimConfig, Trajectory, DEFAULT_CFL_SAFETY, DEFAULT_RECORD_EVERY,
};
use crate::error::{Error, Result};
use crate::output::LinePlot;
use crate::potentials::{certify_family, Potential, RegularizedFamily};
use crate::spectral::{build_operator, hs_norm, l2_norm, Domain, Field, SpectralOperator};

use super::data::{interior_sine, normalize_hs, normalize_l2};
use super::{ExperimentReport, SeriesTable, Verdict};

/// Relative allowance for floating-point evaluation of inequalities that
/// hold exactly in real arithmetic.
const ROUNDING: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct SmallDataSetup {
    pub domain: Domain,
    pub t_final: f64,
    /// `None` picks the stability bound of both potentials.
    pub dt: Option<f64>,
    pub record_every: usize,
    /// Shapes rescaled to ‖u₀‖_{Hˢ} = ε₁ and ‖v₀‖_{L²} = ε₂.
    pub u0_shape: Field,
    pub v0_shape: Field,
    /// ε of the regularized member W_ε that is simulated.
    pub member_eps: f64,
}

impl SmallDataSetup {
    /// d = 1, s = 1, Ω = (0, 1) padded to (0, 2) with 64 points, T = 1,
    /// u₀ ∝ sin(πx), v₀ ∝ sin(πx), W_ε with ε = 0.01.
    pub fn standard() -> Result<Self> {
        let domain = Domain::exterior(1.0, vec![1.0], 2.0, vec![64])?;
        let shape = interior_sine(&domain, 1, 1.0);
        Ok(SmallDataSetup {
            t_final: 1.0,
            dt: None,
            record_every: DEFAULT_RECORD_EVERY,
            u0_shape: shape.clone(),
            v0_shape: shape,
            member_eps: 0.01,
            domain,
        })
    }
}

fn run(op: &SpectralOperator, setup: &SmallDataSetup, w: &Potential, u0: &Field, v0: &Field, dt: f64) -> Result<Trajectory> {
    let config = SimConfig {
        domain: setup.domain.clone(),
        potential: w.clone(),
        t_final: setup.t_final,
        dt,
        u0: u0.clone(),
        v0: v0.clone(),
        record_every: setup.record_every,
        cfl_safety: DEFAULT_CFL_SAFETY,
    };
    simulate_with(op, &config)
}

/// sup over |y| ≤ radius of |∇W_ε − ∇W|, sampled radially.
fn gradient_gap(a: &Potential, b: &Potential, radius: f64) -> f64 {
    let samples = 4000;
    (0..=samples)
        .map(|i| {
            let r = radius.max(0.0) * i as f64 / samples as f64;
            (a.profile_slope(r) - b.profile_slope(r)).abs()
        })
        .fold(0.0, f64::max)
}

pub fn run_small_data(eps1: f64, eps2: f64, fam: &RegularizedFamily, setup: &SmallDataSetup) -> Result<ExperimentReport> {
    let domain = &setup.domain;
    let (d, s) = (domain.dim(), domain.order());
    if 2.0 * s <= d as f64 {
        return Err(Error::EmbeddingHypothesis { d, s });
    }
    let op = build_operator(domain)?;
    let u0 = normalize_hs(&op, &setup.u0_shape, eps1)?;
    let v0 = normalize_l2(domain, &setup.v0_shape, eps2)?;
    let base = fam.base().clone();
    let member = fam.make(setup.member_eps)?;
    let dt = match setup.dt {
        Some(dt) => dt,
        None => stability_bound(&op, &member, DEFAULT_CFL_SAFETY).min(stability_bound(&op, &base, DEFAULT_CFL_SAFETY)),
    };
    let (traj_eps, traj_base) = rayon::join(
        || run(&op, setup, &member, &u0, &v0, dt),
        || run(&op, setup, &base, &u0, &v0, dt),
    );
    let (traj_eps, traj_base) = (traj_eps?, traj_base?);

    let cert = certify_family(fam, &[setup.member_eps], 4000, 11)?;
    let eps3 = cert.entries[0].sup_value_dist;
    let omega = domain.omega_measure();
    let t_final = traj_eps.times.last().copied().unwrap_or(setup.t_final);

    let initial = &traj_eps.states[0];
    let w_eps_u0 = energy(&op, &member, initial)?.adhesive;
    let w_u0 = energy(&op, &base, initial)?.adhesive;
    let big_c = 0.5 * eps2 * eps2 + 0.5 * eps1 * eps1 + omega * eps1 * eps1 + eps3 * omega;
    let max_energy = traj_eps.energies.iter().map(|e| e.total).fold(f64::NEG_INFINITY, f64::max);
    let mut max_l2: f64 = 0.0;
    let mut series = SeriesTable::new("small_data", &["t", "l2_norm", "hs_norm", "max_abs_u", "max_abs_u_base", "energy"]);
    for ((t, st), (sb, e)) in traj_eps
        .times
        .iter()
        .zip(&traj_eps.states)
        .zip(traj_base.states.iter().zip(&traj_eps.energies))
    {
        let l2 = l2_norm(domain, &st.u)?;
        max_l2 = max_l2.max(l2);
        series.push(vec![*t, l2, hs_norm(&op, &st.u)?, st.u.max_norm(), sb.u.max_norm(), e.total]);
    }
    let l2_bound = apriori_l2_bound(big_c, eps1, t_final);
    let sup = sup_bound_from_energy(&op, &traj_eps)?;
    let apriori_sup = sup_bound_from_bounds(d, s, l2_bound, big_c)?;
    let max_abs = traj_eps.max_abs();
    let eta = 1.0 - max_abs;

    let mut report = ExperimentReport::new(
        "small_data",
        json!({
            "eps1": eps1,
            "eps2": eps2,
            "eps3": eps3,
            "family": fam.describe(),
            "member_eps": setup.member_eps,
            "d": d,
            "s": s,
            "n": domain.resolution(),
            "omega_measure": omega,
            "t_final": t_final,
            "dt": dt,
            "energy_bound_C": big_c,
            "embedding_constant": sup.constant,
            "eta": eta,
        }),
    );
    let slack = |x: f64| x + ROUNDING * x.abs();
    let v = &mut report.verdicts;
    v.push(Verdict::at_most(
        "initial adhesive energy ||W_eps(u0)||_L1 <= ||W(u0)||_L1 + eps3 |Omega|",
        w_eps_u0,
        slack(w_u0 + eps3 * omega),
    ));
    v.push(Verdict::at_most(
        "initial adhesive energy ||W(u0)||_L1 + eps3 |Omega| <= |Omega| eps1^2 + eps3 |Omega|",
        w_u0 + eps3 * omega,
        slack(omega * eps1 * eps1 + eps3 * omega),
    ));
    v.push(Verdict::at_most("energy bound max_t E_eps(t) <= C", max_energy, slack(big_c)));
    v.push(Verdict::at_most(
        "L2 a-priori bound max_t ||u(t)||_L2 <= eps1 + T sqrt(2C)",
        max_l2,
        slack(l2_bound),
    ));
    v.push(Verdict::at_most(
        "sup bound max|u| <= C_emb max_t ||u(t)||_Hs",
        max_abs,
        slack(sup.bound),
    ));
    v.push(Verdict::at_most(
        "sup bound C_emb max_t ||u(t)||_Hs <= C_emb sqrt(L2 bound^2 + 2C)",
        sup.bound,
        slack(apriori_sup),
    ));
    if apriori_sup < 1.0 {
        v.push(Verdict::greater_than("confinement margin eta = 1 - max|u|", eta, 0.0));
        // In B(0, 1 − η) both potentials are smooth, so the trajectories
        // differ by at most sup|∇W_ε − ∇W|·T²/2 there.
        let gap = gradient_gap(&member, &base, max_abs.max(traj_base.max_abs()));
        let mut diff: f64 = 0.0;
        for (a, b) in traj_eps.states.iter().zip(&traj_base.states) {
            diff = diff.max(a.u.difference(&b.u)?.max_norm());
        }
        v.push(Verdict::at_most(
            "agreement of W_eps and W trajectories max|u_eps - u| <= sup|grad W_eps - grad W| T^2/2",
            diff,
            slack(gap * t_final * t_final / 2.0),
        ));
    } else {
        v.push(Verdict::less_than(
            "small-data regime: a-priori sup bound below the critical sphere",
            apriori_sup,
            1.0,
        ));
        report.notes.push(format!(
            "data outside the small-data regime: a-priori sup bound {apriori_sup:.4} >= 1, confinement not asserted (measured max|u| = {max_abs:.4})"
        ));
    }
    report.plots.push((
        "max_abs_u".into(),
        LinePlot::new("max |u| over the grid", "t", "max |u|")
            .with_series(
                format!("W_eps, eps = {}", setup.member_eps),
                traj_eps.times.iter().zip(&traj_eps.states).map(|(t, s)| (*t, s.u.max_norm())).collect(),
            )
            .with_series(
                "W",
                traj_base.times.iter().zip(&traj_base.states).map(|(t, s)| (*t, s.u.max_norm())).collect(),
            )
            .with_threshold(1.0),
    ));
    report.plots.push((
        "energy".into(),
        LinePlot::new("energy under W_eps", "t", "E").with_series(
            "E(t)",
            traj_eps.times.iter().zip(&traj_eps.energies).map(|(t, e)| (*t, e.total)).collect(),
        ),
    ));
    report.series.push(series);
    Ok(report)
}
