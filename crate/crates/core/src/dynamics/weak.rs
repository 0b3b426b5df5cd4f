//! Weak-form residual of u_tt + (−Δ)ˢu + ∇W(u) = 0 along a trajectory.
//!
//! For a time weight χ and a spatial test field ψ, two integrations by parts
//! in time give
//!
//! R = [χ⟨v,ψ⟩ − χ'⟨u,ψ⟩]₀ᵀ + ∫χ''⟨u,ψ⟩ + ∫χ B_s(u,ψ) + ∫χ ∫_Ω ∇W(u)·ψ,
//!
//! which vanishes for a weak solution. Time integrals use the trapezoidal
//! rule on the recorded snapshot times.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::Potential;
use crate::spectral::{bilinear_s, inner, BoundaryMode, Field, SpectralOperator};

use super::state::Trajectory;

/// Temporal factor χ(t) of a space-time test function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum TimeWeight {
    One,
    /// sin²(π(t − start)/(end − start)) on [start, end], zero elsewhere.
    SinWindow { start: f64, end: f64 },
}

impl TimeWeight {
    /// (χ, χ', χ'') at time t.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        match *self {
            TimeWeight::One => (1.0, 0.0, 0.0),
            TimeWeight::SinWindow { start, end } => {
                // Snapshot clocks can land a rounding error past the window
                // edges, where χ'' jumps; snap them onto the window.
                let slack = 1e-9 * (end - start);
                if t < start - slack || t > end + slack {
                    return (0.0, 0.0, 0.0);
                }
                let k = PI / (end - start);
                let phase = k * (t.clamp(start, end) - start);
                let sin = phase.sin();
                (
                    sin * sin,
                    k * (2.0 * phase).sin(),
                    2.0 * k * k * (2.0 * phase).cos(),
                )
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct TestFunction {
    pub psi: Field,
    pub weight: TimeWeight,
}

fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

/// One residual per test function, in input order.
pub fn weak_residual(
    op: &SpectralOperator,
    traj: &Trajectory,
    test_fns: &[TestFunction],
    potential: &Potential,
) -> Result<Vec<f64>> {
    let domain = op.domain();
    let exterior = domain.mode() == BoundaryMode::ExteriorDirichlet;
    if traj.states.len() < 2 {
        return Err(Error::InvalidConfig(
            "weak residual needs at least two snapshots".into(),
        ));
    }
    for (i, tf) in test_fns.iter().enumerate() {
        tf.psi.check_on(domain)?;
        tf.psi.check_same(&traj.states[0].u)?;
        if exterior && tf.psi.exterior_max(domain) != 0.0 {
            return Err(Error::TestFunctionSupport(i));
        }
    }
    let m = potential.components();
    let vol = domain.cell_volume();
    let mut grad = vec![0.0; m];

    // Per snapshot: ⟨u,ψ⟩, B_s(u,ψ), ∫∇W(u)·ψ for every test function.
    let mut pairing = vec![Vec::with_capacity(traj.states.len()); test_fns.len()];
    let mut elastic = pairing.clone();
    let mut adhesive = pairing.clone();
    for state in &traj.states {
        let mut force_pair = vec![0.0; test_fns.len()];
        for (p, y) in state.u.points().enumerate() {
            if exterior && !domain.is_interior(p) {
                continue;
            }
            potential.grad(y, &mut grad);
            for (acc, tf) in force_pair.iter_mut().zip(test_fns) {
                *acc += grad.iter().zip(tf.psi.point(p)).map(|(g, q)| g * q).sum::<f64>();
            }
        }
        for (j, tf) in test_fns.iter().enumerate() {
            pairing[j].push(inner(domain, &state.u, &tf.psi)?);
            elastic[j].push(bilinear_s(op, &state.u, &tf.psi)?);
            adhesive[j].push(force_pair[j] * vol);
        }
    }

    let first = &traj.states[0];
    let last = traj.final_state();
    let (t0, t1) = (traj.times[0], *traj.times.last().unwrap());
    test_fns
        .iter()
        .enumerate()
        .map(|(j, tf)| {
            let (c1, d1, _) = tf.weight.eval(t1);
            let (c0, d0, _) = tf.weight.eval(t0);
            let boundary = c1 * inner(domain, &last.v, &tf.psi)?
                - d1 * pairing[j].last().unwrap()
                - c0 * inner(domain, &first.v, &tf.psi)?
                + d0 * pairing[j][0];
            let integrand: Vec<f64> = traj
                .times
                .iter()
                .enumerate()
                .map(|(k, &t)| {
                    let (c, _, dd) = tf.weight.eval(t);
                    dd * pairing[j][k] + c * (elastic[j][k] + adhesive[j][k])
                })
                .collect();
            Ok(boundary + trapezoid(&traj.times, &integrand))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_window_derivatives_match_finite_differences() {
        let w = TimeWeight::SinWindow { start: 0.5, end: 2.0 };
        let h = 1e-5;
        for &t in &[0.7, 1.0, 1.3, 1.9] {
            let (c, d, dd) = w.eval(t);
            let (cp, dp, _) = w.eval(t + h);
            let (cm, dm, _) = w.eval(t - h);
            assert!(((cp - cm) / (2.0 * h) - d).abs() < 1e-8);
            assert!(((dp - dm) / (2.0 * h) - dd).abs() < 1e-6);
            assert!((0.0..=1.0).contains(&c));
        }
        assert_eq!(w.eval(0.4), (0.0, 0.0, 0.0));
        assert_eq!(w.eval(2.1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn trapezoid_is_exact_for_linear_data() {
        let t = [0.0, 0.5, 1.5, 2.0];
        let v: Vec<f64> = t.iter().map(|x| 3.0 * x + 1.0).collect();
        assert!((trapezoid(&t, &v) - 8.0).abs() < 1e-14);
    }
}
