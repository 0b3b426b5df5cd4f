//! Kick-drift-kick Störmer–Verlet for u_tt = −(−Δ)ˢu − ∇W(u).
//!
//! In exterior-Dirichlet mode the force is projected onto grid points inside
//! Ω before each kick. Together with masked data this keeps u and v zero on
//! the collar exactly, and the scheme remains the Verlet method of the
//! projected Hamiltonian system, hence symplectic and time-reversible.

use crate::error::{Error, Result};
use crate::potentials::Potential;
use crate::spectral::{
    apply_fractional_laplacian, build_operator, inner, mask_exterior_in_place, seminorm_s,
    BoundaryMode, Field, SpectralOperator,
};

use super::state::{EnergyBreakdown, FieldState, SimConfig, Trajectory};

/// −(−Δ)ˢu − ∇W(u), projected onto Ω in exterior-Dirichlet mode.
pub fn force(op: &SpectralOperator, potential: &Potential, u: &Field) -> Result<Field> {
    let mut f = apply_fractional_laplacian(op, u)?;
    let m = u.components();
    let mut grad = vec![0.0; m];
    for (fi, ui) in f.values_mut().chunks_exact_mut(m).zip(u.points()) {
        potential.grad(ui, &mut grad);
        for (a, g) in fi.iter_mut().zip(&grad) {
            *a = -*a - g;
        }
    }
    if op.domain().mode() == BoundaryMode::ExteriorDirichlet {
        mask_exterior_in_place(op.domain(), &mut f)?;
    }
    Ok(f)
}

/// Energy of a state; the adhesive term integrates W(u) over Ω only.
pub fn energy(op: &SpectralOperator, potential: &Potential, state: &FieldState) -> Result<EnergyBreakdown> {
    let domain = op.domain();
    state.u.check_on(domain)?;
    state.u.check_same(&state.v)?;
    let kinetic = 0.5 * inner(domain, &state.v, &state.v)?;
    let semi = seminorm_s(op, &state.u)?;
    let adhesive = state
        .u
        .points()
        .zip(domain.interior_mask())
        .filter(|(_, &inside)| inside)
        .map(|(y, _)| potential.eval(y))
        .sum::<f64>()
        * domain.cell_volume();
    Ok(EnergyBreakdown::new(kinetic, 0.5 * semi * semi, adhesive))
}

/// Reusable stepper that carries the force at the current position between
/// steps (first-same-as-last).
pub struct Stepper<'a> {
    op: &'a SpectralOperator,
    potential: &'a Potential,
    dt: f64,
    state: FieldState,
    force: Field,
    steps: usize,
    t0: f64,
}

impl<'a> Stepper<'a> {
    pub fn new(
        op: &'a SpectralOperator,
        potential: &'a Potential,
        dt: f64,
        state: FieldState,
    ) -> Result<Self> {
        state.u.check_on(op.domain())?;
        state.u.check_same(&state.v)?;
        let force = force(op, potential, &state.u)?;
        let t0 = state.t;
        Ok(Stepper {
            t0,
            op,
            potential,
            dt,
            state,
            force,
            steps: 0,
        })
    }

    pub fn state(&self) -> &FieldState {
        &self.state
    }

    pub fn into_state(self) -> FieldState {
        self.state
    }

    pub fn advance(&mut self) -> Result<()> {
        let half = 0.5 * self.dt;
        self.state.v.axpy(half, &self.force);
        self.state.u.axpy(self.dt, &self.state.v);
        self.force = force(self.op, self.potential, &self.state.u)?;
        self.state.v.axpy(half, &self.force);
        self.steps += 1;
        self.state.t = self.t0 + self.steps as f64 * self.dt;
        if !self.state.u.is_finite() || !self.state.v.is_finite() {
            return Err(Error::BlowUp {
                step: self.steps,
                time: self.state.t,
            });
        }
        Ok(())
    }
}

/// One Störmer–Verlet step of size `dt`.
pub fn step(
    state: &FieldState,
    op: &SpectralOperator,
    potential: &Potential,
    dt: f64,
) -> Result<FieldState> {
    let mut stepper = Stepper::new(op, potential, dt, state.clone())?;
    stepper.advance()?;
    let mut next = stepper.into_state();
    if op.domain().mode() == BoundaryMode::ExteriorDirichlet {
        mask_exterior_in_place(op.domain(), &mut next.u)?;
        mask_exterior_in_place(op.domain(), &mut next.v)?;
    }
    Ok(next)
}

/// Integrates to the final time, recording every `record_every` steps (and
/// always the last step).
pub fn simulate(config: &SimConfig) -> Result<Trajectory> {
    let op = build_operator(&config.domain)?;
    simulate_with(&op, config)
}

/// As [`simulate`], reusing a prebuilt operator for the config's domain.
pub fn simulate_with(op: &SpectralOperator, config: &SimConfig) -> Result<Trajectory> {
    config.validate(op)?;
    let steps = config.num_steps();
    let initial = FieldState::new(config.u0.clone(), config.v0.clone())?;
    let mut stepper = Stepper::new(op, &config.potential, config.dt, initial)?;
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        energies: Vec::new(),
        dt: config.dt,
        steps,
    };
    let record = |state: &FieldState, traj: &mut Trajectory| -> Result<()> {
        traj.energies.push(energy(op, &config.potential, state)?);
        traj.times.push(state.t);
        traj.states.push(state.clone());
        Ok(())
    };
    record(stepper.state(), &mut traj)?;
    for k in 1..=steps {
        stepper.advance()?;
        if k % config.record_every == 0 || k == steps {
            record(stepper.state(), &mut traj)?;
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{clipped_quadratic, example41_member};
    use crate::spectral::Domain;
    use std::f64::consts::PI;

    #[test]
    fn zero_state_is_an_equilibrium() {
        let dom = Domain::exterior(0.75, vec![1.0], 2.0, vec![32]).unwrap();
        let op = build_operator(&dom).unwrap();
        let w = clipped_quadratic(1.0).unwrap();
        let s0 = FieldState::new(Field::zeros(&dom, 1), Field::zeros(&dom, 1)).unwrap();
        let mut s = s0.clone();
        for _ in 0..20 {
            s = step(&s, &op, &w, 1e-3).unwrap();
        }
        assert_eq!(s.u, s0.u);
        assert_eq!(s.v, s0.v);
        assert!((s.t - 0.02).abs() < 1e-15);
    }

    #[test]
    fn example41_constant_state_is_stationary() {
        let eps = 0.5;
        let dom = Domain::neumann_1d(1.0, 32).unwrap();
        let op = build_operator(&dom).unwrap();
        let w = example41_member(eps).unwrap();
        let s0 = FieldState::new(Field::constant(&dom, &[1.0 + eps]), Field::zeros(&dom, 1)).unwrap();
        let mut s = s0.clone();
        for _ in 0..100 {
            s = step(&s, &op, &w, 1e-3).unwrap();
        }
        for (a, b) in s.u.values().iter().zip(s0.u.values()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn blow_up_is_reported_with_step() {
        let dom = Domain::periodic(1.0, vec![2.0 * PI], vec![16]).unwrap();
        let op = build_operator(&dom).unwrap();
        let w = crate::potentials::Potential::zero(1).unwrap();
        let u = Field::from_fn(&dom, 1, |x, o| o[0] = (7.0 * x[0]).sin());
        let s0 = FieldState::new(u, Field::zeros(&dom, 1)).unwrap();
        // dt far beyond 2/ω = 2/64: the leapfrog amplification grows without bound
        let mut stepper = Stepper::new(&op, &w, 0.5, s0).unwrap();
        let err = (0..10_000).find_map(|_| stepper.advance().err());
        assert!(matches!(err, Some(Error::BlowUp { step, .. }) if step > 1));
    }

    #[test]
    fn energy_of_constant_clipped_state() {
        let dom = Domain::neumann_1d(2.0, 16).unwrap();
        let op = build_operator(&dom).unwrap();
        let w = clipped_quadratic(1.0).unwrap();
        let s = FieldState::new(Field::constant(&dom, &[1.0]), Field::zeros(&dom, 1)).unwrap();
        let e = energy(&op, &w, &s).unwrap();
        assert_eq!(e.kinetic, 0.0);
        assert!(e.elastic < 1e-24);
        assert!((e.adhesive - 2.0).abs() < 1e-14);
        assert_eq!(e.total, e.kinetic + e.elastic + e.adhesive);
    }
}
