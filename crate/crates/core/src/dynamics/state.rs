use serde::Serialize;

use crate::error::{Error, Result};
use crate::potentials::Potential;
use crate::spectral::{BoundaryMode, Domain, Field, SpectralOperator};

/// Displacement u, velocity v = u_t, and the clock.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub u: Field,
    pub v: Field,
    pub t: f64,
}

impl FieldState {
    pub fn new(u: Field, v: Field) -> Result<Self> {
        u.check_same(&v)?;
        Ok(FieldState { u, v, t: 0.0 })
    }

    /// Same configuration with the velocity reversed.
    pub fn reversed(&self) -> Self {
        FieldState {
            u: self.u.clone(),
            v: self.v.scaled(-1.0),
            t: self.t,
        }
    }
}

/// E(u) = ½‖u_t‖² + ½[u]²_s + ‖W(u)‖_{L¹(Ω)} split into its three terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub elastic: f64,
    pub adhesive: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(kinetic: f64, elastic: f64, adhesive: f64) -> Self {
        EnergyBreakdown {
            kinetic,
            elastic,
            adhesive,
            total: kinetic + elastic + adhesive,
        }
    }
}

pub const DEFAULT_CFL_SAFETY: f64 = 0.9;
pub const DEFAULT_RECORD_EVERY: usize = 10;

/// Largest admissible step: cfl · 2/√(λ_max + Lip(∇W)).
pub fn stability_bound(op: &SpectralOperator, potential: &Potential, cfl_safety: f64) -> f64 {
    let lip = potential.gradient_lipschitz();
    let lip = if lip.is_finite() { lip } else { 0.0 };
    cfl_safety * 2.0 / (op.lambda_max() + lip).sqrt()
}

/// Everything needed to run one simulation of the initial-boundary value
/// problem.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub domain: Domain,
    pub potential: Potential,
    pub t_final: f64,
    pub dt: f64,
    pub u0: Field,
    pub v0: Field,
    pub record_every: usize,
    pub cfl_safety: f64,
}

impl SimConfig {
    /// Config with the default CFL safety, record interval, and dt equal to
    /// the stability bound.
    pub fn with_stable_dt(
        domain: Domain,
        potential: Potential,
        t_final: f64,
        u0: Field,
        v0: Field,
        op: &SpectralOperator,
    ) -> Self {
        let dt = stability_bound(op, &potential, DEFAULT_CFL_SAFETY);
        SimConfig {
            domain,
            potential,
            t_final,
            dt,
            u0,
            v0,
            record_every: DEFAULT_RECORD_EVERY,
            cfl_safety: DEFAULT_CFL_SAFETY,
        }
    }

    /// Number of steps; the final time is within dt/2 of `t_final`.
    pub fn num_steps(&self) -> usize {
        ((self.t_final / self.dt).round() as usize).max(1)
    }

    pub fn validate(&self, op: &SpectralOperator) -> Result<()> {
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "final time must be positive, got {}",
                self.t_final
            )));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "time step must be positive, got {}",
                self.dt
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig("record_every must be at least 1".into()));
        }
        if !(self.cfl_safety > 0.0) {
            return Err(Error::InvalidConfig("cfl_safety must be positive".into()));
        }
        self.u0.check_on(&self.domain)?;
        self.u0.check_same(&self.v0)?;
        if self.u0.components() != self.potential.components() {
            return Err(Error::InvalidConfig(format!(
                "fields have {} components but the potential acts on R^{}",
                self.u0.components(),
                self.potential.components()
            )));
        }
        if self.domain.mode() == BoundaryMode::ExteriorDirichlet {
            let ext = self.u0.exterior_max(&self.domain).max(self.v0.exterior_max(&self.domain));
            if ext != 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "initial data does not vanish outside the domain (max {ext})"
                )));
            }
        }
        let bound = stability_bound(op, &self.potential, self.cfl_safety);
        if self.dt > bound {
            return Err(Error::Unstable {
                dt: self.dt,
                bound,
            });
        }
        Ok(())
    }
}

/// Snapshots of a run at increasing times, with their energies.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<FieldState>,
    pub energies: Vec<EnergyBreakdown>,
    pub dt: f64,
    pub steps: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> &FieldState {
        self.states.last().expect("trajectory has at least one snapshot")
    }

    /// max_t |E(t) − E(0)|
    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.energies[0].total;
        self.energies
            .iter()
            .map(|e| (e.total - e0).abs())
            .fold(0.0, f64::max)
    }

    /// max_t E(t) − E(0), positive when the energy rises.
    pub fn max_energy_excess(&self) -> f64 {
        let e0 = self.energies[0].total;
        self.energies
            .iter()
            .map(|e| e.total - e0)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// max over snapshots and grid points of |u|.
    pub fn max_abs(&self) -> f64 {
        self.states.iter().map(|s| s.u.max_norm()).fold(0.0, f64::max)
    }
}
