//! Time integration of u_tt + (−Δ)ˢu + ∇W(u) = 0, energy accounting, and
//! weak-solution diagnostics.

mod bounds;
mod integrator;
mod state;
mod weak;

pub use bounds::{
    apriori_l2_bound, sup_bound_from_bounds, sup_bound_from_energy, SupBound, EMBEDDING_CUTOFF,
    EMBEDDING_TOL,
};
pub use integrator::{energy, force, simulate, simulate_with, step, Stepper};
pub use state::{
    stability_bound, EnergyBreakdown, FieldState, SimConfig, Trajectory, DEFAULT_CFL_SAFETY,
    DEFAULT_RECORD_EVERY,
};
pub use weak::{weak_residual, TestFunction, TimeWeight};
