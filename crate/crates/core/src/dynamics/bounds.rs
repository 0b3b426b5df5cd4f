//! A-priori bounds derived from energy conservation and the embedding
//! Hˢ ↪ L^∞.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{embedding_constant, hs_norm, SpectralOperator};

use super::state::Trajectory;

/// Cutoff and tolerance used whenever dynamics code needs the embedding
/// constant.
pub const EMBEDDING_CUTOFF: f64 = 64.0;
pub const EMBEDDING_TOL: f64 = 1e-10;

/// ‖u(t)‖_{L²} ≤ ‖u₀‖_{L²} + T·√(2E₀) for t ≤ T, from ‖u_t‖ ≤ √(2E).
/// Negative energies are treated as zero.
pub fn apriori_l2_bound(energy0: f64, u0_l2: f64, t_final: f64) -> f64 {
    u0_l2 + t_final * (2.0 * energy0.max(0.0)).sqrt()
}

/// √(‖u‖² + 2E) dominates the Hˢ norm whenever the elastic part of E is at
/// most E; multiplied by the embedding constant this bounds sup|u|.
pub fn sup_bound_from_bounds(d: usize, s: f64, l2_bound: f64, energy_bound: f64) -> Result<f64> {
    let c = embedding_constant(d, s, EMBEDDING_CUTOFF, EMBEDDING_TOL)?;
    Ok(c * (l2_bound * l2_bound + 2.0 * energy_bound.max(0.0)).sqrt())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SupBound {
    pub constant: f64,
    pub max_hs_norm: f64,
    pub bound: f64,
}

/// C_emb · max_t ‖u(t)‖_{Hˢ} over the recorded snapshots.
pub fn sup_bound_from_energy(op: &SpectralOperator, traj: &Trajectory) -> Result<SupBound> {
    let d = op.domain().dim();
    let s = op.order();
    if 2.0 * s <= d as f64 {
        return Err(Error::EmbeddingHypothesis { d, s });
    }
    let constant = embedding_constant(d, s, EMBEDDING_CUTOFF, EMBEDDING_TOL)?;
    let mut max_hs_norm: f64 = 0.0;
    for state in &traj.states {
        max_hs_norm = max_hs_norm.max(hs_norm(op, &state.u)?);
    }
    Ok(SupBound {
        constant,
        max_hs_norm,
        bound: constant * max_hs_norm,
    })
}
