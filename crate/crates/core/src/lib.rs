//! Numerical laboratory for the semilinear fractional wave equation
//!
//! u_tt + (−Δ)ˢu + ∇W(u) = 0 in Ω,  u = 0 outside Ω,
//!
//! with bounded adhesive potentials W whose gradient may jump on a critical
//! sphere. The crate provides a Fourier-multiplier discretization of (−Δ)ˢ,
//! the potentials and their C² regularizations, a Störmer–Verlet integrator
//! with energy bookkeeping, a discrete weak-form residual, and scripted
//! experiments built from those pieces.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod output;
pub mod potentials;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
