//! Default configurations for the standard studies, shared by the CLI and
//! the test suites.

use crate::dynamics::{SimConfig, DEFAULT_CFL_SAFETY, DEFAULT_RECORD_EVERY};
use crate::error::Result;
use crate::potentials::{clipped_quadratic, mollified_family, RegularizedFamily};
use crate::spectral::{Domain, Field};

use super::data::interior_bump;
use super::dispersion::DispersionCase;

/// (k, s) pairs of the dispersion check.
pub fn dispersion_cases() -> Vec<DispersionCase> {
    vec![
        DispersionCase { k: 1, s: 1.0 },
        DispersionCase { k: 4, s: 0.5 },
        DispersionCase { k: 2, s: 2.0 },
    ]
}

/// Ω = (0, 1) in a box of length 2 with 64 points, s = 1.
pub fn unit_interval() -> Result<Domain> {
    Domain::exterior(1.0, vec![1.0], 2.0, vec![64])
}

/// Mollified clipped quadratic (u* = 1), kernel radius equal to ε.
pub fn mollified_clipped_family() -> Result<RegularizedFamily> {
    mollified_family(&clipped_quadratic(1.0)?, 1.0)
}

/// Energy study: W_ε with ε = 0.1, bump of amplitude 0.5 at rest, T = 5,
/// dt = 0.016 (to be refined twice).
pub fn energy_config() -> Result<SimConfig> {
    let domain = unit_interval()?;
    Ok(SimConfig {
        potential: mollified_clipped_family()?.make(0.1)?,
        t_final: 5.0,
        dt: 0.016,
        u0: interior_bump(&domain, 1, 0.5),
        v0: Field::zeros(&domain, 1),
        record_every: DEFAULT_RECORD_EVERY,
        cfl_safety: DEFAULT_CFL_SAFETY,
        domain,
    })
}

pub const ENERGY_REFINEMENTS: usize = 2;

pub fn convergence_eps() -> Vec<f64> {
    vec![0.2, 0.1, 0.05, 0.025]
}

/// ε study: initial amplitude 0.9 < 1 with an outward velocity 1.5·bump so
/// that |u| passes through the critical value; T = 2, dt = 0.01. The
/// potential field is a placeholder replaced by each W_ε.
pub fn convergence_config() -> Result<SimConfig> {
    let domain = unit_interval()?;
    let fam = mollified_clipped_family()?;
    Ok(SimConfig {
        potential: fam.make(0.2)?,
        t_final: 2.0,
        dt: 0.01,
        u0: interior_bump(&domain, 1, 0.9),
        v0: interior_bump(&domain, 1, 1.5),
        record_every: DEFAULT_RECORD_EVERY,
        cfl_safety: DEFAULT_CFL_SAFETY,
        domain,
    })
}

pub const SMALL_DATA_EPS1: f64 = 0.05;
pub const SMALL_DATA_EPS2: f64 = 0.0;
