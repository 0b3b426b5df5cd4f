//! Initial data used by the experiments.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::{hs_norm, l2_norm, BoundaryMode, Domain, Field, SpectralOperator};

/// Position inside Ω in units of the per-axis extent, or `None` outside.
fn unit_coords(domain: &Domain, p: usize) -> Option<[f64; 3]> {
    if domain.mode() == BoundaryMode::ExteriorDirichlet && !domain.is_interior(p) {
        return None;
    }
    let x = domain.coords(p);
    let mut t = [0.0; 3];
    for (a, ext) in domain.omega_extent().iter().enumerate() {
        t[a] = x[a] / ext;
    }
    Some(t)
}

/// amplitude · Π exp(1 − 1/(1 − τᵢ²)), τᵢ = 2xᵢ/aᵢ − 1: a C^∞ bump with
/// peak `amplitude` at the centre of Ω, vanishing on ∂Ω. Vector fields
/// point along (1, …, 1)/√m.
pub fn interior_bump(domain: &Domain, m: usize, amplitude: f64) -> Field {
    let per = amplitude / (m as f64).sqrt();
    let d = domain.dim();
    let mut f = Field::zeros(domain, m);
    for p in 0..domain.num_points() {
        let Some(t) = unit_coords(domain, p) else { continue };
        let mut v = 1.0;
        for &ti in &t[..d] {
            let tau = 2.0 * ti - 1.0;
            v *= if tau.abs() < 1.0 {
                (1.0 - 1.0 / (1.0 - tau * tau)).exp()
            } else {
                0.0
            };
        }
        for c in 0..m {
            f.values_mut()[p * m + c] = per * v;
        }
    }
    f
}

/// amplitude · Π sin(kπxᵢ/aᵢ) on Ω (zero outside), scalar.
pub fn interior_sine(domain: &Domain, k: usize, amplitude: f64) -> Field {
    let d = domain.dim();
    let mut f = Field::zeros(domain, 1);
    for p in 0..domain.num_points() {
        let Some(t) = unit_coords(domain, p) else { continue };
        f.values_mut()[p] = amplitude * t[..d].iter().map(|ti| (k as f64 * PI * ti).sin()).product::<f64>();
    }
    f
}

/// Interior bump times a random combination of the first four sine modes
/// per axis and component, scaled so that max|u| = amplitude. Deterministic
/// in `seed`.
pub fn random_smooth(domain: &Domain, m: usize, amplitude: f64, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = domain.dim();
    let modes = 4;
    let coeffs: Vec<f64> = (0..m * d * modes).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let envelope = interior_bump(domain, 1, 1.0);
    let mut f = Field::zeros(domain, m);
    for p in 0..domain.num_points() {
        let e = envelope.values()[p];
        if e == 0.0 {
            continue;
        }
        let t = unit_coords(domain, p).unwrap_or([0.0; 3]);
        for c in 0..m {
            let mut v = 1.0;
            for (a, ta) in t[..d].iter().enumerate() {
                let base = (c * d + a) * modes;
                v *= (0..modes)
                    .map(|j| coeffs[base + j] * ((j + 1) as f64 * PI * ta).sin())
                    .sum::<f64>();
            }
            f.values_mut()[p * m + c] = e * v;
        }
    }
    let peak = f.max_norm();
    if peak > 0.0 {
        f.scale(amplitude / peak);
    }
    f
}

fn rescale(f: &Field, norm: f64, target: f64, what: &str) -> Result<Field> {
    if !(target >= 0.0) || !target.is_finite() {
        return Err(Error::InvalidConfig(format!("{what} target must be nonnegative, got {target}")));
    }
    if target == 0.0 {
        return Ok(f.scaled(0.0));
    }
    if norm == 0.0 {
        return Err(Error::InvalidConfig(format!("cannot scale a zero field to {what} {target}")));
    }
    Ok(f.scaled(target / norm))
}

/// f scaled so that ‖f‖_{Hˢ} = target.
pub fn normalize_hs(op: &SpectralOperator, f: &Field, target: f64) -> Result<Field> {
    rescale(f, hs_norm(op, f)?, target, "Hs norm")
}

/// f scaled so that ‖f‖_{L²} = target.
pub fn normalize_l2(domain: &Domain, f: &Field, target: f64) -> Result<Field> {
    rescale(f, l2_norm(domain, f)?, target, "L2 norm")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::build_operator;

    #[test]
    fn bump_vanishes_outside_and_peaks_in_the_middle() {
        let dom = Domain::exterior(1.0, vec![1.0], 2.0, vec![64]).unwrap();
        let b = interior_bump(&dom, 1, 0.5);
        assert_eq!(b.exterior_max(&dom), 0.0);
        assert!((b.max_norm() - 0.5).abs() < 1e-12);
        let v = interior_bump(&dom, 2, 0.5);
        assert!((v.max_norm() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn random_smooth_is_seeded_and_scaled() {
        let dom = Domain::exterior(1.0, vec![1.0, 1.0], 2.0, vec![16, 16]).unwrap();
        let a = random_smooth(&dom, 2, 0.3, 5);
        assert_eq!(a, random_smooth(&dom, 2, 0.3, 5));
        assert_ne!(a, random_smooth(&dom, 2, 0.3, 6));
        assert!((a.max_norm() - 0.3).abs() < 1e-12);
        assert_eq!(a.exterior_max(&dom), 0.0);
    }

    #[test]
    fn normalization_hits_targets() {
        let dom = Domain::exterior(1.0, vec![1.0], 2.0, vec![64]).unwrap();
        let op = build_operator(&dom).unwrap();
        let f = interior_sine(&dom, 1, 1.0);
        let g = normalize_hs(&op, &f, 0.05).unwrap();
        assert!((hs_norm(&op, &g).unwrap() - 0.05).abs() < 1e-15);
        let h = normalize_l2(&dom, &f, 0.2).unwrap();
        assert!((l2_norm(&dom, &h).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(normalize_hs(&op, &f, 0.0).unwrap().max_norm(), 0.0);
        assert!(normalize_hs(&op, &Field::zeros(&dom, 1), 1.0).is_err());
    }
}
