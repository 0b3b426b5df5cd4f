//! Constant of the Sobolev embedding Hˢ(ℝᵈ) ⊂ C⁰ for 2s > d:
//!
//! ‖u‖_{C⁰} ≤ C ‖u‖_{Hˢ},  C = √2 (2π)^{−d/2} (∫_{ℝᵈ} (1 + |ξ|ˢ)^{−2} dξ)^{1/2}.
//!
//! The integral is reduced to |S^{d−1}| ∫₀^∞ r^{d−1}(1 + rˢ)^{−2} dr, evaluated
//! adaptively up to a cutoff c, and the remainder bracketed in closed form:
//! r^{d−1−2s}(1 − 2r^{−s}) ≤ r^{d−1}(1 + rˢ)^{−2} ≤ r^{d−1−2s}.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::domain::BoundaryMode;
use super::field::Field;
use super::operator::{hs_norm, wavenumber, SpectralOperator};
use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;

/// Surface measure of the unit sphere S^{d−1} ⊂ ℝᵈ, 2π^{d/2}/Γ(d/2).
pub fn sphere_measure(d: usize) -> f64 {
    // Γ(d/2) for integer d via Γ(1) = 1, Γ(1/2) = √π, Γ(x + 1) = xΓ(x)
    let mut gamma = if d.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut x = if d.is_multiple_of(2) { 1.0 } else { 0.5 };
    while x < d as f64 / 2.0 {
        gamma *= x;
        x += 1.0;
    }
    2.0 * PI.powf(d as f64 / 2.0) / gamma
}

/// Embedding constant with its certified error budget.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EmbeddingConstant {
    pub value: f64,
    /// Absolute error bound on `value`.
    pub error_bound: f64,
    /// ∫_{ℝᵈ} (1 + |ξ|ˢ)^{−2} dξ.
    pub integral: f64,
    /// Cutoff actually used (doubled from the request until the tail fits).
    pub cutoff: f64,
}

pub fn embedding_constant(d: usize, s: f64, cutoff: f64, tol: f64) -> Result<f64> {
    embedding_constant_detailed(d, s, cutoff, tol).map(|c| c.value)
}

pub fn embedding_constant_detailed(
    d: usize,
    s: f64,
    cutoff: f64,
    tol: f64,
) -> Result<EmbeddingConstant> {
    if d == 0 || !(s > 0.0) {
        return Err(Error::NonPositiveOrder(s));
    }
    if 2.0 * s <= d as f64 {
        return Err(Error::EmbeddingHypothesis { d, s });
    }
    if !(tol > 0.0) || !(cutoff > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "cutoff and tolerance must be positive, got {cutoff}, {tol}"
        )));
    }
    let df = d as f64;
    let surface = sphere_measure(d);
    let prefactor = 2f64.sqrt() * (2.0 * PI).powf(-df / 2.0) * surface.sqrt();

    // J ≥ ∫₀¹ r^{d−1}/4 dr = 1/(4d), and |√a − √b| ≤ |a − b| / (2√min)
    let radial_lower = 1.0 / (4.0 * df);
    let radial_budget = tol * 2.0 * radial_lower.sqrt() / prefactor;

    let mut c = cutoff.max(1.0);
    let tail_halfwidth = |c: f64| c.powf(df - 3.0 * s) / (3.0 * s - df);
    while tail_halfwidth(c) > 0.5 * radial_budget {
        c *= 2.0;
        if !c.is_finite() {
            return Err(Error::Quadrature {
                tol,
                estimate: f64::INFINITY,
            });
        }
    }
    let upper = c.powf(df - 2.0 * s) / (2.0 * s - df);
    let tail = upper - tail_halfwidth(c);

    let mut breaks = vec![1.0];
    let mut b = 1.0;
    while b < c {
        breaks.push(b);
        b *= 2.0;
    }
    let mut small = 0.5;
    for _ in 0..30 {
        breaks.push(small);
        small *= 0.5;
    }
    let integrand = |r: f64| r.powf(df - 1.0) / (1.0 + r.powf(s)).powi(2);
    let head = integrate_adaptive(integrand, 0.0, c, &breaks, 0.5 * radial_budget, 20_000)?;

    let radial = head.value + tail;
    let error_radial = head.error + tail_halfwidth(c);
    let integral = surface * radial;
    let value = prefactor * radial.sqrt();
    let error_bound = prefactor * error_radial / (2.0 * radial_lower.sqrt());
    Ok(EmbeddingConstant {
        value,
        error_bound,
        integral,
        cutoff: c,
    })
}

/// Outcome of [`verify_embedding`].
#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingReport {
    pub constant: f64,
    pub trials: usize,
    /// max over trials of ‖f‖_∞ / (C‖f‖_{Hˢ}); 0 for vanishing fields.
    pub worst_ratio: f64,
    pub passed: bool,
}

/// Ratio ‖f‖_∞ / (C‖f‖_{Hˢ}) on the grid; defined as 0 when f ≡ 0.
pub fn embedding_ratio(op: &SpectralOperator, constant: f64, f: &Field) -> Result<f64> {
    let norm = hs_norm(op, f)?;
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok(f.max_norm() / (constant * norm))
}

/// Draws `trials` random band-limited fields on the operator's grid and
/// checks ‖f‖_∞ ≤ C‖f‖_{Hˢ} for each.
pub fn verify_embedding(op: &SpectralOperator, trials: usize, seed: u64) -> Result<EmbeddingReport> {
    let domain = op.domain();
    let d = domain.dim();
    let s = op.order();
    let constant = embedding_constant(d, s, 64.0, 1e-10)?;
    if domain.mode() == BoundaryMode::Neumann1d {
        return Err(Error::WrongMode {
            required: "periodic or exterior-dirichlet",
            actual: domain.mode().name(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let f = random_band_limited(op, &mut rng)?;
        worst = worst.max(embedding_ratio(op, constant, &f)?);
    }
    Ok(EmbeddingReport {
        constant,
        trials,
        worst_ratio: worst,
        passed: worst <= 1.0,
    })
}

/// Real field whose spectrum is supported on |k_i| ≤ n_i/4 with random
/// complex coefficients of random algebraic decay.
pub fn random_band_limited<R: Rng>(op: &SpectralOperator, rng: &mut R) -> Result<Field> {
    let domain = op.domain();
    let shape = domain.resolution().to_vec();
    let total: usize = shape.iter().product();
    let decay: f64 = rng.gen_range(0.0..2.5);
    let amplitude: f64 = 10f64.powf(rng.gen_range(-2.0..1.0));
    let mut spectrum = vec![Complex64::new(0.0, 0.0); total];
    for (flat, z) in spectrum.iter_mut().enumerate() {
        let mut rem = flat;
        let mut inside = true;
        let mut k2 = 0.0;
        for axis in (0..shape.len()).rev() {
            let n = shape[axis];
            let k = wavenumber(rem % n, n);
            rem /= n;
            inside &= k.abs() <= (n / 4) as f64;
            k2 += k * k;
        }
        if inside {
            let w = amplitude / (1.0 + k2.sqrt()).powf(decay);
            *z = Complex64::new(rng.gen_range(-1.0..1.0) * w, rng.gen_range(-1.0..1.0) * w);
        }
    }
    let values = inverse_real(&shape, spectrum);
    Field::from_values(domain, 1, values)
}

// Unnormalized inverse DFT, real part. Band-limited draws only; performance
// is irrelevant here, so a separable naive transform keeps this independent
// of the operator's FFT path.
fn inverse_real(shape: &[usize], mut data: Vec<Complex64>) -> Vec<f64> {
    let d = shape.len();
    for axis in 0..d {
        let n = shape[axis];
        let stride: usize = shape[axis + 1..].iter().product();
        let block = n * stride;
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = (0..n)
                        .map(|k| {
                            let phase = 2.0 * PI * (j * k % n) as f64 / n as f64;
                            data[base + k * stride] * Complex64::from_polar(1.0, phase)
                        })
                        .sum();
                }
                for (j, v) in line.iter().enumerate() {
                    data[base + j * stride] = *v;
                }
            }
        }
    }
    data.into_iter().map(|z| z.re).collect()
}
