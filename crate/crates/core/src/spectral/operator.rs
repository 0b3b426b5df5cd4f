//! The fractional Laplacian as a Fourier multiplier on the computational box.
//!
//! Frequencies are angular, ξ = 2πk/L with k ∈ {−n/2, …, n/2 − 1}. On the
//! Neumann interval the field is mirrored to a box of twice the length, which
//! turns the periodic multiplier into the cosine-basis operator with
//! eigenvalues (πk/L)^{2s}.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::domain::{BoundaryMode, Domain};
use super::field::{l2_norm, Field};
use crate::error::{Error, Result};

struct AxisPlan {
    len: usize,
    stride: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// (−Δ)ˢ discretized on a [`Domain`]. Immutable and shareable across threads.
pub struct SpectralOperator {
    domain: Domain,
    s: f64,
    /// Multiplier on the transform grid (the doubled grid in Neumann mode).
    multiplier: Vec<f64>,
    transform_shape: Vec<usize>,
    mirrored: bool,
    plans: Vec<AxisPlan>,
}

impl std::fmt::Debug for SpectralOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralOperator")
            .field("s", &self.s)
            .field("transform_shape", &self.transform_shape)
            .field("mirrored", &self.mirrored)
            .finish()
    }
}

/// Builds the multiplier |ξ|^{2s} for the domain's own order.
pub fn build_operator(domain: &Domain) -> Result<SpectralOperator> {
    SpectralOperator::new(domain, domain.order())
}

/// Signed integer wavenumber of FFT bin `j` out of `n`.
pub fn wavenumber(j: usize, n: usize) -> f64 {
    if j < n / 2 {
        j as f64
    } else {
        j as f64 - n as f64
    }
}

impl SpectralOperator {
    /// Operator of order `s` on the grid of `domain` (the domain's own order
    /// is ignored, which is what the semigroup checks need).
    pub fn new(domain: &Domain, s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::NonPositiveOrder(s));
        }
        let mirrored = domain.mode() == BoundaryMode::Neumann1d;
        let (transform_shape, lengths): (Vec<usize>, Vec<f64>) = if mirrored {
            (
                vec![2 * domain.resolution()[0]],
                vec![2.0 * domain.box_extent()[0]],
            )
        } else {
            (domain.resolution().to_vec(), domain.box_extent().to_vec())
        };

        let total: usize = transform_shape.iter().product();
        let d = transform_shape.len();
        let mut multiplier = vec![0.0; total];
        for (flat, value) in multiplier.iter_mut().enumerate() {
            let mut rem = flat;
            let mut xi2 = 0.0;
            for axis in (0..d).rev() {
                let n = transform_shape[axis];
                let j = rem % n;
                rem /= n;
                let xi = 2.0 * PI * wavenumber(j, n) / lengths[axis];
                xi2 += xi * xi;
            }
            *value = if xi2 == 0.0 { 0.0 } else { xi2.powf(s) };
        }

        let mut planner = FftPlanner::new();
        let mut plans = Vec::with_capacity(d);
        for axis in 0..d {
            let len = transform_shape[axis];
            plans.push(AxisPlan {
                len,
                stride: transform_shape[axis + 1..].iter().product(),
                forward: planner.plan_fft_forward(len),
                inverse: planner.plan_fft_inverse(len),
            });
        }

        Ok(SpectralOperator {
            domain: domain.clone(),
            s,
            multiplier,
            transform_shape,
            mirrored,
            plans,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn order(&self) -> f64 {
        self.s
    }

    /// The multiplier in the operator's natural basis: |ξ_k|^{2s} on the FFT
    /// lattice, or the cosine eigenvalues (πk/L)^{2s}, k = 0..n, in Neumann
    /// mode.
    pub fn symbol(&self) -> Vec<f64> {
        if self.mirrored {
            let n = self.domain.resolution()[0];
            self.multiplier[..n].to_vec()
        } else {
            self.multiplier.clone()
        }
    }

    /// Largest eigenvalue of the discrete operator.
    pub fn lambda_max(&self) -> f64 {
        self.symbol().into_iter().fold(0.0, f64::max)
    }

    fn transform(&self, buf: &mut [Complex64], inverse: bool) {
        let mut line: Vec<Complex64> = Vec::new();
        for plan in &self.plans {
            let fft = if inverse { &plan.inverse } else { &plan.forward };
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            if plan.stride == 1 {
                for chunk in buf.chunks_exact_mut(plan.len) {
                    fft.process_with_scratch(chunk, &mut scratch);
                }
                continue;
            }
            line.resize(plan.len, Complex64::new(0.0, 0.0));
            let block = plan.len * plan.stride;
            for outer in (0..buf.len()).step_by(block) {
                for inner in 0..plan.stride {
                    let base = outer + inner;
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = buf[base + k * plan.stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (k, value) in line.iter().enumerate() {
                        buf[base + k * plan.stride] = *value;
                    }
                }
            }
        }
    }

    fn load_component(&self, f: &Field, c: usize, buf: &mut Vec<Complex64>) {
        let m = f.components();
        let values = f.values();
        let n = f.num_points();
        buf.clear();
        buf.extend((0..n).map(|p| Complex64::new(values[p * m + c], 0.0)));
        if self.mirrored {
            // even extension about x = L on the cell-centered grid
            buf.extend((0..n).rev().map(|p| Complex64::new(values[p * m + c], 0.0)));
        }
    }

    /// Forward transform of one component, on the transform grid.
    pub fn spectrum(&self, f: &Field, c: usize) -> Result<Vec<Complex64>> {
        f.check_on(&self.domain)?;
        let mut buf = Vec::new();
        self.load_component(f, c, &mut buf);
        self.transform(&mut buf, false);
        Ok(buf)
    }

    /// Applies the multiplier |ξ|^{2s} (or `symbol^power`) componentwise.
    fn apply_with(&self, f: &Field, weight: impl Fn(f64) -> f64) -> Result<Field> {
        f.check_on(&self.domain)?;
        let m = f.components();
        let n = f.num_points();
        let total = self.multiplier.len() as f64;
        let mut out = Field::zeros(&self.domain, m);
        let mut buf = Vec::with_capacity(self.multiplier.len());
        for c in 0..m {
            self.load_component(f, c, &mut buf);
            self.transform(&mut buf, false);
            for (z, &sym) in buf.iter_mut().zip(&self.multiplier) {
                *z *= weight(sym) / total;
            }
            self.transform(&mut buf, true);
            let dst = out.values_mut();
            for p in 0..n {
                dst[p * m + c] = buf[p].re;
            }
        }
        Ok(out)
    }

    /// Sum of the weighted power spectrum, scaled to an L² quadrature.
    fn spectral_quadrature(&self, f: &Field, weight: impl Fn(f64) -> f64) -> Result<f64> {
        f.check_on(&self.domain)?;
        let total = self.multiplier.len() as f64;
        let mirror_factor = if self.mirrored { 0.5 } else { 1.0 };
        let mut acc = 0.0;
        let mut buf = Vec::with_capacity(self.multiplier.len());
        for c in 0..f.components() {
            self.load_component(f, c, &mut buf);
            self.transform(&mut buf, false);
            acc += buf
                .iter()
                .zip(&self.multiplier)
                .map(|(z, &sym)| weight(sym) * z.norm_sqr())
                .sum::<f64>();
        }
        Ok(acc * self.domain.cell_volume() / total * mirror_factor)
    }
}

/// (−Δ)ˢ f = F⁻¹(|ξ|^{2s} F f), componentwise; imaginary rounding discarded.
pub fn apply_fractional_laplacian(op: &SpectralOperator, f: &Field) -> Result<Field> {
    op.apply_with(f, |sym| sym)
}

/// (−Δ)^{s·power} f, i.e. the multiplier raised to `power`.
pub fn apply_power(op: &SpectralOperator, f: &Field, power: f64) -> Result<Field> {
    op.apply_with(f, |sym| if sym == 0.0 { 0.0 } else { sym.powf(power) })
}

/// [f]_s = ‖(−Δ)^{s/2} f‖_{L²}.
pub fn seminorm_s(op: &SpectralOperator, f: &Field) -> Result<f64> {
    Ok(op.spectral_quadrature(f, |sym| sym)?.sqrt())
}

/// ‖f‖_s = (‖f‖²_{L²} + [f]²_s)^{1/2}.
pub fn hs_norm(op: &SpectralOperator, f: &Field) -> Result<f64> {
    let l2 = l2_norm(op.domain(), f)?;
    let semi = seminorm_s(op, f)?;
    Ok((l2 * l2 + semi * semi).sqrt())
}

/// [f, g]_s = ⟨(−Δ)ˢ f, g⟩_{L²}.
pub fn bilinear_s(op: &SpectralOperator, f: &Field, g: &Field) -> Result<f64> {
    f.check_same(g)?;
    let af = apply_fractional_laplacian(op, f)?;
    super::field::inner(op.domain(), &af, g)
}
