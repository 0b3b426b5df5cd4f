//! Convolution of piecewise-quadratic radial profiles with the C^∞ bump
//! ρ(t) ∝ exp(−1/(1 − t²)) on (−1, 1).
//!
//! Because every profile piece is a polynomial of degree ≤ 2, the convolution
//! reduces to partial moments M_j(t) = ∫_{−1}^{t} τʲ ρ(τ) dτ, j = 0, 1, 2.
//! Those are tabulated once with composite Gauss-Legendre quadrature and
//! read back by cubic Hermite interpolation using the exact derivative
//! tʲρ(t); the interpolant is C¹, so mollified gradients are C¹ and the
//! mollified potentials are C².

use crate::quadrature::gauss_legendre;

use super::profile::{PiecewiseQuadratic, Quadratic};

const TABLE_CELLS: usize = 4096;
const CELL_NODES: usize = 16;

fn raw_bump(t: f64) -> f64 {
    if t <= -1.0 || t >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

/// Normalized bump kernel with cached partial moments.
#[derive(Debug, Clone)]
pub struct MollifierKernel {
    norm: f64,
    spacing: f64,
    moments: [Vec<f64>; 3],
}

impl Default for MollifierKernel {
    fn default() -> Self {
        Self::new()
    }
}

impl MollifierKernel {
    pub fn new() -> Self {
        let (nodes, weights) = gauss_legendre(CELL_NODES);
        let h = 2.0 / TABLE_CELLS as f64;
        let mut moments = [
            vec![0.0; TABLE_CELLS + 1],
            vec![0.0; TABLE_CELLS + 1],
            vec![0.0; TABLE_CELLS + 1],
        ];
        for i in 0..TABLE_CELLS {
            let a = -1.0 + i as f64 * h;
            let mut cell = [0.0; 3];
            for (x, w) in nodes.iter().zip(&weights) {
                let t = a + 0.5 * h * (x + 1.0);
                let rho = raw_bump(t) * 0.5 * h * w;
                cell[0] += rho;
                cell[1] += rho * t;
                cell[2] += rho * t * t;
            }
            for j in 0..3 {
                moments[j][i + 1] = moments[j][i] + cell[j];
            }
        }
        let norm = moments[0][TABLE_CELLS];
        for table in &mut moments {
            for v in table.iter_mut() {
                *v /= norm;
            }
        }
        moments[0][TABLE_CELLS] = 1.0;
        MollifierKernel {
            norm,
            spacing: h,
            moments,
        }
    }

    /// Normalized density ρ(t).
    pub fn density(&self, t: f64) -> f64 {
        raw_bump(t) / self.norm
    }

    /// M_j(t) = ∫_{−1}^{t} τʲ ρ(τ) dτ for j ∈ {0, 1, 2}.
    pub fn partial_moment(&self, j: usize, t: f64) -> f64 {
        if t <= -1.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return self.moments[j][TABLE_CELLS];
        }
        let h = self.spacing;
        let pos = (t + 1.0) / h;
        let i = (pos.floor() as usize).min(TABLE_CELLS - 1);
        let t0 = -1.0 + i as f64 * h;
        let u = (t - t0) / h;
        let table = &self.moments[j];
        let d0 = t0.powi(j as i32) * self.density(t0);
        let t1 = t0 + h;
        let d1 = t1.powi(j as i32) * self.density(t1);
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        h00 * table[i] + h10 * h * d0 + h01 * table[i + 1] + h11 * h * d1
    }

    /// ∫ τ² ρ(τ) dτ over the full support.
    pub fn second_moment(&self) -> f64 {
        self.moments[2][TABLE_CELLS]
    }
}

/// (f * ρ_δ)(r) for the even extension of a piecewise-quadratic profile.
#[derive(Debug, Clone)]
pub struct MollifiedProfile {
    segments: Vec<(f64, f64, Quadratic)>,
    delta: f64,
    second_moment: f64,
    kernel: std::sync::Arc<MollifierKernel>,
}

impl MollifiedProfile {
    pub fn new(base: &PiecewiseQuadratic, delta: f64, kernel: std::sync::Arc<MollifierKernel>) -> Self {
        assert!(delta > 0.0);
        MollifiedProfile {
            segments: base.even_extension(),
            delta,
            second_moment: kernel.second_moment(),
            kernel,
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Returns (value, slope) at r.
    pub fn evaluate(&self, r: f64) -> (f64, f64) {
        let delta = self.delta;
        let (lo_x, hi_x) = (r - delta, r + delta);
        let first = self.segments.partition_point(|seg| seg.1 < lo_x);
        let single = self.segments[first].1 >= hi_x;
        if single {
            // whole kernel inside one polynomial piece: exact moments
            let q = &self.segments[first].2;
            return (
                q.value(r) + q.c * delta * delta * self.second_moment,
                q.slope(r),
            );
        }
        let mut value = 0.0;
        let mut slope = 0.0;
        for &(lo, hi, q) in &self.segments[first..] {
            if lo >= hi_x {
                break;
            }
            let x0 = lo.max(lo_x);
            let x1 = hi.min(hi_x);
            if x1 <= x0 {
                continue;
            }
            // x = r − z, z = δt
            let t_lo = (r - x1) / delta;
            let t_hi = (r - x0) / delta;
            let dm = |j: usize| {
                self.kernel.partial_moment(j, t_hi) - self.kernel.partial_moment(j, t_lo)
            };
            let (m0, m1, m2) = (dm(0), dm(1), dm(2));
            let w = r - q.anchor;
            let p0 = q.a + q.b * w + q.c * w * w;
            let p1 = -(q.b + 2.0 * q.c * w);
            value += p0 * m0 + p1 * delta * m1 + q.c * delta * delta * m2;
            slope += (q.b + 2.0 * q.c * w) * m0 - 2.0 * q.c * delta * m1;
        }
        (value, slope)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_adaptive;

    #[test]
    fn moments_match_adaptive_quadrature() {
        let k = MollifierKernel::new();
        for &t in &[-0.93, -0.5, -0.123, 0.0, 0.31, 0.77, 0.999] {
            for j in 0..3 {
                let exact = integrate_adaptive(
                    |x: f64| x.powi(j as i32) * k.density(x),
                    -1.0,
                    t,
                    &[],
                    1e-14,
                    5000,
                )
                .unwrap()
                .value;
                let approx = k.partial_moment(j, t);
                assert!((exact - approx).abs() < 1e-11, "j={j} t={t}: {exact} vs {approx}");
            }
        }
        assert_eq!(k.partial_moment(0, 1.0), 1.0);
        assert!(k.partial_moment(1, 1.0).abs() < 1e-14);
    }

    #[test]
    fn mollified_quadratic_shifts_by_second_moment() {
        let k = std::sync::Arc::new(MollifierKernel::new());
        let base = PiecewiseQuadratic::new(
            vec![],
            vec![Quadratic {
                c: 1.0,
                ..Quadratic::ZERO
            }],
        );
        let m = MollifiedProfile::new(&base, 0.2, k.clone());
        let (v, s) = m.evaluate(0.37);
        assert!((v - (0.37f64.powi(2) + 0.04 * k.second_moment())).abs() < 1e-15);
        assert_eq!(s, 0.74);
    }

    #[test]
    fn kink_is_smoothed_against_direct_convolution() {
        let k = std::sync::Arc::new(MollifierKernel::new());
        let base = PiecewiseQuadratic::new(
            vec![1.0],
            vec![
                Quadratic {
                    c: 1.0,
                    ..Quadratic::ZERO
                },
                Quadratic::constant(1.0),
            ],
        );
        let delta = 0.1;
        let m = MollifiedProfile::new(&base, delta, k.clone());
        for &r in &[0.93, 0.99, 1.0, 1.04, 1.08] {
            let direct = integrate_adaptive(
                |t: f64| base.value((r - delta * t).abs()) * k.density(t),
                -1.0,
                1.0,
                &[(r - 1.0) / delta],
                1e-13,
                5000,
            )
            .unwrap()
            .value;
            let direct_slope = integrate_adaptive(
                |t: f64| base.slope((r - delta * t).abs()) * k.density(t),
                -1.0,
                1.0,
                &[(r - 1.0) / delta],
                1e-13,
                5000,
            )
            .unwrap()
            .value;
            let (v, s) = m.evaluate(r);
            assert!((v - direct).abs() < 1e-10, "r={r}: {v} vs {direct}");
            assert!((s - direct_slope).abs() < 1e-10, "r={r}: {s} vs {direct_slope}");
        }
    }
}
