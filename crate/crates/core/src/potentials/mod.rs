//! Adhesive potentials W: ℝᵐ → [0, ∞), their gradients, and C² regularized
//! families W_ε.
//!
//! Every potential here is radial, W(y) = f(|y|), so evaluation reduces to a
//! scalar profile and ∇W(y) = f'(|y|) y/|y|. On a gradient discontinuity the
//! inside closure is used (∇W = 2y on the unit sphere for the ball potential,
//! W'(±1) = ±2 for the clipped quadratic).

mod family;
mod mollifier;
mod profile;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use family::{
    certification_sample, certify_family, example41_family, is_monotone_decreasing,
    mollified_family, CertificationReport, EpsilonCertificate, FamilyMode, RegularizedFamily,
    DISTANCE_FLOOR, MONOTONE_SLACK,
};
pub use mollifier::{MollifiedProfile, MollifierKernel};
pub use profile::{PiecewiseQuadratic, Quadratic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regularity {
    C1Uniform,
    DiscontinuousGradient,
}

/// Where ∇W may jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CriticalSet {
    Empty,
    /// The sphere |y| = radius (the pair {±radius} when m = 1).
    Sphere(f64),
}

impl CriticalSet {
    /// Distance from y to the set; +∞ when empty.
    pub fn distance(&self, y: &[f64]) -> f64 {
        match *self {
            CriticalSet::Empty => f64::INFINITY,
            CriticalSet::Sphere(radius) => (norm(y) - radius).abs(),
        }
    }

    pub fn describe(&self, m: usize) -> String {
        match *self {
            CriticalSet::Empty => "empty".into(),
            CriticalSet::Sphere(r) if m == 1 => format!("{{±{r}}}"),
            CriticalSet::Sphere(r) => format!("sphere |y| = {r}"),
        }
    }
}

#[derive(Debug, Clone)]
enum Profile {
    Piecewise(PiecewiseQuadratic),
    Mollified(Arc<MollifiedProfile>),
}

impl Profile {
    #[inline]
    fn value(&self, r: f64) -> f64 {
        match self {
            Profile::Piecewise(p) => p.value(r),
            Profile::Mollified(p) => p.evaluate(r).0,
        }
    }

    #[inline]
    fn slope(&self, r: f64) -> f64 {
        match self {
            Profile::Piecewise(p) => p.slope(r),
            Profile::Mollified(p) => p.evaluate(r).1,
        }
    }
}

#[inline]
fn norm(y: &[f64]) -> f64 {
    if y.len() == 1 {
        y[0].abs()
    } else {
        y.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// A bounded potential W together with ∇W and the metadata the theory needs.
#[derive(Clone)]
pub struct Potential {
    name: String,
    m: usize,
    profile: Profile,
    bound_k: f64,
    regularity: Regularity,
    critical: CriticalSet,
    gradient_lipschitz: f64,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("name", &self.name)
            .field("m", &self.m)
            .field("bound_k", &self.bound_k)
            .field("regularity", &self.regularity)
            .field("critical", &self.critical)
            .finish()
    }
}

impl Potential {
    fn from_profile(
        name: String,
        m: usize,
        profile: PiecewiseQuadratic,
        regularity: Regularity,
        critical: CriticalSet,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidPotential("codomain dimension must be positive".into()));
        }
        if !profile.is_bounded() {
            return Err(Error::InvalidPotential(format!("{name} is unbounded at infinity")));
        }
        let (sup_w, sup_grad) = profile.sup_bounds();
        let gradient_lipschitz = profile.gradient_lipschitz();
        Ok(Potential {
            name,
            m,
            profile: Profile::Piecewise(profile),
            bound_k: sup_w.max(sup_grad),
            regularity,
            critical,
            gradient_lipschitz,
        })
    }

    /// W ≡ 0.
    pub fn zero(m: usize) -> Result<Self> {
        Potential::from_profile(
            format!("zero(m={m})"),
            m,
            PiecewiseQuadratic::new(vec![], vec![Quadratic::ZERO]),
            Regularity::C1Uniform,
            CriticalSet::Empty,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn components(&self) -> usize {
        self.m
    }

    /// K with 0 ≤ W ≤ K and |∇W| ≤ K everywhere.
    pub fn bound_k(&self) -> f64 {
        self.bound_k
    }

    pub fn regularity(&self) -> Regularity {
        self.regularity
    }

    pub fn critical_set(&self) -> CriticalSet {
        self.critical
    }

    /// Lipschitz estimate of ∇W (of its smooth pieces when ∇W jumps).
    pub fn gradient_lipschitz(&self) -> f64 {
        self.gradient_lipschitz
    }

    /// Piecewise profile, when the potential is not a mollification.
    pub fn piecewise_profile(&self) -> Option<&PiecewiseQuadratic> {
        match &self.profile {
            Profile::Piecewise(p) => Some(p),
            Profile::Mollified(_) => None,
        }
    }

    /// Radial profile value f(r).
    pub fn profile_value(&self, r: f64) -> f64 {
        self.profile.value(r)
    }

    /// Radial profile slope f'(r).
    pub fn profile_slope(&self, r: f64) -> f64 {
        self.profile.slope(r)
    }

    #[inline]
    pub fn eval(&self, y: &[f64]) -> f64 {
        debug_assert_eq!(y.len(), self.m);
        self.profile.value(norm(y))
    }

    #[inline]
    pub fn grad(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.m);
        if self.m == 1 {
            let u = y[0];
            let slope = self.profile.slope(u.abs());
            out[0] = if u < 0.0 { -slope } else { slope };
            return;
        }
        let r = norm(y);
        if r == 0.0 {
            out.fill(0.0);
            return;
        }
        let scale = self.profile.slope(r) / r;
        for (o, c) in out.iter_mut().zip(y) {
            *o = scale * c;
        }
    }

    pub fn grad_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        self.grad(y, &mut out);
        out
    }

    /// Scalar convenience for m = 1.
    pub fn value_1d(&self, u: f64) -> f64 {
        self.eval(&[u])
    }

    /// Scalar convenience for m = 1.
    pub fn derivative_1d(&self, u: f64) -> f64 {
        let mut out = [0.0];
        self.grad(&[u], &mut out);
        out[0]
    }
}

/// W(u) = u² for |u| ≤ u*, (u*)² otherwise (m = 1).
pub fn clipped_quadratic(u_star: f64) -> Result<Potential> {
    if !(u_star > 0.0) || !u_star.is_finite() {
        return Err(Error::InvalidPotential(format!(
            "u_star must be positive, got {u_star}"
        )));
    }
    Potential::from_profile(
        format!("clipped_quadratic(u_star={u_star})"),
        1,
        PiecewiseQuadratic::new(
            vec![u_star],
            vec![
                Quadratic {
                    c: 1.0,
                    ..Quadratic::ZERO
                },
                Quadratic::constant(u_star * u_star),
            ],
        ),
        Regularity::DiscontinuousGradient,
        CriticalSet::Sphere(u_star),
    )
}

/// W(y) = |y|² on the closed unit ball, 1 outside.
pub fn ball_potential(m: usize) -> Result<Potential> {
    if m == 0 {
        return Err(Error::InvalidPotential("m must be at least 1".into()));
    }
    Potential::from_profile(
        format!("ball(m={m})"),
        m,
        PiecewiseQuadratic::new(
            vec![1.0],
            vec![
                Quadratic {
                    c: 1.0,
                    ..Quadratic::ZERO
                },
                Quadratic::constant(1.0),
            ],
        ),
        Regularity::DiscontinuousGradient,
        CriticalSet::Sphere(1.0),
    )
}

/// C^{1,1} truncation of |y|²: equal to |y|² for |y| ≤ r_in, radial slope
/// decaying linearly to zero on [r_in, r_out], constant r_in·r_out beyond.
pub fn capped_quadratic(m: usize, r_in: f64, r_out: f64) -> Result<Potential> {
    if m == 0 || !(r_in > 0.0) || !(r_out > r_in) || !r_out.is_finite() {
        return Err(Error::InvalidPotential(format!(
            "capped quadratic needs m >= 1 and 0 < r_in < r_out, got m={m}, r_in={r_in}, r_out={r_out}"
        )));
    }
    let top = r_in * r_out;
    Potential::from_profile(
        format!("capped(m={m}, r_in={r_in}, r_out={r_out})"),
        m,
        PiecewiseQuadratic::new(
            vec![r_in, r_out],
            vec![
                Quadratic {
                    c: 1.0,
                    ..Quadratic::ZERO
                },
                Quadratic {
                    anchor: r_out,
                    a: top,
                    b: 0.0,
                    c: -r_in / (r_out - r_in),
                },
                Quadratic::constant(top),
            ],
        ),
        Regularity::C1Uniform,
        CriticalSet::Empty,
    )
}

/// Member W_ε of the scalar family with
/// W'_ε(u) = (2−ε)u on |u| ≤ 1, ((2−ε)/ε)(1+ε−u) on [1, 1+ε] (odd extension),
/// 0 for |u| ≥ 1+ε; W_ε(0) = 0.
pub fn example41_member(eps: f64) -> Result<Potential> {
    if !(eps > 0.0 && eps < 2.0) {
        return Err(Error::EpsilonOutOfRange {
            eps,
            range: "(0, 2)",
        });
    }
    let outer = 1.0 + eps;
    let top = 1.0 + 0.5 * eps - 0.5 * eps * eps;
    Potential::from_profile(
        format!("example41(eps={eps})"),
        1,
        PiecewiseQuadratic::new(
            vec![1.0, outer],
            vec![
                Quadratic {
                    c: 1.0 - 0.5 * eps,
                    ..Quadratic::ZERO
                },
                Quadratic {
                    anchor: outer,
                    a: top,
                    b: 0.0,
                    c: -(2.0 - eps) / (2.0 * eps),
                },
                Quadratic::constant(top),
            ],
        ),
        Regularity::C1Uniform,
        CriticalSet::Empty,
    )
}

/// Radial mollification of a piecewise-quadratic potential with kernel
/// radius `delta`. The result is C^∞ in r and C² on ℝᵐ.
pub fn mollify(base: &Potential, delta: f64, kernel: Arc<MollifierKernel>) -> Result<Potential> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidPotential(format!(
            "mollifier radius must be positive, got {delta}"
        )));
    }
    let Profile::Piecewise(profile) = &base.profile else {
        return Err(Error::InvalidPotential(format!(
            "{} is already mollified",
            base.name
        )));
    };
    let mollified = Arc::new(MollifiedProfile::new(profile, delta, kernel));

    // Sampled Lipschitz constant of the radial gradient.
    let reach = profile.knots().last().copied().unwrap_or(0.0) + 2.0 * delta;
    let samples = 4000;
    let step = reach / samples as f64;
    let mut lip = profile.gradient_lipschitz().min(f64::MAX);
    if !lip.is_finite() {
        lip = 0.0;
    }
    let mut prev = mollified.evaluate(0.0).1;
    for i in 1..=samples {
        let r = i as f64 * step;
        let slope = mollified.evaluate(r).1;
        lip = lip.max(((slope - prev) / step).abs()).max((slope / r).abs());
        prev = slope;
    }

    Ok(Potential {
        name: format!("mollified(base={}, delta={delta})", base.name),
        m: base.m,
        profile: Profile::Mollified(mollified),
        bound_k: base.bound_k,
        regularity: Regularity::C1Uniform,
        critical: CriticalSet::Empty,
        gradient_lipschitz: lip,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clipped_quadratic_values() {
        let w = clipped_quadratic(1.0).unwrap();
        assert_eq!(w.value_1d(0.0), 0.0);
        assert_eq!(w.derivative_1d(0.0), 0.0);
        assert_eq!(w.value_1d(1.0), 1.0);
        assert_eq!(w.derivative_1d(1.0), 2.0);
        assert_eq!(w.derivative_1d(-1.0), -2.0);
        assert_eq!(w.value_1d(2.0), 1.0);
        assert_eq!(w.derivative_1d(2.0), 0.0);
        assert_eq!(w.bound_k(), 2.0);
        let w3 = clipped_quadratic(3.0).unwrap();
        assert_eq!(w3.bound_k(), 9.0);
        assert!(clipped_quadratic(0.0).is_err());
        assert!(clipped_quadratic(-1.0).is_err());
    }

    #[test]
    fn ball_potential_values() {
        let w = ball_potential(2).unwrap();
        assert_eq!(w.eval(&[0.0, 0.0]), 0.0);
        let y = [0.6, 0.8];
        assert!((w.eval(&y) - 1.0).abs() < 1e-15);
        let g = w.grad_vec(&y);
        assert!((g[0].hypot(g[1]) - 2.0).abs() < 1e-15);
        let w3 = ball_potential(3).unwrap();
        assert_eq!(w3.eval(&[2.0, 0.0, 0.0]), 1.0);
        assert_eq!(w3.grad_vec(&[2.0, 0.0, 0.0]), vec![0.0; 3]);
        assert_eq!(w3.bound_k(), 2.0);
        assert!(ball_potential(0).is_err());
    }

    #[test]
    fn example41_branches() {
        let w = example41_member(0.5).unwrap();
        assert_eq!(w.derivative_1d(1.5), 0.0);
        assert!((w.derivative_1d(1.0) - 1.5).abs() < 1e-15);
        assert!((w.derivative_1d(1.25) - 0.75).abs() < 1e-15);
        assert!((w.derivative_1d(-1.25) + 0.75).abs() < 1e-15);
        assert_eq!(w.value_1d(0.0), 0.0);
        assert!(example41_member(0.0).is_err());
        assert!(example41_member(2.0).is_err());
    }

    #[test]
    fn example41_knot_continuity() {
        for &eps in &[0.4, 0.2, 0.1, 0.01] {
            let w = example41_member(eps).unwrap();
            let p = w.piecewise_profile().unwrap();
            let outer = 1.0 + eps;
            for (i, &k) in [1.0, outer].iter().enumerate() {
                let left = p.pieces()[i];
                let right = p.pieces()[i + 1];
                assert!((left.slope(k) - right.slope(k)).abs() < 1e-14);
                assert!((left.value(k) - right.value(k)).abs() < 1e-14);
            }
            assert_eq!(w.derivative_1d(outer), 0.0);
            assert_eq!(w.derivative_1d(-outer), 0.0);
        }
    }

    #[test]
    fn capped_quadratic_is_c1() {
        let w = capped_quadratic(2, 0.5, 1.5).unwrap();
        let p = w.piecewise_profile().unwrap();
        for (i, &k) in p.knots().iter().enumerate() {
            assert!((p.pieces()[i].slope(k) - p.pieces()[i + 1].slope(k)).abs() < 1e-14);
            assert!((p.pieces()[i].value(k) - p.pieces()[i + 1].value(k)).abs() < 1e-14);
        }
        assert_eq!(w.eval(&[3.0, 0.0]), 0.75);
        assert_eq!(w.regularity(), Regularity::C1Uniform);
        assert!(capped_quadratic(1, 1.0, 1.0).is_err());
    }

    #[test]
    fn mollified_member_is_bounded_and_smooth_inside() {
        let base = clipped_quadratic(1.0).unwrap();
        let kernel = Arc::new(MollifierKernel::new());
        let w = mollify(&base, 0.1, kernel).unwrap();
        assert_eq!(w.derivative_1d(0.5), 1.0);
        assert!(w.value_1d(0.0) > 0.0 && w.value_1d(0.0) < 0.01);
        assert_eq!(w.value_1d(5.0), 1.0);
        assert_eq!(w.regularity(), Regularity::C1Uniform);
        assert!(w.gradient_lipschitz() >= 2.0);
        assert!(w.gradient_lipschitz().is_finite());
    }
}
