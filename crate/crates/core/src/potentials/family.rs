//! Regularized families ε ↦ W_ε and their sampled certification.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    clipped_quadratic, example41_member, mollify, CriticalSet, MollifierKernel, Potential,
    Regularity,
};
use crate::error::{Error, Result};

/// Which convergence statement the family is expected to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyMode {
    /// W_ε → W and ∇W_ε → ∇W uniformly on ℝᵐ.
    UniformC1,
    /// W_ε → W uniformly; ∇W_ε → ∇W pointwise off the critical sphere and
    /// uniformly inside the ball; |∇W_ε| bounded uniformly in ε.
    PointwiseOffcritical,
}

#[derive(Debug, Clone)]
enum Construction {
    Constant,
    Example41,
    Mollified {
        ratio: f64,
        kernel: Arc<MollifierKernel>,
    },
}

/// Parametric map ε ↦ W_ε of C² potentials with Lipschitz gradients.
#[derive(Debug, Clone)]
pub struct RegularizedFamily {
    base: Potential,
    construction: Construction,
    mode: FamilyMode,
}

/// W_ε from the explicit piecewise-linear W'_ε, base clipped_quadratic(1).
pub fn example41_family() -> RegularizedFamily {
    RegularizedFamily {
        base: clipped_quadratic(1.0).expect("u_star = 1 is valid"),
        construction: Construction::Example41,
        mode: FamilyMode::PointwiseOffcritical,
    }
}

/// W_ε = W * ρ_{ε·ratio} (radial mollification of the profile).
pub fn mollified_family(base: &Potential, kernel_width_ratio: f64) -> Result<RegularizedFamily> {
    if !(kernel_width_ratio > 0.0) || !kernel_width_ratio.is_finite() {
        return Err(Error::InvalidPotential(format!(
            "kernel width ratio must be positive, got {kernel_width_ratio}"
        )));
    }
    if base.piecewise_profile().is_none() {
        return Err(Error::InvalidPotential(format!(
            "cannot mollify {} (not piecewise quadratic)",
            base.name()
        )));
    }
    let mode = match base.regularity() {
        Regularity::C1Uniform => FamilyMode::UniformC1,
        Regularity::DiscontinuousGradient => FamilyMode::PointwiseOffcritical,
    };
    Ok(RegularizedFamily {
        base: base.clone(),
        construction: Construction::Mollified {
            ratio: kernel_width_ratio,
            kernel: Arc::new(MollifierKernel::new()),
        },
        mode,
    })
}

impl RegularizedFamily {
    /// W_ε = W for every ε; only meaningful for a C¹ base.
    pub fn constant(base: &Potential) -> Result<Self> {
        if base.regularity() != Regularity::C1Uniform {
            return Err(Error::InvalidPotential(format!(
                "constant family needs a C¹ base, {} has a discontinuous gradient",
                base.name()
            )));
        }
        Ok(RegularizedFamily {
            base: base.clone(),
            construction: Construction::Constant,
            mode: FamilyMode::UniformC1,
        })
    }

    pub fn base(&self) -> &Potential {
        &self.base
    }

    pub fn mode(&self) -> FamilyMode {
        self.mode
    }

    pub fn describe(&self) -> String {
        match &self.construction {
            Construction::Constant => format!("constant(base={})", self.base.name()),
            Construction::Example41 => "example41".into(),
            Construction::Mollified { ratio, .. } => {
                format!("mollified(base={}, ratio={ratio})", self.base.name())
            }
        }
    }

    pub fn make(&self, eps: f64) -> Result<Potential> {
        match &self.construction {
            Construction::Constant => {
                if !(eps > 0.0) {
                    return Err(Error::EpsilonOutOfRange {
                        eps,
                        range: "(0, ∞)",
                    });
                }
                Ok(self.base.clone())
            }
            Construction::Example41 => example41_member(eps),
            Construction::Mollified { ratio, kernel } => {
                if !(eps > 0.0) || !eps.is_finite() {
                    return Err(Error::EpsilonOutOfRange {
                        eps,
                        range: "(0, ∞)",
                    });
                }
                mollify(&self.base, eps * ratio, kernel.clone())
            }
        }
    }

    /// Radius of the closed ball on which ∇W_ε must approach ∇W uniformly;
    /// `None` means all of ℝᵐ.
    pub fn uniform_region(&self, eps: f64) -> Option<f64> {
        let CriticalSet::Sphere(radius) = self.base.critical_set() else {
            return None;
        };
        if self.mode == FamilyMode::UniformC1 {
            return None;
        }
        match &self.construction {
            Construction::Example41 => Some(radius),
            Construction::Mollified { ratio, .. } => Some((radius - eps * ratio).max(0.0)),
            Construction::Constant => None,
        }
    }
}

/// Measurements for one ε.
#[derive(Debug, Clone, Serialize)]
pub struct EpsilonCertificate {
    pub eps: f64,
    /// Sampled sup |W_ε − W|.
    pub sup_value_dist: f64,
    /// Sampled sup |∇W_ε − ∇W| over the uniform region.
    pub sup_grad_dist: f64,
    /// Radius of that region (`None` = whole sample).
    pub region_radius: Option<f64>,
    /// max over consecutive sample pairs of |∇W_ε(a) − ∇W_ε(b)| / |a − b|.
    pub lipschitz_estimate: f64,
    /// (|y|, |∇W_ε(y) − ∇W(y)|) at fixed probes off the critical set.
    pub pointwise_probes: Vec<(f64, f64)>,
    pub nonnegative: bool,
    pub within_bound_k: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificationReport {
    pub family: String,
    pub mode: FamilyMode,
    pub entries: Vec<EpsilonCertificate>,
    pub value_dist_monotone: bool,
    pub grad_dist_monotone: bool,
    pub failures: Vec<String>,
    pub passed: bool,
}

/// Relative slack on the monotone-decrease check.
pub const MONOTONE_SLACK: f64 = 0.10;
/// Distances below this count as zero in the monotone check.
pub const DISTANCE_FLOOR: f64 = 1e-12;

/// `true` when each entry is at most (1 + slack) times its predecessor, or
/// below the floor.
pub fn is_monotone_decreasing(values: &[f64], slack: f64) -> bool {
    values
        .windows(2)
        .all(|w| w[1] <= DISTANCE_FLOOR || w[1] <= (1.0 + slack) * w[0])
}

/// Deterministic sample for certification: a radial grid of `count` radii in
/// [0, radius] (plus the exact critical radius) along one random direction,
/// mirrored through the origin, followed by `count` uniform points in the
/// ball. Consecutive entries form the Lipschitz pairs.
pub fn certification_sample(
    m: usize,
    radius: f64,
    extra_radii: &[f64],
    count: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let direction = random_unit(m, &mut rng);
    let mut radii: Vec<f64> = (0..=count)
        .map(|i| radius * i as f64 / count.max(1) as f64)
        .chain(extra_radii.iter().copied())
        .collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let mut points: Vec<Vec<f64>> = radii
        .iter()
        .rev()
        .map(|&r| direction.iter().map(|c| -r * c).collect())
        .collect();
    points.extend(radii.iter().map(|&r| direction.iter().map(|c| r * c).collect()));
    for _ in 0..count {
        let dir = random_unit(m, &mut rng);
        let r = radius * rng.gen::<f64>().powf(1.0 / m as f64);
        points.push(dir.iter().map(|c| r * c).collect());
    }
    points
}

fn random_unit<R: Rng>(m: usize, rng: &mut R) -> Vec<f64> {
    if m == 1 {
        return vec![1.0];
    }
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Samples each member W_ε, ε ∈ `eps_list`, against the base potential and
/// reports the convergence quantities of the family's mode.
pub fn certify_family(
    fam: &RegularizedFamily,
    eps_list: &[f64],
    sample: usize,
    seed: u64,
) -> Result<CertificationReport> {
    let base = fam.base();
    let m = base.components();
    let mut failures = Vec::new();
    if eps_list.is_empty() {
        failures.push("eps_list is empty".to_string());
    }
    if !eps_list.windows(2).all(|w| w[1] < w[0]) {
        failures.push("eps_list is not strictly decreasing".to_string());
    }

    let critical_radius = match base.critical_set() {
        CriticalSet::Sphere(r) => Some(r),
        CriticalSet::Empty => None,
    };
    let outer_knot = base
        .piecewise_profile()
        .and_then(|p| p.knots().last().copied())
        .unwrap_or(1.0);
    let eps_max = eps_list.iter().copied().fold(0.0, f64::max);
    let sample_radius = outer_knot + 2.0 * eps_max.max(0.5) + 1.0;
    let mut extra: Vec<f64> = base
        .piecewise_profile()
        .map(|p| p.knots().to_vec())
        .unwrap_or_default();
    for &eps in eps_list {
        if let Some(r) = fam.uniform_region(eps) {
            extra.push(r);
        }
        extra.push(1.0 + eps);
    }
    let points = certification_sample(m, sample_radius, &extra, sample, seed);
    let probe_radii: Vec<f64> = critical_radius
        .map(|r| [0.5, 0.9, 0.999, 1.0001, 1.1, 2.0].iter().map(|f| f * r).collect())
        .unwrap_or_default();

    let base_values: Vec<f64> = points.iter().map(|y| base.eval(y)).collect();
    let base_grads: Vec<Vec<f64>> = points.iter().map(|y| base.grad_vec(y)).collect();

    let mut entries = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let member = fam.make(eps)?;
        let region = fam.uniform_region(eps);
        let mut sup_value: f64 = 0.0;
        let mut sup_grad: f64 = 0.0;
        let mut nonnegative = true;
        let mut within_k = true;
        let k = member.bound_k() + 1e-12;
        let mut grads = Vec::with_capacity(points.len());
        for (i, y) in points.iter().enumerate() {
            let w = member.eval(y);
            let g = member.grad_vec(y);
            nonnegative &= w >= 0.0;
            within_k &= w <= k && g.iter().map(|c| c * c).sum::<f64>().sqrt() <= k;
            sup_value = sup_value.max((w - base_values[i]).abs());
            let r = y.iter().map(|c| c * c).sum::<f64>().sqrt();
            if region.is_none_or(|rad| r <= rad) {
                sup_grad = sup_grad.max(distance(&g, &base_grads[i]));
            }
            grads.push(g);
        }
        let lipschitz = points
            .windows(2)
            .zip(grads.windows(2))
            .filter_map(|(p, g)| {
                let dy = distance(&p[0], &p[1]);
                (dy > 0.0).then(|| distance(&g[0], &g[1]) / dy)
            })
            .fold(0.0, f64::max);
        let mut unit = vec![0.0; m];
        unit[0] = 1.0;
        let pointwise_probes = probe_radii
            .iter()
            .map(|&r| {
                let y: Vec<f64> = unit.iter().map(|c| c * r).collect();
                (r, distance(&member.grad_vec(&y), &base.grad_vec(&y)))
            })
            .collect();
        if !nonnegative {
            failures.push(format!("eps={eps}: W_eps negative on the sample"));
        }
        if !within_k {
            failures.push(format!("eps={eps}: W_eps exceeds its bound K"));
        }
        entries.push(EpsilonCertificate {
            eps,
            sup_value_dist: sup_value,
            sup_grad_dist: sup_grad,
            region_radius: region,
            lipschitz_estimate: lipschitz,
            pointwise_probes,
            nonnegative,
            within_bound_k: within_k,
        });
    }

    let value_series: Vec<f64> = entries.iter().map(|e| e.sup_value_dist).collect();
    let grad_series: Vec<f64> = entries.iter().map(|e| e.sup_grad_dist).collect();
    let value_dist_monotone = is_monotone_decreasing(&value_series, MONOTONE_SLACK);
    let grad_dist_monotone = is_monotone_decreasing(&grad_series, MONOTONE_SLACK);
    if !value_dist_monotone {
        failures.push(format!("sup|W_eps - W| not decreasing: {value_series:?}"));
    }
    if !grad_dist_monotone {
        failures.push(format!("sup|grad W_eps - grad W| not decreasing: {grad_series:?}"));
    }
    Ok(CertificationReport {
        family: fam.describe(),
        mode: fam.mode(),
        entries,
        value_dist_monotone,
        grad_dist_monotone,
        passed: failures.is_empty(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{ball_potential, capped_quadratic};

    #[test]
    fn example41_gradient_deviation_is_eps() {
        let fam = example41_family();
        let report = certify_family(&fam, &[0.4, 0.2, 0.1], 2000, 3).unwrap();
        assert!(report.passed, "{:?}", report.failures);
        for e in &report.entries {
            assert!((e.sup_grad_dist - e.eps).abs() < 1e-12, "{e:?}");
            assert!((e.sup_value_dist - 0.5 * e.eps).abs() < 1e-12, "{e:?}");
            // slopes 2−ε and (2−ε)/ε; the sample pairs straddle no knot of
            // steeper slope, so the estimate cannot exceed the latter
            assert!(e.lipschitz_estimate <= (2.0 - e.eps) / e.eps + 1e-9);
        }
    }

    #[test]
    fn example41_pointwise_convergence_past_the_sphere() {
        let fam = example41_family();
        for eps in [0.5, 1e-3, 5e-5] {
            let w = fam.make(eps).unwrap();
            let dev = (w.derivative_1d(1.0001) - fam.base().derivative_1d(1.0001)).abs();
            if eps < 1e-4 {
                assert_eq!(dev, 0.0);
            } else {
                assert!(dev > 0.0);
            }
        }
    }

    #[test]
    fn rejects_bad_eps() {
        let fam = example41_family();
        assert!(fam.make(2.5).is_err());
        let moll = mollified_family(&ball_potential(2).unwrap(), 1.0).unwrap();
        assert!(moll.make(0.0).is_err());
        assert!(mollified_family(&ball_potential(2).unwrap(), 0.0).is_err());
    }

    #[test]
    fn mollified_clipped_quadratic_certifies() {
        let fam = mollified_family(&clipped_quadratic(1.0).unwrap(), 1.0).unwrap();
        assert_eq!(fam.mode(), FamilyMode::PointwiseOffcritical);
        let report = certify_family(&fam, &[0.2, 0.1, 0.05, 0.025], 1500, 11).unwrap();
        assert!(report.passed, "{:?}", report.failures);
        let v: Vec<f64> = report.entries.iter().map(|e| e.sup_value_dist).collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]), "{v:?}");
    }

    #[test]
    fn mollified_c1_base_obeys_mollifier_estimate() {
        let base = capped_quadratic(1, 0.5, 1.0).unwrap();
        let fam = mollified_family(&base, 1.0).unwrap();
        assert_eq!(fam.mode(), FamilyMode::UniformC1);
        let report = certify_family(&fam, &[0.2, 0.1, 0.05], 1500, 5).unwrap();
        assert!(report.passed, "{:?}", report.failures);
        for e in &report.entries {
            assert!(e.sup_grad_dist <= base.gradient_lipschitz() * e.eps + 1e-12);
            assert!(e.sup_grad_dist > 0.0);
        }
    }

    #[test]
    fn mollified_ball_gradient_inside_shrunken_ball() {
        let fam = mollified_family(&ball_potential(2).unwrap(), 1.0).unwrap();
        let report = certify_family(&fam, &[0.2, 0.1, 0.05], 800, 9).unwrap();
        assert!(report.passed, "{:?}", report.failures);
        for e in &report.entries {
            assert_eq!(e.region_radius, Some(1.0 - e.eps));
            assert!(e.sup_grad_dist < 1e-12);
        }
    }

    #[test]
    fn decreasing_check_reports_failure() {
        let fam = example41_family();
        let report = certify_family(&fam, &[0.1, 0.2], 200, 1).unwrap();
        assert!(!report.passed);
    }

    #[test]
    fn monotone_helper() {
        assert!(is_monotone_decreasing(&[1.0, 1.05, 0.5], 0.1));
        assert!(!is_monotone_decreasing(&[1.0, 1.2], 0.1));
        assert!(is_monotone_decreasing(&[1e-16, 3e-16], 0.1));
    }
}
