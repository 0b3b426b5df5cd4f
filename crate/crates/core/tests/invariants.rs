//! Property tests for the operator, masking and potentials.

use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;

use fracwave::potentials::{
    ball_potential, capped_quadratic, clipped_quadratic, example41_member, mollify, MollifierKernel,
    Potential,
};
use fracwave::spectral::{
    apply_fractional_laplacian, bilinear_s, build_operator, inner, mask_exterior, seminorm_s,
    Domain, Field, SpectralOperator,
};

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn max_rel(a: &Field, b: &Field) -> f64 {
    let scale = b.max_norm().max(a.max_norm()).max(1e-300);
    a.difference(b).unwrap().max_norm() / scale
}

/// Sum of a few Fourier modes strictly below the Nyquist frequency.
fn band_limited(dom: &Domain, coeffs: &[(f64, f64)]) -> Field {
    let length = dom.box_extent()[0];
    Field::from_fn(dom, 1, |x, o| {
        o[0] = coeffs
            .iter()
            .enumerate()
            .map(|(k, (a, b))| {
                let w = 2.0 * PI * (k + 1) as f64 / length;
                a * (w * x[0]).cos() + b * (w * x[0]).sin()
            })
            .sum();
    })
}

fn domain_strategy() -> impl Strategy<Value = Domain> {
    let s = prop_oneof![Just(0.5), Just(0.75), Just(1.0), Just(1.5)];
    (s, prop_oneof![Just(16usize), Just(32)], 0usize..3).prop_map(|(s, n, kind)| match kind {
        0 => Domain::periodic(s, vec![3.0], vec![n]).unwrap(),
        1 => Domain::exterior(s, vec![1.0], 2.0, vec![n]).unwrap(),
        _ => Domain::periodic(s, vec![2.0, 1.5], vec![n / 2, 8]).unwrap(),
    })
}

fn random_field(dom: &Domain, values: &[f64]) -> Field {
    let n = dom.num_points();
    Field::from_values(dom, 1, values.iter().cycle().take(n).copied().collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operator_is_self_adjoint(dom in domain_strategy(), a in prop::collection::vec(-1.0f64..1.0, 37), b in prop::collection::vec(-1.0f64..1.0, 41)) {
        let op = build_operator(&dom).unwrap();
        let f = random_field(&dom, &a);
        let g = random_field(&dom, &b);
        let fg = bilinear_s(&op, &f, &g).unwrap();
        let gf = bilinear_s(&op, &g, &f).unwrap();
        let scale = bilinear_s(&op, &f, &f).unwrap().sqrt() * bilinear_s(&op, &g, &g).unwrap().sqrt();
        prop_assert!((fg - gf).abs() <= 1e-11 * scale.max(1e-300));
    }

    #[test]
    fn seminorm_matches_quadratic_form(dom in domain_strategy(), a in prop::collection::vec(-1.0f64..1.0, 29)) {
        let op = build_operator(&dom).unwrap();
        let f = random_field(&dom, &a);
        let semi = seminorm_s(&op, &f).unwrap();
        let form = inner(&dom, &apply_fractional_laplacian(&op, &f).unwrap(), &f).unwrap();
        prop_assert!(rel_err(semi * semi, form) <= 1e-11);
    }

    #[test]
    fn semigroup_composition(s1 in 0.1f64..1.0, s2 in 0.1f64..1.0, coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6)) {
        let dom = Domain::periodic(1.0, vec![2.5], vec![32]).unwrap();
        let f = band_limited(&dom, &coeffs);
        let a1 = SpectralOperator::new(&dom, s1).unwrap();
        let a2 = SpectralOperator::new(&dom, s2).unwrap();
        let a12 = SpectralOperator::new(&dom, s1 + s2).unwrap();
        let composed = apply_fractional_laplacian(&a2, &apply_fractional_laplacian(&a1, &f).unwrap()).unwrap();
        let direct = apply_fractional_laplacian(&a12, &f).unwrap();
        prop_assert!(max_rel(&composed, &direct) <= 1e-11);
    }

    #[test]
    fn masking_is_idempotent(a in prop::collection::vec(-5.0f64..5.0, 50), n in prop_oneof![Just(16usize), Just(32)]) {
        let dom = Domain::exterior(0.75, vec![1.0], 2.5, vec![n]).unwrap();
        let f = random_field(&dom, &a);
        let once = mask_exterior(&dom, &f).unwrap();
        let twice = mask_exterior(&dom, &once).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(once.exterior_max(&dom), 0.0);
        for p in 0..dom.num_points() {
            if dom.is_interior(p) {
                prop_assert_eq!(once.values()[p], f.values()[p]);
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences(which in 0usize..4, y0 in -2.5f64..2.5, y1 in -2.5f64..2.5) {
        let kernel = Arc::new(MollifierKernel::new());
        let w: Potential = match which {
            0 => capped_quadratic(2, 0.5, 1.5).unwrap(),
            1 => mollify(&ball_potential(2).unwrap(), 0.2, kernel).unwrap(),
            2 => mollify(&clipped_quadratic(1.0).unwrap(), 0.1, kernel).unwrap(),
            _ => example41_member(0.3).unwrap(),
        };
        let y: Vec<f64> = if w.components() == 2 { vec![y0, y1] } else { vec![y0] };
        // stay clear of the kinks of the non-mollified profiles
        let r = y.iter().map(|c| c * c).sum::<f64>().sqrt();
        prop_assume!([0.0, 0.5, 1.0, 1.3, 1.5].iter().all(|k| (r - k).abs() > 1e-3));
        let g = w.grad_vec(&y);
        let h = 1e-6;
        for i in 0..y.len() {
            let mut p = y.clone();
            let mut m = y.clone();
            p[i] += h;
            m[i] -= h;
            let fd = (w.eval(&p) - w.eval(&m)) / (2.0 * h);
            prop_assert!((fd - g[i]).abs() <= 1e-6 * (1.0 + g[i].abs()), "{} vs {}", fd, g[i]);
        }
    }
}

#[test]
fn potentials_are_nonnegative_and_bounded_on_a_large_sample() {
    use rand::{Rng, SeedableRng};
    let kernel = Arc::new(MollifierKernel::new());
    let potentials = vec![
        clipped_quadratic(1.0).unwrap(),
        clipped_quadratic(3.0).unwrap(),
        ball_potential(3).unwrap(),
        capped_quadratic(2, 0.5, 1.5).unwrap(),
        example41_member(0.1).unwrap(),
        mollify(&clipped_quadratic(1.0).unwrap(), 0.05, kernel.clone()).unwrap(),
        mollify(&ball_potential(2).unwrap(), 0.1, kernel).unwrap(),
    ];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    for w in &potentials {
        let m = w.components();
        let k = w.bound_k() + 1e-12;
        for _ in 0..100_000 {
            let y: Vec<f64> = (0..m).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let v = w.eval(&y);
            assert!(v >= 0.0, "{} negative at {y:?}", w.name());
            assert!(v <= k, "{} exceeds K at {y:?}", w.name());
            let g = w.grad_vec(&y).iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!(g <= k, "{} gradient exceeds K at {y:?}", w.name());
        }
    }
}
