//! Small, fast versions of the standard studies.

use super::*;
use crate::dynamics::{SimConfig, DEFAULT_CFL_SAFETY};
use crate::potentials::{capped_quadratic, clipped_quadratic, example41_family, RegularizedFamily};
use crate::spectral::Domain;
use crate::Error;

fn short_config(u_amp: f64, v_amp: f64, t_final: f64) -> SimConfig {
    let domain = Domain::exterior(1.0, vec![1.0], 2.0, vec![32]).unwrap();
    SimConfig {
        potential: presets::mollified_clipped_family().unwrap().make(0.1).unwrap(),
        t_final,
        dt: 0.02,
        u0: interior_bump(&domain, 1, u_amp),
        v0: interior_bump(&domain, 1, v_amp),
        record_every: 5,
        cfl_safety: DEFAULT_CFL_SAFETY,
        domain,
    }
}

#[test]
fn zero_data_trivially_satisfies_the_energy_inequality() {
    let report = run_energy_inequality(&short_config(0.0, 0.0, 1.0), 1).unwrap();
    assert!(report.passed(), "{}", report.summary());
    assert!(report.notes.iter().any(|n| n.contains("round-off")));
    let drift = report.series("drift").unwrap().column("max_drift").unwrap();
    assert!(drift.iter().all(|&d| d == 0.0));
}

#[test]
fn energy_study_rejects_discontinuous_gradients() {
    let mut c = short_config(0.5, 0.0, 1.0);
    c.potential = clipped_quadratic(1.0).unwrap();
    assert!(matches!(run_energy_inequality(&c, 0), Err(Error::Uncertified(_))));
}

#[test]
fn constant_family_gives_zero_distances() {
    let fam = RegularizedFamily::constant(&capped_quadratic(1, 0.5, 1.5).unwrap()).unwrap();
    let report = run_epsilon_convergence(&fam, &[0.2, 0.1, 0.05], &short_config(0.9, 1.0, 0.5)).unwrap();
    assert!(report.passed(), "{}", report.summary());
    let d = report.series("epsilon_study").unwrap().column("l2_cauchy_dist").unwrap();
    assert!(d[0].is_nan());
    assert!(d[1..].iter().all(|&x| x == 0.0));
}

#[test]
fn epsilon_study_needs_a_valid_list() {
    let fam = presets::mollified_clipped_family().unwrap();
    let c = short_config(0.5, 0.0, 0.2);
    assert!(matches!(run_epsilon_convergence(&fam, &[0.1, 0.2], &c), Err(Error::Uncertified(_))));
    assert!(matches!(run_epsilon_convergence(&fam, &[0.1], &c), Err(Error::InvalidConfig(_))));
}

#[test]
fn epsilon_distances_are_insensitive_to_dt() {
    let fam = presets::mollified_clipped_family().unwrap();
    let eps = [0.2, 0.1];
    let c = short_config(0.9, 1.5, 1.0);
    let mut fine = c.clone();
    fine.dt /= 2.0;
    fine.record_every *= 2;
    let a = run_epsilon_convergence(&fam, &eps, &c).unwrap();
    let b = run_epsilon_convergence(&fam, &eps, &fine).unwrap();
    let da = a.series("epsilon_study").unwrap().column("l2_cauchy_dist").unwrap()[1];
    let db = b.series("epsilon_study").unwrap().column("l2_cauchy_dist").unwrap()[1];
    assert!(da > 1e-4);
    assert!((da - db).abs() <= 1e-3, "{da} vs {db}");
}

#[test]
fn example41_short_horizon() {
    let setup = Example41Setup {
        eps_list: vec![0.5, 0.25],
        t_final: 1.0,
        length: 2.0,
        n: 16,
    };
    let report = run_example41(&setup).unwrap();
    assert!(report.passed(), "{}", report.summary());
    let limit = report.series("limit_residual").unwrap();
    assert!((limit.rows[0][1] - 2.0 * 1.0 * 2.0).abs() < 1e-12);
}

#[test]
fn example41_rejects_eps_out_of_range() {
    let setup = Example41Setup {
        eps_list: vec![2.5],
        ..Default::default()
    };
    assert!(matches!(run_example41(&setup), Err(Error::EpsilonOutOfRange { .. })));
}

#[test]
fn small_data_zero_data_has_full_margin() {
    let fam = presets::mollified_clipped_family().unwrap();
    let setup = SmallDataSetup::standard().unwrap();
    let report = run_small_data(0.0, 0.0, &fam, &setup).unwrap();
    assert!(report.passed(), "{}", report.summary());
    assert_eq!(report.parameters["eta"], 1.0);
}

#[test]
fn small_data_large_amplitude_reports_regime_violation() {
    let fam = presets::mollified_clipped_family().unwrap();
    let mut setup = SmallDataSetup::standard().unwrap();
    setup.t_final = 0.2;
    let report = run_small_data(2.0, 0.0, &fam, &setup).unwrap();
    assert!(!report.passed());
    let first = report.failures().next().unwrap();
    assert!(first.invariant.starts_with("small-data regime"));
    assert!(report.verdict("confinement margin").is_none());
    assert!(!report.notes.is_empty());
}

#[test]
fn small_data_requires_embedding() {
    let fam = example41_family();
    let mut setup = SmallDataSetup::standard().unwrap();
    setup.domain = setup.domain.with_order(0.5).unwrap();
    assert!(matches!(
        run_small_data(0.05, 0.0, &fam, &setup),
        Err(Error::EmbeddingHypothesis { .. })
    ));
}

#[test]
fn dispersion_single_case() {
    let report = run_dispersion_check(&[DispersionCase { k: 1, s: 1.0 }], &DispersionSetup::default()).unwrap();
    assert!(report.passed());
    let row = &report.series("dispersion").unwrap().rows[0];
    assert!((row[4] - 1.0).abs() < 1e-3);
}

#[test]
fn unstable_experiment_config_is_an_error() {
    let mut c = short_config(0.5, 0.0, 0.2);
    c.dt = 1.0;
    assert!(matches!(run_energy_inequality(&c, 0), Err(Error::Unstable { .. })));
}
