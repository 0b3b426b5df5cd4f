//! Subcommand implementations. Everything here returns values and writes
//! files; printing and exit codes are left to the binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use fracwave::dynamics::{simulate_with, Trajectory};
use fracwave::experiments::{
    run_dispersion_check, run_energy_inequality, run_epsilon_convergence, run_example41, run_small_data,
    DispersionCase, DispersionSetup, Example41Setup, ExperimentReport, SmallDataSetup,
};
use fracwave::output::{write_energy_csv, write_trajectory_csv, LinePlot};
use fracwave::potentials::{certify_family, CertificationReport};
use fracwave::spectral::{build_operator, embedding_constant_detailed, EmbeddingConstant};

use crate::config::{describe, expand_sweep, print_config, ExperimentSpec, RunSpec};
use crate::descriptor::FamilyDescriptor;
use crate::error::{CliError, Result, EXIT_PASS};

/// Overrides the output directory of configs (but not `--out`).
pub const OUT_ENV: &str = "FRACWAVE_OUT";
/// Worker count for `sweep`; defaults to rayon's choice.
pub const THREADS_ENV: &str = "FRACWAVE_THREADS";
pub const DEFAULT_OUT: &str = "fracwave-out";

/// `--out` beats `$FRACWAVE_OUT`, which beats `[run] output`.
pub fn output_dir(flag: Option<&Path>, spec: Option<&RunSpec>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUT_ENV).filter(|p| !p.is_empty()) {
        return PathBuf::from(p);
    }
    spec.and_then(|s| s.output.as_deref())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Debug, Clone)]
pub struct SimulationSummary {
    pub dir: PathBuf,
    pub steps: usize,
    pub dt: f64,
    pub initial_energy: f64,
    pub max_energy_drift: f64,
    pub max_abs_u: f64,
}

impl SimulationSummary {
    pub fn render(&self) -> String {
        format!(
            "simulate: {} steps of dt = {:.6e}\n  E(0) = {:.6e}\n  max |E(t) - E(0)| = {:.6e}\n  max |u| = {:.6e}\n  output: {}\n",
            self.steps,
            self.dt,
            self.initial_energy,
            self.max_energy_drift,
            self.max_abs_u,
            self.dir.display()
        )
    }
}

/// Runs the plain simulation of `spec` (ignoring `[experiment]`) and writes
/// `<out>/simulate/{trajectory.csv, energy.csv, energy.svg, max_abs_u.svg, config.toml}`.
pub fn simulate(spec: &RunSpec, out: &Path) -> Result<SimulationSummary> {
    let config = spec.sim_config()?;
    let op = build_operator(&config.domain)?;
    let traj = simulate_with(&op, &config)?;
    let dir = out.join("simulate");
    create_dir(&dir)?;

    let mut buf = Vec::new();
    write_trajectory_csv(&mut buf, &config.domain, &traj).map_err(fracwave::Error::from)?;
    write_file(&dir.join("trajectory.csv"), buf)?;
    let mut buf = Vec::new();
    write_energy_csv(&mut buf, &traj).map_err(fracwave::Error::from)?;
    write_file(&dir.join("energy.csv"), buf)?;
    let (energy, sup) = trajectory_plots(&traj);
    write_file(&dir.join("energy.svg"), energy.render())?;
    write_file(&dir.join("max_abs_u.svg"), sup.render())?;
    write_file(&dir.join("config.toml"), print_config(spec))?;

    Ok(SimulationSummary {
        dir,
        steps: traj.steps,
        dt: traj.dt,
        initial_energy: traj.energies[0].total,
        max_energy_drift: traj.max_energy_drift(),
        max_abs_u: traj.max_abs(),
    })
}

fn trajectory_plots(traj: &Trajectory) -> (LinePlot, LinePlot) {
    let pts = |f: &dyn Fn(usize) -> f64| -> Vec<(f64, f64)> { traj.times.iter().enumerate().map(|(i, &t)| (t, f(i))).collect() };
    let e = |i: usize| traj.energies[i];
    let energy = LinePlot::new("energy", "t", "E")
        .with_series("total", pts(&|i| e(i).total))
        .with_series("kinetic", pts(&|i| e(i).kinetic))
        .with_series("elastic", pts(&|i| e(i).elastic))
        .with_series("adhesive", pts(&|i| e(i).adhesive));
    let sup = LinePlot::new("max |u| over the grid", "t", "max |u|")
        .with_series("max |u|", pts(&|i| traj.states[i].u.max_norm()))
        .with_threshold(1.0);
    (energy, sup)
}

// ---------------------------------------------------------------------------
// experiment

/// Runs the `[experiment]` of `spec`.
pub fn run_experiment(spec: &RunSpec) -> Result<ExperimentReport> {
    let Some(experiment) = &spec.experiment else {
        return Err(CliError::Usage("config has no [experiment] section".into()));
    };
    let report = match experiment {
        ExperimentSpec::Energy { refinements } => run_energy_inequality(&spec.sim_config()?, *refinements)?,
        ExperimentSpec::EpsilonConvergence { family, eps_list } => {
            run_epsilon_convergence(&family.build()?, eps_list, &spec.sim_config()?)?
        }
        ExperimentSpec::Example41 { eps_list } => run_example41(&Example41Setup {
            eps_list: eps_list.clone(),
            t_final: spec.time.t_final,
            length: spec.domain.omega[0],
            n: spec.domain.n[0],
        })?,
        ExperimentSpec::SmallData {
            family,
            eps1,
            eps2,
            member_eps,
        } => {
            let fam = family.build()?;
            let domain = spec.domain()?;
            let m = fam.base().components();
            let shape = |d: &crate::descriptor::DataDescriptor| {
                d.build(&domain, m, spec.seed).map_err(fracwave::Error::InvalidConfig)
            };
            let setup = SmallDataSetup {
                u0_shape: shape(&spec.initial.u0)?,
                v0_shape: shape(&spec.initial.v0)?,
                domain: domain.clone(),
                t_final: spec.time.t_final,
                dt: spec.time.dt,
                record_every: spec.time.record_every,
                member_eps: *member_eps,
            };
            run_small_data(*eps1, *eps2, &fam, &setup)?
        }
        ExperimentSpec::Dispersion {
            cases,
            periods,
            phase_step,
        } => {
            let cases: Vec<DispersionCase> = cases.iter().map(|&(k, s)| DispersionCase { k, s }).collect();
            run_dispersion_check(
                &cases,
                &DispersionSetup {
                    box_length: spec.domain.omega[0],
                    n: spec.domain.n[0],
                    periods: *periods,
                    phase_step: *phase_step,
                },
            )?
        }
    };
    Ok(report)
}

/// Runs the experiment, writes `<out>/<name>/` (report, series, plots and
/// the canonical config) and returns the report with its directory.
pub fn experiment(spec: &RunSpec, out: &Path) -> Result<(ExperimentReport, PathBuf)> {
    let mut report = run_experiment(spec)?;
    let dir = report.write(out)?;
    write_file(&dir.join("config.toml"), print_config(spec))?;
    Ok((report, dir))
}

/// `Ok` when every verdict passed, otherwise the failing invariants.
pub fn check_report(report: &ExperimentReport) -> Result<()> {
    let failed: Vec<String> = report.failures().map(|v| v.invariant.clone()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(failed))
    }
}

// ---------------------------------------------------------------------------
// embed-const

/// Parses `d=…` `s=…` (and optionally `cutoff=…`, `tol=…`).
pub fn embed_const(args: &[String]) -> Result<EmbeddingConstant> {
    let (mut d, mut s) = (None, None);
    let (mut cutoff, mut tol) = (fracwave::dynamics::EMBEDDING_CUTOFF, fracwave::dynamics::EMBEDDING_TOL);
    for arg in args {
        let (key, value) = arg
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected key=value, got '{arg}'")))?;
        let number = |v: &str| -> Result<f64> {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{key}: '{v}' is not a number")))
        };
        match key.trim() {
            "d" => {
                d = Some(value.trim().parse::<usize>().map_err(|_| {
                    CliError::Usage(format!("d: '{value}' is not a positive integer"))
                })?)
            }
            "s" => s = Some(number(value)?),
            "cutoff" => cutoff = number(value)?,
            "tol" => tol = number(value)?,
            other => return Err(CliError::Usage(format!("unknown argument '{other}'; expected d, s, cutoff, tol"))),
        }
    }
    let d = d.ok_or_else(|| CliError::Usage("missing d=…".into()))?;
    let s = s.ok_or_else(|| CliError::Usage("missing s=…".into()))?;
    Ok(embedding_constant_detailed(d, s, cutoff, tol)?)
}

// ---------------------------------------------------------------------------
// certify-potential

pub fn certify(family: &str, eps_list: &[f64], sample: usize, seed: u64) -> Result<CertificationReport> {
    let fam = FamilyDescriptor::parse(family)
        .map_err(|m| CliError::Usage(format!("family: {m}")))?
        .build()?;
    Ok(certify_family(&fam, eps_list, sample, seed)?)
}

pub fn render_certification(report: &CertificationReport) -> String {
    let mut s = format!(
        "{}: {}\n  {:>12} {:>16} {:>16} {:>16}\n",
        report.family,
        if report.passed { "PASS" } else { "FAIL" },
        "eps",
        "sup|W_eps - W|",
        "sup|grad diff|",
        "grad Lipschitz"
    );
    for e in &report.entries {
        let _ = writeln!(
            s,
            "  {:>12.6e} {:>16.6e} {:>16.6e} {:>16.6e}",
            e.eps, e.sup_value_dist, e.sup_grad_dist, e.lipschitz_estimate
        );
    }
    let _ = writeln!(
        s,
        "  value distances decreasing: {}\n  gradient distances decreasing: {}",
        report.value_dist_monotone, report.grad_dist_monotone
    );
    for f in &report.failures {
        let _ = writeln!(s, "  failure: {f}");
    }
    s
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Debug)]
pub struct SweepOutcome {
    pub label: String,
    pub dir: PathBuf,
    pub result: Result<String>,
}

impl SweepOutcome {
    pub fn exit_code(&self) -> i32 {
        match &self.result {
            Ok(_) => EXIT_PASS,
            Err(e) => e.exit_code(),
        }
    }
}

/// Worker count from `$FRACWAVE_THREADS` (0 or unset = rayon default).
pub fn sweep_threads() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a nonnegative integer, got '{v}'"))),
        _ => Ok(0),
    }
}

/// Expands `[sweep]` and runs each point (its experiment, or a plain
/// simulation) in `<out>/point-NNNN/`. Outcomes come back in grid order
/// regardless of completion order; `<out>/sweep.csv` indexes them.
pub fn sweep(spec: &RunSpec, out: &Path, threads: usize) -> Result<Vec<SweepOutcome>> {
    let points = expand_sweep(spec)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let outcomes: Vec<SweepOutcome> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, point)| {
                let dir = out.join(format!("point-{i:04}"));
                let result = run_point(&point.spec, &dir);
                SweepOutcome {
                    label: describe(&point.assignments),
                    dir,
                    result,
                }
            })
            .collect()
    });

    create_dir(out)?;
    let mut csv = String::from("point,assignments,exit_code,status\n");
    for (i, o) in outcomes.iter().enumerate() {
        let status = match &o.result {
            Ok(_) => "pass".to_string(),
            Err(e) => e.to_string(),
        };
        let _ = writeln!(csv, "{i},{},{},{}", csv_field(&o.label), o.exit_code(), csv_field(&status));
    }
    write_file(&out.join("sweep.csv"), csv)?;
    Ok(outcomes)
}

fn run_point(spec: &RunSpec, dir: &Path) -> Result<String> {
    create_dir(dir)?;
    write_file(&dir.join("config.toml"), print_config(spec))?;
    if spec.experiment.is_some() {
        let (report, _) = experiment(spec, dir)?;
        check_report(&report)?;
        Ok(report.summary())
    } else {
        Ok(simulate(spec, dir)?.render())
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\"").replace('\n', " "))
    } else {
        s.to_string()
    }
}
