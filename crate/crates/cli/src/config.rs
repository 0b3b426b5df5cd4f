//! TOML run configuration: parsing with line-anchored diagnostics,
//! validation against the library's invariants, and canonical printing.
//!
//! ```toml
//! [domain]
//! mode = "exterior-dirichlet"   # or "neumann-1d", "periodic"
//! d = 1
//! s = 1.0
//! omega = [1.0]                 # extent of Ω (the whole box unless exterior-dirichlet)
//! pad_factor = 2.0              # box = pad_factor · omega (exterior-dirichlet only)
//! n = [64]
//!
//! [potential]
//! name = "clipped_quadratic(u_star=1)"
//!
//! [time]
//! t_final = 1.0
//! dt = 0.01                     # optional, defaults to the stability bound
//! cfl_safety = 0.9
//! record_every = 10
//!
//! [initial]
//! u0 = "bump(amplitude=0.5)"    # zero | constant(value) | bump(amplitude) | sine(k, amplitude) | random(amplitude)
//! v0 = "zero"
//! u0_hs_norm = 0.05             # optional rescaling
//! v0_l2_norm = 0.0
//!
//! [run]
//! seed = 0
//! output = "out"
//!
//! [experiment]                  # optional; see ExperimentSpec
//! name = "example41"
//! eps_list = [0.4, 0.2, 0.1]
//!
//! [sweep]                       # optional Cartesian grid over any scalar key
//! "domain.s" = [0.75, 1.0]
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;
use thiserror::Error;

use fracwave::dynamics::{stability_bound, SimConfig, DEFAULT_CFL_SAFETY, DEFAULT_RECORD_EVERY};
use fracwave::experiments::{normalize_hs, normalize_l2};
use fracwave::potentials::Regularity;
use fracwave::spectral::{build_operator, BoundaryMode, Domain, Field};

use crate::descriptor::{DataDescriptor, FamilyDescriptor, PotentialDescriptor};

pub const DEFAULT_PAD_FACTOR: f64 = 2.0;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{}{key}: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Invalid {
        line: Option<usize>,
        key: String,
        message: String,
    },
}

impl ConfigError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ConfigError::Syntax { line, .. } => Some(*line),
            ConfigError::Invalid { line, .. } => *line,
        }
    }
}

// ---------------------------------------------------------------------------
// Raw (as written) configuration

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    domain: RawDomain,
    potential: Option<RawPotential>,
    time: Option<RawTime>,
    initial: Option<RawInitial>,
    run: Option<RawRun>,
    experiment: Option<RawExperiment>,
    sweep: Option<BTreeMap<String, Vec<toml::Value>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    mode: Option<String>,
    d: Option<usize>,
    s: f64,
    omega: Vec<f64>,
    pad_factor: Option<f64>,
    n: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPotential {
    name: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    t_final: f64,
    dt: Option<f64>,
    cfl_safety: Option<f64>,
    record_every: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    u0: Option<String>,
    v0: Option<String>,
    u0_hs_norm: Option<f64>,
    v0_l2_norm: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    seed: Option<u64>,
    output: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    name: String,
    eps_list: Option<Vec<f64>>,
    family: Option<String>,
    refinements: Option<usize>,
    eps1: Option<f64>,
    eps2: Option<f64>,
    member_eps: Option<f64>,
    cases: Option<Vec<(usize, f64)>>,
    periods: Option<f64>,
    phase_step: Option<f64>,
}

// ---------------------------------------------------------------------------
// Validated specification

#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub mode: BoundaryMode,
    pub s: f64,
    pub omega: Vec<f64>,
    pub pad_factor: f64,
    pub n: Vec<usize>,
}

impl DomainSpec {
    pub fn build(&self) -> fracwave::Result<Domain> {
        Domain::new(self.omega.len(), self.s, self.omega.clone(), self.pad_factor, self.n.clone(), self.mode)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSpec {
    pub t_final: f64,
    pub dt: Option<f64>,
    pub cfl_safety: f64,
    pub record_every: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialSpec {
    pub u0: DataDescriptor,
    pub v0: DataDescriptor,
    pub u0_hs_norm: Option<f64>,
    pub v0_l2_norm: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExperimentKind {
    Energy,
    EpsilonConvergence,
    Example41,
    SmallData,
    Dispersion,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::Energy,
        ExperimentKind::EpsilonConvergence,
        ExperimentKind::Example41,
        ExperimentKind::SmallData,
        ExperimentKind::Dispersion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Energy => "energy",
            ExperimentKind::EpsilonConvergence => "epsilon-convergence",
            ExperimentKind::Example41 => "example41",
            ExperimentKind::SmallData => "small-data",
            ExperimentKind::Dispersion => "dispersion",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentSpec {
    /// Energy inequality at dt, dt/2, …, dt/2^refinements.
    Energy { refinements: usize },
    EpsilonConvergence { family: FamilyDescriptor, eps_list: Vec<f64> },
    /// Uses the neumann-1d domain (L = omega[0], n[0]) and t_final.
    Example41 { eps_list: Vec<f64> },
    SmallData { family: FamilyDescriptor, eps1: f64, eps2: f64, member_eps: f64 },
    /// Periodic box of length omega[0] with n[0] points for each (k, s).
    Dispersion { cases: Vec<(usize, f64)>, periods: f64, phase_step: f64 },
}

impl ExperimentSpec {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            ExperimentSpec::Energy { .. } => ExperimentKind::Energy,
            ExperimentSpec::EpsilonConvergence { .. } => ExperimentKind::EpsilonConvergence,
            ExperimentSpec::Example41 { .. } => ExperimentKind::Example41,
            ExperimentSpec::SmallData { .. } => ExperimentKind::SmallData,
            ExperimentSpec::Dispersion { .. } => ExperimentKind::Dispersion,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub domain: DomainSpec,
    pub potential: PotentialDescriptor,
    pub time: TimeSpec,
    pub initial: InitialSpec,
    pub seed: u64,
    pub output: Option<String>,
    pub experiment: Option<ExperimentSpec>,
    /// Dotted key path → values, in key order.
    pub sweep: BTreeMap<String, Vec<toml::Value>>,
}

// ---------------------------------------------------------------------------
// Parsing

/// 1-based line of `key = …` inside `[section]`, or of the section header
/// when `key` is empty.
fn key_line(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(header) = line.strip_prefix('[').and_then(|l| l.split(']').next()) {
            current = header.trim().to_string();
            if key.is_empty() && current == section {
                return Some(i + 1);
            }
            continue;
        }
        if current == section && !key.is_empty() {
            let name = line.split('=').next().unwrap_or("").trim().trim_matches('"');
            if name == key && line.contains('=') {
                return Some(i + 1);
            }
        }
    }
    None
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn err(&self, path: &str, message: impl Into<String>) -> ConfigError {
        let (section, key) = path.split_once('.').unwrap_or((path, ""));
        let line = key_line(self.text, section, key).or_else(|| key_line(self.text, section, ""));
        ConfigError::Invalid {
            line,
            key: path.to_string(),
            message: message.into(),
        }
    }
}

fn positive(ctx: &Ctx, path: &str, x: f64) -> Result<f64, ConfigError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(ctx.err(path, format!("must be a positive number, got {x}")))
    }
}

fn core_error(ctx: &Ctx, path: &str, e: fracwave::Error) -> ConfigError {
    ctx.err(path, e.to_string())
}

/// Parses and fully validates a configuration.
pub fn parse_config(text: &str) -> Result<RunSpec, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax {
        line: e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
            .unwrap_or(1),
        message: e.message().to_string(),
    })?;
    let ctx = Ctx { text };
    let spec = from_raw(&ctx, raw)?;
    validate(&ctx, &spec)?;
    Ok(spec)
}

fn from_raw(ctx: &Ctx, raw: RawConfig) -> Result<RunSpec, ConfigError> {
    let rd = raw.domain;
    let mode = match rd.mode.as_deref().unwrap_or("exterior-dirichlet") {
        "exterior-dirichlet" => BoundaryMode::ExteriorDirichlet,
        "neumann-1d" => BoundaryMode::Neumann1d,
        "periodic" => BoundaryMode::Periodic,
        other => {
            return Err(ctx.err(
                "domain.mode",
                format!("unknown mode '{other}'; expected exterior-dirichlet, neumann-1d or periodic"),
            ))
        }
    };
    if !(rd.s > 0.0) || !rd.s.is_finite() {
        return Err(ctx.err("domain.s", format!("the fractional order must satisfy s > 0, got {}", rd.s)));
    }
    let d = rd.d.unwrap_or(rd.omega.len());
    if !(1..=3).contains(&d) {
        return Err(ctx.err("domain.d", format!("dimension must be 1, 2 or 3, got {d}")));
    }
    if rd.omega.len() != d {
        return Err(ctx.err("domain.omega", format!("expected {d} extents, got {}", rd.omega.len())));
    }
    if rd.n.len() != d {
        return Err(ctx.err("domain.n", format!("expected {d} resolutions, got {}", rd.n.len())));
    }
    let pad_factor = match (rd.pad_factor, mode) {
        (Some(p), _) => p,
        (None, BoundaryMode::ExteriorDirichlet) => DEFAULT_PAD_FACTOR,
        (None, _) => 1.0,
    };
    let domain = DomainSpec {
        mode,
        s: rd.s,
        omega: rd.omega,
        pad_factor,
        n: rd.n,
    };

    let potential = match raw.potential {
        Some(p) => PotentialDescriptor::parse(&p.name).map_err(|m| ctx.err("potential.name", m))?,
        None => PotentialDescriptor::Zero { m: 1 },
    };

    let rt = raw.time.ok_or_else(|| ctx.err("time", "missing [time] section with t_final"))?;
    let time = TimeSpec {
        t_final: positive(ctx, "time.t_final", rt.t_final)?,
        dt: rt.dt.map(|dt| positive(ctx, "time.dt", dt)).transpose()?,
        cfl_safety: positive(ctx, "time.cfl_safety", rt.cfl_safety.unwrap_or(DEFAULT_CFL_SAFETY))?,
        record_every: match rt.record_every.unwrap_or(DEFAULT_RECORD_EVERY) {
            0 => return Err(ctx.err("time.record_every", "must be at least 1")),
            k => k,
        },
    };

    let ri = raw.initial.unwrap_or(RawInitial {
        u0: None,
        v0: None,
        u0_hs_norm: None,
        v0_l2_norm: None,
    });
    let data = |path: &str, src: Option<String>| -> Result<DataDescriptor, ConfigError> {
        src.map_or(Ok(DataDescriptor::Zero), |s| DataDescriptor::parse(&s).map_err(|m| ctx.err(path, m)))
    };
    let nonneg = |path: &str, x: Option<f64>| -> Result<Option<f64>, ConfigError> {
        match x {
            Some(v) if !(v >= 0.0) || !v.is_finite() => Err(ctx.err(path, format!("must be nonnegative, got {v}"))),
            other => Ok(other),
        }
    };
    let initial = InitialSpec {
        u0: data("initial.u0", ri.u0)?,
        v0: data("initial.v0", ri.v0)?,
        u0_hs_norm: nonneg("initial.u0_hs_norm", ri.u0_hs_norm)?,
        v0_l2_norm: nonneg("initial.v0_l2_norm", ri.v0_l2_norm)?,
    };

    let (seed, output) = raw.run.map_or((0, None), |r| (r.seed.unwrap_or(0), r.output));

    let experiment = raw.experiment.map(|e| experiment_from_raw(ctx, e)).transpose()?;

    let sweep = raw.sweep.unwrap_or_default();
    for (key, values) in &sweep {
        if values.is_empty() {
            return Err(ctx.err(&format!("sweep.{key}"), "needs at least one value"));
        }
        if !key.contains('.') {
            return Err(ctx.err(&format!("sweep.{key}"), "sweep keys are dotted paths such as \"domain.s\""));
        }
    }

    Ok(RunSpec {
        domain,
        potential,
        time,
        initial,
        seed,
        output,
        experiment,
        sweep,
    })
}

fn experiment_from_raw(ctx: &Ctx, e: RawExperiment) -> Result<ExperimentSpec, ConfigError> {
    let kind = ExperimentKind::from_name(&e.name).ok_or_else(|| {
        let names: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
        ctx.err("experiment.name", format!("unknown experiment '{}'; expected one of {}", e.name, names.join(", ")))
    })?;
    // Reject keys that the chosen experiment does not use.
    let given = [
        ("eps_list", e.eps_list.is_some()),
        ("family", e.family.is_some()),
        ("refinements", e.refinements.is_some()),
        ("eps1", e.eps1.is_some()),
        ("eps2", e.eps2.is_some()),
        ("member_eps", e.member_eps.is_some()),
        ("cases", e.cases.is_some()),
        ("periods", e.periods.is_some()),
        ("phase_step", e.phase_step.is_some()),
    ];
    let allowed: &[&str] = match kind {
        ExperimentKind::Energy => &["refinements"],
        ExperimentKind::EpsilonConvergence => &["eps_list", "family"],
        ExperimentKind::Example41 => &["eps_list"],
        ExperimentKind::SmallData => &["family", "eps1", "eps2", "member_eps"],
        ExperimentKind::Dispersion => &["cases", "periods", "phase_step"],
    };
    for (key, present) in given {
        if present && !allowed.contains(&key) {
            return Err(ctx.err(
                &format!("experiment.{key}"),
                format!("unknown key for experiment '{}'; allowed: {}", kind.name(), allowed.join(", ")),
            ));
        }
    }
    let family = |default: &str| -> Result<FamilyDescriptor, ConfigError> {
        FamilyDescriptor::parse(e.family.as_deref().unwrap_or(default)).map_err(|m| ctx.err("experiment.family", m))
    };
    const DEFAULT_FAMILY: &str = "mollified(base=clipped_quadratic(u_star=1), ratio=1)";
    Ok(match kind {
        ExperimentKind::Energy => ExperimentSpec::Energy {
            refinements: e.refinements.unwrap_or(2),
        },
        ExperimentKind::EpsilonConvergence => ExperimentSpec::EpsilonConvergence {
            family: family(DEFAULT_FAMILY)?,
            eps_list: e.eps_list.unwrap_or_else(|| vec![0.2, 0.1, 0.05, 0.025]),
        },
        ExperimentKind::Example41 => ExperimentSpec::Example41 {
            eps_list: e.eps_list.unwrap_or_else(|| vec![0.4, 0.2, 0.1]),
        },
        ExperimentKind::SmallData => ExperimentSpec::SmallData {
            family: family(DEFAULT_FAMILY)?,
            eps1: e.eps1.unwrap_or(0.05),
            eps2: e.eps2.unwrap_or(0.0),
            member_eps: e.member_eps.unwrap_or(0.01),
        },
        ExperimentKind::Dispersion => ExperimentSpec::Dispersion {
            cases: e.cases.unwrap_or_else(|| vec![(1, 1.0), (4, 0.5), (2, 2.0)]),
            periods: e.periods.unwrap_or(4.0),
            phase_step: e.phase_step.unwrap_or(0.05),
        },
    })
}

/// Checks everything that can be checked before running: the domain,
/// potential and data build, dt is stable, and the experiment's
/// preconditions hold.
fn validate(ctx: &Ctx, spec: &RunSpec) -> Result<(), ConfigError> {
    let domain = spec.domain.build().map_err(|e| match e {
        fracwave::Error::NonPositiveOrder(_) => core_error(ctx, "domain.s", e),
        _ => core_error(ctx, "domain", e),
    })?;
    let potential = spec.potential.build().map_err(|e| core_error(ctx, "potential.name", e))?;
    let m = potential.components();
    let op = build_operator(&domain).map_err(|e| core_error(ctx, "domain", e))?;
    for (path, d) in [("initial.u0", &spec.initial.u0), ("initial.v0", &spec.initial.v0)] {
        d.build(&domain, m, spec.seed).map_err(|msg| ctx.err(path, msg))?;
    }
    if spec.initial.u0.is_zero() && spec.initial.u0_hs_norm.is_some_and(|x| x > 0.0) {
        return Err(ctx.err("initial.u0_hs_norm", "cannot rescale zero data to a positive norm"));
    }
    if spec.initial.v0.is_zero() && spec.initial.v0_l2_norm.is_some_and(|x| x > 0.0) {
        return Err(ctx.err("initial.v0_l2_norm", "cannot rescale zero data to a positive norm"));
    }
    if let Some(dt) = spec.time.dt {
        let bound = stability_bound(&op, &potential, spec.time.cfl_safety);
        let checked = match &spec.experiment {
            // these run their own step sizes
            Some(ExperimentSpec::Example41 { .. }) | Some(ExperimentSpec::Dispersion { .. }) => false,
            _ => true,
        };
        if checked && dt > bound {
            return Err(ctx.err("time.dt", format!("dt = {dt} exceeds the stability bound {bound:.6e}")));
        }
    }
    let d = domain.dim();
    let s = domain.order();
    match &spec.experiment {
        None => {}
        Some(ExperimentSpec::Energy { .. }) => {
            if potential.regularity() != Regularity::C1Uniform {
                return Err(ctx.err(
                    "potential.name",
                    format!("energy experiment needs a potential with continuous gradient, {} has a discontinuous one", potential.name()),
                ));
            }
        }
        Some(ExperimentSpec::EpsilonConvergence { family, eps_list }) => {
            let fam = family.build().map_err(|e| core_error(ctx, "experiment.family", e))?;
            check_eps_list(ctx, eps_list)?;
            for &eps in eps_list {
                fam.make(eps).map_err(|e| core_error(ctx, "experiment.eps_list", e))?;
            }
            if fam.base().components() != m {
                return Err(ctx.err("experiment.family", "family and [potential] act on different R^m"));
            }
        }
        Some(ExperimentSpec::Example41 { eps_list }) => {
            if domain.mode() != BoundaryMode::Neumann1d {
                return Err(ctx.err("domain.mode", "example41 experiment requires mode = \"neumann-1d\""));
            }
            if eps_list.is_empty() || eps_list.iter().any(|e| !(*e > 0.0 && *e < 2.0)) {
                return Err(ctx.err("experiment.eps_list", "every eps must lie in (0, 2)"));
            }
        }
        Some(ExperimentSpec::SmallData { family, eps1, eps2, member_eps }) => {
            if 2.0 * s <= d as f64 {
                return Err(ctx.err("domain.s", format!("2s <= d (s = {s}, d = {d}) but experiment requires the embedding into continuous functions")));
            }
            let fam = family.build().map_err(|e| core_error(ctx, "experiment.family", e))?;
            fam.make(*member_eps).map_err(|e| core_error(ctx, "experiment.member_eps", e))?;
            for (path, x) in [("experiment.eps1", eps1), ("experiment.eps2", eps2)] {
                if !(*x >= 0.0) || !x.is_finite() {
                    return Err(ctx.err(path, format!("must be nonnegative, got {x}")));
                }
            }
            if spec.initial.u0.is_zero() && *eps1 > 0.0 {
                return Err(ctx.err("initial.u0", "small-data experiment scales u0 to eps1 and needs nonzero u0"));
            }
            if spec.initial.v0.is_zero() && *eps2 > 0.0 {
                return Err(ctx.err("initial.v0", "small-data experiment scales v0 to eps2 and needs nonzero v0"));
            }
        }
        Some(ExperimentSpec::Dispersion { cases, periods, phase_step }) => {
            if d != 1 {
                return Err(ctx.err("domain.d", "dispersion experiment is one-dimensional"));
            }
            if cases.is_empty() || cases.iter().any(|(k, s)| *k == 0 || !(*s > 0.0) || 2 * k >= spec.domain.n[0]) {
                return Err(ctx.err("experiment.cases", "cases are (k, s) with 1 <= k < n/2 and s > 0"));
            }
            positive(ctx, "experiment.periods", *periods)?;
            positive(ctx, "experiment.phase_step", *phase_step)?;
        }
    }
    Ok(())
}

fn check_eps_list(ctx: &Ctx, eps: &[f64]) -> Result<(), ConfigError> {
    if eps.len() < 2 {
        return Err(ctx.err("experiment.eps_list", "needs at least two values"));
    }
    if !eps.windows(2).all(|w| w[1] < w[0]) || eps.iter().any(|e| !(*e > 0.0)) {
        return Err(ctx.err("experiment.eps_list", "must be positive and strictly decreasing"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Building library objects

impl RunSpec {
    pub fn domain(&self) -> fracwave::Result<Domain> {
        self.domain.build()
    }

    /// SimConfig with data built, rescaled, and dt defaulted to the
    /// stability bound.
    pub fn sim_config(&self) -> fracwave::Result<SimConfig> {
        let domain = self.domain()?;
        let potential = self.potential.build()?;
        let op = build_operator(&domain)?;
        let m = potential.components();
        let build = |d: &DataDescriptor| d.build(&domain, m, self.seed).map_err(fracwave::Error::InvalidConfig);
        let mut u0 = build(&self.initial.u0)?;
        let mut v0: Field = build(&self.initial.v0)?;
        if let Some(target) = self.initial.u0_hs_norm {
            u0 = normalize_hs(&op, &u0, target)?;
        }
        if let Some(target) = self.initial.v0_l2_norm {
            v0 = normalize_l2(&domain, &v0, target)?;
        }
        let dt = self
            .time
            .dt
            .unwrap_or_else(|| stability_bound(&op, &potential, self.time.cfl_safety));
        Ok(SimConfig {
            domain,
            potential,
            t_final: self.time.t_final,
            dt,
            u0,
            v0,
            record_every: self.time.record_every,
            cfl_safety: self.time.cfl_safety,
        })
    }
}

// ---------------------------------------------------------------------------
// Canonical printing

fn float(x: f64) -> String {
    toml::Value::Float(x).to_string()
}

fn floats(xs: &[f64]) -> String {
    format!("[{}]", xs.iter().map(|&x| float(x)).collect::<Vec<_>>().join(", "))
}

fn quoted(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

/// Canonical text: every default explicit, fixed key order.
/// `parse_config(&print_config(&spec)) == Ok(spec)` for any parsed spec.
pub fn print_config(spec: &RunSpec) -> String {
    let mut out = String::new();
    let d = &spec.domain;
    let _ = writeln!(out, "[domain]");
    let _ = writeln!(out, "mode = {}", quoted(d.mode.name()));
    let _ = writeln!(out, "d = {}", d.omega.len());
    let _ = writeln!(out, "s = {}", float(d.s));
    let _ = writeln!(out, "omega = {}", floats(&d.omega));
    let _ = writeln!(out, "pad_factor = {}", float(d.pad_factor));
    let _ = writeln!(out, "n = [{}]", d.n.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", "));
    let _ = writeln!(out, "\n[potential]\nname = {}", quoted(&spec.potential.to_string()));
    let t = &spec.time;
    let _ = writeln!(out, "\n[time]\nt_final = {}", float(t.t_final));
    if let Some(dt) = t.dt {
        let _ = writeln!(out, "dt = {}", float(dt));
    }
    let _ = writeln!(out, "cfl_safety = {}\nrecord_every = {}", float(t.cfl_safety), t.record_every);
    let i = &spec.initial;
    let _ = writeln!(out, "\n[initial]\nu0 = {}\nv0 = {}", quoted(&i.u0.to_string()), quoted(&i.v0.to_string()));
    if let Some(x) = i.u0_hs_norm {
        let _ = writeln!(out, "u0_hs_norm = {}", float(x));
    }
    if let Some(x) = i.v0_l2_norm {
        let _ = writeln!(out, "v0_l2_norm = {}", float(x));
    }
    let _ = writeln!(out, "\n[run]\nseed = {}", spec.seed);
    if let Some(o) = &spec.output {
        let _ = writeln!(out, "output = {}", quoted(o));
    }
    if let Some(e) = &spec.experiment {
        let _ = writeln!(out, "\n[experiment]\nname = {}", quoted(e.kind().name()));
        match e {
            ExperimentSpec::Energy { refinements } => {
                let _ = writeln!(out, "refinements = {refinements}");
            }
            ExperimentSpec::EpsilonConvergence { family, eps_list } => {
                let _ = writeln!(out, "family = {}\neps_list = {}", quoted(&family.to_string()), floats(eps_list));
            }
            ExperimentSpec::Example41 { eps_list } => {
                let _ = writeln!(out, "eps_list = {}", floats(eps_list));
            }
            ExperimentSpec::SmallData { family, eps1, eps2, member_eps } => {
                let _ = writeln!(
                    out,
                    "family = {}\neps1 = {}\neps2 = {}\nmember_eps = {}",
                    quoted(&family.to_string()),
                    float(*eps1),
                    float(*eps2),
                    float(*member_eps)
                );
            }
            ExperimentSpec::Dispersion { cases, periods, phase_step } => {
                let cases: Vec<String> = cases.iter().map(|(k, s)| format!("[{k}, {}]", float(*s))).collect();
                let _ = writeln!(
                    out,
                    "cases = [{}]\nperiods = {}\nphase_step = {}",
                    cases.join(", "),
                    float(*periods),
                    float(*phase_step)
                );
            }
        }
    }
    if !spec.sweep.is_empty() {
        let _ = writeln!(out, "\n[sweep]");
        for (key, values) in &spec.sweep {
            let vals: Vec<String> = values.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{} = [{}]", quoted(key), vals.join(", "));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Sweeps

/// One point of a sweep: the assignments and the resulting spec.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub assignments: Vec<(String, toml::Value)>,
    pub spec: RunSpec,
}

/// Expands the Cartesian product of `[sweep]` (last key varies fastest).
/// Each point is re-validated through the parser.
pub fn expand_sweep(spec: &RunSpec) -> Result<Vec<SweepPoint>, ConfigError> {
    let mut base = spec.clone();
    base.sweep.clear();
    let mut table: toml::Table = toml::from_str(&print_config(&base)).expect("canonical text parses");
    let axes: Vec<(&String, &Vec<toml::Value>)> = spec.sweep.iter().collect();
    let total: usize = axes.iter().map(|(_, v)| v.len()).product();
    let mut points = Vec::with_capacity(total);
    for index in 0..total {
        let mut rem = index;
        let mut assignments = Vec::with_capacity(axes.len());
        for (key, values) in axes.iter().rev() {
            assignments.push(((*key).clone(), values[rem % values.len()].clone()));
            rem /= values.len();
        }
        assignments.reverse();
        for (key, value) in &assignments {
            let (section, field) = key.split_once('.').expect("validated dotted key");
            let entry = table
                .entry(section.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            let Some(tab) = entry.as_table_mut() else {
                return Err(ConfigError::Invalid {
                    line: None,
                    key: format!("sweep.{key}"),
                    message: "not a section".into(),
                });
            };
            tab.insert(field.to_string(), value.clone());
        }
        let text = toml::to_string(&table).expect("table serializes");
        let point = parse_config(&text).map_err(|e| ConfigError::Invalid {
            line: None,
            key: format!("sweep point {index}"),
            message: format!("{e} (with {})", describe(&assignments)),
        })?;
        points.push(SweepPoint {
            assignments,
            spec: point,
        });
    }
    Ok(points)
}

pub fn describe(assignments: &[(String, toml::Value)]) -> String {
    assignments
        .iter()
        .map(|(k, v)| format!("{k} = {v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

// ---------------------------------------------------------------------------
// Defaults for `experiment <name>` without a config file

pub fn default_spec(kind: ExperimentKind) -> RunSpec {
    let text = match kind {
        ExperimentKind::Energy => {
            r#"
[domain]
s = 1.0
omega = [1.0]
n = [64]
[potential]
name = "mollified(base=clipped_quadratic(u_star=1), ratio=1, eps=0.1)"
[time]
t_final = 5.0
dt = 0.016
[initial]
u0 = "bump(amplitude=0.5)"
[experiment]
name = "energy"
refinements = 2
"#
        }
        ExperimentKind::EpsilonConvergence => {
            r#"
[domain]
s = 1.0
omega = [1.0]
n = [64]
[potential]
name = "mollified(base=clipped_quadratic(u_star=1), ratio=1, eps=0.2)"
[time]
t_final = 2.0
dt = 0.01
[initial]
u0 = "bump(amplitude=0.9)"
v0 = "bump(amplitude=1.5)"
[experiment]
name = "epsilon-convergence"
"#
        }
        ExperimentKind::Example41 => {
            r#"
[domain]
mode = "neumann-1d"
s = 1.0
omega = [1.0]
n = [32]
[potential]
name = "example41(eps=0.1)"
[time]
t_final = 10.0
[experiment]
name = "example41"
"#
        }
        ExperimentKind::SmallData => {
            r#"
[domain]
s = 1.0
omega = [1.0]
n = [64]
[potential]
name = "clipped_quadratic(u_star=1)"
[time]
t_final = 1.0
[initial]
u0 = "sine(k=1, amplitude=1)"
v0 = "sine(k=1, amplitude=1)"
[experiment]
name = "small-data"
"#
        }
        ExperimentKind::Dispersion => {
            r#"
[domain]
mode = "periodic"
s = 1.0
omega = [6.283185307179586]
n = [32]
[time]
t_final = 1.0
[experiment]
name = "dispersion"
"#
        }
    };
    parse_config(text).expect("built-in defaults are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[domain]
d = 1
s = 1
omega = [1]
n = [32]

[potential]
name = "clipped_quadratic(u_star=1)"

[time]
t_final = 1
"#;

    fn invalid_line(text: &str) -> (Option<usize>, String) {
        match parse_config(text) {
            Err(e) => (e.line(), e.to_string()),
            Ok(spec) => panic!("expected an error, parsed {spec:?}"),
        }
    }

    #[test]
    fn minimal_config_gets_documented_defaults() {
        let spec = parse_config(MINIMAL).unwrap();
        assert_eq!(spec.domain.mode, BoundaryMode::ExteriorDirichlet);
        assert_eq!(spec.domain.pad_factor, 2.0);
        assert_eq!(spec.time.cfl_safety, 0.9);
        assert_eq!(spec.time.record_every, 10);
        assert_eq!(spec.time.dt, None);
        assert_eq!(spec.initial.u0, DataDescriptor::Zero);
        assert_eq!(spec.initial.v0, DataDescriptor::Zero);
        assert_eq!(spec.seed, 0);
        assert!(spec.experiment.is_none());
        let config = spec.sim_config().unwrap();
        let op = build_operator(&config.domain).unwrap();
        assert_eq!(config.dt, stability_bound(&op, &config.potential, 0.9));
        config.validate(&op).unwrap();
    }

    #[test]
    fn negative_order_is_rejected_at_its_line() {
        let (line, msg) = invalid_line(&MINIMAL.replace("s = 1\n", "s = -1\n"));
        assert_eq!(line, Some(4));
        assert!(msg.contains("s > 0"), "{msg}");
    }

    #[test]
    fn unknown_keys_are_rejected_with_line() {
        let (line, msg) = invalid_line(&MINIMAL.replace("t_final = 1", "t_final = 1\nwarp = 9"));
        assert_eq!(line, Some(13));
        assert!(msg.contains("unknown field `warp`"), "{msg}");
        let (line, msg) = invalid_line(&format!("{MINIMAL}\n[extra]\nx = 1\n"));
        assert_eq!(line, Some(14));
        assert!(msg.contains("unknown field `extra`"), "{msg}");
    }

    #[test]
    fn type_errors_are_rejected_with_line() {
        let (line, msg) = invalid_line(&MINIMAL.replace("n = [32]", "n = [\"many\"]"));
        assert_eq!(line, Some(6));
        assert!(msg.contains("invalid type"), "{msg}");
    }

    #[test]
    fn keys_of_other_experiments_are_rejected() {
        let text = format!("{MINIMAL}\n[experiment]\nname = \"energy\"\neps_list = [0.1, 0.05]\n");
        let (line, msg) = invalid_line(&text.replace("clipped_quadratic(u_star=1)", "mollified(base=clipped_quadratic(u_star=1), ratio=1, eps=0.1)"));
        assert_eq!(line, Some(16));
        assert!(msg.contains("experiment.eps_list"), "{msg}");
    }

    #[test]
    fn embedding_requirement_is_checked_for_small_data() {
        let text = r#"
[domain]
d = 2
s = 0.75
omega = [1.0, 1.0]
n = [16, 16]
[time]
t_final = 1.0
[initial]
u0 = "bump(amplitude=0.1)"
[experiment]
name = "small-data"
"#;
        let (line, msg) = invalid_line(text);
        assert_eq!(line, Some(4));
        assert!(msg.contains("2s <= d") && msg.contains("embedding"), "{msg}");
        // the same domain is fine for a plain simulation
        parse_config(&text.replace("[experiment]\nname = \"small-data\"\n", "")).unwrap();
    }

    #[test]
    fn unstable_dt_is_rejected() {
        let (line, msg) = invalid_line(&MINIMAL.replace("t_final = 1", "t_final = 1\ndt = 0.5"));
        assert_eq!(line, Some(13));
        assert!(msg.contains("stability bound"), "{msg}");
    }

    #[test]
    fn energy_experiment_requires_continuous_gradient() {
        let text = format!("{MINIMAL}\n[experiment]\nname = \"energy\"\n");
        let (line, msg) = invalid_line(&text);
        assert_eq!(line, Some(9));
        assert!(msg.contains("discontinuous"), "{msg}");
    }

    #[test]
    fn exterior_data_must_vanish_outside() {
        let text = format!("{MINIMAL}\n[initial]\nu0 = \"constant(value=0.5)\"\n");
        let (line, msg) = invalid_line(&text);
        assert_eq!(line, Some(15));
        assert!(msg.contains("initial.u0"), "{msg}");
    }

    #[test]
    fn syntax_errors_report_their_line() {
        let (line, _) = invalid_line("[domain]\ns = 1\nomega = = [1.0]\n");
        assert_eq!(line, Some(3));
    }

    #[test]
    fn print_then_parse_is_identity_for_defaults() {
        for kind in ExperimentKind::ALL {
            let spec = default_spec(kind);
            let text = print_config(&spec);
            let again = parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}\n{text}", kind.name()));
            assert_eq!(again, spec, "{}", kind.name());
            assert_eq!(print_config(&again), text);
        }
    }

    #[test]
    fn printing_normalizes_in_one_pass() {
        let text = r#"
[domain]
s = 0.75
omega = [1]
n = [48]
[potential]
name = "mollified( base = ball(m=2), ratio=0.5, eps = 1e-1 )"
[time]
t_final = 2
record_every = 3
[initial]
u0 = "random(amplitude=0.3)"
v0 = "bump( amplitude = 1e-2 )"
u0_hs_norm = 0.5
[run]
seed = 42
output = "runs/a"
[sweep]
"time.t_final" = [1, 2.5]
"#;
        let once = print_config(&parse_config(text).unwrap());
        let twice = print_config(&parse_config(&once).unwrap());
        assert_eq!(once, twice);
        assert!(once.contains("\"time.t_final\" = [1, 2.5]"), "{once}");
    }

    #[test]
    fn example41_defaults_match_the_experiment_setup() {
        let spec = default_spec(ExperimentKind::Example41);
        assert_eq!(spec.domain.mode, BoundaryMode::Neumann1d);
        assert_eq!(spec.potential, PotentialDescriptor::Example41 { eps: 0.1 });
        let setup = fracwave::experiments::Example41Setup::default();
        assert_eq!(spec.time.t_final, setup.t_final);
        assert_eq!(spec.domain.omega, vec![setup.length]);
        assert_eq!(spec.domain.n, vec![setup.n]);
        assert_eq!(spec.experiment, Some(ExperimentSpec::Example41 { eps_list: setup.eps_list }));
    }

    #[test]
    fn sweep_expands_the_cartesian_product_in_order() {
        let text = format!("{MINIMAL}\n[sweep]\n\"domain.s\" = [0.75, 1.0, 1.5]\n\"time.t_final\" = [0.5, 2.0]\n");
        let spec = parse_config(&text).unwrap();
        let points = expand_sweep(&spec).unwrap();
        assert_eq!(points.len(), 6);
        let got: Vec<(f64, f64)> = points.iter().map(|p| (p.spec.domain.s, p.spec.time.t_final)).collect();
        assert_eq!(got, vec![(0.75, 0.5), (0.75, 2.0), (1.0, 0.5), (1.0, 2.0), (1.5, 0.5), (1.5, 2.0)]);
        assert!(points.iter().all(|p| p.spec.sweep.is_empty()));
    }

    #[test]
    fn invalid_sweep_points_are_reported() {
        let text = format!("{MINIMAL}\n[sweep]\n\"domain.s\" = [1.0, -2.0]\n");
        let spec = parse_config(&text).unwrap();
        let err = expand_sweep(&spec).unwrap_err().to_string();
        assert!(err.contains("sweep point 1") && err.contains("s > 0"), "{err}");
    }

    #[test]
    fn equal_specs_give_equal_initial_data() {
        let text = format!("{MINIMAL}\n[initial]\nu0 = \"random(amplitude=0.5)\"\n[run]\nseed = 9\n");
        let a = parse_config(&text).unwrap().sim_config().unwrap();
        let b = parse_config(&text).unwrap().sim_config().unwrap();
        assert_eq!(a.u0, b.u0);
        let c = parse_config(&text.replace("seed = 9", "seed = 10")).unwrap().sim_config().unwrap();
        assert_ne!(a.u0, c.u0);
    }
}
