//! The `verify`, `spectrum` and `dynamics` commands.

use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::calogero::checks::{
    check_ba, check_cm_structure, check_lax_spectrum, check_tau_master, check_zero_dynamics, TRAJECTORY_TOLERANCE,
    VELOCITY_TOLERANCE,
};
use crate::calogero::dynamics::{conservation_csv, zero_dynamics, Trajectory};
use crate::calogero::CMPhase;
use crate::cli::config::RunConfig;
use crate::error::Error;
use crate::kp_verifier::{run_suite, CheckResult, Recorder, Sampler, SuiteOptions, KP_CHECKS};
use crate::scalar::{Rational, Ring};
use crate::spectrum::{direct_eigenstates, spectrum_table, uniform_eigenstate, Eigenstate, SpectrumTable};
use crate::tensor::SectorLabel;

/// Checks on the classical side, run after the identity suite.
pub const CALOGERO_CHECKS: &[&str] = &["ba_functions", "cm_structure", "lax_spectrum", "spectrum", "tau_master", "zero_dynamics"];

/// How a command ended.
#[derive(Clone, Debug, PartialEq)]
pub enum Failure {
    /// Bad configuration or arguments: exit status 2.
    Config(String),
    /// Collision or non-convergence: exit status 3.
    Abort(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Abort(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Abort(m) => write!(f, "aborted: {m}"),
        }
    }
}

fn abort(e: Error) -> Failure {
    match e {
        Error::InvalidSector(_) | Error::IndexOutOfRange(_) | Error::Config(_) | Error::CoincidentPositions(_) => {
            Failure::Config(e.to_string())
        }
        _ => Failure::Abort(e.to_string()),
    }
}

/// Result of a command: the files (or stdout payload) it produced and
/// whether every check passed.
#[derive(Clone, Debug)]
pub struct Output {
    pub files: Vec<(String, String)>,
    pub passed: bool,
    pub lines: Vec<String>,
    /// Diagnostic of a runtime abort after which partial output was kept.
    pub aborted: Option<String>,
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    command: &'static str,
    seed: u64,
    config: &'a RunConfig,
    passed: bool,
    total: usize,
    failed: usize,
    results: Vec<CheckResult>,
}

fn name_seed(seed: u64, name: &str) -> u64 {
    seed ^ name.bytes().fold(0x84222325cbf29ce4u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

/// Check names selected by the configuration, validated. Without a
/// selection every check runs except `zero_dynamics`, whose window may
/// contain a genuine collision of zeros; it runs when named.
pub fn selected_checks(cfg: &RunConfig) -> Result<Vec<String>, Failure> {
    if cfg.checks.is_empty() {
        let mut all: Vec<String> = KP_CHECKS
            .iter()
            .chain(CALOGERO_CHECKS)
            .filter(|s| **s != "zero_dynamics")
            .map(|s| s.to_string())
            .collect();
        all.sort();
        return Ok(all);
    }
    let mut out = Vec::new();
    for c in &cfg.checks {
        let c = c.trim();
        if !KP_CHECKS.contains(&c) && !CALOGERO_CHECKS.contains(&c) {
            return Err(Failure::Config(format!("unknown check {c:?}")));
        }
        if !out.iter().any(|o| o == c) {
            out.push(c.to_string());
        }
    }
    out.sort();
    Ok(out)
}

struct States {
    sectors: Vec<SectorLabel>,
    direct: Vec<Result<Vec<Eigenstate<f64>>, String>>,
    uniform: Vec<Eigenstate<Rational>>,
}

fn states(cfg: &RunConfig) -> Result<States, Failure> {
    let sectors = cfg.model.sectors();
    let direct = sectors
        .par_iter()
        .map(|s| direct_eigenstates(&cfg.model, s, name_seed(cfg.seed, "states")).map(|d| d.states).map_err(|e| e.to_string()))
        .collect();
    let uniform = (0..cfg.rank).map(|a| uniform_eigenstate(&cfg.model, a)).collect::<crate::Result<_>>().map_err(abort)?;
    Ok(States { sectors, direct, uniform })
}

fn to_float(s: &Eigenstate<Rational>) -> Eigenstate<f64> {
    Eigenstate {
        sector: s.sector.clone(),
        h: s.h.iter().map(crate::scalar::rational_to_f64).collect(),
        vector: s.vector.iter().map(crate::scalar::rational_to_f64).collect(),
        residual: s.residual,
    }
}

fn per_state<F, G>(cfg: &RunConfig, st: &States, name: &str, float_check: F, exact_check: G) -> Vec<CheckResult>
where
    F: Fn(&Eigenstate<f64>) -> CheckResult + Sync,
    G: Fn(&Eigenstate<Rational>) -> CheckResult + Sync,
{
    let mut out = Vec::new();
    for (sector, d) in st.sectors.iter().zip(&st.direct) {
        match d {
            Ok(states) => out.extend(states.par_iter().map(&float_check).collect::<Vec<_>>()),
            Err(e) => out.push(CheckResult::failed(name, format!("sector {:?}: {e}", sector.counts()))),
        }
    }
    for u in &st.uniform {
        out.push(if cfg.float { float_check(&to_float(u)) } else { exact_check(u) });
    }
    out
}

fn cm_structure<R: Ring>(cfg: &RunConfig) -> Vec<CheckResult> {
    let mut s = Sampler::new(name_seed(cfg.seed, "cm_structure"));
    let mut out = Vec::new();
    for n in 1..=cfg.sites.max(1) {
        for _ in 0..cfg.samples {
            let x = s.distinct(n, 12, 5, &[]);
            let p = s.times(n);
            let r = match CMPhase::new(x.iter().map(R::from_rational).collect(), p.iter().map(R::from_rational).collect()) {
                Ok(ph) => check_cm_structure(&ph, 5),
                Err(e) => CheckResult::failed("cm_structure", e.to_string()),
            };
            out.push(r);
        }
    }
    out
}

fn spectrum_check(cfg: &RunConfig, sector: &SectorLabel) -> CheckResult {
    let mut rec = Recorder::new::<f64>("spectrum");
    rec.param("sector", format!("{:?}", sector.counts()));
    match spectrum_table(&cfg.model, sector, name_seed(cfg.seed, "spectrum"), cfg.spectrum_tolerance) {
        Ok(t) => {
            rec.measured("direct vs classical", t.matching.max_deviation, cfg.spectrum_tolerance);
            rec.condition("one-to-one", t.matching.passed);
            rec.condition("solution count", t.classical.len() == t.dimension);
            rec.measured("moments", t.moment_residual, cfg.moment_tolerance);
            rec.finish()
        }
        Err(e) => CheckResult::failed("spectrum", e.to_string()),
    }
}

/// `(x, z)` pairs for the BA functions and `(x, times)` pairs for the tau-function.
type Points = (Vec<(Rational, Rational)>, Vec<(Rational, Vec<Rational>)>);

fn sample_points(cfg: &RunConfig, name: &str) -> Points {
    let mut s = Sampler::new(name_seed(cfg.seed, name));
    let mut avoid: Vec<Rational> = cfg.model.positions().to_vec();
    avoid.extend(cfg.model.twist().iter().cloned());
    avoid.push(crate::scalar::qi(0));
    let points = (0..cfg.points).map(|_| (s.rational(12, 5, &avoid), s.rational(12, 5, &avoid))).collect();
    let times = (0..cfg.samples).map(|_| (s.rational(12, 5, cfg.model.positions()), s.times(cfg.times))).collect();
    (points, times)
}

/// Runs the selected identity and correspondence checks.
pub fn verify(cfg: &RunConfig) -> Result<Output, Failure> {
    let names = selected_checks(cfg)?;
    let kp: Vec<&str> = names.iter().map(String::as_str).filter(|n| KP_CHECKS.contains(n)).collect();
    let opts = SuiteOptions { seed: cfg.seed, float: cfg.float, samples: cfg.samples, times: cfg.times, degree: cfg.degree };
    let mut results = run_suite(&cfg.model, &kp, &opts);
    let needs_states = names.iter().any(|n| matches!(n.as_str(), "ba_functions" | "lax_spectrum" | "tau_master" | "zero_dynamics"));
    let st = if needs_states { Some(states(cfg)?) } else { None };
    for name in names.iter().filter(|n| CALOGERO_CHECKS.contains(&n.as_str())) {
        let st = st.as_ref();
        let group = match name.as_str() {
            "cm_structure" => {
                if cfg.float {
                    cm_structure::<f64>(cfg)
                } else {
                    cm_structure::<Rational>(cfg)
                }
            }
            "spectrum" => cfg.model.sectors().par_iter().map(|s| spectrum_check(cfg, s)).collect(),
            "lax_spectrum" => per_state(
                cfg,
                st.expect("states"),
                name,
                |s| match s.lax_pair(&cfg.model) {
                    Ok((_, y)) => check_lax_spectrum(&y, cfg.model.twist(), &s.sector),
                    Err(e) => CheckResult::failed("lax_spectrum", e.to_string()),
                },
                |s| match s.lax_pair(&cfg.model) {
                    Ok((_, y)) => check_lax_spectrum(&y, cfg.model.twist(), &s.sector),
                    Err(e) => CheckResult::failed("lax_spectrum", e.to_string()),
                },
            ),
            "tau_master" => {
                let (_, samples) = sample_points(cfg, name);
                per_state(cfg, st.expect("states"), name, |s| check_tau_master(&cfg.model, s, &samples), |s| {
                    check_tau_master(&cfg.model, s, &samples)
                })
            }
            "ba_functions" => {
                let (points, _) = sample_points(cfg, name);
                per_state(cfg, st.expect("states"), name, |s| check_ba(&cfg.model, s, &points, 2), |s| {
                    check_ba(&cfg.model, s, &points, 2)
                })
            }
            "zero_dynamics" => {
                let steps = if cfg.window_value == 0.0 { 0 } else { cfg.steps };
                per_state(cfg, st.expect("states"), name, |s| check_zero_dynamics(&cfg.model, s, cfg.window_value, steps), |s| {
                    check_zero_dynamics(&cfg.model, &to_float(s), cfg.window_value, steps)
                })
            }
            _ => unreachable!("validated check name"),
        };
        results.extend(group);
    }
    for r in results.iter_mut() {
        r.elapsed_ms = None;
        r.regrade(cfg.tolerance);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    let lines = results.iter().map(CheckResult::summary_line).collect();
    let report = VerifyReport {
        command: "verify",
        seed: cfg.seed,
        config: cfg,
        passed: failed == 0,
        total: results.len(),
        failed,
        results,
    };
    Ok(Output { files: vec![("verify.json".into(), json(&report))], passed: failed == 0, lines, aborted: None })
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct SpectrumReport<'a> {
    command: &'static str,
    seed: u64,
    config: &'a RunConfig,
    passed: bool,
    tables: Vec<SpectrumTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hamiltonians: Option<serde_json::Value>,
}

fn chosen_sectors(cfg: &RunConfig) -> Result<Vec<SectorLabel>, Failure> {
    match &cfg.sector {
        Some(s) => Ok(vec![cfg.sector_label(s).map_err(Failure::Config)?]),
        None => Ok(cfg.model.sectors()),
    }
}

/// Direct and classical spectra of the selected sector (all sectors when
/// none is given), matched.
pub fn spectrum(cfg: &RunConfig) -> Result<Output, Failure> {
    let sectors = chosen_sectors(cfg)?;
    let tables = sectors
        .par_iter()
        .map(|s| spectrum_table(&cfg.model, s, name_seed(cfg.seed, "spectrum"), cfg.spectrum_tolerance))
        .collect::<crate::Result<Vec<_>>>()
        .map_err(abort)?;
    let passed = tables.iter().all(|t| t.passed(cfg.moment_tolerance));
    let lines = tables
        .iter()
        .map(|t| {
            format!(
                "[{}] sector {:?}: {} direct, {} classical, max deviation {:e}",
                if t.passed(cfg.moment_tolerance) { "PASS" } else { "FAIL" },
                t.sector,
                t.direct.len(),
                t.classical.len(),
                t.matching.max_deviation
            )
        })
        .collect();
    let hamiltonians = if cfg.operators {
        let ops = cfg.model.hamiltonians().map_err(abort)?;
        Some(match ops.iter().map(|h| h.to_json()).collect::<crate::Result<Vec<_>>>() {
            Ok(v) => serde_json::Value::Array(v),
            Err(e) => serde_json::Value::String(e.to_string()),
        })
    } else {
        None
    };
    let report = SpectrumReport { command: "spectrum", seed: cfg.seed, config: cfg, passed, tables, hamiltonians };
    Ok(Output { files: vec![("spectrum.json".into(), json(&report))], passed, lines, aborted: None })
}

#[derive(Serialize)]
struct DynamicsSummary<'a> {
    command: &'static str,
    seed: u64,
    config: &'a RunConfig,
    sector: Vec<usize>,
    state: usize,
    hamiltonians: Vec<f64>,
    rows: usize,
    /// Largest distance between the tau-function zeros and the flow.
    tau_vs_flow: f64,
    master_vs_flow: f64,
    velocities: Vec<Complex64>,
    velocity_error: f64,
    acceleration_error: f64,
    integral_drift: f64,
    min_separation: f64,
    substeps: usize,
    aborted: Option<String>,
    passed: bool,
}

/// Zeros of the selected eigenvalue along the second time, the tau zeros
/// and the integrated flow, written as CSV with a JSON summary.
pub fn dynamics(cfg: &RunConfig) -> Result<Output, Failure> {
    let sector = match &cfg.sector {
        Some(s) => cfg.sector_label(s).map_err(Failure::Config)?,
        None => cfg.model.sectors().into_iter().next().expect("at least one sector"),
    };
    let states = direct_eigenstates(&cfg.model, &sector, name_seed(cfg.seed, "states")).map_err(abort)?.states;
    let Some(state) = states.get(cfg.state) else {
        return Err(Failure::Config(format!(
            "state {} out of range: sector {:?} has dimension {}",
            cfg.state,
            sector.counts(),
            states.len()
        )));
    };
    let steps = if cfg.window_value == 0.0 { 0 } else { cfg.steps };
    let z = zero_dynamics(&cfg.model, state, cfg.window_value, steps).map_err(abort)?;
    let rows = z.master.times.len();
    let flow = Trajectory {
        times: z.flow.times.clone(),
        roots: z.flow.phases.iter().map(|p| p.x.clone()).collect(),
    };
    let passed = z.aborted.is_none()
        && rows == steps + 1
        && z.tau_vs_flow <= TRAJECTORY_TOLERANCE
        && z.master_vs_flow <= TRAJECTORY_TOLERANCE
        && z.velocity_error <= VELOCITY_TOLERANCE;
    let summary = DynamicsSummary {
        command: "dynamics",
        seed: cfg.seed,
        config: cfg,
        sector: sector.counts().to_vec(),
        state: cfg.state,
        hamiltonians: state.h.clone(),
        rows,
        tau_vs_flow: z.tau_vs_flow,
        master_vs_flow: z.master_vs_flow,
        velocities: z.velocities.clone(),
        velocity_error: z.velocity_error,
        acceleration_error: z.acceleration_error,
        integral_drift: z.flow.drift,
        min_separation: z.flow.min_separation,
        substeps: z.flow.substeps,
        aborted: z.aborted.clone(),
        passed,
    };
    let mut lines = vec![format!(
        "[{}] sector {:?} state {}: {rows} rows, tau vs flow {:e}, master vs flow {:e}",
        if passed { "PASS" } else { "FAIL" },
        sector.counts(),
        cfg.state,
        z.tau_vs_flow,
        z.master_vs_flow
    )];
    if let Some(a) = &z.aborted {
        lines.push(format!("aborted after {rows} rows: {a}"));
    }
    let output = Output {
        files: vec![
            ("trajectory.csv".into(), z.master.to_csv()),
            ("tau_trajectory.csv".into(), z.tau.to_csv()),
            ("flow_trajectory.csv".into(), flow.to_csv()),
            ("conservation.csv".into(), conservation_csv(&z.flow)),
            ("summary.json".into(), json(&summary)),
        ],
        passed,
        lines,
        aborted: z.aborted.map(|a| format!("{a} ({rows} rows written)")),
    };
    Ok(output)
}

/// Writes every file of `out` into `dir`.
pub fn write_all(out: &Output, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, body) in &out.files {
        std::fs::write(dir.join(name), body)?;
    }
    Ok(())
}
