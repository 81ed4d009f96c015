use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ndarray::Array2;
use serde_json::json;

use super::config::RunConfig;
use super::output::{matrix_entries, num, to_json};
use super::state::{Prepared, StateSpec};
use crate::error::{Error, Result};
use crate::fock::{ladder_operators, pauli_operators, HilbertSpace};
use crate::hamiltonians::ModelId;
use crate::open_dynamics::{
    displaced_master_generator, free_damped_generator, original_damped_generator, rk4_propagate, rk4_schrodinger,
    HamiltonianFlow, HamiltonianSource, LindbladGenerator, PropagationOptions, TimeSeries,
};
use crate::report::{all_passed, DeviationReport};
use crate::sideband::{band_couplings, compare_sideband, SidebandSpec};
use crate::suites::{self, SuiteId, HERMITICITY_TOL, MIN_EIGENVALUE_FLOOR, TRACE_DRIFT_TOL};
use crate::C64;

/// What a command produced; nothing is written until the caller decides.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub stdout: String,
    pub files: Vec<(PathBuf, Vec<u8>)>,
    /// Diagnostics for standard error.
    pub messages: Vec<String>,
    /// A check failed; the command itself ran to completion.
    pub failed: bool,
}

/// Lindblad generators that `evolve` accepts besides closed models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorId {
    /// Zero Hamiltonian and no dissipators.
    Zero,
    /// `ω_m n_b + g n_a (b + b†)` with mechanical damping.
    LindbladDamped,
    /// Free damped oscillator.
    LindbladFree,
    /// Displaced master equation with the cavity-conditioned terms.
    LindbladDisplaced,
}

impl GeneratorId {
    pub const ALL: [GeneratorId; 4] =
        [GeneratorId::Zero, GeneratorId::LindbladDamped, GeneratorId::LindbladFree, GeneratorId::LindbladDisplaced];

    pub fn as_str(&self) -> &'static str {
        match self {
            GeneratorId::Zero => "zero",
            GeneratorId::LindbladDamped => "lindblad-damped",
            GeneratorId::LindbladFree => "lindblad-free",
            GeneratorId::LindbladDisplaced => "lindblad-displaced",
        }
    }

    pub fn catalog() -> String {
        Self::ALL.iter().map(|g| g.as_str()).collect::<Vec<_>>().join(", ")
    }

    pub fn build(&self, cfg: &RunConfig, space: HilbertSpace) -> Result<LindbladGenerator> {
        match self {
            GeneratorId::Zero => Ok(LindbladGenerator::from_matrix(Array2::zeros((space.dim(), space.dim())))),
            GeneratorId::LindbladDamped => original_damped_generator(&cfg.params, space),
            GeneratorId::LindbladFree => free_damped_generator(&cfg.params, space),
            GeneratorId::LindbladDisplaced => displaced_master_generator(&cfg.params, space),
        }
    }
}

impl FromStr for GeneratorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| Error::UnknownGenerator(s.to_string(), Self::catalog()))
    }
}

/// `evolve` target: a closed model or a Lindblad generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvolveTarget {
    Model(ModelId),
    Generator(GeneratorId),
}

impl FromStr for EvolveTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Ok(g) = s.parse() {
            return Ok(EvolveTarget::Generator(g));
        }
        s.parse().map(EvolveTarget::Model).map_err(|_| {
            Error::UnknownModel(s.to_string(), format!("{}, {}", ModelId::catalog(), GeneratorId::catalog()))
        })
    }
}

impl fmt::Display for EvolveTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvolveTarget::Model(m) => f.write_str(m.as_str()),
            EvolveTarget::Generator(g) => f.write_str(g.as_str()),
        }
    }
}

fn emit(out: Option<&Path>, body: String, outcome: &mut Outcome) {
    match out {
        Some(p) => outcome.files.push((p.to_path_buf(), body.into_bytes())),
        None => outcome.stdout = body,
    }
}

fn space_for(cfg: &RunConfig, needs_qubit: bool) -> Result<HilbertSpace> {
    HilbertSpace::new(cfg.has_qubit.unwrap_or(needs_qubit), cfg.n_cavity, cfg.n_mech)
}

/// The model matrix as JSON.
pub fn build(cfg: &RunConfig, model: &str, out: Option<&Path>) -> Result<Outcome> {
    let id: ModelId = model.parse()?;
    let space = space_for(cfg, id.needs_qubit())?;
    let h = id.build(&cfg.params, space, cfg.t_eval)?;
    let mut params = serde_json::to_value(cfg.params)?;
    super::output::normalize_floats(&mut params);
    let doc = json!({
        "dims": space.dims(),
        "entries": matrix_entries(h.data()),
        "model": id.as_str(),
        "params": params,
        "t": num(cfg.t_eval),
        "tool_version": env!("CARGO_PKG_VERSION"),
    });
    let mut outcome = Outcome::default();
    emit(out, to_json(&doc, false)?, &mut outcome);
    Ok(outcome)
}

/// Run one suite, or every suite for `all`.
pub fn verify(cfg: &RunConfig, suite: &str, out: Option<&Path>) -> Result<Outcome> {
    let ids: Vec<SuiteId> = if suite == "all" { SuiteId::ALL.to_vec() } else { vec![suite.parse()?] };
    let sc = cfg.suite_config();
    let mut checks: Vec<DeviationReport> = Vec::new();
    for id in ids {
        checks.extend(suites::verify_suite(id, &sc)?);
    }
    let passed = all_passed(&checks);
    let doc = json!({
        "suite": suite,
        "seed": cfg.seed,
        "checks": checks,
        "passed": passed,
    });
    let text = to_json(&doc, true)?;
    let mut outcome = Outcome { failed: !passed, ..Default::default() };
    for c in checks.iter().filter(|c| !c.passed && !c.informational) {
        outcome.messages.push(format!("FAIL {}: {:e} ≥ {:e}", c.label, c.max_abs_deviation, c.tolerance));
    }
    if let Some(p) = out {
        outcome.files.push((p.to_path_buf(), text.clone().into_bytes()));
    }
    outcome.stdout = text;
    Ok(outcome)
}

/// Named observables on `space`.
pub fn observables(names: &[String], space: HilbertSpace) -> Result<Vec<(String, Array2<C64>)>> {
    let ladder = ladder_operators(space);
    names
        .iter()
        .map(|name| {
            let op = match name.as_str() {
                "n_a" => ladder.n_a.clone(),
                "n_b" => ladder.n_b.clone(),
                "x_b" => ladder.x_b(),
                "sz" => pauli_operators(space)?.sz,
                other => return Err(Error::Config(format!("unknown observable `{other}`"))),
            };
            Ok((name.clone(), op.into_data()))
        })
        .collect()
}

fn cptp_failures(series: &TimeSeries) -> Vec<String> {
    let mut out = Vec::new();
    if !(series.max_trace_drift < TRACE_DRIFT_TOL) {
        out.push(format!("trace drift {:e} ≥ {TRACE_DRIFT_TOL:e}", series.max_trace_drift));
    }
    if !(series.max_hermiticity_defect < HERMITICITY_TOL) {
        out.push(format!("Hermiticity defect {:e} ≥ {HERMITICITY_TOL:e}", series.max_hermiticity_defect));
    }
    if !(series.min_eigenvalue >= MIN_EIGENVALUE_FLOOR) {
        out.push(format!("minimum eigenvalue {:e} < {MIN_EIGENVALUE_FLOOR:e}", series.min_eigenvalue));
    }
    out
}

fn model_source(m: ModelId, cfg: &RunConfig, space: HilbertSpace) -> Result<HamiltonianSource<'_>> {
    let h0 = m.build(&cfg.params, space, 0.0)?.into_data();
    if m.is_time_dependent() {
        Ok(HamiltonianSource::time_dependent(space.dim(), move |t| {
            m.build(&cfg.params, space, t).map(|h| h.into_data())
        }))
    } else {
        Ok(HamiltonianSource::Static(h0))
    }
}

/// Propagate `state` under a model or generator and tabulate observables.
///
/// Pure states under closed models use the Schrödinger equation and report
/// the norm; everything else propagates the density matrix and reports its
/// trace and smallest eigenvalue.
pub fn evolve(cfg: &RunConfig, target: &str, state: &str, out: Option<&Path>) -> Result<Outcome> {
    let target: EvolveTarget = target.parse()?;
    let needs_qubit = matches!(target, EvolveTarget::Model(m) if m.needs_qubit());
    let space = space_for(cfg, needs_qubit)?;
    let obs = observables(&cfg.observables, space)?;
    let initial = StateSpec::parse(state)?.prepare(space)?;
    let (t_max, dt) = (cfg.t_max(), cfg.dt());
    let opts = PropagationOptions { record_every: cfg.record_every, ..Default::default() };
    let mut outcome = Outcome::default();

    let csv = match (target, &initial) {
        (EvolveTarget::Model(m), Prepared::Ket(psi)) => {
            let series = rk4_schrodinger(&model_source(m, cfg, space)?, psi, t_max, dt, &obs, cfg.record_every, 1e-6)?;
            let drift = series.norm.iter().fold(0.0_f64, |a, n| a.max((n * n - 1.0).abs()));
            if !(drift < TRACE_DRIFT_TOL) {
                outcome.messages.push(format!("norm drift {drift:e} ≥ {TRACE_DRIFT_TOL:e}"));
            }
            series.to_csv()
        }
        (EvolveTarget::Model(m), Prepared::Density(rho)) => {
            let flow = HamiltonianFlow::new(model_source(m, cfg, space)?);
            let series = rk4_propagate(&flow, rho, t_max, dt, &obs, &opts)?;
            outcome.messages.extend(cptp_failures(&series));
            series.to_csv()
        }
        (EvolveTarget::Generator(g), prepared) => {
            let gen = g.build(cfg, space)?;
            let series = rk4_propagate(&gen, &prepared.density(), t_max, dt, &obs, &opts)?;
            outcome.messages.extend(cptp_failures(&series));
            series.to_csv()
        }
    };
    outcome.failed = !outcome.messages.is_empty();
    emit(out, csv, &mut outcome);
    Ok(outcome)
}

/// `dir/stem.orientation.json` next to the sideband CSV.
pub fn orientation_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    csv.with_file_name(format!("{stem}.orientation.json"))
}

/// Band couplings over the configured `(α, s, sign)` grid, with the
/// printed-versus-Fourier orientation report next to the CSV.
pub fn sidebands(cfg: &RunConfig, out: Option<&Path>) -> Result<Outcome> {
    let out = out.ok_or_else(|| Error::Config("sidebands needs an output path (--out or `out`)".into()))?;
    let mut csv = String::from("alpha,s,sign,band,coupling_magnitude\n");
    let mut reports = Vec::new();
    for alpha in cfg.alpha_grid() {
        for s in 0..=cfg.s_max {
            let signs: &[i32] = if s == 0 { &[1] } else { &[1, -1] };
            for &sign in signs {
                let spec = SidebandSpec::new(s, sign, alpha)?;
                for (band, mag) in band_couplings(cfg.n_mech, &spec, cfg.params.pump_strength, cfg.buffer_mech)? {
                    let _ = writeln!(csv, "{alpha:.16e},{s},{sign},{band},{mag:.16e}");
                }
                reports.push(compare_sideband(cfg.n_mech, &spec, cfg.buffer_mech)?);
            }
        }
    }
    let doc = json!({
        "Omega": num(cfg.params.pump_strength),
        "n_mech": cfg.n_mech,
        "buffer_mech": cfg.buffer_mech,
        "bands": reports,
    });
    let report = to_json(&doc, true)?;
    Ok(Outcome {
        stdout: report.clone(),
        files: vec![(out.to_path_buf(), csv.into_bytes()), (orientation_path(out), report.into_bytes())],
        messages: Vec::new(),
        failed: false,
    })
}
