//! Batch command-line front end.
//!
//! Exit codes: 0 when everything ran and every check passed, 2 when a
//! check failed, 1 on usage or runtime errors.

mod commands;
mod config;
mod output;
mod state;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

pub use commands::{
    build, evolve, observables, orientation_path, sidebands, verify, EvolveTarget, GeneratorId, Outcome,
};
pub use config::{linspace, RunConfig, Sweep, OBSERVABLE_CATALOG, SEED_ENV};
pub use output::{indexed_path, normalize_floats, num, parse_matrix_json, write_atomic};
pub use state::{ModeState, Prepared, StateSpec};

use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "optomech", version, about = "Cavity optomechanics on truncated Fock spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file (overrides the config's `out`).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Repeat over evenly spaced values of one config key.
    #[arg(long, value_name = "KEY=START:STOP:N")]
    sweep: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a model Hamiltonian as JSON.
    Build {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "ID")]
        model: String,
    },
    /// Run a verification suite (or `all`).
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "ID")]
        suite: String,
    },
    /// Propagate an initial state and tabulate observables as CSV.
    Evolve {
        #[command(flatten)]
        common: Common,
        /// Model or Lindblad generator id.
        #[arg(long, value_name = "ID")]
        model: String,
        /// e.g. `fock:1,0` or `cav=coherent:0.5,0;mech=thermal:1`.
        #[arg(long, value_name = "SPEC", default_value = "fock:0,0")]
        state: String,
    },
    /// Tabulate sideband band couplings and the orientation report.
    Sidebands {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Build { common, .. }
            | Command::Verify { common, .. }
            | Command::Evolve { common, .. }
            | Command::Sidebands { common } => common,
        }
    }

    fn run(&self, cfg: &RunConfig, out: Option<&Path>) -> Result<Outcome> {
        match self {
            Command::Build { model, .. } => build(cfg, model, out),
            Command::Verify { suite, .. } => verify(cfg, suite, out),
            Command::Evolve { model, state, .. } => evolve(cfg, model, state, out),
            Command::Sidebands { .. } => sidebands(cfg, out),
        }
    }
}

/// Run each sweep point independently; outputs go to indexed paths and
/// standard output carries a summary.
fn run_sweep(cmd: &Command, cfg: &RunConfig, sweep: &Sweep, out: Option<&Path>) -> Result<Outcome> {
    let out = out.ok_or_else(|| Error::Config("--sweep needs an output path".into()))?;
    let values = sweep.values();
    let configs: Vec<RunConfig> = values.iter().map(|&v| cfg.with_value(&sweep.key, v)).collect::<Result<_>>()?;
    let results: Vec<Result<Outcome>> =
        configs.par_iter().enumerate().map(|(i, c)| cmd.run(c, Some(&indexed_path(out, i)))).collect();
    let mut combined = Outcome::default();
    let mut points = Vec::new();
    for (i, (value, result)) in values.iter().zip(results).enumerate() {
        let o = result?;
        let files: Vec<String> = o.files.iter().map(|(p, _)| p.display().to_string()).collect();
        points.push(json!({"index": i, "value": num(*value), "passed": !o.failed, "files": files}));
        combined.failed |= o.failed;
        combined.messages.extend(o.messages.into_iter().map(|m| format!("[{}={value}] {m}", sweep.key)));
        combined.files.extend(o.files);
    }
    let doc = json!({
        "sweep": {"key": sweep.key, "start": num(sweep.start), "stop": num(sweep.stop), "n": sweep.n},
        "points": points,
        "passed": !combined.failed,
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    combined.stdout = text;
    Ok(combined)
}

fn execute(cmd: &Command, seed_override: Option<&str>) -> Result<Outcome> {
    let common = cmd.common();
    let cfg = RunConfig::load(common.config.as_deref(), seed_override)?;
    let out = common.out.clone().or_else(|| cfg.out.clone());
    match &common.sweep {
        Some(raw) => run_sweep(cmd, &cfg, &Sweep::parse(raw)?, out.as_deref()),
        None => cmd.run(&cfg, out.as_deref()),
    }
}

/// Parse `args`, run, write outputs and return the exit code.
pub fn run_with<I, T>(args: I, seed_override: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let outcome = match execute(&cli.command, seed_override) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_ERROR;
        }
    };
    for (path, bytes) in &outcome.files {
        if let Err(e) = write_atomic(path, bytes) {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_ERROR;
        }
    }
    if stdout.write_all(outcome.stdout.as_bytes()).is_err() {
        return EXIT_ERROR;
    }
    for m in &outcome.messages {
        let _ = writeln!(stderr, "{m}");
    }
    if outcome.failed {
        EXIT_FAILED
    } else {
        EXIT_OK
    }
}

/// Entry point used by the binary: process arguments and environment.
pub fn main_exit_code() -> i32 {
    let seed = std::env::var(SEED_ENV).ok();
    run_with(std::env::args_os(), seed.as_deref(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["optomech"];
        full.extend_from_slice(args);
        let code = run_with(full, None, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn help_is_success() {
        let (code, out, _) = run(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("verify"));
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(&["frobnicate"]).0, EXIT_ERROR);
        assert_eq!(run(&["build"]).0, EXIT_ERROR);
    }

    #[test]
    fn unknown_suite_names_valid_ones() {
        let (code, _, err) = run(&["verify", "--suite", "nope"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.contains("polaron") && err.contains("closed-form"));
    }

    #[test]
    fn sweep_requires_output() {
        assert_eq!(run(&["build", "--model", "standard", "--sweep", "g=0:0.1:2"]).0, EXIT_ERROR);
    }

    #[test]
    fn sweep_writes_indexed_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("cfg.json");
        std::fs::write(&cfg, r#"{"n_cavity": 2, "n_mech": 3, "buffer_mech": 1}"#).unwrap();
        let out = dir.path().join("h.json");
        let (code, stdout, err) = run(&[
            "build",
            "--model",
            "standard",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--sweep",
            "g=0:0.2:3",
        ]);
        assert_eq!(code, EXIT_OK, "{err}");
        assert!(stdout.contains("\"passed\": true"));
        for i in 0..3 {
            let text = std::fs::read_to_string(indexed_path(&out, i)).unwrap();
            let (_, m) = parse_matrix_json(&text).unwrap();
            // ⟨1,0| g n_a x_b |1,1⟩ coupling entry
            assert_eq!(m[[3, 4]].re, -0.1 * i as f64);
        }
    }
}
