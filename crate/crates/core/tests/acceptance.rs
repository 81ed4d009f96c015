//! End-to-end acceptance run: one line per criterion, non-zero exit when
//! any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, ExitCode};

use optomech::report::DeviationReport;
use optomech::suites::{self, displacement_oracle, SuiteConfig, SuiteId};

struct Criterion {
    id: u32,
    name: &'static str,
    passed: bool,
    detail: String,
}

struct Suites {
    cfg: SuiteConfig,
    cache: BTreeMap<&'static str, Vec<DeviationReport>>,
}

impl Suites {
    fn get(&mut self, id: SuiteId) -> Result<&[DeviationReport], String> {
        if !self.cache.contains_key(id.as_str()) {
            let reports = suites::verify_suite(id, &self.cfg).map_err(|e| format!("{id}: {e}"))?;
            self.cache.insert(id.as_str(), reports);
        }
        Ok(&self.cache[id.as_str()])
    }

    /// Reports of `id` whose label (after the suite prefix) starts with one
    /// of `prefixes`; every prefix must match at least one report.
    fn select(&mut self, id: SuiteId, prefixes: &[&str]) -> Result<Vec<DeviationReport>, String> {
        let reports = self.get(id)?;
        let mut out = Vec::new();
        for p in prefixes {
            let full = format!("{id}/{p}");
            let hits: Vec<_> = reports.iter().filter(|r| r.label.starts_with(&full)).cloned().collect();
            if hits.is_empty() {
                return Err(format!("no check labelled {full}"));
            }
            out.extend(hits);
        }
        Ok(out)
    }
}

fn gating(reports: &[DeviationReport]) -> impl Iterator<Item = &DeviationReport> {
    reports.iter().filter(|r| !r.informational)
}

fn summarize(reports: &[DeviationReport]) -> (bool, String) {
    let passed = gating(reports).all(|r| r.passed);
    let failures: Vec<String> = gating(reports)
        .filter(|r| !r.passed)
        .map(|r| format!("{} = {:.3e} (tol {:.0e})", r.label, r.max_abs_deviation, r.tolerance))
        .collect();
    let detail = if failures.is_empty() {
        gating(reports)
            .map(|r| format!("{} {:.1e}/{:.0e}", r.label, r.max_abs_deviation, r.tolerance))
            .collect::<Vec<_>>()
            .join("; ")
    } else {
        failures.join("; ")
    };
    (passed, detail)
}

fn from_reports(id: u32, name: &'static str, reports: Result<Vec<DeviationReport>, String>) -> Criterion {
    match reports {
        Ok(r) => {
            let (passed, detail) = summarize(&r);
            Criterion { id, name, passed, detail }
        }
        Err(e) => Criterion { id, name, passed: false, detail: format!("error: {e}") },
    }
}

fn displacement(_: &mut Suites) -> Criterion {
    let reports: Result<Vec<_>, String> =
        [0.1, 0.5, 1.0, 2.0].iter().map(|&a| displacement_oracle(a, 24, 4).map_err(|e| e.to_string())).collect();
    from_reports(1, "displacement oracle (expm vs Laguerre, n_mech = 24)", reports)
}

fn pump_frame(s: &mut Suites) -> Criterion {
    let r = s.select(SuiteId::PumpFrame, &["conjugated-h_pumped"]);
    let n = s.cfg.n_times;
    let mut c = from_reports(2, "pump-frame identity", r);
    c.detail = format!("{n} sampled times; {}", c.detail);
    c
}

fn polaron_kerr(s: &mut Suites) -> Criterion {
    let r = s.select(SuiteId::Polaron, &["conjugated-h_c"]).and_then(|mut a| {
        a.extend(s.select(SuiteId::KerrSpectrum, &["interior-spectrum"])?);
        Ok(a)
    });
    from_reports(3, "polaron/Kerr identity and interior spectrum", r)
}

fn cm_frame(s: &mut Suites) -> Criterion {
    from_reports(4, "cm-frame identity", s.select(SuiteId::CmFrame, &["conjugated-h_displaced"]))
}

fn sideband(s: &mut Suites) -> Criterion {
    let r = s.select(
        SuiteId::Sideband,
        &[
            "s0-plus-printed-vs-fourier",
            "s0-minus-printed-vs-fourier",
            "s1-plus-band-magnitudes",
            "s1-minus-band-magnitudes",
            "s2-plus-band-magnitudes",
            "s2-minus-band-magnitudes",
            "s1-plus-orientation",
            "s2-plus-orientation",
            "rwa-fidelity-alpha0.05",
        ],
    );
    // orientation reports are informational: emitted, not gating
    let emitted = r.as_ref().map(|v| v.iter().filter(|x| x.label.contains("orientation")).count()).unwrap_or(0);
    let mut c = from_reports(5, "sideband consistency and RWA fidelity", r);
    c.detail = format!("{emitted} orientation reports emitted; {}", c.detail);
    c
}

fn thermal_reduction(s: &mut Suites) -> Criterion {
    from_reports(6, "thermal reduction residual", s.select(SuiteId::DampedReduction, &["reduction-thermal-field"]))
}

fn closed_form(s: &mut Suites) -> Criterion {
    let r = s.select(SuiteId::ClosedForm, &["rk4-vs-"]);
    let mut c = from_reports(7, "closed form vs RK4 up to t = 5/gamma", r.clone());
    if let Ok(reports) = r {
        let matched: Vec<&str> =
            reports.iter().filter(|x| x.passed).map(|x| x.label.trim_start_matches("closed-form/rk4-vs-")).collect();
        c.detail = format!("matching ordering: {}; {}", matched.join(", "), c.detail);
        c.passed &= matched == ["jump-then-decay"];
    }
    c
}

fn right_unitary(s: &mut Suites) -> Criterion {
    from_reports(
        8,
        "right-unitary chain",
        s.select(SuiteId::RightUnitary, &["T-h_T-Tdag", "kernel-term", "squared", "propagator"]),
    )
}

fn kerr_block(s: &mut Suites) -> Criterion {
    from_reports(9, "Kerr-block commutation", s.select(SuiteId::HybridChain, &["kerr-commutes"]))
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_optomech")
}

fn run_bin(args: &[&str], dir: &Path) -> Result<(i32, Vec<u8>), String> {
    let out = Command::new(bin())
        .args(args)
        .current_dir(dir)
        .env("OPTOMECH_SEED", "7")
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

const SHORT_RUN: &str =
    r#"{"n_cavity": 4, "n_mech": 10, "t_max": 6.0, "record_every": 200, "observables": ["n_a", "n_b", "x_b"]}"#;

const CPTP: &str = "CPTP sanity on every propagation";

fn cptp(s: &mut Suites) -> Criterion {
    let mut reports = match s.select(SuiteId::ClosedForm, &["rk4/", "displaced-thermal/"]) {
        Ok(r) => r,
        Err(e) => return Criterion { id: 10, name: CPTP, passed: false, detail: e },
    };
    match s.select(SuiteId::Sideband, &["rwa-norm-drift"]) {
        Ok(r) => reports.extend(r),
        Err(e) => return Criterion { id: 10, name: CPTP, passed: false, detail: e },
    }
    let (mut passed, mut detail) = summarize(&reports);
    // command-line propagations gate on the same bounds through their exit code
    let dir = tempfile::tempdir().expect("temp dir");
    std::fs::write(dir.path().join("run.json"), SHORT_RUN).expect("config");
    for (model, state) in [
        ("lindblad-damped", "cav=fock:1;mech=thermal:0.5"),
        ("lindblad-displaced", "cav=fock:2;mech=coherent:0.3,0.1"),
        ("standard", "thermal:0.3"),
    ] {
        match run_bin(
            &["evolve", "--config", "run.json", "--model", model, "--state", state, "--out", "e.csv"],
            dir.path(),
        ) {
            Ok((0, _)) => detail.push_str(&format!("; evolve {model} ok")),
            Ok((code, _)) => {
                passed = false;
                detail.push_str(&format!("; evolve {model} exit {code}"));
            }
            Err(e) => {
                passed = false;
                detail.push_str(&format!("; evolve {model}: {e}"));
            }
        }
    }
    Criterion { id: 10, name: CPTP, passed, detail }
}

fn determinism(_: &mut Suites) -> Criterion {
    let commands: Vec<Vec<&str>> = vec![
        vec!["build", "--config", "run.json", "--model", "hybrid-am", "--out", "h.json"],
        vec!["verify", "--config", "run.json", "--suite", "right-unitary", "--out", "v.json"],
        vec![
            "evolve",
            "--config",
            "run.json",
            "--model",
            "lindblad-damped",
            "--state",
            "mech=thermal:1",
            "--out",
            "e.csv",
        ],
        vec!["evolve", "--config", "run.json", "--model", "cm", "--state", "fock:0,0", "--out", "k.csv"],
        vec!["sidebands", "--config", "run.json", "--out", "s.csv"],
        vec!["build", "--config", "run.json", "--model", "standard", "--out", "w.json", "--sweep", "g=0:0.2:3"],
    ];
    let outputs = ["h.json", "v.json", "e.csv", "k.csv", "s.csv", "s.orientation.json", "w.0.json", "w.2.json"];
    let snapshot = || -> Result<Vec<Vec<u8>>, String> {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        std::fs::write(dir.path().join("run.json"), SHORT_RUN).map_err(|e| e.to_string())?;
        let mut bytes = Vec::new();
        for args in &commands {
            let (code, stdout) = run_bin(args, dir.path())?;
            if code != 0 {
                return Err(format!("`{}` exited {code}", args.join(" ")));
            }
            bytes.push(stdout);
        }
        for f in outputs {
            bytes.push(std::fs::read(dir.path().join(f)).map_err(|e| format!("{f}: {e}"))?);
        }
        Ok(bytes)
    };
    let name = "determinism of repeated runs";
    match (snapshot(), snapshot()) {
        (Ok(a), Ok(b)) => {
            let differing: Vec<String> = (0..a.len()).filter(|&i| a[i] != b[i]).map(|i| i.to_string()).collect();
            let total: usize = a.iter().map(Vec::len).sum();
            Criterion {
                id: 11,
                name,
                passed: differing.is_empty(),
                detail: if differing.is_empty() {
                    format!("{} artifacts, {total} bytes identical across two runs", a.len())
                } else {
                    format!("artifacts differ: {}", differing.join(", "))
                },
            }
        }
        (Err(e), _) | (_, Err(e)) => Criterion { id: 11, name, passed: false, detail: format!("error: {e}") },
    }
}

fn main() -> ExitCode {
    // cargo passes harness flags such as --nocapture or a filter; only a
    // listing request changes behavior
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let mut s = Suites { cfg: SuiteConfig::default(), cache: BTreeMap::new() };
    let checks: [fn(&mut Suites) -> Criterion; 11] = [
        displacement,
        pump_frame,
        polaron_kerr,
        cm_frame,
        sideband,
        thermal_reduction,
        closed_form,
        right_unitary,
        kerr_block,
        cptp,
        determinism,
    ];
    let mut failed = 0;
    for check in checks {
        let c = check(&mut s);
        println!("[{}] {:>2}. {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.id, c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
