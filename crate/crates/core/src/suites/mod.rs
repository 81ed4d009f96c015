//! Named verification suites. Each suite checks a group of operator
//! identities or dynamical claims and returns one report per check,
//! ordered by label.

mod damping;
mod frames;
mod hybrid;
mod sidebands;

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{displacement_factor, mech_headroom, DisplacementMethod, HilbertSpace};
use crate::hamiltonians::ModelParams;
use crate::open_dynamics::TimeSeries;
use crate::report::DeviationReport;
use crate::C64;

pub use damping::{closed_form_reports, CLOSED_FORM_TOL};
pub use sidebands::RWA_FIDELITY_THRESHOLD;

/// Identities verified exactly up to rounding.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Structural zeros such as the right-unitary kernel term.
pub const EXACT_TOL: f64 = 1e-12;
pub const DISPLACEMENT_TOL: f64 = 1e-9;
pub const SPECTRUM_TOL: f64 = 1e-8;
pub const PROPAGATOR_TOL: f64 = 1e-8;
pub const TRACE_DRIFT_TOL: f64 = 1e-8;
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const MIN_EIGENVALUE_FLOOR: f64 = -1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SuiteId {
    PumpFrame,
    RwaAverage,
    Polaron,
    CmFrame,
    KerrSpectrum,
    Rearrangement,
    RightUnitary,
    HybridChain,
    Sideband,
    DampedReduction,
    ClosedForm,
}

impl SuiteId {
    pub const ALL: [SuiteId; 11] = [
        SuiteId::PumpFrame,
        SuiteId::RwaAverage,
        SuiteId::Polaron,
        SuiteId::CmFrame,
        SuiteId::KerrSpectrum,
        SuiteId::Rearrangement,
        SuiteId::RightUnitary,
        SuiteId::HybridChain,
        SuiteId::Sideband,
        SuiteId::DampedReduction,
        SuiteId::ClosedForm,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteId::PumpFrame => "pump-frame",
            SuiteId::RwaAverage => "rwa-average",
            SuiteId::Polaron => "polaron",
            SuiteId::CmFrame => "cm-frame",
            SuiteId::KerrSpectrum => "kerr-spectrum",
            SuiteId::Rearrangement => "rearrangement",
            SuiteId::RightUnitary => "right-unitary",
            SuiteId::HybridChain => "hybrid-chain",
            SuiteId::Sideband => "sideband",
            SuiteId::DampedReduction => "damped-reduction",
            SuiteId::ClosedForm => "closed-form",
        }
    }

    pub fn catalog() -> String {
        Self::ALL.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string(), Self::catalog()))
    }
}

/// Inputs shared by all suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub params: ModelParams,
    pub n_cavity: usize,
    pub n_mech: usize,
    pub seed: u64,
    /// Number of sampled times for time-dependent identities.
    pub n_times: usize,
    pub buffer_cav: usize,
    pub buffer_mech: usize,
    /// RK4 step in units of the mechanical period.
    pub dt_periods: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            params: ModelParams::default(),
            n_cavity: 8,
            n_mech: 24,
            seed: 1,
            n_times: 10,
            buffer_cav: 1,
            buffer_mech: 4,
            dt_periods: 1e-3,
        }
    }
}

impl SuiteConfig {
    pub fn optomech_space(&self) -> Result<HilbertSpace> {
        HilbertSpace::optomechanical(self.n_cavity, self.n_mech)
    }

    pub fn hybrid_space(&self) -> Result<HilbertSpace> {
        HilbertSpace::hybrid(self.n_cavity, self.n_mech)
    }

    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.params.omega_m
    }

    pub fn dt(&self) -> f64 {
        self.dt_periods * self.period()
    }

    /// Deterministic generator for one named purpose.
    pub fn rng(&self, purpose: &str) -> ChaCha8Rng {
        // FNV-1a, to decorrelate purposes under one seed
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in purpose.bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        ChaCha8Rng::seed_from_u64(self.seed ^ h)
    }

    /// `n_times` sample times in `(0, t_max]`, sorted.
    pub fn sample_times(&self, purpose: &str, t_max: f64) -> Vec<f64> {
        let mut rng = self.rng(purpose);
        let mut ts: Vec<f64> = (0..self.n_times.max(1)).map(|_| t_max * (1.0 - rng.random::<f64>())).collect();
        ts.sort_by(f64::total_cmp);
        ts
    }

    fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.params.alpha()?;
        if self.buffer_cav >= self.n_cavity || self.buffer_mech >= self.n_mech {
            return Err(Error::InvalidArgument("buffers leave no interior".into()));
        }
        if !(self.dt_periods > 0.0 && self.dt_periods.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt_periods = {} must be > 0", self.dt_periods)));
        }
        Ok(())
    }
}

/// Run one suite.
pub fn verify_suite(id: SuiteId, cfg: &SuiteConfig) -> Result<Vec<DeviationReport>> {
    cfg.validate()?;
    let mut reports = match id {
        SuiteId::PumpFrame => frames::pump_frame(cfg)?,
        SuiteId::RwaAverage => frames::rwa_average(cfg)?,
        SuiteId::Polaron => frames::polaron(cfg)?,
        SuiteId::CmFrame => frames::cm_frame(cfg)?,
        SuiteId::KerrSpectrum => frames::kerr_spectrum(cfg)?,
        SuiteId::Rearrangement => hybrid::rearrangement(cfg)?,
        SuiteId::RightUnitary => hybrid::right_unitary(cfg)?,
        SuiteId::HybridChain => hybrid::hybrid_chain(cfg)?,
        SuiteId::Sideband => sidebands::sideband(cfg)?,
        SuiteId::DampedReduction => damping::damped_reduction(cfg)?,
        SuiteId::ClosedForm => damping::closed_form(cfg)?,
    };
    for r in &mut reports {
        r.label = format!("{id}/{}", r.label);
    }
    reports.sort_by(|a, b| a.label.cmp(&b.label));
    Ok(reports)
}

/// Truncated-exponential versus closed-form `D(α)` on the lowest
/// `n_mech − buffer_mech` levels. The exponential is taken on a ladder with
/// headroom, so both sides approximate the same untruncated operator.
pub fn displacement_oracle(alpha: f64, n_mech: usize, buffer_mech: usize) -> Result<DeviationReport> {
    if buffer_mech >= n_mech {
        return Err(Error::InvalidArgument(format!("buffer {buffer_mech} ≥ {n_mech} levels")));
    }
    let pad = mech_headroom(alpha, n_mech);
    let xi = C64::new(alpha, 0.0);
    let big = displacement_factor(n_mech + pad, xi, DisplacementMethod::Expm)?;
    let exact = displacement_factor(n_mech, xi, DisplacementMethod::Laguerre)?;
    let keep = n_mech - buffer_mech;
    let dev = max_block_diff(&big, &exact, keep);
    Ok(DeviationReport::new(format!("displacement-oracle/alpha={alpha}"), dev, DISPLACEMENT_TOL)
        .with_buffers(0, buffer_mech)
        .with_notes(format!("expm on {} levels, compared on the lowest {keep}", n_mech + pad)))
}

/// The same comparison with the exponential truncated at `n_mech` levels.
pub fn displacement_oracle_unpadded(alpha: f64, n_mech: usize, buffer_mech: usize) -> Result<DeviationReport> {
    let xi = C64::new(alpha, 0.0);
    let small = displacement_factor(n_mech, xi, DisplacementMethod::Expm)?;
    let exact = displacement_factor(n_mech, xi, DisplacementMethod::Laguerre)?;
    let dev = max_block_diff(&small, &exact, n_mech.saturating_sub(buffer_mech));
    Ok(DeviationReport::new(format!("displacement-oracle-unpadded/alpha={alpha}"), dev, DISPLACEMENT_TOL)
        .with_buffers(0, buffer_mech)
        .informational())
}

fn max_block_diff(a: &Array2<C64>, b: &Array2<C64>, keep: usize) -> f64 {
    let mut dev = 0.0_f64;
    for i in 0..keep {
        for j in 0..keep {
            dev = dev.max((a[[i, j]] - b[[i, j]]).norm());
        }
    }
    dev
}

/// Random density matrix `G G†/tr` with `G` complex Gaussian on the lowest
/// `support` levels.
pub fn random_density(rng: &mut ChaCha8Rng, n: usize, support: usize) -> Array2<C64> {
    let k = support.clamp(1, n);
    let mut g = Array2::<C64>::zeros((n, n));
    for i in 0..k {
        for j in 0..k {
            g[[i, j]] = C64::new(gauss(rng), gauss(rng));
        }
    }
    let rho = g.dot(&g.t().mapv(|z| z.conj()));
    let tr = rho.diag().sum().re;
    rho.mapv(|z| z / tr)
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> Array2<C64> {
    let g = Array2::from_shape_fn((n, n), |_| C64::new(gauss(rng), gauss(rng)));
    (&g + &g.t().mapv(|z| z.conj())).mapv(|z| z * 0.5)
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u: f64 = 1.0 - rng.random::<f64>();
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

/// Trace, Hermiticity and positivity checks for one propagation.
pub fn cptp_reports(label: &str, series: &TimeSeries) -> Vec<DeviationReport> {
    cptp_values(label, series.max_trace_drift, series.max_hermiticity_defect, series.min_eigenvalue)
}

fn cptp_values(label: &str, trace_drift: f64, hermiticity: f64, min_eig: f64) -> Vec<DeviationReport> {
    vec![
        DeviationReport::new(format!("{label}/trace-drift"), trace_drift, TRACE_DRIFT_TOL),
        DeviationReport::new(format!("{label}/hermiticity"), hermiticity, HERMITICITY_TOL),
        DeviationReport::new(format!("{label}/min-eigenvalue"), (-min_eig).max(0.0), -MIN_EIGENVALUE_FLOOR)
            .with_notes(format!("min eigenvalue {min_eig:.3e}")),
    ]
}

fn max_over<T>(items: impl IntoIterator<Item = T>, f: impl Fn(T) -> Result<f64>) -> Result<f64> {
    let mut worst = 0.0_f64;
    for x in items {
        let d = f(x)?;
        if d.is_nan() {
            return Ok(f64::NAN);
        }
        worst = worst.max(d);
    }
    Ok(worst)
}

fn fmt_times(ts: &[f64]) -> String {
    let parts: Vec<String> = ts.iter().map(|t| format!("{t:.6}")).collect();
    format!("t = [{}]", parts.join(", "))
}
