use std::fmt::Write as _;

use ndarray::Array2;

use super::generator::Liouvillian;
use crate::error::{Error, Result};
use crate::fock::linalg::min_eigenvalue;
use crate::C64;

#[derive(Debug, Clone)]
pub struct PropagationOptions {
    /// Steps between recorded samples.
    pub record_every: usize,
    /// Minimum eigenvalue is computed on every `eig_every`-th sample.
    pub eig_every: usize,
    /// Abort once `|tr ρ − tr ρ₀|` exceeds this.
    pub trace_guard: f64,
    /// Keep the density matrix at every sample.
    pub keep_states: bool,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        PropagationOptions { record_every: 100, eig_every: 1, trace_guard: 1e-6, keep_states: false }
    }
}

#[derive(Debug, Clone)]
pub struct TimeSeries {
    pub t: Vec<f64>,
    pub trace: Vec<f64>,
    pub min_eig: Vec<Option<f64>>,
    pub observable_names: Vec<String>,
    /// `observables[k][i]` is `⟨O_k⟩` at `t[i]`.
    pub observables: Vec<Vec<C64>>,
    pub states: Vec<Array2<C64>>,
    pub final_state: Array2<C64>,
    /// Step actually used, `t_max / ceil(t_max / dt)`.
    pub dt: f64,
    pub max_trace_drift: f64,
    /// Largest anti-Hermitian part of a raw RK4 update, before
    /// re-symmetrization.
    pub max_hermiticity_defect: f64,
    pub min_eigenvalue: f64,
}

impl TimeSeries {
    /// CSV with columns `t, trace, min_eig`, then `re`/`im` per observable.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,trace,min_eig");
        for name in &self.observable_names {
            let _ = write!(out, ",{name}_re,{name}_im");
        }
        out.push('\n');
        for i in 0..self.t.len() {
            let _ = write!(out, "{:.16e},{:.16e},", self.t[i], self.trace[i]);
            if let Some(e) = self.min_eig[i] {
                let _ = write!(out, "{e:.16e}");
            }
            for obs in &self.observables {
                let _ = write!(out, ",{:.16e},{:.16e}", obs[i].re, obs[i].im);
            }
            out.push('\n');
        }
        out
    }
}

fn trace(rho: &Array2<C64>) -> C64 {
    rho.diag().sum()
}

fn expect(op: &Array2<C64>, rho: &Array2<C64>) -> C64 {
    // tr(Oρ) without forming the product
    let n = rho.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += op[[i, j]] * rho[[j, i]];
        }
    }
    acc
}

/// Fixed-step classical RK4 for `dρ/dt = 𝓛(t)[ρ]`.
///
/// The step is shrunk to `t_max / ceil(t_max / dt)` so the run ends exactly
/// at `t_max`. After each step `ρ ← (ρ + ρ†)/2`.
pub fn rk4_propagate<L: Liouvillian + ?Sized>(
    gen: &L,
    rho0: &Array2<C64>,
    t_max: f64,
    dt: f64,
    observables: &[(String, Array2<C64>)],
    opts: &PropagationOptions,
) -> Result<TimeSeries> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt = {dt} must be > 0")));
    }
    if !(t_max >= dt && t_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_max = {t_max} must be ≥ dt = {dt}")));
    }
    let n = gen.dim();
    if rho0.nrows() != n || rho0.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: rho0.nrows() });
    }
    for (_, op) in observables {
        if op.nrows() != n || op.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: op.nrows() });
        }
    }
    let steps = (t_max / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t_max / steps as f64;
    let record_every = opts.record_every.max(1);
    let eig_every = opts.eig_every.max(1);
    let tr0 = trace(rho0);

    let mut series = TimeSeries {
        t: Vec::new(),
        trace: Vec::new(),
        min_eig: Vec::new(),
        observable_names: observables.iter().map(|(name, _)| name.clone()).collect(),
        observables: vec![Vec::new(); observables.len()],
        states: Vec::new(),
        final_state: rho0.clone(),
        dt: h,
        max_trace_drift: 0.0,
        max_hermiticity_defect: 0.0,
        min_eigenvalue: f64::INFINITY,
    };
    let record = |series: &mut TimeSeries, t: f64, rho: &Array2<C64>| {
        let k = series.t.len();
        series.t.push(t);
        series.trace.push(trace(rho).re);
        let eig = k.is_multiple_of(eig_every).then(|| min_eigenvalue(rho));
        if let Some(e) = eig {
            series.min_eigenvalue = series.min_eigenvalue.min(e);
        }
        series.min_eig.push(eig);
        for (slot, (_, op)) in series.observables.iter_mut().zip(observables) {
            slot.push(expect(op, rho));
        }
        if opts.keep_states {
            series.states.push(rho.clone());
        }
    };

    let mut rho = rho0.clone();
    record(&mut series, 0.0, &rho);
    for step in 0..steps {
        let t = step as f64 * h;
        let k1 = gen.apply(t, &rho);
        let k2 = gen.apply(t + h / 2.0, &(&rho + &k1.mapv(|z| z * (h / 2.0))));
        let k3 = gen.apply(t + h / 2.0, &(&rho + &k2.mapv(|z| z * (h / 2.0))));
        let k4 = gen.apply(t + h, &(&rho + &k3.mapv(|z| z * h)));
        let mut next = rho.clone();
        next.scaled_add(C64::new(h / 6.0, 0.0), &k1);
        next.scaled_add(C64::new(h / 3.0, 0.0), &k2);
        next.scaled_add(C64::new(h / 3.0, 0.0), &k3);
        next.scaled_add(C64::new(h / 6.0, 0.0), &k4);
        let adj = next.t().mapv(|z| z.conj());
        let defect = (&next - &adj).iter().fold(0.0_f64, |a, z| a.max(z.norm())) / 2.0;
        series.max_hermiticity_defect = series.max_hermiticity_defect.max(defect);
        rho = (&next + &adj).mapv(|z| z * 0.5);

        let t_next = (step + 1) as f64 * h;
        let drift = (trace(&rho) - tr0).norm();
        series.max_trace_drift = series.max_trace_drift.max(drift);
        if !(drift <= opts.trace_guard) {
            return Err(Error::TraceDrift { t: t_next, drift });
        }
        if (step + 1) % record_every == 0 || step + 1 == steps {
            record(&mut series, t_next, &rho);
        }
    }
    series.final_state = rho;
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{annihilation, number};
    use crate::open_dynamics::LindbladGenerator;

    fn one_phonon(n: usize) -> Array2<C64> {
        let mut r = Array2::zeros((n, n));
        r[[1, 1]] = C64::new(1.0, 0.0);
        r
    }

    #[test]
    fn zero_generator_keeps_state() {
        let gen = LindbladGenerator::from_matrix(Array2::zeros((3, 3)));
        let rho = one_phonon(3);
        let s = rk4_propagate(&gen, &rho, 1.0, 0.1, &[], &PropagationOptions::default()).unwrap();
        assert_eq!(s.final_state, rho);
    }

    #[test]
    fn damped_phonon_decays_exponentially() {
        let (omega, gamma) = (1.0, 0.05);
        let n = 6;
        let gen = LindbladGenerator::from_matrix(number(n).mapv(|z| z * omega))
            .with_dissipator_matrix(gamma, &annihilation(n))
            .unwrap();
        let dt = 1e-3 * 2.0 * std::f64::consts::PI;
        let obs = vec![("n_b".to_string(), number(n))];
        let opts = PropagationOptions { record_every: 500, ..Default::default() };
        let s = rk4_propagate(&gen, &one_phonon(n), 20.0, dt, &obs, &opts).unwrap();
        for (t, v) in s.t.iter().zip(&s.observables[0]) {
            assert!((v.re - (-2.0 * gamma * t).exp()).abs() < 1e-7);
        }
        assert!(s.max_trace_drift < 1e-10);
        assert_eq!(*s.t.last().unwrap(), 20.0);
        let csv = s.to_csv();
        assert!(csv.starts_with("t,trace,min_eig,n_b_re,n_b_im\n"));
    }

    #[test]
    fn bad_steps_rejected() {
        let gen = LindbladGenerator::from_matrix(Array2::zeros((2, 2)));
        let rho = one_phonon(2);
        let opts = PropagationOptions::default();
        assert!(rk4_propagate(&gen, &rho, 1.0, 0.0, &[], &opts).is_err());
        assert!(rk4_propagate(&gen, &rho, 0.01, 0.1, &[], &opts).is_err());
    }

    #[test]
    fn trace_guard_trips() {
        struct Leak;
        impl Liouvillian for Leak {
            fn dim(&self) -> usize {
                2
            }
            fn apply(&self, _t: f64, rho: &Array2<C64>) -> Array2<C64> {
                rho.mapv(|z| z * -0.5)
            }
        }
        let gen = Leak;
        let err = rk4_propagate(&gen, &one_phonon(2), 1.0, 0.01, &[], &PropagationOptions::default());
        assert!(matches!(err, Err(Error::TraceDrift { .. })));
    }
}
