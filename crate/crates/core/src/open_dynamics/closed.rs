//! Closed-system propagation under a static or time-dependent Hamiltonian.

use std::fmt::Write as _;

use ndarray::{Array1, Array2};

use super::generator::Liouvillian;
use crate::error::{Error, Result};
use crate::fock::linalg::Csr;
use crate::C64;

type HamiltonianFn<'a> = dyn Fn(f64) -> Result<Array2<C64>> + Sync + 'a;

/// Hamiltonian either fixed or evaluated on demand.
pub enum HamiltonianSource<'a> {
    Static(Array2<C64>),
    TimeDependent { dim: usize, eval: Box<HamiltonianFn<'a>> },
}

impl<'a> HamiltonianSource<'a> {
    pub fn time_dependent(dim: usize, eval: impl Fn(f64) -> Result<Array2<C64>> + Sync + 'a) -> Self {
        HamiltonianSource::TimeDependent { dim, eval: Box::new(eval) }
    }

    pub fn dim(&self) -> usize {
        match self {
            HamiltonianSource::Static(h) => h.nrows(),
            HamiltonianSource::TimeDependent { dim, .. } => *dim,
        }
    }

    fn at(&self, t: f64) -> Result<Evaluated<'_>> {
        match self {
            HamiltonianSource::Static(h) => Ok(Evaluated::Borrowed(h)),
            HamiltonianSource::TimeDependent { dim, eval } => {
                let h = eval(t)?;
                if h.nrows() != *dim || h.ncols() != *dim {
                    return Err(Error::DimensionMismatch { expected: *dim, actual: h.nrows() });
                }
                Ok(Evaluated::Owned(h))
            }
        }
    }
}

enum Evaluated<'a> {
    Borrowed(&'a Array2<C64>),
    Owned(Array2<C64>),
}

impl std::ops::Deref for Evaluated<'_> {
    type Target = Array2<C64>;

    fn deref(&self) -> &Array2<C64> {
        match self {
            Evaluated::Borrowed(h) => h,
            Evaluated::Owned(h) => h,
        }
    }
}

/// `𝓛(t)[ρ] = −i[H(t), ρ]`.
pub struct HamiltonianFlow<'a> {
    source: HamiltonianSource<'a>,
}

impl<'a> HamiltonianFlow<'a> {
    pub fn new(source: HamiltonianSource<'a>) -> Self {
        HamiltonianFlow { source }
    }
}

impl Liouvillian for HamiltonianFlow<'_> {
    fn dim(&self) -> usize {
        self.source.dim()
    }

    fn apply(&self, t: f64, rho: &Array2<C64>) -> Array2<C64> {
        // The trait is infallible; evaluation errors surface as NaN, which
        // the propagator's trace guard turns into an error.
        match self.source.at(t) {
            Ok(h) => {
                let h = Csr::from_dense(&h);
                (h.left_mul(rho) - h.right_mul(rho)).mapv(|z| z * C64::new(0.0, -1.0))
            }
            Err(_) => Array2::from_elem(rho.raw_dim(), C64::new(f64::NAN, f64::NAN)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct KetSeries {
    pub t: Vec<f64>,
    pub norm: Vec<f64>,
    pub observable_names: Vec<String>,
    pub observables: Vec<Vec<C64>>,
    pub final_state: Array1<C64>,
    pub dt: f64,
    pub max_norm_drift: f64,
}

impl KetSeries {
    /// CSV with columns `t, norm`, then `re`/`im` per observable.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,norm");
        for name in &self.observable_names {
            let _ = write!(out, ",{name}_re,{name}_im");
        }
        out.push('\n');
        for i in 0..self.t.len() {
            let _ = write!(out, "{:.16e},{:.16e}", self.t[i], self.norm[i]);
            for obs in &self.observables {
                let _ = write!(out, ",{:.16e},{:.16e}", obs[i].re, obs[i].im);
            }
            out.push('\n');
        }
        out
    }
}

fn apply_h(h: &Array2<C64>, psi: &Array1<C64>) -> Array1<C64> {
    h.dot(psi).mapv(|z| z * C64::new(0.0, -1.0))
}

fn norm(psi: &Array1<C64>) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Classical RK4 for `i dψ/dt = H(t) ψ` with the same step rule as
/// [`super::rk4_propagate`]. The state is not renormalized, so the norm
/// column measures the integrator's unitarity defect.
pub fn rk4_schrodinger(
    source: &HamiltonianSource<'_>,
    psi0: &Array1<C64>,
    t_max: f64,
    dt: f64,
    observables: &[(String, Array2<C64>)],
    record_every: usize,
    norm_guard: f64,
) -> Result<KetSeries> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt = {dt} must be > 0")));
    }
    if !(t_max >= dt && t_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_max = {t_max} must be ≥ dt = {dt}")));
    }
    let n = source.dim();
    if psi0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: psi0.len() });
    }
    for (_, op) in observables {
        if op.nrows() != n || op.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: op.nrows() });
        }
    }
    let steps = (t_max / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t_max / steps as f64;
    let record_every = record_every.max(1);
    let norm0 = norm(psi0);

    let mut series = KetSeries {
        t: Vec::new(),
        norm: Vec::new(),
        observable_names: observables.iter().map(|(name, _)| name.clone()).collect(),
        observables: vec![Vec::new(); observables.len()],
        final_state: psi0.clone(),
        dt: h,
        max_norm_drift: 0.0,
    };
    let record = |series: &mut KetSeries, t: f64, psi: &Array1<C64>| {
        series.t.push(t);
        series.norm.push(norm(psi));
        for (slot, (_, op)) in series.observables.iter_mut().zip(observables) {
            let v: C64 = psi.iter().zip(op.dot(psi).iter()).map(|(a, b)| a.conj() * b).sum();
            slot.push(v);
        }
    };

    let mut psi = psi0.clone();
    record(&mut series, 0.0, &psi);
    for step in 0..steps {
        let t = step as f64 * h;
        let h0 = source.at(t)?;
        let k1 = apply_h(&h0, &psi);
        drop(h0);
        let hm = source.at(t + h / 2.0)?;
        let k2 = apply_h(&hm, &(&psi + &k1.mapv(|z| z * (h / 2.0))));
        let k3 = apply_h(&hm, &(&psi + &k2.mapv(|z| z * (h / 2.0))));
        drop(hm);
        let k4 = apply_h(&*source.at(t + h)?, &(&psi + &k3.mapv(|z| z * h)));
        psi.scaled_add(C64::new(h / 6.0, 0.0), &k1);
        psi.scaled_add(C64::new(h / 3.0, 0.0), &k2);
        psi.scaled_add(C64::new(h / 3.0, 0.0), &k3);
        psi.scaled_add(C64::new(h / 6.0, 0.0), &k4);

        let t_next = (step + 1) as f64 * h;
        let drift = (norm(&psi) - norm0).abs();
        series.max_norm_drift = series.max_norm_drift.max(drift);
        if !(drift <= norm_guard) {
            return Err(Error::NormDrift { t: t_next, drift });
        }
        if (step + 1) % record_every == 0 || step + 1 == steps {
            record(&mut series, t_next, &psi);
        }
    }
    series.final_state = psi;
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::number;
    use crate::open_dynamics::{rk4_propagate, PropagationOptions};

    #[test]
    fn number_state_only_picks_up_phase() {
        let h = number(5).mapv(|z| z * 0.7);
        let mut psi = Array1::zeros(5);
        psi[3] = C64::new(1.0, 0.0);
        let src = HamiltonianSource::Static(h);
        let s = rk4_schrodinger(&src, &psi, 3.0, 1e-3, &[], 10, 1e-6).unwrap();
        let expected = C64::from_polar(1.0, -0.7 * 3.0 * 3.0);
        assert!((s.final_state[3] - expected).norm() < 1e-9);
        assert!(s.max_norm_drift < 1e-10);
    }

    #[test]
    fn flow_matches_ket_dynamics() {
        // two-level Rabi problem with a time-dependent drive
        let src = HamiltonianSource::time_dependent(2, |t| {
            let c = C64::new((1.3 * t).cos(), 0.0);
            Ok(Array2::from_shape_vec((2, 2), vec![C64::new(0.5, 0.0), c, c, C64::new(-0.5, 0.0)]).unwrap())
        });
        let mut psi = Array1::zeros(2);
        psi[0] = C64::new(1.0, 0.0);
        let ket = rk4_schrodinger(&src, &psi, 4.0, 1e-3, &[], 1000, 1e-6).unwrap();
        let rho0 = Array2::from_shape_fn((2, 2), |(i, j)| psi[i] * psi[j].conj());
        let flow = HamiltonianFlow::new(src);
        let opts = PropagationOptions { record_every: 1000, ..Default::default() };
        let dm = rk4_propagate(&flow, &rho0, 4.0, 1e-3, &[], &opts).unwrap();
        let k = &ket.final_state;
        for i in 0..2 {
            for j in 0..2 {
                assert!((dm.final_state[[i, j]] - k[i] * k[j].conj()).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn evaluation_errors_propagate() {
        let src = HamiltonianSource::time_dependent(2, |_| Err(Error::InvalidArgument("boom".into())));
        let psi = Array1::from_elem(2, C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
        assert!(rk4_schrodinger(&src, &psi, 1.0, 0.1, &[], 1, 1e-6).is_err());
    }
}
