//! Resonant sideband couplings extracted from the doubly rotating frame,
//! compared with the closed Laguerre forms, and the fidelity of the
//! resulting rotating-wave approximation.

use std::f64::consts::PI;
use std::fmt::Write as _;

use ndarray::{Array1, Array2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{
    annihilation, creation, displacement_factor, expm_matrix, mech_headroom, DisplacementMethod, HilbertSpace,
    OperatorMatrix,
};
use crate::hamiltonians::{h_cm, sideband_printed_coupling, ModelParams};
use crate::C64;

/// Quadrature points for Fourier extraction.
pub const QUADRATURE_POINTS: usize = 64;
/// Doubling the quadrature must move the result by less than this.
pub const QUADRATURE_TOL: f64 = 1e-12;
/// Above this displacement the sideband expansion is outside its regime.
pub const ALPHA_WARNING: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SidebandSpec {
    pub s: u32,
    /// Detuning sign, `δ_p = sign · s · ω_m`.
    pub sign: i32,
    pub alpha: f64,
}

impl SidebandSpec {
    pub fn new(s: u32, sign: i32, alpha: f64) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidArgument(format!("sideband sign {sign} must be ±1")));
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("alpha = {alpha} must be ≥ 0")));
        }
        Ok(SidebandSpec { s, sign, alpha })
    }

    pub fn from_params(p: &ModelParams) -> Result<Self> {
        Self::new(p.s, p.sideband_sign, p.alpha()?)
    }

    /// Fourier index whose phase cancels the drive detuning.
    pub fn resonant_index(&self) -> i64 {
        self.sign as i64 * self.s as i64
    }

    pub fn warning(&self) -> Option<String> {
        (self.alpha >= ALPHA_WARNING)
            .then(|| format!("alpha = {} is outside the small-displacement regime (< {ALPHA_WARNING})", self.alpha))
    }
}

fn trapezoid_component(n: usize, alpha: f64, k: i64, points: usize) -> Result<Array2<C64>> {
    let mut acc = Array2::<C64>::zeros((n, n));
    for j in 0..points {
        let theta = 2.0 * PI * j as f64 / points as f64;
        let d = displacement_factor(n, C64::from_polar(alpha, theta), DisplacementMethod::Expm)?;
        acc.scaled_add(C64::from_polar(1.0 / points as f64, -(k as f64) * theta), &d);
    }
    Ok(acc)
}

/// `(1/2π)∫ D(αe^{iθ}) e^{−ikθ} dθ` on an `n`-level ladder by trapezoidal
/// quadrature, checked against a doubled grid.
pub fn fourier_component_factor(n: usize, alpha: f64, k: i64) -> Result<Array2<C64>> {
    if k.unsigned_abs() as usize > n {
        return Err(Error::InvalidArgument(format!("|k| = {} exceeds {n} levels", k.abs())));
    }
    let coarse = trapezoid_component(n, alpha, k, QUADRATURE_POINTS)?;
    let fine = trapezoid_component(n, alpha, k, 2 * QUADRATURE_POINTS)?;
    let change = (&coarse - &fine).iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    if !(change < QUADRATURE_TOL) {
        return Err(Error::QuadratureNotConverged { points: QUADRATURE_POINTS, change });
    }
    Ok(fine)
}

/// Fourier component `k` of the mechanical displacement, embedded in
/// `space`.
pub fn displacement_fourier_component(space: HilbertSpace, alpha: f64, k: i64) -> Result<OperatorMatrix> {
    let c = fourier_component_factor(space.n_mech(), alpha, k)?;
    OperatorMatrix::from_factors(space, None, None, Some(&c))
}

/// Resonant component computed with mechanical headroom and cut back to
/// `n_mech` levels, so its entries match the untruncated operator.
fn resonant_component(n_mech: usize, spec: &SidebandSpec) -> Result<Array2<C64>> {
    let pad = mech_headroom(spec.alpha, n_mech);
    let big = fourier_component_factor(n_mech + pad, spec.alpha, spec.resonant_index())?;
    Ok(big.slice(ndarray::s![..n_mech, ..n_mech]).to_owned())
}

/// Magnitudes `(Ω/2)|C_{ij}|` of the resonant band, indexed by the lower
/// mechanical level `min(i, j)` and cut to the lowest `n_mech − buffer_mech`
/// levels.
pub fn band_couplings(n_mech: usize, spec: &SidebandSpec, pump: f64, buffer_mech: usize) -> Result<Vec<(usize, f64)>> {
    if buffer_mech >= n_mech {
        return Err(Error::InvalidArgument(format!("buffer {buffer_mech} ≥ {n_mech} levels")));
    }
    let c = resonant_component(n_mech, spec)?;
    let keep = n_mech - buffer_mech;
    let k = spec.resonant_index();
    let s = k.unsigned_abs() as usize;
    Ok((0..keep.saturating_sub(s))
        .map(|m| {
            let (i, j) = if k >= 0 { (m + s, m) } else { (m, m + s) };
            (m, pump / 2.0 * c[[i, j]].norm())
        })
        .collect())
}

fn check_consistent(p: &ModelParams, spec: &SidebandSpec) -> Result<()> {
    let alpha = p.alpha()?;
    if (alpha - spec.alpha).abs() > 1e-12 * alpha.max(1.0) {
        return Err(Error::InvalidArgument(format!("spec alpha {} differs from g/omega_m = {alpha}", spec.alpha)));
    }
    Ok(())
}

fn kerr_and_drive(p: &ModelParams, space: HilbertSpace, mech: &Array2<C64>) -> Result<OperatorMatrix> {
    let kerr = p.kerr()?;
    let nc = space.n_cavity();
    let kerr_cav = crate::fock::diagonal(nc, |n| C64::new(-kerr * (n * n) as f64, 0.0));
    let lower = OperatorMatrix::from_factors(space, None, Some(&annihilation(nc)), Some(mech))?
        .scale(C64::new(p.pump_strength / 2.0, 0.0));
    Ok(OperatorMatrix::from_factors(space, None, Some(&kerr_cav), None)? + lower.dagger() + lower)
}

/// Stationary part of the doubly rotating drive at `δ_p = sign · s · ω_m`:
/// `−(g²/ω_m) n_a² + (Ω/2)[a C + (a C)†]`.
pub fn h_sideband_fourier(p: &ModelParams, space: HilbertSpace, spec: &SidebandSpec) -> Result<OperatorMatrix> {
    if space.has_qubit() {
        return Err(Error::UnexpectedQubit);
    }
    check_consistent(p, spec)?;
    let c = resonant_component(space.n_mech(), spec)?;
    kerr_and_drive(p, space, &c)
}

/// One-period average of `H_cm(t)` minus the Fourier sideband Hamiltonian.
pub fn time_average_residual(p: &ModelParams, space: HilbertSpace, spec: &SidebandSpec, points: usize) -> Result<f64> {
    let tuned = p.at_sideband(spec.s, spec.sign);
    let period = 2.0 * PI / p.omega_m;
    let pad = mech_headroom(spec.alpha, space.n_mech());
    let work = space.with_headroom(0, pad);
    let mut avg = OperatorMatrix::zeros(work);
    for j in 0..points {
        let t = period * j as f64 / points as f64;
        avg = avg + h_cm(&tuned, work, t)?.scale(1.0 / points as f64);
    }
    let avg = avg.restrict_to(space)?;
    Ok(avg.max_abs_diff(&h_sideband_fourier(&tuned, space, spec)?))
}

/// Band offset `m − n` of the largest entry; `None` when the operator
/// vanishes to quadrature round-off.
fn band_offset(m: &Array2<C64>) -> Option<i64> {
    let mut best: Option<(i64, f64)> = None;
    for ((i, j), z) in m.indexed_iter() {
        let w = z.norm();
        if w > best.map_or(QUADRATURE_TOL, |b| b.1) {
            best = Some((i as i64 - j as i64, w));
        }
    }
    best.map(|b| b.0)
}

/// Printed-versus-Fourier comparison for one sideband.
#[derive(Debug, Clone, Serialize)]
pub struct BandComparison {
    pub s: u32,
    pub sign: i32,
    pub alpha: f64,
    /// Offset `m − n` of the mechanical operator paired with `a`.
    pub printed_offset: Option<i64>,
    pub fourier_offset: Option<i64>,
    pub orientation_match: bool,
    /// Max deviation of band-element magnitudes, after aligning orientation.
    pub magnitude_deviation: f64,
    /// Max signed deviation after aligning orientation (transpose if needed).
    pub signed_deviation: f64,
    pub buffer_mech: usize,
    pub warning: Option<String>,
}

/// Compare the `a`-side mechanical operators of the printed and Fourier
/// sideband Hamiltonians on the lowest `n_mech − buffer_mech` levels.
pub fn compare_sideband(n_mech: usize, spec: &SidebandSpec, buffer_mech: usize) -> Result<BandComparison> {
    if buffer_mech >= n_mech {
        return Err(Error::InvalidArgument(format!("buffer {buffer_mech} ≥ {n_mech} levels")));
    }
    let s = spec.s as usize;
    let scale = (-spec.alpha * spec.alpha / 2.0).exp();
    let printed = sideband_printed_coupling(n_mech, s, spec.alpha, spec.sign).mapv(|z| z * scale);
    let fourier = resonant_component(n_mech, spec)?;
    let printed_offset = band_offset(&printed);
    let fourier_offset = band_offset(&fourier);
    let orientation_match = printed_offset == fourier_offset;
    let aligned = if orientation_match { fourier.clone() } else { fourier.t().to_owned() };
    let keep = n_mech - buffer_mech;
    let (mut mag, mut signed) = (0.0_f64, 0.0_f64);
    for i in 0..keep {
        for j in 0..keep {
            let (a, b) = (printed[[i, j]], aligned[[i, j]]);
            mag = mag.max((a.norm() - b.norm()).abs());
            signed = signed.max((a - b).norm());
        }
    }
    Ok(BandComparison {
        s: spec.s,
        sign: spec.sign,
        alpha: spec.alpha,
        printed_offset,
        fourier_offset,
        orientation_match,
        magnitude_deviation: mag,
        signed_deviation: signed,
        buffer_mech,
        warning: spec.warning(),
    })
}

/// Fidelity between full and rotating-wave propagation.
#[derive(Debug, Clone, Serialize)]
pub struct FidelitySeries {
    pub t: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub min_fidelity: f64,
    pub max_norm_drift: f64,
    pub dt: f64,
}

impl FidelitySeries {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,fidelity\n");
        for (t, f) in self.t.iter().zip(&self.fidelity) {
            let _ = writeln!(out, "{t:.16e},{f:.16e}");
        }
        out
    }
}

/// `H_cm(t)ψ` with `ψ` reshaped to `(n_cav, n_mech)`, using
/// `D(αe^{iθ})_{mn} = D(α)_{mn} e^{i(m−n)θ}`.
struct CmAction {
    kerr: Array1<f64>,
    a: Array2<C64>,
    adag: Array2<C64>,
    d0: Array2<C64>,
    half_pump: f64,
    delta_p: f64,
    omega_m: f64,
}

impl CmAction {
    fn new(p: &ModelParams, space: HilbertSpace) -> Result<Self> {
        let kerr = p.kerr()?;
        let nc = space.n_cavity();
        Ok(CmAction {
            kerr: Array1::from_shape_fn(nc, |n| -kerr * (n * n) as f64),
            a: annihilation(nc),
            adag: creation(nc),
            d0: displacement_factor(space.n_mech(), C64::new(p.alpha()?, 0.0), DisplacementMethod::Expm)?,
            half_pump: p.pump_strength / 2.0,
            delta_p: p.delta_p(),
            omega_m: p.omega_m,
        })
    }

    fn apply(&self, t: f64, psi: &Array2<C64>) -> Array2<C64> {
        let theta = self.omega_m * t;
        let nm = self.d0.nrows();
        // e^{ikθ} for k = m − n ∈ (−nm, nm), indexed by k + nm − 1
        let unit = C64::from_polar(1.0, theta);
        let mut phase = vec![C64::new(1.0, 0.0); 2 * nm - 1];
        for k in 1..nm {
            phase[nm - 1 + k] = phase[nm - 2 + k] * unit;
            phase[nm - 1 - k] = phase[nm - 1 + k].conj();
        }
        let d = Array2::from_shape_fn((nm, nm), |(m, n)| self.d0[[m, n]] * phase[nm - 1 + m - n]);
        // (a ⊗ D) ψ = a Ψ Dᵀ, (a† ⊗ D†) ψ = a† Ψ D*
        let up = self.adag.dot(psi).dot(&d.mapv(|z| z.conj()));
        let down = self.a.dot(psi).dot(&d.t());
        let ph = C64::from_polar(self.half_pump, self.delta_p * t);
        let mut h = up.mapv(|z| z * ph) + down.mapv(|z| z * ph.conj());
        for i in 0..psi.nrows() {
            for j in 0..psi.ncols() {
                h[[i, j]] += psi[[i, j]] * self.kerr[i];
            }
        }
        h.mapv(|z| z * C64::new(0.0, -1.0))
    }
}

fn inner(a: &Array2<C64>, b: &Array2<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Propagate `ψ₀` under `H_cm(t)` (RK4) and under the time-independent
/// Fourier sideband Hamiltonian (exact exponential), returning
/// `F(t) = |⟨ψ_full|ψ_RWA⟩|²` every `record_every` steps.
pub fn rwa_fidelity(
    p: &ModelParams,
    space: HilbertSpace,
    spec: &SidebandSpec,
    psi0: &Array1<C64>,
    t_max: f64,
    dt: f64,
    record_every: usize,
) -> Result<FidelitySeries> {
    if space.has_qubit() {
        return Err(Error::UnexpectedQubit);
    }
    if psi0.len() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), actual: psi0.len() });
    }
    let norm = psi0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidState(format!("initial ket has norm {norm}")));
    }
    if !(dt > 0.0 && t_max >= dt && t_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 0 < dt ≤ t_max, got dt = {dt}, t_max = {t_max}")));
    }
    let tuned = p.at_sideband(spec.s, spec.sign);
    check_consistent(&tuned, spec)?;
    let steps = (t_max / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t_max / steps as f64;
    let record_every = record_every.max(1);

    let action = CmAction::new(&tuned, space)?;
    let h_rwa = h_sideband_fourier(&tuned, space, spec)?;
    let block = |n_steps: usize| expm_matrix(&h_rwa.data().mapv(|z| z * C64::new(0.0, -h * n_steps as f64)));
    let u_rec = block(record_every)?;
    let shape = (space.n_cavity(), space.n_mech());
    let to_mat = |v: &Array1<C64>| v.clone().into_shape_with_order(shape).expect("ket matches space");

    let mut full = to_mat(psi0);
    let mut rwa = psi0.clone();
    let mut series =
        FidelitySeries { t: vec![0.0], fidelity: vec![1.0], min_fidelity: 1.0, max_norm_drift: 0.0, dt: h };
    for step in 0..steps {
        let t = step as f64 * h;
        let k1 = action.apply(t, &full);
        let k2 = action.apply(t + h / 2.0, &(&full + &k1.mapv(|z| z * (h / 2.0))));
        let k3 = action.apply(t + h / 2.0, &(&full + &k2.mapv(|z| z * (h / 2.0))));
        let k4 = action.apply(t + h, &(&full + &k3.mapv(|z| z * h)));
        full.scaled_add(C64::new(h / 6.0, 0.0), &k1);
        full.scaled_add(C64::new(h / 3.0, 0.0), &k2);
        full.scaled_add(C64::new(h / 3.0, 0.0), &k3);
        full.scaled_add(C64::new(h / 6.0, 0.0), &k4);
        let t_next = (step + 1) as f64 * h;
        let drift = (inner(&full, &full).re.sqrt() - 1.0).abs();
        series.max_norm_drift = series.max_norm_drift.max(drift);
        if !(drift <= 1e-6) {
            return Err(Error::NormDrift { t: t_next, drift });
        }
        let done = step + 1;
        if done % record_every == 0 || done == steps {
            let chunk = if done % record_every == 0 { record_every } else { done % record_every };
            rwa = if chunk == record_every { u_rec.dot(&rwa) } else { block(chunk)?.dot(&rwa) };
            let f = inner(&full, &to_mat(&rwa)).norm_sqr();
            series.t.push(t_next);
            series.fidelity.push(f);
            series.min_fidelity = series.min_fidelity.min(f);
        }
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{laguerre, QuantumState};
    use crate::hamiltonians::h_sideband_printed;

    #[test]
    fn zeroth_component_of_identity() {
        let c = fourier_component_factor(6, 0.0, 0).unwrap();
        assert!((&c - &Array2::<C64>::eye(6)).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn zeroth_component_diagonal_is_laguerre() {
        let alpha: f64 = 0.4;
        let n = 12;
        let c = resonant_component(n, &SidebandSpec::new(0, 1, alpha).unwrap()).unwrap();
        for m in 0..n {
            let want = (-alpha * alpha / 2.0).exp() * laguerre(m, 0, alpha * alpha);
            assert!((c[[m, m]].re - want).abs() < 1e-9, "m = {m}");
        }
    }

    #[test]
    fn components_resum_to_displacement() {
        let (n, alpha) = (10, 0.7);
        let mut sum = Array2::<C64>::zeros((n, n));
        for k in -(n as i64)..=(n as i64) {
            sum = sum + fourier_component_factor(n, alpha, k).unwrap();
        }
        let d = displacement_factor(n, C64::new(alpha, 0.0), DisplacementMethod::Expm).unwrap();
        assert!((&sum - &d).iter().all(|z| z.norm() < 1e-9));
    }

    #[test]
    fn band_support() {
        let c = fourier_component_factor(8, 0.3, 1).unwrap();
        for ((i, j), z) in c.indexed_iter() {
            if i as i64 - j as i64 != 1 {
                assert!(z.norm() < 1e-15);
            }
        }
    }

    #[test]
    fn s0_printed_equals_fourier() {
        let space = HilbertSpace::optomechanical(4, 12).unwrap();
        for sign in [1, -1] {
            let p = ModelParams::default().at_sideband(0, sign);
            let spec = SidebandSpec::from_params(&p).unwrap();
            let a = h_sideband_fourier(&p, space, &spec).unwrap();
            let b = h_sideband_printed(&p, space).unwrap();
            assert!(crate::transforms::interior_deviation(&a, &b, 0, 0).unwrap() < 1e-9);
        }
    }

    #[test]
    fn fourier_sideband_is_hermitian_and_averages_hcm() {
        let space = HilbertSpace::optomechanical(3, 10).unwrap();
        let p = ModelParams::default().at_sideband(1, 1);
        let spec = SidebandSpec::from_params(&p).unwrap();
        assert!(h_sideband_fourier(&p, space, &spec).unwrap().hermiticity_defect() < 1e-12);
        assert!(time_average_residual(&p, space, &spec, 64).unwrap() < 1e-8);
    }

    #[test]
    fn no_pump_means_unit_fidelity() {
        let space = HilbertSpace::optomechanical(3, 6).unwrap();
        let p = ModelParams { pump_strength: 0.0, ..Default::default() }.at_sideband(1, 1);
        let spec = SidebandSpec::from_params(&p).unwrap();
        let psi = QuantumState::fock(space, None, 1, 0).unwrap();
        let f = rwa_fidelity(&p, space, &spec, psi.as_ket().unwrap(), 2.0 * PI, 0.01, 50).unwrap();
        assert!(f.fidelity.iter().all(|x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn cm_action_matches_matrix() {
        let space = HilbertSpace::optomechanical(3, 8).unwrap();
        let p = ModelParams { g: 0.3, ..Default::default() }.at_sideband(1, 1);
        let act = CmAction::new(&p, space).unwrap();
        let psi = Array2::from_shape_fn((3, 8), |(i, j)| C64::new(i as f64 + 0.5, j as f64 * 0.1));
        let t = 1.37;
        let got = act.apply(t, &psi);
        let h = h_cm(&p, space, t).unwrap();
        let flat = psi.clone().into_shape_with_order(24).unwrap();
        let want = h.apply(&flat).mapv(|z| z * C64::new(0.0, -1.0)).into_shape_with_order((3, 8)).unwrap();
        assert!((&got - &want).iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn spec_validation() {
        assert!(SidebandSpec::new(1, 0, 0.1).is_err());
        assert!(SidebandSpec::new(1, 1, -0.1).is_err());
        assert!(SidebandSpec::new(1, 1, 0.5).unwrap().warning().is_some());
        assert!(SidebandSpec::new(1, 1, 0.05).unwrap().warning().is_none());
    }
}
