use ndarray::{linalg::kron, Array1, Array2};

use super::displacement::{displacement_factor, DisplacementMethod};
use super::factors::diagonal;
use super::linalg::min_eigenvalue;
use super::operator::OperatorMatrix;
use super::space::{HilbertSpace, Subsystem};
use crate::error::{Error, Result};
use crate::C64;

pub const KET_NORM_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const MIN_EIGENVALUE_TOL: f64 = -1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum StateData {
    Ket(Array1<C64>),
    Density(Array2<C64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    space: HilbertSpace,
    data: StateData,
}

impl QuantumState {
    /// Validated ket.
    pub fn ket(space: HilbertSpace, psi: Array1<C64>) -> Result<Self> {
        if psi.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), actual: psi.len() });
        }
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > KET_NORM_TOL {
            return Err(Error::InvalidState(format!("ket norm {norm} differs from 1")));
        }
        Ok(QuantumState { space, data: StateData::Ket(psi) })
    }

    /// Validated density matrix.
    pub fn density(space: HilbertSpace, rho: Array2<C64>) -> Result<Self> {
        let d = space.dim();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: rho.nrows() });
        }
        let st = QuantumState { space, data: StateData::Density(rho) };
        st.check_density()?;
        Ok(st)
    }

    fn check_density(&self) -> Result<()> {
        let rho = match &self.data {
            StateData::Density(r) => r,
            StateData::Ket(_) => return Ok(()),
        };
        let tr = rho.diag().sum();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let op = OperatorMatrix::new(self.space, rho.clone())?;
        let h = op.hermiticity_defect();
        if h > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("Hermiticity defect {h:e}")));
        }
        let lo = min_eigenvalue(rho);
        if lo < MIN_EIGENVALUE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {lo:e}")));
        }
        Ok(())
    }

    /// Product basis ket `|q⟩ ⊗ |c⟩ ⊗ |m⟩`; `qubit` must be given exactly
    /// when the space has a qubit (0 = `|e⟩`, 1 = `|g⟩`).
    pub fn fock(space: HilbertSpace, qubit: Option<usize>, cav: usize, mech: usize) -> Result<Self> {
        let q = match (space.has_qubit(), qubit) {
            (true, Some(q)) if q < 2 => q,
            (true, Some(q)) => return Err(Error::InvalidArgument(format!("qubit index {q} out of range"))),
            (true, None) => return Err(Error::InvalidArgument("qubit index required".into())),
            (false, Some(_)) => return Err(Error::UnexpectedQubit),
            (false, None) => 0,
        };
        if cav >= space.n_cavity() {
            return Err(Error::InvalidArgument(format!("cavity index {cav} out of range")));
        }
        if mech >= space.n_mech() {
            return Err(Error::InvalidArgument(format!("mechanical index {mech} out of range")));
        }
        let mut psi = Array1::zeros(space.dim());
        psi[space.index(q, cav, mech)] = C64::new(1.0, 0.0);
        Ok(QuantumState { space, data: StateData::Ket(psi) })
    }

    /// `D(α)|0⟩` on `mode`, ground state elsewhere (qubit in `|g⟩`).
    pub fn coherent(space: HilbertSpace, alpha: C64, mode: Subsystem) -> Result<Self> {
        let n = space.factor_dim(mode)?;
        if mode == Subsystem::Qubit {
            return Err(Error::InvalidArgument("coherent states live on a bosonic mode".into()));
        }
        let d = displacement_factor(n, alpha, DisplacementMethod::Expm)?;
        let col = d.column(0).to_owned();
        let vac = |k: usize| {
            let mut v = Array1::zeros(k);
            v[0] = C64::new(1.0, 0.0);
            v
        };
        let (cav, mech) = match mode {
            Subsystem::Cavity => (col, vac(space.n_mech())),
            _ => (vac(space.n_cavity()), col),
        };
        let mut psi = kron_vec(&cav, &mech);
        if space.has_qubit() {
            let mut g = Array1::zeros(2);
            g[super::factors::qubit::GROUND] = C64::new(1.0, 0.0);
            psi = kron_vec(&g, &psi);
        }
        Ok(QuantumState { space, data: StateData::Ket(psi) })
    }

    /// Thermal state on `mode` with geometric weights renormalized over the
    /// kept levels, ground state elsewhere.
    pub fn thermal(space: HilbertSpace, nbar: f64, mode: Subsystem) -> Result<Self> {
        let n = space.factor_dim(mode)?;
        let t = thermal_factor(n, nbar)?;
        let rho = match mode {
            Subsystem::Cavity => product_density(space, None, Some(&t), None)?,
            Subsystem::Mech => product_density(space, None, None, Some(&t))?,
            Subsystem::Qubit => return Err(Error::InvalidArgument("thermal state needs a bosonic mode".into())),
        };
        Ok(QuantumState { space, data: StateData::Density(rho) })
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn data(&self) -> &StateData {
        &self.data
    }

    pub fn is_ket(&self) -> bool {
        matches!(self.data, StateData::Ket(_))
    }

    pub fn as_ket(&self) -> Option<&Array1<C64>> {
        match &self.data {
            StateData::Ket(k) => Some(k),
            StateData::Density(_) => None,
        }
    }

    pub fn to_density(&self) -> Array2<C64> {
        match &self.data {
            StateData::Density(r) => r.clone(),
            StateData::Ket(k) => {
                let n = k.len();
                Array2::from_shape_fn((n, n), |(i, j)| k[i] * k[j].conj())
            }
        }
    }

    pub fn expectation(&self, op: &OperatorMatrix) -> C64 {
        match &self.data {
            StateData::Ket(k) => k.iter().zip(op.data().dot(k).iter()).map(|(a, b)| a.conj() * b).sum(),
            StateData::Density(r) => r.dot(op.data()).diag().sum(),
        }
    }
}

/// Geometric weights `n̄^k / (1 + n̄)^{k+1}` before renormalization.
pub fn thermal_weights(n: usize, nbar: f64) -> Vec<f64> {
    let ratio = nbar / (1.0 + nbar);
    (0..n).map(|k| ratio.powi(k as i32) / (1.0 + nbar)).collect()
}

/// Renormalized thermal density matrix on a single `n`-level factor.
pub fn thermal_factor(n: usize, nbar: f64) -> Result<Array2<C64>> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::InvalidArgument(format!("nbar = {nbar} must be finite and ≥ 0")));
    }
    let w = thermal_weights(n, nbar);
    let total: f64 = w.iter().sum();
    Ok(diagonal(n, |k| C64::new(w[k] / total, 0.0)))
}

fn kron_vec(a: &Array1<C64>, b: &Array1<C64>) -> Array1<C64> {
    let mut out = Array1::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

/// `ρ_q ⊗ ρ_c ⊗ ρ_m` with ground-state defaults for missing factors
/// (qubit `|g⟩`, bosonic modes `|0⟩`).
pub fn product_density(
    space: HilbertSpace,
    qubit: Option<&Array2<C64>>,
    cavity: Option<&Array2<C64>>,
    mech: Option<&Array2<C64>>,
) -> Result<Array2<C64>> {
    let ground = |n: usize, level: usize| diagonal(n, |i| C64::new(if i == level { 1.0 } else { 0.0 }, 0.0));
    let pick = |m: Option<&Array2<C64>>, n: usize, level: usize| -> Result<Array2<C64>> {
        match m {
            Some(m) if m.nrows() != n || m.ncols() != n => {
                Err(Error::DimensionMismatch { expected: n, actual: m.nrows() })
            }
            Some(m) => Ok(m.clone()),
            None => Ok(ground(n, level)),
        }
    };
    let mut rho = kron(&pick(cavity, space.n_cavity(), 0)?, &pick(mech, space.n_mech(), 0)?);
    if space.has_qubit() {
        rho = kron(&pick(qubit, 2, super::factors::qubit::GROUND)?, &rho);
    } else if qubit.is_some() {
        return Err(Error::NoQubit);
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> HilbertSpace {
        HilbertSpace::optomechanical(6, 5).unwrap()
    }

    #[test]
    fn zero_temperature_is_vacuum() {
        let t = thermal_factor(5, 0.0).unwrap();
        assert_eq!(t[[0, 0]].re, 1.0);
        assert!(t.iter().skip(1).all(|z| z.norm() == 0.0));
    }

    #[test]
    fn thermal_weights_at_unit_occupation() {
        let w = thermal_weights(4, 1.0);
        assert_eq!(w, vec![0.5, 0.25, 0.125, 0.0625]);
    }

    #[test]
    fn fock_index_validation() {
        assert!(QuantumState::fock(space(), None, 6, 0).is_err());
        assert!(QuantumState::fock(space(), Some(0), 0, 0).is_err());
        assert!(QuantumState::fock(space(), None, 5, 4).is_ok());
    }

    #[test]
    fn density_rejects_bad_trace() {
        let rho = Array2::<C64>::eye(space().dim());
        assert!(QuantumState::density(space(), rho).is_err());
    }

    #[test]
    fn ket_rejects_unnormalized() {
        let psi = Array1::from_elem(space().dim(), C64::new(1.0, 0.0));
        assert!(QuantumState::ket(space(), psi).is_err());
    }
}
