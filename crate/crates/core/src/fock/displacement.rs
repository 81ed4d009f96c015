//! Displacement operators `D(ξ) = exp(ξ b† − ξ* b)` on a truncated ladder.

use ndarray::Array2;

use super::expm::expm_matrix;
use super::factors::{annihilation, embed};
use super::operator::OperatorMatrix;
use super::space::{HilbertSpace, Subsystem};
use super::special::{laguerre, ln_factorial};
use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisplacementMethod {
    /// Exponential of the truncated generator; exactly unitary on the
    /// truncated ladder.
    Expm,
    /// Closed-form Fock matrix elements; exact entries of the untruncated
    /// operator restricted to the kept levels.
    Laguerre,
}

/// `D(ξ)` on a single `n`-level ladder.
pub fn displacement_factor(n: usize, xi: C64, method: DisplacementMethod) -> Result<Array2<C64>> {
    if !(xi.re.is_finite() && xi.im.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite displacement {xi}")));
    }
    match method {
        DisplacementMethod::Expm => {
            let b = annihilation(n);
            let bdag = b.t().to_owned();
            let gen = bdag.mapv(|z| z * xi) - b.mapv(|z| z * xi.conj());
            expm_matrix(&gen)
        }
        DisplacementMethod::Laguerre => Ok(laguerre_elements(n, xi)),
    }
}

fn laguerre_elements(n: usize, xi: C64) -> Array2<C64> {
    if xi.norm() == 0.0 {
        return Array2::eye(n);
    }
    let x = xi.norm_sqr();
    let ln_r = xi.norm().ln();
    let lnf: Vec<f64> = (0..n).map(ln_factorial).collect();
    let up = xi / xi.norm();
    let down = -xi.conj() / xi.norm();
    Array2::from_shape_fn((n, n), |(m, k)| {
        // ⟨m|D|k⟩, the lower index sets the Laguerre degree
        let (lo, hi, phase) = if m >= k { (k, m, up) } else { (m, k, down) };
        let d = hi - lo;
        let mag = (0.5 * (lnf[lo] - lnf[hi]) + d as f64 * ln_r - 0.5 * x).exp();
        phase.powu(d as u32) * (mag * laguerre(lo, d, x))
    })
}

/// `D(α)` acting on the cavity or mechanical mode of `space`.
pub fn displacement(
    space: HilbertSpace,
    alpha: C64,
    mode: Subsystem,
    method: DisplacementMethod,
) -> Result<OperatorMatrix> {
    if mode == Subsystem::Qubit {
        return Err(Error::InvalidArgument("displacement acts on a bosonic mode".into()));
    }
    let n = space.factor_dim(mode)?;
    embed(&displacement_factor(n, alpha, method)?, mode, space)
}

/// Photon-number conditioned displacement `D_b(ξ (n̂_a − offset))`.
///
/// Block-diagonal in cavity photon number: the block with `k` photons is the
/// mechanical displacement by `ξ (k − offset)`.
pub fn displacement_conditioned(space: HilbertSpace, xi_coeff: C64, offset: f64) -> Result<OperatorMatrix> {
    displacement_conditioned_with(space, xi_coeff, offset, DisplacementMethod::Expm)
}

pub fn displacement_conditioned_with(
    space: HilbertSpace,
    xi_coeff: C64,
    offset: f64,
    method: DisplacementMethod,
) -> Result<OperatorMatrix> {
    let nm = space.n_mech();
    let mut out = OperatorMatrix::zeros(space);
    for k in 0..space.n_cavity() {
        let block = displacement_factor(nm, xi_coeff * (k as f64 - offset), method)?;
        for q in 0..space.n_qubit() {
            let base = space.index(q, k, 0);
            out.data_mut().slice_mut(ndarray::s![base..base + nm, base..base + nm]).assign(&block);
        }
    }
    Ok(out)
}

/// Mechanical headroom for which displacements of size up to `max_shift`
/// applied to the lowest `n_mech` levels stay clear of the truncation edge
/// to double precision.
pub fn mech_headroom(max_shift: f64, n_mech: usize) -> usize {
    let r = max_shift.abs();
    (12.0 + 4.0 * r * (n_mech as f64).sqrt() + 4.0 * r * r).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_displacement_is_identity() {
        for method in [DisplacementMethod::Expm, DisplacementMethod::Laguerre] {
            let d = displacement_factor(6, C64::new(0.0, 0.0), method).unwrap();
            assert!((d - Array2::<C64>::eye(6)).iter().all(|z| z.norm() < 1e-15));
        }
    }

    #[test]
    fn vacuum_overlap() {
        let d = displacement_factor(30, C64::new(1.0, 0.0), DisplacementMethod::Laguerre).unwrap();
        assert!((d[[0, 0]].re - 0.60653066).abs() < 1e-8);
        let e = displacement_factor(30, C64::new(1.0, 0.0), DisplacementMethod::Expm).unwrap();
        assert!((e[[0, 0]] - d[[0, 0]]).norm() < 1e-12);
    }

    #[test]
    fn qubit_mode_rejected() {
        let s = HilbertSpace::hybrid(3, 3).unwrap();
        assert!(displacement(s, C64::new(0.1, 0.0), Subsystem::Qubit, DisplacementMethod::Expm).is_err());
    }
}
