//! Unitary and right-unitary transformations, rotating frames and
//! truncation-aware identity checks.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::fock::{expm, qubit, sg_lowering, HilbertSpace, OperatorMatrix};
use crate::report::DeviationReport;
use crate::C64;

/// `U† H U`
pub fn conjugate(u: &OperatorMatrix, h: &OperatorMatrix) -> OperatorMatrix {
    &(&u.dagger() * h) * u
}

/// Generator `G` of a rotating frame `U(t) = exp(−i G t)`.
#[derive(Debug, Clone)]
pub struct FrameGenerator {
    generator: OperatorMatrix,
    diagonal: bool,
}

impl FrameGenerator {
    pub fn new(generator: OperatorMatrix) -> Result<Self> {
        if !generator.is_hermitian(1e-12) {
            return Err(Error::InvalidArgument("frame generator must be Hermitian".into()));
        }
        let d = generator.data();
        let diagonal = d.indexed_iter().all(|((i, j), z)| i == j || *z == C64::new(0.0, 0.0));
        Ok(FrameGenerator { generator, diagonal })
    }

    pub fn generator(&self) -> &OperatorMatrix {
        &self.generator
    }

    /// `exp(−i G t)`, entrywise for diagonal generators.
    pub fn unitary(&self, t: f64) -> Result<OperatorMatrix> {
        if self.diagonal {
            let g = self.generator.data();
            let space = self.generator.space();
            let n = g.nrows();
            let mut u = Array2::<C64>::zeros((n, n));
            for i in 0..n {
                u[[i, i]] = C64::from_polar(1.0, -g[[i, i]].re * t);
            }
            OperatorMatrix::new(space, u)
        } else {
            expm(&self.generator.scale(C64::new(0.0, -t)))
        }
    }
}

/// `U†(t)(H − G)U(t)`, the generator of `ψ' = U† ψ` for `U = e^{−iGt}`.
pub fn rotating_frame_residual(frame: &FrameGenerator, h: &OperatorMatrix, t: f64) -> Result<OperatorMatrix> {
    let u = frame.unitary(t)?;
    Ok(conjugate(&u, &(h.clone() - frame.generator.clone())))
}

/// `exp(−i θ σ_y)` on the qubit factor.
pub fn ry_rotation(theta: f64, space: HilbertSpace) -> Result<OperatorMatrix> {
    if !space.has_qubit() {
        return Err(Error::NoQubit);
    }
    let (c, s) = (theta.cos(), theta.sin());
    // −iσ_y = [[0, −1], [1, 0]] in the (|e⟩, |g⟩) basis
    let mut r = Array2::<C64>::zeros((2, 2));
    r[[0, 0]] = C64::new(c, 0.0);
    r[[1, 1]] = C64::new(c, 0.0);
    r[[0, 1]] = C64::new(-s, 0.0);
    r[[1, 0]] = C64::new(s, 0.0);
    debug_assert!({
        let sy = qubit::sigma_y();
        let g = sy.mapv(|z| z * C64::new(0.0, -theta));
        let e = crate::fock::expm_matrix(&g).unwrap();
        (&e - &r).iter().all(|z| z.norm() < 1e-12)
    });
    OperatorMatrix::from_factors(space, Some(&r), None, None)
}

/// A right-unitary `T` (`T T† = 1`, `T† T = 1 − P`) with its projector.
#[derive(Debug, Clone)]
pub struct RightUnitaryPair {
    pub t: OperatorMatrix,
    pub t_dag: OperatorMatrix,
    /// Projector onto the kernel of `T`.
    pub kernel: OperatorMatrix,
}

impl RightUnitaryPair {
    /// `T X T†`
    pub fn forward(&self, x: &OperatorMatrix) -> OperatorMatrix {
        &(&self.t * x) * &self.t_dag
    }

    /// `T T† − 1` and `T† T − (1 − P)`, as maximum entry deviations.
    pub fn defects(&self) -> (f64, f64) {
        let id = OperatorMatrix::identity(self.t.space());
        let left = (&self.t * &self.t_dag).max_abs_diff(&id);
        let right = (&self.t_dag * &self.t).max_abs_diff(&(id - self.kernel.clone()));
        (left, right)
    }
}

/// `T = |e⟩⟨e| ⊗ V + |g⟩⟨g| ⊗ 1` with `V` the Susskind-Glogower lowering
/// operator. The kernel is `|e, 0⟩⟨e, 0| ⊗ 1_b`.
///
/// On a truncated cavity `V V† = 1 − |N−1⟩⟨N−1|`, so `T T† = 1` holds only
/// away from the top photon level.
pub fn right_unitary_t(space: HilbertSpace) -> Result<RightUnitaryPair> {
    if !space.has_qubit() {
        return Err(Error::NoQubit);
    }
    let n = space.n_cavity();
    let pe = qubit::projector(qubit::EXCITED);
    let pg = qubit::projector(qubit::GROUND);
    let v = sg_lowering(n);
    let t = OperatorMatrix::from_factors(space, Some(&pe), Some(&v), None)?
        + OperatorMatrix::from_factors(space, Some(&pg), None, None)?;
    let mut vac = Array2::<C64>::zeros((n, n));
    vac[[0, 0]] = C64::new(1.0, 0.0);
    let kernel = OperatorMatrix::from_factors(space, Some(&pe), Some(&vac), None)?;
    let t_dag = t.dagger();
    Ok(RightUnitaryPair { t, t_dag, kernel })
}

/// Basis indices whose cavity and mechanical levels are clear of the
/// truncation edge by the given buffers.
pub fn interior_indices(space: HilbertSpace, buffer_cav: usize, buffer_mech: usize) -> Result<Vec<usize>> {
    if buffer_cav >= space.n_cavity() || buffer_mech >= space.n_mech() {
        return Err(Error::InvalidArgument(format!(
            "buffers ({buffer_cav}, {buffer_mech}) leave no interior in {space:?}"
        )));
    }
    let (nc, nm) = (space.n_cavity() - buffer_cav, space.n_mech() - buffer_mech);
    Ok((0..space.dim())
        .filter(|&i| {
            let (_, c, m) = space.decompose(i);
            c < nc && m < nm
        })
        .collect())
}

/// Maximum entrywise deviation between `lhs` and `rhs` on the buffered
/// interior block.
pub fn interior_deviation(
    lhs: &OperatorMatrix,
    rhs: &OperatorMatrix,
    buffer_cav: usize,
    buffer_mech: usize,
) -> Result<f64> {
    if lhs.space() != rhs.space() {
        return Err(Error::InvalidSpace(format!("{:?} vs {:?}", lhs.space(), rhs.space())));
    }
    let idx = interior_indices(lhs.space(), buffer_cav, buffer_mech)?;
    let (a, b) = (lhs.data(), rhs.data());
    let mut worst = 0.0_f64;
    for &i in &idx {
        for &j in &idx {
            let d = (a[[i, j]] - b[[i, j]]).norm();
            if d.is_nan() {
                return Ok(f64::NAN);
            }
            worst = worst.max(d);
        }
    }
    Ok(worst)
}

/// Compare two operators on the buffered interior.
pub fn verify_identity(
    label: &str,
    lhs: &OperatorMatrix,
    rhs: &OperatorMatrix,
    buffer_cav: usize,
    buffer_mech: usize,
    tol: f64,
) -> Result<DeviationReport> {
    let dev = interior_deviation(lhs, rhs, buffer_cav, buffer_mech)?;
    Ok(DeviationReport::new(label, dev, tol).with_buffers(buffer_cav, buffer_mech))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{ladder_operators, pauli_operators};

    #[test]
    fn ry_maps_sigma_z_to_sigma_x() {
        let space = HilbertSpace::hybrid(3, 2).unwrap();
        let p = pauli_operators(space).unwrap();
        let r = ry_rotation(std::f64::consts::FRAC_PI_4, space).unwrap();
        let rd = r.dagger();
        assert!(conjugate(&rd, &p.sz).max_abs_diff(&p.sx) < 1e-15);
        assert!(conjugate(&rd, &p.sx).max_abs_diff(&(-p.sz.clone())) < 1e-15);
    }

    #[test]
    fn right_unitary_relations() {
        let space = HilbertSpace::hybrid(6, 3).unwrap();
        let tp = right_unitary_t(space).unwrap();
        let (_, right) = tp.defects();
        assert_eq!(right, 0.0);
        let id = OperatorMatrix::identity(space);
        let tt = &tp.t * &tp.t_dag;
        assert_eq!(interior_deviation(&tt, &id, 1, 0).unwrap(), 0.0);
        assert!(interior_deviation(&tt, &id, 0, 0).unwrap() > 0.5);
    }

    #[test]
    fn diagonal_frame_matches_expm() {
        let space = HilbertSpace::optomechanical(4, 3).unwrap();
        let l = ladder_operators(space);
        let g = l.n_a.scale(1.3) + l.n_b.scale(0.4);
        let f = FrameGenerator::new(g.clone()).unwrap();
        let u = f.unitary(0.7).unwrap();
        let e = expm(&g.scale(C64::new(0.0, -0.7))).unwrap();
        assert!(u.max_abs_diff(&e) < 1e-13);
    }

    #[test]
    fn frame_of_generator_itself_vanishes() {
        let space = HilbertSpace::optomechanical(3, 3).unwrap();
        let l = ladder_operators(space);
        let f = FrameGenerator::new(l.n_a.clone()).unwrap();
        let r = rotating_frame_residual(&f, &l.n_a, 2.0).unwrap();
        assert!(r.max_abs() < 1e-15);
    }

    #[test]
    fn buffer_must_leave_interior() {
        let space = HilbertSpace::optomechanical(3, 3).unwrap();
        let id = OperatorMatrix::identity(space);
        assert!(verify_identity("x", &id, &id, 3, 0, 1e-9).is_err());
        assert!(verify_identity("x", &id, &id, 2, 2, 1e-9).unwrap().passed);
    }
}
