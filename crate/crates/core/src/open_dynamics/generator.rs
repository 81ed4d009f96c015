use ndarray::Array2;

use crate::error::{Error, Result};
use crate::fock::linalg::Csr;
use crate::fock::OperatorMatrix;
use crate::C64;

/// An operator stored for repeated products with dense `ρ`.
#[derive(Debug, Clone)]
enum Factor {
    Sparse(Csr),
    Dense(Array2<C64>),
}

impl Factor {
    fn new(a: &Array2<C64>) -> Self {
        let s = Csr::from_dense(a);
        if s.density() <= 0.25 {
            Factor::Sparse(s)
        } else {
            Factor::Dense(a.clone())
        }
    }

    fn left(&self, x: &Array2<C64>) -> Array2<C64> {
        match self {
            Factor::Sparse(s) => s.left_mul(x),
            Factor::Dense(a) => a.dot(x),
        }
    }

    fn right(&self, x: &Array2<C64>) -> Array2<C64> {
        match self {
            Factor::Sparse(s) => s.right_mul(x),
            Factor::Dense(a) => x.dot(a),
        }
    }
}

/// Right-hand side of a linear master equation `dρ/dt = 𝓛(t)[ρ]`.
pub trait Liouvillian: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, t: f64, rho: &Array2<C64>) -> Array2<C64>;
}

/// `coeff · (2 A ρ B† − B†A ρ − ρ B†A)`.
///
/// With `A = B` and real `coeff` this is the usual dissipator; distinct
/// `A`, `B` give the cross terms produced by displacing a jump operator.
#[derive(Debug, Clone)]
pub struct CrossTerm {
    pub tag: String,
    pub coeff: C64,
    dim: usize,
    a: Factor,
    b_dag: Factor,
    bda: Factor,
}

impl CrossTerm {
    pub fn new(tag: impl Into<String>, coeff: C64, a: &OperatorMatrix, b: &OperatorMatrix) -> Self {
        Self::from_matrices(tag, coeff, a.data(), b.data())
    }

    pub fn from_matrices(tag: impl Into<String>, coeff: C64, a: &Array2<C64>, b: &Array2<C64>) -> Self {
        assert_eq!(a.dim(), b.dim(), "cross-term operators differ in shape");
        let b_dag = b.t().mapv(|z| z.conj());
        let bda = b_dag.dot(a);
        CrossTerm {
            tag: tag.into(),
            coeff,
            dim: a.nrows(),
            a: Factor::new(a),
            b_dag: Factor::new(&b_dag),
            bda: Factor::new(&bda),
        }
    }

    fn accumulate(&self, rho: &Array2<C64>, out: &mut Array2<C64>) {
        let jump = self.b_dag.right(&self.a.left(rho));
        let anti = self.bda.left(rho) + self.bda.right(rho);
        out.scaled_add(self.coeff * 2.0, &jump);
        out.scaled_add(-self.coeff, &anti);
    }
}

/// `−i[H, ρ] + Σ rate·𝓛_J[ρ] + extra terms`.
#[derive(Debug, Clone)]
pub struct LindbladGenerator {
    dim: usize,
    hamiltonian: Array2<C64>,
    h_factor: Factor,
    dissipators: Vec<(f64, CrossTerm)>,
    extra_terms: Vec<CrossTerm>,
}

impl LindbladGenerator {
    pub fn new(hamiltonian: &OperatorMatrix) -> Self {
        Self::from_matrix(hamiltonian.data().clone())
    }

    /// Generator on a bare matrix space, e.g. a single mode.
    pub fn from_matrix(hamiltonian: Array2<C64>) -> Self {
        assert!(hamiltonian.is_square(), "Hamiltonian must be square");
        LindbladGenerator {
            dim: hamiltonian.nrows(),
            h_factor: Factor::new(&hamiltonian),
            hamiltonian,
            dissipators: Vec::new(),
            extra_terms: Vec::new(),
        }
    }

    pub fn with_dissipator(self, rate: f64, jump: &OperatorMatrix) -> Result<Self> {
        self.with_dissipator_matrix(rate, jump.data())
    }

    pub fn with_dissipator_matrix(mut self, rate: f64, jump: &Array2<C64>) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidArgument(format!("dissipation rate {rate} must be finite and ≥ 0")));
        }
        self.check_dim(jump.nrows())?;
        let term = CrossTerm::from_matrices("L", C64::new(1.0, 0.0), jump, jump);
        self.dissipators.push((rate, term));
        Ok(self)
    }

    pub fn with_extra_term(mut self, term: CrossTerm) -> Result<Self> {
        self.check_dim(term.dim)?;
        self.extra_terms.push(term);
        Ok(self)
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: n });
        }
        Ok(())
    }

    pub fn hamiltonian(&self) -> &Array2<C64> {
        &self.hamiltonian
    }

    pub fn dissipator_rates(&self) -> Vec<f64> {
        self.dissipators.iter().map(|(r, _)| *r).collect()
    }

    pub fn extra_terms(&self) -> &[CrossTerm] {
        &self.extra_terms
    }

    fn action(&self, rho: &Array2<C64>) -> Array2<C64> {
        let hr = self.h_factor.left(rho);
        let rh = self.h_factor.right(rho);
        let mut out = (hr - rh).mapv(|z| z * C64::new(0.0, -1.0));
        for (rate, term) in &self.dissipators {
            if *rate != 0.0 {
                let mut part = Array2::zeros(out.raw_dim());
                term.accumulate(rho, &mut part);
                out.scaled_add(C64::new(*rate, 0.0), &part);
            }
        }
        for term in &self.extra_terms {
            term.accumulate(rho, &mut out);
        }
        out
    }
}

impl Liouvillian for LindbladGenerator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, _t: f64, rho: &Array2<C64>) -> Array2<C64> {
        self.action(rho)
    }
}

/// Apply `gen` to `rho`.
pub fn lindblad_apply(gen: &LindbladGenerator, rho: &Array2<C64>) -> Result<Array2<C64>> {
    if rho.nrows() != gen.dim || rho.ncols() != gen.dim {
        return Err(Error::DimensionMismatch { expected: gen.dim, actual: rho.nrows() });
    }
    Ok(gen.action(rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::annihilation;

    fn ket_bra(n: usize, i: usize) -> Array2<C64> {
        let mut m = Array2::zeros((n, n));
        m[[i, i]] = C64::new(1.0, 0.0);
        m
    }

    #[test]
    fn empty_generator_is_zero() {
        let gen = LindbladGenerator::from_matrix(Array2::zeros((3, 3)));
        let out = lindblad_apply(&gen, &ket_bra(3, 1)).unwrap();
        assert!(out.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn damping_of_one_phonon() {
        let gamma = 0.3;
        let gen = LindbladGenerator::from_matrix(Array2::zeros((4, 4)))
            .with_dissipator_matrix(gamma, &annihilation(4))
            .unwrap();
        let out = lindblad_apply(&gen, &ket_bra(4, 1)).unwrap();
        let expect = (ket_bra(4, 0) - ket_bra(4, 1)).mapv(|z| z * 2.0 * gamma);
        assert!((&out - &expect).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn rejects_bad_inputs() {
        let gen = LindbladGenerator::from_matrix(Array2::zeros((3, 3)));
        assert!(lindblad_apply(&gen, &ket_bra(4, 0)).is_err());
        assert!(gen.clone().with_dissipator_matrix(-1.0, &annihilation(3)).is_err());
        assert!(gen.with_dissipator_matrix(1.0, &annihilation(4)).is_err());
    }
}
