//! Single-factor matrices and their embeddings into the composite space.

use ndarray::Array2;

use super::operator::OperatorMatrix;
use super::space::{HilbertSpace, Subsystem};
use crate::error::{Error, Result};
use crate::C64;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Truncated annihilation operator, `a|n⟩ = √n |n−1⟩`.
pub fn annihilation(n: usize) -> Array2<C64> {
    let mut a = Array2::zeros((n, n));
    for k in 1..n {
        a[[k - 1, k]] = re((k as f64).sqrt());
    }
    a
}

pub fn creation(n: usize) -> Array2<C64> {
    annihilation(n).t().to_owned()
}

pub fn number(n: usize) -> Array2<C64> {
    diagonal(n, |k| re(k as f64))
}

pub fn diagonal(n: usize, f: impl Fn(usize) -> C64) -> Array2<C64> {
    let mut d = Array2::zeros((n, n));
    for k in 0..n {
        d[[k, k]] = f(k);
    }
    d
}

/// Susskind-Glogower lowering `V|n⟩ = |n−1⟩`, `V|0⟩ = 0`.
pub fn sg_lowering(n: usize) -> Array2<C64> {
    let mut v = Array2::zeros((n, n));
    for k in 1..n {
        v[[k - 1, k]] = re(1.0);
    }
    v
}

/// Qubit basis: index 0 is `|e⟩`, index 1 is `|g⟩`.
pub mod qubit {
    use super::*;

    pub const EXCITED: usize = 0;
    pub const GROUND: usize = 1;

    pub fn sigma_z() -> Array2<C64> {
        diagonal(2, |k| if k == EXCITED { re(1.0) } else { re(-1.0) })
    }

    /// `σ₊ = |e⟩⟨g|`.
    pub fn sigma_plus() -> Array2<C64> {
        let mut s = Array2::zeros((2, 2));
        s[[EXCITED, GROUND]] = re(1.0);
        s
    }

    pub fn sigma_minus() -> Array2<C64> {
        sigma_plus().t().to_owned()
    }

    pub fn sigma_x() -> Array2<C64> {
        sigma_plus() + sigma_minus()
    }

    pub fn sigma_y() -> Array2<C64> {
        (sigma_plus() - sigma_minus()).mapv(|z| z * C64::new(0.0, -1.0))
    }

    pub fn projector(level: usize) -> Array2<C64> {
        diagonal(2, |k| if k == level { re(1.0) } else { re(0.0) })
    }
}

/// Tensor-embed a single-factor operator into `space`.
pub fn embed(op: &Array2<C64>, which: Subsystem, space: HilbertSpace) -> Result<OperatorMatrix> {
    let n = space.factor_dim(which)?;
    if op.nrows() != n || op.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: op.nrows().max(op.ncols()) });
    }
    match which {
        Subsystem::Qubit => OperatorMatrix::from_factors(space, Some(op), None, None),
        Subsystem::Cavity => OperatorMatrix::from_factors(space, None, Some(op), None),
        Subsystem::Mech => OperatorMatrix::from_factors(space, None, None, Some(op)),
    }
}

/// `f(n̂)` for the number operator of `which`, evaluated on its eigenvalues.
pub fn number_function(space: HilbertSpace, which: Subsystem, f: impl Fn(usize) -> C64) -> Result<OperatorMatrix> {
    let n = space.factor_dim(which)?;
    embed(&diagonal(n, f), which, space)
}

#[derive(Debug, Clone)]
pub struct Ladder {
    pub a: OperatorMatrix,
    pub adag: OperatorMatrix,
    pub b: OperatorMatrix,
    pub bdag: OperatorMatrix,
    pub n_a: OperatorMatrix,
    pub n_b: OperatorMatrix,
}

impl Ladder {
    /// `b + b†`
    pub fn x_b(&self) -> OperatorMatrix {
        &self.b + &self.bdag
    }
}

pub fn ladder_operators(space: HilbertSpace) -> Ladder {
    let nc = space.n_cavity();
    let nm = space.n_mech();
    let emb = |m: &Array2<C64>, w| embed(m, w, space).expect("factor sizes come from the space");
    let a = emb(&annihilation(nc), Subsystem::Cavity);
    let b = emb(&annihilation(nm), Subsystem::Mech);
    Ladder {
        adag: a.dagger(),
        bdag: b.dagger(),
        n_a: emb(&number(nc), Subsystem::Cavity),
        n_b: emb(&number(nm), Subsystem::Mech),
        a,
        b,
    }
}

#[derive(Debug, Clone)]
pub struct Pauli {
    pub sz: OperatorMatrix,
    pub sx: OperatorMatrix,
    pub sy: OperatorMatrix,
    pub sp: OperatorMatrix,
    pub sm: OperatorMatrix,
}

pub fn pauli_operators(space: HilbertSpace) -> Result<Pauli> {
    let emb = |m: Array2<C64>| embed(&m, Subsystem::Qubit, space);
    Ok(Pauli {
        sz: emb(qubit::sigma_z())?,
        sx: emb(qubit::sigma_x())?,
        sy: emb(qubit::sigma_y())?,
        sp: emb(qubit::sigma_plus())?,
        sm: emb(qubit::sigma_minus())?,
    })
}

#[derive(Debug, Clone)]
pub struct SusskindGlogower {
    pub v: OperatorMatrix,
    pub vdag: OperatorMatrix,
}

pub fn susskind_glogower(space: HilbertSpace) -> SusskindGlogower {
    let v = embed(&sg_lowering(space.n_cavity()), Subsystem::Cavity, space).expect("cavity factor always present");
    SusskindGlogower { vdag: v.dagger(), v }
}
