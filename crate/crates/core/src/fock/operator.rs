use std::ops::{Add, Mul, Neg, Sub};

use ndarray::{linalg::kron, Array1, Array2};

use super::space::HilbertSpace;
use crate::error::{Error, Result};
use crate::C64;

/// Dense complex operator on a [`HilbertSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    space: HilbertSpace,
    data: Array2<C64>,
}

impl OperatorMatrix {
    pub fn new(space: HilbertSpace, data: Array2<C64>) -> Result<Self> {
        let d = space.dim();
        if data.nrows() != d || data.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: data.nrows().max(data.ncols()) });
        }
        Ok(OperatorMatrix { space, data })
    }

    pub fn zeros(space: HilbertSpace) -> Self {
        let d = space.dim();
        OperatorMatrix { space, data: Array2::zeros((d, d)) }
    }

    pub fn identity(space: HilbertSpace) -> Self {
        let d = space.dim();
        OperatorMatrix { space, data: Array2::eye(d) }
    }

    /// Diagonal operator whose entry at `(q, c, m)` is `f(q, c, m)`.
    pub fn diagonal_fn(space: HilbertSpace, f: impl Fn(usize, usize, usize) -> C64) -> Self {
        let d = space.dim();
        let mut data = Array2::zeros((d, d));
        for i in 0..d {
            let (q, c, m) = space.decompose(i);
            data[[i, i]] = f(q, c, m);
        }
        OperatorMatrix { space, data }
    }

    /// Kronecker product of per-factor matrices; `None` stands for identity.
    pub fn from_factors(
        space: HilbertSpace,
        qubit: Option<&Array2<C64>>,
        cavity: Option<&Array2<C64>>,
        mech: Option<&Array2<C64>>,
    ) -> Result<Self> {
        if qubit.is_some() && !space.has_qubit() {
            return Err(Error::NoQubit);
        }
        let check = |m: Option<&Array2<C64>>, n: usize| -> Result<Array2<C64>> {
            match m {
                Some(m) if m.nrows() != n || m.ncols() != n => {
                    Err(Error::DimensionMismatch { expected: n, actual: m.nrows().max(m.ncols()) })
                }
                Some(m) => Ok(m.clone()),
                None => Ok(Array2::eye(n)),
            }
        };
        let cav = check(cavity, space.n_cavity())?;
        let mec = check(mech, space.n_mech())?;
        let mut data = kron(&cav, &mec);
        if space.has_qubit() {
            data = kron(&check(qubit, 2)?, &data);
        }
        Ok(OperatorMatrix { space, data })
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn data(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut Array2<C64> {
        &mut self.data
    }

    pub fn into_data(self) -> Array2<C64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[[row, col]]
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        OperatorMatrix { space: self.space, data: self.data.t().mapv(|z| z.conj()) }
    }

    pub fn scale(&self, c: impl Into<C64>) -> Self {
        let c = c.into();
        OperatorMatrix { space: self.space, data: self.data.mapv(|z| z * c) }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn trace(&self) -> C64 {
        self.data.diag().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// ‖M − M†‖ in the max-entry norm.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[[i, j]] - self.data[[j, i]].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() < tol
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn apply(&self, v: &Array1<C64>) -> Array1<C64> {
        self.data.dot(v)
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, k: u32) -> Self {
        let mut out = OperatorMatrix::identity(self.space);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// The block of `self` on the low-excitation corner `target ⊂ self.space`.
    pub fn restrict_to(&self, target: HilbertSpace) -> Result<Self> {
        if !self.space.contains(&target) {
            return Err(Error::InvalidSpace(format!("{target:?} is not a corner of {:?}", self.space)));
        }
        let d = target.dim();
        let map: Vec<usize> = (0..d)
            .map(|i| {
                let (q, c, m) = target.decompose(i);
                self.space.index(q, c, m)
            })
            .collect();
        let data = Array2::from_shape_fn((d, d), |(i, j)| self.data[[map[i], map[j]]]);
        Ok(OperatorMatrix { space: target, data })
    }

    /// Entrywise maximum deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.space, other.space, "operator spaces differ");
        self.data.iter().zip(other.data.iter()).fold(0.0, |acc, (a, b)| acc.max((a - b).norm()))
    }
}

impl Mul<&OperatorMatrix> for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.space, rhs.space, "operator spaces differ");
        OperatorMatrix { space: self.space, data: super::linalg::matmul(&self.data, &rhs.data) }
    }
}

impl Mul<OperatorMatrix> for OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: OperatorMatrix) -> OperatorMatrix {
        &self * &rhs
    }
}

macro_rules! elementwise_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&OperatorMatrix> for &OperatorMatrix {
            type Output = OperatorMatrix;

            fn $method(self, rhs: &OperatorMatrix) -> OperatorMatrix {
                assert_eq!(self.space, rhs.space, "operator spaces differ");
                OperatorMatrix { space: self.space, data: &self.data $op &rhs.data }
            }
        }

        impl $trait<OperatorMatrix> for OperatorMatrix {
            type Output = OperatorMatrix;

            fn $method(mut self, rhs: OperatorMatrix) -> OperatorMatrix {
                assert_eq!(self.space, rhs.space, "operator spaces differ");
                self.data = self.data $op rhs.data;
                self
            }
        }
    };
}

elementwise_op!(Add, add, +);
elementwise_op!(Sub, sub, -);

impl Neg for OperatorMatrix {
    type Output = OperatorMatrix;

    fn neg(mut self) -> OperatorMatrix {
        self.data.mapv_inplace(|z| -z);
        self
    }
}

impl Mul<f64> for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: f64) -> OperatorMatrix {
        self.scale(rhs)
    }
}

impl Mul<C64> for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: C64) -> OperatorMatrix {
        self.scale(rhs)
    }
}

impl Mul<f64> for OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(mut self, rhs: f64) -> OperatorMatrix {
        self.data.mapv_inplace(|z| z * rhs);
        self
    }
}

impl Mul<C64> for OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(mut self, rhs: C64) -> OperatorMatrix {
        self.data.mapv_inplace(|z| z * rhs);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> HilbertSpace {
        HilbertSpace::hybrid(3, 4).unwrap()
    }

    #[test]
    fn restrict_selects_corner() {
        let big = space().with_headroom(2, 3);
        let op = OperatorMatrix::diagonal_fn(big, |q, c, m| C64::new((q * 100 + c * 10 + m) as f64, 0.0));
        let small = op.restrict_to(space()).unwrap();
        for i in 0..space().dim() {
            let (q, c, m) = space().decompose(i);
            assert_eq!(small.get(i, i).re, (q * 100 + c * 10 + m) as f64);
        }
    }

    #[test]
    fn new_checks_dimension() {
        assert!(OperatorMatrix::new(space(), Array2::zeros((3, 3))).is_err());
    }

    #[test]
    fn qubit_factor_rejected_without_qubit() {
        let s = HilbertSpace::optomechanical(3, 3).unwrap();
        let q = Array2::<C64>::eye(2);
        assert!(OperatorMatrix::from_factors(s, Some(&q), None, None).is_err());
    }
}
