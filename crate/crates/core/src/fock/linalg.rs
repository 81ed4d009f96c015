//! Small dense kernels not provided by `ndarray` itself.

use nalgebra::DMatrix;
use ndarray::{Array2, Axis};

use crate::error::{Error, Result};
use crate::C64;

/// Maximum absolute column sum.
pub fn norm1(a: &Array2<C64>) -> f64 {
    a.axis_iter(Axis(1)).map(|col| col.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Solve `A X = B` by LU factorization with partial pivoting.
pub fn solve(a: &Array2<C64>, b: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: b.nrows() });
    }
    let mut lu = a.to_owned();
    let mut x = b.to_owned();
    for k in 0..n {
        let (piv, best) =
            (k..n).map(|i| (i, lu[[i, k]].norm())).fold((k, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
        if best == 0.0 || !best.is_finite() {
            return Err(Error::InvalidArgument("singular matrix in linear solve".into()));
        }
        if piv != k {
            for j in 0..n {
                lu.swap([k, j], [piv, j]);
            }
            for j in 0..x.ncols() {
                x.swap([k, j], [piv, j]);
            }
        }
        let pivot = lu[[k, k]];
        for i in (k + 1)..n {
            let f = lu[[i, k]] / pivot;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            lu[[i, k]] = f;
            let (top, mut bottom) = lu.view_mut().split_at(Axis(0), i);
            let src = top.row(k);
            let mut dst = bottom.row_mut(0);
            for j in (k + 1)..n {
                dst[j] -= f * src[j];
            }
            let (xtop, mut xbot) = x.view_mut().split_at(Axis(0), i);
            let xsrc = xtop.row(k);
            let mut xdst = xbot.row_mut(0);
            xdst.scaled_add(-f, &xsrc);
        }
    }
    for k in (0..n).rev() {
        let pivot = lu[[k, k]];
        for j in 0..x.ncols() {
            let mut acc = x[[k, j]];
            for i in (k + 1)..n {
                acc -= lu[[k, i]] * x[[i, j]];
            }
            x[[k, j]] = acc / pivot;
        }
    }
    Ok(x)
}

fn nonzeros(a: &Array2<C64>) -> usize {
    a.iter().filter(|z| z.re != 0.0 || z.im != 0.0).count()
}

/// `A B`, skipping structural zeros when either factor is sparse.
///
/// Most operators here are Kronecker products of ladder matrices, so the
/// zero-skipping paths are the common case.
pub fn matmul(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (n, k, m) = (a.nrows(), a.ncols(), b.ncols());
    assert_eq!(k, b.nrows(), "inner dimensions differ");
    let cutoff = |rows: usize, cols: usize| rows * cols / 4;
    if n * k * m < 512 {
        return a.dot(b);
    }
    if nonzeros(a) <= cutoff(n, k) {
        return Csr::from_dense(a).left_mul(b);
    }
    if nonzeros(b) <= cutoff(k, m) {
        return Csr::from_dense(b).right_mul(a);
    }
    a.dot(b)
}

/// Compressed sparse rows, for operators applied many times.
#[derive(Debug, Clone)]
pub struct Csr {
    n_rows: usize,
    n_cols: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl Csr {
    pub fn from_dense(a: &Array2<C64>) -> Self {
        let mut row_start = Vec::with_capacity(a.nrows() + 1);
        let (mut cols, mut vals) = (Vec::new(), Vec::new());
        row_start.push(0);
        for row in a.rows() {
            for (j, z) in row.iter().enumerate() {
                if z.re != 0.0 || z.im != 0.0 {
                    cols.push(j);
                    vals.push(*z);
                }
            }
            row_start.push(cols.len());
        }
        Csr { n_rows: a.nrows(), n_cols: a.ncols(), row_start, cols, vals }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Fraction of stored entries.
    pub fn density(&self) -> f64 {
        self.nnz() as f64 / (self.n_rows * self.n_cols).max(1) as f64
    }

    /// `S X`
    pub fn left_mul(&self, x: &Array2<C64>) -> Array2<C64> {
        assert_eq!(self.n_cols, x.nrows(), "inner dimensions differ");
        let m = x.ncols();
        let xs = x.as_standard_layout();
        let xs = xs.as_slice().expect("standard layout");
        let mut out = vec![C64::new(0.0, 0.0); self.n_rows * m];
        for (i, dst) in out.chunks_exact_mut(m).enumerate() {
            for p in self.row_start[i]..self.row_start[i + 1] {
                let v = self.vals[p];
                let src = &xs[self.cols[p] * m..(self.cols[p] + 1) * m];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += v * s;
                }
            }
        }
        Array2::from_shape_vec((self.n_rows, m), out).expect("shape matches buffer")
    }

    /// `X S`
    pub fn right_mul(&self, x: &Array2<C64>) -> Array2<C64> {
        assert_eq!(x.ncols(), self.n_rows, "inner dimensions differ");
        let k = x.ncols();
        let xs = x.as_standard_layout();
        let xs = xs.as_slice().expect("standard layout");
        let mut out = vec![C64::new(0.0, 0.0); x.nrows() * self.n_cols];
        for (src, dst) in xs.chunks_exact(k).zip(out.chunks_exact_mut(self.n_cols)) {
            for (r, &xk) in src.iter().enumerate() {
                if xk.re == 0.0 && xk.im == 0.0 {
                    continue;
                }
                for p in self.row_start[r]..self.row_start[r + 1] {
                    dst[self.cols[p]] += xk * self.vals[p];
                }
            }
        }
        Array2::from_shape_vec((x.nrows(), self.n_cols), out).expect("shape matches buffer")
    }
}

/// Index sets of the irreducible diagonal blocks of `a`, i.e. the connected
/// components of its nonzero pattern, each sorted ascending.
pub fn connected_blocks(a: &Array2<C64>) -> Vec<Vec<usize>> {
    let n = a.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for ((i, j), z) in a.indexed_iter() {
        if i != j && (z.re != 0.0 || z.im != 0.0) {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

fn to_nalgebra(a: &Array2<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

/// Eigenvalues of the Hermitian part of `a`, ascending.
pub fn hermitian_eigenvalues(a: &Array2<C64>) -> Vec<f64> {
    let n = a.nrows();
    let herm = DMatrix::from_fn(n, n, |i, j| (a[[i, j]] + a[[j, i]].conj()) * 0.5);

    let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigen-decomposition of the Hermitian part of `a`: ascending eigenvalues
/// and the matching eigenvectors as columns.
pub fn hermitian_eigh(a: &Array2<C64>) -> (Vec<f64>, Array2<C64>) {
    let n = a.nrows();
    let m = to_nalgebra(a);
    let herm = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = Array2::from_shape_fn((n, n), |(r, c)| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

pub fn min_eigenvalue(a: &Array2<C64>) -> f64 {
    hermitian_eigenvalues(a).first().copied().unwrap_or(0.0)
}

/// `½ tr|ρ − σ|` for Hermitian arguments.
pub fn trace_distance(rho: &Array2<C64>, sigma: &Array2<C64>) -> f64 {
    let diff = rho - sigma;
    0.5 * hermitian_eigenvalues(&diff).iter().map(|x| x.abs()).sum::<f64>()
}
