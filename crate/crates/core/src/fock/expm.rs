//! Matrix exponential by scaling and squaring around a diagonal Padé core.

use ndarray::Array2;

use super::linalg::{connected_blocks, norm1, solve};
use super::operator::OperatorMatrix;
use crate::error::{Error, Result};
use crate::C64;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] =
    [17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// 1-norm bounds below which each Padé degree meets unit roundoff.
#[allow(clippy::excessive_precision)]
const THETA: [(usize, f64); 4] =
    [(3, 1.495585217958292e-2), (5, 2.539398330063230e-1), (7, 9.504178996162932e-1), (9, 2.097847961257068e0)];
const THETA13: f64 = 5.371920351148152;

const MAX_SQUARINGS: i32 = 1000;

fn lin(terms: &[(f64, &Array2<C64>)], n: usize) -> Array2<C64> {
    let mut out = Array2::<C64>::zeros((n, n));
    for &(c, m) in terms {
        out.scaled_add(C64::new(c, 0.0), m);
    }
    out
}

fn pade_low(a: &Array2<C64>, b: &[f64]) -> (Array2<C64>, Array2<C64>) {
    let n = a.nrows();
    let eye = Array2::<C64>::eye(n);
    let a2 = a.dot(a);
    let mut powers = vec![eye.clone(), a2.clone()];
    while powers.len() * 2 < b.len() {
        let next = powers.last().unwrap().dot(&a2);
        powers.push(next);
    }
    let mut u = Array2::<C64>::zeros((n, n));
    let mut v = Array2::<C64>::zeros((n, n));
    for (k, p) in powers.iter().enumerate() {
        if 2 * k + 1 < b.len() {
            u.scaled_add(C64::new(b[2 * k + 1], 0.0), p);
        }
        v.scaled_add(C64::new(b[2 * k], 0.0), p);
    }
    (a.dot(&u), v)
}

fn pade13(a: &Array2<C64>) -> (Array2<C64>, Array2<C64>) {
    let n = a.nrows();
    let b = &B13;
    let eye = Array2::<C64>::eye(n);
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let inner_u = lin(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], n);
    let u = a6.dot(&inner_u) + lin(&[(b[7], &a6), (b[5], &a4), (b[3], &a2), (b[1], &eye)], n);
    let u = a.dot(&u);
    let inner_v = lin(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], n);
    let v = a6.dot(&inner_v) + lin(&[(b[6], &a6), (b[4], &a4), (b[2], &a2), (b[0], &eye)], n);
    (u, v)
}

/// `e^A` for a dense square matrix.
pub fn expm_matrix(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: a.ncols() });
    }
    if !a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidArgument("non-finite entry in matrix exponential input".into()));
    }
    let norm = norm1(a);
    if !norm.is_finite() {
        return Err(Error::Overflow(format!("input 1-norm {norm} is not finite")));
    }

    let mut squarings = 0i32;
    let (u, v) = if let Some(&(deg, _)) = THETA.iter().find(|(_, th)| norm <= *th) {
        let b: &[f64] = match deg {
            3 => &B3,
            5 => &B5,
            7 => &B7,
            _ => &B9,
        };
        pade_low(a, b)
    } else {
        squarings = (norm / THETA13).log2().ceil().max(0.0) as i32;
        if squarings > MAX_SQUARINGS {
            return Err(Error::Overflow(format!("input 1-norm {norm:e} needs {squarings} squarings")));
        }
        let scaled = a.mapv(|z| z / 2f64.powi(squarings));
        pade13(&scaled)
    };

    let mut r = solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..squarings {
        r = r.dot(&r);
    }
    if !r.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Overflow(format!("result not finite for input 1-norm {norm:e}")));
    }
    Ok(r)
}

/// `e^A` for an operator; the result lives on the same space.
pub fn expm(op: &OperatorMatrix) -> Result<OperatorMatrix> {
    OperatorMatrix::new(op.space(), expm_blocked(op.data())?)
}

/// `e^A` computed block by block over the connected components of the
/// nonzero pattern of `A`. Exact zeros outside the blocks stay zero.
pub fn expm_blocked(a: &Array2<C64>) -> Result<Array2<C64>> {
    let blocks = connected_blocks(a);
    if blocks.len() <= 1 {
        return expm_matrix(a);
    }
    let n = a.nrows();
    let mut out = Array2::<C64>::zeros((n, n));
    for idx in blocks {
        let k = idx.len();
        let sub = Array2::from_shape_fn((k, k), |(i, j)| a[[idx[i], idx[j]]]);
        let e = expm_matrix(&sub)?;
        for (i, &gi) in idx.iter().enumerate() {
            for (j, &gj) in idx.iter().enumerate() {
                out[[gi, gj]] = e[[i, j]];
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn zero_gives_identity() {
        let z = Array2::<C64>::zeros((4, 4));
        assert_eq!(expm_matrix(&z).unwrap(), Array2::eye(4));
    }

    #[test]
    fn diagonal_input() {
        for scale in [1e-3, 0.1, 1.0, 3.0, 40.0] {
            let d = array![[C64::new(scale, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(0.0, -scale)]];
            let e = expm_matrix(&d).unwrap();
            assert!((e[[0, 0]] - C64::new(scale.exp(), 0.0)).norm() / scale.exp() < 1e-13);
            assert!((e[[1, 1]] - C64::new(0.0, -scale).exp()).norm() < 1e-12);
        }
    }

    #[test]
    fn nilpotent_input_is_exact() {
        let n = array![[C64::new(0.0, 0.0), C64::new(2.0, 0.0)], [C64::new(0.0, 0.0), C64::new(0.0, 0.0)]];
        let e = expm_matrix(&n).unwrap();
        assert!((e[[0, 1]] - C64::new(2.0, 0.0)).norm() < 1e-14);
        assert!((e[[0, 0]] - C64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn reports_overflow() {
        let big = array![[C64::new(1e308, 0.0), C64::new(1e308, 0.0)], [C64::new(1e308, 0.0), C64::new(1e308, 0.0)]];
        assert!(matches!(expm_matrix(&big), Err(Error::Overflow(_))));
        let nan = array![[C64::new(f64::NAN, 0.0)]];
        assert!(expm_matrix(&nan).is_err());
        let huge = array![[C64::new(800.0, 0.0)]];
        assert!(matches!(expm_matrix(&huge), Err(Error::Overflow(_))));
    }
}
