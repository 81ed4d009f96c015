//! Generalized Laguerre polynomials and log-factorials.

/// `L_n^{(s)}(x)` by the three-term recurrence
/// `k L_k = (2k − 1 + s − x) L_{k−1} − (k − 1 + s) L_{k−2}`.
pub fn laguerre(n: usize, s: usize, x: f64) -> f64 {
    let s = s as f64;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + s - x;
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0 + s - x) * cur - (kf - 1.0 + s) * prev) / kf;
        prev = cur;
        cur = next;
    }
    cur
}

/// `ln n!`
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        assert_eq!(laguerre(0, 3, 7.5), 1.0);
        assert_eq!(laguerre(1, 0, 2.0), -1.0);
        assert!((laguerre(2, 1, 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn log_factorial_small() {
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-14);
    }
}
