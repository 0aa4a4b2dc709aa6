//! Lawson-Hanson active-set solver for `min ||A x - b||` subject to `x >= 0`.

use nalgebra::{DMatrix, DVector};

fn least_squares_on(a: &DMatrix<f64>, b: &DVector<f64>, cols: &[usize]) -> DVector<f64> {
    let sub = DMatrix::from_fn(a.nrows(), cols.len(), |i, j| a[(i, cols[j])]);
    sub.svd(true, true)
        .solve(b, 1e-14)
        .unwrap_or_else(|_| DVector::zeros(cols.len()))
}

/// Nonnegative least squares. Returns the solution, which has at most
/// `A.nrows()` positive entries in exact arithmetic.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let scale = a.amax() * b.amax().max(1e-300) * a.nrows() as f64;
    let tol = 1e-13 * scale;
    let max_outer = 3 * n.max(1) + 30;

    for _ in 0..max_outer {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n)
            .filter(|j| !passive[*j])
            .max_by(|i, j| w[*i].partial_cmp(&w[*j]).unwrap_or(std::cmp::Ordering::Equal));
        let Some(t) = candidate else { break };
        if w[t] <= tol {
            break;
        }
        passive[t] = true;
        loop {
            let cols: Vec<usize> = (0..n).filter(|j| passive[*j]).collect();
            let z = least_squares_on(a, b, &cols);
            if z.iter().all(|v| *v > 0.0) {
                x.fill(0.0);
                for (k, j) in cols.iter().enumerate() {
                    x[*j] = z[k];
                }
                break;
            }
            // step back towards x until the first passive entry hits zero
            let mut alpha = f64::INFINITY;
            for (k, j) in cols.iter().enumerate() {
                if z[k] <= 0.0 {
                    let denom = x[*j] - z[k];
                    if denom > 0.0 {
                        alpha = alpha.min(x[*j] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (k, j) in cols.iter().enumerate() {
                x[*j] += alpha * (z[k] - x[*j]);
            }
            for j in cols {
                if x[j] <= 1e-15 * x.amax().max(1e-300) {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
            if !passive.iter().any(|p| *p) {
                break;
            }
        }
    }
    x
}
