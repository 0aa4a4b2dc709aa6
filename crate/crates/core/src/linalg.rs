//! Dense linear algebra helpers tuned for alternant-type matrices.
//!
//! Alternants mix columns such as `x^0` and `x^7` whose magnitudes differ by
//! many orders, so every routine here equilibrates rows and columns before
//! factorizing and undoes the scaling afterwards.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Reciprocal condition number below which a square system is treated as singular.
pub const SINGULAR_RCOND: f64 = 1e-14;

fn row_scales(m: &DMatrix<f64>) -> Vec<f64> {
    m.row_iter()
        .map(|r| r.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())))
        .collect()
}

fn col_scales(m: &DMatrix<f64>) -> Vec<f64> {
    m.column_iter()
        .map(|c| c.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())))
        .collect()
}

/// Scales rows then columns to unit max-norm. Returns the scaled matrix and the
/// factors, or `None` if some row or column is exactly zero.
fn equilibrate(m: &DMatrix<f64>) -> Option<(DMatrix<f64>, Vec<f64>, Vec<f64>)> {
    let rs = row_scales(m);
    if rs.iter().any(|s| *s == 0.0 || !s.is_finite()) {
        return None;
    }
    let mut scaled = m.clone();
    for (i, s) in rs.iter().enumerate() {
        scaled.row_mut(i).scale_mut(1.0 / s);
    }
    let cs = col_scales(&scaled);
    if cs.contains(&0.0) {
        return None;
    }
    for (j, s) in cs.iter().enumerate() {
        scaled.column_mut(j).scale_mut(1.0 / s);
    }
    Some((scaled, rs, cs))
}

/// True when some row or column consists of exact zeros.
pub fn has_structural_zero(m: &DMatrix<f64>) -> bool {
    row_scales(m).contains(&0.0) || col_scales(m).contains(&0.0)
}

/// Determinant as `(sign, ln|det|)`; sign is 0 for a singular matrix.
pub fn log_determinant(m: &DMatrix<f64>) -> (f64, f64) {
    assert!(m.is_square(), "determinant of a non-square matrix");
    if m.nrows() == 0 {
        return (1.0, 0.0);
    }
    let Some((scaled, rs, cs)) = equilibrate(m) else {
        return (0.0, f64::NEG_INFINITY);
    };
    let det = scaled.lu().determinant();
    if det == 0.0 || !det.is_finite() {
        return (0.0, f64::NEG_INFINITY);
    }
    let log_scale: f64 = rs.iter().chain(cs.iter()).map(|s| s.ln()).sum();
    (det.signum(), det.abs().ln() + log_scale)
}

/// Determinant via equilibrated LU with partial pivoting.
pub fn determinant(m: &DMatrix<f64>) -> f64 {
    let (sign, log_abs) = log_determinant(m);
    if sign == 0.0 {
        0.0
    } else {
        sign * log_abs.exp()
    }
}

fn singular_values(m: &DMatrix<f64>) -> DVector<f64> {
    m.clone().svd(false, false).singular_values
}

/// `sigma_min / sigma_max` of the row- and column-equilibrated matrix; 0 when a
/// row or column is identically zero.
pub fn reciprocal_condition(m: &DMatrix<f64>) -> f64 {
    assert!(m.is_square(), "condition of a non-square matrix");
    if m.nrows() == 0 {
        return 1.0;
    }
    let Some((scaled, _, _)) = equilibrate(m) else {
        return 0.0;
    };
    let sv = singular_values(&scaled);
    let max = sv.max();
    if max == 0.0 || !max.is_finite() {
        return 0.0;
    }
    sv.min() / max
}

/// Solves `m x = rhs`, rejecting numerically singular systems.
pub fn solve(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    if !m.is_square() || m.nrows() != rhs.len() {
        return Err(Error::Shape(format!(
            "system is {}x{} with a right-hand side of length {}",
            m.nrows(),
            m.ncols(),
            rhs.len()
        )));
    }
    let rcond = reciprocal_condition(m);
    if rcond < SINGULAR_RCOND {
        return Err(Error::SingularSystem(format!(
            "reciprocal condition number {rcond:e}"
        )));
    }
    let (scaled, rs, cs) = equilibrate(m).expect("nonsingular matrix has no zero row");
    let b = DVector::from_iterator(rhs.len(), rhs.iter().zip(&rs).map(|(v, s)| v / s));
    let y = scaled
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::SingularSystem("LU factorization broke down".into()))?;
    Ok(DVector::from_iterator(
        y.len(),
        y.iter().zip(&cs).map(|(v, s)| v / s),
    ))
}

/// Signed cofactors of a free first row placed above the `k x (k+1)` matrix
/// `rows`: entry `i` is `(-1)^i det(rows without column i)`. The polynomial
/// `sum_i cof_i f_i(x)` equals the determinant with first row `(f_i(x))_i`.
pub fn first_row_cofactors(rows: &DMatrix<f64>) -> Vec<f64> {
    let k = rows.nrows();
    let cols = rows.ncols();
    assert_eq!(cols, k + 1, "cofactor expansion needs one more column than rows");
    (0..cols)
        .map(|i| {
            let minor = rows.clone().remove_column(i);
            let d = determinant(&minor);
            if i % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

/// Unit null vector of a `k x (k+1)` matrix together with the reciprocal
/// condition of its equilibrated row space (small when the rows are nearly
/// dependent and the null space is not one-dimensional). The vector is
/// expressed in the original (unscaled) coordinates.
pub fn null_vector(rows: &DMatrix<f64>) -> Option<(DVector<f64>, f64)> {
    let k = rows.nrows();
    let cols = rows.ncols();
    assert_eq!(cols, k + 1, "null vector needs one more column than rows");
    if k == 0 {
        return Some((DVector::from_element(1, 1.0), 1.0));
    }
    let rs = row_scales(rows);
    if rs.iter().any(|s| *s == 0.0 || !s.is_finite()) {
        return None;
    }
    let mut scaled = rows.clone();
    for (i, s) in rs.iter().enumerate() {
        scaled.row_mut(i).scale_mut(1.0 / s);
    }
    let cs: Vec<f64> = col_scales(&scaled)
        .into_iter()
        .map(|s| if s == 0.0 { 1.0 } else { s })
        .collect();
    for (j, s) in cs.iter().enumerate() {
        scaled.column_mut(j).scale_mut(1.0 / s);
    }
    // pad with a zero row so the SVD returns a full right basis
    let square = scaled.insert_row(k, 0.0);
    let svd = square.svd(false, true);
    let v_t = svd.v_t?;
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|a, b| sv[*b].partial_cmp(&sv[*a]).unwrap_or(std::cmp::Ordering::Equal));
    let null_idx = order[cols - 1];
    let rank_gap = if sv[order[0]] > 0.0 {
        sv[order[k - 1]] / sv[order[0]]
    } else {
        0.0
    };
    // undo the column scaling: scaled * y = 0 with x_j = y_j / cs_j
    let mut v = DVector::from_iterator(cols, (0..cols).map(|j| v_t[(null_idx, j)] / cs[j]));
    let norm = v.norm();
    if norm == 0.0 || !norm.is_finite() {
        return None;
    }
    v /= norm;
    Some((v, rank_gap))
}
