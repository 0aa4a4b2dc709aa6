//! Double-double arithmetic (about 32 significant digits) for the few places
//! where sums of large cancelling power terms must be formed accurately.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const LN2: Dd = Dd { hi: std::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    /// Exact scaling by a power of two.
    fn ldexp(self, k: i32) -> Dd {
        let mut out = self;
        let mut k = k;
        while k != 0 {
            let step = k.clamp(-1000, 1000);
            let f = 2f64.powi(step);
            out = Dd { hi: out.hi * f, lo: out.lo * f };
            k -= step;
        }
        out
    }

    pub fn exp(self) -> Dd {
        if self.hi > 709.8 {
            return Dd { hi: f64::INFINITY, lo: 0.0 };
        }
        if self.hi < -745.2 {
            return Dd::ZERO;
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ONE;
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2 * k).ldexp(-9);
        // expm1 of the reduced argument, |r| < 7e-4
        let mut term = r;
        let mut sum = r;
        for j in 2..=12 {
            term = term * r / j as f64;
            sum = sum + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..9 {
            sum = sum * 2.0 + sum * sum;
        }
        (sum + 1.0).ldexp(k as i32)
    }

    /// Natural logarithm of a positive value.
    pub fn ln(self) -> Dd {
        if self.hi == 1.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        let y = Dd::from(self.hi.ln());
        y + self * (-y).exp() - 1.0
    }

    /// `x^alpha` for `x > 0`.
    pub fn powf(x: f64, alpha: f64) -> Dd {
        if alpha == 0.0 {
            return Dd::ONE;
        }
        (Dd::from(x).ln() * alpha).exp()
    }
}

impl From<f64> for Dd {
    fn from(v: f64) -> Dd {
        Dd { hi: v, lo: 0.0 }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, y: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, y.hi);
        let (t, f) = two_sum(self.lo, y.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, y: Dd) -> Dd {
        self + (-y)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, y: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, y.hi);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * y.lo + self.lo * y.hi));
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, y: Dd) -> Dd {
        let q1 = self.hi / y.hi;
        let r = self - y * q1;
        let q2 = r.hi / y.hi;
        let r = r - y * q2;
        let q3 = r.hi / y.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + q3
    }
}

macro_rules! with_f64 {
    ($tr:ident, $m:ident) => {
        impl $tr<f64> for Dd {
            type Output = Dd;
            fn $m(self, y: f64) -> Dd {
                $tr::$m(self, Dd::from(y))
            }
        }
    };
}
with_f64!(Add, add);
with_f64!(Sub, sub);
with_f64!(Mul, mul);
with_f64!(Div, div);

/// Accurate dot product.
pub fn dot(a: &[Dd], b: &[Dd]) -> Dd {
    a.iter().zip(b).fold(Dd::ZERO, |acc, (x, y)| acc + *x * *y)
}

/// Row-major dense matrix of double-doubles.
#[derive(Debug, Clone)]
pub struct DdMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Dd>,
}

impl DdMatrix {
    pub fn zeros(rows: usize, cols: usize) -> DdMatrix {
        DdMatrix { rows, cols, data: vec![Dd::ZERO; rows * cols] }
    }

    pub fn get(&self, i: usize, j: usize) -> Dd {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Dd) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Dd] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[Dd]) -> Vec<Dd> {
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    fn without_column(&self, c: usize) -> DdMatrix {
        let mut m = DdMatrix::zeros(self.rows, self.cols - 1);
        for i in 0..self.rows {
            for (jj, j) in (0..self.cols).filter(|j| *j != c).enumerate() {
                m.set(i, jj, self.get(i, j));
            }
        }
        m
    }
}

/// Rescales every row by a power of two so its largest entry is in `[1, 2)`.
fn equilibrate_rows(m: &mut DdMatrix) -> bool {
    for i in 0..m.rows {
        let big = m.row(i).iter().fold(0.0_f64, |b, v| b.max(v.hi.abs()));
        if big == 0.0 || !big.is_finite() {
            return false;
        }
        let k = -(big.log2().floor() as i32);
        for j in 0..m.cols {
            let v = m.get(i, j).ldexp(k);
            m.set(i, j, v);
        }
    }
    true
}

/// Null vector of a `k x (k+1)` matrix by elimination with complete
/// pivoting. `None` when the rows are numerically dependent.
pub fn null_vector(rows: &DdMatrix) -> Option<Vec<Dd>> {
    let k = rows.rows;
    let n = rows.cols;
    assert_eq!(n, k + 1, "null vector needs one more column than rows");
    let mut m = rows.clone();
    if !equilibrate_rows(&mut m) {
        return None;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut first_pivot = 0.0;
    for p in 0..k {
        let mut best = (p, p, -1.0);
        for i in p..k {
            for j in p..n {
                let v = m.get(i, perm[j]).hi.abs();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if p == 0 {
            first_pivot = best.2;
        }
        if best.2 <= 1e-28 * first_pivot || best.2 == 0.0 {
            return None;
        }
        if best.0 != p {
            for j in 0..n {
                let t = m.get(p, j);
                m.set(p, j, m.get(best.0, j));
                m.set(best.0, j, t);
            }
        }
        perm.swap(p, best.1);
        let piv = m.get(p, perm[p]);
        for i in p + 1..k {
            let f = m.get(i, perm[p]) / piv;
            if f.hi == 0.0 {
                continue;
            }
            for j in p..n {
                let v = m.get(i, perm[j]) - f * m.get(p, perm[j]);
                m.set(i, perm[j], v);
            }
        }
    }
    let mut x = vec![Dd::ZERO; n];
    x[perm[k]] = Dd::ONE;
    for p in (0..k).rev() {
        let mut s = Dd::ZERO;
        for j in p + 1..n {
            s = s + m.get(p, perm[j]) * x[perm[j]];
        }
        x[perm[p]] = -s / m.get(p, perm[p]);
    }
    Some(x)
}

/// Determinant by elimination with partial pivoting.
pub fn determinant(a: &DdMatrix) -> Dd {
    let n = a.rows;
    assert_eq!(n, a.cols, "determinant of a non-square matrix");
    let mut m = a.clone();
    let mut det = Dd::ONE;
    for p in 0..n {
        let (r, big) = (p..n).map(|i| (i, m.get(i, p).hi.abs())).fold((p, -1.0), |b, c| if c.1 > b.1 { c } else { b });
        if big == 0.0 {
            return Dd::ZERO;
        }
        if r != p {
            for j in 0..n {
                let t = m.get(p, j);
                m.set(p, j, m.get(r, j));
                m.set(r, j, t);
            }
            det = -det;
        }
        let piv = m.get(p, p);
        det = det * piv;
        for i in p + 1..n {
            let f = m.get(i, p) / piv;
            for j in p..n {
                let v = m.get(i, j) - f * m.get(p, j);
                m.set(i, j, v);
            }
        }
    }
    det
}

/// Signed cofactors of a free first row above `rows`, as in
/// [`crate::linalg::first_row_cofactors`].
pub fn first_row_cofactors(rows: &DdMatrix) -> Vec<Dd> {
    (0..rows.cols)
        .map(|i| {
            let d = determinant(&rows.without_column(i));
            if i % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}
