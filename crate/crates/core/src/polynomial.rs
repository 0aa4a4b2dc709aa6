//! Exponent vectors, intervals and sparse (Muntz) polynomials.
//!
//! A [`SparsePolynomial`] is a finite sum `sum_i a_i x^{alpha_i}` over a strictly
//! increasing list of real exponents. Evaluation uses `exp(alpha ln x)` for
//! `x > 0`, so real and negative exponents are handled uniformly. At `x = 0`
//! the convention `0^0 = 1` applies and positive powers vanish.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};

/// Largest derivative order supported by [`SparsePolynomial::eval_derivative`]
/// and by the confluent alternant rows built from it.
pub const MAX_DERIVATIVE_ORDER: usize = 2;

/// Strictly increasing real exponents `alpha_0 < alpha_1 < ... < alpha_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentVector(Vec<f64>);

impl ExponentVector {
    /// Rejects empty, non-finite, unsorted or duplicated input. Unsorted input is
    /// not reordered, since the exponent order fixes which coefficient is which.
    pub fn new(exponents: Vec<f64>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidExponents("at least one exponent is required".into()));
        }
        if let Some(bad) = exponents.iter().find(|e| !e.is_finite()) {
            return Err(Error::InvalidExponents(format!("non-finite exponent {bad}")));
        }
        for w in exponents.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidExponents(format!(
                    "exponents must be strictly increasing, found {} followed by {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(ExponentVector(exponents))
    }

    /// The dense exponents `0, 1, ..., n`.
    pub fn dense(n: usize) -> Self {
        ExponentVector((0..=n).map(|i| i as f64).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Order `n` of the family `{x^{alpha_0}, ..., x^{alpha_n}}`.
    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn first(&self) -> f64 {
        self.0[0]
    }

    pub fn last(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    pub fn all_integer(&self) -> bool {
        self.0.iter().all(|e| e.fract() == 0.0)
    }

    pub fn all_nonnegative_integer(&self) -> bool {
        self.0.iter().all(|e| e.fract() == 0.0 && *e >= 0.0)
    }

    pub fn has_negative(&self) -> bool {
        self.0[0] < 0.0
    }

    /// Index of an exponent, compared exactly.
    pub fn position(&self, alpha: f64) -> Option<usize> {
        self.0.iter().position(|e| *e == alpha)
    }

    /// Exponent vector with the entries at `range` only.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Result<Self> {
        ExponentVector::new(self.0[range].to_vec())
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.0.iter()
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// A closed interval `[a, b]` or the half-line `[0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Interval {
    Closed { a: f64, b: f64 },
    HalfLine,
}

impl Interval {
    pub fn closed(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidInterval(format!("[{a}, {b}] has a non-finite endpoint")));
        }
        if a >= b {
            return Err(Error::InvalidInterval(format!("[{a}, {b}] requires a < b")));
        }
        Ok(Interval::Closed { a, b })
    }

    pub fn half_line() -> Self {
        Interval::HalfLine
    }

    pub fn left(&self) -> f64 {
        match self {
            Interval::Closed { a, .. } => *a,
            Interval::HalfLine => 0.0,
        }
    }

    /// Right endpoint, `+inf` for the half-line.
    pub fn right(&self) -> f64 {
        match self {
            Interval::Closed { b, .. } => *b,
            Interval::HalfLine => f64::INFINITY,
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, Interval::Closed { .. })
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.left() && x <= self.right()
    }

    pub fn is_endpoint(&self, x: f64) -> bool {
        x == self.left() || x == self.right()
    }

    /// Checks that every member of `{x^{alpha_i}}` is defined on the interval:
    /// non-integer exponents need `a >= 0`, negative exponents need `a > 0`.
    pub fn check_exponents(&self, exps: &ExponentVector) -> Result<()> {
        let a = self.left();
        if exps.has_negative() && a <= 0.0 {
            return Err(Error::InvalidInterval(format!(
                "negative exponent {} requires a left endpoint > 0, got {a}",
                exps.first()
            )));
        }
        if !exps.all_integer() && a < 0.0 {
            return Err(Error::InvalidInterval(format!(
                "non-integer exponents require a left endpoint >= 0, got {a}"
            )));
        }
        Ok(())
    }

    /// `count` equispaced points including both endpoints. On the half-line the
    /// points cover `[0, horizon]`.
    pub fn grid(&self, count: usize, horizon: f64) -> Vec<f64> {
        let (a, b) = match self {
            Interval::Closed { a, b } => (*a, *b),
            Interval::HalfLine => (0.0, horizon),
        };
        if count < 2 {
            return vec![a];
        }
        let step = (b - a) / (count - 1) as f64;
        let mut pts: Vec<f64> = (0..count).map(|i| a + step * i as f64).collect();
        pts[count - 1] = b;
        pts
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interval::Closed { a, b } => write!(f, "[{a}, {b}]"),
            Interval::HalfLine => write!(f, "[0, inf)"),
        }
    }
}

/// Falling factorial `alpha (alpha - 1) ... (alpha - order + 1)`.
pub fn falling_factorial(alpha: f64, order: usize) -> f64 {
    (0..order).fold(1.0, |acc, k| acc * (alpha - k as f64))
}

/// `order`-th derivative of `x^alpha` at `x`.
pub fn power_derivative(alpha: f64, x: f64, order: usize) -> Result<f64> {
    if order > MAX_DERIVATIVE_ORDER {
        return Err(Error::UnsupportedOrder {
            order,
            max: MAX_DERIVATIVE_ORDER,
        });
    }
    if !x.is_finite() {
        return Err(Error::domain(x, "argument is not finite"));
    }
    let factor = falling_factorial(alpha, order);
    if factor == 0.0 {
        return Ok(0.0);
    }
    let shifted = alpha - order as f64;
    if x > 0.0 {
        return Ok(factor * (shifted * x.ln()).exp());
    }
    if x == 0.0 {
        return if shifted == 0.0 {
            Ok(factor)
        } else if shifted > 0.0 {
            Ok(0.0)
        } else {
            Err(Error::domain(
                x,
                format!("x^{alpha} has a singular derivative of order {order} at 0"),
            ))
        };
    }
    if alpha.fract() != 0.0 {
        return Err(Error::domain(
            x,
            format!("x^{alpha} with a non-integer exponent is undefined for x < 0"),
        ));
    }
    Ok(factor * x.powi(shifted as i32))
}

/// Real-valued function with derivatives, as needed by the zero finder.
pub trait RealFunction {
    fn value(&self, x: f64) -> Result<f64>;
    fn derivative(&self, x: f64, order: usize) -> Result<f64>;
}

/// `sum_i a_i x^{alpha_i}` over an [`ExponentVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePolynomial {
    exps: ExponentVector,
    coeffs: Vec<f64>,
}

impl SparsePolynomial {
    pub fn new(exps: ExponentVector, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != exps.len() {
            return Err(Error::Shape(format!(
                "{} coefficients for {} exponents",
                coeffs.len(),
                exps.len()
            )));
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::Shape(format!("non-finite coefficient {bad}")));
        }
        Ok(SparsePolynomial { exps, coeffs })
    }

    pub fn zero(exps: ExponentVector) -> Self {
        let coeffs = vec![0.0; exps.len()];
        SparsePolynomial { exps, coeffs }
    }

    pub fn exps(&self) -> &ExponentVector {
        &self.exps
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.exps.order()
    }

    /// Coefficient of the highest family member `x^{alpha_n}`.
    pub fn leading_coefficient(&self) -> f64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SparsePolynomial {
            exps: self.exps.clone(),
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// `sum_i a_i x^{alpha_i}` with `0^0 = 1`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        self.eval_derivative(x, 0)
    }

    /// `sum_i a_i alpha_i (alpha_i - 1) ... (alpha_i - order + 1) x^{alpha_i - order}`.
    pub fn eval_derivative(&self, x: f64, order: usize) -> Result<f64> {
        let mut acc = 0.0;
        for (alpha, c) in self.exps.iter().zip(&self.coeffs) {
            let term = power_derivative(*alpha, x, order)?;
            if *c != 0.0 {
                acc += c * term;
            }
        }
        Ok(acc)
    }

    /// Maximum of `|p|` over `points`.
    pub fn sup_norm_on(&self, points: &[f64]) -> Result<f64> {
        let mut best: f64 = 0.0;
        for x in points {
            best = best.max(self.eval(*x)?.abs());
        }
        Ok(best)
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self> {
        if self.exps != other.exps {
            return Err(Error::Shape("polynomials use different exponent vectors".into()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + sign * b)
            .collect();
        Ok(SparsePolynomial {
            exps: self.exps.clone(),
            coeffs,
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1.0)
    }
}

impl RealFunction for SparsePolynomial {
    fn value(&self, x: f64) -> Result<f64> {
        self.eval(x)
    }

    fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        self.eval_derivative(x, order)
    }
}

/// Panics when the exponent vectors differ; use [`SparsePolynomial::try_add`]
/// for a checked version.
impl Add for &SparsePolynomial {
    type Output = SparsePolynomial;

    fn add(self, rhs: Self) -> SparsePolynomial {
        self.try_add(rhs).expect("exponent vectors must match")
    }
}

impl Sub for &SparsePolynomial {
    type Output = SparsePolynomial;

    fn sub(self, rhs: Self) -> SparsePolynomial {
        self.try_sub(rhs).expect("exponent vectors must match")
    }
}

impl Neg for &SparsePolynomial {
    type Output = SparsePolynomial;

    fn neg(self) -> SparsePolynomial {
        self.scaled(-1.0)
    }
}

impl fmt::Display for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (alpha, c) in self.exps.iter().zip(&self.coeffs) {
            if *c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}*x^{alpha}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
