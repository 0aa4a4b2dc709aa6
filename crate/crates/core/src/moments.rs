//! Truncated moment problems over sparse power families.
//!
//! A truncated moment sequence `s_i = int x^{alpha_i} dmu` is represented by
//! its Riesz functional `L(x^{alpha_i}) = s_i`. The module offers the classical
//! Hankel tests for dense exponents, a feasibility decision for sparse
//! exponents on `[a, b]` and `[0, inf)` that only needs `L(p) >= 0` on the
//! nonnegative determinantal polynomials with full zero index, recovery of an
//! atomic representing measure, and signed representations at fixed points.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::nnls::nnls;
use crate::polynomial::{power_derivative, ExponentVector, Interval, SparsePolynomial};

/// Moments `s_0..s_n` indexed by an exponent vector.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedMomentSequence {
    exps: ExponentVector,
    values: Vec<f64>,
}

impl TruncatedMomentSequence {
    pub fn new(exps: ExponentVector, values: Vec<f64>) -> Result<Self> {
        if exps.len() != values.len() {
            return Err(Error::Shape(format!(
                "{} exponents but {} moments",
                exps.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Shape("moments must be finite".into()));
        }
        Ok(Self { exps, values })
    }

    pub fn exps(&self) -> &ExponentVector {
        &self.exps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn order(&self) -> usize {
        self.exps.order()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Finitely atomic measure `sum_j c_j delta_{x_j}` with positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::Shape(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        if atoms.iter().any(|x| !x.is_finite()) {
            return Err(Error::Shape("atoms must be finite".into()));
        }
        if weights.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(Error::Shape("weights must be strictly positive".into()));
        }
        for i in 0..atoms.len() {
            for j in 0..i {
                if atoms[i] == atoms[j] {
                    return Err(Error::Shape(format!("atom {} appears twice", atoms[i])));
                }
            }
        }
        Ok(Self { atoms, weights })
    }

    pub fn empty() -> Self {
        Self {
            atoms: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// Riesz functional `L_s(p) = sum a_i s_(i)`, pairing each coefficient with
/// the moment of the same exponent.
pub fn riesz(s: &TruncatedMomentSequence, p: &SparsePolynomial) -> Result<f64> {
    let mut total = 0.0;
    for (alpha, a) in p.exps().iter().zip(p.coeffs()) {
        match s.exps.position(*alpha) {
            Some(i) => total += a * s.values[i],
            None if *a == 0.0 => {}
            None => return Err(Error::ExponentMismatch(*alpha)),
        }
    }
    Ok(total)
}

/// Moments `s_i = sum_j c_j x_j^{alpha_i}` of an atomic measure.
pub fn moments_of(mu: &AtomicMeasure, exps: &ExponentVector) -> Result<TruncatedMomentSequence> {
    let mut values = vec![0.0; exps.len()];
    for (x, c) in mu.atoms.iter().zip(&mu.weights) {
        for (v, alpha) in values.iter_mut().zip(exps.iter()) {
            *v += c * power_derivative(*alpha, *x, 0)?;
        }
    }
    TruncatedMomentSequence::new(exps.clone(), values)
}

// ---------------------------------------------------------------------------
// dense Hankel tests

/// Outcome of one classical positivity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdCheck {
    pub pass: bool,
    /// Smallest eigenvalue over the Hankel matrices involved.
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HankelReport {
    /// Support `R`.
    pub hamburger: PsdCheck,
    /// Support `[0, inf)`.
    pub stieltjes: PsdCheck,
    /// Support `[0, 1]`.
    pub hausdorff: PsdCheck,
    /// Support `(-inf, 0] u [1, inf)`.
    pub svecov: PsdCheck,
}

const PSD_REL_TOL: f64 = 1e-10;
const RANGE_REL_TOL: f64 = 1e-8;

/// Largest square Hankel matrix `(t_{i+j})` that `t` fills.
fn hankel(t: &[f64]) -> Option<DMatrix<f64>> {
    if t.is_empty() {
        return None;
    }
    let k = (t.len() - 1) / 2;
    Some(DMatrix::from_fn(k + 1, k + 1, |i, j| t[i + j]))
}

fn eigen_tol(m: &DMatrix<f64>) -> f64 {
    PSD_REL_TOL * m.trace().abs().max(m.amax())
}

struct Psd {
    ok: bool,
    min: f64,
}

fn psd(mats: &[Option<DMatrix<f64>>]) -> Psd {
    let mut ok = true;
    let mut min = f64::INFINITY;
    for m in mats.iter().flatten() {
        let ev = SymmetricEigen::new(m.clone()).eigenvalues;
        let lo = ev.min();
        min = min.min(lo);
        if lo < -eigen_tol(m) {
            ok = false;
        }
    }
    if !min.is_finite() {
        min = 0.0;
    }
    Psd { ok, min }
}

/// Whether `v` lies in the range of the symmetric matrix `m`, up to the
/// eigenvalue cutoff used by the PSD test.
fn in_range(m: &DMatrix<f64>, v: &[f64]) -> bool {
    let eig = SymmetricEigen::new(m.clone());
    let cut = eigen_tol(m);
    let v = DVector::from_column_slice(v);
    let mut leak = 0.0;
    for (j, lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() <= cut {
            leak += eig.eigenvectors.column(j).dot(&v).powi(2);
        }
    }
    leak.sqrt() <= RANGE_REL_TOL * v.norm().max(1.0)
}

fn numerical_rank(m: &DMatrix<f64>, cut: f64) -> usize {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .filter(|l| l.abs() > cut)
        .count()
}

/// Size of the first singular leading principal block minus one, or the
/// full size when every leading block is regular.
fn first_dependent_column(m: &DMatrix<f64>, cut: f64) -> usize {
    let n = m.nrows();
    for r in 1..=n {
        let block = m.view((0, 0), (r, r)).clone_owned();
        let lo = SymmetricEigen::new(block).eigenvalues.min();
        if lo <= cut {
            return r - 1;
        }
    }
    n
}

/// Classical Hankel criteria for `s` over the dense exponents `0..n`.
///
/// Besides the PSD conditions, the Hamburger and Stieltjes tests check the
/// rank and range conditions that separate the truncated moment cone from
/// its closure; the Hausdorff test uses the Lukacs representation of
/// nonnegative polynomials on `[0, 1]`, so its PSD conditions are exact.
pub fn hankel_psd_checks(s: &TruncatedMomentSequence) -> Result<HankelReport> {
    let n = s.order();
    if !s.exps.iter().enumerate().all(|(i, a)| *a == i as f64) {
        return Err(Error::NotDense);
    }
    let v = &s.values;
    let shifted: Vec<f64> = v[1..].to_vec();
    let one_minus: Vec<f64> = (0..n).map(|i| v[i] - v[i + 1]).collect();
    let x_minus_x2: Vec<f64> = (0..n.saturating_sub(1)).map(|i| v[i + 1] - v[i + 2]).collect();
    let x2_minus_x: Vec<f64> = x_minus_x2.iter().map(|t| -t).collect();
    let k = n / 2;

    let h = hankel(v).expect("sequence is nonempty");

    // Hamburger
    let ham = psd(&[Some(h.clone())]);
    let ham_pass = ham.ok && {
        let cut = eigen_tol(&h);
        if n.is_multiple_of(2) {
            numerical_rank(&h, cut) == first_dependent_column(&h, cut)
        } else {
            in_range(&h, &v[k + 1..=n])
        }
    };

    // Stieltjes
    let b = hankel(&shifted);
    let sti = psd(&[Some(h.clone()), b.clone()]);
    let sti_pass = sti.ok
        && if n.is_multiple_of(2) {
            match &b {
                Some(b) => in_range(b, &v[k + 1..=n]),
                None => true,
            }
        } else {
            in_range(&h, &v[k + 1..=n])
        };

    // Hausdorff on [0, 1]
    let hau = if n.is_multiple_of(2) {
        psd(&[Some(h.clone()), hankel(&x_minus_x2)])
    } else {
        psd(&[hankel(&shifted), hankel(&one_minus)])
    };

    let sve = psd(&[Some(h), hankel(&x2_minus_x)]);

    Ok(HankelReport {
        hamburger: PsdCheck {
            pass: ham_pass,
            min_eigenvalue: ham.min,
        },
        stieltjes: PsdCheck {
            pass: sti_pass,
            min_eigenvalue: sti.min,
        },
        hausdorff: PsdCheck {
            pass: hau.ok,
            min_eigenvalue: hau.min,
        },
        svecov: PsdCheck {
            pass: sve.ok,
            min_eigenvalue: sve.min,
        },
    })
}

// ---------------------------------------------------------------------------
// sparse feasibility

#[derive(Debug, Clone)]
pub struct FeasibilityConfig {
    pub seed: u64,
    /// Multi-start count for each top-order family; lower-order families get
    /// a quarter of it.
    pub starts: usize,
    pub max_iter: usize,
    /// Grid used for the sup-norm normalization.
    pub grid_points: usize,
    /// Absolute tolerance; defaults to `1e-8 (1 + ||s||_inf)`.
    pub tol: Option<f64>,
}

impl Default for FeasibilityConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            starts: 32,
            max_iter: 60,
            grid_points: 256,
            tol: None,
        }
    }
}

/// Nonnegative polynomial with `L(p) < 0` (or close to it).
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    /// Normalized to sup-norm 1 on the interval (weighted by
    /// `1 / sum x^{alpha_i}` on the half-line).
    pub polynomial: SparsePolynomial,
    /// Interior double zeros of the polynomial.
    pub knots: Vec<f64>,
    /// `L(p)`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    /// Every tested extremal polynomial has `L(p) >= -tol`.
    Feasible { min_value: f64 },
    /// The minimum lies in `(-100 tol, -tol)`.
    Marginal(Certificate),
    Infeasible(Certificate),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }

    pub fn min_value(&self) -> f64 {
        match self {
            Feasibility::Feasible { min_value } => *min_value,
            Feasibility::Marginal(c) | Feasibility::Infeasible(c) => c.value,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Feasibility::Feasible { .. } => None,
            Feasibility::Marginal(c) | Feasibility::Infeasible(c) => Some(c),
        }
    }
}

/// One parity family: the members `cols`, optional simple zeros at the
/// endpoints and `free` interior double zeros.
#[derive(Debug, Clone)]
struct Family {
    cols: Vec<usize>,
    free: usize,
    left: bool,
    right: bool,
    top: bool,
}

fn closed_families(n: usize) -> Vec<Family> {
    let mut out = Vec::new();
    for k in 0..=n {
        let cols: Vec<usize> = (0..=k).collect();
        let top = k == n;
        let m = k / 2;
        if k % 2 == 0 {
            out.push(Family { cols: cols.clone(), free: m, left: false, right: false, top });
            if m >= 1 {
                out.push(Family { cols, free: m - 1, left: true, right: true, top });
            }
        } else {
            out.push(Family { cols: cols.clone(), free: m, left: true, right: false, top });
            out.push(Family { cols, free: m, left: false, right: true, top });
        }
    }
    out
}

fn halfline_families(n: usize) -> Vec<Family> {
    let mut out = Vec::new();
    for m in 0..=n / 2 {
        out.push(Family {
            cols: (0..=2 * m).collect(),
            free: m,
            left: false,
            right: false,
            top: 2 * m + 1 >= n,
        });
    }
    for m in 0.. {
        if 2 * m + 1 > n {
            break;
        }
        out.push(Family {
            cols: (1..=2 * m + 1).collect(),
            free: m,
            left: false,
            right: false,
            top: 2 * m + 2 >= n,
        });
    }
    out
}

struct Landscape<'a> {
    s: &'a TruncatedMomentSequence,
    closed: Option<(f64, f64)>,
    scale: f64,
    /// Powers at the normalization grid, row-major `grid x (n+1)`.
    table: Vec<f64>,
    /// `1 / sum x^{alpha_i}` on the half-line, 1 on a closed interval.
    weight: Vec<f64>,
    width: usize,
}

const MIN_SEPARATION: f64 = 1e-7;
const RANK_GAP: f64 = 1e-12;

impl<'a> Landscape<'a> {
    fn new(s: &'a TruncatedMomentSequence, iv: &Interval, points: usize) -> Result<Self> {
        let exps = s.exps.as_slice();
        let width = exps.len();
        let (closed, scale) = match iv {
            Interval::Closed { a, b } => (Some((*a, *b)), 1.0),
            Interval::HalfLine => (None, halfline_scale(s)),
        };
        let ts = chebyshev_lobatto(points.max(8));
        let xs: Vec<f64> = ts.iter().map(|t| to_point(closed, scale, *t)).collect();
        let mut table = Vec::with_capacity(xs.len() * width);
        let mut weight = Vec::with_capacity(xs.len());
        for x in &xs {
            let mut sum = 0.0;
            for alpha in exps {
                let v = power_derivative(*alpha, *x, 0)?;
                sum += v;
                table.push(v);
            }
            weight.push(if closed.is_some() { 1.0 } else { 1.0 / sum });
        }
        Ok(Self {
            s,
            closed,
            scale,
            table,
            weight,
            width,
        })
    }

    fn point(&self, u: f64) -> f64 {
        to_point(self.closed, self.scale, u)
    }

    /// Normalized oriented coefficients (in family columns) for parameters
    /// `u` in `(0, 1)`, or `None` when the knots are degenerate.
    fn polynomial(&self, fam: &Family, u: &[f64]) -> Option<Vec<f64>> {
        for w in u.windows(2) {
            if w[1] - w[0] < MIN_SEPARATION {
                return None;
            }
        }
        if u.iter().any(|t| !(*t >= MIN_SEPARATION && *t <= 1.0 - MIN_SEPARATION)) {
            return None;
        }
        let exps = self.s.exps.as_slice();
        let c = fam.cols.len();
        let r = c - 1;
        let mut rows = DMatrix::zeros(r, c);
        let mut at = 0;
        let mut push = |x: f64, order: usize, rows: &mut DMatrix<f64>| -> Option<()> {
            for (j, col) in fam.cols.iter().enumerate() {
                rows[(at, j)] = power_derivative(exps[*col], x, order).ok()?;
            }
            at += 1;
            Some(())
        };
        if fam.left {
            push(self.closed?.0, 0, &mut rows)?;
        }
        for t in u {
            let x = self.point(*t);
            push(x, 0, &mut rows)?;
            push(x, 1, &mut rows)?;
        }
        if fam.right {
            push(self.closed?.1, 0, &mut rows)?;
        }
        let (v, gap) = linalg::null_vector(&rows)?;
        if gap < RANK_GAP {
            return None;
        }
        let mut best = 0.0f64;
        let mut signed = 0.0;
        for (g, w) in self.weight.iter().enumerate() {
            let row = &self.table[g * self.width..(g + 1) * self.width];
            let val: f64 = fam.cols.iter().zip(v.iter()).map(|(col, a)| row[*col] * a).sum();
            let val = val * w;
            if val.abs() > best {
                best = val.abs();
                signed = val;
            }
        }
        if !(best > 0.0 && best.is_finite()) {
            return None;
        }
        let factor = signed.signum() / best;
        Some(v.iter().map(|a| a * factor).collect())
    }

    fn objective(&self, fam: &Family, u: &[f64]) -> f64 {
        match self.polynomial(fam, u) {
            Some(coeffs) => fam
                .cols
                .iter()
                .zip(&coeffs)
                .map(|(col, a)| a * self.s.values[*col])
                .sum(),
            None => f64::INFINITY,
        }
    }

    fn embed(&self, fam: &Family, coeffs: &[f64]) -> Result<SparsePolynomial> {
        let mut full = vec![0.0; self.width];
        for (col, a) in fam.cols.iter().zip(coeffs) {
            full[*col] = *a;
        }
        SparsePolynomial::new(self.s.exps.clone(), full)
    }
}

fn to_point(closed: Option<(f64, f64)>, scale: f64, t: f64) -> f64 {
    match closed {
        Some((a, b)) => a + (b - a) * t,
        None => scale * t / (1.0 - t).max(1e-300),
    }
}

/// Chebyshev-Lobatto nodes on `[0, 1)`; the right end is pulled in so the
/// half-line map stays finite.
fn chebyshev_lobatto(count: usize) -> Vec<f64> {
    let mut ts: Vec<f64> = (0..count)
        .map(|i| 0.5 - 0.5 * (std::f64::consts::PI * i as f64 / (count - 1) as f64).cos())
        .collect();
    ts[count - 1] = 1.0;
    ts
}

/// Typical atom size `(s_n / s_0)^{1 / alpha_n}` for half-line problems.
fn halfline_scale(s: &TruncatedMomentSequence) -> f64 {
    let s0 = s.values[0];
    let sn = *s.values.last().expect("nonempty");
    let an = s.exps.last();
    if s0 > 0.0 && sn > 0.0 && an > 0.0 {
        let r = (sn / s0).powf(1.0 / an);
        if r.is_finite() && r > 1e-6 && r < 1e6 {
            return r;
        }
    }
    1.0
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base as u64) as f64 * inv;
        i /= base as u64;
        inv /= b;
    }
    out
}

/// Shifted Halton points in the ordered simplex of `(0, 1)^d`.
fn start_points(d: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let shift: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
    (1..=count as u64)
        .map(|i| {
            let mut u: Vec<f64> = (0..d)
                .map(|j| {
                    let h = if j < PRIMES.len() {
                        radical_inverse(i, PRIMES[j])
                    } else {
                        rng.gen::<f64>()
                    };
                    let t = (h + shift[j]).fract();
                    0.02 + 0.96 * t
                })
                .collect();
            u.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
            spread(&mut u);
            u
        })
        .collect()
}

/// Sorts, clamps into `(0, 1)` and enforces the minimal separation.
fn spread(u: &mut [f64]) {
    u.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let sep = 4.0 * MIN_SEPARATION;
    let d = u.len();
    for (j, t) in u.iter_mut().enumerate() {
        let lo = sep * (j + 1) as f64;
        let hi = 1.0 - sep * (d - j) as f64;
        *t = t.clamp(lo, hi);
    }
    for j in 1..d {
        if u[j] - u[j - 1] < sep {
            u[j] = u[j - 1] + sep;
        }
    }
}

/// Projected gradient descent from `u`, with forward-difference gradients
/// and a backtracking step.
fn descend(land: &Landscape, fam: &Family, mut u: Vec<f64>, max_iter: usize) -> (f64, Vec<f64>) {
    let mut f = land.objective(fam, &u);
    if u.is_empty() || !f.is_finite() {
        return (f, u);
    }
    let h = 1e-7;
    let mut step = 0.05;
    for _ in 0..max_iter {
        let grad: Vec<f64> = (0..u.len())
            .map(|j| {
                let mut up = u.clone();
                up[j] += h;
                let fp = land.objective(fam, &up);
                if fp.is_finite() {
                    (fp - f) / h
                } else {
                    let mut dn = u.clone();
                    dn[j] -= h;
                    (f - land.objective(fam, &dn)) / h
                }
            })
            .collect();
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if !norm.is_finite() || norm < 1e-14 {
            break;
        }
        let mut moved = false;
        while step > 1e-10 {
            let mut trial: Vec<f64> = u.iter().zip(&grad).map(|(t, g)| t - step * g / norm).collect();
            spread(&mut trial);
            let ft = land.objective(fam, &trial);
            if ft < f - 1e-4 * step * norm {
                f = ft;
                u = trial;
                moved = true;
                step = (step * 2.0).min(0.25);
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (f, u)
}

fn check_feasibility_input(s: &TruncatedMomentSequence, iv: &Interval) -> Result<()> {
    iv.check_exponents(&s.exps)?;
    match iv {
        Interval::Closed { a, .. } => {
            if *a == 0.0 && s.exps.first() != 0.0 {
                return Err(Error::Config(
                    "on [0, b] the first exponent must be 0".into(),
                ));
            }
        }
        Interval::HalfLine => {
            if s.exps.first() != 0.0 {
                return Err(Error::Config(
                    "on [0, inf) the exponents must start at 0".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Default absolute tolerance `1e-8 (1 + ||s||_inf)`.
pub fn default_tolerance(s: &TruncatedMomentSequence) -> f64 {
    1e-8 * (1.0 + s.sup_norm())
}

/// Largest violation of nonnegativity of a certificate on the interval.
fn certificate_defect(p: &SparsePolynomial, iv: &Interval, scale: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    let points = 4001;
    for i in 0..points {
        let t = i as f64 / (points - 1) as f64;
        let (x, w) = match iv {
            Interval::Closed { a, b } => (a + (b - a) * t, 1.0),
            Interval::HalfLine => {
                let t = t * (1.0 - 1e-6);
                let x = scale * t / (1.0 - t);
                let w: f64 = p
                    .exps()
                    .iter()
                    .map(|al| power_derivative(*al, x, 0))
                    .sum::<Result<f64>>()?;
                (x, 1.0 / w)
            }
        };
        worst = worst.min(p.eval(x)? * w);
    }
    Ok(-worst)
}

/// Decides whether `s` is (the closure of) a truncated moment sequence on
/// `iv` by minimizing `L(p)` over the nonnegative determinantal polynomials
/// of every parity family the truncation permits.
pub fn sparse_feasible(s: &TruncatedMomentSequence, iv: &Interval, cfg: &FeasibilityConfig) -> Result<Feasibility> {
    check_feasibility_input(s, iv)?;
    if cfg.starts == 0 || cfg.grid_points < 8 {
        return Err(Error::Config("need at least one start and 8 grid points".into()));
    }
    let tol = cfg.tol.unwrap_or_else(|| default_tolerance(s));
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let land = Landscape::new(s, iv, cfg.grid_points)?;
    let n = s.order();
    let families = match iv {
        Interval::Closed { .. } => closed_families(n),
        Interval::HalfLine => halfline_families(n),
    };

    let mut jobs = Vec::new();
    for (fi, fam) in families.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (fi as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        if fam.free == 0 {
            jobs.push((fi, Vec::new()));
            continue;
        }
        let count = if fam.top { cfg.starts } else { (cfg.starts / 4).max(4) };
        for u in start_points(fam.free, count, &mut rng) {
            jobs.push((fi, u));
        }
    }
    let results: Vec<(usize, f64, Vec<f64>)> = jobs
        .into_par_iter()
        .map(|(fi, u)| {
            let (f, u) = descend(&land, &families[fi], u, cfg.max_iter);
            (fi, f, u)
        })
        .collect();

    let mut order: Vec<usize> = (0..results.len()).filter(|i| results[*i].1.is_finite()).collect();
    let lexical = |i: &usize, j: &usize| {
        let (fa, _, ua) = &results[*i];
        let (fb, _, ub) = &results[*j];
        fa.cmp(fb).then_with(|| ua.partial_cmp(ub).unwrap_or(Ordering::Equal))
    };
    order.sort_by(|i, j| results[*i].1.total_cmp(&results[*j].1).then_with(|| lexical(i, j)));
    // among near-ties of the minimum report the lexicographically smallest
    if let Some(first) = order.first().map(|i| results[*i].1) {
        let ties = order.iter().take_while(|i| results[**i].1 <= first + 1e-12).count();
        order[..ties].sort_by(lexical);
    }

    for idx in order {
        let (fi, value, u) = &results[idx];
        if *value >= -tol {
            return Ok(Feasibility::Feasible { min_value: *value });
        }
        let fam = &families[*fi];
        let Some(coeffs) = land.polynomial(fam, u) else { continue };
        let polynomial = land.embed(fam, &coeffs)?;
        if certificate_defect(&polynomial, iv, land.scale)? > 1e-9 {
            continue;
        }
        let cert = Certificate {
            polynomial,
            knots: u.iter().map(|t| land.point(*t)).collect(),
            value: *value,
        };
        return Ok(if *value > -100.0 * tol {
            Feasibility::Marginal(cert)
        } else {
            Feasibility::Infeasible(cert)
        });
    }
    Ok(Feasibility::Feasible { min_value: 0.0 })
}

// ---------------------------------------------------------------------------
// atom recovery

#[derive(Debug, Clone)]
pub struct RecoveryConfig {
    pub feasibility: FeasibilityConfig,
    /// Candidate atoms for the nonnegative least-squares stage.
    pub grid_points: usize,
    /// Iteration cap of each refinement. Atoms close together make the fit
    /// crawl along a narrow valley, so this is generous.
    pub max_iter: usize,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        Self {
            feasibility: FeasibilityConfig::default(),
            grid_points: 2001,
            max_iter: 3000,
        }
    }
}

struct Fit<'a> {
    exps: &'a [f64],
    target: &'a [f64],
    row_weight: Vec<f64>,
    lo: f64,
    hi: f64,
}

impl Fit<'_> {
    fn residual(&self, atoms: &[f64], weights: &[f64]) -> Option<Vec<f64>> {
        let mut r: Vec<f64> = self.target.iter().map(|t| -t).collect();
        for (x, c) in atoms.iter().zip(weights) {
            for (ri, alpha) in r.iter_mut().zip(self.exps) {
                *ri += c * power_derivative(*alpha, *x, 0).ok()?;
            }
        }
        Some(r)
    }

    fn cost(&self, atoms: &[f64], weights: &[f64]) -> f64 {
        match self.residual(atoms, weights) {
            Some(r) => r.iter().zip(&self.row_weight).map(|(ri, w)| (ri * w).powi(2)).sum(),
            None => f64::INFINITY,
        }
    }

    /// Levenberg-Marquardt on atoms and weights jointly; atoms stay in the
    /// interval and weights nonnegative.
    fn refine(&self, atoms: &mut Vec<f64>, weights: &mut Vec<f64>, max_iter: usize) {
        let k = atoms.len();
        let m = self.exps.len();
        let mut cost = self.cost(atoms, weights);
        let mut lambda = 1e-3;
        let mut reset = false;
        for _ in 0..max_iter {
            if cost < 1e-32 {
                break;
            }
            let Some(r) = self.residual(atoms, weights) else { break };
            let mut jac = DMatrix::zeros(m, 2 * k);
            for j in 0..k {
                for i in 0..m {
                    let w = self.row_weight[i];
                    let d = power_derivative(self.exps[i], atoms[j], 1).unwrap_or(0.0);
                    jac[(i, j)] = w * weights[j] * if d.is_finite() { d } else { 0.0 };
                    jac[(i, k + j)] = w * power_derivative(self.exps[i], atoms[j], 0).unwrap_or(0.0);
                }
            }
            let rw = DVector::from_iterator(m, r.iter().zip(&self.row_weight).map(|(ri, w)| ri * w));
            let col_norm: Vec<f64> = (0..2 * k).map(|d| jac.column(d).norm_squared()).collect();
            let mut improved = false;
            for _ in 0..12 {
                // damped step as the least-squares solution of [J; sqrt(lambda) D] s = [-r; 0],
                // which avoids squaring the conditioning of J
                let mut aug = DMatrix::zeros(m + 2 * k, 2 * k);
                aug.view_mut((0, 0), (m, 2 * k)).copy_from(&jac);
                for d in 0..2 * k {
                    aug[(m + d, d)] = (lambda * (col_norm[d] + 1e-12)).sqrt();
                }
                let mut rhs = DVector::zeros(m + 2 * k);
                rhs.rows_mut(0, m).copy_from(&(-&rw));
                let Ok(step) = aug.svd(true, true).solve(&rhs, 0.0) else { break };
                let trial_atoms: Vec<f64> = (0..k).map(|j| (atoms[j] + step[j]).clamp(self.lo, self.hi)).collect();
                let trial_weights: Vec<f64> = (0..k).map(|j| (weights[j] + step[k + j]).max(0.0)).collect();
                let c = self.cost(&trial_atoms, &trial_weights);
                if c < cost {
                    *atoms = trial_atoms;
                    *weights = trial_weights;
                    cost = c;
                    lambda = (lambda * 0.3).max(1e-12);
                    improved = true;
                    reset = false;
                    break;
                }
                lambda *= 10.0;
            }
            if !improved {
                // the damping can overshoot on flat valleys; retry once from the start value
                if reset {
                    break;
                }
                reset = true;
                lambda = 1e-3;
            }
        }
    }
}

impl Fit<'_> {
    fn max_residual(&self, atoms: &[f64], weights: &[f64]) -> f64 {
        match self.residual(atoms, weights) {
            Some(r) => r.iter().fold(0.0f64, |m, v| m.max(v.abs())),
            None => f64::INFINITY,
        }
    }

    /// Merges adjacent atoms and refits for as long as the moments stay
    /// within `target`, so the result uses as few atoms as it can. Every
    /// adjacent pair is tried and the best refit wins.
    fn reduce(&self, mut atoms: Vec<f64>, mut weights: Vec<f64>, target: f64, max_iter: usize) -> (Vec<f64>, Vec<f64>) {
        while atoms.len() > 1 {
            let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
            for j in 1..atoms.len() {
                let total = weights[j - 1] + weights[j];
                let mut xs = atoms.clone();
                let mut cs = weights.clone();
                xs[j - 1] = (atoms[j - 1] * weights[j - 1] + atoms[j] * weights[j]) / total;
                cs[j - 1] = total;
                xs.remove(j);
                cs.remove(j);
                self.refine(&mut xs, &mut cs, max_iter);
                let (xs, cs) = consolidate(&xs, &cs, 1e-10 * (1.0 + self.hi.min(1e300).abs()));
                let r = self.max_residual(&xs, &cs);
                if xs.len() < atoms.len() && best.as_ref().is_none_or(|b| r < b.0) {
                    best = Some((r, xs, cs));
                }
            }
            match best {
                Some((r, xs, cs)) if r <= target => {
                    atoms = xs;
                    weights = cs;
                }
                _ => break,
            }
        }
        (atoms, weights)
    }
}

fn candidate_grid(iv: &Interval, count: usize, scale: f64) -> Vec<f64> {
    match iv {
        Interval::Closed { a, b } => (0..count)
            .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
            .collect(),
        Interval::HalfLine => (0..count)
            .map(|i| {
                let t = i as f64 / count as f64;
                scale * t / (1.0 - t)
            })
            .collect(),
    }
}

/// Merges atoms closer than `gap` (weighted mean location) and drops
/// negligible weights.
fn consolidate(atoms: &[f64], weights: &[f64], gap: f64) -> (Vec<f64>, Vec<f64>) {
    let mut pairs: Vec<(f64, f64)> = atoms
        .iter()
        .zip(weights)
        .filter(|(_, c)| **c > 1e-10)
        .map(|(x, c)| (*x, *c))
        .collect();
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap_or(Ordering::Equal));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (x, c) in pairs {
        match out.last_mut() {
            Some(last) if x - last.0 <= gap => {
                let total = last.1 + c;
                last.0 = (last.0 * last.1 + x * c) / total;
                last.1 = total;
            }
            _ => out.push((x, c)),
        }
    }
    out.into_iter().unzip()
}

/// `k` equal-weight atoms at the weighted quantiles `(j + 1/2) / k` of a
/// discrete measure with sorted atoms, pushed at least `gap` apart and kept
/// in `[lo, hi]`.
fn quantile_start(atoms: &[f64], weights: &[f64], k: usize, gap: f64, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let total: f64 = weights.iter().sum();
    let mut xs: Vec<f64> = Vec::with_capacity(k);
    let mut acc = 0.0;
    let mut i = 0;
    for j in 0..k {
        let level = (j as f64 + 0.5) / k as f64 * total;
        while i + 1 < atoms.len() && acc + weights[i] < level {
            acc += weights[i];
            i += 1;
        }
        xs.push(atoms.get(i).copied().unwrap_or(lo));
    }
    // spread coinciding atoms symmetrically around their common location
    let mut j = 0;
    while j < k {
        let mut l = j;
        while l + 1 < k && xs[l + 1] - xs[l] < gap {
            l += 1;
        }
        let centre = xs[j..=l].iter().sum::<f64>() / (l - j + 1) as f64;
        for (t, x) in xs[j..=l].iter_mut().enumerate() {
            *x = (centre + gap * (t as f64 - (l - j) as f64 / 2.0)).clamp(lo, hi);
        }
        j = l + 1;
    }
    (xs, vec![total / k as f64; k])
}

/// Finitely atomic representing measure with at most `n + 1` atoms.
pub fn recover_atoms(s: &TruncatedMomentSequence, iv: &Interval, cfg: &RecoveryConfig) -> Result<AtomicMeasure> {
    if cfg.grid_points < 3 {
        return Err(Error::Config("need at least 3 grid points".into()));
    }
    let verdict = sparse_feasible(s, iv, &cfg.feasibility)?;
    if let Feasibility::Infeasible(c) = &verdict {
        return Err(Error::Infeasible { value: c.value });
    }
    if s.sup_norm() == 0.0 {
        return Ok(AtomicMeasure::empty());
    }
    let exps = s.exps.as_slice();
    let target = 1e-7 * (1.0 + s.sup_norm());
    let scale = match iv {
        Interval::Closed { .. } => 1.0,
        Interval::HalfLine => halfline_scale(s),
    };
    let (lo, hi) = (iv.left(), iv.right());
    let fit = Fit {
        exps,
        target: &s.values,
        row_weight: s.values.iter().map(|v| 1.0 / (1.0 + v.abs())).collect(),
        lo,
        hi,
    };

    // a fit at this level is taken at once; looser ones only if nothing better turns up
    let exact = 1e-10 * (1.0 + s.sup_norm());
    let mut fallback: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    let mut best_residual = f64::INFINITY;
    for refinement in 0..3 {
        let count = cfg.grid_points * 4usize.pow(refinement);
        let grid = candidate_grid(iv, count, scale);
        let m = exps.len();
        let mut a = DMatrix::zeros(m, grid.len());
        for (g, x) in grid.iter().enumerate() {
            for (i, alpha) in exps.iter().enumerate() {
                a[(i, g)] = fit.row_weight[i] * power_derivative(*alpha, *x, 0)?;
            }
        }
        let b = DVector::from_iterator(m, s.values.iter().zip(&fit.row_weight).map(|(v, w)| v * w));
        let w = nnls(&a, &b);
        let support: Vec<usize> = (0..grid.len()).filter(|g| w[*g] > 0.0).collect();
        let spacing = match iv {
            Interval::Closed { a, b } => (b - a) / (count - 1) as f64,
            Interval::HalfLine => 0.0,
        };
        let clustered = if spacing > 0.0 {
            let xs: Vec<f64> = support.iter().map(|g| grid[*g]).collect();
            let cs: Vec<f64> = support.iter().map(|g| w[*g]).collect();
            consolidate(&xs, &cs, 2.5 * spacing)
        } else {
            // neighbouring grid indices on the half-line
            let mut xs = Vec::new();
            let mut cs = Vec::new();
            let mut prev: Option<usize> = None;
            for &g in &support {
                match prev {
                    Some(p) if g <= p + 2 => {
                        let last = xs.len() - 1;
                        let total: f64 = cs[last] + w[g];
                        xs[last] = (xs[last] * cs[last] + grid[g] * w[g]) / total;
                        cs[last] = total;
                    }
                    _ => {
                        xs.push(grid[g]);
                        cs.push(w[g]);
                    }
                }
                prev = Some(g);
            }
            (xs, cs)
        };
        let raw: (Vec<f64>, Vec<f64>) = support.iter().map(|g| (grid[*g], w[*g])).unzip();
        // clustered support first; the raw support and the quantile starts
        // escape local minima of the clustered fit
        let mut starts = vec![clustered, raw.clone()];
        let gap = match iv {
            Interval::Closed { a, b } => 0.02 * (b - a),
            Interval::HalfLine => 0.02 * scale,
        };
        starts.extend((1..=m.div_ceil(2)).map(|k| quantile_start(&raw.0, &raw.1, k, gap, lo, hi.min(1e300))));
        for (mut atoms, mut weights) in starts {
            fit.refine(&mut atoms, &mut weights, cfg.max_iter);
            let (atoms, weights) = consolidate(&atoms, &weights, 1e-10 * (1.0 + hi.min(1e300).abs()));
            let Some(r) = fit.residual(&atoms, &weights) else { continue };
            let residual = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            best_residual = best_residual.min(residual);
            if residual <= target && atoms.len() <= exps.len() {
                // a merge must reproduce the moments about as well as the fit it replaces
                let merge_target = target.min((10.0 * residual).max(exact));
                let (atoms, weights) = fit.reduce(atoms, weights, merge_target, cfg.max_iter);
                let r = fit.max_residual(&atoms, &weights);
                if r <= exact {
                    return AtomicMeasure::new(atoms, weights);
                }
                if fallback.as_ref().is_none_or(|f| r < f.0) {
                    fallback = Some((r, atoms, weights));
                }
            }
        }
    }
    match fallback {
        Some((_, atoms, weights)) => AtomicMeasure::new(atoms, weights),
        None => Err(Error::RecoveryFailed { residual: best_residual }),
    }
}

// ---------------------------------------------------------------------------
// signed representation

/// Weights `w_j` of any sign with `sum_j w_j x_j^{alpha_i} = s_i` at the
/// `n + 1` distinct points `pts`.
pub fn signed_representation(s: &TruncatedMomentSequence, pts: &[f64]) -> Result<Vec<f64>> {
    let m = s.exps.len();
    if pts.len() != m {
        return Err(Error::Shape(format!("need {m} points, got {}", pts.len())));
    }
    for i in 0..m {
        for j in 0..i {
            if pts[i] == pts[j] {
                return Err(Error::Shape(format!("point {} appears twice", pts[i])));
            }
        }
    }
    let mut a = DMatrix::zeros(m, m);
    for (j, x) in pts.iter().enumerate() {
        for (i, alpha) in s.exps.iter().enumerate() {
            a[(i, j)] = power_derivative(*alpha, *x, 0)?;
        }
    }
    let w = linalg::solve(&a, &DVector::from_column_slice(&s.values))?;
    Ok(w.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(v: &[f64]) -> ExponentVector {
        ExponentVector::new(v.to_vec()).unwrap()
    }

    fn seq(e: &[f64], v: &[f64]) -> TruncatedMomentSequence {
        TruncatedMomentSequence::new(ev(e), v.to_vec()).unwrap()
    }

    fn unit() -> Interval {
        Interval::closed(0.0, 1.0).unwrap()
    }

    fn two_atoms() -> AtomicMeasure {
        AtomicMeasure::new(vec![0.25, 0.75], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn riesz_pairs_matching_exponents() {
        let s = seq(&[0.0, 1.0, 2.0], &[1.0, 1.0, 1.0]);
        let p = SparsePolynomial::new(ev(&[0.0, 1.0]), vec![1.0, -1.0]).unwrap();
        assert_eq!(riesz(&s, &p).unwrap(), 0.0);
        assert_eq!(riesz(&s, &SparsePolynomial::zero(ev(&[0.0]))).unwrap(), 0.0);
        let s = seq(&[0.0, 1.0, 2.0], &[1.0, 2.0, 4.0]);
        let p = SparsePolynomial::new(ev(&[2.0]), vec![1.0]).unwrap();
        assert_eq!(riesz(&s, &p).unwrap(), 4.0);
        let q = SparsePolynomial::new(ev(&[0.5]), vec![1.0]).unwrap();
        assert_eq!(riesz(&s, &q), Err(Error::ExponentMismatch(0.5)));
    }

    #[test]
    fn moments_of_atoms() {
        let d1 = AtomicMeasure::new(vec![1.0], vec![1.0]).unwrap();
        assert_eq!(moments_of(&d1, &ev(&[0.0, 1.0, 2.0])).unwrap().values(), &[1.0, 1.0, 1.0]);
        assert_eq!(moments_of(&two_atoms(), &ev(&[0.0, 1.0])).unwrap().values(), &[1.0, 0.5]);
        let s = moments_of(&two_atoms(), &ev(&[0.0, 1.0, 2.0])).unwrap();
        assert!((s.values()[2] - 0.3125).abs() < 1e-15);
        let neg = AtomicMeasure::new(vec![-1.0], vec![1.0]).unwrap();
        assert!(matches!(moments_of(&neg, &ev(&[0.5])), Err(Error::Domain { .. })));
    }

    #[test]
    fn atomic_measure_rejects_bad_input() {
        assert!(AtomicMeasure::new(vec![0.5, 0.5], vec![1.0, 1.0]).is_err());
        assert!(AtomicMeasure::new(vec![0.5], vec![0.0]).is_err());
        assert!(AtomicMeasure::new(vec![0.5], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn hankel_examples() {
        let r = hankel_psd_checks(&seq(&[0.0, 1.0, 2.0], &[1.0, 0.0, 1.0])).unwrap();
        assert!(r.hamburger.pass);
        assert!(!r.stieltjes.pass);
        let r = hankel_psd_checks(&seq(&[0.0, 1.0, 2.0], &[1.0, 1.0, 1.0])).unwrap();
        assert!(r.hausdorff.pass && r.stieltjes.pass && r.hamburger.pass);
        assert!(matches!(
            hankel_psd_checks(&seq(&[0.0, 2.0], &[1.0, 1.0])),
            Err(Error::NotDense)
        ));
    }

    #[test]
    fn hankel_rank_condition() {
        // H(1) = [[1,1],[1,1]] is PSD but s_2 = 2 cannot follow a point mass
        let r = hankel_psd_checks(&seq(&[0.0, 1.0, 2.0, 3.0, 4.0], &[1.0, 1.0, 1.0, 1.0, 2.0])).unwrap();
        assert!(r.hamburger.min_eigenvalue > -1e-12);
        assert!(!r.hamburger.pass);
        // 1/2 (delta_0 + delta_1) over 0..3
        let r = hankel_psd_checks(&seq(&[0.0, 1.0, 2.0, 3.0], &[1.0, 0.5, 0.5, 0.5])).unwrap();
        assert!(r.hamburger.pass && r.stieltjes.pass && r.hausdorff.pass);
        // mass outside [0, 1]
        let r = hankel_psd_checks(&seq(&[0.0, 1.0, 2.0], &[1.0, 2.0, 4.0])).unwrap();
        assert!(r.stieltjes.pass && !r.hausdorff.pass && r.svecov.pass);
    }

    #[test]
    fn feasible_from_measure() {
        let s = moments_of(&two_atoms(), &ev(&[0.0, 1.0, 2.0])).unwrap();
        let v = sparse_feasible(&s, &unit(), &FeasibilityConfig::default()).unwrap();
        assert!(v.is_feasible(), "{v:?}");
        let zero = seq(&[0.0, 1.0, 2.0], &[0.0, 0.0, 0.0]);
        assert!(sparse_feasible(&zero, &unit(), &FeasibilityConfig::default())
            .unwrap()
            .is_feasible());
    }

    #[test]
    fn mass_bound_violation() {
        let s = seq(&[0.0, 1.0], &[1.0, 2.0]);
        let v = sparse_feasible(&s, &unit(), &FeasibilityConfig::default()).unwrap();
        let Feasibility::Infeasible(c) = v else { panic!("{v:?}") };
        assert!((c.value + 1.0).abs() < 1e-12);
        assert!((c.polynomial.coeffs()[0] - 1.0).abs() < 1e-12);
        assert!((c.polynomial.coeffs()[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn sparse_real_exponents() {
        let e = ev(&[0.0, 0.5, 1.7, 2.2]);
        let mu = AtomicMeasure::new(vec![0.3, 0.8], vec![1.0, 0.4]).unwrap();
        let s = moments_of(&mu, &e).unwrap();
        assert!(sparse_feasible(&s, &unit(), &FeasibilityConfig::default())
            .unwrap()
            .is_feasible());
        // pushing the top moment beyond what [0, 1] allows
        let mut bad = s.values().to_vec();
        bad[3] = bad[0] * 1.05;
        let bad = TruncatedMomentSequence::new(e, bad).unwrap();
        let v = sparse_feasible(&bad, &unit(), &FeasibilityConfig::default()).unwrap();
        let c = v.certificate().expect("certificate");
        assert!(riesz(&bad, &c.polynomial).unwrap() < 0.0);
    }

    #[test]
    fn halfline_feasibility() {
        let e = ev(&[0.0, 1.0, 2.0, 3.0]);
        let mu = AtomicMeasure::new(vec![0.5, 3.0], vec![1.0, 2.0]).unwrap();
        let s = moments_of(&mu, &e).unwrap();
        let hl = Interval::half_line();
        assert!(sparse_feasible(&s, &hl, &FeasibilityConfig::default())
            .unwrap()
            .is_feasible());
        // a negative first moment needs mass below 0
        let s = seq(&[0.0, 1.0, 2.0], &[1.0, -0.5, 1.0]);
        let v = sparse_feasible(&s, &hl, &FeasibilityConfig::default()).unwrap();
        assert!(matches!(v, Feasibility::Infeasible(_)), "{v:?}");
    }

    #[test]
    fn feasibility_requires_constant_at_zero() {
        let s = seq(&[0.5, 1.0], &[1.0, 1.0]);
        assert!(matches!(
            sparse_feasible(&s, &unit(), &FeasibilityConfig::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn recovers_two_atoms() {
        let s = moments_of(&two_atoms(), &ev(&[0.0, 1.0, 2.0, 3.0])).unwrap();
        let mu = recover_atoms(&s, &unit(), &RecoveryConfig::default()).unwrap();
        assert_eq!(mu.len(), 2);
        for (x, want) in mu.atoms().iter().zip([0.25, 0.75]) {
            assert!((x - want).abs() < 1e-6);
        }
        for c in mu.weights() {
            assert!((c - 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn recovers_boundary_mass() {
        let s = seq(&[0.0, 1.0, 2.0], &[1.0, 1.0, 1.0]);
        let mu = recover_atoms(&s, &unit(), &RecoveryConfig::default()).unwrap();
        assert_eq!(mu.atoms(), &[1.0]);
        assert!((mu.weights()[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn recovers_off_grid_atoms() {
        let e = ev(&[0.0, 0.3, 1.0, 2.5, 4.0]);
        let mu = AtomicMeasure::new(vec![0.123456, 0.654321], vec![0.7, 1.3]).unwrap();
        let s = moments_of(&mu, &e).unwrap();
        let got = recover_atoms(&s, &unit(), &RecoveryConfig::default()).unwrap();
        let back = moments_of(&got, &e).unwrap();
        for (u, v) in back.values().iter().zip(s.values()) {
            assert!((u - v).abs() < 1e-7 * (1.0 + s.sup_norm()));
        }
    }

    #[test]
    fn recover_rejects_infeasible() {
        let s = seq(&[0.0, 1.0], &[1.0, 2.0]);
        assert!(matches!(
            recover_atoms(&s, &unit(), &RecoveryConfig::default()),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn signed_weights() {
        let s = seq(&[0.0, 1.0], &[1.0, 5.0]);
        let w = signed_representation(&s, &[0.0, 1.0]).unwrap();
        assert!((w[0] + 4.0).abs() < 1e-12 && (w[1] - 5.0).abs() < 1e-12);
        let s = seq(&[0.0, 1.0, 2.0], &[1.0, 0.0, 1.0]);
        let w = signed_representation(&s, &[0.0, 1.0, 2.0]).unwrap();
        for (got, want) in w.iter().zip([1.5, -1.0, 0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
        let s = moments_of(&two_atoms(), &ev(&[0.0, 1.0])).unwrap();
        let w = signed_representation(&s, &[0.25, 0.75]).unwrap();
        assert!((w[0] - 0.5).abs() < 1e-12 && (w[1] - 0.5).abs() < 1e-12);
        assert!(signed_representation(&s, &[0.25, 0.25]).is_err());
    }
}
