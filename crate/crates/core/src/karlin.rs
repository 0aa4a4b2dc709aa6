//! Karlin decomposition `f = f_* + f^*` of positive sparse polynomials.
//!
//! For `f > 0` on `[a, b]` with positive leading coefficient both parts are
//! nonnegative determinantal polynomials whose zero sets have full index `n`
//! and strictly interlace, with `f^*(b) = 0`:
//!
//! * `n = 2m`: `f_*` has double zeros `x_1 < ... < x_m`, `f^*` vanishes at `a`,
//!   `b` and has double zeros `y_1 < ... < y_{m-1}`, with
//!   `a < x_1 < y_1 < ... < x_m < b`.
//! * `n = 2m + 1`: `f_*` vanishes at `a` and has double zeros `x_1 < ... < x_m`,
//!   `f^*` has double zeros `y_1 < ... < y_m` and vanishes at `b`, with
//!   `a < y_1 < x_1 < ... < y_m < x_m < b`.
//!
//! On `[0, inf)` the zero at `b` is replaced by "no `x^{alpha_n}` component":
//! `f_*` carries the full leading coefficient and `f^*` lives in the span of
//! the lower members.
//!
//! The interior knots are found by a Levenberg-Marquardt iteration on the
//! knot vector. For fixed knots both parts are determined up to scale, so
//! the two scale constants are eliminated by linear least squares (variable
//! projection). Knots are parametrized by positive gaps, which keeps every
//! iterate strictly ordered.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dd::{self, Dd, DdMatrix};
use crate::error::{Error, Result};
use crate::extremal::{count_zeros, halfline_root_bound, KnotSet, ZeroConfig};
use crate::polynomial::{power_derivative, Interval, SparsePolynomial};

/// Solver and verification settings.
#[derive(Debug, Clone, PartialEq)]
pub struct KarlinConfig {
    /// Seed for the fallback random starts.
    pub seed: u64,
    /// Iteration cap per start.
    pub max_iter: usize,
    /// Random interlacing starts tried after the Chebyshev start fails.
    pub restarts: usize,
    /// Optional interior starting knots (the `n - 1` interlaced free knots).
    pub initial_knots: Option<Vec<f64>>,
    /// Points of the verification grid.
    pub verify_grid: usize,
    /// Relative tolerance for the reconstruction residual and the grid minima.
    pub tol: f64,
}

impl Default for KarlinConfig {
    fn default() -> Self {
        KarlinConfig {
            seed: 0,
            max_iter: 200,
            restarts: 16,
            initial_knots: None,
            verify_grid: 10_001,
            tol: 1e-8,
        }
    }
}

/// The pair `(f_*, f^*)` with its knot sets and determinant scale constants.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub f_star: SparsePolynomial,
    pub f_upper: SparsePolynomial,
    pub knots_star: KnotSet,
    pub knots_upper: KnotSet,
    /// `f_*` over the determinant with free first row and the knots of `f_*`,
    /// including the sign convention of the parity (see the module docs).
    pub c_star: f64,
    pub c_upper: f64,
    /// Sup-norm of `f - f_* - f^*` on the verification grid.
    pub residual: f64,
    /// Set when no proper decomposition exists and `f_* = f`, `f^* = 0`.
    pub degenerate: bool,
    pub interval: Interval,
    /// Solver iterations of the successful start.
    pub iterations: usize,
}

impl Decomposition {
    /// Free interior knots in increasing order, both parts merged.
    pub fn interior_knots(&self) -> Vec<f64> {
        let mut z: Vec<f64> = self
            .knots_star
            .interior_locations()
            .into_iter()
            .chain(self.knots_upper.interior_locations())
            .collect();
        z.sort_by(|a, b| a.partial_cmp(b).expect("finite knots"));
        z.dedup();
        z
    }
}

/// Quantities recomputed from scratch on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub residual: f64,
    pub min_star: f64,
    pub min_upper: f64,
    pub sup_f: f64,
    pub upper_at_b: f64,
    pub grid_points: usize,
}

impl Verification {
    /// Residual and both minima within `tol * sup|f|`.
    pub fn passes(&self, tol: f64) -> bool {
        let s = tol * self.sup_f;
        self.residual <= s && self.min_star >= -s && self.min_upper >= -s && self.upper_at_b.abs() <= s.max(tol)
    }
}

/// Right end of the grid used on the half-line.
pub fn halfline_horizon(f: &SparsePolynomial, knots: &[f64]) -> f64 {
    let far = knots.iter().fold(0.0_f64, |m, x| m.max(*x));
    (2.0 * halfline_root_bound(f)).max(2.0 * far).max(4.0)
}

/// Evaluates `f`, `f_*` and `f^*` on `points` equispaced points and reports
/// the reconstruction residual and the minima of both parts.
pub fn verify_decomposition(f: &SparsePolynomial, dec: &Decomposition, points: usize) -> Result<Verification> {
    let knots: Vec<f64> = dec.knots_star.locations().into_iter().chain(dec.knots_upper.locations()).collect();
    let xs = dec.interval.grid(points.max(2), halfline_horizon(f, &knots));
    let mut out = Verification {
        residual: 0.0,
        min_star: f64::INFINITY,
        min_upper: f64::INFINITY,
        sup_f: 0.0,
        upper_at_b: 0.0,
        grid_points: xs.len(),
    };
    for x in &xs {
        let fv = f.eval(*x)?;
        let s = dec.f_star.eval(*x)?;
        let u = dec.f_upper.eval(*x)?;
        out.sup_f = out.sup_f.max(fv.abs());
        out.residual = out.residual.max((fv - s - u).abs());
        out.min_star = out.min_star.min(s);
        out.min_upper = out.min_upper.min(u);
    }
    if dec.interval.is_closed() {
        out.upper_at_b = dec.f_upper.eval(dec.interval.right())?;
    } else {
        out.upper_at_b = dec.f_upper.leading_coefficient();
    }
    Ok(out)
}

/// Grid minimum of `f` with golden-section refinement around the smallest
/// grid values. Returns `(argmin, min)`.
fn minimum_on(f: &SparsePolynomial, xs: &[f64]) -> Result<(f64, f64)> {
    let vs: Vec<f64> = xs.iter().map(|x| f.eval(*x)).collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|a, b| vs[*a].partial_cmp(&vs[*b]).unwrap_or(std::cmp::Ordering::Equal));
    let mut best = (xs[order[0]], vs[order[0]]);
    if best.1 <= 0.0 {
        return Ok(best);
    }
    for &i in order.iter().take(8) {
        let lo = xs[i.saturating_sub(1)];
        let hi = xs[(i + 1).min(xs.len() - 1)];
        let (mut l, mut h) = (lo, hi);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..100 {
            let c = h - g * (h - l);
            let d = l + g * (h - l);
            if f.eval(c)? < f.eval(d)? {
                h = d;
            } else {
                l = c;
            }
        }
        let x = 0.5 * (l + h);
        let v = f.eval(x)?;
        if v < best.1 {
            best = (x, v);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Domain {
    Closed { a: f64, b: f64 },
    Half { scale: f64 },
}

/// One part of the decomposition: its columns, fixed zeros and conventions.
#[derive(Debug, Clone)]
struct Part {
    cols: std::ops::Range<usize>,
    /// Zeros independent of the free knots (endpoints, zeros of `f`).
    fixed: Vec<(f64, usize)>,
    /// Coefficient of `x^{alpha_n}` fixed to this value.
    lead: Option<f64>,
    /// Sign relating the part to its determinant.
    det_sign: f64,
}

#[derive(Clone)]
struct Setup {
    exps: Vec<f64>,
    domain: Domain,
    /// Order of the free knot pattern; the number of free knots is `nfree - 1`.
    nfree: usize,
    star: Part,
    upper: Part,
    /// Members on the nodes, in double-double so that parts with large
    /// cancelling coefficients are still evaluated accurately.
    table: DdMatrix,
    fvals: DVector<f64>,
    weights: DVector<f64>,
}

struct Evaluated {
    residual: DVector<f64>,
    star: DVector<f64>,
    upper: DVector<f64>,
    c_star: f64,
    c_upper: f64,
}

fn merge_zeros(list: &mut Vec<(f64, usize)>) {
    list.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite knots"));
    let mut merged: Vec<(f64, usize)> = Vec::with_capacity(list.len());
    for (x, m) in list.drain(..) {
        match merged.last_mut() {
            Some((y, k)) if *y == x => *k += m,
            _ => merged.push((x, m)),
        }
    }
    *list = merged;
}

/// `d^order/dx^order x^alpha` in double-double; `None` where the f64 version
/// reports a domain error.
fn power_derivative_dd(alpha: f64, x: f64, order: usize) -> Result<Dd> {
    if x > 0.0 {
        let mut factor = Dd::ONE;
        for j in 0..order {
            factor = factor * (alpha - j as f64);
        }
        if factor.hi == 0.0 {
            return Ok(Dd::ZERO);
        }
        return Ok(factor * Dd::powf(x, alpha - order as f64));
    }
    power_derivative(alpha, x, order).map(Dd::from)
}

/// Knot rows over `cols`; at 0 a missing derivative falls back to the limit
/// rows that remove the lowest members.
fn part_rows(exps: &[f64], cols: &std::ops::Range<usize>, zeros: &[(f64, usize)]) -> Option<DdMatrix> {
    let width = cols.len();
    let count: usize = zeros.iter().map(|z| z.1).sum();
    let mut m = DdMatrix::zeros(count, width);
    let mut r = 0;
    for (x, mult) in zeros {
        for o in 0..*mult {
            let row: std::result::Result<Vec<Dd>, Error> =
                exps[cols.clone()].iter().map(|e| power_derivative_dd(*e, *x, o)).collect();
            match row {
                Ok(v) => {
                    for (j, val) in v.into_iter().enumerate() {
                        m.set(r, j, val);
                    }
                }
                Err(Error::Domain { .. }) if *x == 0.0 && o < width => m.set(r, o, Dd::ONE),
                Err(_) => return None,
            }
            r += 1;
        }
    }
    Some(m)
}

fn node_weights(fvals: &DVector<f64>) -> DVector<f64> {
    let floor = 1e-2 * fvals.amax();
    fvals.map(|v| 1.0 / (v.abs() + floor))
}

impl Setup {
    fn n(&self) -> usize {
        self.exps.len() - 1
    }

    fn knots_from_theta(&self, theta: &[f64]) -> Vec<f64> {
        match self.domain {
            Domain::Closed { a, b } => {
                let w: Vec<f64> = std::iter::once(1.0).chain(theta.iter().map(|t| t.clamp(-700.0, 700.0).exp())).collect();
                let total: f64 = w.iter().sum();
                let mut acc = 0.0;
                theta
                    .iter()
                    .enumerate()
                    .map(|(j, _)| {
                        acc += w[j];
                        a + (b - a) * acc / total
                    })
                    .collect()
            }
            Domain::Half { scale } => {
                let mut acc = 0.0;
                theta
                    .iter()
                    .map(|t| {
                        acc += t.clamp(-700.0, 700.0).exp();
                        scale * acc
                    })
                    .collect()
            }
        }
    }

    fn theta_from_knots(&self, z: &[f64]) -> Vec<f64> {
        match self.domain {
            Domain::Closed { a, b } => {
                // gaps relative to the first one, which is pinned to weight 1
                let Some(first) = z.first() else {
                    return Vec::new();
                };
                let g0 = first - a;
                let mut ends: Vec<f64> = z.to_vec();
                ends.push(b);
                ends.windows(2).map(|w| ((w[1] - w[0]) / g0).ln()).collect()
            }
            Domain::Half { scale } => {
                let mut prev = 0.0;
                z.iter()
                    .map(|x| {
                        let t = ((x - prev) / scale).ln();
                        prev = *x;
                        t
                    })
                    .collect()
            }
        }
    }

    /// Free knots belonging to `f_*` and to `f^*`. The pattern starts with an
    /// `f_*` knot for even order and with an `f^*` knot for odd order, and
    /// always ends with an `f_*` knot.
    fn split(&self, z: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let offset = self.nfree % 2;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (j, v) in z.iter().enumerate() {
            if (j + offset).is_multiple_of(2) {
                xs.push(*v);
            } else {
                ys.push(*v);
            }
        }
        (xs, ys)
    }

    fn part_zeros(part: &Part, doubles: &[f64]) -> Vec<(f64, usize)> {
        let mut zeros: Vec<(f64, usize)> = part.fixed.iter().copied().chain(doubles.iter().map(|x| (*x, 2))).collect();
        merge_zeros(&mut zeros);
        zeros
    }

    /// Coefficients over the full family, up to scale.
    fn part_direction(&self, part: &Part, doubles: &[f64]) -> Option<Vec<Dd>> {
        let zeros = Self::part_zeros(part, doubles);
        let rows = part_rows(&self.exps, &part.cols, &zeros)?;
        if rows.rows + 1 != part.cols.len() {
            return None;
        }
        let v = dd::null_vector(&rows)?;
        let mut full = vec![Dd::ZERO; self.exps.len()];
        for (j, c) in part.cols.clone().enumerate() {
            full[c] = v[j];
        }
        Some(full)
    }

    /// Signed determinant coefficients of a part (normalization constant 1).
    fn part_determinant(&self, part: &Part, doubles: &[f64]) -> Option<DVector<f64>> {
        let zeros = Self::part_zeros(part, doubles);
        let rows = part_rows(&self.exps, &part.cols, &zeros)?;
        let cof = dd::first_row_cofactors(&rows);
        let mut full = DVector::zeros(self.exps.len());
        for (j, c) in part.cols.clone().enumerate() {
            full[c] = cof[j].to_f64();
        }
        Some(full)
    }

    /// Both parts at the knots of `theta`, normalized (`f_*` by its leading
    /// coefficient when fixed, otherwise to 1 at its largest node value),
    /// together with their values on the nodes.
    #[allow(clippy::type_complexity)]
    fn parts(&self, theta: &[f64]) -> Option<(Vec<Dd>, Vec<Dd>, DVector<f64>, DVector<f64>)> {
        let z = self.knots_from_theta(theta);
        if z.iter().any(|v| !v.is_finite()) || z.windows(2).any(|w| w[0] >= w[1]) {
            return None;
        }
        if let Domain::Closed { a, b } = self.domain {
            if z.iter().any(|v| *v <= a || *v >= b) {
                return None;
            }
        } else if z.first().is_some_and(|v| *v <= 0.0) {
            return None;
        }
        let (xs, ys) = self.split(&z);
        let n = self.n();
        let mut star = self.part_direction(&self.star, &xs)?;
        let mut upper = self.part_direction(&self.upper, &ys)?;

        // orient each part positive where it is largest on the nodes
        let orient = |u: &mut Vec<Dd>| -> Option<()> {
            let vals = self.table.mul_vec(u);
            let pivot = vals.iter().copied().fold(Dd::ZERO, |m, v| if v.hi.abs() > m.hi.abs() { v } else { m });
            if pivot.hi == 0.0 || !pivot.is_finite() {
                return None;
            }
            u.iter_mut().for_each(|c| *c = *c / pivot);
            Some(())
        };
        match self.star.lead {
            Some(lead) => {
                if star[n].hi.abs() < 1e-300 {
                    return None;
                }
                let s = Dd::from(lead) / star[n];
                star.iter_mut().for_each(|c| *c = *c * s);
            }
            None => orient(&mut star)?,
        }
        orient(&mut upper)?;
        let on_nodes = |u: &[Dd]| DVector::from_iterator(self.table.rows, self.table.mul_vec(u).into_iter().map(Dd::to_f64));
        let vs = on_nodes(&star);
        let vu = on_nodes(&upper);
        Some((star, upper, vs, vu))
    }

    fn evaluate(&self, theta: &[f64]) -> Option<Evaluated> {
        let (star, upper, vs, vu) = self.parts(theta)?;
        let w = &self.weights;
        let rhs = self.fvals.component_mul(w);
        let (c_star, c_upper, residual) = if self.star.lead.is_some() {
            let a = vu.component_mul(w);
            let b = &rhs - vs.component_mul(w);
            let denom = a.dot(&a);
            if denom == 0.0 {
                return None;
            }
            let c = a.dot(&b) / denom;
            (1.0, c, b - a * c)
        } else {
            let mut a = DMatrix::zeros(w.len(), 2);
            a.set_column(0, &vs.component_mul(w));
            a.set_column(1, &vu.component_mul(w));
            let sol = a.clone().svd(true, true).solve(&rhs, 1e-14).ok()?;
            let res = &rhs - &a * &sol;
            (sol[0], sol[1], res)
        };
        if residual.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let scaled = |u: &[Dd], c: f64| DVector::from_iterator(u.len(), u.iter().map(|v| (*v * c).to_f64()));
        Some(Evaluated { residual, star: scaled(&star, c_star), upper: scaled(&upper, c_upper), c_star, c_upper })
    }
}

struct Solved {
    theta: Vec<f64>,
    eval: Evaluated,
    iterations: usize,
}

fn cost(e: &Option<Evaluated>) -> f64 {
    e.as_ref().map_or(f64::INFINITY, |e| e.residual.norm_squared())
}

/// Levenberg-Marquardt on the knot parameters with a forward-difference Jacobian.
fn levenberg_marquardt(setup: &Setup, theta0: Vec<f64>, max_iter: usize) -> Option<Solved> {
    let mut theta = theta0;
    let mut current = setup.evaluate(&theta)?;
    let mut c = current.residual.norm_squared();
    let p = theta.len();
    let mut lambda = 1e-3;
    let mut iterations = 0;
    if p == 0 {
        return Some(Solved { theta, eval: current, iterations });
    }
    while iterations < max_iter {
        iterations += 1;
        if current.residual.amax() <= 1e-15 {
            break;
        }
        let r = current.residual.clone();
        let mut jac = DMatrix::zeros(r.len(), p);
        let mut ok = true;
        for k in 0..p {
            // central differences
            let h = 1e-6 * (1.0 + theta[k].abs());
            let mut tp = theta.clone();
            let mut tm = theta.clone();
            tp[k] += h;
            tm[k] -= h;
            match (setup.evaluate(&tp), setup.evaluate(&tm)) {
                (Some(ep), Some(em)) => jac.set_column(k, &((&ep.residual - &em.residual) / (2.0 * h))),
                (Some(ep), None) => jac.set_column(k, &((&ep.residual - &r) / h)),
                (None, Some(em)) => jac.set_column(k, &((&r - &em.residual) / h)),
                (None, None) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            break;
        }
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &r;
        let mut improved = false;
        while lambda < 1e14 {
            let mut a = jtj.clone();
            for i in 0..p {
                a[(i, i)] += lambda * (jtj[(i, i)] + 1e-12);
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t + s).collect();
            let e = setup.evaluate(&trial);
            let tc = cost(&e);
            if tc < c {
                let small = step.amax() <= 1e-15 * (1.0 + theta.iter().fold(0.0_f64, |m, t| m.max(t.abs())));
                theta = trial;
                current = e.expect("finite cost implies a value");
                c = tc;
                lambda = (lambda / 5.0).max(1e-12);
                improved = true;
                if small {
                    return Some(Solved { theta, eval: current, iterations });
                }
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    Some(Solved { theta, eval: current, iterations })
}

/// Relative residual accepted from the solver before grid verification.
const SOLVE_TOL: f64 = 1e-10;

fn chebyshev_nodes(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| {
            let t = ((2 * k + 1) as f64 * std::f64::consts::PI / (2 * count) as f64).cos();
            0.5 * (lo + hi) - 0.5 * (hi - lo) * t
        })
        .collect()
}

fn build_setup(f: &SparsePolynomial, domain: Domain, nfree: usize, star: Part, upper: Part) -> Result<Setup> {
    let exps = f.exps().as_slice().to_vec();
    let n = exps.len() - 1;
    let count = (2 * (n + 1)).max(16);
    let (lo, hi) = match domain {
        Domain::Closed { a, b } => (a, b),
        Domain::Half { scale } => (0.0, 4.0 * scale),
    };
    let nodes = chebyshev_nodes(lo, hi, count);
    let mut table = DdMatrix::zeros(count, n + 1);
    for (k, x) in nodes.iter().enumerate() {
        for (i, e) in exps.iter().enumerate() {
            table.set(k, i, power_derivative_dd(*e, *x, 0)?);
        }
    }
    let coeffs: Vec<Dd> = f.coeffs().iter().map(|c| Dd::from(*c)).collect();
    let fvals = DVector::from_iterator(count, table.mul_vec(&coeffs).into_iter().map(Dd::to_f64));
    let weights = node_weights(&fvals);
    Ok(Setup { exps, domain, nfree, star, upper, table, fvals, weights })
}

fn initial_knots(setup: &Setup) -> Vec<f64> {
    let k = setup.nfree;
    match setup.domain {
        Domain::Closed { a, b } => (1..k)
            .map(|j| a + 0.5 * (b - a) * (1.0 - (std::f64::consts::PI * j as f64 / k as f64).cos()))
            .collect(),
        Domain::Half { scale } => (1..k)
            .map(|j| scale * (std::f64::consts::FRAC_PI_2 * j as f64 / k as f64).tan().powi(2))
            .collect(),
    }
}

fn random_knots(setup: &Setup, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let count = setup.nfree.saturating_sub(1);
    let mut z: Vec<f64> = match setup.domain {
        Domain::Closed { a, b } => (0..count).map(|_| a + (b - a) * rng.gen_range(0.02..0.98)).collect(),
        Domain::Half { scale } => (0..count).map(|_| scale * rng.gen_range(-3.0f64..3.0).exp()).collect(),
    };
    z.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    for j in 1..z.len() {
        if z[j] <= z[j - 1] {
            z[j] = z[j - 1] * (1.0 + 1e-3) + 1e-6;
        }
    }
    z
}

fn solution_ok(setup: &Setup, s: &Solved, tol: f64) -> bool {
    let e = &s.eval;
    if e.residual.amax() > tol {
        return false;
    }
    let positive_upper = setup.upper.cols.len() <= 1 && e.upper.iter().all(|v| *v == 0.0) || e.c_upper > 0.0;
    e.c_star > 0.0 && (positive_upper || setup.nfree == 0)
}

/// Follows the decomposition of `(1 - t) f_0 + t f` from `t = 0` to 1, where
/// `f_0` is the sum of the parts at the knots `z0`, so its solution is known.
/// Every intermediate target is strictly positive, and uniqueness makes the
/// knots move continuously in `t`.
fn homotopy(setup: &Setup, z0: &[f64], max_iter: usize) -> Option<Solved> {
    let mut theta = setup.theta_from_knots(z0);
    let (_, _, vs, vu) = setup.parts(&theta)?;
    let f0 = if setup.star.lead.is_some() { &vs + &vu * vs.amax() } else { (&vs + &vu) * (0.5 * setup.fvals.amax()) };
    let mut t = 0.0_f64;
    let mut dt = 0.125_f64;
    let mut steps = 0;
    while t < 1.0 && steps < 400 {
        steps += 1;
        let next = (t + dt).min(1.0);
        let fvals = &f0 * (1.0 - next) + &setup.fvals * next;
        let stage = Setup { weights: node_weights(&fvals), fvals, ..setup.clone() };
        match levenberg_marquardt(&stage, theta.clone(), max_iter.min(50)) {
            Some(s) if solution_ok(&stage, &s, 1e-8) => {
                theta = s.theta;
                t = next;
                dt = (2.0 * dt).min(0.5);
            }
            _ => {
                dt *= 0.25;
                if dt < 1e-6 {
                    return None;
                }
            }
        }
    }
    if t < 1.0 {
        return None;
    }
    levenberg_marquardt(setup, theta, max_iter)
}

/// Runs the caller's start and the Chebyshev start, then a homotopy from the
/// Chebyshev knots, then random starts.
fn solve(setup: &Setup, cfg: &KarlinConfig) -> Result<Solved> {
    let mut starts: Vec<Vec<f64>> = Vec::new();
    if let Some(init) = &cfg.initial_knots {
        if init.len() != setup.nfree.saturating_sub(1) {
            return Err(Error::Config(format!(
                "{} initial knots given, the pattern has {}",
                init.len(),
                setup.nfree.saturating_sub(1)
            )));
        }
        starts.push(init.clone());
    }
    let chebyshev = initial_knots(setup);
    starts.push(chebyshev.clone());
    let mut best: Option<Solved> = None;
    let consider = |s: Solved, best: &mut Option<Solved>| -> Option<Solved> {
        if solution_ok(setup, &s, SOLVE_TOL) {
            return Some(s);
        }
        if best.as_ref().is_none_or(|b| s.eval.residual.amax() < b.eval.residual.amax()) {
            *best = Some(s);
        }
        None
    };
    for z in &starts {
        if let Some(s) = levenberg_marquardt(setup, setup.theta_from_knots(z), cfg.max_iter) {
            if let Some(done) = consider(s, &mut best) {
                return Ok(done);
            }
        }
    }
    if let Some(s) = homotopy(setup, &chebyshev, cfg.max_iter) {
        if let Some(done) = consider(s, &mut best) {
            return Ok(done);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.restarts {
        let z = random_knots(setup, &mut rng);
        if let Some(s) = levenberg_marquardt(setup, setup.theta_from_knots(&z), cfg.max_iter) {
            if let Some(done) = consider(s, &mut best) {
                return Ok(done);
            }
        }
    }
    match best {
        Some(b) => Err(Error::NewtonDivergence {
            last_iterate: setup.knots_from_theta(&b.theta),
            residual: b.eval.residual.amax(),
            iterations: b.iterations,
        }),
        None => Err(Error::NewtonDivergence { last_iterate: Vec::new(), residual: f64::INFINITY, iterations: 0 }),
    }
}

fn ratio_to(part: &DVector<f64>, det: &DVector<f64>, sign: f64) -> f64 {
    let dd = det.dot(det);
    if dd == 0.0 {
        return 0.0;
    }
    sign * part.dot(det) / dd
}

fn to_sparse(f: &SparsePolynomial, v: &DVector<f64>) -> Result<SparsePolynomial> {
    SparsePolynomial::new(f.exps().clone(), v.iter().copied().collect())
}

fn finish(f: &SparsePolynomial, setup: &Setup, solved: Solved, iv: Interval, cfg: &KarlinConfig) -> Result<Decomposition> {
    let z = setup.knots_from_theta(&solved.theta);
    let (xs, ys) = setup.split(&z);
    let det_star = setup.part_determinant(&setup.star, &xs);
    let det_upper = setup.part_determinant(&setup.upper, &ys);
    let c_star = det_star.map_or(0.0, |d| ratio_to(&solved.eval.star, &d, setup.star.det_sign));
    let c_upper = det_upper.map_or(0.0, |d| ratio_to(&solved.eval.upper, &d, setup.upper.det_sign));
    let mut upper = solved.eval.upper.clone();
    if setup.star.lead.is_some() {
        // the top member belongs to f_* alone
        upper[setup.n()] = 0.0;
    }
    let zeros_star = Setup::part_zeros(&setup.star, &xs);
    let zeros_upper = Setup::part_zeros(&setup.upper, &ys);
    let dec = Decomposition {
        f_star: to_sparse(f, &solved.eval.star)?,
        f_upper: to_sparse(f, &upper)?,
        knots_star: KnotSet::from_points(iv, &zeros_star)?,
        knots_upper: KnotSet::from_points(iv, &zeros_upper)?,
        c_star,
        c_upper,
        residual: 0.0,
        degenerate: false,
        interval: iv,
        iterations: solved.iterations,
    };
    verified(f, dec, cfg)
}

fn verified(f: &SparsePolynomial, mut dec: Decomposition, cfg: &KarlinConfig) -> Result<Decomposition> {
    let v = verify_decomposition(f, &dec, cfg.verify_grid)?;
    dec.residual = v.residual;
    if !v.passes(cfg.tol) {
        return Err(Error::NewtonDivergence {
            last_iterate: dec.interior_knots(),
            residual: v.residual.max(-v.min_star).max(-v.min_upper),
            iterations: dec.iterations,
        });
    }
    Ok(dec)
}

fn check_positive(f: &SparsePolynomial, xs: &[f64]) -> Result<()> {
    let (x, v) = minimum_on(f, xs)?;
    if v <= 0.0 {
        return Err(Error::NotStrictlyPositive { witness: x, value: v });
    }
    Ok(())
}

/// Parts for the free knot pattern of order `nfree` on `[a, b]`, with `pinned`
/// zeros shared by both parts. Sign conventions follow the parity of `n`.
fn closed_parts(n: usize, nfree: usize, a: f64, b: f64, pinned: &[(f64, usize)]) -> (Part, Part) {
    let mut star_fixed = pinned.to_vec();
    let mut upper_fixed = pinned.to_vec();
    if nfree % 2 == 1 {
        star_fixed.push((a, 1));
    } else {
        upper_fixed.push((a, 1));
    }
    upper_fixed.push((b, 1));
    merge_zeros(&mut star_fixed);
    merge_zeros(&mut upper_fixed);
    let (ss, su) = if n.is_multiple_of(2) { (1.0, -1.0) } else { (-1.0, 1.0) };
    (
        Part { cols: 0..n + 1, fixed: star_fixed, lead: None, det_sign: ss },
        Part { cols: 0..n + 1, fixed: upper_fixed, lead: None, det_sign: su },
    )
}

fn check_closed(f: &SparsePolynomial, iv: &Interval) -> Result<(f64, f64)> {
    let Interval::Closed { a, b } = *iv else {
        return Err(Error::InvalidInterval("a closed interval [a, b] is required".into()));
    };
    iv.check_exponents(f.exps())?;
    Ok((a, b))
}

/// Karlin decomposition of `f > 0` on `[a, b]`.
///
/// The knots are solved in double-double arithmetic, but the parts are
/// returned with `f64` coefficients and verified in `f64` on the grid. When
/// the powers are nearly dependent on `[a, b]` (narrow intervals far from 0,
/// closely spaced exponents) the parts have large cancelling coefficients and
/// their evaluation error alone can exceed `tol * ||f||`; the verification
/// then fails with [`Error::NewtonDivergence`] even though the solve converged.
pub fn decompose_interval(f: &SparsePolynomial, iv: &Interval, cfg: &KarlinConfig) -> Result<Decomposition> {
    let (a, b) = check_closed(f, iv)?;
    let lead = f.leading_coefficient();
    let grid = iv.grid(cfg.verify_grid.max(3), 0.0);
    check_positive(f, &grid)?;
    let n = f.order();
    if n == 0 {
        return Ok(Decomposition {
            f_star: f.clone(),
            f_upper: SparsePolynomial::zero(f.exps().clone()),
            knots_star: KnotSet::empty(*iv),
            knots_upper: KnotSet::empty(*iv),
            c_star: lead,
            c_upper: 0.0,
            residual: 0.0,
            degenerate: true,
            interval: *iv,
            iterations: 0,
        });
    }
    let (star, upper) = closed_parts(n, n, a, b, &[]);
    let setup = build_setup(f, Domain::Closed { a, b }, n, star, upper)?;
    let solved = solve(&setup, cfg)?;
    finish(f, &setup, solved, *iv, cfg)
}

/// Karlin decomposition of `f > 0` on `[0, inf)`; requires `alpha_0 = 0` in
/// effect (otherwise `f(0) = 0`) and a positive leading coefficient.
pub fn decompose_halfline(f: &SparsePolynomial, cfg: &KarlinConfig) -> Result<Decomposition> {
    let iv = Interval::HalfLine;
    iv.check_exponents(f.exps())?;
    let lead = f.leading_coefficient();
    if lead < 0.0 {
        return Err(Error::TailNegative(lead));
    }
    if lead == 0.0 {
        return Err(Error::BadLeadingCoefficient(lead));
    }
    let horizon = halfline_horizon(f, &[]);
    check_positive(f, &iv.grid(cfg.verify_grid.max(3), horizon))?;
    if f.exps().first() != 0.0 {
        return Err(Error::NotStrictlyPositive { witness: 0.0, value: f.eval(0.0)? });
    }
    let n = f.order();
    let a0 = f.coeffs()[0];
    let scale = if n == 0 { 1.0 } else { (a0 / lead).powf(1.0 / f.exps().last()).clamp(1e-6, 1e6) };
    let (star, upper) = if n.is_multiple_of(2) {
        (
            Part { cols: 0..n + 1, fixed: vec![], lead: Some(lead), det_sign: 1.0 },
            Part { cols: 1..n.max(1), fixed: vec![], lead: None, det_sign: 1.0 },
        )
    } else {
        (
            Part { cols: 1..n + 1, fixed: vec![], lead: Some(lead), det_sign: 1.0 },
            Part { cols: 0..n, fixed: vec![], lead: None, det_sign: 1.0 },
        )
    };
    if n == 0 {
        return Ok(Decomposition {
            f_star: f.clone(),
            f_upper: SparsePolynomial::zero(f.exps().clone()),
            knots_star: KnotSet::empty(iv),
            knots_upper: KnotSet::empty(iv),
            c_star: lead,
            c_upper: 0.0,
            residual: 0.0,
            degenerate: false,
            interval: iv,
            iterations: 0,
        });
    }
    let setup = build_setup(f, Domain::Half { scale }, n, star, upper)?;
    let solved = solve(&setup, cfg)?;
    let mut dec = finish(f, &setup, solved, iv, cfg)?;
    // the zero at 0 of the part without the constant column
    let zero_part = if n.is_multiple_of(2) { &mut dec.knots_upper } else { &mut dec.knots_star };
    let mut pts: Vec<(f64, usize)> = zero_part.entries().iter().map(|k| (k.location, k.multiplicity)).collect();
    pts.insert(0, (0.0, 1));
    *zero_part = KnotSet::from_points(iv, &pts)?;
    Ok(dec)
}

/// Decomposition of `f >= 0` on `[a, b]` whose parts share the zeros of `f`.
/// When `f` has `n` zeros (counting multiplicity) `f` is itself extremal and
/// the result is the flagged degenerate split `f_* = f`, `f^* = 0`.
pub fn certify_nonneg(f: &SparsePolynomial, iv: &Interval, cfg: &KarlinConfig) -> Result<Decomposition> {
    let (a, b) = check_closed(f, iv)?;
    let n = f.order();
    let grid = iv.grid(cfg.verify_grid.max(3), 0.0);
    let (xmin, vmin) = minimum_on(f, &grid)?;
    let sup = f.sup_norm_on(&grid)?;
    if sup == 0.0 {
        return Err(Error::IdenticallyZero);
    }
    if vmin < -1e-10 * sup {
        return Err(Error::NegativeSomewhere { witness: xmin, value: vmin });
    }
    let zeros = count_zeros(f, iv, &ZeroConfig { grid_points: cfg.verify_grid.max(3), ..ZeroConfig::default() })?;
    if let Some(x) = zeros.nodal.iter().find(|x| !iv.is_endpoint(**x)) {
        // a sign change: report a negative value next to it
        let h = 1e-6 * (b - a);
        let (l, r) = (f.eval(x - h)?, f.eval(x + h)?);
        let (w, v) = if l < r { (x - h, l) } else { (x + h, r) };
        return Err(Error::NegativeSomewhere { witness: w, value: v.min(0.0) });
    }
    let mut pinned: Vec<(f64, usize)> = Vec::new();
    for x in zeros.nodal.iter().filter(|x| iv.is_endpoint(**x)) {
        let x = if (x - a).abs() < (x - b).abs() { a } else { b };
        // endpoint multiplicity from the vanishing derivatives
        let scale: f64 = f.coeffs().iter().map(|c| c.abs()).sum::<f64>().max(sup);
        let mut mult = 1;
        while mult < 3 {
            match f.eval_derivative(x, mult) {
                Ok(d) if d.abs() <= 1e-9 * scale => mult += 1,
                _ => break,
            }
        }
        pinned.push((x, mult));
    }
    for x in &zeros.nonnodal {
        pinned.push((*x, 2));
    }
    merge_zeros(&mut pinned);
    let r: usize = pinned.iter().map(|p| p.1).sum();
    if r > n {
        return Err(Error::TooManyZeros { zeros: r, order: n });
    }
    if r == n {
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        let setup_part = Part { cols: 0..n + 1, fixed: pinned.clone(), lead: None, det_sign: sign };
        let exps = f.exps().as_slice();
        let rows = part_rows(exps, &setup_part.cols, &pinned)
            .ok_or_else(|| Error::ConstructionFailed("zero rows of f are undefined".into()))?;
        let det = DVector::from_iterator(n + 1, dd::first_row_cofactors(&rows).into_iter().map(Dd::to_f64));
        let fv = DVector::from_column_slice(f.coeffs());
        let mut upper_zeros = pinned.clone();
        if !upper_zeros.iter().any(|z| z.0 == b) {
            upper_zeros.push((b, 1));
        }
        let dec = Decomposition {
            f_star: f.clone(),
            f_upper: SparsePolynomial::zero(f.exps().clone()),
            knots_star: KnotSet::from_points(*iv, &pinned)?,
            knots_upper: KnotSet::from_points(*iv, &upper_zeros)?,
            c_star: ratio_to(&fv, &det, sign),
            c_upper: 0.0,
            residual: 0.0,
            degenerate: true,
            interval: *iv,
            iterations: 0,
        };
        return verified(f, dec, cfg);
    }
    let nfree = n - r;
    let (star, upper) = closed_parts(n, nfree, a, b, &pinned);
    let setup = build_setup(f, Domain::Closed { a, b }, nfree, star, upper)?;
    let solved = solve(&setup, cfg)?;
    finish(f, &setup, solved, *iv, cfg)
}
