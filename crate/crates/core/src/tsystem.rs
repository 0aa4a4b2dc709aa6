//! Function families, alternant matrices and T-/ET-system verdicts.
//!
//! A family `{f_0, ..., f_n}` is a T-system on an interval when every alternant
//! `det(f_i(x_j))` at strictly increasing nodes is nonzero (and then of constant
//! sign). The ET variant also admits repeated nodes, replacing a repeated node
//! by derivative rows. Both checks here are sampling procedures: `Pass` means
//! no counterexample was found among the sampled tuples, a failure comes with
//! the offending tuple.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::polynomial::{power_derivative, ExponentVector, Interval, SparsePolynomial, MAX_DERIVATIVE_ORDER};

/// Largest number of coinciding nodes in a confluent alternant.
pub const MAX_MULTIPLICITY: usize = MAX_DERIVATIVE_ORDER + 1;

/// Value, first and second derivative of a scalar function at a point.
pub type Jet = Arc<dyn Fn(f64) -> Result<[f64; 3]> + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Powers(ExponentVector),
    Exponentials(Vec<f64>),
    Cauchy(Vec<f64>),
    Scaled { base: Box<FunctionFamily>, weight: Jet, label: String },
    Composed { base: Box<FunctionFamily>, map: Jet, label: String },
}

/// An ordered family of `n + 1` real functions.
#[derive(Clone)]
pub struct FunctionFamily {
    kind: Kind,
}

fn strictly_increasing(values: &[f64], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidExponents(format!("{what} list is empty")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidExponents(format!("{what} list has a non-finite entry")));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidExponents(format!("{what} list must be strictly increasing")));
    }
    Ok(())
}

impl FunctionFamily {
    /// `{x^{alpha_0}, ..., x^{alpha_n}}`.
    pub fn powers(exps: ExponentVector) -> Self {
        FunctionFamily { kind: Kind::Powers(exps) }
    }

    /// `{e^{beta_0 x}, ..., e^{beta_n x}}` with increasing rates.
    pub fn exponentials(rates: Vec<f64>) -> Result<Self> {
        strictly_increasing(&rates, "rate")?;
        Ok(FunctionFamily { kind: Kind::Exponentials(rates) })
    }

    /// `{1/(x + s_0), ..., 1/(x + s_n)}` with increasing shifts, defined for `x > -s_0`.
    pub fn cauchy(shifts: Vec<f64>) -> Result<Self> {
        strictly_increasing(&shifts, "shift")?;
        Ok(FunctionFamily { kind: Kind::Cauchy(shifts) })
    }

    /// `{r f_i}` for a weight `r` that must be positive on the interval of use.
    pub fn scaled(base: FunctionFamily, weight: Jet, label: impl Into<String>) -> Self {
        FunctionFamily {
            kind: Kind::Scaled { base: Box::new(base), weight, label: label.into() },
        }
    }

    /// Scaling by a sparse polynomial weight.
    pub fn scaled_by_polynomial(base: FunctionFamily, weight: SparsePolynomial) -> Self {
        let label = format!("{weight}");
        let jet: Jet = Arc::new(move |x| {
            Ok([weight.eval(x)?, weight.eval_derivative(x, 1)?, weight.eval_derivative(x, 2)?])
        });
        FunctionFamily::scaled(base, jet, label)
    }

    /// `{f_i o g}` for a strictly increasing map `g`.
    pub fn composed(base: FunctionFamily, map: Jet, label: impl Into<String>) -> Self {
        FunctionFamily {
            kind: Kind::Composed { base: Box::new(base), map, label: label.into() },
        }
    }

    /// Composition with the affine map `x -> scale x + shift`, `scale > 0`.
    pub fn composed_affine(base: FunctionFamily, scale: f64, shift: f64) -> Result<Self> {
        if !(scale > 0.0) || !shift.is_finite() || !scale.is_finite() {
            return Err(Error::Config(format!("affine map needs a finite positive slope, got {scale}")));
        }
        let jet: Jet = Arc::new(move |x| Ok([scale * x + shift, scale, 0.0]));
        Ok(FunctionFamily::composed(base, jet, format!("{scale}*x + {shift}")))
    }

    /// Composition with `x -> x^p`, `p > 0`, on `x >= 0`.
    pub fn composed_power(base: FunctionFamily, p: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::Config(format!("power map needs a positive exponent, got {p}")));
        }
        let jet: Jet = Arc::new(move |x| {
            Ok([
                power_derivative(p, x, 0)?,
                power_derivative(p, x, 1)?,
                power_derivative(p, x, 2)?,
            ])
        });
        Ok(FunctionFamily::composed(base, jet, format!("x^{p}")))
    }

    /// Order `n`; the family has `n + 1` members.
    pub fn order(&self) -> usize {
        match &self.kind {
            Kind::Powers(e) => e.order(),
            Kind::Exponentials(r) => r.len() - 1,
            Kind::Cauchy(s) => s.len() - 1,
            Kind::Scaled { base, .. } | Kind::Composed { base, .. } => base.order(),
        }
    }

    pub fn len(&self) -> usize {
        self.order() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The exponent vector if this is a plain power family.
    pub fn as_powers(&self) -> Option<&ExponentVector> {
        match &self.kind {
            Kind::Powers(e) => Some(e),
            _ => None,
        }
    }

    /// Members `range` only, keeping any scaling or composition.
    pub fn subfamily(&self, range: std::ops::Range<usize>) -> Result<Self> {
        if range.start >= range.end || range.end > self.len() {
            return Err(Error::Shape(format!(
                "subfamily {range:?} of a family with {} members",
                self.len()
            )));
        }
        let kind = match &self.kind {
            Kind::Powers(e) => Kind::Powers(e.slice(range)?),
            Kind::Exponentials(r) => Kind::Exponentials(r[range].to_vec()),
            Kind::Cauchy(s) => Kind::Cauchy(s[range].to_vec()),
            Kind::Scaled { base, weight, label } => Kind::Scaled {
                base: Box::new(base.subfamily(range)?),
                weight: weight.clone(),
                label: label.clone(),
            },
            Kind::Composed { base, map, label } => Kind::Composed {
                base: Box::new(base.subfamily(range)?),
                map: map.clone(),
                label: label.clone(),
            },
        };
        Ok(FunctionFamily { kind })
    }

    /// `order`-th derivative of member `i` at `x`.
    pub fn member(&self, i: usize, x: f64, order: usize) -> Result<f64> {
        if order > MAX_DERIVATIVE_ORDER {
            return Err(Error::UnsupportedOrder { order, max: MAX_DERIVATIVE_ORDER });
        }
        if !x.is_finite() {
            return Err(Error::domain(x, "argument is not finite"));
        }
        match &self.kind {
            Kind::Powers(e) => power_derivative(e.as_slice()[i], x, order),
            Kind::Exponentials(r) => {
                let beta = r[i];
                Ok(beta.powi(order as i32) * (beta * x).exp())
            }
            Kind::Cauchy(s) => {
                let t = x + s[i];
                if t <= 0.0 {
                    return Err(Error::domain(x, format!("1/(x + {}) needs x > {}", s[i], -s[i])));
                }
                let k = order as i32;
                let fact = [1.0, 1.0, 2.0][order];
                Ok((-1.0f64).powi(k) * fact / t.powi(k + 1))
            }
            Kind::Scaled { base, weight, .. } => {
                let r = weight(x)?;
                if !(r[0] > 0.0) {
                    return Err(Error::domain(x, format!("scaling weight is not positive ({})", r[0])));
                }
                let g0 = base.member(i, x, 0)?;
                match order {
                    0 => Ok(r[0] * g0),
                    1 => Ok(r[1] * g0 + r[0] * base.member(i, x, 1)?),
                    _ => {
                        let g1 = base.member(i, x, 1)?;
                        let g2 = base.member(i, x, 2)?;
                        Ok(r[2] * g0 + 2.0 * r[1] * g1 + r[0] * g2)
                    }
                }
            }
            Kind::Composed { base, map, .. } => {
                let h = map(x)?;
                match order {
                    0 => base.member(i, h[0], 0),
                    1 => Ok(base.member(i, h[0], 1)? * h[1]),
                    _ => Ok(base.member(i, h[0], 2)? * h[1] * h[1] + base.member(i, h[0], 1)? * h[2]),
                }
            }
        }
    }

    /// `(f_0^{(order)}(x), ..., f_n^{(order)}(x))`.
    pub fn row(&self, x: f64, order: usize) -> Result<Vec<f64>> {
        (0..self.len()).map(|i| self.member(i, x, order)).collect()
    }

    /// Checks that every member is defined on `iv`.
    pub fn check_interval(&self, iv: &Interval) -> Result<()> {
        match &self.kind {
            Kind::Powers(e) => iv.check_exponents(e),
            Kind::Exponentials(_) => Ok(()),
            Kind::Cauchy(s) => {
                if iv.left() + s[0] > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidInterval(format!(
                        "Cauchy kernel 1/(x + {}) has a pole at or left of {}",
                        s[0],
                        iv.left()
                    )))
                }
            }
            Kind::Scaled { base, .. } => base.check_interval(iv),
            Kind::Composed { base, map, .. } => {
                let lo = map(iv.left())?[0];
                let image = match iv {
                    Interval::Closed { b, .. } => Interval::closed(lo, map(*b)?[0])?,
                    Interval::HalfLine if lo == 0.0 => Interval::HalfLine,
                    Interval::HalfLine => Interval::closed(lo, f64::MAX)?,
                };
                base.check_interval(&image)
            }
        }
    }
}

impl fmt::Debug for FunctionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Powers(e) => write!(f, "powers{e}"),
            Kind::Exponentials(r) => write!(f, "exponentials{r:?}"),
            Kind::Cauchy(s) => write!(f, "cauchy{s:?}"),
            Kind::Scaled { base, label, .. } => write!(f, "({label}) * {base:?}"),
            Kind::Composed { base, label, .. } => write!(f, "{base:?} o ({label})"),
        }
    }
}

fn check_count(fam: &FunctionFamily, pts: &[f64]) -> Result<()> {
    if pts.len() != fam.len() {
        return Err(Error::Shape(format!(
            "{} points for a family with {} members",
            pts.len(),
            fam.len()
        )));
    }
    Ok(())
}

/// `(f_i(x_j))` with row `j` belonging to node `x_j`. Nodes must be distinct.
pub fn alternant_matrix(fam: &FunctionFamily, pts: &[f64]) -> Result<DMatrix<f64>> {
    check_count(fam, pts)?;
    for (j, x) in pts.iter().enumerate() {
        if pts[..j].contains(x) {
            return Err(Error::Shape(format!("node {x} is repeated; use a confluent alternant")));
        }
    }
    let n = pts.len();
    let mut m = DMatrix::zeros(n, n);
    for (j, x) in pts.iter().enumerate() {
        for (i, v) in fam.row(*x, 0)?.into_iter().enumerate() {
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// Groups a nondecreasing tuple into `(value, multiplicity)` runs.
pub fn multiplicities(pts: &[f64]) -> Result<Vec<(f64, usize)>> {
    let mut groups: Vec<(f64, usize)> = Vec::new();
    for x in pts {
        match groups.last_mut() {
            Some((v, m)) if *v == *x => *m += 1,
            Some((v, _)) if *v > *x => {
                return Err(Error::Shape("confluent nodes must be nondecreasing".into()))
            }
            _ => groups.push((*x, 1)),
        }
    }
    if let Some((_, m)) = groups.iter().find(|(_, m)| *m > MAX_MULTIPLICITY) {
        return Err(Error::UnsupportedOrder { order: m - 1, max: MAX_DERIVATIVE_ORDER });
    }
    Ok(groups)
}

/// Alternant where a node repeated `m` times contributes rows
/// `f_i(x), f_i'(x), ..., f_i^{(m-1)}(x)`.
pub fn confluent_alternant(fam: &FunctionFamily, pts: &[f64]) -> Result<DMatrix<f64>> {
    check_count(fam, pts)?;
    let groups = multiplicities(pts)?;
    let n = pts.len();
    let mut m = DMatrix::zeros(n, n);
    let mut j = 0;
    for (x, mult) in groups {
        for order in 0..mult {
            for (i, v) in fam.row(x, order)?.into_iter().enumerate() {
                m[(j, i)] = v;
            }
            j += 1;
        }
    }
    Ok(m)
}

/// `prod_{i<j} (x_j - x_i)`.
pub fn vandermonde_product(pts: &[f64]) -> f64 {
    let mut acc = 1.0;
    for j in 0..pts.len() {
        for i in 0..j {
            acc *= pts[j] - pts[i];
        }
    }
    acc
}

/// Determinant of the confluent alternant of `{1, x, ..., x^n}`:
/// `prod_k prod_{j<m_k} j! * prod_{k<l} (x_l - x_k)^{m_k m_l}`.
pub fn confluent_vandermonde(groups: &[(f64, usize)]) -> f64 {
    let mut acc = 1.0;
    for (_, m) in groups {
        for j in 2..*m {
            acc *= (2..=j).product::<usize>() as f64;
        }
    }
    for l in 0..groups.len() {
        for k in 0..l {
            acc *= (groups[l].0 - groups[k].0).powi((groups[k].1 * groups[l].1) as i32);
        }
    }
    acc
}

/// Schur polynomial `s_lambda(x)` for `lambda_j = alpha_{n-j} - (n - j)`,
/// the (confluent) bialternant ratio. Repeated points are allowed up to
/// [`MAX_MULTIPLICITY`].
///
/// Dividing the alternant by the Vandermonde product column by column turns
/// entry `(i, k)` into the divided difference `h_{alpha_i - k}(x_0, ..., x_k)`
/// of complete homogeneous polynomials, so the ratio is evaluated without
/// cancelling nearby points and repeated points need no special case.
pub fn schur_eval(alpha: &ExponentVector, pts: &[f64]) -> Result<f64> {
    if !alpha.all_nonnegative_integer() {
        return Err(Error::InvalidExponents(format!(
            "Schur evaluation needs nonnegative integer exponents, got {alpha}"
        )));
    }
    if alpha.len() != pts.len() {
        return Err(Error::Shape(format!(
            "{} points for {} exponents",
            pts.len(),
            alpha.len()
        )));
    }
    let mut sorted = pts.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
    multiplicities(&sorted)?;
    let exps: Vec<usize> = alpha.iter().map(|a| *a as usize).collect();
    let top = *exps.last().expect("nonempty exponent vector");
    // h[k][m] = h_m(x_0, ..., x_k)
    let mut h = vec![vec![0.0; top + 1]; sorted.len()];
    for (k, x) in sorted.iter().enumerate() {
        for m in 0..=top {
            let prev = if k > 0 { h[k - 1][m] } else if m == 0 { 1.0 } else { 0.0 };
            let up = if m > 0 { x * h[k][m - 1] } else { 0.0 };
            h[k][m] = prev + up;
        }
    }
    let n = exps.len();
    let m = DMatrix::from_fn(n, n, |i, k| if exps[i] >= k { h[k][exps[i] - k] } else { 0.0 });
    Ok(linalg::determinant(&m))
}

/// Outcome of a sampled T-/ET-system check.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// No sampled tuple produced a vanishing or sign-flipped determinant.
    Pass,
    /// The tuple has a zero determinant or one of the opposite sign.
    FailWithWitness(Vec<f64>),
    /// Some determinant fell below the tolerance without a sign change.
    Inconclusive { tuple: Vec<f64>, rcond: f64 },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn witness(&self) -> Option<&[f64]> {
        match self {
            Verdict::FailWithWitness(t) => Some(t),
            _ => None,
        }
    }
}

/// Sampling parameters for [`is_t_system`] and [`is_et_system`].
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingConfig {
    /// Grid points per coordinate.
    pub grid_points: usize,
    /// When the number of candidate tuples exceeds this, a seeded random
    /// subset plus adversarial endpoint and cluster tuples is checked instead.
    pub max_tuples: usize,
    pub seed: u64,
    /// Reciprocal condition number of the equilibrated matrix treated as vanishing.
    pub zero_tol: f64,
    /// Scan horizon on the half-line; `None` means 10.
    pub horizon: Option<f64>,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            grid_points: 24,
            max_tuples: 20_000,
            seed: 0,
            zero_tol: 1e-12,
            horizon: None,
        }
    }
}

impl SamplingConfig {
    fn validate(&self) -> Result<()> {
        if self.grid_points < 2 {
            return Err(Error::Config(format!("grid needs at least 2 points, got {}", self.grid_points)));
        }
        if self.max_tuples == 0 {
            return Err(Error::Config("max_tuples must be positive".into()));
        }
        if !(self.zero_tol >= 0.0) {
            return Err(Error::Config(format!("zero tolerance {} is invalid", self.zero_tol)));
        }
        if let Some(h) = self.horizon {
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::Config(format!("horizon {h} must be finite and positive")));
            }
        }
        Ok(())
    }
}

/// Nodes used by the checks: equispaced on `[a, b]`; on the half-line `0`
/// followed by geometrically spaced points up to the horizon.
pub fn sample_grid(iv: &Interval, count: usize, horizon: f64) -> Vec<f64> {
    match iv {
        Interval::Closed { .. } => iv.grid(count, horizon),
        Interval::HalfLine => {
            let lo = horizon * 1e-3;
            let mut pts = vec![0.0];
            let k = count - 1;
            for i in 0..k {
                let t = if k == 1 { 1.0 } else { i as f64 / (k - 1) as f64 };
                pts.push(lo * (horizon / lo).powf(t));
            }
            pts
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Index tuples in lexicographic order: strictly increasing when `cap == 1`,
/// nondecreasing with each index repeated at most `cap` times otherwise.
fn enumerate_tuples(grid: usize, size: usize, cap: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(grid: usize, size: usize, cap: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..grid {
            let run = cur.iter().rev().take_while(|v| **v == i).count();
            if run >= cap {
                continue;
            }
            cur.push(i);
            let next = if cap == 1 { i + 1 } else { i };
            rec(grid, size, cap, next, cur, out);
            cur.pop();
        }
    }
    rec(grid, size, cap, 0, &mut Vec::with_capacity(size), out);
}

fn candidate_count(grid: usize, size: usize, cap: usize) -> f64 {
    if cap == 1 {
        binomial(grid, size)
    } else {
        // multisets, ignoring the multiplicity cap (an upper bound)
        binomial(grid + size - 1, size)
    }
}

fn valid_multiset(t: &[usize], cap: usize) -> bool {
    let mut run = 1;
    for w in t.windows(2) {
        if w[0] == w[1] {
            run += 1;
            if run > cap {
                return false;
            }
        } else {
            run = 1;
        }
    }
    true
}

fn sampled_tuples(grid: usize, size: usize, cap: usize, cfg: &SamplingConfig) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if candidate_count(grid, size, cap) <= cfg.max_tuples as f64 {
        enumerate_tuples(grid, size, cap, &mut out);
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut attempts = 0;
    while out.len() < cfg.max_tuples && attempts < 20 * cfg.max_tuples {
        attempts += 1;
        let mut t: Vec<usize> = if cap == 1 {
            sample(&mut rng, grid, size).into_vec()
        } else {
            (0..size).map(|_| rng.gen_range(0..grid)).collect()
        };
        t.sort_unstable();
        if cap > 1 && !valid_multiset(&t, cap) {
            continue;
        }
        out.push(t);
    }
    // adversarial tuples: sliding clusters of adjacent nodes, which include
    // the tuples packed against either endpoint
    if cap == 1 {
        for start in 0..=grid - size {
            out.push((start..start + size).collect());
        }
    } else {
        for start in 0..grid {
            let mut t = Vec::with_capacity(size);
            let mut i = start;
            while t.len() < size {
                let idx = i.min(grid - 1);
                let reps = cap.min(size - t.len());
                for _ in 0..reps {
                    t.push(idx);
                }
                i += 1;
            }
            if valid_multiset(&t, cap) {
                out.push(t);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

enum TupleClass {
    Sign(f64),
    Vanishing(f64),
    Zero,
}

fn classify(m: &DMatrix<f64>, zero_tol: f64) -> TupleClass {
    if linalg::has_structural_zero(m) {
        return TupleClass::Zero;
    }
    let rcond = linalg::reciprocal_condition(m);
    if rcond <= zero_tol {
        return TupleClass::Vanishing(rcond);
    }
    let (sign, _) = linalg::log_determinant(m);
    if sign == 0.0 {
        TupleClass::Zero
    } else {
        TupleClass::Sign(sign)
    }
}

fn run_check(fam: &FunctionFamily, iv: &Interval, cfg: &SamplingConfig, confluent: bool) -> Result<Verdict> {
    cfg.validate()?;
    fam.check_interval(iv)?;
    let size = fam.len();
    let grid_count = cfg.grid_points.max(size + 1);
    let grid = sample_grid(iv, grid_count, cfg.horizon.unwrap_or(10.0));
    let cap = if confluent { MAX_MULTIPLICITY.min(size) } else { 1 };
    let tuples = sampled_tuples(grid.len(), size, cap, cfg);

    let classes: Vec<Result<TupleClass>> = tuples
        .par_iter()
        .map(|t| {
            let pts: Vec<f64> = t.iter().map(|i| grid[*i]).collect();
            let m = if confluent {
                confluent_alternant(fam, &pts)?
            } else {
                alternant_matrix(fam, &pts)?
            };
            Ok(classify(&m, cfg.zero_tol))
        })
        .collect();

    let mut reference: Option<f64> = None;
    let mut weakest: Option<(Vec<f64>, f64)> = None;
    for (t, class) in tuples.iter().zip(classes) {
        let pts: Vec<f64> = t.iter().map(|i| grid[*i]).collect();
        match class? {
            TupleClass::Zero => return Ok(Verdict::FailWithWitness(pts)),
            TupleClass::Vanishing(rcond) => {
                if weakest.as_ref().is_none_or(|(_, r)| rcond < *r) {
                    weakest = Some((pts, rcond));
                }
            }
            TupleClass::Sign(s) => match reference {
                None => reference = Some(s),
                Some(r) if r != s => return Ok(Verdict::FailWithWitness(pts)),
                _ => {}
            },
        }
    }
    Ok(match weakest {
        Some((tuple, rcond)) => Verdict::Inconclusive { tuple, rcond },
        None => Verdict::Pass,
    })
}

/// Sampled check that all alternants at strictly increasing nodes in `iv` are
/// nonzero and share one sign.
pub fn is_t_system(fam: &FunctionFamily, iv: &Interval, cfg: &SamplingConfig) -> Result<Verdict> {
    run_check(fam, iv, cfg, false)
}

/// Sampled check over nondecreasing node tuples, repeated nodes contributing
/// derivative rows.
pub fn is_et_system(fam: &FunctionFamily, iv: &Interval, cfg: &SamplingConfig) -> Result<Verdict> {
    run_check(fam, iv, cfg, true)
}
