//! Polynomials with prescribed zeros, interpolation and zero counting.
//!
//! Zeros are described by a [`KnotSet`]. A knot of multiplicity `m` contributes
//! `m` rows (value and derivatives) to a confluent alternant; placing a free
//! row `(f_0(x), ..., f_n(x))` on top gives a polynomial vanishing at every
//! knot. Its coefficients are the signed cofactors of that free row.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::polynomial::{Interval, RealFunction, SparsePolynomial};
use crate::tsystem::{FunctionFamily, MAX_MULTIPLICITY};

/// Rank gap of the knot rows below which the determinant counts as identically zero.
const DEGENERATE_TOL: f64 = 1e-13;

/// Zero of prescribed multiplicity. `endpoint` marks knots at an end of the interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knot {
    pub location: f64,
    pub multiplicity: usize,
    pub endpoint: bool,
}

/// Ordered knots on an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotSet {
    entries: Vec<Knot>,
    interval: Interval,
}

impl KnotSet {
    pub fn new(interval: Interval, entries: Vec<Knot>) -> Result<Self> {
        for w in entries.windows(2) {
            if w[0].location >= w[1].location {
                return Err(Error::Shape("knot locations must be strictly increasing".into()));
            }
        }
        for k in &entries {
            if !k.location.is_finite() || !interval.contains(k.location) {
                return Err(Error::domain(k.location, format!("knot lies outside {interval}")));
            }
            if k.multiplicity == 0 || k.multiplicity > MAX_MULTIPLICITY {
                return Err(Error::UnsupportedOrder {
                    order: k.multiplicity.saturating_sub(1),
                    max: MAX_MULTIPLICITY - 1,
                });
            }
            if k.endpoint != interval.is_endpoint(k.location) {
                return Err(Error::Shape(format!(
                    "knot {} has endpoint flag {} on {interval}",
                    k.location, k.endpoint
                )));
            }
        }
        Ok(KnotSet { entries, interval })
    }

    /// Knots from `(location, multiplicity)` pairs; endpoint flags follow the location.
    pub fn from_points(interval: Interval, points: &[(f64, usize)]) -> Result<Self> {
        let entries = points
            .iter()
            .map(|(x, m)| Knot {
                location: *x,
                multiplicity: *m,
                endpoint: interval.is_endpoint(*x),
            })
            .collect();
        KnotSet::new(interval, entries)
    }

    /// Interior knots as double zeros and endpoint knots as simple zeros.
    pub fn standard(interval: Interval, locations: &[f64]) -> Result<Self> {
        let pts: Vec<(f64, usize)> = locations
            .iter()
            .map(|x| (*x, if interval.is_endpoint(*x) { 1 } else { 2 }))
            .collect();
        KnotSet::from_points(interval, &pts)
    }

    pub fn empty(interval: Interval) -> Self {
        KnotSet { entries: Vec::new(), interval }
    }

    pub fn entries(&self) -> &[Knot] {
        &self.entries
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn locations(&self) -> Vec<f64> {
        self.entries.iter().map(|k| k.location).collect()
    }

    pub fn interior_locations(&self) -> Vec<f64> {
        self.entries.iter().filter(|k| !k.endpoint).map(|k| k.location).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.entries.iter().any(|k| k.location == x)
    }

    /// Number of rows the knots contribute to a confluent alternant.
    pub fn row_count(&self) -> usize {
        self.entries.iter().map(|k| k.multiplicity).sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Index of a zero set: 2 per interior point, 1 per endpoint.
pub fn index(ks: &KnotSet) -> usize {
    ks.entries.iter().map(|k| if k.endpoint { 1 } else { 2 }).sum()
}

/// Linear combination of the members of a [`FunctionFamily`].
#[derive(Debug, Clone)]
pub struct FamilyPolynomial {
    family: FunctionFamily,
    coeffs: Vec<f64>,
}

impl FamilyPolynomial {
    pub fn new(family: FunctionFamily, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != family.len() {
            return Err(Error::Shape(format!(
                "{} coefficients for a family with {} members",
                coeffs.len(),
                family.len()
            )));
        }
        Ok(FamilyPolynomial { family, coeffs })
    }

    pub fn family(&self) -> &FunctionFamily {
        &self.family
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn scaled(&self, factor: f64) -> Self {
        FamilyPolynomial {
            family: self.family.clone(),
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// The same polynomial as a [`SparsePolynomial`] when the family is a power family.
    pub fn to_sparse(&self) -> Option<SparsePolynomial> {
        let exps = self.family.as_powers()?;
        SparsePolynomial::new(exps.clone(), self.coeffs.clone()).ok()
    }

    fn add_scaled(&self, other: &FamilyPolynomial, factor: f64) -> Self {
        FamilyPolynomial {
            family: self.family.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + factor * b).collect(),
        }
    }
}

impl RealFunction for FamilyPolynomial {
    fn value(&self, x: f64) -> Result<f64> {
        self.derivative(x, 0)
    }

    fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        let mut acc = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c != 0.0 {
                acc += c * self.family.member(i, x, order)?;
            }
        }
        Ok(acc)
    }
}

/// The unique member of the span through `(x_i, y_i)`.
pub fn interpolate(fam: &FunctionFamily, pts: &[f64], vals: &[f64]) -> Result<FamilyPolynomial> {
    if pts.len() != vals.len() {
        return Err(Error::Shape(format!("{} points but {} values", pts.len(), vals.len())));
    }
    let m = crate::tsystem::alternant_matrix(fam, pts)?;
    let rhs = DVector::from_column_slice(vals);
    let sol = linalg::solve(&m, &rhs)?;
    let p = FamilyPolynomial::new(fam.clone(), sol.iter().copied().collect())?;
    for (x, y) in pts.iter().zip(vals) {
        let got = p.value(*x)?;
        if (got - y).abs() > 1e-9 * (1.0 + y.abs()) {
            return Err(Error::SingularSystem(format!(
                "interpolant misses ({x}, {y}) by {:e}",
                (got - y).abs()
            )));
        }
    }
    Ok(p)
}

/// How to fix the free constant of a determinantal polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Normalization {
    /// Coefficient of the last family member equal to +1; falls back to
    /// [`Normalization::SupNorm`] when that coefficient vanishes.
    #[default]
    LeadingCoefficient,
    /// The determinant itself times the given constant.
    Scale(f64),
    /// Scaled so that `f(x) = value`.
    ValueAt { x: f64, value: f64 },
    /// Positive multiple of the determinant with sup-norm 1 on the interval.
    SupNorm,
}

/// Rows of the knot part of the determinant. A repeated knot at 0 where some
/// power has no derivative uses the limit rows `e_0, ..., e_{m-1}` instead,
/// i.e. it removes the lowest `m` members from the span.
pub(crate) fn knot_rows(fam: &FunctionFamily, ks: &KnotSet) -> Result<DMatrix<f64>> {
    let cols = fam.len();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(ks.row_count());
    for k in ks.entries() {
        let derivs: Result<Vec<Vec<f64>>> = (0..k.multiplicity).map(|o| fam.row(k.location, o)).collect();
        match derivs {
            Ok(r) => rows.extend(r),
            Err(Error::Domain { .. }) if k.location == 0.0 && fam.as_powers().is_some() => {
                for o in 0..k.multiplicity {
                    let mut e = vec![0.0; cols];
                    if o < cols {
                        e[o] = 1.0;
                    }
                    rows.push(e);
                }
            }
            Err(e) => return Err(e),
        }
    }
    let mut m = DMatrix::zeros(rows.len(), cols);
    for (j, r) in rows.iter().enumerate() {
        for (i, v) in r.iter().enumerate() {
            m[(j, i)] = *v;
        }
    }
    Ok(m)
}

/// Cofactor coefficients of the determinant with free first row and the knot
/// rows below, i.e. the normalization constant is 1.
pub fn determinant_coefficients(fam: &FunctionFamily, ks: &KnotSet) -> Result<Vec<f64>> {
    fam.check_interval(ks.interval())?;
    let rows = knot_rows(fam, ks)?;
    let n = fam.order();
    let r = rows.nrows();
    if rows.row_iter().any(|row| row.iter().all(|v| *v == 0.0)) {
        // a zero knot row: the determinant vanishes identically
        return Err(Error::DegenerateDeterminant("a knot row is identically zero".into()));
    }
    if r > n {
        if r == n + 1 && linalg::reciprocal_condition(&rows) <= DEGENERATE_TOL {
            return Err(Error::DegenerateDeterminant("knot rows are linearly dependent".into()));
        }
        return Err(Error::Shape(format!("{r} knot rows for a family of order {n}")));
    }
    if r < n {
        return Err(Error::Shape(format!(
            "{r} knot rows for a family of order {n}; the determinant needs exactly {n}"
        )));
    }
    let (dir, gap) = linalg::null_vector(&rows)
        .ok_or_else(|| Error::DegenerateDeterminant("knot rows are not finite".into()))?;
    if gap <= DEGENERATE_TOL {
        return Err(Error::DegenerateDeterminant("knot rows are linearly dependent".into()));
    }
    let cof = linalg::first_row_cofactors(&rows);
    let scale: f64 = cof.iter().zip(dir.iter()).map(|(a, b)| a * b).sum();
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::DegenerateDeterminant("determinant scale is zero".into()));
    }
    let mut coeffs: Vec<f64> = dir.iter().map(|v| v * scale).collect();
    // a knot row with a single nonzero entry forces that coefficient to vanish
    for row in rows.row_iter() {
        let nonzero: Vec<usize> = (0..row.len()).filter(|i| row[*i] != 0.0).collect();
        if let [k] = nonzero[..] {
            coeffs[k] = 0.0;
        }
    }
    Ok(coeffs)
}

/// Evaluation points used for sup-norms and sign checks.
pub(crate) fn check_grid(iv: &Interval, count: usize, horizon: f64) -> Vec<f64> {
    iv.grid(count, horizon)
}

fn knot_horizon(ks: &KnotSet) -> f64 {
    let far = ks.locations().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    2.0 * (1.0 + far)
}

fn sup_norm<F: RealFunction>(f: &F, pts: &[f64]) -> Result<f64> {
    let mut best: f64 = 0.0;
    for x in pts {
        best = best.max(f.value(*x)?.abs());
    }
    Ok(best)
}

/// `c * det(...)` vanishing at every knot to its multiplicity.
pub fn poly_with_zeros(fam: &FunctionFamily, ks: &KnotSet, normalization: Normalization) -> Result<FamilyPolynomial> {
    let coeffs = determinant_coefficients(fam, ks)?;
    let raw = FamilyPolynomial::new(fam.clone(), coeffs)?;
    let grid = check_grid(ks.interval(), 2001, knot_horizon(ks));
    let factor = match normalization {
        Normalization::Scale(c) => c,
        Normalization::ValueAt { x, value } => {
            let v = raw.value(x)?;
            if v == 0.0 {
                return Err(Error::ConstructionFailed(format!("polynomial vanishes at {x}")));
            }
            value / v
        }
        Normalization::LeadingCoefficient => {
            let lead = raw.coeffs[raw.coeffs.len() - 1];
            let norm = raw.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
            if lead.abs() > 1e-12 * norm {
                1.0 / lead
            } else {
                1.0 / sup_norm(&raw, &grid)?
            }
        }
        Normalization::SupNorm => 1.0 / sup_norm(&raw, &grid)?,
    };
    let p = raw.scaled(factor);
    verify_knots(&p, ks)?;
    Ok(p)
}

fn verify_knots(p: &FamilyPolynomial, ks: &KnotSet) -> Result<()> {
    for k in ks.entries() {
        for o in 0..k.multiplicity {
            let Ok(row) = p.family.row(k.location, o) else {
                // limit rows at 0; the value row still applies
                continue;
            };
            let scale = p.coeffs.iter().map(|c| c.abs()).sum::<f64>() * row.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
            let v: f64 = row.iter().zip(&p.coeffs).map(|(r, c)| r * c).sum();
            if v.abs() > 1e-8 * scale.max(f64::MIN_POSITIVE) && v.abs() > 1e-300 {
                return Err(Error::ConstructionFailed(format!(
                    "derivative {o} at knot {} is {v:e}, expected 0",
                    k.location
                )));
            }
        }
    }
    Ok(())
}

/// Extra interior double zeros placed at fraction `t` of the widest free gap,
/// one at a time.
fn padding(iv: &Interval, occupied: &[f64], count: usize, t: f64, horizon: f64) -> Vec<f64> {
    let right = if iv.is_closed() { iv.right() } else { horizon };
    let mut pts: Vec<f64> = occupied.to_vec();
    pts.push(iv.left());
    pts.push(right);
    let mut added = Vec::with_capacity(count);
    for _ in 0..count {
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite knots"));
        pts.dedup();
        let (lo, hi) = pts
            .windows(2)
            .map(|w| (w[0], w[1]))
            .fold((0.0, 0.0), |best, g| if g.1 - g.0 > best.1 - best.0 { g } else { best });
        let x = lo + t * (hi - lo);
        added.push(x);
        pts.push(x);
    }
    added
}

fn merged_knots(iv: &Interval, base: &[(f64, usize)], extra: &[(f64, usize)]) -> Result<KnotSet> {
    let mut all: Vec<(f64, usize)> = base.iter().chain(extra).copied().collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite knots"));
    KnotSet::from_points(*iv, &all)
}

/// Determinantal polynomials that vanish at `base` and carry `deficit` extra
/// rows, in variants whose extra zeros differ. Returns each variant embedded in
/// the full family.
fn padded_variants(fam: &FunctionFamily, iv: &Interval, base: &[(f64, usize)], deficit: usize) -> Result<Vec<FamilyPolynomial>> {
    let occupied: Vec<f64> = base.iter().map(|b| b.0).collect();
    let horizon = 2.0 * (1.0 + occupied.iter().fold(0.0_f64, |m, x| m.max(x.abs())));
    let mut variants = Vec::new();
    if deficit == 0 {
        let ks = merged_knots(iv, base, &[])?;
        variants.push(poly_with_zeros(fam, &ks, Normalization::SupNorm)?);
        return Ok(variants);
    }
    let mut plans: Vec<(Option<f64>, bool)> = Vec::new();
    if deficit % 2 == 1 {
        let free_ends: Vec<f64> = if iv.is_closed() {
            [iv.left(), iv.right()].into_iter().filter(|e| !occupied.contains(e)).collect()
        } else if occupied.contains(&0.0) {
            vec![]
        } else {
            vec![0.0]
        };
        for e in &free_ends {
            plans.push((Some(*e), false));
        }
        if free_ends.len() < 2 {
            // drop the last member, which lowers the order by one
            plans.push((None, true));
        }
    } else {
        plans.push((None, false));
    }
    for (end, drop_last) in plans {
        let remaining = deficit - usize::from(end.is_some()) - usize::from(drop_last);
        let doubles = remaining / 2;
        let ts: &[f64] = if doubles == 0 { &[0.5] } else { &[1.0 / 3.0, 2.0 / 3.0] };
        for t in ts {
            let mut extra: Vec<(f64, usize)> = padding(iv, &occupied, doubles, *t, horizon)
                .into_iter()
                .map(|x| (x, 2))
                .collect();
            if let Some(e) = end {
                extra.push((e, 1));
            }
            let ks = merged_knots(iv, base, &extra)?;
            let p = if drop_last {
                let sub = fam.subfamily(0..fam.len() - 1)?;
                let q = poly_with_zeros(&sub, &ks, Normalization::SupNorm)?;
                let mut c = q.coeffs.clone();
                c.push(0.0);
                FamilyPolynomial::new(fam.clone(), c)?
            } else {
                poly_with_zeros(fam, &ks, Normalization::SupNorm)?
            };
            variants.push(p);
            if doubles == 0 {
                break;
            }
        }
    }
    Ok(variants)
}

fn orient_and_sum(variants: Vec<FamilyPolynomial>, reference: &[f64]) -> Result<FamilyPolynomial> {
    let mut total: Option<FamilyPolynomial> = None;
    for p in variants {
        // sign of the largest value over the reference points
        let mut best = (0.0_f64, 0.0_f64);
        for x in reference {
            let v = p.value(*x)?;
            if v.abs() > best.0 {
                best = (v.abs(), v.signum());
            }
        }
        if best.0 == 0.0 {
            return Err(Error::ConstructionFailed("variant vanishes on the reference points".into()));
        }
        let q = p.scaled(best.1);
        total = Some(match total {
            None => q,
            Some(t) => t.add_scaled(&q, 1.0),
        });
    }
    total.ok_or_else(|| Error::ConstructionFailed("no admissible variant".into()))
}

fn normalize_sup(p: FamilyPolynomial, grid: &[f64]) -> Result<FamilyPolynomial> {
    let s = sup_norm(&p, grid)?;
    if s == 0.0 || !s.is_finite() {
        return Err(Error::ConstructionFailed("polynomial vanishes on the check grid".into()));
    }
    Ok(p.scaled(1.0 / s))
}

/// A polynomial `f >= 0` on the interval vanishing at the knots, double at
/// interior knots and simple at endpoints, normalized to sup-norm 1.
pub fn nonneg_poly_with_zeros(fam: &FunctionFamily, ks: &KnotSet) -> Result<FamilyPolynomial> {
    let n = fam.order();
    let idx = index(ks);
    if idx > n {
        return Err(Error::IndexTooLarge { index: idx, order: n });
    }
    let iv = *ks.interval();
    let base: Vec<(f64, usize)> = ks
        .entries()
        .iter()
        .map(|k| (k.location, if k.endpoint { 1 } else { 2 }))
        .collect();
    let grid = check_grid(&iv, 10_001, knot_horizon(ks));
    let variants = padded_variants(fam, &iv, &base, n - idx)?;
    let p = normalize_sup(orient_and_sum(variants, &grid)?, &grid)?;
    let min = grid.iter().map(|x| p.value(*x)).collect::<Result<Vec<_>>>()?.into_iter().fold(f64::INFINITY, f64::min);
    if min < -1e-9 {
        return Err(Error::ConstructionFailed(format!("constructed polynomial reaches {min:e}")));
    }
    Ok(p)
}

/// A polynomial changing sign exactly at `nodal` and touching zero at the
/// interior points `nonnodal`, positive to the right of its last zero.
pub fn poly_with_nodal_nonnodal(fam: &FunctionFamily, iv: &Interval, nonnodal: &[f64], nodal: &[f64]) -> Result<FamilyPolynomial> {
    let n = fam.order();
    let need = 2 * nonnodal.len() + nodal.len();
    if need > n {
        return Err(Error::IndexTooLarge { index: need, order: n });
    }
    if let Some(x) = nonnodal.iter().find(|x| iv.is_endpoint(**x) || !iv.contains(**x)) {
        return Err(Error::domain(*x, "non-nodal zeros must be interior points"));
    }
    let mut base: Vec<(f64, usize)> = nonnodal.iter().map(|x| (*x, 2)).chain(nodal.iter().map(|x| (*x, 1))).collect();
    base.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite zeros"));
    if base.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::Shape("zero locations must be distinct".into()));
    }
    let zeros: Vec<f64> = base.iter().map(|b| b.0).collect();
    let horizon = 2.0 * (1.0 + zeros.iter().fold(0.0_f64, |m, x| m.max(x.abs())));
    let grid = check_grid(iv, 10_001, horizon);
    // orient on the stretch right of the last zero (or left of b when b is a zero)
    let right = if iv.is_closed() { iv.right() } else { horizon };
    let last = zeros.iter().copied().filter(|z| *z < right).fold(iv.left(), f64::max);
    let lo = if zeros.is_empty() { iv.left() } else { last };
    let reference: Vec<f64> = grid.iter().copied().filter(|x| *x > lo && *x < right).collect();
    let reference = if reference.is_empty() { grid.clone() } else { reference };
    let variants = padded_variants(fam, iv, &base, n - need)?;
    normalize_sup(orient_and_sum(variants, &reference)?, &grid)
}

/// Grid resolution for [`count_zeros`].
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroConfig {
    pub grid_points: usize,
    /// Right end of the scan on the half-line.
    pub horizon: f64,
    /// `|f| <= rel_tol * sup|f|` counts as zero.
    pub rel_tol: f64,
}

impl Default for ZeroConfig {
    fn default() -> Self {
        ZeroConfig { grid_points: 4001, horizon: 10.0, rel_tol: 1e-10 }
    }
}

/// Zeros found by [`count_zeros`], each list sorted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ZeroReport {
    pub nodal: Vec<f64>,
    pub nonnodal: Vec<f64>,
}

impl ZeroReport {
    pub fn nodal_count(&self) -> usize {
        self.nodal.len()
    }

    pub fn nonnodal_count(&self) -> usize {
        self.nonnodal.len()
    }

    /// `2k + l`.
    pub fn weighted_count(&self) -> usize {
        2 * self.nonnodal.len() + self.nodal.len()
    }
}

/// Radius beyond which a sparse polynomial has no zeros on `[0, inf)`:
/// for `x >= R` the top term dominates the rest.
pub fn halfline_root_bound(p: &SparsePolynomial) -> f64 {
    let c = p.coeffs();
    let e = p.exps().as_slice();
    let Some(top) = c.iter().rposition(|v| *v != 0.0) else {
        return 1.0;
    };
    if top == 0 {
        return 1.0;
    }
    let rest: f64 = c[..top].iter().map(|v| v.abs()).sum();
    let gap = e[top] - e[top - 1];
    (rest / c[top].abs()).powf(1.0 / gap).max(1.0) * 1.01
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut flo = f(lo)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn golden_min<F: Fn(f64) -> Result<f64>>(f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..200 {
        if hi - lo <= 1e-15 * (1.0 + lo.abs()) {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Locates sign changes (nodal zeros) and touch points (non-nodal zeros) of
/// `p` on a grid with bisection polishing. Zeros at the endpoints are nodal.
pub fn count_zeros<F: RealFunction>(p: &F, iv: &Interval, cfg: &ZeroConfig) -> Result<ZeroReport> {
    if cfg.grid_points < 3 {
        return Err(Error::Config(format!("zero scan needs at least 3 points, got {}", cfg.grid_points)));
    }
    let xs = iv.grid(cfg.grid_points, cfg.horizon);
    let vs: Vec<f64> = xs.iter().map(|x| p.value(*x)).collect::<Result<_>>()?;
    let sup = vs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if sup == 0.0 {
        return Err(Error::IdenticallyZero);
    }
    let thresh = cfg.rel_tol * sup;
    let last = xs.len() - 1;
    // grid signs with tiny values treated as zero
    let signs: Vec<i8> = vs
        .iter()
        .map(|v| if v.abs() <= thresh { 0 } else if *v > 0.0 { 1 } else { -1 })
        .collect();
    let abs_value = |x: f64| p.value(x).map(f64::abs);

    let mut report = ZeroReport::default();
    if signs[0] == 0 {
        report.nodal.push(xs[0]);
    }
    let mut prev: Option<usize> = None;
    for i in 0..=last {
        if signs[i] == 0 {
            continue;
        }
        if let Some(j) = prev {
            let (lo, hi) = (xs[j], xs[i]);
            if signs[j] != signs[i] {
                report.nodal.push(bisect(|x| p.value(x), lo, hi)?);
            } else if i - j > 1 {
                // tiny values between equal signs: a touch point
                let guess = golden_min(abs_value, lo, hi)?;
                report.nonnodal.push(polish_touch(p, lo, hi, guess)?);
            }
        }
        prev = Some(i);
    }
    // touch points whose neighbourhood stays above the grid threshold
    for j in 1..last {
        let s = signs[j];
        if s == 0 || signs[j - 1] != s || signs[j + 1] != s {
            continue;
        }
        if vs[j].abs() > vs[j - 1].abs() || vs[j].abs() > vs[j + 1].abs() {
            continue;
        }
        let guess = golden_min(abs_value, xs[j - 1], xs[j + 1])?;
        if p.value(guess)?.abs() <= thresh {
            report.nonnodal.push(polish_touch(p, xs[j - 1], xs[j + 1], guess)?);
        }
    }
    if iv.is_closed() && signs[last] == 0 {
        report.nodal.push(xs[last]);
    }
    merge_close_roots(p, &mut report, thresh, (xs[last] - xs[0]) * 1e-9)?;
    report.nodal.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    report.nonnodal.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    report.nonnodal.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    Ok(report)
}

/// Refines a touch point as a root of `f'` when the derivative brackets one.
fn polish_touch<F: RealFunction>(p: &F, lo: f64, hi: f64, guess: f64) -> Result<f64> {
    let (Ok(dl), Ok(dh)) = (p.derivative(lo, 1), p.derivative(hi, 1)) else {
        return Ok(guess);
    };
    if dl == 0.0 {
        return Ok(lo);
    }
    if dh == 0.0 {
        return Ok(hi);
    }
    if (dl > 0.0) != (dh > 0.0) {
        if let Ok(x) = bisect(|x| p.derivative(x, 1), lo, hi) {
            return Ok(x);
        }
    }
    Ok(guess)
}

/// Two sign changes closer than `gap` with only tiny values between them are
/// a numerically split double zero.
fn merge_close_roots<F: RealFunction>(p: &F, report: &mut ZeroReport, thresh: f64, gap: f64) -> Result<()> {
    report.nodal.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut kept: Vec<f64> = Vec::with_capacity(report.nodal.len());
    let mut i = 0;
    while i < report.nodal.len() {
        let x = report.nodal[i];
        if i + 1 < report.nodal.len() {
            let y = report.nodal[i + 1];
            if y - x <= gap.max(1e-12) && p.value(0.5 * (x + y))?.abs() <= thresh {
                report.nonnodal.push(0.5 * (x + y));
                i += 2;
                continue;
            }
        }
        kept.push(x);
        i += 1;
    }
    report.nodal = kept;
    Ok(())
}
