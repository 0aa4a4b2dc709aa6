//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

use std::time::Instant;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sparsecert_core::extremal::{count_zeros, interpolate, nonneg_poly_with_zeros, poly_with_nodal_nonnodal, KnotSet, ZeroConfig};
use sparsecert_core::karlin::{decompose_halfline, decompose_interval, Decomposition, KarlinConfig};
use sparsecert_core::moments::{
    hankel_psd_checks, recover_atoms, signed_representation, sparse_feasible, Feasibility,
    FeasibilityConfig, RecoveryConfig, TruncatedMomentSequence,
};
use sparsecert_core::tsystem::{alternant_matrix, is_et_system, is_t_system, schur_eval, vandermonde_product};
use sparsecert_core::{Error, ExponentVector, FunctionFamily, Interval, SamplingConfig, SparsePolynomial, Verdict};

type Outcome = Result<String, String>;

fn ev(v: &[f64]) -> ExponentVector {
    ExponentVector::new(v.to_vec()).unwrap()
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Exponents `0 = alpha_0 < ...` (or a free first exponent) with random gaps.
fn random_exps(rng: &mut ChaCha8Rng, n: usize, first: f64) -> ExponentVector {
    let mut e = vec![first];
    for _ in 0..n {
        let last = *e.last().unwrap();
        e.push(last + rng.gen_range(0.3..1.5));
    }
    ExponentVector::new(e).unwrap()
}

fn eval_powers(exps: &[f64], coeffs: &[f64], x: f64) -> f64 {
    exps.iter().zip(coeffs).map(|(a, c)| c * x.powf(*a)).sum()
}

// ---------------------------------------------------------------------------
// 1: determinant of the alternant = Vandermonde product x Schur polynomial

/// Points in `[0.1, 3]` times `2^60` are integers, which keeps both oracles exact.
const SHIFT: u32 = 60;

fn scaled_point(x: f64) -> BigInt {
    let r = BigRational::from_float(x).expect("finite point") * BigRational::from_integer(BigInt::one() << SHIFT);
    assert!(r.is_integer(), "point {x} has more than 60 fractional bits");
    r.to_integer()
}

/// Exact determinant of an integer matrix by Bareiss elimination.
fn bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|r| !a[*r][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// `det(x_j^{alpha_i})` as `(integer, e)` meaning `integer * 2^{-60 e}`.
fn exact_alternant(alpha: &[usize], m: &[BigInt]) -> (BigInt, usize) {
    let rows = m.iter().map(|x| alpha.iter().map(|k| Pow::pow(x, *k)).collect()).collect();
    (bareiss(rows), alpha.iter().sum())
}

/// Schur polynomial via Jacobi-Trudi, `det(h_{lambda_i - i + j})`, with the
/// same scaling convention as [`exact_alternant`].
fn exact_jacobi_trudi(alpha: &[usize], m: &[BigInt]) -> (BigInt, usize) {
    let n = alpha.len();
    let lambda: Vec<i64> = (0..n).map(|i| alpha[n - 1 - i] as i64 - (n - 1 - i) as i64).collect();
    let max = lambda[0] as usize + n;
    let mut h = vec![BigInt::zero(); max + 1];
    h[0] = BigInt::one();
    for x in m {
        for k in 1..=max {
            let t = x * &h[k - 1];
            h[k] += t;
        }
    }
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let k = lambda[i] - i as i64 + j as i64;
                    if k < 0 {
                        BigInt::zero()
                    } else {
                        h[k as usize].clone()
                    }
                })
                .collect()
        })
        .collect();
    (bareiss(rows), lambda.iter().sum::<i64>() as usize)
}

/// `|value / (integer * 2^{-60 e}) - 1|`.
fn relative_gap(value: f64, exact: &(BigInt, usize)) -> f64 {
    let denom = BigRational::new(exact.0.clone(), BigInt::one() << (SHIFT as usize * exact.1));
    let ratio = BigRational::from_float(value).expect("finite value") / denom;
    (ratio - BigRational::one()).abs().to_f64().unwrap_or(f64::INFINITY)
}

fn subsets(universe: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..size).collect();
    loop {
        out.push(cur.clone());
        let mut i = size;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < universe - size + i {
                cur[i] += 1;
                for j in i + 1..size {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn criterion_schur() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut vectors = 0;
    let mut worst = 0.0f64;
    let mut worst_float_lu = 0.0f64;
    for size in 1..=6 {
        for alpha in subsets(7, size) {
            vectors += 1;
            let exps = ExponentVector::new(alpha.iter().map(|a| *a as f64).collect()).unwrap();
            let fam = FunctionFamily::powers(exps.clone());
            for _ in 0..100 {
                let mut pts: Vec<f64> = (0..size).map(|_| rng.gen_range(0.1..3.0)).collect();
                pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let m: Vec<BigInt> = pts.iter().map(|x| scaled_point(*x)).collect();
                let det = exact_alternant(&alpha, &m);
                let jt = exact_jacobi_trudi(&alpha, &m);
                let vdm = vandermonde_product(&pts);
                let schur = schur_eval(&exps, &pts).map_err(|e| e.to_string())?;
                // the identity itself, against the exact determinant
                let e1 = relative_gap(vdm * schur, &det);
                // each factor against its own exact value
                let e2 = relative_gap(schur, &jt);
                let pairs = alpha.len() * (alpha.len() - 1) / 2;
                let mut v = BigInt::one();
                for j in 0..m.len() {
                    for i in 0..j {
                        v *= &m[j] - &m[i];
                    }
                }
                let e3 = relative_gap(vdm, &(v, pairs));
                // determinant of the library alternant in plain floating point
                let alt = alternant_matrix(&fam, &pts).map_err(|e| e.to_string())?;
                worst_float_lu = worst_float_lu.max(relative_gap(alt.determinant(), &det));
                worst = worst.max(e1).max(e2).max(e3);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst <= 1e-9, || format!("worst relative error {worst:e}"))?;
    check(secs < 5.0, || format!("took {secs:.2}s"))?;
    Ok(format!(
        "{vectors} exponent vectors x 100 tuples, worst rel err {worst:.1e} (plain LU determinant: {worst_float_lu:.1e})"
    ))
}

// ---------------------------------------------------------------------------
// 2: {1, x, x^3}

fn criterion_et_counterexample() -> Outcome {
    let fam = FunctionFamily::powers(ev(&[0.0, 1.0, 3.0]));
    let cfg = SamplingConfig::default();
    let full = is_et_system(&fam, &Interval::closed(0.0, 1.0).unwrap(), &cfg).map_err(|e| e.to_string())?;
    check(full == Verdict::FailWithWitness(vec![0.0, 0.0, 0.0]), || format!("[0,1]: {full:?}"))?;
    let part = is_et_system(&fam, &Interval::closed(0.5, 1.0).unwrap(), &cfg).map_err(|e| e.to_string())?;
    check(part == Verdict::Pass, || format!("[0.5,1]: {part:?}"))?;
    Ok("fails on [0,1] with (0,0,0), passes on [0.5,1]".into())
}

// ---------------------------------------------------------------------------
// 3: 2k + l <= n

fn criterion_zero_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut drawn = 0;
    let mut max_weighted = 0;
    let mut families = 0;
    while drawn < 500 {
        let n = rng.gen_range(1..=6);
        let a = if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.1..1.0) };
        let b = a + rng.gen_range(0.5..2.0);
        let first = if a == 0.0 { 0.0 } else { rng.gen_range(-0.5..1.0) };
        let exps = random_exps(&mut rng, n, first);
        let iv = Interval::closed(a, b).unwrap();
        let fam = FunctionFamily::powers(exps.clone());
        let verdict = is_t_system(&fam, &iv, &SamplingConfig::default()).map_err(|e| e.to_string())?;
        if !verdict.is_pass() {
            continue;
        }
        families += 1;
        for _ in 0..10 {
            let p = match rng.gen_range(0..3) {
                0 => {
                    let c: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    SparsePolynomial::new(exps.clone(), c).unwrap()
                }
                1 => {
                    // alternating values force many sign changes
                    let pts: Vec<f64> = (0..=n).map(|i| a + (b - a) * (i as f64 + 0.5) / (n + 1) as f64).collect();
                    let vals: Vec<f64> = (0..=n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } * rng.gen_range(0.5..1.5)).collect();
                    match interpolate(&fam, &pts, &vals) {
                        Ok(p) => p.to_sparse().unwrap(),
                        // nearly dependent exponents: the library refuses the
                        // interpolant, so this draw is not counted
                        Err(Error::SingularSystem(_)) => continue,
                        Err(e) => return Err(e.to_string()),
                    }
                }
                _ => {
                    let k = rng.gen_range(0..=n / 2);
                    let l = rng.gen_range(0..=n - 2 * k);
                    let mut z: Vec<f64> = (0..k + l).map(|i| a + (b - a) * (i as f64 + rng.gen_range(0.2..0.8)) / (k + l) as f64).collect();
                    z.sort_by(|x, y| x.partial_cmp(y).unwrap());
                    let nonnodal: Vec<f64> = z.iter().step_by(2).take(k).copied().collect();
                    let nodal: Vec<f64> = z.iter().filter(|x| !nonnodal.contains(x)).copied().collect();
                    poly_with_nodal_nonnodal(&fam, &iv, &nonnodal, &nodal)
                        .map_err(|e| format!("{exps} on [{a},{b}] nonnodal {nonnodal:?} nodal {nodal:?}: {e}"))?
                        .to_sparse()
                        .unwrap()
                }
            };
            let report = count_zeros(&p, &iv, &ZeroConfig::default()).map_err(|e| e.to_string())?;
            let w = report.weighted_count();
            max_weighted = max_weighted.max(w);
            check(w <= n, || format!("{p} on [{a},{b}]: 2k+l = {w} > n = {n} ({report:?})"))?;
            drawn += 1;
        }
    }
    Ok(format!("{drawn} polynomials from {families} families, no violation (max 2k+l = {max_weighted})"))
}

// ---------------------------------------------------------------------------
// 4: Karlin decomposition on random intervals

/// `sum` of zero indices: 2 for interior knots, 1 for endpoints.
fn knot_index(ks: &KnotSet) -> Result<usize, String> {
    let mut idx = 0;
    for k in ks.entries() {
        let want = if k.endpoint { 1 } else { 2 };
        check(k.multiplicity == want, || format!("knot {k:?} has unexpected multiplicity"))?;
        idx += want;
    }
    Ok(idx)
}

fn strictly_interlaced(dec: &Decomposition) -> bool {
    let mut all: Vec<(f64, u8)> = dec
        .knots_star
        .locations()
        .into_iter()
        .map(|x| (x, 0))
        .chain(dec.knots_upper.locations().into_iter().map(|x| (x, 1)))
        .collect();
    all.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    all.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 != w[1].1)
}

/// Condition number of the column-normalized table of the powers on a grid
/// of `[a, b]`. Coefficients of any function in the span are determined no
/// better than `eps` times this relative to its sup norm.
fn basis_condition(exps: &[f64], a: f64, b: f64) -> f64 {
    let xs: Vec<f64> = (0..400).map(|i| a + (b - a) * i as f64 / 399.0).collect();
    let mut t = DMatrix::from_fn(xs.len(), exps.len(), |i, j| xs[i].powf(exps[j]));
    for mut col in t.column_iter_mut() {
        let m = col.amax();
        col /= m;
    }
    let sv = t.singular_values();
    sv.max() / sv.min()
}

struct KarlinCase {
    n: usize,
    a: f64,
    b: f64,
    exps: Vec<f64>,
    coeffs: Vec<f64>,
}

fn random_karlin_case(rng: &mut ChaCha8Rng) -> KarlinCase {
    let n = rng.gen_range(1..=7);
    let a = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..4.5) };
    let b = rng.gen_range(a + 0.2..=5.0);
    let first = if a == 0.0 { 0.0 } else { rng.gen_range(-0.5..1.0) };
    let exps = random_exps(rng, n, first).as_slice().to_vec();
    let mut c: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    // lift by a multiple of x^{alpha_0} until f / x^{alpha_0} >= margin
    let grid: Vec<f64> = (0..2001).map(|i| a + (b - a) * i as f64 / 2000.0).collect();
    let ratio = |c: &[f64], x: f64| {
        if x == 0.0 {
            c[0]
        } else {
            eval_powers(&exps, c, x) / x.powf(exps[0])
        }
    };
    let lo = grid.iter().map(|x| ratio(&c, *x)).fold(f64::INFINITY, f64::min);
    let hi = grid.iter().map(|x| ratio(&c, *x)).fold(f64::NEG_INFINITY, f64::max);
    c[0] += (-lo).max(0.0) + 0.1 * (1.0 + hi - lo);
    // unit sup norm, so the absolute bound on f^*(b) is scale free
    let sup = grid.iter().map(|x| eval_powers(&exps, &c, *x).abs()).fold(0.0, f64::max);
    c.iter_mut().for_each(|v| *v /= sup);
    KarlinCase { n, a, b, exps, coeffs: c }
}

/// Checks one decomposition; returns `(relative residual, |f^*(b)| / ||f||)`.
fn check_karlin_case(k: &KarlinCase, cfg: &KarlinConfig) -> Result<(f64, f64), String> {
    let (a, b, e, c) = (k.a, k.b, &k.exps, &k.coeffs);
    let f = SparsePolynomial::new(ev(e), c.clone()).unwrap();
    let iv = Interval::closed(a, b).unwrap();
    let dec = decompose_interval(&f, &iv, cfg).map_err(|err| format!("{err}"))?;
    let fine: Vec<f64> = (0..10_001).map(|i| a + (b - a) * i as f64 / 10_000.0).collect();
    let mut sup = 0.0f64;
    let mut res = 0.0f64;
    let mut min_star = f64::INFINITY;
    let mut min_upper = f64::INFINITY;
    for x in &fine {
        let fv = eval_powers(e, c, *x);
        let s = eval_powers(e, dec.f_star.coeffs(), *x);
        let u = eval_powers(e, dec.f_upper.coeffs(), *x);
        sup = sup.max(fv.abs());
        res = res.max((fv - s - u).abs());
        min_star = min_star.min(s);
        min_upper = min_upper.min(u);
    }
    let tol = 1e-8 * sup;
    check(res <= tol, || format!("residual {res:e}"))?;
    check(min_star >= -tol && min_upper >= -tol, || format!("minima {min_star:e}, {min_upper:e}"))?;
    let (is, iu) = (knot_index(&dec.knots_star)?, knot_index(&dec.knots_upper)?);
    check(is == k.n && iu == k.n, || format!("indices {is}, {iu}"))?;
    check(strictly_interlaced(&dec), || "knots not interlaced".to_string())?;
    let at_b = eval_powers(e, dec.f_upper.coeffs(), b);
    // the negative side is covered by the grid minimum (b is a grid point)
    check(at_b <= 1e-8, || format!("f^*(b) = {at_b:e}"))?;
    Ok((res / sup, at_b.abs() / sup))
}

fn criterion_karlin_random() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cfg = KarlinConfig::default();
    let mut worst_res = 0.0f64;
    let mut worst_at_b = 0.0f64;
    let mut worst_passing_cond = 0.0f64;
    let mut failures: Vec<(usize, f64, String)> = Vec::new();
    for case in 0..200 {
        let k = random_karlin_case(&mut rng);
        let cond = basis_condition(&k.exps, k.a, k.b);
        match check_karlin_case(&k, &cfg) {
            Ok((res, at_b)) => {
                worst_res = worst_res.max(res);
                worst_at_b = worst_at_b.max(at_b);
                worst_passing_cond = worst_passing_cond.max(cond);
            }
            Err(msg) => {
                let f = SparsePolynomial::new(ev(&k.exps), k.coeffs.clone()).unwrap();
                eprintln!("  case {case} (n = {}, basis condition {cond:.1e}) {f} on [{}, {}]: {msg}", k.n, k.a, k.b);
                failures.push((case, cond, msg));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let summary = format!(
        "worst relative residual {worst_res:.1e}, worst |f^*(b)|/||f|| {worst_at_b:.1e}, \
         largest basis condition solved {worst_passing_cond:.1e}, {secs:.1}s"
    );
    if !failures.is_empty() {
        let least = failures.iter().map(|f| f.1).fold(f64::INFINITY, f64::min);
        return Err(format!(
            "{} of 200 decompositions failed (smallest failing basis condition {least:.1e}); {summary}",
            failures.len()
        ));
    }
    check(secs < 60.0, || format!("took {secs:.2}s"))?;
    Ok(format!("200 decompositions, {summary}"))
}

// ---------------------------------------------------------------------------
// 5: 1 + x^2

/// Newton on `c (x - t)^2 + d x (1 - x) = 1 + x^2`, unknowns `(t, c, d)`.
fn golden_oracle() -> (f64, f64, f64) {
    let mut v = [0.5, 5.0, 5.0];
    for _ in 0..100 {
        let [t, c, d] = v;
        // coefficient equations for 1, x, x^2
        let r = [c * t * t - 1.0, -2.0 * c * t + d, c - d - 1.0];
        let j = DMatrix::from_row_slice(3, 3, &[2.0 * c * t, t * t, 0.0, -2.0 * c, -2.0 * t, 1.0, 0.0, 1.0, -1.0]);
        let step = j.lu().solve(&nalgebra::DVector::from_column_slice(&r)).unwrap();
        for i in 0..3 {
            v[i] -= step[i];
        }
    }
    (v[0], v[1], v[2])
}

fn criterion_golden() -> Outcome {
    let exps = ev(&[0.0, 1.0, 2.0]);
    let f = SparsePolynomial::new(exps.clone(), vec![1.0, 0.0, 1.0]).unwrap();
    let cfg = KarlinConfig::default();
    let dec = decompose_interval(&f, &Interval::closed(0.0, 1.0).unwrap(), &cfg).map_err(|e| e.to_string())?;
    let (t, c, _) = golden_oracle();
    let knots = dec.knots_star.interior_locations();
    check(knots.len() == 1 && (knots[0] - t).abs() <= 1e-6, || format!("knots {knots:?}, oracle {t}"))?;
    check((dec.c_star - c).abs() <= 1e-6, || format!("c_* = {}, oracle {c}", dec.c_star))?;
    check((dec.f_star.coeffs()[2] - c).abs() <= 1e-6, || format!("f_* = {}", dec.f_star))?;

    let hl = decompose_halfline(&f, &cfg).map_err(|e| e.to_string())?;
    let want_star = [1.0, -2.0, 1.0];
    let want_upper = [0.0, 2.0, 0.0];
    for i in 0..3 {
        check((hl.f_star.coeffs()[i] - want_star[i]).abs() <= 1e-8, || format!("f_* = {}", hl.f_star))?;
        check((hl.f_upper.coeffs()[i] - want_upper[i]).abs() <= 1e-8, || format!("f^* = {}", hl.f_upper))?;
    }
    check(hl.f_upper.coeffs()[2].abs() <= 1e-12, || format!("x^2 coefficient of f^* = {:e}", hl.f_upper.coeffs()[2]))?;
    Ok(format!("x_1 = {:.9}, c_* = {:.9}; half-line (x-1)^2 + 2x", knots[0], dec.c_star))
}

// ---------------------------------------------------------------------------
// 6: f = 1 over {1, x^gamma}

fn criterion_identity() -> Outcome {
    for gamma in [0.5, 1.0, 2.0, 3.7] {
        let f = SparsePolynomial::new(ev(&[0.0, gamma]), vec![1.0, 0.0]).unwrap();
        let dec = decompose_interval(&f, &Interval::closed(0.0, 1.0).unwrap(), &KarlinConfig::default())
            .map_err(|e| format!("gamma {gamma}: {e}"))?;
        let s = dec.f_star.coeffs();
        let u = dec.f_upper.coeffs();
        let ok = s[0].abs() <= 1e-10 && (s[1] - 1.0).abs() <= 1e-10 && (u[0] - 1.0).abs() <= 1e-10 && (u[1] + 1.0).abs() <= 1e-10;
        check(ok, || format!("gamma {gamma}: f_* = {}, f^* = {}", dec.f_star, dec.f_upper))?;
    }
    Ok("f_* = x^gamma, f^* = 1 - x^gamma for gamma in {0.5, 1, 2, 3.7}".into())
}

// ---------------------------------------------------------------------------
// 7: moment round trip

fn random_measure(rng: &mut ChaCha8Rng, k: usize) -> (Vec<f64>, Vec<f64>) {
    loop {
        let mut x: Vec<f64> = (0..k).map(|_| rng.gen_range(0.02..0.98)).collect();
        x.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if x.windows(2).all(|w| w[1] - w[0] > 0.02) {
            let c = (0..k).map(|_| rng.gen_range(0.1..2.0)).collect();
            return (x, c);
        }
    }
}

fn power_moments(exps: &[f64], x: &[f64], c: &[f64]) -> Vec<f64> {
    exps.iter()
        .map(|a| x.iter().zip(c).map(|(x, c)| c * x.powf(*a)).sum())
        .collect()
}

fn criterion_round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let iv = Interval::closed(0.0, 1.0).unwrap();
    let mut worst = 0.0f64;
    for case in 0..100 {
        let n = rng.gen_range(1..=7);
        let exps = random_exps(&mut rng, n, 0.0);
        let k = rng.gen_range(1..=3);
        let (x, c) = random_measure(&mut rng, k);
        let values = power_moments(exps.as_slice(), &x, &c);
        let s = TruncatedMomentSequence::new(exps.clone(), values.clone()).unwrap();
        let verdict = sparse_feasible(&s, &iv, &FeasibilityConfig::default()).map_err(|e| e.to_string())?;
        check(verdict.is_feasible(), || format!("case {case} ({exps}, atoms {x:?}): {verdict:?}"))?;
        let mu = recover_atoms(&s, &iv, &RecoveryConfig::default()).map_err(|e| format!("case {case} ({exps}, atoms {x:?}): {e}"))?;
        check(mu.len() <= n + 1, || format!("case {case}: {} atoms", mu.len()))?;
        let back = power_moments(exps.as_slice(), mu.atoms(), mu.weights());
        let err = back.iter().zip(&values).fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
        worst = worst.max(err);
        check(err <= 1e-7, || format!("case {case} ({exps}, atoms {x:?}, weights {c:?}): moment error {err:e}, recovered {mu:?}"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 120.0, || format!("took {secs:.2}s"))?;
    Ok(format!("100 measures feasible and recovered, worst moment error {worst:.1e}, {secs:.1}s"))
}

// ---------------------------------------------------------------------------
// 8: infeasibility certificates

fn criterion_certificates() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let iv = Interval::closed(0.0, 1.0).unwrap();
    let mut worst = f64::NEG_INFINITY;
    for case in 0..100 {
        let k = rng.gen_range(1..=3);
        let n = rng.gen_range(2 * k..=7);
        let exps = random_exps(&mut rng, n, 0.0);
        let (x, c) = random_measure(&mut rng, k);
        let feasible = power_moments(exps.as_slice(), &x, &c);
        // the nonnegative polynomial vanishing at the atoms annihilates the
        // feasible sequence; stepping against its coefficients crosses the cone
        let fam = FunctionFamily::powers(exps.clone());
        let p = nonneg_poly_with_zeros(&fam, &KnotSet::standard(iv, &x).unwrap()).map_err(|e| e.to_string())?;
        let norm = p.coeffs().iter().map(|a| a * a).sum::<f64>().sqrt();
        let scale = 1.0 + feasible.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let eps = 1e-2 * scale;
        let values: Vec<f64> = feasible.iter().zip(p.coeffs()).map(|(s, a)| s - eps * a / norm).collect();
        let s = TruncatedMomentSequence::new(exps.clone(), values.clone()).unwrap();
        let verdict = sparse_feasible(&s, &iv, &FeasibilityConfig::default()).map_err(|e| e.to_string())?;
        let Feasibility::Infeasible(cert) = verdict else {
            return Err(format!("case {case} ({exps}): {verdict:?}"));
        };
        let e = exps.as_slice();
        let w = cert.polynomial.coeffs();
        let grid_min = (0..10_001)
            .map(|i| eval_powers(e, w, i as f64 / 10_000.0))
            .fold(f64::INFINITY, f64::min);
        let value: f64 = w.iter().zip(&values).map(|(a, s)| a * s).sum();
        worst = worst.max(value);
        check(grid_min >= -1e-9, || format!("case {case}: witness min {grid_min:e}"))?;
        check(value < 0.0, || format!("case {case}: L(p) = {value:e}"))?;
    }
    Ok(format!("100 certificates, largest L(p) = {worst:.2e}"))
}

// ---------------------------------------------------------------------------
// 9: sparse and Hankel verdicts agree on dense exponents

fn criterion_dense_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let exps = ExponentVector::dense(4);
    let iv = Interval::closed(0.0, 1.0).unwrap();
    let (mut compared, mut feasible, mut marginal) = (0, 0, 0);
    for case in 0..200 {
        let k = rng.gen_range(1..=4);
        let (x, c) = random_measure(&mut rng, k);
        let noise = [0.0, 1e-3, 1e-2, 5e-2][rng.gen_range(0..4)];
        let values: Vec<f64> = power_moments(exps.as_slice(), &x, &c)
            .into_iter()
            .map(|v| v + noise * rng.gen_range(-1.0..1.0))
            .collect();
        let s = TruncatedMomentSequence::new(exps.clone(), values).unwrap();
        let verdict = sparse_feasible(&s, &iv, &FeasibilityConfig::default()).map_err(|e| e.to_string())?;
        if matches!(verdict, Feasibility::Marginal(_)) {
            marginal += 1;
            continue;
        }
        let hankel = hankel_psd_checks(&s).map_err(|e| e.to_string())?.hausdorff;
        check(hankel.pass == verdict.is_feasible(), || {
            format!("case {case} {:?}: hankel {hankel:?}, sparse {verdict:?}", s.values())
        })?;
        compared += 1;
        feasible += verdict.is_feasible() as usize;
    }
    Ok(format!("{compared} agree ({feasible} feasible), {marginal} marginal excluded"))
}

// ---------------------------------------------------------------------------
// 10: signed representations

fn criterion_signed() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let exps = ExponentVector::dense(4);
    let pts = [-2.0, -0.5, 0.0, 1.0, 2.5];
    let (mut failing, mut positive) = (0, 0);
    for case in 0..50 {
        let values: Vec<f64> = if case % 2 == 0 {
            (0..5).map(|_| rng.gen_range(-2.0..2.0)).collect()
        } else {
            let c: Vec<f64> = (0..5).map(|_| rng.gen_range(0.1..2.0)).collect();
            power_moments(exps.as_slice(), &pts, &c)
        };
        let s = TruncatedMomentSequence::new(exps.clone(), values.clone()).unwrap();
        let w = signed_representation(&s, &pts).map_err(|e| e.to_string())?;
        let back = power_moments(exps.as_slice(), &pts, &w);
        let res = back.iter().zip(&values).fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
        let norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        check(res <= 1e-9, || format!("case {case}: residual {res:e} (sequence norm {norm:e})"))?;
        let hamburger = hankel_psd_checks(&s).map_err(|e| e.to_string())?.hamburger;
        if !hamburger.pass {
            failing += 1;
            check(w.iter().any(|v| *v < 0.0), || format!("case {case}: weights {w:?} all nonnegative"))?;
        }
        if w.iter().all(|v| *v > 0.0) {
            positive += 1;
        }
    }
    Ok(format!("50 representations, {failing} non-moment sequences all with a negative weight, {positive} positive"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("alternant = vandermonde x schur", criterion_schur),
        ("ET counterexample {1, x, x^3}", criterion_et_counterexample),
        ("zero count bound 2k + l <= n", criterion_zero_bound),
        ("random interval decompositions", criterion_karlin_random),
        ("closed-form decomposition of 1 + x^2", criterion_golden),
        ("decomposition of f = 1", criterion_identity),
        ("moment round trip", criterion_round_trip),
        ("infeasibility certificates", criterion_certificates),
        ("dense Hankel agreement", criterion_dense_agreement),
        ("signed representations", criterion_signed),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
