//! Property tests for polynomials with prescribed zeros.

use nalgebra::DMatrix;
use proptest::prelude::*;
use sparsecert_core::extremal::{count_zeros, interpolate, nonneg_poly_with_zeros, poly_with_zeros, KnotSet, Normalization, ZeroConfig};
use sparsecert_core::linalg::first_row_cofactors;
use sparsecert_core::polynomial::Interval;
use sparsecert_core::{ExponentVector, FunctionFamily, RealFunction, SparsePolynomial};

fn exponents() -> impl Strategy<Value = Vec<f64>> {
    (0.0..1.0f64, prop::collection::vec(0.3..1.5f64, 1..5)).prop_map(|(start, steps)| {
        let mut e = vec![start];
        for s in steps {
            let last = *e.last().unwrap();
            e.push(last + s);
        }
        e
    })
}

fn interior(n: usize, a: f64, b: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.02..0.98f64, n)
        .prop_map(move |mut v| {
            v.sort_by(|x, y| x.partial_cmp(y).unwrap());
            v.into_iter().map(|t| a + t * (b - a)).collect::<Vec<f64>>()
        })
        .prop_filter("knots too close", move |v| v.windows(2).all(|w| w[1] - w[0] > 0.02 * (b - a)))
}

fn case() -> impl Strategy<Value = (Vec<f64>, f64, f64)> {
    (exponents(), 0.1..1.0f64, 0.5..2.0f64).prop_map(|(e, a, len)| (e, a, a + len))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn zero_count_respects_the_order(
        (e, a, b, c) in case().prop_flat_map(|(e, a, b)| { let n = e.len(); (Just(e), Just(a), Just(b), prop::collection::vec(-1.0..1.0f64, n)) })
    ) {
        let n = e.len() - 1;
        let p = SparsePolynomial::new(ExponentVector::new(e).unwrap(), c).unwrap();
        prop_assume!(!p.is_zero());
        let iv = Interval::closed(a, b).unwrap();
        let report = count_zeros(&p, &iv, &ZeroConfig::default()).unwrap();
        prop_assert!(report.weighted_count() <= n, "{report:?}");
    }

    #[test]
    fn determinant_is_independent_of_row_order(
        (e, a, b, knots, seed) in case().prop_flat_map(|(e, a, b)| {
            let n = e.len() - 1;
            (Just(e), Just(a), Just(b), interior(n, a, b), any::<u64>())
        })
    ) {
        let fam = FunctionFamily::powers(ExponentVector::new(e.clone()).unwrap());
        let iv = Interval::closed(a, b).unwrap();
        let simple: Vec<(f64, usize)> = knots.iter().map(|x| (*x, 1)).collect();
        let ks = KnotSet::from_points(iv, &simple).unwrap();
        let p = poly_with_zeros(&fam, &ks, Normalization::Scale(1.0)).unwrap();

        let mut order: Vec<usize> = (0..knots.len()).collect();
        // deterministic shuffle from the seed
        for i in (1..order.len()).rev() {
            order.swap(i, (seed % (i as u64 + 1)) as usize);
        }
        let rows = DMatrix::from_fn(knots.len(), e.len(), |r, c| knots[order[r]].powf(e[c]));
        let shuffled = first_row_cofactors(&rows);
        let scale = shuffled.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        prop_assume!(scale > 1e-200);
        let same = p.coeffs().iter().zip(&shuffled).all(|(x, y)| (x - y).abs() <= 1e-8 * scale);
        let flipped = p.coeffs().iter().zip(&shuffled).all(|(x, y)| (x + y).abs() <= 1e-8 * scale);
        prop_assert!(same || flipped, "{:?} vs {:?}", p.coeffs(), shuffled);
    }

    #[test]
    fn nonnegative_construction_stays_above_zero(
        (e, a, b, k) in case().prop_flat_map(|(e, a, b)| { let n = e.len() - 1; (Just(e), Just(a), Just(b), 0..=n / 2) })
            .prop_flat_map(|(e, a, b, k)| (Just(e), Just(a), Just(b), interior(k, a, b)))
    ) {
        let fam = FunctionFamily::powers(ExponentVector::new(e).unwrap());
        let iv = Interval::closed(a, b).unwrap();
        let ks = KnotSet::standard(iv, &k).unwrap();
        let p = nonneg_poly_with_zeros(&fam, &ks).unwrap();
        let grid = iv.grid(10_000, 0.0);
        let vals: Vec<f64> = grid.iter().map(|x| p.value(*x).unwrap()).collect();
        let sup = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!(min >= -1e-9 * sup, "min {min} sup {sup}");
    }

    #[test]
    fn interpolation_round_trips(
        (e, a, b, pts, ys) in case().prop_flat_map(|(e, a, b)| {
            let n = e.len();
            (Just(e), Just(a), Just(b), interior(n, a, b), prop::collection::vec(-2.0..2.0f64, n))
        })
    ) {
        let fam = FunctionFamily::powers(ExponentVector::new(e).unwrap());
        let _ = (a, b);
        let p = interpolate(&fam, &pts, &ys).unwrap();
        for (x, y) in pts.iter().zip(&ys) {
            prop_assert!((p.value(*x).unwrap() - y).abs() <= 1e-9 * (1.0 + y.abs()));
        }
    }
}
