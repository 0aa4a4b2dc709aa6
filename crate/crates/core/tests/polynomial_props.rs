//! Property tests for sparse polynomial evaluation.

use proptest::prelude::*;
use sparsecert_core::{ExponentVector, SparsePolynomial};

fn exponents(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    (0.0..2.0f64, prop::collection::vec(0.1..1.5f64, 0..max_len)).prop_map(|(start, steps)| {
        let mut e = vec![start];
        for s in steps {
            let last = *e.last().unwrap();
            e.push(last + s);
        }
        e
    })
}

fn poly_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    exponents(6).prop_flat_map(|e| {
        let n = e.len();
        (
            Just(e),
            prop::collection::vec(-5.0..5.0f64, n),
            prop::collection::vec(-5.0..5.0f64, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_is_linear((e, c1, c2) in poly_pair(), s in -3.0..3.0f64, t in -3.0..3.0f64, x in 0.01..4.0f64) {
        let ev = ExponentVector::new(e.clone()).unwrap();
        let p = SparsePolynomial::new(ev.clone(), c1.clone()).unwrap();
        let q = SparsePolynomial::new(ev.clone(), c2.clone()).unwrap();
        let comb: Vec<f64> = c1.iter().zip(&c2).map(|(a, b)| s * a + t * b).collect();
        let r = SparsePolynomial::new(ev, comb).unwrap();
        let lhs = r.eval(x).unwrap();
        let rhs = s * p.eval(x).unwrap() + t * q.eval(x).unwrap();
        let scale: f64 = e.iter().map(|a| x.powf(*a)).sum::<f64>() * 30.0;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1.0), "{lhs} vs {rhs}");
        let sum = p.try_add(&q).unwrap().eval(x).unwrap();
        prop_assert!((sum - p.eval(x).unwrap() - q.eval(x).unwrap()).abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn derivative_matches_central_difference((e, c, _) in poly_pair(), x in 0.2..3.0f64) {
        let p = SparsePolynomial::new(ExponentVector::new(e).unwrap(), c).unwrap();
        let h = 1e-5;
        let fd = (p.eval(x + h).unwrap() - p.eval(x - h).unwrap()) / (2.0 * h);
        let d = p.eval_derivative(x, 1).unwrap();
        prop_assert!((fd - d).abs() <= 1e-6 * (1.0 + d.abs()), "{fd} vs {d}");
    }

    #[test]
    fn evaluation_matches_direct_powering((e, c, _) in poly_pair(), x in 0.01..10.0f64) {
        let p = SparsePolynomial::new(ExponentVector::new(e.clone()).unwrap(), c.clone()).unwrap();
        let direct: f64 = e.iter().zip(&c).map(|(a, ci)| ci * x.powf(*a)).sum();
        let scale: f64 = e.iter().zip(&c).map(|(a, ci)| (ci * x.powf(*a)).abs()).sum();
        prop_assert!((p.eval(x).unwrap() - direct).abs() <= 1e-12 * scale.max(1e-300));
    }
}
