use num_bigint::BigInt;
use num_rational::BigRational;

use fgc_core::arith::primes::FieldParameter;
use fgc_core::modforms::{predict_j, predict_tuples, DEFAULT_TRUNC};
use fgc_core::torsion::{count_torsion, count_tuples};

fn trunc() -> BigRational {
    BigRational::from_integer(BigInt::from(DEFAULT_TRUNC))
}

#[test]
fn j_ratio_approaches_one() {
    let f = FieldParameter::new(3).unwrap();
    let mut prev = f64::INFINITY;
    for n in [4u64, 8, 12, 16] {
        let p = predict_j(2, &f, n, 0, &trunc(), 40).unwrap();
        let exact = count_torsion(2, &f, n, 0).unwrap();
        let err = (p.ratio_to(&exact, 3).unwrap().to_f64() - 1.0).abs();
        assert!(err < prev, "n={n}: {err} not below {prev}");
        prev = err;
    }
    assert!(prev < 1e-3);
}

#[test]
fn tuple_ratio_is_close_for_large_n() {
    let f = FieldParameter::new(5).unwrap();
    let n = 12;
    let p = predict_tuples(&[2, 3], &f, n, &trunc(), 40).unwrap();
    let exact = count_tuples(&[2, 3], &f, n).unwrap();
    let r = p.ratio_to(&exact, 5).unwrap().to_f64();
    assert!((r - 1.0).abs() < 1e-2, "ratio {r}");
}

#[test]
fn empty_coset_predicts_zero() {
    // The prediction is flagged empty exactly when the count vanishes.
    for (a, q, n) in [(4u64, 5u64, 1u64), (3, 2, 1), (4, 3, 2)] {
        let f = FieldParameter::new(q).unwrap();
        for k in 0..a {
            let p = predict_j(a, &f, n, k, &trunc(), 30).unwrap();
            let exact = count_torsion(a, &f, n, k).unwrap();
            if p.empty {
                assert_eq!(exact, 0u32.into(), "a={a} q={q} n={n} k={k}");
            }
        }
    }
}
