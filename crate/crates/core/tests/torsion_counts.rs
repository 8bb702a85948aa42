use num_bigint::BigUint;
use proptest::prelude::*;

use fgc_core::arith::primes::FieldParameter;
use fgc_core::torsion::{
    brute_force_torsion_by_det, count_torsion, count_torsion_by_det, count_torsion_total, count_tuples, gl_order,
    orbit_structure, DEFAULT_BRUTE_FORCE_CAP,
};

#[test]
fn formula_matches_enumeration() {
    for (a, q, n) in [(2, 3, 2), (3, 2, 2), (4, 3, 2), (3, 4, 2), (2, 5, 2), (3, 2, 3), (6, 5, 2), (2, 3, 3)] {
        let f = FieldParameter::new(q).unwrap();
        assert_eq!(
            count_torsion_by_det(a, &f, n).unwrap(),
            brute_force_torsion_by_det(a, &f, n, DEFAULT_BRUTE_FORCE_CAP).unwrap(),
            "a={a} q={q} n={n}"
        );
    }
}

#[test]
fn period_one_and_known_values() {
    let f = FieldParameter::new(3).unwrap();
    assert_eq!(count_torsion(2, &f, 2, 1).unwrap(), BigUint::from(12u32));
    assert_eq!(count_torsion_total(2, &f, 2).unwrap(), BigUint::from(14u32));
    // x^{q-1} = 1 on GL_1 is the whole group.
    let f = FieldParameter::new(7).unwrap();
    assert_eq!(count_torsion_total(6, &f, 1).unwrap(), gl_order(1, 7));
}

#[test]
fn non_coprime_field_is_rejected() {
    let f = FieldParameter::new(4).unwrap();
    assert!(count_torsion(2, &f, 2, 0).is_err());
    assert!(FieldParameter::new(6).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn orbits_partition_residues(a in 2u64..40, q in prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9, 11, 13])) {
        let f = FieldParameter::new(q).unwrap();
        prop_assume!(num_integer::gcd(a, q) == 1);
        let st = orbit_structure(a, &f).unwrap();
        let mut all: Vec<u64> = st.orbits.iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (1..=a).collect::<Vec<_>>());
        for o in &st.orbits {
            for &i in o {
                prop_assert!(o.contains(&((i * q - 1) % a + 1)));
            }
        }
    }

    #[test]
    fn det_counts_sum_to_total(a in 2u64..8, q in prop::sample::select(vec![3u64, 5, 7, 8, 9]), n in 1u64..5) {
        let f = FieldParameter::new(q).unwrap();
        prop_assume!(num_integer::gcd(a, q) == 1);
        let by: BigUint = count_torsion_by_det(a, &f, n).unwrap().into_iter().sum();
        prop_assert_eq!(by, count_torsion_total(a, &f, n).unwrap());
        // A single period forces det = 1.
        prop_assert_eq!(count_tuples(&[a], &f, n).unwrap(), count_torsion(a, &f, n, 0).unwrap());
    }
}
