use num_bigint::BigUint;

use fgc_core::hurwitz::{
    brute_force_hom_count, compute_character_table, total_hom_count, CharacterTable, ExplicitGroup, TableCaps,
    DEFAULT_GROUP_CAP, DEFAULT_WORK_CAP,
};
use fgc_core::FuchsianSignature;

fn sig(s: &str) -> FuchsianSignature {
    s.parse().unwrap()
}

#[test]
fn character_sums_match_enumeration() {
    let groups = [
        ExplicitGroup::symmetric(3).unwrap(),
        ExplicitGroup::symmetric(4).unwrap(),
        ExplicitGroup::cyclic(5).unwrap(),
        ExplicitGroup::general_linear(2, 3, DEFAULT_GROUP_CAP).unwrap(),
    ];
    for g in &groups {
        let t = compute_character_table(g, 30, TableCaps::default()).unwrap();
        for s in ["0;2,3", "0;2,2,2", "0;2,3,4", "1;2", "1;", "0;3,3,3"] {
            let s = sig(s);
            assert_eq!(
                total_hom_count(&t, &s, false).unwrap(),
                brute_force_hom_count(g, &s, DEFAULT_WORK_CAP).unwrap(),
                "{} {s}",
                g.name
            );
        }
    }
}

#[test]
fn surface_group_count_is_class_sum() {
    // |Hom(pi_1 of the torus, G)| = |G| * (number of classes).
    let g = ExplicitGroup::symmetric(4).unwrap();
    let t = compute_character_table(&g, 30, TableCaps::default()).unwrap();
    assert_eq!(total_hom_count(&t, &sig("1;"), false).unwrap(), BigUint::from(24u32 * 5));
}

#[test]
fn table_json_round_trip() {
    let g = ExplicitGroup::symmetric(3).unwrap();
    let t = compute_character_table(&g, 30, TableCaps::default()).unwrap();
    let back = CharacterTable::from_json(&t.to_json().unwrap()).unwrap();
    assert_eq!(back.group_order, t.group_order);
    assert_eq!(back.degrees(), t.degrees());
    let s = sig("0;2,2,3");
    assert_eq!(total_hom_count(&back, &s, false).unwrap(), total_hom_count(&t, &s, false).unwrap());
    assert!(CharacterTable::from_json("{\"group_order\": \"6\"}").is_err());
}
