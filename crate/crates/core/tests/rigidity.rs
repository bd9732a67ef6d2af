use proptest::prelude::*;
use rigidkit::arith::{Cyclotomic, Rational};
use rigidkit::chartable::{class_is_rational, parse_ctb, CharacterTable};
use rigidkit::dixon::dixon_with_classes;
use rigidkit::rigidity::{
    frobenius_count, inverse_class, nontrivial_sum, rigidity_verdict, ClassTriple, RigidityError, Verdict,
};
use rigidkit::smallgrp::{closure, direct_triple_count, GroupSpec, DEFAULT_CLOSURE_CAP};

fn fixture(name: &str) -> CharacterTable {
    let path = format!("{}/fixtures/tables/{name}.ctb", env!("CARGO_MANIFEST_DIR"));
    parse_ctb(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn triple(t: &CharacterTable, a: &str, b: &str, c: &str) -> ClassTriple {
    let idx = |n: &str| t.class_index(n).unwrap();
    ClassTriple::new(idx(a), idx(b), idx(c))
}

#[test]
fn psl2_7_hurwitz_triple() {
    let t = fixture("psl2_7");
    let tr = triple(&t, "2A", "3A", "7A");
    assert_eq!(frobenius_count(&t, tr).unwrap(), 168);
    assert!(nontrivial_sum(&t, tr).unwrap().is_zero());
    let r = rigidity_verdict(&t, tr, 1, true).unwrap();
    assert_eq!(r.verdict, Verdict::RigidCandidate);
    assert_eq!(r.orbit_count_upper, Rational::one());
    assert_eq!(r.rationality_flags, [true, true, false]);
    assert!(!r.rationally_rigid());
    assert!(r.machine_block().contains("verdict = rigid-candidate\n"));
    let r = rigidity_verdict(&t, tr, 1, false).unwrap();
    assert_eq!(r.verdict, Verdict::Indeterminate);
}

#[test]
fn s3_involutions_and_three_cycle() {
    let t = fixture("s3");
    let tr = triple(&t, "2A", "2A", "3A");
    assert_eq!(frobenius_count(&t, tr).unwrap(), 6);
    assert_eq!(nontrivial_sum(&t, tr).unwrap(), Cyclotomic::one());
    let r = rigidity_verdict(&t, tr, 1, true).unwrap();
    assert_eq!(r.verdict, Verdict::RigidCandidate);
    assert!(r.rationally_rigid());
}

#[test]
fn identity_class_counts() {
    for name in ["s3", "psl2_7", "sl2_5", "gl2_3"] {
        let t = fixture(name);
        let one = t.class_index("1A").unwrap();
        for c in 0..t.num_classes() {
            let inv = inverse_class(&t, c).unwrap();
            for d in 0..t.num_classes() {
                let n = frobenius_count(&t, ClassTriple::new(one, c, d)).unwrap();
                let want = if d == inv { t.classes[c].size } else { 0 };
                assert_eq!(n, want, "{name}: (1A, {}, {})", t.classes[c].name, t.classes[d].name);
            }
        }
    }
}

#[test]
fn zero_count_is_not_rigid() {
    let t = fixture("psl2_7");
    let tr = triple(&t, "1A", "1A", "2A");
    assert_eq!(frobenius_count(&t, tr).unwrap(), 0);
    assert_eq!(nontrivial_sum(&t, tr).unwrap(), Cyclotomic::from_int(-1));
    assert_eq!(rigidity_verdict(&t, tr, 1, true).unwrap().verdict, Verdict::NotRigid);
    assert_eq!(rigidity_verdict(&t, tr, 1, false).unwrap().verdict, Verdict::NotRigid);
}

#[test]
fn bad_class_index() {
    let t = fixture("s3");
    assert_eq!(
        frobenius_count(&t, ClassTriple::new(0, 1, 9)),
        Err(RigidityError::BadClass(9))
    );
}

#[test]
fn rational_classes_give_rational_f() {
    for name in ["s3", "psl2_7", "sl2_5", "gl2_3"] {
        let t = fixture(name);
        let k = t.num_classes();
        let rational: Vec<usize> = (0..k).filter(|&c| class_is_rational(&t, c)).collect();
        for &a in &rational {
            for &b in &rational {
                for &c in &rational {
                    let f = nontrivial_sum(&t, ClassTriple::new(a, b, c)).unwrap();
                    assert!(f.is_rational(), "{name}: f = {f}");
                }
            }
        }
    }
}

/// Every triple of table classes against a count over group elements.
fn check_against_enumeration(spec: &str) {
    let s: GroupSpec = spec.parse().unwrap();
    let g = closure(&s.generators(), DEFAULT_CLOSURE_CAP).unwrap();
    let part = g.conjugacy_classes();
    let (t, origin) = dixon_with_classes(&g, &part, spec).unwrap();
    let k = t.num_classes();
    let members: Vec<Vec<_>> = origin
        .iter()
        .map(|&c| part.classes[c].members.iter().map(|&i| g.element(i).clone()).collect())
        .collect();
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                let target = origin[b];
                let in_c2 = |y: &rigidkit::smallgrp::GroupElement| {
                    part.class_of[g.index_of(y).unwrap()] == target
                };
                let z = g.element(part.classes[origin[c]].representative);
                let direct = direct_triple_count(&members[a], in_c2, z, t.classes[c].size);
                let n = frobenius_count(&t, ClassTriple::new(a, b, c)).unwrap();
                assert_eq!(n, direct, "{spec}: ({a}, {b}, {c})");
            }
        }
    }
}

#[test]
fn counts_match_enumeration_psl2_7() {
    check_against_enumeration("PSL(2,7)");
}

#[test]
fn counts_match_enumeration_sl2_5() {
    check_against_enumeration("SL(2,5)");
}

#[test]
fn counts_match_enumeration_gl2_3() {
    check_against_enumeration("GL(2,3)");
}

#[test]
fn counts_match_enumeration_so4_3() {
    check_against_enumeration("SO(4,3)");
}

proptest! {
    #[test]
    fn count_symmetries(a in 0usize..9, b in 0usize..9, c in 0usize..9) {
        let t = fixture("sl2_5");
        let n = frobenius_count(&t, ClassTriple::new(a, b, c)).unwrap();
        prop_assert_eq!(n, frobenius_count(&t, ClassTriple::new(b, c, a)).unwrap());
        prop_assert_eq!(n, frobenius_count(&t, ClassTriple::new(c, a, b)).unwrap());
        let inv = |x| inverse_class(&t, x).unwrap();
        // xyz = 1 iff z⁻¹y⁻¹x⁻¹ = 1
        prop_assert_eq!(n, frobenius_count(&t, ClassTriple::new(inv(c), inv(b), inv(a))).unwrap());
    }
}
