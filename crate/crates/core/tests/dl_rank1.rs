use proptest::prelude::*;
use rigidkit::arith::Cyclotomic;
use rigidkit::chartable::{parse_ctb, tables_equivalent, validate, CharacterTable};
use rigidkit::dixon::character_table_dixon;
use rigidkit::dl_rank1::{
    build_family, check_dl_orthogonality, check_sum, check_sym, check_sym_regular, check_valrt, check_valuni,
    dl_character, dual_data, semisimple_unipotent_value, semisimple_unipotent_values, val_rt, vanishing_sum,
    ClassLabel, FamilyKind, Rank1Family, RowLabel, TorusKind,
};
use rigidkit::smallgrp::{closure, GroupElement, GroupSpec, DEFAULT_CLOSURE_CAP};

use FamilyKind::{GL2, PGL2, SL2};

fn fixture(name: &str) -> CharacterTable {
    let path = format!("{}/fixtures/tables/{name}.ctb", env!("CARGO_MANIFEST_DIR"));
    parse_ctb(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn dixon(spec: &str) -> CharacterTable {
    let s: GroupSpec = spec.parse().unwrap();
    let g = closure(&s.generators(), DEFAULT_CLOSURE_CAP).unwrap();
    character_table_dixon(&g, &g.conjugacy_classes(), spec).unwrap()
}

fn fam(kind: FamilyKind, q: u64) -> Rank1Family {
    build_family(kind, q).unwrap()
}

fn all_families() -> Vec<(FamilyKind, u64)> {
    let mut out: Vec<_> = [3, 4, 5, 7, 9, 11].iter().map(|&q| (GL2, q)).collect();
    out.extend([3, 5, 7, 11].iter().map(|&q| (SL2, q)));
    out.extend([3, 5, 7, 11].iter().map(|&q| (PGL2, q)));
    out
}

#[test]
fn tables_validate_with_classical_counts() {
    for (kind, q) in all_families() {
        let f = fam(kind, q);
        let report = validate(&f.table);
        assert!(report.passed(), "{kind}({q}):\n{report}");
        assert_eq!(f.table.num_classes(), f.expected_class_count(), "{kind}({q})");
        for &u in &f.unipotent_classes() {
            for (r, row) in f.table.rows.iter().enumerate() {
                let v = &row.values[u];
                let c = match f.row_labels[r] {
                    RowLabel::HalfPrincipal(_) => Some(1),
                    RowLabel::HalfDiscrete(_) => Some(-1),
                    _ => None,
                };
                if let (Some(c), true) = (c, f.class_labels[u].is_regular_unipotent()) {
                    // (c ± g)/2 with g² = ±q
                    let g = &v.mul_int(2) - &Cyclotomic::from_int(c);
                    let sign = if q % 4 == 1 { 1 } else { -1 };
                    assert_eq!(&g * &g, Cyclotomic::from_int(sign * q as i64));
                    continue;
                }
                let v = v.to_rational().unwrap();
                assert!(v.is_integer(), "{kind}({q}): unipotent value {v}");
            }
        }
    }
}

#[test]
fn agrees_with_dixon_and_fixtures() {
    let gl = fam(GL2, 3);
    assert!(tables_equivalent(&gl.table, &dixon("GL(2,3)")));
    assert!(tables_equivalent(&gl.table, &fixture("gl2_3")));
    let sl = fam(SL2, 5);
    assert!(tables_equivalent(&sl.table, &dixon("SL(2,5)")));
    assert!(tables_equivalent(&sl.table, &fixture("sl2_5")));
    assert!(tables_equivalent(&fam(GL2, 5).table, &dixon("GL(2,5)")));
    assert!(tables_equivalent(&fam(SL2, 7).table, &dixon("SL(2,7)")));
}

#[test]
fn pgl2_agrees_with_dixon() {
    for q in [5u64, 7] {
        let spec: GroupSpec = format!("GL(2,{q})").parse().unwrap();
        let gens: Vec<GroupElement> = spec
            .generators()
            .iter()
            .map(|g| GroupElement::from_rows(q, &g.rows(), true))
            .collect();
        let g = closure(&gens, DEFAULT_CLOSURE_CAP).unwrap();
        assert_eq!(g.order() as u64, q * (q * q - 1));
        let t = character_table_dixon(&g, &g.conjugacy_classes(), "PGL2").unwrap();
        assert!(tables_equivalent(&fam(PGL2, q).table, &t), "PGL2({q})");
    }
}

fn class(f: &Rank1Family, l: ClassLabel) -> usize {
    f.class_of(l).unwrap()
}

#[test]
fn dl_characters_gl2() {
    let q = 5u64;
    let f = fam(GL2, q);
    let r = dl_character(&f, TorusKind::Split, &[1, 2]).unwrap();
    assert_eq!(r.decomposition.len(), 1);
    assert_eq!(r.decomposition[0].1, 1);
    // |G|_{p'} / |T| = (q-1)(q²-1) / (q-1)²
    assert_eq!(r.degree(&f), Cyclotomic::from_int((q + 1) as i64));
    assert_eq!(r.inner(&r), 1);
    let r = dl_character(&f, TorusKind::Split, &[3, 3]).unwrap();
    let degrees: Vec<_> = r.decomposition.iter().map(|&(row, k)| (f.table.rows[row].degree().clone(), k)).collect();
    assert_eq!(
        degrees,
        vec![(Cyclotomic::one(), 1), (Cyclotomic::from_int(q as i64), 1)]
    );
    assert_eq!(r.inner(&r), 2);
    let r = dl_character(&f, TorusKind::Nonsplit, &[1]).unwrap();
    assert_eq!(r.decomposition.len(), 1);
    assert_eq!(r.decomposition[0].1, -1);
    assert_eq!(f.table.rows[r.decomposition[0].0].degree(), &Cyclotomic::from_int(q as i64 - 1));
    assert_eq!(r.degree(&f), Cyclotomic::from_int(1 - q as i64));
    assert!(dl_character(&f, TorusKind::Split, &[4, 0]).is_err());
    assert!(dl_character(&f, TorusKind::Nonsplit, &[0, 0]).is_err());
}

#[test]
fn dl_scalar_products() {
    for (kind, q) in [(GL2, 3), (GL2, 4), (GL2, 5), (SL2, 5), (SL2, 7), (PGL2, 7)] {
        let report = check_dl_orthogonality(&fam(kind, q));
        assert!(report.passed(), "{report}");
    }
}

#[test]
fn green_functions() {
    let f = fam(GL2, 5);
    let (green, report) = check_valuni(&f).unwrap();
    assert!(report.passed(), "{report}");
    let reg = green.classes.iter().position(|&u| f.class_labels[u].is_regular_unipotent()).unwrap();
    assert_eq!(green.values[reg], [1, 1]);
    assert_eq!(green.values[0], [6, -4]);
    let f = fam(GL2, 3);
    let (green, _) = check_valuni(&f).unwrap();
    assert_eq!(green.values[0][0], 4);
    for (kind, q) in all_families() {
        let (_, report) = check_valuni(&fam(kind, q)).unwrap();
        assert!(report.passed(), "{report}");
    }
}

#[test]
fn vanishing_sums() {
    let f = fam(GL2, 5);
    let full: Vec<Vec<u64>> = vec![vec![1, 0], vec![0, 1]];
    // 2 generates F_5^×, so diag(2, 1) has coordinates (1, 0)
    let v = vanishing_sum(&f, TorusKind::Split, &full, &[1, 0]).unwrap();
    assert_eq!(v.subgroup_order, 16);
    assert!(v.qualifies);
    assert!(v.value.is_zero());
    let v = vanishing_sum(&f, TorusKind::Split, &[], &[1, 0]).unwrap();
    assert!(!v.qualifies);
    assert_eq!(v.value, Cyclotomic::from_int(2));
    let g = fam(GL2, 3);
    // -1 is central, so its only conjugate is itself
    let v = vanishing_sum(&g, TorusKind::Split, &full[..1], &[1, 1]).unwrap();
    assert!(v.conjugates_qualify);
    assert!(v.value.is_zero());
    let v = vanishing_sum(&g, TorusKind::Nonsplit, &[vec![1]], &[1]).unwrap();
    assert_eq!(v.subgroup_order, 8);
    assert!(v.value.is_zero());
    for (kind, q) in all_families() {
        let report = check_sum(&fam(kind, q));
        assert!(report.passed(), "{report}");
    }
}

/// A subgroup moving `s` but fixing its Weyl conjugate: the sum does not
/// vanish, so the hypothesis has to cover all conjugates of `s`.
#[test]
fn vanishing_needs_all_conjugates() {
    let f = fam(GL2, 4);
    let v = vanishing_sum(&f, TorusKind::Split, &[vec![1, 0]], &[1, 0]).unwrap();
    assert!(v.qualifies);
    assert!(!v.conjugates_qualify);
    assert_eq!(v.value, Cyclotomic::from_int(3));
}

#[test]
fn semisimple_values_on_unipotents() {
    let q = 5u64;
    let f = fam(GL2, q);
    let (green, _) = check_valuni(&f).unwrap();
    let data = dual_data(&f, &f).unwrap();
    let find = |l: ClassLabel| data.iter().find(|d| d.label == l).unwrap();
    let split = find(ClassLabel::Split(0, 1));
    assert_eq!(semisimple_unipotent_value(&green, split, 0), (q as i64 + 1).into());
    let nonsplit = data.iter().find(|d| matches!(d.label, ClassLabel::Elliptic(_))).unwrap();
    assert_eq!(semisimple_unipotent_value(&green, nonsplit, 0), (q as i64 - 1).into());
    for (kind, q) in all_families() {
        let f = fam(kind, q);
        let d = fam(kind.dual(), q);
        let report = semisimple_unipotent_values(&f, &d).unwrap();
        assert!(report.passed(), "{report}");
    }
}

#[test]
fn double_coset_formula() {
    let f = fam(GL2, 5);
    let s = class(&f, ClassLabel::Split(0, 1));
    // s = diag(γ0, 1): θ = (α_a, α_b) gives α_a(γ0) + α_b(γ0)
    for (a, b) in [(1u64, 2u64), (0, 3), (2, 2)] {
        let want = &Cyclotomic::zeta(4, a as i64) + &Cyclotomic::zeta(4, b as i64);
        assert_eq!(val_rt(&f, s, TorusKind::Split, &[a, b]).unwrap(), want);
    }
    assert!(val_rt(&f, s, TorusKind::Nonsplit, &[3]).unwrap().is_zero());
    let one = class(&f, ClassLabel::Central(0));
    assert_eq!(val_rt(&f, one, TorusKind::Nonsplit, &[3]).unwrap(), Cyclotomic::from_int(-4));
    assert!(val_rt(&f, class(&f, ClassLabel::Unipotent { center: 0, variant: 0 }), TorusKind::Split, &[0, 0]).is_err());
    for (kind, q) in all_families() {
        let report = check_valrt(&fam(kind, q)).unwrap();
        assert!(report.passed(), "{report}");
    }
}

#[test]
fn symmetry_gl2() {
    for q in [3u64, 4, 5, 7, 9, 11] {
        let f = fam(GL2, q);
        let report = check_sym(&f, &f).unwrap();
        assert!(report.passed(), "{report}");
        let report = check_sym_regular(&f, &f).unwrap();
        assert!(report.passed(), "{report}");
    }
}

#[test]
fn symmetry_sl2_pgl2() {
    for q in [5u64, 7, 11] {
        let sl = fam(SL2, q);
        let pgl = fam(PGL2, q);
        for (a, b) in [(&sl, &pgl), (&pgl, &sl)] {
            let report = check_sym(a, b).unwrap();
            assert!(report.passed(), "{report}");
            let report = check_sym_regular(a, b).unwrap();
            assert!(report.passed(), "{report}");
        }
    }
}

#[test]
fn disconnected_centralizer_case() {
    let q = 7u64;
    let sl = fam(SL2, q);
    let pgl = fam(PGL2, q);
    let data = dual_data(&sl, &pgl).unwrap();
    let t = data.iter().find(|d| d.label == ClassLabel::Split(3, 3)).unwrap();
    assert_eq!(t.constituents.len(), 2);
    assert_eq!(t.centralizer_order, 2 * (q - 1));
    assert_eq!(t.connected_centralizer_order, q - 1);
    let minus = class(&sl, ClassLabel::Central(3));
    let lhs = sl.table.rows[t.constituents[0]].values[minus].mul_int(2 * (q as i64 - 1));
    // |C(-1)|_{p'} = q² - 1 and sgn∘det(t) = -1 for q = 7
    assert_eq!(lhs, Cyclotomic::from_int(-((q * q - 1) as i64)));
    assert!(dual_data(&sl, &sl).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn cyclic_subgroup_sums_vanish(q in prop::sample::select(vec![3u64, 4, 5, 7]), g in 0u64..48, s in 1u64..48, split in any::<bool>()) {
        let f = fam(GL2, q);
        let (torus, gens, point) = if split {
            let n = q - 1;
            (TorusKind::Split, vec![vec![g % n, (g / n) % n]], vec![s % n, (s / n) % n])
        } else {
            let n = q * q - 1;
            (TorusKind::Nonsplit, vec![vec![g % n]], vec![s % n])
        };
        let v = vanishing_sum(&f, torus, &gens, &point).unwrap();
        if v.conjugates_qualify {
            prop_assert!(v.value.is_zero());
        }
        if v.qualifies && !v.value.is_zero() {
            prop_assert!(!v.conjugates_qualify);
        }
    }
}
