use rigidkit::chartable::{class_is_rational, parse_ctb, tables_equivalent, validate, CharacterTable};
use rigidkit::dixon::{character_table_dixon, class_constants};
use rigidkit::smallgrp::{closure, parse_generators, GroupSpec, DEFAULT_CLOSURE_CAP};

fn fixture(name: &str) -> CharacterTable {
    let path = format!("{}/fixtures/tables/{name}.ctb", env!("CARGO_MANIFEST_DIR"));
    parse_ctb(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn dixon(spec: &str) -> CharacterTable {
    let s: GroupSpec = spec.parse().unwrap();
    let g = closure(&s.generators(), DEFAULT_CLOSURE_CAP).unwrap();
    let part = g.conjugacy_classes();
    character_table_dixon(&g, &part, spec).unwrap()
}

fn degrees(t: &CharacterTable) -> Vec<i64> {
    t.degrees().iter().map(|d| d.to_rational().unwrap().to_i64().unwrap()).collect()
}

#[test]
fn s3_from_gl2_2() {
    let gens = parse_generators("matrix 2 2\n1 1\n0 1\nmatrix 2 2\n1 0\n1 1\n", false).unwrap();
    let g = closure(&gens, 100).unwrap();
    let part = g.conjugacy_classes();
    let t = character_table_dixon(&g, &part, "S3").unwrap();
    assert_eq!(degrees(&t), vec![1, 1, 2]);
    assert!(validate(&t).passed());
    assert!(tables_equivalent(&t, &fixture("s3")));
}

#[test]
fn cyclic_of_order_two() {
    let t = dixon("GL(1,3)");
    assert!(tables_equivalent(&t, &fixture("c2")));
}

#[test]
fn sl2_5() {
    let t = dixon("SL(2,5)");
    assert_eq!(degrees(&t), vec![1, 2, 2, 3, 3, 4, 4, 5, 6]);
    let report = validate(&t);
    assert!(report.passed(), "{report}");
    assert!(tables_equivalent(&t, &fixture("sl2_5")));
}

#[test]
fn gl2_3() {
    let t = dixon("GL(2,3)");
    assert!(validate(&t).passed());
    assert!(tables_equivalent(&t, &fixture("gl2_3")));
}

#[test]
fn psl2_7() {
    let t = dixon("PSL(2,7)");
    assert_eq!(degrees(&t), vec![1, 3, 3, 6, 7, 8]);
    assert!(validate(&t).passed());
    assert!(tables_equivalent(&t, &fixture("psl2_7")));
    let c7 = (0..t.num_classes()).find(|&c| t.classes[c].element_order == 7).unwrap();
    assert!(!class_is_rational(&t, c7));
}

#[test]
fn larger_groups_validate() {
    for spec in ["SL(2,7)", "GL(2,5)", "SO(4,3)", "SL(3,3)"] {
        let t = dixon(spec);
        let report = validate(&t);
        assert!(report.passed(), "{spec}:\n{report}");
    }
}

#[test]
fn class_constant_counting_identity() {
    for spec in ["GL(1,3)", "PSL(2,7)", "SL(2,5)"] {
        let s: GroupSpec = spec.parse().unwrap();
        let g = closure(&s.generators(), DEFAULT_CLOSURE_CAP).unwrap();
        let part = g.conjugacy_classes();
        let a = class_constants(&g, &part);
        let k = a.num_classes();
        for i in 0..k {
            for j in 0..k {
                let total: u64 = (0..k).map(|l| a.get(i, j, l) * part.classes[l].size()).sum();
                assert_eq!(total, part.classes[i].size() * part.classes[j].size());
            }
        }
    }
}
