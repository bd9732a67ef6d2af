use rigidkit::cli::run;

fn fixture(rel: &str) -> String {
    format!("{}/fixtures/{rel}", env!("CARGO_MANIFEST_DIR"))
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("rigidkit").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn rigid_report() {
    let t = fixture("tables/psl2_7.ctb");
    let (code, out, _) = call(&["rigid", &t, "2A", "3A", "7A", "--center", "1", "--assume-generation", "--machine"]);
    assert_eq!(code, 0);
    for line in ["N = 168", "f = 0", "rational_c1 = true", "rational_c2 = true", "rational_c3 = false", "verdict = rigid-candidate"] {
        assert!(out.lines().any(|l| l == line), "missing `{line}` in\n{out}");
    }
    let (code, out, _) = call(&["rigid", &t, "2A", "3A", "7A"]);
    assert_eq!(code, 0);
    assert!(out.contains("verdict: indeterminate"));
}

#[test]
fn regunip_order_and_filter() {
    let (code, out, _) = call(&["regunip", "--type", "E8", "--p", "7"]);
    assert_eq!((code, out.as_str()), (0, "order = 49\n"));
    let pools = fixture("regunip");
    let (code, out, _) = call(&["regunip", "--type", "G2", "--p", "7", "--pool", &pools, "--machine"]);
    assert_eq!(code, 0);
    assert!(out.ends_with("survivors = 2^3.L3(2),G2(2),L2(13)\n"), "{out}");
    let (code, _, err) = call(&["regunip", "--type", "E8", "--p", "8"]);
    assert_eq!(code, 2);
    assert!(err.contains("not a prime"));
    let (code, _, _) = call(&["regunip", "--type", "E9", "--p", "7"]);
    assert_eq!(code, 2);
}

#[test]
fn validate_and_structconst() {
    let (code, out, _) = call(&["validate", &fixture("tables/sl2_5.ctb")]);
    assert_eq!(code, 0);
    assert!(!out.contains("FAIL"));
    let (code, out, _) = call(&["structconst", &fixture("tables/s3.ctb"), "2A", "2A", "3A", "--machine"]);
    assert_eq!((code, out.as_str()), (0, "N = 6\n"));
    let (code, _, err) = call(&["structconst", &fixture("tables/s3.ctb"), "2A", "5A"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown class"));
}

#[test]
fn failing_check_exits_one() {
    let text = std::fs::read_to_string(fixture("tables/s3.ctb")).unwrap();
    let broken = text.replace("char X.3 2 ; 0 ; -1", "char X.3 2 ; 1 ; -1");
    let path = std::env::temp_dir().join(format!("rigidkit-broken-{}.ctb", std::process::id()));
    std::fs::write(&path, broken).unwrap();
    let (code, out, _) = call(&["validate", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(code, 1);
    assert!(out.contains("FAIL row-orthogonality"));
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(call(&["frobnicate"]).0, 2);
    assert_eq!(call(&["rigid", "x.ctb", "2A"]).0, 2);
    assert_eq!(call(&["validate", "/nonexistent/table.ctb"]).0, 2);
    assert_eq!(call(&["dl", "GL3", "--q", "5"]).0, 2);
    assert_eq!(call(&["dl", "SL2", "--q", "4"]).0, 2);
    assert_eq!(call(&["lemma", "sl", "--n", "3", "--q", "2"]).0, 2);
}

#[test]
fn every_subcommand_has_help() {
    let flags: [(&[&str], &[&str]); 9] = [
        (&["validate"], &[]),
        (&["structconst"], &[]),
        (&["rigid"], &["--center", "--assume-generation"]),
        (&["dixon"], &["--group", "--generators", "--projective", "--cap"]),
        (&["dl"], &["--q", "--checks"]),
        (&["dualsym"], &["--q"]),
        (&["regunip"], &["--type", "--p", "--pool", "--two-classes", "--expected"]),
        (&["lemma", "sl"], &["--n", "--q"]),
        (&["lemma", "so"], &["--m", "--q"]),
    ];
    for (cmd, wanted) in flags {
        let mut args = cmd.to_vec();
        args.push("--help");
        let (code, out, _) = call(&args);
        assert_eq!(code, 0, "{cmd:?}");
        for f in wanted.iter().chain(&["--machine", "--threads"]) {
            assert!(out.contains(f), "{cmd:?} help lacks {f}");
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let t = fixture("tables/sl2_5.ctb");
    let runs: [&[&str]; 4] = [
        &["dixon", "--group", "SL(2,5)"],
        &["dl", "GL2", "--q", "5", "--checks"],
        &["dualsym", "SL2", "--q", "5", "--machine"],
        &["rigid", &t, "4A", "5A", "5B"],
    ];
    for args in runs {
        let (c1, a, _) = call(args);
        let mut threaded = args.to_vec();
        threaded.extend(["--threads", "1"]);
        let (c2, b, _) = call(&threaded);
        let (c3, c, _) = call(args);
        assert_eq!((c1, c2, c3), (0, 0, 0), "{args:?}");
        assert_eq!(a, b);
        assert_eq!(a, c);
    }
}

#[test]
fn dixon_matches_fixture() {
    let (code, out, _) = call(&["dixon", "--group", "GL(2,3)", "--name", "GL2(3)"]);
    assert_eq!(code, 0);
    let built = rigidkit::chartable::parse_ctb(&out).unwrap();
    let shipped = rigidkit::chartable::parse_ctb(&std::fs::read_to_string(fixture("tables/gl2_3.ctb")).unwrap()).unwrap();
    assert!(rigidkit::chartable::tables_equivalent(&built, &shipped));
}

#[test]
fn dixon_from_generator_file() {
    let path = std::env::temp_dir().join(format!("rigidkit-gens-{}.txt", std::process::id()));
    std::fs::write(&path, "# S3 as 2x2 matrices over F_5\nmatrix 2 5\n0 1\n1 0\nmatrix 2 5\n0 4\n1 4\n").unwrap();
    let (code, out, _) = call(&["dixon", "--generators", path.to_str().unwrap(), "--name", "S3"]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(code, 0);
    let built = rigidkit::chartable::parse_ctb(&out).unwrap();
    assert_eq!(built.order, 6);
}

#[test]
fn lemma_counts_vanish() {
    let (code, out, _) = call(&["lemma", "sl", "--n", "3", "--q", "3", "--machine"]);
    assert_eq!(code, 0);
    assert!(out.ends_with("total = 0\n"));
    let (code, out, _) = call(&["lemma", "so", "--m", "2", "--q", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("total: 0"));
}
