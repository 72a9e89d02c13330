use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geoconc")).args(args).env_remove("GEOCONC_TRUNCATE").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn sheaf_check_reports_witness_cover() {
    let o = run(&["sheaf-check", &data("d2_nonsheaf.json")]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("status: fail"));
    assert!(out.contains("cover: [{-1}, {1}]"), "{out}");
    assert!(out.contains("amalgamations: 2"));
}

#[test]
fn etale_roundtrip_on_two_sheets() {
    let o = run(&["etale-roundtrip", &data("d2_two_sheets.json")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("|Γ({-1,1})| = 4"), "{out}");
    assert!(out.contains("unit_iso: true"));
}

#[test]
fn validate_rejects_malformed_opens() {
    let o = run(&["validate", &data("malformed_opens.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("NotClosedUnderUnion"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn reports_are_byte_identical() {
    let cases: Vec<Vec<String>> = vec![
        vec!["sheafify".into(), data("d2_nonsheaf.json")],
        vec!["cech-nerve".into(), data("interval_cover.json")],
        vec!["pv-build".into(), data("swiss_flag.pv")],
        vec!["--json".into(), "dihomotopy-equiv".into(), data("point.json"), data("interval.json")],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn json_mirror_matches_text() {
    let text = stdout(&run(&["pv-build", &data("swiss_flag.pv")]));
    let json: serde_json::Value = serde_json::from_str(&stdout(&run(&["--json", "pv-build", &data("swiss_flag.pv")]))).unwrap();
    assert_eq!(json["status"], "pass");
    assert_eq!(json["allowed_points"], 48);
    assert_eq!(json["shortest_dipath"], 7);
    assert_eq!(json["dipath_classes"], 2);
    assert!(text.contains("allowed_points: 48"));
    assert!(text.contains("dipath_classes: 2"));
}

#[test]
fn swiss_flag_at_shortest_length() {
    let out = stdout(&run(&["pv-build", "--length", "7", &data("swiss_flag.pv")]));
    assert!(out.contains("dipaths: 2\ndipath_classes: 2"), "{out}");
}

#[test]
fn pv_errors_carry_positions() {
    let o = run(&["pv-build", &data("unknown_sem.pv")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("UnknownSemaphore: 2:9"), "{}", stderr(&o));
}

#[test]
fn loop_model_has_no_global_order() {
    let out = stdout(&run(&["pv-build", &data("loop.pv")]));
    assert!(out.contains("allowed_points: 6"));
    assert!(out.contains("global_orders: 0"));
}

#[test]
fn canonicalize_d2_charts() {
    let o = run(&["canonicalize", &data("d2_plus.json"), "--compare", &data("d2_minus.json")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("equivalent: true"));
    assert!(out.contains("common_refinement:\n  - 0: [-1]\n  - 1: [1]\n"), "{out}");
}

#[test]
fn dimap_check_verdicts() {
    assert_eq!(run(&["dimap-check", &data("d2_swap.json")]).status.code(), Some(0));
    let o = run(&["dimap-check", &data("interval_flip.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("witness: "));
}

#[test]
fn stalk_and_sheafify() {
    let o = run(&["stalk", "--point", "-1", &data("d2_nonsheaf.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("size: 1"));
    let out = stdout(&run(&["sheafify", &data("d2_nonsheaf.json")]));
    assert!(out.contains("input_was_sheaf: false"));
    assert!(out.contains("output_is_sheaf: true"));
}

#[test]
fn cech_nerve_truncation_from_env() {
    let o = Command::new(env!("CARGO_BIN_EXE_geoconc"))
        .args(["cech-nerve", &data("interval_cover.json")])
        .env("GEOCONC_TRUNCATE", "1")
        .output()
        .unwrap();
    let out = stdout(&o);
    assert!(out.contains("truncation: 1"));
    assert!(out.contains("{a}: 4 (0,0) (0,2) (2,0) (2,2)"), "{out}");
    assert!(!out.contains("level 2"));
    assert!(stdout(&run(&["cech-nerve", &data("interval_cover.json")])).contains("truncation: 3"));
    assert!(stdout(&run(&["cech-nerve", "--truncate", "2", &data("interval_cover.json")])).contains("level 2"));
}

#[test]
fn stalkwise_equiv_verdicts() {
    let ambient = format!("{},{}", data("point.json"), data("d2.json"));
    let o = run(&["stalkwise-equiv", &data("point_into_d2.json"), "--ambient", &ambient]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("source_homs: 1\n  target_homs: 2"));
    let o = run(&["stalkwise-equiv", &data("d2_swap.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("iso: true"));
    let o = run(&["stalkwise-equiv", &data("point_into_d2.json"), "--ambient", &data("d2.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("NotInAmbient"));
}

#[test]
fn dihomotopy_equiv_verdicts() {
    let o = run(&["dihomotopy-equiv", &data("point.json"), &data("interval.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: yes"));
    let o = run(&["dihomotopy-equiv", &data("point.json"), &data("d2.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("verdict: no"));
    let ctx = data("context_a.json");
    let o = run(&["dihomotopy-equiv", "--context", &ctx, "--map", &data("point_to_b.json"), &data("point.json"), &data("interval.json")]);
    assert_eq!(o.status.code(), Some(1), "the map must fix the context point");
    let o = run(&["dihomotopy-equiv", "--cap", "1", &data("point.json"), &data("interval.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("verdict: unknown"));
}

#[test]
fn emitted_space_validates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("model.json");
    let o = run(&["pv-build", &data("swiss_flag.pv"), "--emit-space", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = run(&["validate", out.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", stderr(&v));
    assert!(stdout(&v).contains("points: 48"));
}
