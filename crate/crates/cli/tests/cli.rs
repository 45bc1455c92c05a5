use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.scn"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cerfmorse")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path_str(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_figure3_succeeds() {
    let o = run(&["validate", path_str(&scenario("figure3"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("axioms: ok"));
}

#[test]
fn every_good_fixture_validates() {
    for name in ["figure2", "figure3", "figure4", "eyeball", "squaretame", "tame-contact", "cascade-n5-base1-ratio2"] {
        let o = run(&["validate", path_str(&scenario(name))]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
    }
}

#[test]
fn escaping_point_is_a_validation_error_citing_c1() {
    let o = run(&["validate", path_str(&scenario("escaping-point"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("C1"));
}

#[test]
fn duplicate_event_is_rejected_citing_disjointness() {
    let o = run(&["validate", path_str(&scenario("duplicate-event"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("pairwise disjoint"));
}

#[test]
fn syntax_errors_and_missing_files_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.scn");
    fs::write(&bad, "[scenario]\nname figure\n").unwrap();
    let o = run(&["validate", path_str(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"));
    let o = run(&["validate", path_str(&dir.path().join("missing.scn"))]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn upward_flow_is_an_axiom_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("up.scn");
    fs::write(&f, "[scenario]\nring = z2\n[arc c1]\npoints = 0:2 1:2\n[arc c2]\npoints = 0:1 1:1\n[gamma]\nc2 -> c1 = 1\n")
        .unwrap();
    let o = run(&["validate", path_str(&f)]);
    assert_eq!(o.status.code(), Some(3), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn track_figure2_lists_both_transfers() {
    let o = run(&["track", path_str(&scenario("figure2")), "--class", "c1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("# transfer at r = 1/2: c1 -> c2 at rho = 2"), "{out}");
    assert!(out.contains("# transfer at r = 9/10: c2 -> c3 at rho = 3"), "{out}");
    assert!(out.contains("c1 - c2 - c3"));
}

#[test]
fn track_figure3_over_other_rings() {
    for coeff in ["z", "q"] {
        let o = run(&["track", path_str(&scenario("figure3")), "--coeff", coeff]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stdout(&o).contains("# transfer at r = 13/20: c1 -> c2"));
    }
}

#[test]
fn track_without_class_is_a_usage_error() {
    let o = run(&["track", path_str(&scenario("escaping-point"))]);
    assert_ne!(o.status.code(), Some(0));
    let o = run(&["track", path_str(&scenario("squaretame"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn homology_table_has_a_row_per_interval() {
    let o = run(&["homology", path_str(&scenario("figure3"))]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<String> = stdout(&o).lines().filter(|l| !l.starts_with('#')).skip(1).map(String::from).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.contains("rank 1")));
}

#[test]
fn cascade_then_escape_costs_n_minus_one_ln2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["cascade", "--n", "5", "--ratio", "2", "--out", path_str(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let file = dir.path().join("cascade-n5-base1-ratio2.scn");
    let o = run(&["escape", path_str(&file)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let cost: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("cumulative: "))
        .and_then(|v| v.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!((cost - 4.0 * std::f64::consts::LN_2).abs() < 1e-9, "{out}");
    assert!(out.contains("infeasible within unit parameter time (exact)"));
}

#[test]
fn cascade_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["cascade", "--n", "4", "--ratio", "3/2", "--base", "2", "--out", path_str(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let file = dir.path().join("cascade-n4-base2-ratio3_2.scn");
    let text = fs::read_to_string(&file).unwrap();
    let printed = run(&["cascade", "--n", "4", "--ratio", "3/2", "--base", "2"]);
    assert_eq!(stdout(&printed), text);
    let first = run(&["validate", path_str(&file)]);
    let second = run(&["validate", path_str(&file)]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn shipped_cascade_matches_generator() {
    let printed = run(&["cascade", "--n", "5", "--ratio", "2"]);
    assert_eq!(stdout(&printed), fs::read_to_string(scenario("cascade-n5-base1-ratio2")).unwrap());
}

#[test]
fn rabinowitz_verdicts_are_conditional() {
    let o = run(&["rabinowitz", path_str(&scenario("squaretame"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("class survives"));
    assert!(stdout(&o).contains("(conditional on H3)"));
    let o = run(&["rabinowitz", path_str(&scenario("squaretame")), "--rho0", "3/4"]);
    assert!(stdout(&o).contains("inconclusive"));
    let o = run(&["rabinowitz", path_str(&scenario("tame-contact"))]);
    assert!(stdout(&o).contains("verdict: invariant (conditional on H3)"));
}

#[test]
fn plot_is_byte_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = run(&["plot", path_str(&scenario("figure2")), "--out", path_str(d.path())]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in ["figure2-cerf.svg", "figure2-trace.svg"] {
        let x = fs::read(a.path().join(f)).unwrap();
        assert_eq!(x, fs::read(b.path().join(f)).unwrap());
        assert!(x.starts_with(b"<svg"));
    }
}

#[test]
fn outputs_are_stable_across_runs() {
    for cmd in ["evolve", "homology", "track"] {
        let x = run(&[cmd, path_str(&scenario("eyeball"))]);
        let y = run(&[cmd, path_str(&scenario("eyeball"))]);
        assert_eq!(x.status.code(), Some(0));
        assert_eq!(x.stdout, y.stdout);
    }
}

#[test]
fn fuzz_finds_no_failures() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["fuzz", "--seed", "3", "--count", "40", "--out", path_str(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("0 failing"));
    let written = fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(written, 40);
    for entry in fs::read_dir(dir.path()).unwrap().take(5) {
        let o = run(&["validate", path_str(&entry.unwrap().path())]);
        assert_eq!(o.status.code(), Some(0));
    }
}
