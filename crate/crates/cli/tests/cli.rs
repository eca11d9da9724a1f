use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hcstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcstab"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = hcstab(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    stdout(&o)
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

/// Rows of a CSV report after the config line and header.
fn rows(text: &str) -> Vec<Vec<String>> {
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config: {"));
    lines.next().unwrap();
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn golden(name: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn single_linkage_merge_table_on_a_line() {
    let out = ok(&["cluster", "--input", "tests/fixtures/line4.json", "--format", "merge-table"]);
    let heights: Vec<String> = rows(&out).into_iter().map(|r| r[2].clone()).collect();
    assert_eq!(heights, ["2", "2", "3"]);
    assert_eq!(out, golden("line4_sl.merge.csv"));
}

#[test]
fn csv_and_json_inputs_agree() {
    let a = ok(&["cluster", "--input", "tests/fixtures/line4.json", "--format", "merge-table"]);
    let b = ok(&["cluster", "--input", "tests/fixtures/line4.csv", "--format", "merge-table"]);
    assert_eq!(rows(&a), rows(&b));
}

#[test]
fn exotic_linkage_collapses_below_the_first_distance() {
    let out = ok(&["cluster", "--input", "tests/fixtures/line4.json", "--method", "exotic", "--format", "newick"]);
    assert!(out.starts_with("[config "));
    assert!(out.trim_end().ends_with("(p0:0.75,p2:0.75,p5:0.75,p7:0.75);"));
    assert_eq!(out, golden("line4_exotic.nwk"));
}

#[test]
fn complete_linkage_json_report() {
    let raw = ok(&["cluster", "--input", "tests/fixtures/line4.json", "--method", "cl"]);
    assert_eq!(raw, golden("line4_cl.json"));
    let v: Value = serde_json::from_str(&raw).unwrap();
    assert_eq!(v["config"]["method"], "cl");
    assert_eq!(v["dendrogram"]["breakpoints"], serde_json::json!([0.0, 2.0, 7.0]));
    assert!(v["trace"].is_object());
}

#[test]
fn almost_standard_method_string() {
    let v = json(&[
        "cluster", "--input", "tests/fixtures/line4.json", "--method", "almost-standard", "--linkage", "al",
        "--condition", "always",
    ]);
    assert_eq!(v["config"]["method"], "almost-standard:al:always");
    let plain = json(&["cluster", "--input", "tests/fixtures/line4.json", "--method", "al"]);
    assert_eq!(v["dendrogram"], plain["dendrogram"]);
}

#[test]
fn trace_goes_next_to_the_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tree.nwk");
    let o = hcstab(&[
        "cluster", "--input", "tests/fixtures/line4.json", "--format", "newick", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let trace: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("tree.nwk.trace.json")).unwrap()).unwrap();
    assert!(trace.is_object());
}

#[test]
fn identical_spaces_are_at_distance_zero() {
    let v = json(&["gh", "--input", "tests/fixtures/line4.json", "--input2", "tests/fixtures/line4.csv"]);
    assert_eq!(v["value"], 0.0);
    assert_eq!(v["exact"], true);
}

#[test]
fn gh_bounds_bracket_the_exact_value() {
    let args = ["gh", "--input", "tests/fixtures/line6.json", "--input2", "tests/fixtures/star6.json"];
    let exact = json(&args);
    assert_eq!(exact["value"], 2.75);
    let mut b = args.to_vec();
    b.push("--bounds-only");
    let bounds = json(&b);
    assert!(bounds["lower"].as_f64().unwrap() <= 2.75);
    assert!(bounds["upper"].as_f64().unwrap() >= 2.75);
}

#[test]
fn required_exactness_exits_4_when_the_budget_runs_out() {
    let o = hcstab(&[
        "gh", "--input", "tests/fixtures/line6.json", "--input2", "tests/fixtures/star6.json", "--budget", "1",
        "--require-exact", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("BudgetExhausted"));
    assert_eq!(rows(&stdout(&o))[0][1], "false");
}

#[test]
fn sl_alpha_separates_the_bridge_endpoints() {
    let out = ok(&[
        "path-scan", "--prop-bridge", "1", "--gap", "1", "--method", "sl-alpha", "--alpha", "1", "--format", "csv",
    ]);
    let row = &rows(&out)[0];
    assert_eq!(row[0], "sl-alpha:1");
    let gap: f64 = row[10].parse().unwrap();
    assert!(gap >= 0.5, "{gap}");
    assert_eq!(row[12], "true");
}

#[test]
fn single_linkage_has_no_flip_on_the_bridge_path() {
    let o = hcstab(&["path-scan", "--prop-bridge", "1", "--gap", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("error: NoBehaviorFlip"));
}

#[test]
fn path_scan_on_a_file_uses_gamma_paths() {
    let o = hcstab(&[
        "path-scan", "--input", "tests/fixtures/line4.json", "--block1", "p0,p2", "--path", "gamma", "--method", "cl",
    ]);
    // Complete linkage is Gamma-regular, so the blocks merge at R at both ends.
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn complete_linkage_counterexample_heights() {
    let out = ok(&["counterexample", "--k-min", "4", "--k-max", "4", "--format", "csv"]);
    let row = &rows(&out)[0];
    let h: f64 = row[6].parse().unwrap();
    assert!((h - 1.6).abs() < 1e-12);
    assert_eq!(row[6], row[7]);
    assert_eq!(ok(&["counterexample", "--k-max", "2", "--format", "csv"]), golden("counterexample_k0_2.csv"));
}

#[test]
fn single_linkage_probe_trend_holds() {
    let out = ok(&[
        "probe", "--input", "tests/fixtures/ultra4.json", "--trials", "8", "--levels", "0.2,0.1,0.05", "--format", "csv",
    ]);
    let rows = rows(&out);
    assert_eq!(rows.len(), 24);
    assert!(rows.iter().all(|r| r[5] == "true"));
}

#[test]
fn random_probe_is_seeded() {
    let args = ["probe", "--random-n", "5", "--trials", "4", "--seed", "9", "--method", "cl"];
    let a = json(&args);
    assert_eq!(a["config"]["source"]["space"], "random");
    assert_eq!(ok(&args), ok(&args));
}

#[test]
fn probe_rejects_large_noise() {
    let o = hcstab(&["probe", "--input", "tests/fixtures/ultra4.json", "--levels", "0.6"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("LevelTooLarge"));
    let o = hcstab(&["probe", "--input", "tests/fixtures/ultra4.json", "--levels", "0.1,0.2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("LevelsNotDecreasing"));
}

#[test]
fn probe_input_must_be_an_ultrametric() {
    let o = hcstab(&["probe", "--input", "tests/fixtures/line4.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn harness_reports() {
    let v = json(&["harness", "--method", "al", "--trials", "50"]);
    assert_eq!(v["monotonicity"]["passed"], true);
    let out = ok(&["harness", "--kind", "admissibility", "--method", "sl-alpha", "--alpha", "1", "--trials", "10", "--format", "csv"]);
    assert!(rows(&out).iter().any(|r| r[0] == "admissible" && r[1] == "true"));
    let out = ok(&["harness", "--kind", "admissibility", "--method", "sl", "--trials", "10", "--format", "csv"]);
    assert!(rows(&out).iter().any(|r| r[0] == "admissible" && r[1] == "false"));
}

#[test]
fn validation_errors_exit_2_with_the_error_name() {
    let o = hcstab(&["validate", "--input", "tests/fixtures/bad_triangle.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: TriangleViolation"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());

    let o = hcstab(&["validate", "--input", "tests/fixtures/bad_triangle.json", "--tol", "3"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn argument_errors_exit_2() {
    for args in [
        &["cluster", "--input", "tests/fixtures/line4.json", "--method", "sl-alpha"][..],
        &["cluster", "--input", "tests/fixtures/line4.json", "--method", "sl-alpha", "--alpha", "0.5"],
        &["cluster", "--input", "tests/fixtures/line4.json", "--method", "almost-standard", "--condition", "nope"],
        &["cluster", "--input", "tests/fixtures/line4.json", "--method", "cl", "--alpha", "2"],
        &["cluster", "--input", "tests/fixtures/line4.json", "--method", "ward"],
        &["gh", "--input", "tests/fixtures/line4.json", "--input2", "tests/fixtures/line4.json", "--format", "newick"],
        &["path-scan"],
    ] {
        let o = hcstab(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!stderr(&o).is_empty());
    }
    let o = hcstab(&["cluster", "--input", "tests/fixtures/line4.json", "--method", "sl-alpha", "--alpha", "0.5"]);
    assert!(stderr(&o).starts_with("error: AlphaTooSmall"));
}

#[test]
fn missing_files_exit_1() {
    let o = hcstab(&["validate", "--input", "tests/fixtures/absent.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn reports_replay_from_their_config() {
    let dir = tempfile::tempdir().unwrap();
    for (args, name) in [
        (&["cluster", "--input", "tests/fixtures/line4.json", "--method", "exotic"][..], "a.json"),
        (&["counterexample", "--k-max", "1", "--format", "csv"], "b.csv"),
        (&["probe", "--random-n", "4", "--trials", "3", "--seed", "2", "--format", "csv"], "c.csv"),
    ] {
        let first = dir.path().join(name);
        let mut a = args.to_vec();
        a.extend(["--out", first.to_str().unwrap()]);
        ok(&a);
        let replayed = ok(&["run", "--config", first.to_str().unwrap()]);
        assert_eq!(replayed, std::fs::read_to_string(&first).unwrap(), "{name}");
    }
}

#[test]
fn replay_can_switch_format() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("r.json");
    ok(&["cluster", "--input", "tests/fixtures/line4.json", "--out", first.to_str().unwrap()]);
    let out = ok(&["run", "--config", first.to_str().unwrap(), "--format", "merge-table"]);
    assert_eq!(rows(&out), rows(&golden("line4_sl.merge.csv")));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["harness", "--method", "exotic", "--trials", "30", "--seed", "4"];
    assert_eq!(ok(&args), ok(&args));
}
