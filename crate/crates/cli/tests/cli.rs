use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn dnl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dnl")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn golden_args(out: &Path) -> Vec<String> {
    let f = |n: &str| fixture(n).to_str().unwrap().to_string();
    [
        "make",
        &f("docs_payments.csv"),
        "--overrides",
        &f("overrides.json"),
        "--meta",
        &f("meta.json"),
        "--modules",
        "metadata,provenance,variables,statistics,pair_plots,probabilistic_model,ground_truth_correlations",
        "--pair",
        "recipient_state,total_amount_of_payment_usdollars",
        "--pair",
        "product_name,recipient_state",
        "--pair",
        "total_amount_of_payment_usdollars,number_of_payments_included_in_total_amount",
        "--target",
        "product_name",
        "--target-values",
        "Xarelto,Eliquis",
        "--condition",
        "recipient_state",
        "--seed",
        "7",
        "--gt",
        &f("census_states.csv"),
        "--dataset-key",
        "recipient_state",
        "--value-column",
        "total_amount_of_payment_usdollars",
        "--aggregates",
        "sum,per_capita",
        "--timestamp",
        "2026-01-01T00:00:00Z",
        "--out",
        out.to_str().unwrap(),
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

#[test]
fn make_with_complete_meta_writes_label() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("label.json");
    let o = dnl(&[
        "make",
        p(&fixture("docs_payments.csv")),
        "--modules",
        "metadata",
        "--meta",
        p(&fixture("meta.json")),
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let label = std::fs::read_to_string(&out).unwrap();
    assert!(label.contains("\"metadata\""));
    assert!(!label.contains("\"statistics\""));
}

#[test]
fn make_without_meta_lists_actions_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("label.json");
    let o = dnl(&["make", p(&fixture("docs_payments.csv")), "--modules", "metadata", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).lines().any(|l| l == "ACTION: modules.metadata.description"));
    assert!(!out.exists());
}

#[test]
fn action_list_names_each_missing_variable() {
    let o = dnl(&["make", p(&fixture("docs_payments.csv")), "--modules", "variables,provenance"]);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines.contains(&"ACTION: modules.provenance.source.name"));
    assert!(lines.contains(&"ACTION: modules.variables.entries[17].description"));
    assert!(lines.iter().all(|l| l.starts_with("ACTION: ")));
}

#[test]
fn ground_truth_without_gt_is_a_config_error() {
    let o = dnl(&["make", p(&fixture("docs_payments.csv")), "--modules", "ground_truth"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--gt"), "{}", stderr(&o));
}

#[test]
fn probabilistic_without_target_is_a_config_error() {
    let o = dnl(&["make", p(&fixture("docs_payments.csv")), "--modules", "probabilistic_model"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--target"));
}

#[test]
fn unknown_module_is_an_error() {
    let o = dnl(&["make", p(&fixture("docs_payments.csv")), "--modules", "nutrition"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown module"));
}

#[test]
fn unknown_target_value_suggests_neighbours() {
    let o = dnl(&[
        "make",
        p(&fixture("docs_payments.csv")),
        "--meta",
        p(&fixture("meta.json")),
        "--modules",
        "probabilistic_model",
        "--target",
        "product_name",
        "--target-values",
        "Xareltoo",
        "--condition",
        "recipient_state",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Xarelto"), "{}", stderr(&o));
}

#[test]
fn override_naming_unknown_column_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let ov = dir.path().join("ov.json");
    std::fs::write(&ov, r#"{"nope": {"stratum": "nominal", "subtype": "string"}}"#).unwrap();
    let o = dnl(&["make", p(&fixture("docs_payments.csv")), "--overrides", p(&ov)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nope"));
}

#[test]
fn ragged_csv_reports_the_row() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    std::fs::write(&csv, "a,b\n1,2\n3\n").unwrap();
    let o = dnl(&["make", p(&csv)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("row 3"), "{}", stderr(&o));
}

#[test]
fn stray_text_in_numeric_column_names_the_cell() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("dirty.csv");
    let meta = dir.path().join("meta.json");
    let mut body = String::from("x\n");
    for i in 0..30 {
        body += &format!("{i}.5\n");
    }
    body += "n/a\n";
    std::fs::write(&csv, body).unwrap();
    std::fs::write(&meta, r#"{"modules":{"metadata":{"description":"d"}}}"#).unwrap();

    let o = dnl(&["make", p(&csv), "--meta", p(&meta)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains(r#"column "x", row 32: "n/a" is not a number"#), "{}", stderr(&o));

    let o = dnl(&["make", p(&csv), "--meta", p(&meta), "--missing-tokens", ",n/a"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn dataset_can_come_from_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let meta = dir.path().join("meta.json");
    std::fs::write(&meta, r#"{"modules": {"metadata": {"description": "tiny"}}}"#).unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_dnl"))
        .args(["make", "-", "--modules", "statistics", "--meta", p(&meta)])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    {
        use std::io::Write;
        let mut stdin = child.stdin.take().unwrap();
        stdin.write_all(b"x,y\n1,a\n2,b\n3,\n").unwrap();
    }
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let label = stdout(&o);
    assert!(label.contains("\"filename\": \"stdin\""));
    assert!(label.ends_with("}\n"));
}

#[test]
fn golden_label_is_reproduced_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("label.json");
    let args = golden_args(&out);
    let o = Command::new(env!("CARGO_BIN_EXE_dnl")).args(&args).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let made = std::fs::read(&out).unwrap();
    let golden = std::fs::read(fixture("golden_label.json")).unwrap();
    assert!(made == golden, "label differs from tests/fixtures/golden_label.json; regenerate it if intended");
}

#[test]
fn validate_accepts_golden_label_silently() {
    let o = dnl(&["validate", p(&fixture("golden_label.json"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
}

#[test]
fn validate_reports_missing_metadata_once() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("l.json");
    let mut v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(fixture("golden_label.json")).unwrap()).unwrap();
    v["modules"].as_object_mut().unwrap().remove("metadata");
    std::fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let o = dnl(&["validate", p(&path)]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "modules.metadata\tmodule.required\trequired\n");
}

#[test]
fn validate_flags_malformed_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("l.json");
    std::fs::write(&path, "{\"schema_version\": ").unwrap();
    let o = dnl(&["validate", p(&path)]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let fields: Vec<&str> = text.trim_end().split('\t').collect();
    assert_eq!(fields[1], "json.malformed");
}

#[test]
fn validate_unreadable_file_is_an_error() {
    let o = dnl(&["validate", "/nonexistent/label.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("cannot read"));
}

#[test]
fn inspect_statistics_prints_four_tables() {
    let o = dnl(&["inspect", p(&fixture("golden_label.json")), "--module", "statistics"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for title in ["ordinal", "nominal", "continuous", "discrete"] {
        assert!(text.lines().any(|l| l == title), "missing {title} table");
    }
    assert!(text.contains("Xarelto (200)"));
    assert!(text.contains("Aciphex (1)"));
    assert!(text.contains("3.20%"));
}

#[test]
fn inspect_pair_renders_one_cat_cont_cell() {
    for pair in [
        "recipient_state,total_amount_of_payment_usdollars",
        "total_amount_of_payment_usdollars,recipient_state",
    ] {
        let o = dnl(&["inspect", p(&fixture("golden_label.json")), "--module", "pair_plots", "--pair", pair]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let text = stdout(&o);
        assert!(text.starts_with("recipient_state x total_amount_of_payment_usdollars (cat_cont)"));
        assert!(text.lines().any(|l| l.starts_with("CA ")));
    }
}

#[test]
fn inspect_absent_module_names_available_ones() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("label.json");
    let o = dnl(&[
        "make",
        p(&fixture("docs_payments.csv")),
        "--modules",
        "metadata",
        "--meta",
        p(&fixture("meta.json")),
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = dnl(&["inspect", p(&out), "--module", "provenance"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("available: metadata"), "{}", stderr(&o));
}

#[test]
fn inspect_correlations_lists_both_signs() {
    let o = dnl(&["inspect", p(&fixture("golden_label.json")), "--module", "ground_truth_correlations"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("Negative") && text.contains("Positive"));
    assert!(text.contains("(per_capita)"));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    assert_eq!(dnl(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(dnl(&["make"]).status.code(), Some(1));
    assert_eq!(dnl(&["make", "x.csv", "--no-such-flag"]).status.code(), Some(1));
    let help = dnl(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("make"));
    assert_eq!(dnl(&["--version"]).status.code(), Some(0));
}
