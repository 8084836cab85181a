use std::path::PathBuf;
use std::process::{Command, Output};

fn out_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lozenge-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn lozenge(args: &[&str]) -> Output {
    lozenge_in(&out_dir("default"), args)
}

fn lozenge_in(dir: &PathBuf, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lozenge"))
        .args(args)
        .env("LOZENGE_OUT_DIR", dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = lozenge(args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    stdout(&o)
}

#[test]
fn count_examples() {
    assert_eq!(ok(&["count", "hexagon", "1", "1", "1"]), "2\n");
    assert_eq!(
        ok(&["count", "quartered", "0", "5", "2", "--dents", "1,2"]),
        "1\n"
    );
    assert_eq!(
        ok(&["count", "quartered", "2", "6", "3", "--dents", "2,3"]),
        ok(&["formula", "quartered", "2", "6", "3", "--dents", "2,3"])
    );
}

#[test]
fn formula_examples() {
    assert_eq!(ok(&["formula", "macmahon", "0", "4", "7"]), "1\n");
    assert_eq!(
        ok(&["formula", "proctor", "3", "6", "4"]),
        ok(&["count", "staircase", "3", "6", "4"])
    );
    assert_eq!(
        ok(&["formula", "quartered", "2", "5", "3", "--dents", "2"]),
        ok(&["count", "quartered", "2", "5", "3", "--dents", "2"])
    );
}

#[test]
fn json_schema_is_stable() {
    for cmd in ["count", "formula"] {
        let line = ok(&[
            cmd,
            "quartered",
            "2",
            "6",
            "3",
            "--dents",
            "2,3",
            "--format",
            "json",
        ]);
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, ["dents", "family", "params", "value"]);
        assert_eq!(v["family"], "quartered");
        assert_eq!(v["params"], serde_json::json!({"a": 2, "b": 6, "c": 3}));
        assert_eq!(v["dents"], serde_json::json!([2, 3]));
        assert_eq!(v["value"], "1848");
    }
}

#[test]
fn csv_output() {
    let out = ok(&["count", "hexagon", "2", "2", "2", "--format", "csv"]);
    assert_eq!(out, "family,a,b,c,dents,value\nhexagon,2,2,2,\"\",20\n");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["count"][..],
        &["count", "hexagon", "1", "1"],
        &["count", "quartered", "2", "5", "3", "--dents", "7"],
        &["count", "quartered", "2", "5", "3"],
        &["count", "staircase", "1", "1", "3"],
        &["count", "hexagon", "1", "1", "1", "--dents", "1"],
        &["frobnicate"],
        &["verify", "--check", "nope"],
        &["verify", "--ranges", "q=0..1"],
        &["count", "--region-file", "/nonexistent/region.txt"],
    ] {
        let o = lozenge(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn verify_desk_preset_passes() {
    let dir = out_dir("desk");
    let o = lozenge_in(&dir, &["verify", "--preset", "desk"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().last().unwrap().starts_with("PASS"), "{text}");
    let report = std::fs::read_to_string(dir.join("report.jsonl")).unwrap();
    assert!(report.lines().count() > 1000);
}

#[test]
fn verify_trivial_range_passes() {
    let o = lozenge(&["verify", "--ranges", "a=0..0"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_identity_grid() {
    let dir = out_dir("grid");
    let o = lozenge_in(
        &dir,
        &[
            "verify", "--check", "identity", "--grid", "10", "-o", "grid.csv",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("identity              495 instances"));
    let csv = std::fs::read_to_string(dir.join("grid.csv")).unwrap();
    assert_eq!(csv.lines().count(), 496);
}

#[test]
fn failed_check_exits_1() {
    let o = lozenge(&["verify", "--check", "macmahon", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert!(err.contains("macmahon H(1,1,1): expected 3 got 2"), "{err}");
    assert!(stdout(&o).lines().last().unwrap().starts_with("FAIL"));
}

#[test]
fn unwritable_report_exits_1() {
    // a report path that cannot be created is a runtime failure, not usage
    let blocker = out_dir("blocked").join("file");
    std::fs::write(&blocker, "x").unwrap();
    let target = blocker.join("r.jsonl");
    let o = lozenge(&[
        "verify",
        "--preset",
        "empty",
        "-o",
        target.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn render_examples() {
    let svg = ok(&["render", "hexagon", "1", "1", "1", "--tiling", "0"]);
    assert_eq!(svg.matches("<polygon").count(), 6 + 3);

    let svg = ok(&["render", "quartered", "2", "6", "3", "--dents", "2,3"]);
    let cells = ok(&["count", "quartered", "2", "6", "3", "--dents", "2,3", "-v"]);
    assert!(!cells.is_empty());
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));

    let dir = out_dir("render");
    let region = dir.join("empty.txt");
    std::fs::write(&region, "region empty\n").unwrap();
    let o = lozenge_in(
        &dir,
        &[
            "render",
            "--region-file",
            region.to_str().unwrap(),
            "-o",
            "empty.svg",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let svg = std::fs::read_to_string(dir.join("empty.svg")).unwrap();
    assert!(svg.contains("<rect") && !svg.contains("<polygon"));
}

#[test]
fn region_file_counts() {
    let dir = out_dir("file");
    let path = dir.join("hex.txt");
    std::fs::write(&path, "region unit\n0 0\n0 1\n0 2\n1 0\n1 1\n1 2\n").unwrap();
    let o = lozenge(&[
        "count",
        "--region-file",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["family"], "region-file");
    assert_eq!(v["value"], "2");
}

#[test]
fn probe_reports_identity_map() {
    let out = ok(&["probe", "--max-a", "2", "--max-b", "4", "--max-c", "3"]);
    assert!(out.contains("P(2,4,1) L="));
    assert!(out.trim_end().ends_with("true"));
}
