use std::process::{Command, Output};

fn wythoff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wythoff")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn cube_f_vector_both_methods() {
    let o = wythoff(&["fvector", "x4o3o", "--method", "both"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "8 12 6");
}

#[test]
fn cuboctahedron_is_not_regular() {
    let o = wythoff(&["is-regular", "o3x4o"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("not regular: 2-faces square vs triangle"));
}

#[test]
fn oracle_agrees_on_the_cube() {
    let o = wythoff(&["is-regular", "x4o3o", "--oracle"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("oracle: agrees"));
}

#[test]
fn classify_four_dimensions() {
    let o = wythoff(&["classify", "--dim", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[0].starts_with("4-simplex (5-cell): f = 5 10 10 5"));
    assert!(lines[4].starts_with("120-cell"));
    assert!(lines[5].starts_with("600-cell"));
}

#[test]
fn classify_json_lists_entries() {
    let o = wythoff(&["--json", "classify", "--dim", "3"]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["command"], "classify");
    assert_eq!(doc["result"]["entries"].as_array().unwrap().len(), 5);
}

#[test]
fn degenerate_diagram_is_a_domain_error() {
    let o = wythoff(&["fvector", "o3o3o"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error (face_lattice):"));
}

#[test]
fn malformed_diagram_is_a_domain_error() {
    let o = wythoff(&["order", "x3q"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error (diagram):"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(wythoff(&["classify", "--dim", "1"]).status.code(), Some(2));
    assert_eq!(wythoff(&["faces", "x4o3o", "--rank", "7"]).status.code(), Some(2));
    assert_eq!(wythoff(&["bogus"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_wythoff"))
        .args(["order", "x3o"])
        .env("WYTHOFF_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tiny_budget_is_a_group_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_wythoff"))
        .args(["fvector", "x5o3o", "--method", "enum"])
        .env("WYTHOFF_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error (reflection_group):"));
}

#[test]
fn file_argument_matches_inline() {
    let dir = std::env::temp_dir().join(format!("wythoff-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("d.json");
    let doc = r#"{"nodes":[{"id":"v1","mark":"ring"},{"id":"v2","mark":"ring"},{"id":"v3","mark":"cross"}],
        "edges":[{"a":"v1","b":"v2","m":4},{"a":"v2","b":"v3","m":3}]}"#;
    std::fs::write(&path, doc).unwrap();
    let arg = format!("@{}", path.display());
    for cmd in ["fvector", "vertices", "is-regular"] {
        assert_eq!(stdout(&wythoff(&[cmd, &arg])), stdout(&wythoff(&[cmd, "x4x3o"])), "{cmd}");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn faces_report_counts() {
    let o = wythoff(&["--json", "faces", "o3x4x", "--rank", "2"]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let mut counts: Vec<u64> =
        doc["result"]["faces"].as_array().unwrap().iter().map(|f| f["count"].as_u64().unwrap()).collect();
    counts.sort();
    assert_eq!(counts, vec![6, 8]);
}

#[test]
fn off_export_has_header_and_counts() {
    let text = stdout(&wythoff(&["export", "x3o5o", "--format", "off"]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("OFF"));
    assert_eq!(lines.next(), Some("12 20 0"));
    let faces: Vec<&str> = text.lines().skip(2 + 12).collect();
    assert_eq!(faces.len(), 20);
    assert!(faces.iter().all(|f| f.starts_with("3 ")));
}

#[test]
fn check_passes_on_omnitruncated_cube() {
    let o = wythoff(&["check", "x4x3x"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), 7);
}
