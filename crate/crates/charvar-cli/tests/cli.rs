use std::process::Command;

fn charvar(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_charvar"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn count_example() {
    let out = charvar(&["count", "--kind", "untwisted", "--n", "1", "--g", "1", "--p", "5"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["value"], "16");
}

#[test]
fn usage_error_exits_one() {
    let out = charvar(&["count", "--kind", "nonsense", "--n", "1", "--g", "1", "--p", "5"]);
    assert_eq!(out.status.code(), Some(1));
    let out = charvar(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn builtin_cuts_are_three_singletons() {
    let out = charvar(&["cuts", "--tiling", "hex-torus"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["cuts"], serde_json::json!([[0], [1], [2]]));
}

#[test]
fn identity_checks_pass() {
    for args in [
        vec!["morita-check", "--tiling", "hex-torus", "--n", "1", "--p", "3"],
        vec!["gtrue-check", "--tiling", "square-torus", "--n", "1", "--p", "2"],
        vec!["dimred-check", "--tiling", "hex-torus", "--gamma", "1", "--p", "3"],
        vec!["verify-exp", "--g", "1", "--N", "2", "--mode", "numeric", "--p", "3"],
    ] {
        let out = charvar(&args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["schema"], 1, "{args:?}");
        assert_eq!(v["pass"], true, "{args:?}");
    }
}

#[test]
fn limit_violation_exits_one() {
    let out = charvar(&[
        "count", "--kind", "untwisted", "--n", "2", "--g", "2", "--p", "7",
        "--max-iterations", "10",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the limit"));
}

#[test]
fn output_bytes_independent_of_worker_count() {
    let a = charvar(&["count", "--kind", "untwisted", "--n", "2", "--g", "2", "--p", "3", "--workers", "1"]);
    let b = charvar(&["count", "--kind", "untwisted", "--n", "2", "--g", "2", "--p", "3", "--workers", "4"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_format_and_out_file() {
    let dir = std::env::temp_dir().join("charvar-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("count.csv");
    let out = charvar(&[
        "count", "--kind", "untwisted", "--n", "1", "--g", "1", "--p", "5",
        "--format", "csv", "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("value,16"));
}
