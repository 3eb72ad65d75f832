use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_compactlab"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn poisson_reports_json() {
    let (code, out, _) = run(&["poisson", "--measure", "uniform", "--function", "cyl:a", "--element", "a"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["command"], "poisson --measure uniform --function cyl:a --element a --rank 2");
    assert_eq!(v["result"], "3/4");
}

#[test]
fn bad_word_exits_two_with_position() {
    let (code, out, err) = run(&["poisson", "--measure", "uniform", "--function", "cyl:a", "--element", "ax"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains('^'), "{err}");
}

#[test]
fn seeded_runs_are_deterministic() {
    let args = ["--seed", "11", "witness", "agreement", "--count", "3"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.0, 0, "{}", a.2);
    assert_eq!(a, b);
}

#[test]
fn examples_pass() {
    let (code, _, err) = run(&["examples", "run", "all"]);
    assert_eq!(code, 0, "{err}");
}
