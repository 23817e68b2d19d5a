use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_toric-forms"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("toric-forms-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const P2: &str = r#"{"rank":2,"rays":[[1,0],[0,1],[-1,-1]],"cones":[[0,1],[1,2],[2,0]]}"#;

#[test]
fn fan_info_on_the_plane() {
    let path = temp_file("p2.json", P2);
    let o = run(&["fan", "info", "--file", path.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    for line in [
        "rank: 2",
        "rays: (1,0) (0,1) (-1,-1)",
        "smooth: true",
        "complete: true",
        "class group: Z",
        "a-sequence: (-1,-1,-1)",
    ] {
        assert!(out.lines().any(|l| l == line), "missing {line:?} in\n{out}");
    }
}

#[test]
fn aut_of_c3_surface() {
    let o = run(&["fan", "aut", "--builtin", "surface:C3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("order 3, label C3"));
}

#[test]
fn validate_round_trip_is_byte_exact() {
    let path = temp_file("p2-rt.json", P2);
    let first = run(&["fan", "validate", "--file", path.to_str().unwrap(), "--json"]);
    assert!(first.status.success());
    let second = run_stdin(&["fan", "validate", "--stdin", "--json"], &first.stdout);
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout);
    for name in ["hexagon", "surface:D6p", "projective:3"] {
        let a = run(&["fan", "validate", "--builtin", name, "--json"]);
        let b = run_stdin(&["fan", "validate", "--stdin", "--json"], &a.stdout);
        assert_eq!(a.stdout, b.stdout, "{name}");
    }
}

#[test]
fn three_real_forms_of_the_line() {
    let o = run(&["classify", "projective", "-n", "1", "--backend", "real"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("total: 3 forms"));
    let j = run(&["classify", "projective", "-n", "1", "--backend", "real", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["total"], 3);
    assert_eq!(v["entries"].as_array().unwrap().len(), 2);
}

#[test]
fn hexagon_real_report() {
    let o = run(&["classify", "surface-real", "--builtin", "hexagon", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["total"], 7);
    let f = run(&["classify", "fan", "--builtin", "hexagon", "--backend", "real", "--json"]);
    let w: serde_json::Value = serde_json::from_slice(&f.stdout).unwrap();
    assert_eq!(v["entries"], w["entries"]);
}

#[test]
fn symbolic_backend_file() {
    let path = temp_file(
        "tower.json",
        r#"{"Q":{"invariant_factors":[2,2]},"group_order":4,
            "images":[{"subgroup_gens":[2],"subgroup_of_Q":[[1,0]]}]}"#,
    );
    let spec = format!("symbolic:{}", path.display());
    let o = run(&["classify", "projective", "-n", "3", "--backend", &spec, "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // (4) -> Q, (2,2) -> Z/2, (2,1,1) and (1,1,1,1) -> trivial
    assert_eq!(v["total"], 8);
}

#[test]
fn surface_table_at_the_real_tower() {
    let o = run(&["table", "surface", "--label", "C2", "--tower", "real"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("Z/2 + Z/2"));
    let all = run(&["table", "surface", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&all.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 13);
}

#[test]
fn cohomology_commands() {
    let o = run(&["cohomology", "h1-real", "--matrix", "[[1,0],[0,-1]]"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("Z/2 (order 2)"));
    let o = run(&["cohomology", "oracle", "--builtin", "surface:D8", "--backend", "ff:3,2"]);
    assert!(o.status.success());
    assert!(!stdout(&o).contains("DISAGREE"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["fan", "info", "--builtin", "hexagon", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["fan", "info"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "projective", "-n", "2", "--backend", "complex"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "projective", "-n", "2", "--backend", "ff:6,2"]).status.code(), Some(1));
    assert_eq!(run(&["fan", "info", "--builtin", "surface:X"]).status.code(), Some(1));
    let bad = run_stdin(
        &["fan", "validate", "--stdin"],
        br#"{"rank":2,"rays":[[2,0],[0,1]],"cones":[[0,1]]}"#,
    );
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(
        run(&["classify", "fan", "--builtin", "hexagon", "--backend", "real", "--group", "dihedral:4"])
            .status
            .code(),
        Some(1)
    );
}
