use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const WORKED_EXAMPLE: &str = r#"{
  "format_version": 1,
  "kind": "two_chains",
  "p": 2,
  "chains": {
    "N1": [{"id": 1, "release": 0}, {"id": 2, "release": 3}],
    "N2": [{"id": 3, "release": 1, "due": 3}, {"id": 4, "release": 4, "due": 6}]
  }
}
"#;

fn cav(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cav-sched"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn example_instance_solves_to_twenty() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("example.json");
    fs::write(&inst, WORKED_EXAMPLE).unwrap();
    let o = cav(&["solve", "--instance", path(&inst), "--objective", "sumc", "--gantt"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("value      20"), "{text}");
    assert!(text.contains("optimal    true"));
    assert!(text.contains("time 01234567\nM1   1=3="), "{text}");

    let o = cav(&["solve", "--instance", path(&inst), "--objective", "sumt", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["value"], 0);
    assert_eq!(v["solution"]["objective"], "sumt");
}

#[test]
fn empty_instance_has_value_zero() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("empty.json");
    fs::write(
        &inst,
        r#"{"format_version": 1, "kind": "two_chains", "p": 1, "chains": {"N1": [], "N2": []}}"#,
    )
    .unwrap();
    let o = cav(&["solve", "--instance", path(&inst), "--objective", "sumwt", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["value"], 0);
    assert_eq!(v["solution"]["operations"], serde_json::json!([]));
}

#[test]
fn oracle_refuses_large_instances() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("big.json");
    let o = cav(&[
        "generate",
        "--kind",
        "crossroad",
        "--sizes",
        "3,3,2,2",
        "--p",
        "1",
        "--r-max",
        "4",
        "--seed",
        "5",
        "--out",
        path(&inst),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = cav(&[
        "solve",
        "--instance",
        path(&inst),
        "--objective",
        "cmax",
        "--algorithm",
        "oracle",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("too large for exhaustive search: 20 > 16"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn node_limit_reports_incomplete_search() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("shop.json");
    cav(&[
        "generate",
        "--kind",
        "crossroad",
        "--sizes",
        "3,3,3,3",
        "--p",
        "2",
        "--r-max",
        "6",
        "--d-max",
        "4",
        "--buffers",
        "1,0,inf,1",
        "--seed",
        "11",
        "--out",
        path(&inst),
    ]);
    let sol = dir.path().join("sol.json");
    let o = cav(&[
        "solve",
        "--instance",
        path(&inst),
        "--objective",
        "sumwt",
        "--node-limit",
        "1",
        "--out",
        path(&sol),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(stdout(&o).contains("optimal    false"));
    let o = cav(&["verify", "--instance", path(&inst), "--solution", path(&sol)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verify_catches_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("example.json");
    let sol = dir.path().join("sol.json");
    fs::write(&inst, WORKED_EXAMPLE).unwrap();
    let o = cav(&[
        "solve",
        "--instance",
        path(&inst),
        "--objective",
        "sumc",
        "--out",
        path(&sol),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = cav(&["verify", "--instance", path(&inst), "--solution", path(&sol)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o), "ok: sumc = 20\n");

    let text = fs::read_to_string(&sol).unwrap();
    let lied = text.replacen("\"value\": 20", "\"value\": 19", 1);
    assert_ne!(lied, text);
    fs::write(&sol, &lied).unwrap();
    let o = cav(&["verify", "--instance", path(&inst), "--solution", path(&sol)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("value mismatch"));

    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["operations"][0]["start"] = serde_json::json!(1);
    doc["operations"][0]["completion"] = serde_json::json!(3);
    fs::write(&sol, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = cav(&["verify", "--instance", path(&inst), "--solution", path(&sol)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("violation"), "{}", stdout(&o));

    fs::write(&sol, "{ not json").unwrap();
    let o = cav(&["verify", "--instance", path(&inst), "--solution", path(&sol)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn generate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (
        dir.path().join("a.json"),
        dir.path().join("b.json"),
        dir.path().join("c.json"),
    );
    let run = |out: &Path, seed: &str| {
        cav(&[
            "generate",
            "--kind",
            "dedicated_parallel",
            "--sizes",
            "3,2,4",
            "--p",
            "3",
            "--r-max",
            "9",
            "--d-max",
            "20",
            "--w-max",
            "5",
            "--seed",
            seed,
            "--out",
            path(out),
        ])
    };
    let o = run(&a, "42");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("seed 42\n"));
    run(&b, "42");
    run(&c, "43");
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn generate_rejects_conflicting_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    let base = [
        "generate",
        "--p",
        "2",
        "--r-max",
        "3",
        "--seed",
        "1",
        "--out",
        path(&out),
    ];
    let with = |extra: &[&str]| {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        cav(&args)
    };
    assert_eq!(
        with(&["--kind", "two_chains", "--sizes", "1,2", "--buffers", "0,0,0,0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        with(&["--kind", "crossroad", "--sizes", "1,1,1,1", "--p2", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        with(&["--kind", "crossroad", "--sizes", "1,1", "--buffers", "0,0,0,0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        with(&["--kind", "crossroad", "--sizes", "1,1,1,1", "--buffers", "0,0,0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(with(&["--kind", "ring", "--sizes", "1,1"]).status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn bench_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = cav(&["bench", "--dir", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);
    assert!(stdout(&o).starts_with("instance"));

    fs::write(dir.path().join("example.json"), WORKED_EXAMPLE).unwrap();
    cav(&[
        "generate",
        "--kind",
        "crossroad",
        "--sizes",
        "2,1,1,2",
        "--p",
        "2",
        "--r-max",
        "3",
        "--buffers",
        "0,0,0,0",
        "--seed",
        "3",
        "--out",
        path(&dir.path().join("shop.json")),
    ]);
    let o = cav(&["bench", "--dir", path(dir.path()), "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["instance"], "example.json");
    assert_eq!(rows[0]["value"], 20);
    assert_eq!(rows[1]["objective"], "cmax");
    assert_eq!(rows[1]["budget_log2"], 18);
    assert_eq!(rows[1]["within_budget"], true);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(cav(&["solve"]).status.code(), Some(2));
    assert_eq!(
        cav(&["solve", "--instance", "/nonexistent", "--objective", "sumc"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(cav(&["--help"]).status.code(), Some(0));
}
