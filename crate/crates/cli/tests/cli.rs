//! End-to-end checks of the command-line surface: output schemas, exact
//! values, determinism, and exit codes.

use std::process::{Command, Output};

fn tcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tcs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn gen_laakso_counts() {
    let out = tcs(&["gen", "--family", "laakso", "--n", "2"]);
    let v = json_of(&out);
    assert_eq!(v["kind"], "laakso");
    assert_eq!(v["vertices"], 30);
    assert_eq!(v["edges"].as_array().unwrap().len(), 36);
}

#[test]
fn gen_is_deterministic() {
    let a = tcs(&["gen", "--family", "diamond", "--n", "2", "--k", "3"]);
    let b = tcs(&["gen", "--family", "diamond", "--n", "2", "--k", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn gen_csv_lists_addresses() {
    let out = tcs(&["gen", "--family", "laakso", "--n", "1", "--csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "edge,address,tail,head");
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("0,A,"));
    assert!(lines[6].starts_with("5,F,"));
}

#[test]
fn proj_norm_examples() {
    let v = json_of(&tcs(&[
        "proj-norm",
        "--family",
        "laakso",
        "--n",
        "1",
        "--which",
        "Pn",
    ]));
    assert_eq!(v["norm"], "1/1");
    assert_eq!(v["lower"], "3/4");
    let v = json_of(&tcs(&[
        "proj-norm",
        "--family",
        "laakso",
        "--n",
        "2",
        "--which",
        "pn",
    ]));
    assert_eq!(v["norm"], "3/2");
    assert_eq!(v["upper"], "3/2");
    let v = json_of(&tcs(&[
        "proj-norm",
        "--family",
        "laakso",
        "--n",
        "2",
        "--which",
        "orth",
    ]));
    assert_eq!(v["lower"], "4/3");
    assert_eq!(v["norm"], "19/12");
    // the all-A chain attains the upper bound at level 3
    let v = json_of(&tcs(&[
        "proj-norm",
        "--family",
        "laakso",
        "--n",
        "3",
        "--which",
        "Pn",
    ]));
    assert_eq!(v["norm"], "2/1");
    assert_eq!(v["witness_edge"], 36);
}

#[test]
fn basis_csv_has_all_elements() {
    let out = tcs(&["basis", "--family", "laakso", "--n", "2", "--csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 36);
    assert!(text.contains("cycle-top-h"));
    assert!(text.contains("cut-f-propagated"));
}

#[test]
fn lambda_spot_value() {
    let v = json_of(&tcs(&["lambda", "--n", "1", "--k", "2"]));
    assert_eq!(v["computed"], "3/2");
    assert_eq!(v["match"], true);
}

#[test]
fn embed_check_both_spaces() {
    let v = json_of(&tcs(&["embed-check", "--which", "T"]));
    assert_eq!(v["patterns"], 8);
    assert_eq!(v["max_deviation"], "0/1");
    let v = json_of(&tcs(&["embed-check", "--which", "F"]));
    assert_eq!(v["patterns"], 16);
    assert_eq!(v["max_deviation"], "0/1");
}

#[test]
fn tc_norm_and_tree_check_from_files() {
    let dir = std::env::temp_dir().join(format!("tcs-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let space = dir.join("space.json");
    let problem = dir.join("problem.json");

    let metric = tcs(&["gen", "--family", "laakso", "--n", "1", "--metric"]);
    std::fs::write(&space, &metric.stdout).unwrap();
    std::fs::write(&problem, r#"{ "values": { "v0": "1", "v1": "-1" } }"#).unwrap();

    let v = json_of(&tcs(&[
        "tc-norm",
        "--space",
        space.to_str().unwrap(),
        "--problem",
        problem.to_str().unwrap(),
    ]));
    assert_eq!(v["norm"], "4/1");

    let v = json_of(&tcs(&["tree-check", "--space", space.to_str().unwrap()]));
    assert_eq!(v["is_tree_metric"], false);
    assert_eq!(v["essential_count"], 6);

    // a genuine star tree metric classifies true with its tree witness
    let star = dir.join("star.json");
    std::fs::write(
        &star,
        r#"{ "points": ["c", "x", "y"],
             "dist": [["0", "1/2", "2"], ["1/2", "0", "5/2"], ["2", "5/2", "0"]] }"#,
    )
    .unwrap();
    let v = json_of(&tcs(&["tree-check", "--space", star.to_str().unwrap()]));
    assert_eq!(v["is_tree_metric"], true);
    assert_eq!(v["essential_count"], 2);
    assert_eq!(v["witness"]["tree"].as_array().unwrap().len(), 2);

    // malformed problem: nonzero sum -> usage-independent failure exit
    std::fs::write(&problem, r#"{ "values": { "v0": "1" } }"#).unwrap();
    let out = tcs(&[
        "tc-norm",
        "--space",
        space.to_str().unwrap(),
        "--problem",
        problem.to_str().unwrap(),
    ]);
    assert!(!out.status.success());

    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn quotient_agrees_with_transport() {
    let dir = std::env::temp_dir().join(format!("tcs-quot-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let vec_path = dir.join("vec.json");
    std::fs::write(&vec_path, r#"{ "0": "3/2", "7": "-2", "35": "1/3" }"#).unwrap();
    let v = json_of(&tcs(&[
        "quotient",
        "--family",
        "laakso",
        "--n",
        "2",
        "--vector",
        vec_path.to_str().unwrap(),
    ]));
    assert_eq!(v["agree"], true);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    // capacity error -> 3
    let out = tcs(&["gen", "--family", "laakso", "--n", "9"]);
    assert_eq!(out.status.code(), Some(3));
    // usage error -> 2 (clap)
    let out = tcs(&["gen", "--family", "nosuch", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
    // missing --k for diamonds -> 2
    let out = tcs(&["gen", "--family", "diamond", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_all_small_run() {
    // max_n = 1 with few samples keeps this a fast smoke test of the
    // full table; every criterion must pass.
    let out = tcs(&["verify-all", "--max-n", "1", "--samples", "20", "--csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "criterion,name,status,elapsed_ms");
    assert_eq!(lines.len(), 13);
    for line in &lines[1..] {
        assert!(line.contains(",PASS,"), "line: {line}");
    }
}
