//! End-to-end tests of the binary: exit-code contract, report shapes,
//! byte determinism and JSON round-trips (acceptance criterion 13 lives
//! here, next to the binary it exercises).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use joinings::{joining_polytope, validate_joining, Caps, FiniteSystem, Perm, ProbVector};

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_joinings"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

struct Fixture {
    _dir: tempfile::TempDir,
    path: PathBuf,
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_path_buf();
    write(
        &path,
        "two_cycle.json",
        r#"{"type":"finite","perm":[1,0],"measure":["1/2","1/2"]}"#,
    );
    write(
        &path,
        "id2.json",
        r#"{"type":"finite","perm":[0,1],"measure":["1/2","1/2"]}"#,
    );
    write(
        &path,
        "three_cycle.json",
        r#"{"type":"finite","perm":[1,2,0],"measure":["1/3","1/3","1/3"]}"#,
    );
    write(
        &path,
        "four_cycle.json",
        r#"{"type":"finite","perm":[1,2,3,0],"measure":["1/4","1/4","1/4","1/4"]}"#,
    );
    write(
        &path,
        "bernoulli.json",
        r#"{"type":"markov","alphabet":["0","1"],"transition":[["1/2","1/2"],["1/2","1/2"]]}"#,
    );
    write(
        &path,
        "flip_chain.json",
        r#"{"type":"markov","alphabet":["0","1"],"transition":[["0","1"],["1","0"]]}"#,
    );
    write(
        &path,
        "product22.json",
        r#"{"left":"two_cycle.json","right":"two_cycle.json","weights":[["1/4","1/4"],["1/4","1/4"]]}"#,
    );
    write(
        &path,
        "diagonal22.json",
        r#"{"left":"two_cycle.json","right":"two_cycle.json","weights":[["1/2","0"],["0","1/2"]]}"#,
    );
    write(
        &path,
        "diagonal_law.json",
        r#"{"alphabet_size":2,"weights":[[["1/2","0"],["0","0"]],[["0","0"],["0","1/2"]]]}"#,
    );
    Fixture { _dir: dir, path }
}

#[test]
fn exit_code_contract() {
    let f = fixture();
    // 0: affirmative
    let out = run_in(&f.path, &["disjoint", "id2.json", "two_cycle.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("disjoint"));
    // 3: negative finding, with a witness
    let out = run_in(&f.path, &["disjoint", "two_cycle.json", "two_cycle.json"]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout_of(&out);
    assert!(text.contains("not disjoint"));
    assert!(text.contains("witness"));
    // 1: input error
    let bad = write(&f.path, "bad.json", "nonsense{");
    let out = run_in(&f.path, &["disjoint", bad.to_str().unwrap(), "two_cycle.json"]);
    assert_eq!(out.status.code(), Some(1));
    // 2: resource cap
    let nine: Vec<usize> = (0..9).map(|i| (i + 1) % 9).collect();
    let measure = ["1/9"; 9];
    write(
        &f.path,
        "nine.json",
        &format!(
            r#"{{"type":"finite","perm":{nine:?},"measure":[{}]}}"#,
            measure
                .iter()
                .map(|m| format!("{m:?}"))
                .collect::<Vec<_>>()
                .join(",")
        ),
    );
    let out = run_in(&f.path, &["disjoint", "nine.json", "nine.json"]);
    assert_eq!(out.status.code(), Some(2));
    // raising the cap turns it into a negative finding
    let out = run_in(&f.path, &["disjoint", "nine.json", "nine.json", "--cap", "100"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn decompose_and_metric_reports() {
    let f = fixture();
    let out = run_in(
        &f.path,
        &[
            "joinings",
            "two_cycle.json",
            "two_cycle.json",
            "--decompose",
            "product22.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("1/2 · Δ_Id + 1/2 · Δ_T"));

    let out = run_in(
        &f.path,
        &[
            "joinings",
            "two_cycle.json",
            "two_cycle.json",
            "--metric",
            "product22.json",
            "diagonal22.json",
        ],
    );
    assert_eq!(stdout_of(&out).trim(), "9/64");
    let out = run_in(
        &f.path,
        &[
            "joinings",
            "two_cycle.json",
            "two_cycle.json",
            "--metric",
            "diagonal22.json",
            "diagonal22.json",
        ],
    );
    assert_eq!(stdout_of(&out).trim(), "0");
}

#[test]
fn relative_and_factors_reports() {
    let f = fixture();
    let out = run_in(
        &f.path,
        &[
            "relative",
            "four_cycle.json",
            "four_cycle.json",
            "--factor-pair",
            "0,1,0,1;0,1,0,1",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("non-disjointness witness"));

    // trivial factor: the product, flagged as such
    let out = run_in(
        &f.path,
        &[
            "relative",
            "two_cycle.json",
            "three_cycle.json",
            "--factor-pair",
            "0,0;0,0,0",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("trivial factor"));

    let out = run_in(&f.path, &["factors", "three_cycle.json"]);
    let text = stdout_of(&out);
    assert!(text.contains("2 factors"));
    let out = run_in(&f.path, &["factors", "four_cycle.json"]);
    assert!(stdout_of(&out).contains("3 factors"));
}

#[test]
fn mixing_reports_and_verdicts() {
    let f = fixture();
    let out = run_in(
        &f.path,
        &["mixing", "bernoulli.json", "--sets", "0", "0", "--horizon", "5"],
    );
    let text = stdout_of(&out);
    // constant column 1/4 from n ≥ 1
    assert_eq!(text.matches("1/4").count(), 6, "{text}");

    let out = run_in(
        &f.path,
        &[
            "mixing",
            "bernoulli.json",
            "--sets",
            "0",
            "0",
            "0",
            "--furstenberg",
            "2",
            "100",
        ],
    );
    assert!(stdout_of(&out).contains("1/8"));

    // Ornstein: θ = 1 fails on the periodic flip chain (exit 3), passes on
    // Bernoulli (exit 0)
    let out = run_in(
        &f.path,
        &["mixing", "flip_chain.json", "--sets", "0", "0", "--ornstein", "1", "--horizon", "10"],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout_of(&out).contains("violated"));
    let out = run_in(
        &f.path,
        &["mixing", "bernoulli.json", "--sets", "0", "0", "--ornstein", "1", "--horizon", "10"],
    );
    assert_eq!(out.status.code(), Some(0));

    // exact-mode horizon cap → exit 2; --float lifts it
    let out = run_in(
        &f.path,
        &["mixing", "bernoulli.json", "--sets", "0", "0", "--horizon", "1500"],
    );
    assert_eq!(out.status.code(), Some(2));
    let out = run_in(
        &f.path,
        &["mixing", "bernoulli.json", "--sets", "0", "0", "--horizon", "1500", "--float"],
    );
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn triple_oracle_reports() {
    let f = fixture();
    let out = run_in(&f.path, &["triple", "--xor", "1/2", "1", "--uniform-oracle"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("uniform on {0, 1}: confirmed"));

    let out = run_in(&f.path, &["triple", "diagonal_law.json", "--uniform-oracle"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_of(&out).contains("pairwise independence: FAILED"));

    let out = run_in(&f.path, &["triple", "--xor", "1/2", "1", "--growth", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("entropy ≥ log 2"));
}

/// Acceptance criterion 13: byte-deterministic reports; JSON output
/// re-parses and re-validates identically.
#[test]
fn criterion_13_cli_determinism_and_round_trip() {
    let f = fixture();
    let commands: Vec<Vec<&str>> = vec![
        vec!["disjoint", "id2.json", "two_cycle.json"],
        vec!["disjoint", "two_cycle.json", "two_cycle.json"],
        vec!["disjoint", "two_cycle.json", "two_cycle.json", "--json"],
        vec!["joinings", "three_cycle.json", "three_cycle.json", "--vertices"],
        vec!["joinings", "three_cycle.json", "three_cycle.json", "--vertices", "--json"],
        vec!["joinings", "two_cycle.json", "two_cycle.json", "--decompose", "product22.json"],
        vec!["joinings", "two_cycle.json", "two_cycle.json", "--decompose", "product22.json", "--json"],
        vec!["joinings", "two_cycle.json", "two_cycle.json", "--metric", "product22.json", "diagonal22.json", "--json"],
        vec!["relative", "four_cycle.json", "four_cycle.json", "--factor-pair", "0,1,0,1;0,1,0,1", "--json"],
        vec!["factors", "four_cycle.json"],
        vec!["factors", "four_cycle.json", "--json"],
        vec!["mixing", "bernoulli.json", "--sets", "0", "0", "--horizon", "8"],
        vec!["mixing", "bernoulli.json", "--sets", "0", "0", "--horizon", "8", "--json"],
        vec!["mixing", "flip_chain.json", "--sets", "0", "0", "--ornstein", "1", "--json"],
        vec!["triple", "--xor", "1/2", "2", "--uniform-oracle", "--json"],
        vec!["triple", "--xor", "1/2", "1", "--growth", "5", "--json"],
    ];
    for args in &commands {
        let first = run_in(&f.path, args);
        let second = run_in(&f.path, args);
        assert_eq!(
            first.stdout, second.stdout,
            "non-deterministic stdout for {args:?}"
        );
        assert_eq!(first.stderr, second.stderr);
        assert_eq!(first.status.code(), second.status.code());
    }

    // JSON vertices re-parse and re-validate to the very couplings the
    // library enumerates
    let out = run_in(
        &f.path,
        &["joinings", "three_cycle.json", "three_cycle.json", "--vertices", "--json"],
    );
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["schema"], 1);
    let three = FiniteSystem::new(Perm::new(vec![1, 2, 0]).unwrap(), ProbVector::uniform(3)).unwrap();
    let expected = joining_polytope(&three, &three)
        .enumerate_vertices(&Caps::default())
        .unwrap();
    let vertices = parsed["vertices"].as_array().unwrap();
    assert_eq!(vertices.len(), expected.len());
    for (value, expect) in vertices.iter().zip(&expected) {
        let weights: Vec<Vec<joinings::Rational>> = value["weights"]
            .as_array()
            .unwrap()
            .iter()
            .map(|row| {
                row.as_array()
                    .unwrap()
                    .iter()
                    .map(|cell| cell.as_str().unwrap().parse().unwrap())
                    .collect()
            })
            .collect();
        let revalidated = validate_joining(&three, &three, weights).unwrap();
        assert_eq!(&revalidated, expect);
    }
    println!("criterion 13 PASS: deterministic reports, JSON round-trips");
}
