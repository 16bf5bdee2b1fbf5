//! End-to-end tests of the installed binary: exit codes, output
//! formats, and cross-engine output equality on a generated corpus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::process::{Command, Output};

fn xregex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xregex"))
        .args(args)
        .output()
        .expect("spawn xregex")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exit_codes_follow_grep_convention() {
    assert_eq!(xregex(&["match", "-e", "a", "a"]).status.code(), Some(0));
    assert_eq!(xregex(&["match", "-e", "a", "b"]).status.code(), Some(1));
    // the spec'd degenerate case: pattern "a" against the empty record
    assert_eq!(xregex(&["match", "-e", "a", ""]).status.code(), Some(1));
    let err = xregex(&["match", "-e", "(a", "x"]);
    assert_eq!(err.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&err.stderr).contains("syntax error"));
    assert_eq!(xregex(&["match", "--bogus-flag"]).status.code(), Some(2));
}

#[test]
fn substrings_output_of_running_example() {
    let out = xregex(&[
        "match",
        "-e",
        "(!((a|b)*)b)&(ab(b|c)*)",
        "cabbabcb",
        "--substrings",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "no-match\tcabbabcb\n[5,8] abcb\n");
}

#[test]
fn engines_produce_identical_output_on_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut corpus = String::new();
    for _ in 0..200 {
        let len = rng.gen_range(0..=10);
        for _ in 0..len {
            corpus.push(*b"abc".get(rng.gen_range(0..3)).unwrap() as char);
        }
        corpus.push('\n');
    }
    let path: PathBuf = std::env::temp_dir().join(format!("xregex-corpus-{}", std::process::id()));
    std::fs::write(&path, &corpus).unwrap();
    let pattern = "(!((a|b)*)b)&(a(b|c)*)|ac*";
    let mut outputs = Vec::new();
    for extra in [
        vec!["--algo", "dp"],
        vec!["--algo", "clustered", "--space", "naive"],
        vec!["--algo", "clustered", "--space", "heavy-path"],
        vec!["--algo", "clustered", "--simulator", "relaxation"],
    ] {
        let mut args = vec![
            "match",
            "-e",
            pattern,
            "-f",
            path.to_str().unwrap(),
            "--substrings",
        ];
        args.extend(extra);
        let out = xregex(&args);
        assert!(out.status.code().unwrap() <= 1, "args {args:?}");
        outputs.push((out.status.code(), stdout(&out)));
    }
    std::fs::remove_file(&path).ok();
    for pair in outputs.windows(2) {
        assert_eq!(pair[0], pair[1], "engines disagree");
    }
}

#[test]
fn json_output_is_valid() {
    let out = xregex(&[
        "match",
        "-e",
        "a*&(aa)*",
        "aaaa",
        "aaa",
        "--substrings",
        "--stats",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[0]["matched"], serde_json::json!(true));
    assert_eq!(v[1]["matched"], serde_json::json!(false));
    assert!(v[0]["stats"]["ell"].is_u64());
}

#[test]
fn dot_dumps_are_well_formed() {
    for dump in ["ast", "clusters", "tnfa"] {
        let out = xregex(&[
            "inspect",
            "-e",
            "(!((a|b)*)b)&(ab(b|c)*)",
            "--dump",
            dump,
            "--format",
            "dot",
        ]);
        assert_eq!(out.status.code(), Some(0), "{dump}");
        let text = stdout(&out);
        assert!(text.starts_with("digraph "), "{dump}: {text}");
        assert_eq!(
            text.matches('{').count(),
            text.matches('}').count(),
            "{dump}: unbalanced braces"
        );
    }
}

#[test]
fn graphs_dump_shows_per_node_edges() {
    let out = xregex(&[
        "match",
        "-e",
        "(!((a|b)*)b)&(ab(b|c)*)",
        "cabbabcb",
        "--dump",
        "graphs",
    ]);
    let text = stdout(&out);
    assert!(text.contains("query: cabbabcb"));
    // the root intersection keeps exactly the (4, 8) edge
    assert!(text.contains("(intersect): [(4, 8)]"), "{text}");
}

#[test]
fn feasibility_cap_env_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_xregex"))
        .args(["oracle", "-e", "!(a|b)", "abab"])
        .env("XREGEX_FEASIBILITY_CAP", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn bench_runs_and_reports() {
    let out = xregex(&[
        "bench",
        "--seed",
        "5",
        "--instances",
        "2",
        "-n",
        "32",
        "-m",
        "40",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["instances"].as_array().unwrap().len(), 2);
    assert!(v["median_ns"]["dp"].is_u64() || v["median_ns"]["dp"].is_number());
}
