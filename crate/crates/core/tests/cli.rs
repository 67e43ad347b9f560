use std::path::PathBuf;

use quiver_soliton::cli::{run, CommandOutcome, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_OK};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn cli(args: &[&str]) -> CommandOutcome {
    run(std::iter::once("quiver-soliton").chain(args.iter().copied()))
}

fn json(out: &CommandOutcome) -> serde_json::Value {
    serde_json::from_str(&out.stdout).expect("stdout is a single JSON document")
}

#[test]
fn check_counts() {
    let out = cli(&["check", &data("chain.quiver")]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(out.stdout, "3 vertices, 2 arrows, 3 paths, length 2\n");
    assert_eq!(cli(&["check", &data("empty.quiver")]).stdout, "0 vertices, 0 arrows, 0 paths, length 0\n");
}

#[test]
fn check_reports_input_errors() {
    let out = cli(&["check", &data("loop.quiver")]);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stderr.contains("cycle: l"), "{}", out.stderr);
    let out = cli(&["check", &data("malformed.quiver")]);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stderr.contains("line 2"), "{}", out.stderr);
    assert_eq!(cli(&["check", &data("missing.quiver")]).code, EXIT_INPUT);
}

#[test]
fn info_json() {
    let value = json(&cli(&["info", &data("fork.quiver"), "--json"]));
    assert_eq!(value["dimension"], 9);
    assert_eq!(value["step"], 3);
    assert_eq!(value["grading"], serde_json::json!([4, 3, 2]));
    let value = json(&cli(&["info", &data("branching.quiver"), "--json"]));
    assert_eq!(value["dimension"], 10);
    assert_eq!(value["automorphism_group_order"], "2");
}

#[test]
fn info_on_one_arrow() {
    let dir = std::env::temp_dir().join(format!("quiver-soliton-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("one.quiver");
    std::fs::write(&file, "arrow a: v1 -> v2\n").unwrap();
    let value = json(&cli(&["info", file.to_str().unwrap(), "--json"]));
    assert_eq!((value["dimension"].as_u64(), value["step"].as_u64()), (Some(1), Some(1)));
    assert_eq!(value["automorphism_group_order"], "1");
    let value = json(&cli(&["soliton", file.to_str().unwrap(), "--json"]));
    assert_eq!(value["norms_squared"], serde_json::json!(["1"]));
    assert_eq!(value["derivation_diagonal"], serde_json::json!(["1"]));
    let value = json(&cli(&["ricci", file.to_str().unwrap(), "--json"]));
    assert_eq!(value["ricci_eigenvalues"], serde_json::json!(["0"]));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn soliton_chain() {
    let out = cli(&["soliton", &data("chain.quiver"), "--json"]);
    assert_eq!(out.code, EXIT_OK);
    let value = json(&out);
    assert_eq!(value["norms_squared"], serde_json::json!(["3/2", "1", "1"]));
    assert_eq!(value["c"], "-1");
    assert_eq!(value["derivation_diagonal"], serde_json::json!(["2/3", "2/3", "4/3"]));
}

#[test]
fn soliton_branching_report() {
    let out = cli(&["soliton", &data("branching.quiver"), "--json", "--report"]);
    assert_eq!(out.code, EXIT_OK);
    let value = json(&out);
    let paths: Vec<&str> = value["paths"].as_array().unwrap().iter().map(|p| p.as_str().unwrap()).collect();
    let norm = |name: &str| value["norms_squared"][paths.iter().position(|p| *p == name).unwrap()].clone();
    assert_eq!(norm("c"), norm("d"));
    assert_eq!(norm("c.e"), norm("d.e"));
    assert_eq!(value["levels"].as_array().unwrap().len(), 3);

    let text = cli(&["soliton", &data("branching.quiver"), "--report"]);
    assert_eq!(text.code, EXIT_OK);
    assert!(text.stdout.contains("N = 2") && text.stdout.contains("N = 3"), "{}", text.stdout);
}

#[test]
fn soliton_rejects_empty_quiver() {
    assert_eq!(cli(&["soliton", &data("empty.quiver")]).code, EXIT_INPUT);
}

#[test]
fn ricci_with_metrics() {
    let value = json(&cli(&["ricci", &data("chain.quiver"), "--json"]));
    assert_eq!(value["ricci_eigenvalues"], serde_json::json!(["-1/2", "-1/2", "1/2"]));
    assert_eq!(value["c"], "-3/2");
    assert_eq!(value["derivation_diagonal"], serde_json::json!(["1", "1", "2"]));

    let value = json(&cli(&["ricci", &data("chain.quiver"), "--metric", &data("chain_soliton.metric"), "--json"]));
    assert_eq!(value["ricci_eigenvalues"], serde_json::json!(["-1/3", "-1/3", "1/3"]));
    assert_eq!(value["c"], "-1");

    let out = cli(&["ricci", &data("chain.quiver"), "--metric", &data("chain.quiver")]);
    assert_eq!(out.code, EXIT_INPUT);
}

#[test]
fn random_verify_and_errors() {
    let out = cli(&["random", "--vertices", "5", "--arrows", "6", "--seed", "3", "--count", "20", "--verify"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert!(out.stdout.ends_with("verified 20 quivers\n"));
    assert_eq!(cli(&["random", "--vertices", "5", "--arrows", "0"]).code, EXIT_INPUT);
    assert_eq!(cli(&["random", "--vertices", "5"]).code, EXIT_INPUT);
}

#[test]
fn random_output_parses_back() {
    let out = cli(&["random", "--vertices", "4", "--arrows", "5", "--seed", "9", "--count", "4"]);
    for chunk in out.stdout.split("\n\n") {
        let q = quiver_soliton::dsl::parse(chunk).unwrap();
        assert_eq!(q.arrow_count(), 5);
        q.validate().unwrap();
    }
}

#[test]
fn aut_and_dot() {
    assert_eq!(cli(&["aut", &data("branching.quiver")]).stdout, "id\n(c d)\n");
    assert_eq!(cli(&["aut", &data("chain.quiver")]).stdout, "id\n");
    assert_eq!(cli(&["aut", &data("empty.quiver")]).stdout, "id\n");
    let limited = cli(&["aut", &data("branching.quiver"), "--limit", "1"]);
    assert_eq!(limited.stdout.lines().last(), Some("(c d)"));
    let dot = cli(&["dot", &data("branching.quiver")]).stdout;
    assert_eq!(dot.matches("[label=").count(), 5);
    assert_eq!(cli(&["dot", &data("loop.quiver")]).code, EXIT_INPUT);
}

#[test]
fn failed_checks_are_distinguished_from_input_errors() {
    assert_ne!(EXIT_CHECK_FAILED, EXIT_INPUT);
    assert_eq!(cli(&["nonsense"]).code, EXIT_INPUT);
}
