use std::io::Cursor;

use serde_json::Value;

fn run_with_input(args: &[&str], input: &str) -> (i32, String, String) {
    let mut argv = vec!["folim"];
    argv.extend_from_slice(args);
    let mut inp = Cursor::new(input.as_bytes().to_vec());
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = folim::cli::run(argv, &mut inp, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn run(args: &[&str]) -> (i32, String, String) {
    run_with_input(args, "")
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend_from_slice(&["--format", "json"]);
    let (code, out, err) = run(&a);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap_or_else(|e| panic!("{args:?} produced invalid JSON ({e}): {out}"))
}

#[test]
fn stone_on_h2() {
    let (code, out, _) = run(&["stone", "--graph", "hn:2", "--formula", "exists x2. adj(x1,x2)"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "4/5");
}

#[test]
fn counterexample_table() {
    let (code, out, _) = run(&["counterexample", "--from", "2", "--to", "10", "--format", "text"]);
    assert_eq!(code, 0);
    let row2 = out.lines().find(|l| l.trim_start().starts_with("2 ")).unwrap();
    assert!(row2.contains("2/5") && row2.contains("0.4"), "{row2}");
    let verdict = out.lines().find(|l| l.starts_with("verdict:")).unwrap();
    assert!(verdict.contains("reproduced"));
    assert!(out.contains("2/3"));
}

#[test]
fn ef_solve_k1_k2() {
    let (code, out, _) = run(&["ef", "solve", "--left", "k1", "--right", "k2", "--rounds", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "spoiler");
    let (_, out, _) = run(&["ef", "solve", "--left", "k1", "--right", "k2", "--rounds", "1"]);
    assert_eq!(out.trim(), "duplicator");
}

#[test]
fn exit_codes() {
    let (code, _, err) = run(&["parse", "--formula", "exists x1 adj("]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error: syntax:"), "{err}");
    assert_eq!(err.lines().count(), 1);

    assert_eq!(run(&["stone", "--graph", "hn:2"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["stone", "--graph", "hn:2", "--formula", "adj(x1,x2)", "--bogus"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);

    let (code, _, err) = run(&["stone", "--graph", "hn:3", "--formula", "adj(x1,x2)", "--mc"]);
    assert_eq!(code, 2);
    assert!(err.contains("--seed"));

    let (code, _, err) = run(&["gen", "hn", "40"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error: cap-exceeded:"), "{err}");

    let (code, _, _) = run(&["stone", "--graph", "hn:2", "--formula", "adj(x1,x2)", "--format", "csv"]);
    assert_eq!(code, 2);
}

#[test]
fn budget_from_environment() {
    // FOLIM_BUDGET is read per invocation; a tiny budget turns an exact
    // pairing into a budget error.
    std::env::set_var("FOLIM_BUDGET", "5");
    let (code, _, err) = run(&["stone", "--graph", "hn:2", "--formula", "adj(x1,x2)"]);
    std::env::remove_var("FOLIM_BUDGET");
    assert_eq!(code, 1);
    assert!(err.starts_with("error: budget-exceeded:"), "{err}");
}

#[test]
fn seeded_runs_are_byte_identical() {
    let cases: [&[&str]; 4] = [
        &["stone", "--graph", "hn:3", "--formula", "adj(x1,x2)", "--mc", "--samples", "500", "--seed", "9"],
        &["ef", "play", "--left", "hn:3", "--right", "hn:3", "--rounds", "3", "--spoiler", "random", "--duplicator", "lm-key", "--seed", "4"],
        &["threshold", "--graph", "hn:2", "--formula", "exists x2. adj(x1,x2)", "--group-size", "50", "--a", "0.75", "--b", "0.875", "--groups", "100", "--seed", "1"],
        &["shadowprob", "--n", "5", "--p", "1", "--l", "1", "--mc", "--samples", "300", "--seed", "2"],
    ];
    for args in cases {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.0, 0, "{args:?}: {}", a.2);
        assert_eq!(a.1, b.1, "{args:?}");
    }
}

#[test]
fn json_output_for_every_subcommand() {
    let dir = std::env::temp_dir().join(format!("folim-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let graph_file = dir.join("p3.txt");
    std::fs::write(&graph_file, "3 2\n0 1\n1 2\n").unwrap();
    let path_spec = format!("path:{}", graph_file.display());
    let formula_file = dir.join("f.txt");
    std::fs::write(&formula_file, "# degree at least one\nexists x2. adj(x1,x2)\n").unwrap();
    let at_formula = format!("@{}", formula_file.display());

    let v = json(&["parse", "--formula", "forall x1. exists x2. adj(x1,x2)"]);
    assert_eq!(v["quantifier_depth"], 2);
    let v = json(&["eval", "--graph", &path_spec, "--formula", "adj(x1,x2)", "--tuple", "0,1"]);
    assert_eq!(v["value"], true);
    let v = json(&["stone", "--graph", &path_spec, "--formula", &at_formula]);
    assert_eq!(v["value"], "1/1");
    let v = json(&["stone", "--graph", "hn:2", "--formula", "adj(x1,x2)", "--mc", "--samples", "200", "--seed", "3"]);
    assert_eq!(v["seed"], 3);
    assert_eq!(v["exact"], false);
    let v = json(&["stone", "--graph", "k3", "--formula", "!(x1 = x2)", "--distinct"]);
    assert_eq!(v["value"], "1/1");
    let v = json(&["threshold", "--formula", "adj(x1,x2)", "--group-size", "3", "--a", "0.2", "--b", "0.3", "--build"]);
    assert_eq!(v["free_variables"], 6);
    let v = json(&["ef", "solve", "--left", "k2", "--right", "k3", "--rounds", "3"]);
    assert_eq!(v["winner"], "spoiler");
    let v = json(&["ef", "play", "--left", "k2", "--right", "k2", "--rounds", "2", "--spoiler", "minimax", "--duplicator", "mirror"]);
    assert_eq!(v["winner"], "duplicator");
    let v = json(&["gen", "hn", "2"]);
    assert_eq!(v["n"], 10);
    let v = json(&["shadow", "--graph", "hn:3", "--played", "0", "--l", "2"]);
    assert_eq!(v["basis"].as_array().unwrap().len(), 1);
    let v = json(&["universal", "--graph", "hn:3", "--l", "3"]);
    assert_eq!(v["universal"], true);
    let v = json(&["matrix", "--graph", "hn:3", "--played", "0,24", "--right", "hn:4", "--right-played", "0,64"]);
    assert!(v["match"].is_boolean());
    let v = json(&["converge", "--family", "exists x2. adj(x1,x2)", "--hn", "2..5"]);
    assert_eq!(v["trajectory"]["points"].as_array().unwrap().len(), 4);
    let v = json(&["converge", "--family", "adj(x1,x2)", "--graphs", "k2,k3,k4"]);
    assert_eq!(v["trajectory"]["points"].as_array().unwrap().len(), 3);
    let v = json(&["roots", "--graph", "hn:2", "--family", "adj(x1,r1)", "--targets", "0.4"]);
    assert_eq!(v["delta"], 0.0);
    let v = json(&["shadowprob", "--n", "3", "--p", "1", "--l", "1"]);
    assert_eq!(v["exact"], "2/3");
    let v = json(&["counterexample", "--from", "2", "--to", "4"]);
    assert_eq!(v["rows"][0]["max"], "2/5");
}

#[test]
fn csv_for_tabular_commands() {
    let (code, out, _) = run(&["converge", "--family", "adj(x1,x2)", "--hn", "2..4", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next().unwrap(), "n,formula,value,radius");
    assert_eq!(out.lines().count(), 4);
    let (code, out, _) = run(&["counterexample", "--from", "2", "--to", "3", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.lines().nth(1).unwrap().starts_with("2,2/5,"));
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("folim-out-{}.txt", std::process::id()));
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&["stone", "--graph", "hn:2", "--formula", "exists x2. adj(x1,x2)", "-o", p]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap().trim(), "4/5");
}

#[test]
fn interactive_play() {
    let (code, out, err) = run_with_input(
        &["ef", "play", "--left", "k1", "--right", "k2", "--rounds", "2", "--duplicator", "minimax"],
        "nonsense\nright 0\nr 1\n",
    );
    assert_eq!(code, 0);
    assert!(err.contains("expected 'left <v>' or 'right <v>'"));
    assert!(out.ends_with("winner: spoiler\n"), "{out}");

    // End of input forfeits the game for the spoiler.
    let (code, out, _) = run_with_input(&["ef", "play", "--left", "k1", "--right", "k2", "--rounds", "2"], "");
    assert_eq!(code, 0);
    assert!(out.contains("forfeit by spoiler"));
    assert!(out.ends_with("winner: duplicator\n"));
}

#[test]
fn lm_key_play_reports_preconditions() {
    let (code, _, err) = run(&["ef", "play", "--left", "hn:2", "--right", "hn:5", "--rounds", "3", "--spoiler", "random", "--duplicator", "lm-key", "--seed", "1"]);
    assert_eq!(code, 1);
    assert_eq!(err.trim(), "error: not-universal: left graph not 3-universal");

    let v = json(&["ef", "play", "--left", "hn:4", "--right", "hn:5", "--rounds", "2", "--spoiler", "random", "--duplicator", "lm-key", "--seed", "8"]);
    assert_eq!(v["winner"], "duplicator");
    assert_eq!(v["traces"].as_array().unwrap().len(), 2);
}
