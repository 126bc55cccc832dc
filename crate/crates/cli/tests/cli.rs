use std::path::PathBuf;
use std::process::Command;

use baric_cli::{load_scenario, parse_field, parse_scenario_file, resolve_scenario, run_scenario, CliError, BUILTIN_NAMES};
use baric_core::exactlinalg::Field;
use baric_core::serial::{complex_from_json, complex_to_json};
use baric_core::verify::SuiteOptions;
use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_baric"))
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("baric-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const CHAIN: &str = r#""instance": {"kind": "support", "poset": {"elements": ["c", "o"], "relations": [["c", "o"]], "levels": [0, 1]}}"#;

fn with_chain(rest: &str) -> String {
    format!(r#"{{"schema": 1, {CHAIN}{rest}}}"#)
}

const MISMATCH: &str = r#", "objects": {"S_c": {"terms": [{"dims": {"c": 1}}]}, "S_o": {"terms": [{"dims": {"o": 1}}]}},
    "tasks": [{"op": "isomorphic", "left": "S_c", "right": "S_o"}]"#;

#[test]
fn builtin_scenarios_pass() {
    for name in BUILTIN_NAMES {
        let sc = load_scenario(name, None).unwrap();
        let out = run_scenario(&sc, &SuiteOptions::default()).unwrap();
        let failed: Vec<&str> = out.report.checks.iter().filter(|c| !c.passed).map(|c| c.id.as_str()).collect();
        assert!(failed.is_empty(), "{name}: {failed:?}");
        assert!(!out.report.checks.is_empty());
    }
    let p1 = run_scenario(&load_scenario("p1_poset", None).unwrap(), &SuiteOptions::default()).unwrap();
    for id in ["perverse.leq", "perverse.geq", "ic.matches", "iso.quasi_iso", "truncate.triangle", "stagger.triangle"] {
        assert!(p1.report.get(id).is_some_and(|c| c.passed), "{id}");
    }
    let g = run_scenario(&load_scenario("graded_point", None).unwrap(), &SuiteOptions::default()).unwrap();
    for id in ["mult.pure_lines", "duality.staggered", "heart.purity_oracle"] {
        assert!(g.report.get(id).is_some_and(|c| c.passed), "{id}");
    }
}

#[test]
fn field_override_reaches_every_object() {
    let sc = load_scenario("p1_poset", Some(Field::Prime(5))).unwrap();
    assert_eq!(sc.instance.field, Field::Prime(5));
    assert!(sc.objects.values().all(|x| x.field() == Field::Prime(5)));
    assert!(run_scenario(&sc, &SuiteOptions::default()).unwrap().passed());
    assert_eq!(parse_field("Fp:13").unwrap(), Field::Prime(13));
    assert!(parse_field("Fp:12").is_err());
    assert!(parse_field("R").is_err());
}

#[test]
fn empty_task_list_gives_an_empty_passing_report() {
    let sc = resolve_scenario(&parse_scenario_file(&with_chain("")).unwrap(), None).unwrap();
    let out = run_scenario(&sc, &SuiteOptions::default()).unwrap();
    assert!(out.passed());
    assert_eq!(out.to_json(), json!({"checks": []}));
}

#[test]
fn errors_name_their_location() {
    match parse_scenario_file("{\"schema\": 1,\n  \"instance\": ") {
        Err(CliError::Parse(m)) => assert!(m.contains("line 2"), "{m}"),
        other => panic!("{other:?}"),
    }
    match parse_scenario_file(&with_chain(r#", "tasks": [{"op": "truncate", "object": "K", "w": "zero"}]"#)) {
        Err(CliError::Schema(m)) => assert!(m.starts_with("tasks[0]") && m.contains("\"zero\""), "{m}"),
        other => panic!("{other:?}"),
    }
    match parse_scenario_file(r#"{"schema": 2, "instance": {"kind": "graded", "window": 1}}"#) {
        Err(CliError::Schema(m)) => assert!(m.contains("version 2"), "{m}"),
        other => panic!("{other:?}"),
    }
    let bad_ref = parse_scenario_file(&with_chain(r#", "tasks": [{"op": "stagger", "object": "nope"}]"#)).unwrap();
    match resolve_scenario(&bad_ref, None) {
        Err(CliError::Schema(m)) => assert!(m.contains("tasks[0]") && m.contains("nope"), "{m}"),
        other => panic!("{other:?}"),
    }
    let bad_dims = parse_scenario_file(&with_chain(
        r#", "objects": {"X": {"terms": [{"dims": {"c": 1, "o": 1}, "maps": {"c<o": [["1", "0"]]}}]}}"#,
    ))
    .unwrap();
    match resolve_scenario(&bad_dims, None) {
        Err(CliError::Schema(m)) => assert!(m.contains("objects.X.terms[0].maps.c<o"), "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn failures_carry_witnesses_that_parse_back() {
    let sc = resolve_scenario(&parse_scenario_file(&with_chain(MISMATCH)).unwrap(), None).unwrap();
    let out = run_scenario(&sc, &SuiteOptions::default()).unwrap();
    assert!(!out.passed());
    let v = out.to_json();
    let check = &v["checks"][0];
    assert_eq!(check["status"], "fail");
    let objects = check["witness"]["objects"].as_object().unwrap();
    assert_eq!(objects.len(), 2);
    for (k, o) in objects {
        let x = complex_from_json(o, &sc.instance.poset, sc.instance.field, k).unwrap();
        assert_eq!(&complex_to_json(&x), o);
    }
}

#[test]
fn exit_codes() {
    let ok = scratch("ok.json", &with_chain(""));
    let fail = scratch("fail.json", &with_chain(MISMATCH));
    let broken = scratch("broken.json", "{\"schema\": 1,");
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code();
    assert_eq!(code(&["verify", ok.to_str().unwrap()]), Some(0));
    assert_eq!(code(&["verify", fail.to_str().unwrap()]), Some(1));
    assert_eq!(code(&["verify", broken.to_str().unwrap()]), Some(2));
    assert_eq!(code(&["verify", "no_such_scenario"]), Some(2));
    assert_eq!(code(&["--format", "yaml", "verify", ok.to_str().unwrap()]), Some(2));
    assert_eq!(code(&["--field", "Fp:4", "verify", ok.to_str().unwrap()]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));
    assert_eq!(code(&["fuzz", "--instance", "p1_poset", "--count", "0"]), Some(0));
    assert_eq!(code(&["fuzz", "--instance", "p1_poset", "--max-dim", "0"]), Some(2));
}

#[test]
fn json_reports_are_byte_identical_across_runs() {
    let run = || {
        let o = bin()
            .args(["--format", "json", "--field", "Fp:5", "fuzz", "--instance", "three_strata", "--seed", "7", "--count", "12"])
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        o.stdout
    };
    let a = run();
    assert_eq!(a, run());
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
    let seq = bin()
        .args(["--sequential", "--format", "json", "--field", "Fp:5", "fuzz", "--instance", "three_strata", "--seed", "7", "--count", "12"])
        .output()
        .unwrap();
    assert_eq!(seq.stdout, a);
}

#[test]
fn truncate_and_stagger_subcommands() {
    let out = scratch("trunc.json", "");
    let o = bin()
        .args(["--format", "json", "--output", out.to_str().unwrap(), "truncate", "--scenario", "a2_exceptional", "--object", "K", "--w", "0"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let objs = v["objects"].as_object().unwrap();
    // K truncates to S_o -> K -> S_c
    assert_eq!(objs["K.beta_geq(1)"], json!({"diffs": [], "lo": 0, "terms": [{"dims": {"c": 1}, "maps": {}}]}));
    let o = bin().args(["stagger", "--scenario", "p1_poset", "--object", "K1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("stagger.leq") && text.contains("K1.stag_geq(1): {\"diffs\":[],\"lo\":0,\"terms\":[]}"), "{text}");
}
