//! Acceptance criteria, one line each. Seed 0, 200 objects per instance, over F_5 and Q.

use std::io::Write;
use std::sync::Arc;

use baric_cli::{fuzz_named, Output};
use baric_core::baric::BaricRealization;
use baric_core::derivedcat::{ext_dim, find_quasi_iso, hom_dim, resolve, Complex, HomComplex};
use baric_core::exactlinalg::Field;
use baric_core::posetrep::{PosetRep, StratPoset};
use baric_core::staggering::StaggerContext;
use baric_core::verify::{fuzz, run_suite, verify_perverse_equivalence, Bounds, Report, SuiteOptions};

const SEED: u64 = 0;
const COUNT: usize = 200;
const FIELDS: [Field; 2] = [Field::Prime(5), Field::Rational];
const LEVEL_INSTANCES: [&str; 5] = ["p1_poset", "three_strata", "diamond", "five_strata", "graded_point"];

struct Run {
    instance: &'static str,
    field: Field,
    report: Report,
}

fn say(line: String) {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").unwrap();
    out.flush().unwrap();
}

fn full_runs() -> Vec<Run> {
    let mut runs = Vec::new();
    for name in fuzz::INSTANCE_NAMES {
        for field in FIELDS {
            let inst = fuzz::instance(name, field).unwrap();
            let sample = fuzz::sample(&inst, SEED, COUNT, &Bounds::default());
            let report = run_suite(&inst, &sample, &SuiteOptions::default());
            runs.push(Run { instance: name, field, report });
        }
    }
    runs
}

/// Every id in `ids` is present in `r`, passes, and saw at least `min` cases.
fn all_pass(r: &Run, ids: &[&str], min: usize, problems: &mut Vec<String>) {
    for id in ids {
        match r.report.get(id) {
            None => problems.push(format!("{} {}: {id} missing", r.instance, r.field)),
            Some(c) if !c.passed => problems.push(format!(
                "{} {}: {id} failed {}/{} ({})",
                r.instance,
                r.field,
                c.failures,
                c.cases,
                c.witness.as_ref().map(|w| w.note.as_str()).unwrap_or("")
            )),
            Some(c) if c.cases < min => {
                problems.push(format!("{} {}: {id} saw {} cases, want {min}", r.instance, r.field, c.cases))
            }
            Some(_) => {}
        }
    }
}

fn prefixed<'a>(r: &'a Run, prefix: &str) -> Vec<&'a str> {
    r.report.checks.iter().filter(|c| c.id.starts_with(prefix)).map(|c| c.id.as_str()).collect()
}

fn verdict(n: usize, title: &str, detail: &str, problems: &[String]) -> bool {
    if problems.is_empty() {
        say(format!("criterion {n} PASS  {title}: {detail}"));
        true
    } else {
        say(format!("criterion {n} FAIL  {title}: {}", problems.join("; ")));
        false
    }
}

fn baric_axioms(runs: &[Run]) -> bool {
    let mut p = Vec::new();
    for r in runs {
        let mut ids = prefixed(r, "baric.");
        ids.extend(prefixed(r, "trunc."));
        if ids.len() < 12 {
            p.push(format!("{} {}: only {} axiom and identity checks", r.instance, r.field, ids.len()));
        }
        all_pass(r, &ids, 1, &mut p);
        all_pass(r, &["baric.triangle", "trunc.unique_triangle"], COUNT, &mut p);
    }
    verdict(1, "baric axioms and truncation identities", "6 instances x 2 fields x 200 objects", &p)
}

const COMPAT: [&str; 11] = [
    "compat.cohomology_criterion",
    "compat.geq_criterion",
    "compat.heart_orthogonality",
    "compat.heart_serre",
    "compat.stag_bounded",
    "compat.stag_containments",
    "compat.stag_extensions",
    "compat.stag_nondegenerate",
    "compat.stag_orthogonal_complement",
    "compat.stag_orthogonality",
    "compat.stag_shifts",
];

fn compatibility(runs: &[Run]) -> bool {
    let mut p = Vec::new();
    for r in runs.iter().filter(|r| LEVEL_INSTANCES.contains(&r.instance)) {
        all_pass(r, &COMPAT, 1, &mut p);
        all_pass(r, &["compat.tau_right_baryexact", "compat.beta_left_t_exact"], 1, &mut p);
    }
    verdict(2, "compatibility", "11 consequences plus both exactness conditions on support and graded instances", &p)
}

fn chain() -> Arc<StratPoset> {
    Arc::new(StratPoset::chain(&["c", "o"], &[0, 1]).unwrap())
}

fn perverse() -> bool {
    let mut p = Vec::new();
    let n = 500;
    for name in ["p1_poset", "three_strata"] {
        for field in FIELDS {
            let inst = fuzz::instance(name, field).unwrap();
            let sample = fuzz::sample(&inst, SEED, n, &Bounds::default());
            let mut ctx = StaggerContext::new(inst.baric.clone());
            let xs: Vec<Complex> = sample.iter().map(|c| c.x.clone()).collect();
            let cert = ctx.certify(&xs);
            if !cert.passed() {
                p.push(format!("{name} {field}: compatibility not certified"));
                continue;
            }
            let rep = verify_perverse_equivalence(&ctx, &sample, Default::default());
            let r = Run { instance: name, field, report: rep };
            all_pass(&r, &["perverse.leq", "perverse.geq"], n, &mut p);
        }
    }
    for field in FIELDS {
        let poset = chain();
        let mut ctx = StaggerContext::new(BaricRealization::Level(
            baric_core::baric::LevelRealization::support(poset.clone()).unwrap(),
        ));
        let (open, emb) = poset.subposet(&[false, true]);
        let open = Arc::new(open);
        let k1 = Complex::from_rep(&PosetRep::constant(open.clone(), field), -1);
        let want = Complex::from_rep(&PosetRep::constant(poset.clone(), field), -1);
        if !ctx.certify(std::slice::from_ref(&want)).passed() {
            p.push(format!("{field}: chain not certified"));
            continue;
        }
        match ctx.intermediate_extension(&emb, &open, &k1) {
            Ok(ic) => match find_quasi_iso(&ic, &want) {
                Some(f) if f.is_quasi_iso() => {}
                _ => p.push(format!("{field}: intermediate extension of k[1] is not K[1]")),
            },
            Err(e) => p.push(format!("{field}: intermediate extension failed: {e}")),
        }
    }
    verdict(3, "perverse conditions and IC of k[1]", "500 objects on p1_poset and three_strata per field, j_!*k[1] = K[1]", &p)
}

fn stag_algorithm(runs: &[Run]) -> bool {
    let mut p = Vec::new();
    for r in runs.iter().filter(|r| LEVEL_INSTANCES.contains(&r.instance)) {
        all_pass(r, &["stag.terminates", "stag.memberships", "stag.cone"], COUNT, &mut p);
    }
    verdict(4, "staggered decomposition", "terminates within fuel, memberships and cone on every case", &p)
}

fn a2() -> bool {
    let mut p = Vec::new();
    for field in FIELDS {
        let inst = fuzz::instance("a2_exceptional", field).unwrap();
        let BaricRealization::Exceptional(e) = &inst.baric else { unreachable!() };
        let rep = baric_core::verify::verify_exceptional_axioms(e);
        let r = Run { instance: "a2_exceptional", field, report: rep };
        let ids = prefixed(&r, "exceptional.");
        if ids.len() < 5 {
            p.push(format!("{field}: only {} exceptional checks", ids.len()));
        }
        all_pass(&r, &ids, 1, &mut p);
        // direct table
        let (n0, n1) = (e.nabla(0), e.nabla(1));
        if let Some(k) = (-4..=4).find(|&k| ext_dim(n0, n1, k) != 0) {
            p.push(format!("{field}: ext(nabla0, nabla1[{k}]) != 0"));
        }
        for w in 0..2 {
            let d = hom_dim(e.nabla(w), e.nabla(w));
            if d != 1 {
                p.push(format!("{field}: dim End(nabla{w}) = {d}"));
            }
        }
        let d1 = e.delta(1).expect("delta 1");
        let j = resolve(n1).model;
        match HomComplex::new(d1, &j).basis_maps(0).into_iter().next() {
            None => p.push(format!("{field}: no map delta1 -> nabla1")),
            Some(f) => {
                let (c, _) = f.cone();
                if !inst.baric.member_leq(&c, 0).unwrap_or(false) {
                    p.push(format!("{field}: cone(delta1 -> nabla1) not in D_(<=0)"));
                }
            }
        }
    }
    verdict(5, "A_2 exceptional set", "axioms, Ext table, End = k, cone(delta1 -> nabla1) in D_(<=0)", &p)
}

fn graded(runs: &[Run]) -> bool {
    let mut p = Vec::new();
    for r in runs.iter().filter(|r| r.instance == "graded_point") {
        all_pass(r, &["mult.pure_lines"], 13 * 13 * 9, &mut p);
        all_pass(r, &["mult.sample_pairs", "duality.baric", "duality.double", "duality.staggered", "pred.self_dual"], COUNT, &mut p);
    }
    verdict(6, "multiplicativity and duality", "all pure lines of weight -6..6, duality on 200 graded objects", &p)
}

fn heart(runs: &[Run]) -> bool {
    let mut p = Vec::new();
    for r in runs.iter().filter(|r| LEVEL_INSTANCES.contains(&r.instance)) {
        all_pass(r, &["heart.additive"], 100, &mut p);
        all_pass(r, &["heart.ic_simple", "heart.cohomology"], 1, &mut p);
        if r.instance == "graded_point" {
            all_pass(r, &["heart.purity_oracle"], COUNT, &mut p);
        }
    }
    verdict(7, "heart", "purity oracle on 200 graded objects, length additive on 100 sequences, IC objects simple", &p)
}

fn determinism(runs: &[Run]) -> bool {
    let mut p = Vec::new();
    for r in runs {
        let again = fuzz_named(r.instance, r.field, SEED, COUNT, &Bounds::default(), &SuiteOptions::default()).unwrap();
        let first = Output { report: r.report.clone(), objects: Default::default() };
        if first.to_json_string() != again.to_json_string() {
            p.push(format!("{} {}: JSON differs", r.instance, r.field));
        }
    }
    verdict(8, "determinism", "second full run gives byte-identical JSON for every instance and field", &p)
}

#[test]
fn acceptance() {
    say(String::new());
    let runs = full_runs();
    let results = [
        baric_axioms(&runs),
        compatibility(&runs),
        perverse(),
        stag_algorithm(&runs),
        a2(),
        graded(&runs),
        heart(&runs),
        determinism(&runs),
    ];
    let failed: Vec<usize> = (1..=8).filter(|i| !results[i - 1]).collect();
    say(format!("acceptance: {} of 8 criteria pass", 8 - failed.len()));
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
