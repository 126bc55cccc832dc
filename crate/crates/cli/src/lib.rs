//! Scenario runner and fuzzer for `baric-core`.

pub mod scenario;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::Value;
use thiserror::Error;

use baric_core::baric::{BaricRealization, Flavor};
use baric_core::derivedcat::{find_quasi_iso, reduce, Complex};
use baric_core::exactlinalg::Field;
use baric_core::exec::Executor;
use baric_core::serial::{complex_from_json, complex_to_json};
use baric_core::staggering::StaggerContext;
use baric_core::verify::report::Tally;
use baric_core::verify::{self, fuzz, Bounds, Case, Instance, Report, SuiteOptions, Witness};

pub use scenario::{parse_field, parse_scenario_file, resolve_scenario, Scenario, ScenarioFile, SuiteName, Task};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
}

pub const BUILTIN_NAMES: [&str; 4] = ["p1_poset", "three_strata", "graded_point", "a2_exceptional"];

/// Text of a built-in scenario.
pub fn builtin(name: &str) -> Option<&'static str> {
    match name {
        "p1_poset" => Some(include_str!("../scenarios/p1_poset.json")),
        "three_strata" => Some(include_str!("../scenarios/three_strata.json")),
        "graded_point" => Some(include_str!("../scenarios/graded_point.json")),
        "a2_exceptional" => Some(include_str!("../scenarios/a2_exceptional.json")),
        _ => None,
    }
}

/// Reads a scenario from a file, or a built-in one by name.
pub fn load_scenario(arg: &str, field: Option<Field>) -> Result<Scenario, CliError> {
    let text = match std::fs::read_to_string(arg) {
        Ok(t) => t,
        Err(e) => match builtin(arg) {
            Some(t) => t.to_string(),
            None => return Err(CliError::Usage(format!("{arg}: {e}, and no built-in scenario has that name"))),
        },
    };
    resolve_scenario(&parse_scenario_file(&text)?, field)
}

/// A report plus objects produced along the way.
#[derive(Clone, Debug, Default)]
pub struct Output {
    pub report: Report,
    pub objects: BTreeMap<String, Complex>,
}

impl Output {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.report.to_json();
        if !self.objects.is_empty() {
            let objs: serde_json::Map<String, Value> =
                self.objects.iter().map(|(k, x)| (k.clone(), complex_to_json(x))).collect();
            v["objects"] = Value::Object(objs);
        }
        v
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = self.report.to_text();
        for (k, x) in &self.objects {
            s.push_str(&format!("{k}: {}\n", serde_json::to_string(&complex_to_json(x)).expect("serializable")));
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl std::str::FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Usage(format!("unknown format {s}"))),
        }
    }
}

pub fn emit(out: &Output, format: Format) -> String {
    match format {
        Format::Text => out.to_text(),
        Format::Json => out.to_json_string(),
    }
}

fn single(id: &str, r: baric_core::Result<bool>, w: impl FnOnce() -> Witness) -> Report {
    let mut t = Tally::new(id);
    t.record_result(r, w);
    Report { checks: vec![t.finish()] }
}

// injective models are shown minimal
fn shown(x: &Complex) -> Complex {
    if x.is_tagged() {
        reduce(x).model
    } else {
        x.clone()
    }
}

fn context(inst: &Instance, sample: &[Case]) -> (StaggerContext, Report) {
    let mut ctx = StaggerContext::new(inst.baric.clone());
    let xs: Vec<Complex> = sample.iter().map(|c| c.x.clone()).collect();
    let rep = ctx.certify(&xs);
    (ctx, rep)
}

/// One suite on `sample`.
pub fn run_named_suite(inst: &Instance, suite: SuiteName, sample: &[Case], opts: &SuiteOptions) -> Result<Report, CliError> {
    let b = &inst.baric;
    let exec = opts.exec;
    let level = || {
        b.as_level().ok_or_else(|| CliError::Schema(format!("suite {suite:?} needs a support or graded instance")))
    };
    let staggered = |f: &dyn Fn(&StaggerContext) -> Report| -> Result<Report, CliError> {
        level()?;
        let (ctx, mut rep) = context(inst, sample);
        if ctx.is_certified() {
            rep.extend(f(&ctx));
        }
        Ok(rep.sorted())
    };
    Ok(match suite {
        SuiteName::All => verify::run_suite(inst, sample, opts),
        SuiteName::BaricAxioms => verify::verify_baric_axioms(b, sample, exec),
        SuiteName::TruncationIdentities => verify::verify_truncation_identities(b, sample, exec),
        SuiteName::Predicates => verify::check_predicates(b, sample, exec),
        SuiteName::ExceptionalAxioms => match b {
            BaricRealization::Exceptional(e) => verify::verify_exceptional_axioms(e),
            _ => return Err(CliError::Schema("suite ExceptionalAxioms needs an exceptional instance".into())),
        },
        SuiteName::Compat => staggered(&|c| verify::verify_compat_suite(c, sample, exec))?,
        SuiteName::StagDecompose => staggered(&|c| verify::verify_stag_decompose(c, sample, exec))?,
        SuiteName::Heart => staggered(&|c| verify::verify_heart(c, sample, opts.heart_sequences, exec))?,
        SuiteName::Perverse => {
            if level()?.flavor() != Flavor::Support {
                return Err(CliError::Schema("suite Perverse needs a support instance".into()));
            }
            staggered(&|c| verify::verify_perverse_equivalence(c, sample, exec))?
        }
        SuiteName::Gluing => {
            let l = level()?;
            if l.flavor() != Flavor::Support {
                return Err(CliError::Schema("suite Gluing needs a support instance".into()));
            }
            let z = l.lower_set(l.weight_window().0);
            verify::verify_gluing(l, &z, sample, exec)
        }
        SuiteName::MultDuality => {
            let l = level()?;
            if l.flavor() != Flavor::Graded {
                return Err(CliError::Schema("suite MultDuality needs a graded instance".into()));
            }
            verify::verify_mult_duality(l, sample, exec)
        }
    })
}

fn bounds_of(b: Option<scenario::BoundsSpec>) -> Result<Bounds, CliError> {
    match b {
        None => Ok(Bounds::default()),
        Some(b) if b.max_dim == 0 || b.lo_degree > b.hi_degree => {
            Err(CliError::Schema("bounds: need max_dim > 0 and lo_degree <= hi_degree".into()))
        }
        Some(b) => Ok(Bounds { max_dim: b.max_dim, lo_degree: b.lo_degree, hi_degree: b.hi_degree }),
    }
}

/// Runs one task; objects it produces are added to `out`.
pub fn run_task(sc: &Scenario, task: &Task, opts: &SuiteOptions, out: &mut Output) -> Result<(), CliError> {
    let inst = &sc.instance;
    let rep = match task {
        Task::Suite { suite, objects } => {
            let names: Vec<String> = objects.clone().unwrap_or_else(|| sc.objects.keys().cloned().collect());
            let sample = names.iter().map(|k| Ok(Case::fixed(sc.object(k)?.clone()))).collect::<Result<Vec<_>, CliError>>()?;
            run_named_suite(inst, *suite, &sample, opts)?
        }
        Task::Fuzz { seed, count, bounds, suite } => {
            let sample = fuzz::sample(inst, *seed, *count, &bounds_of(*bounds)?);
            run_named_suite(inst, suite.unwrap_or(SuiteName::All), &sample, opts)?
        }
        Task::Truncate { object, w } => {
            let x = sc.object(object)?;
            let b = &inst.baric;
            match b.truncation_triangle(x, *w) {
                Err(e) => single("truncate.triangle", Err(e), || Witness::new("truncation failed").object("x", x)),
                Ok(t) => {
                    let wit = |n: &str| Witness::new(n).object("x", x).object("lower", t.a()).object("upper", t.b());
                    let mut rep = Report::new();
                    rep.extend(single("truncate.lower", b.member_leq(t.a(), *w), || wit("lower part leaves D_(<=w)")));
                    rep.extend(single("truncate.upper", b.member_geq(t.b(), w + 1), || wit("upper part leaves D_(>=w+1)")));
                    rep.extend(single("truncate.triangle", Ok(t.is_distinguished()), || wit("not distinguished")));
                    out.objects.insert(format!("{object}.beta_leq({w})"), shown(t.a()));
                    out.objects.insert(format!("{object}.beta_geq({})", w + 1), shown(t.b()));
                    rep
                }
            }
        }
        Task::Stagger { object } => {
            let x = sc.object(object)?;
            if inst.baric.as_level().is_none() {
                return Err(CliError::Schema("stagger needs a support or graded instance".into()));
            }
            let cases: Vec<Case> = sc.objects.values().cloned().map(Case::fixed).collect();
            let (ctx, mut rep) = context(inst, &cases);
            if ctx.is_certified() {
                match ctx.stag_decompose(x) {
                    Err(e) => rep.extend(single("stagger.triangle", Err(e), || Witness::new("decomposition failed").object("x", x))),
                    Ok(t) => {
                        let wit = |n: &str| Witness::new(n).object("x", x).object("a", t.a()).object("b", t.b());
                        rep.extend(single("stagger.leq", ctx.in_sd_leq(t.a(), 0), || wit("A leaves sD^(<=0)")));
                        rep.extend(single("stagger.geq", ctx.in_sd_geq(t.b(), 1), || wit("B leaves sD^(>=1)")));
                        rep.extend(single("stagger.triangle", Ok(t.is_distinguished()), || wit("not distinguished")));
                        out.objects.insert(format!("{object}.stag_leq(0)"), shown(t.a()));
                        out.objects.insert(format!("{object}.stag_geq(1)"), shown(t.b()));
                    }
                }
            }
            rep
        }
        Task::IntermediateExtension { open, object, expect } => {
            let p = &inst.poset;
            let mut set = vec![false; p.len()];
            for e in open {
                set[p.index(e).map_err(|e| CliError::Schema(format!("open: {e}")))?] = true;
            }
            if !p.is_up_closed(&set) {
                return Err(CliError::Schema("open: not an up-closed set".into()));
            }
            let (sub, emb) = p.subposet(&set);
            let sub = Arc::new(sub);
            let f = complex_from_json(object, &sub, inst.field, "object").map_err(|e| CliError::Schema(e.to_string()))?;
            let want = sc.object(expect)?;
            let mut ctx = StaggerContext::new(inst.baric.clone());
            let mut rep = ctx.certify(std::slice::from_ref(want));
            let res = ctx.intermediate_extension(&emb, &sub, &f);
            if let Ok(ic) = &res {
                out.objects.insert(format!("ic({expect})"), shown(ic));
            }
            let ok = res.map(|ic| find_quasi_iso(&ic, want).is_some());
            rep.extend(single("ic.matches", ok, || Witness::new(format!("intermediate extension is not {expect}")).object("expect", want)));
            rep
        }
        Task::Isomorphic { left, right } => {
            let (x, y) = (sc.object(left)?, sc.object(right)?);
            single("iso.quasi_iso", Ok(find_quasi_iso(x, y).is_some()), || {
                Witness::new(format!("no quasi-isomorphism {left} -> {right}")).object("left", x).object("right", y)
            })
        }
    };
    out.report.extend(rep);
    Ok(())
}

/// Runs every task in order.
pub fn run_scenario(sc: &Scenario, opts: &SuiteOptions) -> Result<Output, CliError> {
    let mut out = Output::default();
    for t in &sc.tasks {
        run_task(sc, t, opts, &mut out)?;
    }
    out.report = out.report.sorted();
    Ok(out)
}

/// Runs the full suite on `count` random objects of a named instance.
pub fn fuzz_named(name: &str, field: Field, seed: u64, count: usize, bounds: &Bounds, opts: &SuiteOptions) -> Result<Output, CliError> {
    if bounds.max_dim == 0 || bounds.lo_degree > bounds.hi_degree {
        return Err(CliError::Usage("bounds: need max_dim > 0 and lo_degree <= hi_degree".into()));
    }
    let inst = fuzz::instance(name, field).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Output { report: verify::fuzz_instance(&inst, seed, count, bounds, opts), objects: BTreeMap::new() })
}

pub fn exec_of(sequential: bool) -> Executor {
    if sequential {
        Executor::Sequential
    } else {
        Executor::Parallel
    }
}
