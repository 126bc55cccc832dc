//! Verification reports.

use std::fmt::Write;

use serde_json::{json, Value};

use crate::derivedcat::Complex;
use crate::error::Error;
use crate::serial::complex_to_json;

/// Data that reproduces a failure.
#[derive(Clone, Debug, Default)]
pub struct Witness {
    pub seed: Option<u64>,
    pub note: String,
    pub objects: Vec<(String, Complex)>,
}

impl Witness {
    pub fn new(note: impl Into<String>) -> Self {
        Witness { note: note.into(), ..Default::default() }
    }

    pub fn object(mut self, name: &str, x: &Complex) -> Self {
        self.objects.push((name.to_string(), x.clone()));
        self
    }

    pub fn seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn to_json(&self) -> Value {
        let objects: serde_json::Map<String, Value> =
            self.objects.iter().map(|(k, x)| (k.clone(), complex_to_json(x))).collect();
        let mut v = json!({"note": self.note, "objects": objects});
        if let Some(s) = self.seed {
            v["seed"] = json!(s);
        }
        v
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub id: String,
    pub passed: bool,
    pub cases: usize,
    pub failures: usize,
    pub witness: Option<Witness>,
}

impl Check {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "id": self.id,
            "status": if self.passed { "pass" } else { "fail" },
            "cases": self.cases,
            "failures": self.failures,
        });
        if let Some(w) = &self.witness {
            v["witness"] = w.to_json();
        }
        v
    }
}

/// Accumulates cases for one check, keeping the first failure as witness.
#[derive(Debug)]
pub struct Tally {
    id: String,
    cases: usize,
    failures: usize,
    witness: Option<Witness>,
}

impl Tally {
    pub fn new(id: impl Into<String>) -> Self {
        Tally { id: id.into(), cases: 0, failures: 0, witness: None }
    }

    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> Witness) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    /// `Ok(b)` records `b`; an error counts as a failure.
    pub fn record_result(&mut self, r: Result<bool, Error>, witness: impl FnOnce() -> Witness) {
        match r {
            Ok(b) => self.record(b, witness),
            Err(e) => self.record(false, || {
                let mut w = witness();
                w.note = format!("{}: {e}", w.note);
                w
            }),
        }
    }

    pub fn finish(self) -> Check {
        Check { passed: self.failures == 0, id: self.id, cases: self.cases, failures: self.failures, witness: self.witness }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// Checks sorted by id; repeated ids are merged.
    pub fn sorted(mut self) -> Report {
        self.checks.sort_by(|a, b| a.id.cmp(&b.id));
        let mut out: Vec<Check> = Vec::new();
        for c in self.checks {
            match out.last_mut() {
                Some(last) if last.id == c.id => {
                    last.cases += c.cases;
                    last.failures += c.failures;
                    last.passed &= c.passed;
                    if last.witness.is_none() {
                        last.witness = c.witness;
                    }
                }
                _ => out.push(c),
            }
        }
        Report { checks: out }
    }

    pub fn to_json(&self) -> Value {
        let sorted = self.clone().sorted();
        json!({"checks": sorted.checks.iter().map(Check::to_json).collect::<Vec<_>>()})
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let sorted = self.clone().sorted();
        let width = sorted.checks.iter().map(|c| c.id.len()).max().unwrap_or(5).max(5);
        let mut s = String::new();
        writeln!(s, "{:<width$}  status  cases  failures", "check").unwrap();
        for c in &sorted.checks {
            let st = if c.passed { "pass" } else { "FAIL" };
            writeln!(s, "{:<width$}  {:<6}  {:>5}  {:>8}", c.id, st, c.cases, c.failures).unwrap();
            if let Some(w) = &c.witness {
                writeln!(s, "{:<width$}    witness: {}", "", w.note).unwrap();
            }
        }
        let total = sorted.checks.len();
        let failed = sorted.checks.iter().filter(|c| !c.passed).count();
        writeln!(s, "{} checks, {} failed", total, failed).unwrap();
        s
    }
}
