//! Verification suites. Every check has a stable id and records one case per
//! object (or pair, or parameter) it examines; failures keep a replayable witness.

pub mod fuzz;
pub mod report;

mod baric_suite;
mod stag_suite;

pub use baric_suite::{
    check_predicates, verify_baric_axioms, verify_exceptional_axioms, verify_gluing, verify_mult_duality,
    verify_truncation_identities,
};
pub use fuzz::{Bounds, Case, Instance};
pub use report::{Check, Report, Tally, Witness};
pub use stag_suite::{verify_compat_suite, verify_heart, verify_perverse_equivalence, verify_stag_decompose};

use crate::baric::{BaricRealization, Flavor};
use crate::derivedcat::{resolve, Complex};
use crate::error::Result;
use crate::exec::Executor;
use crate::staggering::StaggerContext;

/// Tallies for one case, keyed by check id.
pub(crate) struct Rec {
    seed: Option<u64>,
    tallies: Vec<Tally>,
    ids: Vec<&'static str>,
}

impl Rec {
    fn new(ids: &[&'static str], seed: Option<u64>) -> Rec {
        Rec { seed, tallies: ids.iter().map(|id| Tally::new(*id)).collect(), ids: ids.to_vec() }
    }

    pub(crate) fn check(&mut self, id: &str, r: Result<bool>, w: impl FnOnce() -> Witness) {
        let i = self.ids.iter().position(|x| *x == id).unwrap_or_else(|| panic!("undeclared check id {id}"));
        let seed = self.seed;
        self.tallies[i].record_result(r, || w().seed(seed));
    }

    fn finish(self) -> Report {
        Report { checks: self.tallies.into_iter().map(Tally::finish).collect() }
    }
}

/// Runs `f` on every case, merging the per-case tallies in case order.
pub(crate) fn per_case<F>(exec: Executor, sample: &[Case], ids: &[&'static str], f: F) -> Report
where
    F: Fn(usize, &Case, &mut Rec) + Sync + Send,
{
    let idx: Vec<usize> = (0..sample.len()).collect();
    let parts = exec.map(&idx, |&i| {
        let mut r = Rec::new(ids, sample[i].seed);
        f(i, &sample[i], &mut r);
        r.finish()
    });
    let mut rep = Rec::new(ids, None).finish();
    for p in parts {
        rep.extend(p);
    }
    let mut rep = rep.sorted();
    if !sample.is_empty() {
        // checks that never applied to this sample
        rep.checks.retain(|c| c.cases > 0);
    }
    rep
}

/// Runs `f` once, outside any case.
pub(crate) fn once(ids: &[&'static str], f: impl FnOnce(&mut Rec)) -> Report {
    let mut r = Rec::new(ids, None);
    f(&mut r);
    let mut rep = r.finish();
    rep.checks.retain(|c| c.cases > 0);
    rep
}

pub(crate) fn model(x: &Complex) -> Complex {
    resolve(x).model
}

/// Cut points of `x` plus one level on either side.
pub(crate) fn levels_around(b: &BaricRealization, x: &Complex) -> Vec<i64> {
    let mut ks = b.cut_points(x);
    match (ks.first().copied(), ks.last().copied()) {
        (Some(a), Some(z)) => {
            ks.insert(0, a - 1);
            ks.push(z + 1);
        }
        _ => ks.push(0),
    }
    ks
}

/// Options for [`run_suite`].
#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    pub exec: Executor,
    /// Run the perverse-equivalence check on support instances.
    pub perverse: bool,
    /// Number of heart short exact sequences for the length check.
    pub heart_sequences: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { exec: Executor::default(), perverse: true, heart_sequences: 100 }
    }
}

/// Every suite that applies to `inst`, on `sample`.
pub fn run_suite(inst: &Instance, sample: &[Case], opts: &SuiteOptions) -> Report {
    let b = &inst.baric;
    let exec = opts.exec;
    let mut rep = Report::new();
    rep.extend(verify_baric_axioms(b, sample, exec));
    rep.extend(verify_truncation_identities(b, sample, exec));
    rep.extend(check_predicates(b, sample, exec));
    match b {
        BaricRealization::Exceptional(e) => rep.extend(verify_exceptional_axioms(e)),
        BaricRealization::Level(l) => {
            let mut ctx = StaggerContext::new(b.clone());
            let xs: Vec<Complex> = sample.iter().map(|c| c.x.clone()).collect();
            rep.extend(ctx.certify(&xs));
            if ctx.is_certified() {
                rep.extend(verify_compat_suite(&ctx, sample, exec));
                rep.extend(verify_stag_decompose(&ctx, sample, exec));
                rep.extend(verify_heart(&ctx, sample, opts.heart_sequences, exec));
                if l.flavor() == Flavor::Support && opts.perverse {
                    rep.extend(verify_perverse_equivalence(&ctx, sample, exec));
                }
            }
            match l.flavor() {
                Flavor::Support => {
                    let z = l.lower_set(l.weight_window().0);
                    rep.extend(verify_gluing(l, &z, sample, exec));
                }
                Flavor::Graded => rep.extend(verify_mult_duality(l, sample, exec)),
            }
        }
    }
    rep.sorted()
}

/// Fuzzes `inst` and runs [`run_suite`] on the sample.
pub fn fuzz_instance(inst: &Instance, seed: u64, count: usize, bounds: &Bounds, opts: &SuiteOptions) -> Report {
    let sample = fuzz::sample(inst, seed, count, bounds);
    run_suite(inst, &sample, opts)
}
