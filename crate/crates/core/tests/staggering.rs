use std::sync::Arc;

use baric_core::baric::{BaricRealization, LevelRealization};
use baric_core::derivedcat::{find_quasi_iso, Complex};
use baric_core::exactlinalg::Field;
use baric_core::posetrep::{PosetRep, StratPoset};
use baric_core::staggering::StaggerContext;

const Q: Field = Field::Rational;

fn chain() -> Arc<StratPoset> {
    Arc::new(StratPoset::chain(&["c", "o"], &[0, 1]).unwrap())
}

fn ctx_on(p: &Arc<StratPoset>, sample: &[Complex]) -> StaggerContext {
    let mut ctx = StaggerContext::new(BaricRealization::Level(LevelRealization::support(p.clone()).unwrap()));
    assert!(ctx.certify(sample).passed());
    ctx
}

#[test]
fn memberships_on_the_chain() {
    let p = chain();
    let k = Complex::from_rep(&PosetRep::constant(p.clone(), Q), 0);
    let k1 = k.shift(1);
    let so = Complex::from_rep(&PosetRep::simple(p.clone(), Q, 1), 0);
    let sc = Complex::from_rep(&PosetRep::simple(p.clone(), Q, 0), 0);
    let ctx = ctx_on(&p, &[k.clone(), so.clone(), sc.clone()]);
    assert!(ctx.in_heart(&k1).unwrap());
    assert!(ctx.in_heart(&sc).unwrap());
    assert!(!ctx.in_sd_leq(&so, 0).unwrap());
    assert!(ctx.in_sd_leq(&so.shift(1), 0).unwrap());
    assert!(!ctx.in_heart(&k).unwrap());
    assert!(ctx.in_sd_geq(&k, 1).unwrap());
}

#[test]
fn decomposition_of_the_constant_sheaf() {
    let p = chain();
    let k = Complex::from_rep(&PosetRep::constant(p.clone(), Q), 0);
    let ctx = ctx_on(&p, std::slice::from_ref(&k));
    let t = ctx.stag_decompose(&k).unwrap();
    assert!(t.a().is_acyclic());
    assert!(t.is_distinguished());
    assert!(ctx.in_sd_geq(t.b(), 1).unwrap());
    let h = ctx.stag_cohomology(&k, 1).unwrap();
    assert!(find_quasi_iso(&h, &k.shift(1)).is_some());
}

#[test]
fn intermediate_extension_from_the_open_stratum() {
    let p = chain();
    let k1 = Complex::from_rep(&PosetRep::constant(p.clone(), Q), -1);
    let ctx = ctx_on(&p, std::slice::from_ref(&k1));
    let (open, emb) = p.subposet(&[false, true]);
    let open = Arc::new(open);
    let f = Complex::from_rep(&PosetRep::constant(open.clone(), Q), -1);
    let ic = ctx.intermediate_extension(&emb, &open, &f).unwrap();
    let q = find_quasi_iso(&ic, &k1).expect("IC of k[1] is K[1]");
    assert!(q.is_quasi_iso());
    assert_eq!(ctx.heart_length(&k1).unwrap(), 1);
    assert_eq!(ctx.ic_objects(Q).unwrap().len(), 2);
}

#[test]
fn lengths_in_the_graded_heart() {
    let l = LevelRealization::graded(4);
    let lines: Vec<Complex> = (-2..=2).map(|w| l.graded_line(Q, w, -w).unwrap()).collect();
    let mut ctx = StaggerContext::new(BaricRealization::Level(l.clone()));
    assert!(ctx.certify(&lines).passed());
    for x in &lines {
        assert!(ctx.in_heart(x).unwrap());
        assert_eq!(ctx.heart_length(x).unwrap(), 1);
    }
    let sum = Complex::direct_sum(&[&lines[0], &lines[3], &lines[3]]).unwrap();
    assert_eq!(ctx.heart_length(&sum).unwrap(), 3);
    // weight 1 in degree 0 is not pure of the right degree
    let off = l.graded_line(Q, 1, 0).unwrap();
    assert!(!ctx.in_heart(&off).unwrap());
}
