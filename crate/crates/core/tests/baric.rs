use std::sync::Arc;

use baric_core::baric::{graded_dual, graded_tensor, BaricRealization, ExceptionalSet, LevelRealization};
use baric_core::derivedcat::Complex;
use baric_core::exactlinalg::Field;
use baric_core::posetrep::{PosetRep, StratPoset};

const Q: Field = Field::Rational;

fn chain() -> Arc<StratPoset> {
    Arc::new(StratPoset::chain(&["c", "o"], &[0, 1]).unwrap())
}

fn obj(f: PosetRep) -> Complex {
    Complex::from_rep(&f, 0)
}

#[test]
fn support_truncations_on_the_chain() {
    let p = chain();
    let b = BaricRealization::Level(LevelRealization::support(p.clone()).unwrap());
    let k = obj(PosetRep::constant(p.clone(), Q));
    let sc = obj(PosetRep::simple(p.clone(), Q, 0));
    assert!(b.member_leq(&sc, 0).unwrap());
    assert!(b.member_geq(&k, 1).unwrap());
    let (low, _) = b.beta_leq(&k, 0).unwrap();
    assert!(low.is_acyclic());
    let (up, unit) = b.beta_geq(&k, 1).unwrap();
    assert!(unit.is_quasi_iso());
    assert_eq!(up.cohomology_dims(0), vec![1, 1]);
    let (low, counit) = b.beta_leq(&sc, 0).unwrap();
    assert!(counit.is_quasi_iso());
    assert_eq!(low.cohomology_dims(0), vec![1, 0]);
    let t = b.truncation_triangle(&k, 0).unwrap();
    assert!(t.is_distinguished());
}

#[test]
fn corrupted_levels_are_rejected() {
    let p = Arc::new(StratPoset::chain(&["c", "o"], &[1, 0]).unwrap());
    assert!(LevelRealization::support(p).is_err());
}

#[test]
fn exceptional_truncation_of_the_constant_sheaf() {
    let p = Arc::new(StratPoset::chain(&["c", "o"], &[0, 0]).unwrap());
    let so = obj(PosetRep::simple(p.clone(), Q, 1));
    let sc = obj(PosetRep::simple(p.clone(), Q, 0));
    let k = obj(PosetRep::constant(p.clone(), Q));
    let e = ExceptionalSet::new(vec![so.clone(), sc], vec![Some(so), Some(k.clone())]).unwrap();
    assert!(e.exceptional_witness().is_none());
    let b = BaricRealization::Exceptional(e);
    let t = b.truncate(&k, 0).unwrap();
    assert_eq!(t.lower().cohomology_dims(0), vec![0, 1]);
    assert_eq!(t.upper().cohomology_dims(0), vec![1, 0]);
    assert!(t.triangle.is_distinguished());
    assert!(b.member_leq(&k, 1).unwrap());
    assert!(!b.member_leq(&k, 0).unwrap());
}

#[test]
fn graded_tensor_and_dual() {
    let l = LevelRealization::graded(8);
    let a = l.graded_line(Q, 2, 0).unwrap();
    let b = l.graded_line(Q, 3, 1).unwrap();
    let t = graded_tensor(&l, &a, &b).unwrap();
    let five = l.weight_element(5).unwrap();
    assert_eq!(t.range(), Some((1, 1)));
    assert_eq!(t.dim(1, five), 1);
    let d = graded_dual(&l, &b).unwrap();
    assert_eq!(d.range(), Some((-1, -1)));
    assert_eq!(d.dim(-1, l.weight_element(-3).unwrap()), 1);
}
