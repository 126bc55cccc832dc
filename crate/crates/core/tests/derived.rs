use std::sync::Arc;

use baric_core::derivedcat::{ext_dim, hom_dim, resolve, Complex};
use baric_core::exactlinalg::Field;
use baric_core::posetrep::{injective_resolution, PosetRep, StratPoset};

fn chain() -> Arc<StratPoset> {
    Arc::new(StratPoset::chain(&["c", "o"], &[0, 0]).unwrap())
}

fn obj(f: PosetRep) -> Complex {
    Complex::from_rep(&f, 0)
}

#[test]
fn homs_on_the_chain() {
    let p = chain();
    let q = Field::Rational;
    let k = obj(PosetRep::constant(p.clone(), q));
    let sc = obj(PosetRep::simple(p.clone(), q, 0));
    let so = obj(PosetRep::simple(p.clone(), q, 1));
    assert_eq!(hom_dim(&k, &sc), 1);
    assert_eq!(hom_dim(&sc, &k), 0);
    assert_eq!(hom_dim(&so, &k), 1);
    assert_eq!(hom_dim(&k, &so), 0);
    assert_eq!(ext_dim(&sc, &so, 1), 1);
    for n in -2..3 {
        assert_eq!(ext_dim(&so, &sc, n), 0);
    }
    assert_eq!(ext_dim(&k, &k, 0), 1);
    assert_eq!(ext_dim(&k, &k, 1), 0);
}

#[test]
fn injective_resolution_of_open_simple() {
    let p = chain();
    let so = PosetRep::simple(p.clone(), Field::Rational, 1);
    let r = injective_resolution(&so);
    assert_eq!(r.range(), Some((0, 1)));
    assert_eq!(r.tags(0).unwrap(), &[1]);
    assert_eq!(r.tags(1).unwrap(), &[0]);
    let res = resolve(&Complex::from_rep(&so, 0));
    assert!(res.aug.is_quasi_iso());
}
