use std::sync::Arc;

use proptest::prelude::*;

use baric_core::baric::{ext_window, graded_dual, BaricRealization};
use baric_core::derivedcat::{ext_dim, resolve, truncate_std, ChainMap, Complex, Dir, HomComplex};
use baric_core::exactlinalg::{kernel_basis, rank, solve_linear, Field, Matrix, Scalar};
use baric_core::posetrep::{
    cokernel, hom_basis, image, kernel, max_subobject_in_support, PosetRep, StratPoset,
};
use baric_core::serial::{complex_from_json, complex_to_json};
use baric_core::staggering::{graded_heart_oracle, StaggerContext};
use baric_core::verify::fuzz::{self, random_complex, random_rep, rng_for, Instance};
use baric_core::verify::Bounds;

fn field_strategy() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::Rational), Just(Field::Prime(5)), Just(Field::Prime(7))]
}

fn matrix(field: Field, rows: usize, cols: usize, entries: &[i64]) -> Matrix {
    Matrix::from_i64(field, rows, cols, &entries[..rows * cols])
}

fn instance_strategy() -> impl Strategy<Value = Instance> {
    (prop::sample::select(fuzz::INSTANCE_NAMES.to_vec()), field_strategy())
        .prop_map(|(n, f)| fuzz::instance(n, f).unwrap())
}

fn level_instance_strategy() -> impl Strategy<Value = Instance> {
    instance_strategy().prop_filter("level realization", |i| i.baric.as_level().is_some())
}

fn object(inst: &Instance, seed: u64) -> Complex {
    random_complex(&mut rng_for(seed), inst, &Bounds::default())
}

fn five() -> Arc<StratPoset> {
    fuzz::instance("five_strata", Field::Rational).unwrap().poset
}

fn a_random_map(seed: u64, x: &Complex, y: &Complex) -> ChainMap {
    let j = resolve(y).model;
    let h = HomComplex::new(x, &j);
    let mut f = ChainMap::zero(x, &j);
    for (i, m) in h.basis_maps(0).into_iter().enumerate() {
        let c = (seed.rotate_left(i as u32 * 7) % 5) as i64 - 2;
        f = f.add(&m.scale(&x.field().int(c)));
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn planted_solutions_are_found(
        field in field_strategy(), r in 1usize..6, c in 1usize..6,
        a in prop::collection::vec(-4i64..=4, 36), x in prop::collection::vec(-4i64..=4, 6),
    ) {
        let m = matrix(field, r, c, &a);
        let x0: Vec<Scalar> = x[..c].iter().map(|&v| field.int(v)).collect();
        let b = m.mul_vec(&x0);
        let sol = solve_linear(&m, &b).expect("planted solution exists");
        prop_assert_eq!(m.mul_vec(&sol), b);
    }

    #[test]
    fn rank_plus_nullity_is_cols(
        field in field_strategy(), r in 0usize..6, c in 0usize..6, a in prop::collection::vec(-4i64..=4, 36),
    ) {
        let m = matrix(field, r, c, &a);
        let k = kernel_basis(&m);
        prop_assert_eq!(rank(&m) + k.len(), c);
        for v in &k {
            prop_assert!(m.mul_vec(v).iter().all(Scalar::is_zero));
        }
        prop_assert_eq!(kernel_basis(&m), k);
    }

    #[test]
    fn yoneda_dimensions(seed in any::<u64>(), field in field_strategy()) {
        let p = five();
        let f = random_rep(&mut rng_for(seed), &p, field, 3);
        for x in 0..p.len() {
            prop_assert_eq!(hom_basis(&f, &PosetRep::injective(p.clone(), field, x)).unwrap().len(), f.dim(x));
            prop_assert_eq!(hom_basis(&PosetRep::projective(p.clone(), field, x), &f).unwrap().len(), f.dim(x));
        }
    }

    #[test]
    fn kernel_image_cokernel_dimensions(seed in any::<u64>(), field in field_strategy()) {
        let p = five();
        let mut rng = rng_for(seed);
        let f = random_rep(&mut rng, &p, field, 3);
        let g = random_rep(&mut rng, &p, field, 3);
        let basis = hom_basis(&f, &g).unwrap();
        let mut m = baric_core::posetrep::RepMap::zero(&f, &g);
        for (i, b) in basis.iter().enumerate() {
            m = m.add(&b.scale(&field.int((seed >> (i % 60)) as i64 % 3 - 1)));
        }
        let (k, _) = kernel(&m, &f);
        let (im, _) = image(&m, &g);
        let (ck, _) = cokernel(&m, &g);
        for x in 0..p.len() {
            prop_assert_eq!(k.dim(x) + im.dim(x), f.dim(x));
            prop_assert_eq!(im.dim(x) + ck.dim(x), g.dim(x));
        }
    }

    #[test]
    fn support_reflection_is_adjoint(seed in any::<u64>(), field in field_strategy(), mask in 0u32..32) {
        let p = five();
        let t: Vec<bool> = (0..p.len()).map(|i| mask >> i & 1 == 1).collect();
        let mut rng = rng_for(seed);
        let f = random_rep(&mut rng, &p, field, 3);
        let (g, _) = max_subobject_in_support(&random_rep(&mut rng, &p, field, 3), &t);
        let (sf, _) = max_subobject_in_support(&f, &t);
        prop_assert_eq!(hom_basis(&g, &f).unwrap().len(), hom_basis(&g, &sf).unwrap().len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cone_triangles_have_long_exact_sequences(inst in instance_strategy(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let x = object(&inst, s1);
        let y = object(&inst, s2);
        let f = a_random_map(s1 ^ s2, &x, &y);
        let (_, t) = f.cone();
        prop_assert!(t.long_exact_holds());
        prop_assert!(t.is_distinguished());
    }

    #[test]
    fn ext_is_invariant_under_resolution(inst in instance_strategy(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let x = object(&inst, s1);
        let y = object(&inst, s2);
        let (jx, jy) = (resolve(&x).model, resolve(&y).model);
        let (lo, hi) = ext_window(&x, &y);
        for k in lo..=hi {
            let e = ext_dim(&x, &y, k);
            prop_assert_eq!(ext_dim(&jx, &y, k), e);
            prop_assert_eq!(ext_dim(&x, &jy, k), e);
        }
    }

    #[test]
    fn standard_truncations_are_orthogonal(inst in instance_strategy(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, _) = truncate_std(&object(&inst, s1), Dir::Leq, 0);
        let (b, _) = truncate_std(&object(&inst, s2), Dir::Geq, 1);
        prop_assert_eq!(ext_dim(&a, &b, 0), 0);
        let (lo, hi) = b.amplitude().unwrap_or((1, 1));
        prop_assert!(lo >= 1 && hi >= lo);
    }

    #[test]
    fn baric_halves_are_orthogonal(inst in instance_strategy(), s1 in any::<u64>(), s2 in any::<u64>(), w in -2i64..=3) {
        let b = &inst.baric;
        let (a, _) = b.beta_leq(&object(&inst, s1), w).unwrap();
        let (c, _) = b.beta_geq(&object(&inst, s2), w + 1).unwrap();
        let (lo, hi) = ext_window(&a, &c);
        for k in lo..=hi {
            prop_assert_eq!(ext_dim(&a, &c, k), 0);
        }
    }

    #[test]
    fn staggered_halves_shift_and_decompose(inst in level_instance_strategy(), seed in any::<u64>()) {
        let x = object(&inst, seed);
        let mut ctx = StaggerContext::new(inst.baric.clone());
        prop_assert!(ctx.certify(std::slice::from_ref(&x)).passed());
        if ctx.in_sd_leq(&x, 0).unwrap() {
            prop_assert!(ctx.in_sd_leq(&x, 1).unwrap());
        }
        if ctx.in_sd_geq(&x, 1).unwrap() {
            prop_assert!(ctx.in_sd_geq(&x, 0).unwrap());
        }
        let t = ctx.stag_decompose(&x).unwrap();
        prop_assert!(ctx.in_sd_leq(t.a(), 0).unwrap());
        prop_assert!(ctx.in_sd_geq(t.b(), 1).unwrap());
        prop_assert!(t.is_distinguished());
        prop_assert_eq!(ext_dim(t.a(), t.b(), 0), 0);
    }

    #[test]
    fn graded_duality_and_purity(field in field_strategy(), seed in any::<u64>()) {
        let inst = fuzz::instance("graded_point", field).unwrap();
        let BaricRealization::Level(l) = &inst.baric else { unreachable!() };
        let x = object(&inst, seed);
        let d = graded_dual(l, &x).unwrap();
        let mut ctx = StaggerContext::new(inst.baric.clone());
        prop_assert!(ctx.certify(&[x.clone(), d.clone()]).passed());
        prop_assert_eq!(ctx.in_sd_leq(&x, 0).unwrap(), ctx.in_sd_geq(&d, 0).unwrap());
        prop_assert_eq!(ctx.in_sd_geq(&x, 0).unwrap(), ctx.in_sd_leq(&d, 0).unwrap());
        prop_assert_eq!(ctx.in_heart(&x).unwrap(), graded_heart_oracle(l, &x));
        prop_assert_eq!(complex_to_json(&graded_dual(l, &d).unwrap()), complex_to_json(&x));
    }

    #[test]
    fn objects_round_trip_through_json(inst in instance_strategy(), seed in any::<u64>()) {
        let x = object(&inst, seed);
        let v = complex_to_json(&x);
        let y = complex_from_json(&v, &inst.poset, inst.field, "x").unwrap();
        prop_assert_eq!(complex_to_json(&y), v);
        prop_assert_eq!(complex_to_json(&object(&inst, seed)), complex_to_json(&x));
    }
}
