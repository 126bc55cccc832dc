//! Named instances and seeded random objects.
//!
//! Case `i` of a run with master seed `s` uses the generator seeded by
//! `splitmix64(s + i)`, so any single case can be replayed on its own.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baric::{BaricRealization, ExceptionalSet, Flavor, LevelRealization};
use crate::derivedcat::Complex;
use crate::error::{Error, Result};
use crate::exactlinalg::{Field, Matrix};
use crate::posetrep::{hom_basis, image, PosetRep, RepMap, StratPoset};

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn case_seed(master: u64, i: usize) -> u64 {
    splitmix64(master.wrapping_add(i as u64))
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An object under test, with the seed that produced it when fuzzed.
#[derive(Clone, Debug)]
pub struct Case {
    pub seed: Option<u64>,
    pub x: Complex,
}

impl Case {
    pub fn fixed(x: Complex) -> Self {
        Case { seed: None, x }
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub poset: Arc<StratPoset>,
    pub field: Field,
    pub baric: BaricRealization,
}

pub const INSTANCE_NAMES: [&str; 6] = ["p1_poset", "three_strata", "diamond", "five_strata", "graded_point", "a2_exceptional"];

/// Weight window of the graded instance.
pub const GRADED_WINDOW: i64 = 12;

pub fn instance(name: &str, field: Field) -> Result<Instance> {
    let support = |p: StratPoset| -> Result<Instance> {
        let p = Arc::new(p);
        Ok(Instance {
            name: name.to_string(),
            poset: p.clone(),
            field,
            baric: BaricRealization::Level(LevelRealization::support(p)?),
        })
    };
    match name {
        "p1_poset" => support(StratPoset::chain(&["c", "o"], &[0, 1])?),
        "three_strata" => support(StratPoset::chain(&["s0", "s1", "s2"], &[0, 1, 2])?),
        "diamond" => support(StratPoset::from_names(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")],
            &[0, 1, 1, 2],
        )?),
        "five_strata" => support(StratPoset::from_names(
            &["a", "b", "c", "d", "e"],
            &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d"), ("c", "e")],
            &[0, 1, 1, 2, 2],
        )?),
        "graded_point" => {
            let l = LevelRealization::graded(GRADED_WINDOW);
            Ok(Instance { name: name.into(), poset: l.poset().clone(), field, baric: BaricRealization::Level(l) })
        }
        "a2_exceptional" => {
            let p = Arc::new(StratPoset::chain(&["c", "o"], &[0, 0])?);
            let one = |f: PosetRep| Complex::from_rep(&f, 0);
            let so = one(PosetRep::simple(p.clone(), field, 1));
            let sc = one(PosetRep::simple(p.clone(), field, 0));
            let k = one(PosetRep::constant(p.clone(), field));
            let e = ExceptionalSet::new(vec![so.clone(), sc], vec![Some(so), Some(k)])?;
            Ok(Instance { name: name.into(), poset: p, field, baric: BaricRealization::Exceptional(e) })
        }
        _ => Err(Error::Unsupported(format!("unknown instance {name}"))),
    }
}

/// Size bounds for random objects.
#[derive(Clone, Copy, Debug)]
pub struct Bounds {
    pub max_dim: usize,
    pub lo_degree: i64,
    pub hi_degree: i64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_dim: 3, lo_degree: -2, hi_degree: 1 }
    }
}

fn scalar(rng: &mut ChaCha8Rng, field: Field) -> crate::exactlinalg::Scalar {
    field.int(rng.gen_range(-2..=2))
}

fn nonzero_scalar(rng: &mut ChaCha8Rng, field: Field) -> crate::exactlinalg::Scalar {
    loop {
        let s = scalar(rng, field);
        if !s.is_zero() {
            return s;
        }
    }
}

/// The image of a random map from a sum of projectives to a sum of injectives.
pub fn random_rep(rng: &mut ChaCha8Rng, poset: &Arc<StratPoset>, field: Field, max_dim: usize) -> PosetRep {
    let n = poset.len();
    let np = rng.gen_range(1..=max_dim.max(1));
    let ni = rng.gen_range(1..=max_dim.max(1));
    let ps: Vec<usize> = (0..np).map(|_| rng.gen_range(0..n)).collect();
    let is: Vec<usize> = (0..ni).map(|_| rng.gen_range(0..n)).collect();
    let mut coef = vec![vec![field.zero(); np]; ni];
    for (j, &y) in is.iter().enumerate() {
        for (i, &x) in ps.iter().enumerate() {
            if poset.leq(x, y) && rng.gen_bool(0.8) {
                coef[j][i] = scalar(rng, field);
            }
        }
    }
    let parts: Vec<PosetRep> = ps.iter().map(|&x| PosetRep::projective(poset.clone(), field, x)).collect();
    let src = PosetRep::direct_sum(&parts.iter().collect::<Vec<_>>()).expect("same poset");
    let tgt = PosetRep::injective_sum(poset.clone(), field, &is);
    let comps = (0..n)
        .map(|z| {
            let rows: Vec<usize> = (0..ni).filter(|&j| poset.leq(z, is[j])).collect();
            let cols: Vec<usize> = (0..np).filter(|&i| poset.leq(ps[i], z)).collect();
            let mut m = Matrix::zeros(field, rows.len(), cols.len());
            for (r, &j) in rows.iter().enumerate() {
                for (c, &i) in cols.iter().enumerate() {
                    m.set(r, c, &coef[j][i]);
                }
            }
            m
        })
        .collect();
    let f = RepMap::new(&src, &tgt, comps).expect("maps between projectives and injectives commute");
    image(&f, &tgt).0
}

fn random_map(rng: &mut ChaCha8Rng, m: &PosetRep, n: &PosetRep) -> RepMap {
    let field = m.field();
    let basis = hom_basis(m, n).expect("same poset");
    let mut f = RepMap::zero(m, n);
    for b in basis {
        f = f.add(&b.scale(&scalar(rng, field)));
    }
    f
}

fn graded_rep(rng: &mut ChaCha8Rng, l: &LevelRealization, field: Field, max_dim: usize) -> PosetRep {
    let p = l.poset().clone();
    let mut dims = vec![0; p.len()];
    let k = rng.gen_range(1..=2);
    for _ in 0..k {
        let w = rng.gen_range(-3..=3);
        let e = l.weight_element(w).expect("window contains small weights");
        dims[e] = (dims[e] + rng.gen_range(1..=max_dim.max(1))).min(max_dim);
    }
    PosetRep::new(p, field, dims, vec![]).expect("discrete poset")
}

fn random_piece(rng: &mut ChaCha8Rng, inst: &Instance, b: &Bounds) -> Complex {
    let field = inst.field;
    let p = &inst.poset;
    let graded = matches!(&inst.baric, BaricRealization::Level(l) if l.flavor() == Flavor::Graded);
    let d = rng.gen_range(b.lo_degree..=b.hi_degree);
    if graded && rng.gen_bool(0.4) {
        // a line in its heart degree
        let l = inst.baric.as_level().unwrap();
        let w = rng.gen_range(-3..=3);
        return l.graded_line(field, w, -w).unwrap();
    }
    let rep = |rng: &mut ChaCha8Rng| match inst.baric.as_level() {
        Some(l) if l.flavor() == Flavor::Graded => graded_rep(rng, l, field, b.max_dim),
        _ => match rng.gen_range(0..5) {
            0 => PosetRep::simple(p.clone(), field, rng.gen_range(0..p.len())),
            1 => PosetRep::injective(p.clone(), field, rng.gen_range(0..p.len())),
            2 => PosetRep::projective(p.clone(), field, rng.gen_range(0..p.len())),
            _ => random_rep(rng, p, field, b.max_dim),
        },
    };
    let m = rep(rng);
    if rng.gen_bool(0.5) || d >= b.hi_degree {
        return Complex::from_rep(&m, d);
    }
    let n = rep(rng);
    let f = random_map(rng, &m, &n);
    Complex::new(p.clone(), field, d, vec![m, n], vec![f]).expect("two-term complex")
}

fn within(x: &Complex, max_dim: usize) -> bool {
    match x.range() {
        None => true,
        Some((a, b)) => (a..=b).all(|n| x.dims(n).iter().all(|&d| d <= max_dim)),
    }
}

/// A direct sum of one to three random pieces with every stalk of dimension at most `max_dim`.
pub fn random_complex(rng: &mut ChaCha8Rng, inst: &Instance, b: &Bounds) -> Complex {
    let k = rng.gen_range(1..=3);
    let mut acc = random_piece(rng, inst, b);
    while !within(&acc, b.max_dim) {
        acc = random_piece(rng, inst, b);
    }
    for _ in 1..k {
        let piece = random_piece(rng, inst, b);
        let sum = Complex::direct_sum(&[&acc, &piece]).expect("same poset");
        if within(&sum, b.max_dim) {
            acc = sum;
        }
    }
    acc
}

pub fn random_nonzero_scalar(rng: &mut ChaCha8Rng, field: Field) -> crate::exactlinalg::Scalar {
    nonzero_scalar(rng, field)
}

/// `count` cases for `inst`, case `i` seeded by [`case_seed`].
pub fn sample(inst: &Instance, master: u64, count: usize, b: &Bounds) -> Vec<Case> {
    (0..count)
        .map(|i| {
            let seed = case_seed(master, i);
            let mut rng = rng_for(seed);
            Case { seed: Some(seed), x: random_complex(&mut rng, inst, b) }
        })
        .collect()
}
