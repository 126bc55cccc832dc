use std::sync::Arc;

use rand::Rng;

use super::fuzz::{rng_for, splitmix64, Case};
use super::{levels_around, model, once, per_case, Report, Witness};
use crate::baric::{ext_window, graded_dual, graded_tensor, BaricRealization, ExceptionalSet, Flavor, LevelRealization};
use crate::derivedcat::{
    ext_dim, factor_post, factor_post_homotopy, factor_pre, hom_dim, ChainMap, Complex, HomComplex,
};
use crate::error::Result;
use crate::exactlinalg::Matrix;
use crate::exec::Executor;
use crate::serial::complex_to_json;
use crate::staggering::StaggerContext;

fn all_zero_ext(a: &Complex, b: &Complex) -> bool {
    let (lo, hi) = ext_window(a, b);
    (lo..=hi).all(|k| ext_dim(a, b, k) == 0)
}

const AXIOM_IDS: [&str; 5] =
    ["baric.inclusions", "baric.levels_closed", "baric.orthogonality", "baric.thick", "baric.triangle"];

/// Inclusions, orthogonality, truncation triangles and thickness.
pub fn verify_baric_axioms(b: &BaricRealization, sample: &[Case], exec: Executor) -> Report {
    let mut rep = once(&["baric.levels_closed"], |r| match b {
        BaricRealization::Level(l) => {
            let mut ws = l.levels().to_vec();
            ws.sort();
            ws.dedup();
            for w in ws {
                let closed = l.poset().is_down_closed(&l.lower_set(w));
                r.check("baric.levels_closed", Ok(closed), || Witness::new(format!("level set {w} is not down-closed")));
            }
        }
        BaricRealization::Exceptional(e) => {
            let wit = e.exceptional_witness();
            r.check("baric.levels_closed", Ok(wit.is_none()), || {
                let (w, k, d) = wit.unwrap();
                Witness::new(format!("Ext^{k}(∇^{w}, ∇^{w}) has dimension {d}")).object("nabla", e.nabla(w))
            });
        }
    });
    let n = sample.len();
    rep.extend(per_case(exec, sample, &AXIOM_IDS[..], |i, case, r| {
        let x = &case.x;
        let y = &sample[(i + 1) % n].x;
        let j = model(x);
        let jy = model(y);
        let wit = |note: String| Witness::new(note).object("x", x);
        for w in levels_around(b, &j) {
            let inc = (|| -> Result<bool> {
                let ok = (!b.member_leq(&j, w)? || b.member_leq(&j, w + 1)?)
                    && (!b.member_geq(&j, w + 1)? || b.member_geq(&j, w)?)
                    && b.member_leq(&j, w)? == b.member_leq(&j.shift(1), w)?
                    && b.member_geq(&j, w)? == b.member_geq(&j.shift(-1), w)?;
                Ok(ok)
            })();
            r.check("baric.inclusions", inc, || wit(format!("inclusion or shift stability fails at {w}")));
            let t = b.truncate(&j, w);
            let tri = t.as_ref().map_err(Clone::clone).and_then(|t| {
                Ok(t.triangle.is_distinguished() && b.member_leq(t.lower(), w)? && b.member_geq(t.upper(), w + 1)?)
            });
            r.check("baric.triangle", tri, || wit(format!("truncation triangle at {w}")));
            let orth = t.as_ref().map_err(Clone::clone).and_then(|t| {
                let ty = b.truncate(&jy, w)?;
                Ok(all_zero_ext(t.lower(), t.upper()) && all_zero_ext(t.lower(), ty.upper()))
            });
            r.check("baric.orthogonality", orth, || wit(format!("Hom(β_(<={w}), β_(>={})) ≠ 0", w + 1)).object("y", y));
            let thick = (|| -> Result<bool> {
                let s = Complex::direct_sum(&[&j, &jy])?;
                let ok = (!b.member_leq(&s, w)? || (b.member_leq(&j, w)? && b.member_leq(&jy, w)?))
                    && (!b.member_geq(&s, w)? || (b.member_geq(&j, w)? && b.member_geq(&jy, w)?));
                Ok(ok)
            })();
            r.check("baric.thick", thick, || wit(format!("a summand leaves the subcategory at {w}")).object("y", y));
        }
    }));
    rep.sorted()
}

const IDENTITY_IDS: [&str; 7] = [
    "trunc.commute",
    "trunc.exact_functor",
    "trunc.geq_geq",
    "trunc.geq_leq_zero",
    "trunc.leq_geq_zero",
    "trunc.leq_leq",
    "trunc.unique_triangle",
];

/// A random degree-0 chain map between injective models.
pub(crate) fn random_chain_map(seed: u64, jx: &Complex, jy: &Complex) -> ChainMap {
    let mut rng = rng_for(seed);
    let h = HomComplex::new(jx, jy);
    let mut f = ChainMap::zero(jx, jy);
    for m in h.basis_maps(0) {
        let c = jx.field().int(rng.gen_range(-2..=2));
        f = f.add(&m.retarget(jx, jy).scale(&c));
    }
    f
}

/// `β_{≤w}` of the cone of `f` agrees with the cone of `β_{≤w}f`.
fn exact_functor_holds(b: &BaricRealization, f: &ChainMap, w: i64) -> Result<bool> {
    let (jx, jy) = (f.source(), f.target());
    let (z, _) = f.cone();
    let (lx, ex) = b.beta_leq(jx, w)?;
    let (_, ey) = b.beta_leq(jy, w)?;
    let (_, ez) = b.beta_leq(&z, w)?;
    let c = f.compose(&ex);
    let Some((m, s)) = factor_post_homotopy(&c, &ey) else { return Ok(false) };
    let (cm, _) = m.cone();
    let field = jx.field();
    let phi = ChainMap::from_fn(&cm, &z, |n, y| {
        let mut out = Matrix::zeros(field, z.dim(n, y), cm.dim(n, y));
        let (xa, xb) = (jx.dim(n + 1, y), lx.dim(n + 1, y));
        out.set_block(0, 0, &ex.at(n + 1, y));
        out.set_block(xa, 0, &s.at(&lx, jy, n + 1, y));
        out.set_block(xa, xb, &ey.at(n, y));
        out
    });
    Ok(factor_post(&phi, &ez).is_some_and(|psi| psi.is_quasi_iso()))
}

/// The comparison maps between composites of truncations.
pub fn verify_truncation_identities(b: &BaricRealization, sample: &[Case], exec: Executor) -> Report {
    let n = sample.len();
    per_case(exec, sample, &IDENTITY_IDS[..], |i, case, r| {
        let x = &case.x;
        let j = model(x);
        let wit = |note: String| Witness::new(note).object("x", x);
        let ks = levels_around(b, &j);
        for (a, &v) in ks.iter().enumerate() {
            for &w in &ks[a..] {
                let leq_leq = (|| -> Result<bool> {
                    let (lw, ew) = b.beta_leq(&j, w)?;
                    let (_, evw) = b.beta_leq(&lw, v)?;
                    let (_, ev) = b.beta_leq(&j, v)?;
                    Ok(factor_post(&ew.compose(&evw), &ev).is_some_and(|m| m.is_quasi_iso()))
                })();
                r.check("trunc.leq_leq", leq_leq, || wit(format!("β_(<={v})β_(<={w}) vs β_(<={v})")));
                let geq_geq = (|| -> Result<bool> {
                    let (uv, hv) = b.beta_geq(&j, v)?;
                    let (_, hwv) = b.beta_geq(&uv, w)?;
                    let (_, hw) = b.beta_geq(&j, w)?;
                    Ok(factor_pre(&hwv.compose(&hv), &hw).is_some_and(|m| m.is_quasi_iso()))
                })();
                r.check("trunc.geq_geq", geq_geq, || wit(format!("β_(>={w})β_(>={v}) vs β_(>={w})")));
                let commute = (|| -> Result<bool> {
                    let (lw, ew) = b.beta_leq(&j, w)?;
                    let (uv, hv) = b.beta_geq(&j, v)?;
                    let (_, eta) = b.beta_geq(&lw, v)?;
                    let (_, eps) = b.beta_leq(&uv, w)?;
                    let Some(m) = factor_post(&hv.compose(&ew), &eps) else { return Ok(false) };
                    Ok(factor_pre(&m, &eta).is_some_and(|phi| phi.is_quasi_iso()))
                })();
                r.check("trunc.commute", commute, || wit(format!("β_(>={v})β_(<={w}) vs β_(<={w})β_(>={v})")));
                if v < w {
                    let lg = (|| -> Result<bool> {
                        let (uw, _) = b.beta_geq(&j, w)?;
                        Ok(b.beta_leq(&uw, v)?.0.is_acyclic())
                    })();
                    r.check("trunc.leq_geq_zero", lg, || wit(format!("β_(<={v})β_(>={w}) ≠ 0")));
                    let gl = (|| -> Result<bool> {
                        let (lv, _) = b.beta_leq(&j, v)?;
                        Ok(b.beta_geq(&lv, w)?.0.is_acyclic())
                    })();
                    r.check("trunc.geq_leq_zero", gl, || wit(format!("β_(>={w})β_(<={v}) ≠ 0")));
                }
            }
        }
        let jy = model(&sample[(i + 1) % n].x);
        let f = random_chain_map(splitmix64(case.seed.unwrap_or(i as u64) ^ 0x5eed), &j, &jy);
        for &w in &ks {
            let unique = (|| -> Result<bool> {
                let (_, ew) = b.beta_leq(&j, w)?;
                let (_, h) = b.beta_geq(&j, w + 1)?;
                let cocone = crate::derivedcat::Triangle::from_cocone(&h);
                Ok(factor_post(&ew, &cocone.first).is_some_and(|m| m.is_quasi_iso()))
            })();
            r.check("trunc.unique_triangle", unique, || wit(format!("cocone of the unit at {w}")));
            r.check("trunc.exact_functor", exact_functor_holds(b, &f, w), || {
                wit(format!("β_(<={w}) of a cone")).object("y", &jy)
            });
        }
    })
}

const PRED_IDS: [&str; 4] = ["pred.bounded", "pred.multiplicative", "pred.nondegenerate", "pred.self_dual"];

/// Boundedness, nondegeneracy, multiplicativity and (graded) self-duality.
pub fn check_predicates(b: &BaricRealization, sample: &[Case], exec: Executor) -> Report {
    let n = sample.len();
    per_case(exec, sample, &PRED_IDS[..], |i, case, r| {
        let x = &case.x;
        let y = &sample[(i + 1) % n].x;
        let wit = |note: &str| Witness::new(note).object("x", x);
        let iv = b.interval(x);
        let bounded = iv.clone().and_then(|iv| match iv {
            None => Ok(x.is_acyclic()),
            Some((lo, hi)) => Ok(b.member_leq(x, hi)? && b.member_geq(x, lo)?),
        });
        r.check("pred.bounded", bounded, || wit("no bounding interval"));
        let nondeg = iv.clone().and_then(|iv| match iv {
            None => Ok(true),
            Some((lo, hi)) => Ok(!b.member_leq(x, lo - 1)? && !b.member_geq(x, hi + 1)?),
        });
        r.check("pred.nondegenerate", nondeg, || wit("nonzero object in every level"));
        if matches!(b, BaricRealization::Level(_)) {
            let mult = (|| -> Result<bool> {
                let (Some((_, h1)), Some((_, h2))) = (b.interval(x)?, b.interval(y)?) else { return Ok(true) };
                let t = b.tensor(x, y)?;
                b.member_leq(&t, h1 + h2)
            })();
            r.check("pred.multiplicative", mult, || wit("tensor leaves D_(<=v+w)").object("y", y));
        }
        if let Some(l) = b.as_level().filter(|l| l.flavor() == Flavor::Graded) {
            let sd = (|| -> Result<bool> {
                let d = graded_dual(l, x)?;
                for w in levels_around(b, x) {
                    if b.member_leq(x, w)? != b.member_geq(&d, -w)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            })();
            r.check("pred.self_dual", sd, || wit("dual does not swap D_(<=w) and D_(>=-w)"));
        }
    })
}

/// The exceptional-set axioms over the full degree window.
pub fn verify_exceptional_axioms(e: &ExceptionalSet) -> Report {
    let ids = [
        "exceptional.delta_iso",
        "exceptional.delta_vanishing",
        "exceptional.endomorphisms",
        "exceptional.ext_vanishing",
        "exceptional.fully_exceptional",
    ];
    let real = BaricRealization::Exceptional(e.clone());
    once(&ids, |r| {
        let n = e.len();
        for v in 0..n {
            for w in v + 1..n {
                let (a, c) = (e.nabla(v), e.nabla(w));
                let (lo, hi) = ext_window(a, c);
                for k in lo..=hi {
                    let d = ext_dim(a, c, k);
                    r.check("exceptional.ext_vanishing", Ok(d == 0), || {
                        Witness::new(format!("Hom(∇^{v}, ∇^{w}[{k}]) has dimension {d}"))
                            .object("nabla_v", a)
                            .object("nabla_w", c)
                    });
                }
            }
        }
        for w in 0..n {
            let d = hom_dim(e.nabla(w), e.nabla(w));
            r.check("exceptional.endomorphisms", Ok(d == 1), || {
                Witness::new(format!("End(∇^{w}) has dimension {d}")).object("nabla", e.nabla(w))
            });
        }
        let wit = e.exceptional_witness();
        r.check("exceptional.fully_exceptional", Ok(wit.is_none()), || {
            let (w, k, d) = wit.unwrap();
            Witness::new(format!("Ext^{k}(∇^{w}, ∇^{w}) has dimension {d}")).object("nabla", e.nabla(w))
        });
        for v in 0..n {
            let Some(dv) = e.delta(v) else { continue };
            for w in 0..v {
                let c = e.nabla(w);
                let (lo, hi) = ext_window(dv, c);
                for k in lo..=hi {
                    let d = ext_dim(dv, c, k);
                    r.check("exceptional.delta_vanishing", Ok(d == 0), || {
                        Witness::new(format!("Hom(Δ_{v}, ∇^{w}[{k}]) has dimension {d}"))
                            .object("delta", dv)
                            .object("nabla", c)
                    });
                }
            }
        }
        for w in 0..n {
            let Some(dw) = e.delta(w) else { continue };
            let nw = model(e.nabla(w));
            let res = (|| -> Result<bool> {
                let h = HomComplex::new(dw, &nw);
                let Some(f) = h.basis_maps(0).into_iter().next() else { return Ok(false) };
                let (c, _) = f.cone();
                real.member_leq(&c, w as i64 - 1)
            })();
            r.check("exceptional.delta_iso", res, || {
                Witness::new(format!("cone(Δ_{w} → ∇^{w}) is not in D_(<={})", w as i64 - 1))
                    .object("delta", dw)
                    .object("nabla", e.nabla(w))
            });
        }
    })
}

/// Membership through the open and closed pieces, and the induced structures.
pub fn verify_gluing(l: &LevelRealization, z: &[bool], sample: &[Case], exec: Executor) -> Report {
    let ids = ["gluing.geq", "gluing.induced", "gluing.leq"];
    let p = l.poset().clone();
    if !p.is_down_closed(z) {
        return once(&ids, |r| {
            r.check("gluing.induced", Err(crate::error::Error::BadSubset("down-closed")), || Witness::new("Z"))
        });
    }
    let u: Vec<bool> = z.iter().map(|&b| !b).collect();
    let piece = |set: &[bool]| {
        let (sp, emb) = p.subposet(set);
        let sp = Arc::new(sp);
        let levels = emb.iter().map(|&y| l.levels()[y]).collect();
        (BaricRealization::Level(LevelRealization::new_unchecked(l.flavor(), sp.clone(), levels)), sp, emb)
    };
    let (zb, zp, zemb) = piece(z);
    let (ub, up, uemb) = piece(&u);
    let whole = BaricRealization::Level(l.clone());
    let mut rep = per_case(exec, sample, &ids, |_, case, r| {
        let x = &case.x;
        let j = model(x);
        let wit = |note: String| Witness::new(note).object("x", x);
        for w in levels_around(&whole, &j) {
            let leq = (|| -> Result<bool> {
                let lhs = whole.member_leq(&j, w)?;
                let on_u = uemb.is_empty() || ub.member_leq(&j.restrict(&up, &uemb), w)?;
                let on_z = zemb.is_empty() || zb.member_leq(&j.restrict(&zp, &zemb), w)?;
                Ok(lhs == (on_u && on_z))
            })();
            r.check("gluing.leq", leq, || wit(format!("D_(<={w}) through j^* and i^*")));
            let geq = (|| -> Result<bool> {
                let lhs = whole.member_geq(&j, w)?;
                let on_u = uemb.is_empty() || ub.member_geq(&j.restrict(&up, &uemb), w)?;
                let shriek = crate::baric::split_tagged(&j, &|t| z[t]).a().clone();
                let on_z = zemb.is_empty() || zb.member_geq(&shriek.restrict(&zp, &zemb), w)?;
                Ok(lhs == (on_u && on_z))
            })();
            r.check("gluing.geq", geq, || wit(format!("D_(>={w}) through j^* and i^!")));
        }
    });
    let sub = |b: &BaricRealization, sp: &Arc<crate::posetrep::StratPoset>, emb: &[usize]| -> Report {
        let cases: Vec<Case> = sample
            .iter()
            .take(20)
            .map(|c| Case { seed: c.seed, x: model(&c.x).restrict(sp, emb) })
            .collect();
        let mut r = verify_baric_axioms(b, &cases, exec);
        r.extend(verify_truncation_identities(b, &cases, exec));
        r
    };
    rep.extend(once(&ids[1..2], |r| {
        for (b, sp, emb, name) in [(&zb, &zp, &zemb, "closed"), (&ub, &up, &uemb, "open")] {
            if emb.is_empty() {
                continue;
            }
            let inner = sub(b, sp, emb);
            let failed = inner.checks.iter().find(|c| !c.passed).map(|c| c.id.clone());
            r.check("gluing.induced", Ok(failed.is_none()), || {
                Witness::new(format!("induced structure on the {name} part fails {}", failed.clone().unwrap_or_default()))
            });
        }
    }));
    rep.sorted()
}

/// Weights add under convolution; the dual swaps the baric and staggered halves.
pub fn verify_mult_duality(l: &LevelRealization, sample: &[Case], exec: Executor) -> Report {
    let ids = ["duality.baric", "duality.double", "duality.staggered", "mult.pure_lines", "mult.sample_pairs"];
    let b = BaricRealization::Level(l.clone());
    let field = sample.first().map(|c| c.x.field()).unwrap_or(crate::exactlinalg::Field::Rational);
    let mut rep = once(&ids, |r| {
        for a in -6..=6 {
            for c in -6..=6 {
                for d1 in -1..=1 {
                    for d2 in -1..=1 {
                        let res = (|| -> Result<bool> {
                            let x = l.graded_line(field, a, d1)?;
                            let y = l.graded_line(field, c, d2)?;
                            let t = graded_tensor(l, &x, &y)?;
                            let e = l.weight_element(a + c).unwrap();
                            let dims = t.cohomology_dims(d1 + d2);
                            let pure = t.cohomology_degrees() == vec![d1 + d2]
                                && (0..dims.len()).all(|k| dims[k] == usize::from(k == e));
                            Ok(pure && b.interval(&t)? == Some((a + c, a + c)))
                        })();
                        r.check("mult.pure_lines", res, || {
                            Witness::new(format!("line({a}, {d1}) ⊗ line({c}, {d2}) is not a line of weight {}", a + c))
                        });
                    }
                }
            }
        }
    });
    let ctx = StaggerContext::trusted(b.clone());
    let n = sample.len();
    rep.extend(per_case(exec, sample, &ids, |i, case, r| {
        let x = &case.x;
        let y = &sample[(i + 1) % n].x;
        let wit = |note: &str| Witness::new(note).object("x", x);
        let pairs = (|| -> Result<bool> {
            let (Some((a1, b1)), Some((a2, b2))) = (b.interval(x)?, b.interval(y)?) else { return Ok(true) };
            let t = graded_tensor(l, x, y)?;
            Ok(b.member_leq(&t, b1 + b2)? && b.member_geq(&t, a1 + a2)?)
        })();
        r.check("mult.sample_pairs", pairs, || wit("weights do not add").object("y", y));
        let d = graded_dual(l, x);
        let bar = d.clone().and_then(|d| {
            for w in levels_around(&b, x) {
                if b.member_leq(x, w)? != b.member_geq(&d, -w)? || b.member_geq(x, w)? != b.member_leq(&d, -w)? {
                    return Ok(false);
                }
            }
            Ok(true)
        });
        r.check("duality.baric", bar, || wit("dual does not swap the baric halves"));
        let dd = d.clone().and_then(|d| Ok(complex_to_json(&graded_dual(l, &d)?) == complex_to_json(x)));
        r.check("duality.double", dd, || wit("double dual differs"));
        let st = d.and_then(|d| {
            Ok(ctx.in_sd_leq(x, 0)? == ctx.in_sd_geq(&d, 0)? && ctx.in_sd_geq(x, 0)? == ctx.in_sd_leq(&d, 0)?)
        });
        r.check("duality.staggered", st, || wit("dual does not swap the staggered halves"));
    }));
    rep.sorted()
}
