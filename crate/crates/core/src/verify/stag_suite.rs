use rand::Rng;

use super::fuzz::{rng_for, splitmix64, Case};
use super::{levels_around, model, once, per_case, Report, Witness};
use crate::baric::{ext_window, BaricRealization, Flavor};
use crate::derivedcat::{ext_dim, hom_dim, truncate_std, ChainMap, Complex, Dir, HomComplex};
use crate::error::Result;
use crate::exec::Executor;
use crate::posetrep::{cokernel, hom_basis, image, kernel, PosetRep, RepMap};
use crate::serial::complex_to_json;
use crate::staggering::StaggerContext;

fn std_geq(x: &Complex, m: i64) -> bool {
    x.amplitude().is_none_or(|(a, _)| a >= m)
}

fn deg0(f: &PosetRep) -> Complex {
    Complex::from_rep(f, 0)
}

/// Least `n` with `x ∈ ˢD^{≤n}`, from the cohomology intervals.
fn sd_leq_edge(b: &BaricRealization, x: &Complex) -> Result<Option<i64>> {
    let mut m: Option<i64> = None;
    for j in x.cohomology_degrees() {
        if let Some((_, hi)) = b.interval(&deg0(&x.cohomology(j)))? {
            m = Some(m.map_or(j + hi, |m| m.max(j + hi)));
        }
    }
    Ok(m)
}

/// Greatest `n` with `x ∈ ˢD^{≥n}`, from the lowest degree of each `β_{≤k}x`.
fn sd_geq_edge(b: &BaricRealization, x: &Complex) -> Result<Option<i64>> {
    let j = model(x);
    let mut m: Option<i64> = None;
    for k in b.cut_points(&j) {
        let (low, _) = b.beta_leq(&j, k)?;
        if let Some((a, _)) = low.amplitude() {
            m = Some(m.map_or(k + a, |m| m.min(k + a)));
        }
    }
    Ok(m)
}

/// A random class in `Hom(y, x[1])` as a map `y[-1] → J_x`, and its cone.
fn random_extension(seed: u64, x: &Complex, y: &Complex) -> Complex {
    let jx = model(x);
    let h = HomComplex::new(y, &jx);
    let mut rng = rng_for(seed);
    let src = y.shift(-1);
    let mut u = ChainMap::zero(&src, &jx);
    for m in h.basis_maps(1) {
        let c = x.field().int(rng.gen_range(-2..=2));
        u = u.add(&m.retarget(&src, &jx).scale(&c));
    }
    u.cone().0
}

fn random_rep_map(seed: u64, m: &PosetRep, n: &PosetRep) -> RepMap {
    let mut rng = rng_for(seed);
    let mut f = RepMap::zero(m, n);
    for g in hom_basis(m, n).expect("same poset") {
        f = f.add(&g.scale(&m.field().int(rng.gen_range(-2..=2))));
    }
    f
}

/// Simple objects of the standard heart lying in `D_{≤w}`, near the support of `b`.
fn simples_below(r: &BaricRealization, b: &Complex, w: i64) -> Vec<Complex> {
    let Some(l) = r.as_level() else { return vec![] };
    let p = l.poset();
    let supp = b.cohomology_support();
    (0..p.len())
        .filter(|&y| l.levels()[y] <= w)
        .filter(|&y| l.flavor() == Flavor::Support || supp[y])
        .map(|y| deg0(&PosetRep::simple(p.clone(), b.field(), y)))
        .collect()
}

const COMPAT_IDS: [&str; 11] = [
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

/// Consequences of compatibility for the baric and staggered subcategories.
pub fn verify_compat_suite(ctx: &StaggerContext, sample: &[Case], exec: Executor) -> Report {
    let b = ctx.baric();
    let n = sample.len();
    per_case(exec, sample, &COMPAT_IDS[..], |i, case, r| {
        let x = &case.x;
        let y = &sample[(i + 1) % n].x;
        let seed = case.seed.unwrap_or(i as u64);
        let j = model(x);
        let wit = |note: String| Witness::new(note).object("x", x);
        let ws = levels_around(b, &j);
        let hs: Vec<(i64, PosetRep)> = x.cohomology_degrees().into_iter().map(|k| (k, x.cohomology(k))).collect();

        for &w in &ws {
            let lth = (|| -> Result<bool> {
                let via_beta = b.truncate(&j, w)?.upper().is_acyclic();
                let mut via_h = true;
                for (_, h) in &hs {
                    via_h &= b.member_leq(&deg0(h), w)?;
                }
                Ok(via_beta == via_h)
            })();
            r.check("compat.cohomology_criterion", lth, || wit(format!("D_(<={w}) through cohomology")));
            let gth = (|| -> Result<bool> {
                let lhs = b.member_geq(&j, w)?;
                let Some((a, top)) = j.amplitude() else { return Ok(lhs) };
                let mut rhs = b.beta_leq(&j, w - 1)?.0.is_acyclic();
                for k in a - 1..top {
                    let (t, _) = truncate_std(&j, Dir::Leq, k);
                    rhs &= std_geq(&b.beta_leq(&t, w - 1)?.0, k + 2);
                }
                Ok(lhs == rhs)
            })();
            r.check("compat.geq_criterion", gth, || wit(format!("D_(>={w}) through β_(<={})τ^(<=k)", w - 1)));
        }

        for (k, h) in &hs {
            let bh = deg0(h);
            for w in levels_around(b, &bh) {
                let res = (|| -> Result<bool> {
                    let lhs = b.member_geq(&bh, w)?;
                    let mut rhs = true;
                    for a in simples_below(b, &bh, w - 1) {
                        let (_, hi) = ext_window(&a, &bh);
                        rhs &= (0..=hi).all(|e| ext_dim(&a, &bh, e) == 0);
                    }
                    Ok(lhs == rhs)
                })();
                r.check("compat.heart_orthogonality", res, || {
                    Witness::new(format!("h^{k}: D_(>={w}) against simples of D_(<={})", w - 1)).object("h", &bh)
                });
            }
        }

        if let (Some((_, m)), Some(ky)) = (hs.first(), y.cohomology_degrees().first()) {
            let nrep = y.cohomology(*ky);
            let f = random_rep_map(splitmix64(seed ^ 0x11), m, &nrep);
            let (ker, _) = kernel(&f, m);
            let (im, _) = image(&f, &nrep);
            let (cok, _) = cokernel(&f, &nrep);
            let (mc, nc) = (deg0(m), deg0(&nrep));
            let ext = random_extension(splitmix64(seed ^ 0x12), &mc, &nc);
            for w in levels_around(b, &Complex::direct_sum(&[&model(&mc), &model(&nc)]).unwrap()) {
                let res = (|| -> Result<bool> {
                    let (ml, nl) = (b.member_leq(&mc, w)?, b.member_leq(&nc, w)?);
                    let (mg, ng) = (b.member_geq(&mc, w)?, b.member_geq(&nc, w)?);
                    let mut ok = true;
                    if ml {
                        ok &= b.member_leq(&deg0(&ker), w)? && b.member_leq(&deg0(&im), w)?;
                    }
                    if nl {
                        ok &= b.member_leq(&deg0(&im), w)? && b.member_leq(&deg0(&cok), w)?;
                    }
                    if ml && nl {
                        ok &= b.member_leq(&ext, w)?;
                    }
                    if mg && ng {
                        ok &= b.member_geq(&ext, w)?;
                    }
                    Ok(ok)
                })();
                r.check("compat.heart_serre", res, || {
                    Witness::new(format!("sub, quotient or extension leaves level {w}")).object("m", &mc).object("n", &nc)
                });
            }
        }

        let edges = (|| -> Result<Option<(i64, i64, i64, i64)>> {
            let (Some(lx), Some(gx)) = (sd_leq_edge(b, x)?, sd_geq_edge(b, x)?) else { return Ok(None) };
            match (sd_leq_edge(b, y)?, sd_geq_edge(b, y)?) {
                (Some(ly), Some(gy)) => Ok(Some((lx, gx, ly, gy))),
                _ => Ok(Some((lx, gx, lx, gx))),
            }
        })();
        match edges {
            Err(e) => r.check("compat.stag_bounded", Err(e), || wit("edges".into())),
            Ok(None) => {
                let zero = (|| -> Result<bool> { Ok(ctx.in_sd_leq(x, 0)? && ctx.in_sd_geq(x, 0)?) })();
                r.check("compat.stag_bounded", zero.map(|z| z == x.is_acyclic()), || wit("zero object".into()));
            }
            Ok(Some((lx, gx, ly, gy))) => {
                let y = if y.is_acyclic() { x } else { y };
                let bounded = (|| -> Result<bool> {
                    Ok(ctx.in_sd_leq(x, lx)?
                        && !ctx.in_sd_leq(x, lx - 1)?
                        && ctx.in_sd_geq(x, gx)?
                        && !ctx.in_sd_geq(x, gx + 1)?
                        && gx <= lx)
                })();
                r.check("compat.stag_bounded", bounded, || wit(format!("expected ˢD^(>={gx}) ∩ ˢD^(<={lx})")));
                let nondeg = (|| -> Result<bool> {
                    let (a, top) = x.amplitude().unwrap();
                    let (_, wh) = b.interval(x)?.unwrap();
                    let lo_fail = !ctx.in_sd_leq(x, a + b.interval(&deg0(&x.cohomology(a)))?.unwrap().0 - 1)?;
                    let hi_fail = !ctx.in_sd_geq(x, top + wh + 1)?;
                    Ok(lo_fail && hi_fail)
                })();
                r.check("compat.stag_nondegenerate", nondeg, || wit("object in every staggered level".into()));
                let shifts = (|| -> Result<bool> {
                    let mut ok = (!ctx.in_sd_leq(x, 0)? || ctx.in_sd_leq(x, 1)?)
                        && (!ctx.in_sd_geq(x, 1)? || ctx.in_sd_geq(x, 0)?);
                    for s in [lx, gx] {
                        ok &= ctx.in_sd_leq(x, s)? == ctx.in_sd_leq(&x.shift(s), 0)?;
                        ok &= ctx.in_sd_geq(x, s)? == ctx.in_sd_geq(&x.shift(s), 0)?;
                    }
                    Ok(ok)
                })();
                r.check("compat.stag_shifts", shifts, || wit("shift inclusions".into()));
                let orth = (|| -> Result<bool> {
                    let a = x.shift(lx);
                    let bb = y.shift(gy - 1);
                    let t = ctx.stag_decompose(x)?;
                    Ok(hom_dim(&a, &bb) == 0 && hom_dim(t.a(), t.b()) == 0)
                })();
                r.check("compat.stag_orthogonality", orth, || wit("Hom(ˢD^(<=0), ˢD^(>=1)) ≠ 0".into()).object("y", y));
                let ext = (|| -> Result<bool> {
                    let (a1, a2) = (x.shift(lx), y.shift(ly));
                    let e = random_extension(splitmix64(seed ^ 0x13), &a1, &a2);
                    let (b1, b2) = (x.shift(gx), y.shift(gy));
                    let f = random_extension(splitmix64(seed ^ 0x14), &b1, &b2);
                    Ok(ctx.in_sd_leq(&e, 0)? && ctx.in_sd_geq(&f, 0)?)
                })();
                r.check("compat.stag_extensions", ext, || wit("extension leaves a staggered half".into()).object("y", y));
            }
        }
        let perp = (|| -> Result<bool> {
            let t = ctx.stag_decompose(x)?;
            let leq = ctx.in_sd_leq(x, 0)?;
            let geq = ctx.in_sd_geq(x, 1)?;
            Ok(leq == t.b().is_acyclic()
                && leq == (hom_dim(&j, t.b()) == 0)
                && geq == t.a().is_acyclic()
                && geq == (hom_dim(t.a(), &j) == 0))
        })();
        r.check("compat.stag_orthogonal_complement", perp, || wit("orthogonal complements".into()));
        let cont = (|| -> Result<bool> {
            let Some((a, top)) = x.amplitude() else { return Ok(true) };
            let (lo, hi) = b.interval(x)?.unwrap();
            Ok(ctx.in_sd_leq(x, top + hi)? && ctx.in_sd_geq(x, a + lo)?)
        })();
        r.check("compat.stag_containments", cont, || wit("D^(<=k) ∩ D_(<=w) containment".into()));
    })
}

/// Middle-perversity conditions on a support realization with stratum
/// dimension `2 · level`.
pub fn verify_perverse_equivalence(ctx: &StaggerContext, sample: &[Case], exec: Executor) -> Report {
    let ids = ["perverse.geq", "perverse.leq"];
    let Some(l) = ctx.baric().as_level().filter(|l| l.flavor() == Flavor::Support) else {
        return once(&ids, |r| {
            r.check("perverse.leq", Err(crate::error::Error::Unsupported("needs a support realization".into())), || {
                Witness::new("flavor")
            })
        });
    };
    let p = l.poset().clone();
    let lv = l.levels().to_vec();
    per_case(exec, sample, &ids, |_, case, r| {
        let x = &case.x;
        let wit = |note: &str| Witness::new(note).object("x", x);
        let leq = (|| -> Result<bool> {
            let direct = x.cohomology_degrees().into_iter().all(|k| {
                let d = x.cohomology_dims(k);
                (0..p.len()).all(|y| d[y] == 0 || 2 * lv[y] <= -2 * k)
            });
            Ok(direct == ctx.in_sd_leq(x, 0)?)
        })();
        r.check("perverse.leq", leq, || wit("dim supp h^k ≤ -2k disagrees"));
        let geq = (|| -> Result<bool> {
            let j = model(x);
            let mut direct = true;
            for s in 0..p.len() {
                let (up, emb) = p.subposet(&p.up_set(s));
                let up = std::sync::Arc::new(up);
                let js = j.restrict(&up, &emb);
                let pos = emb.iter().position(|&e| e == s).unwrap();
                let simple = deg0(&PosetRep::simple(up.clone(), x.field(), pos));
                let (lo, _) = ext_window(&simple, &js);
                direct &= (lo..-lv[s]).all(|k| ext_dim(&simple, &js, k) == 0);
            }
            Ok(direct == ctx.in_sd_geq(x, 0)?)
        })();
        r.check("perverse.geq", geq, || wit("costalk vanishing disagrees"));
    })
}

/// The staggered decomposition on every case: termination within fuel,
/// memberships, and the cone property.
pub fn verify_stag_decompose(ctx: &StaggerContext, sample: &[Case], exec: Executor) -> Report {
    let ids = ["stag.cone", "stag.memberships", "stag.terminates"];
    per_case(exec, sample, &ids, |_, case, r| {
        let x = &case.x;
        let wit = |note: &str| Witness::new(note).object("x", x);
        let fuel = ctx.fuel_for(x);
        match ctx.decompose_with_fuel(x, fuel) {
            Err(e) => {
                r.check("stag.terminates", Err(e), || wit("decomposition"));
            }
            Ok(t) => {
                r.check("stag.terminates", Ok(true), || wit(""));
                let mem = (|| -> Result<bool> { Ok(ctx.in_sd_leq(t.a(), 0)? && ctx.in_sd_geq(t.b(), 1)?) })();
                r.check("stag.memberships", mem, || wit("A ∉ ˢD^(<=0) or B ∉ ˢD^(>=1)"));
                let same = complex_to_json(t.x()) == complex_to_json(&model(x));
                r.check("stag.cone", Ok(same && t.is_distinguished()), || wit("A → X → B is not distinguished"));
            }
        }
    })
}

/// Heart checks: purity oracle (graded), IC objects of length one, and
/// additivity of length on random short exact sequences.
pub fn verify_heart(ctx: &StaggerContext, sample: &[Case], sequences: usize, exec: Executor) -> Report {
    let ids = ["heart.additive", "heart.cohomology", "heart.ic_simple", "heart.purity_oracle"];
    let b = ctx.baric();
    let field = sample.first().map(|c| c.x.field()).unwrap_or(crate::exactlinalg::Field::Rational);
    let mut rep = once(&ids, |r| match ctx.ic_objects(field) {
        Err(e) => r.check("heart.ic_simple", Err(e), || Witness::new("IC objects")),
        Ok(ics) => {
            for (x, ic) in ics {
                let res = (|| -> Result<bool> { Ok(ctx.in_heart(&ic)? && ctx.heart_length(&ic)? == 1) })();
                r.check("heart.ic_simple", res, || {
                    Witness::new(format!("IC of {} is not simple", b.poset().name(x))).object("ic", &ic)
                });
            }
        }
    });
    // one heart object per case: the top staggered cohomology
    let hearts: Vec<Option<Complex>> = exec.map(sample, |c| {
        let m = sd_leq_edge(b, &c.x).ok()??;
        ctx.stag_cohomology(&c.x, m).ok()
    });
    let n = sample.len();
    rep.extend(per_case(exec, sample, &ids, |i, case, r| {
        let x = &case.x;
        let wit = |note: &str| Witness::new(note).object("x", x);
        if let Some(l) = b.as_level().filter(|l| l.flavor() == Flavor::Graded) {
            let res = ctx.in_heart(x).map(|h| h == crate::staggering::graded_heart_oracle(l, x));
            r.check("heart.purity_oracle", res, || wit("purity oracle disagrees"));
        }
        let top = sd_leq_edge(b, x);
        let coh = top.and_then(|m| match m {
            None => Ok(true),
            Some(m) => {
                let h = ctx.stag_cohomology(x, m)?;
                Ok(!h.is_acyclic() && ctx.in_heart(&h)?)
            }
        });
        r.check("heart.cohomology", coh, || wit("top staggered cohomology"));
        if i < sequences {
            // acyclic cases have no top heart object; use the next case that does
            let next = |from: usize| (0..n).map(|k| (from + k) % n).find(|&j| hearts[j].is_some());
            let Some(ia) = next(i) else {
                r.check("heart.additive", Ok(false), || wit("no heart object in the sample"));
                return;
            };
            let ic = next(ia + 1).unwrap_or(ia);
            let (Some(a), Some(c)) = (&hearts[ia], &hearts[ic]) else { unreachable!() };
            let seed = case.seed.unwrap_or(i as u64);
            let bm = random_extension(splitmix64(seed ^ 0x21), a, c);
            let res = (|| -> Result<bool> {
                Ok(ctx.in_heart(&bm)? && ctx.heart_length(&bm)? == ctx.heart_length(a)? + ctx.heart_length(c)?)
            })();
            r.check("heart.additive", res, || {
                Witness::new("length is not additive").object("a", a).object("c", c).object("b", &bm)
            });
        }
    }));
    rep.sorted()
}
