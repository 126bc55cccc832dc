//! The staggered t-structure obtained from the standard t-structure and a
//! compatible baric structure.
//!
//! `ˢD^{≤0}` holds the `X` with `h^k(X) ∈ D_{≤-k}` and `ˢD^{≥0}` the `X` with
//! `β_{≤k}X ∈ D^{≥-k}`. Truncation is computed by recursing on the lowest
//! cohomology degree.

use std::sync::Arc;

use crate::baric::{BaricRealization, Flavor, LevelRealization};
use crate::derivedcat::resolve::{materialize, tagged_matrix};
use crate::derivedcat::{factor_pre, reduce, resolve, truncate_std, ChainMap, Complex, Dir, HomComplex, Triangle};
use crate::error::{Error, Result};
use crate::exactlinalg::Field;
use crate::posetrep::{PosetRep, StratPoset};
use crate::verify::report::{Report, Tally, Witness};

#[derive(Clone, Debug)]
pub struct StaggerContext {
    baric: BaricRealization,
    certified: bool,
}

/// Whether `x ∈ D^{≥m}` for the standard t-structure.
fn std_geq(x: &Complex, m: i64) -> bool {
    x.amplitude().is_none_or(|(a, _)| a >= m)
}

fn zero_lower(j: &Complex) -> Triangle {
    let z = Complex::zero(j.poset().clone(), j.field());
    Triangle::short_exact(ChainMap::zero(&z, j), ChainMap::identity(j))
}

impl StaggerContext {
    /// An uncertified context; call [`StaggerContext::certify`] before use.
    pub fn new(baric: BaricRealization) -> Self {
        StaggerContext { baric, certified: false }
    }

    pub(crate) fn trusted(baric: BaricRealization) -> Self {
        StaggerContext { baric, certified: true }
    }

    pub fn baric(&self) -> &BaricRealization {
        &self.baric
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// Runs the compatibility check on `sample` and certifies the context when it passes.
    pub fn certify(&mut self, sample: &[Complex]) -> Report {
        let r = check_compatibility(&self.baric, sample);
        self.certified = r.passed();
        r
    }

    fn require(&self) -> Result<()> {
        if self.certified {
            Ok(())
        } else {
            Err(Error::NotCertified)
        }
    }

    /// `X ∈ ˢD^{≤n}`: `h^j(X) ∈ D_{≤n-j}` for every `j`.
    pub fn in_sd_leq(&self, x: &Complex, n: i64) -> Result<bool> {
        for j in x.cohomology_degrees() {
            let h = Complex::from_rep(&x.cohomology(j), 0);
            if !self.baric.member_leq(&h, n - j)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `X ∈ ˢD^{≥n}`: `β_{≤k}X ∈ D^{≥n-k}` for every `k`.
    pub fn in_sd_geq(&self, x: &Complex, n: i64) -> Result<bool> {
        let model = resolve(x).model;
        for k in self.baric.cut_points(&model) {
            let (low, _) = self.baric.beta_leq(&model, k)?;
            if !std_geq(&low, n - k) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn in_heart(&self, x: &Complex) -> Result<bool> {
        Ok(self.in_sd_leq(x, 0)? && self.in_sd_geq(x, 0)?)
    }

    /// Recursion bound: cohomological length times the number of levels, plus two.
    pub fn fuel_for(&self, x: &Complex) -> usize {
        let levels = self.baric.cut_points(x).len().max(1);
        x.cohomological_length() * levels + 2
    }

    /// `A → J → B` with `J` the injective model of `x`, `A ∈ ˢD^{≤0}`, `B ∈ ˢD^{≥1}`.
    pub fn stag_decompose(&self, x: &Complex) -> Result<Triangle> {
        self.require()?;
        let fuel = self.fuel_for(x);
        self.decompose_with_fuel(x, fuel)
    }

    pub fn decompose_with_fuel(&self, x: &Complex, fuel: usize) -> Result<Triangle> {
        self.require()?;
        let j = resolve(x).model;
        let t = self.decompose_model(&j, fuel, fuel)?;
        if !self.in_sd_leq(t.a(), 0)? || !self.in_sd_geq(t.b(), 1)? {
            return Err(Error::Realization("staggered decomposition left the expected halves".into()));
        }
        Ok(t)
    }

    fn decompose_model(&self, j: &Complex, fuel: usize, budget: usize) -> Result<Triangle> {
        let Some((n, _)) = j.amplitude() else { return Ok(zero_lower(j)) };
        if fuel == 0 {
            return Err(Error::FuelExhausted(budget));
        }
        let t = self.baric.truncate(j, -n)?;
        let counit = t.triangle.first;
        let c = counit.source().clone();
        let (cp, proj) = truncate_std(&c, Dir::Geq, n + 1);
        let r = resolve(&cp);
        let sub = self.decompose_model(&r.model, fuel - 1, budget)?;
        // C → C' → J' → B'
        let g = sub.second.compose(&r.aug).compose(&proj);
        let cocone = Triangle::from_cocone(&g);
        let first = counit.compose(&cocone.first);
        Ok(first.cone().1)
    }

    /// `ˢτ^{≤n}X` with its map to the model of `X`.
    pub fn stag_truncate_leq(&self, x: &Complex, n: i64) -> Result<(Complex, ChainMap)> {
        let j = resolve(x).model;
        let t = self.stag_decompose(&j.shift(n))?;
        let a = t.a().shift(-n);
        Ok((a.clone(), t.first.shift(-n).retarget(&a, &j)))
    }

    /// `ˢτ^{≥n}X` with the map from the model of `X`.
    pub fn stag_truncate_geq(&self, x: &Complex, n: i64) -> Result<(Complex, ChainMap)> {
        let j = resolve(x).model;
        let t = self.stag_decompose(&j.shift(n - 1))?;
        let b = t.b().shift(1 - n);
        Ok((b.clone(), t.second.shift(1 - n).retarget(&j, &b)))
    }

    pub fn stag_truncate(&self, x: &Complex, dir: Dir, n: i64) -> Result<(Complex, ChainMap)> {
        match dir {
            Dir::Leq => self.stag_truncate_leq(x, n),
            Dir::Geq => self.stag_truncate_geq(x, n),
        }
    }

    /// `ˢh^n(X)`, an object of the heart.
    pub fn stag_cohomology(&self, x: &Complex, n: i64) -> Result<Complex> {
        let j = resolve(x).model;
        let (a, _) = self.stag_truncate_leq(&j.shift(n), 0)?;
        let (b, _) = self.stag_truncate_geq(&a, 0)?;
        Ok(b)
    }

    fn heart_map_on_models(&self, f: &ChainMap) -> Result<ChainMap> {
        if f.source().is_tagged() && f.target().is_tagged() {
            return Ok(f.clone());
        }
        let (rs, rt) = (resolve(f.source()), resolve(f.target()));
        let g = rt.aug.compose(f);
        factor_pre(&g, &rs.aug).ok_or_else(|| Error::NoSolution("lifting a map to injective models".into()))
    }

    /// `(ker f, im f, coker f)` in the heart.
    pub fn heart_kernel_cokernel(&self, f: &ChainMap) -> Result<(Complex, Complex, Complex)> {
        self.require()?;
        if !self.in_heart(f.source())? || !self.in_heart(f.target())? {
            return Err(Error::NotInHeart);
        }
        let f = self.heart_map_on_models(f)?;
        let (c, tri) = f.cone();
        let ker = self.stag_cohomology(&c, -1)?;
        // B → C → ˢτ^{≥0}C
        let (coker, to_coker) = self.stag_truncate_geq(&c, 0)?;
        let q = to_coker.compose(&tri.second);
        let im = Triangle::from_cocone(&q).a().clone();
        Ok((ker, im, coker))
    }

    /// Candidate simple objects: one intermediate extension per stratum.
    pub fn ic_objects(&self, field: Field) -> Result<Vec<(usize, Complex)>> {
        let l = self.level()?;
        (0..l.poset().len()).map(|x| Ok((x, self.ic_object(field, x)?))).collect()
    }

    fn level(&self) -> Result<&LevelRealization> {
        self.baric.as_level().ok_or_else(|| Error::Unsupported("IC objects need a level realization".into()))
    }

    /// The shift `e` making `k[e]` on stratum `x` a heart object.
    pub fn forced_shift(&self, x: usize) -> Result<i64> {
        Ok(self.level()?.levels()[x])
    }

    /// Intermediate extension of the line `k[e(x)]` from the stratum `x` to its
    /// closure, pushed forward.
    pub fn ic_object(&self, field: Field, x: usize) -> Result<Complex> {
        let l = self.level()?;
        let p = l.poset();
        let closure = p.down_set(x);
        let (sub, emb) = p.subposet(&closure);
        let sub = Arc::new(sub);
        let levels: Vec<i64> = emb.iter().map(|&y| l.levels()[y]).collect();
        let sub_ctx =
            StaggerContext::trusted(BaricRealization::Level(LevelRealization::new_unchecked(l.flavor(), sub.clone(), levels)));
        let top = emb.iter().position(|&y| y == x).unwrap();
        let (pt, pemb) = sub.subposet(&sub.up_set(top));
        let pt = Arc::new(pt);
        let line = Complex::from_rep(&PosetRep::simple(pt.clone(), field, 0), -self.forced_shift(x)?);
        let ic = sub_ctx.intermediate_extension(&pemb, &pt, &line)?;
        ic.extend_by_zero(p, &emb)
    }

    /// Intermediate extension from the open subposet `U` (embedded by `emb`,
    /// with poset `upos`) of the heart object `f` on `U`.
    pub fn intermediate_extension(&self, emb: &[usize], upos: &Arc<StratPoset>, f: &Complex) -> Result<Complex> {
        self.require()?;
        let l = self.level()?;
        let p = l.poset().clone();
        let mut in_u = vec![false; p.len()];
        for &y in emb {
            in_u[y] = true;
        }
        if !p.is_up_closed(&in_u) {
            return Err(Error::BadSubset("intermediate extension needs an open subset"));
        }
        let ulevels: Vec<i64> = emb.iter().map(|&y| l.levels()[y]).collect();
        let uctx = StaggerContext::trusted(BaricRealization::Level(LevelRealization::new_unchecked(
            l.flavor(),
            upos.clone(),
            ulevels,
        )));
        if !uctx.in_heart(f)? {
            return Err(Error::NotInHeart);
        }
        let pushed = push_forward_open(&p, emb, &resolve(f).model);
        // stricter on the complement: one more unit of level there
        let raised: Vec<i64> = (0..p.len()).map(|y| l.levels()[y] + i64::from(!in_u[y])).collect();
        let raised = LevelRealization::new_unchecked(l.flavor(), p.clone(), raised);
        if raised.monotonicity_witness().is_some() {
            return Err(Error::Unsupported("levels do not grow strictly towards the open part".into()));
        }
        let rctx = StaggerContext::trusted(BaricRealization::Level(raised));
        let (a, _) = rctx.stag_truncate_leq(&pushed, 0)?;
        Ok(a)
    }

    /// Length of a composition series, peeling off simple subobjects.
    pub fn heart_length(&self, f: &Complex) -> Result<usize> {
        self.require()?;
        if !self.in_heart(f)? {
            return Err(Error::NotInHeart);
        }
        let field = f.field();
        let ics = self.ic_objects(field)?;
        let models: Vec<(usize, Complex)> = ics.iter().map(|(x, c)| (*x, resolve(c).model)).collect();
        let mut cur = reduce(&resolve(f).model).model;
        let mut len = 0;
        let fuel = f.total_dim() + 2;
        while !cur.is_acyclic() {
            if len > fuel {
                return Err(Error::FuelExhausted(fuel));
            }
            let mut found = None;
            for (_, ic) in &models {
                let h = HomComplex::new(ic, &cur);
                if let Some(phi) = h.basis_maps(0).into_iter().next() {
                    found = Some(phi.retarget(ic, &cur));
                    break;
                }
            }
            let phi = found.ok_or_else(|| Error::Realization("no simple subobject found".into()))?;
            let (c, _) = phi.cone();
            cur = reduce(&resolve(&self.stag_cohomology(&c, 0)?).model).model;
            len += 1;
        }
        Ok(len)
    }
}

/// `Rj_*` of an injective model on the open subposet embedded by `emb`.
pub fn push_forward_open(ambient: &Arc<StratPoset>, emb: &[usize], x: &Complex) -> Complex {
    let sub = x.poset();
    let field = x.field();
    let Some((lo, hi)) = x.range() else { return Complex::zero(ambient.clone(), field) };
    let tags: Vec<Vec<usize>> = (lo..=hi).map(|n| x.tags(n).unwrap().iter().map(|&t| emb[t]).collect()).collect();
    let d: Vec<_> = (lo..hi)
        .map(|n| tagged_matrix(sub, field, x.tags(n).unwrap(), x.tags(n + 1).unwrap(), &x.diff_or_zero(n)))
        .collect();
    materialize(ambient, field, lo, tags, &d)
}

/// Compatibility of the standard t-structure with `baric`: standard
/// truncations preserve `D_{≤w}`, baric truncations preserve `D^{≥a}`.
pub fn check_compatibility(baric: &BaricRealization, sample: &[Complex]) -> Report {
    let mut tau = Tally::new("compat.tau_right_baryexact");
    let mut beta = Tally::new("compat.beta_left_t_exact");
    for x in sample {
        let Some((a, b)) = x.amplitude() else {
            tau.record(true, Witness::default);
            beta.record(true, Witness::default);
            continue;
        };
        for w in baric.cut_points(x) {
            let leq = baric.member_leq(x, w);
            for n in a..=b {
                for dir in [Dir::Leq, Dir::Geq] {
                    let (t, _) = truncate_std(x, dir, n);
                    let r = leq.clone().and_then(|inside| Ok(!inside || baric.member_leq(&t, w)?));
                    tau.record_result(r, || {
                        Witness::new(format!("truncation {dir:?} {n} leaves D_(<={w})")).object("x", x)
                    });
                }
            }
            let r = baric.truncate(x, w).map(|t| std_geq(t.lower(), a) && std_geq(t.upper(), a));
            beta.record_result(r, || Witness::new(format!("baric truncation at {w} leaves D^(>={a})")).object("x", x));
        }
    }
    let mut rep = Report::new();
    rep.push(tau.finish());
    rep.push(beta.finish());
    rep
}

/// Heart purity for graded spaces: `h^{-n}(X)` is pure of level `n`.
pub fn graded_heart_oracle(l: &LevelRealization, x: &Complex) -> bool {
    debug_assert_eq!(l.flavor(), Flavor::Graded);
    x.cohomology_degrees().into_iter().all(|k| {
        let dims = x.cohomology_dims(k);
        (0..dims.len()).all(|e| dims[e] == 0 || l.levels()[e] == -k)
    })
}
