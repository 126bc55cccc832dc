//! Baric structures with computable truncation functors.
//!
//! A level realization cuts a stratification poset into the closed pieces
//! `{level ≤ w}`; on an injective model `β_{≤w}` is the subcomplex of
//! generators tagged there. An exceptional realization builds `β_{≥w+1}` by
//! killing maps out of `∇^0, …, ∇^w` one object at a time.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::derivedcat::resolve::{materialize, tagged_at};
use crate::derivedcat::{ext_dim, resolve, tagged_matrix, ChainMap, Complex, HomComplex, Triangle};
use crate::error::{Error, Result};
use crate::exactlinalg::{Field, Matrix};
use crate::posetrep::{PosetRep, RepMap, StratPoset};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    /// Cohomology supported on strata of level `≤ w`.
    Support,
    /// Graded vector spaces: a discrete poset with one element per weight.
    Graded,
}

#[derive(Clone, Debug)]
pub struct LevelRealization {
    flavor: Flavor,
    poset: Arc<StratPoset>,
    levels: Vec<i64>,
}

impl LevelRealization {
    /// Levels taken from the poset. They must grow along the order.
    pub fn support(poset: Arc<StratPoset>) -> Result<Self> {
        let levels = poset.levels().to_vec();
        let r = LevelRealization { flavor: Flavor::Support, poset, levels };
        if let Some((x, y)) = r.monotonicity_witness() {
            return Err(Error::Realization(format!(
                "{} ≤ {} but level {} > {}",
                r.poset.name(x),
                r.poset.name(y),
                r.levels[x],
                r.levels[y]
            )));
        }
        Ok(r)
    }

    /// Graded vector spaces with weights in `[-window, window]`.
    pub fn graded(window: i64) -> Self {
        let weights: Vec<i64> = (-window..=window).collect();
        let names = weights.iter().map(|w| w.to_string()).collect();
        let poset = StratPoset::discrete(names, weights.clone()).expect("distinct names");
        LevelRealization { flavor: Flavor::Graded, poset: Arc::new(poset), levels: weights }
    }

    /// No monotonicity check; used to exercise the verifiers on broken input.
    pub fn new_unchecked(flavor: Flavor, poset: Arc<StratPoset>, levels: Vec<i64>) -> Self {
        LevelRealization { flavor, poset, levels }
    }

    /// Shifts every level by `-q(x)`.
    pub fn with_perversity(&self, q: &[i64]) -> Self {
        let levels = self.levels.iter().zip(q).map(|(l, q)| l - q).collect();
        LevelRealization { levels, ..self.clone() }
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn poset(&self) -> &Arc<StratPoset> {
        &self.poset
    }

    pub fn levels(&self) -> &[i64] {
        &self.levels
    }

    /// A pair `x ≤ y` with `level(x) > level(y)`, if any.
    pub fn monotonicity_witness(&self) -> Option<(usize, usize)> {
        let n = self.poset.len();
        (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .find(|&(x, y)| self.poset.leq(x, y) && self.levels[x] > self.levels[y])
    }

    pub fn lower_set(&self, w: i64) -> Vec<bool> {
        self.levels.iter().map(|&l| l <= w).collect()
    }

    /// Element carrying weight `w` (graded flavor).
    pub fn weight_element(&self, w: i64) -> Option<usize> {
        self.levels.iter().position(|&l| l == w)
    }

    pub fn weight_window(&self) -> (i64, i64) {
        let lo = *self.levels.iter().min().unwrap_or(&0);
        let hi = *self.levels.iter().max().unwrap_or(&0);
        (lo, hi)
    }

    /// A line of weight `w` in degree `deg`.
    pub fn graded_line(&self, field: Field, w: i64, deg: i64) -> Result<Complex> {
        let x = self.weight_element(w).ok_or_else(|| Error::Unsupported(format!("weight {w} outside window")))?;
        Ok(Complex::from_rep(&PosetRep::simple(self.poset.clone(), field, x), deg))
    }
}

/// An ordered set `∇^0, …, ∇^N` with optional partners `Δ_w`.
#[derive(Clone, Debug)]
pub struct ExceptionalSet {
    poset: Arc<StratPoset>,
    field: Field,
    nabla: Vec<Complex>,
    delta: Vec<Option<Complex>>,
    models: Vec<Complex>,
}

impl ExceptionalSet {
    pub fn new(nabla: Vec<Complex>, delta: Vec<Option<Complex>>) -> Result<Self> {
        let first = nabla.first().ok_or_else(|| Error::Realization("empty exceptional set".into()))?;
        if nabla.iter().chain(delta.iter().flatten()).any(|c| !c.compatible(first)) {
            return Err(Error::Mismatch);
        }
        if delta.len() > nabla.len() {
            return Err(Error::Shape("more Δ than ∇".into()));
        }
        let mut delta = delta;
        delta.resize(nabla.len(), None);
        let models = nabla.iter().map(|n| resolve(n).model).collect();
        Ok(ExceptionalSet { poset: first.poset().clone(), field: first.field(), nabla, delta, models })
    }

    pub fn len(&self) -> usize {
        self.nabla.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nabla.is_empty()
    }

    pub fn nabla(&self, w: usize) -> &Complex {
        &self.nabla[w]
    }

    pub fn delta(&self, w: usize) -> Option<&Complex> {
        self.delta[w].as_ref()
    }

    pub fn poset(&self) -> &Arc<StratPoset> {
        &self.poset
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Checks `End(∇^w) = k` with no other self-extensions, which the
    /// truncation algorithm relies on.
    pub fn exceptional_witness(&self) -> Option<(usize, i64, usize)> {
        for (w, n) in self.nabla.iter().enumerate() {
            let (lo, hi) = ext_window(n, n);
            for k in lo..=hi {
                let d = ext_dim(n, n, k);
                if d != usize::from(k == 0) {
                    return Some((w, k, d));
                }
            }
        }
        None
    }
}

/// Degrees outside which `Hom(X, Y[k])` vanishes for dimension reasons.
pub fn ext_window(x: &Complex, y: &Complex) -> (i64, i64) {
    let depth = x.poset().depth() as i64;
    match (x.range(), y.range()) {
        (Some((xa, xb)), Some((ya, yb))) => (ya - xb, yb - xa + depth),
        _ => (0, -1),
    }
}

#[derive(Clone, Debug)]
pub enum BaricRealization {
    Level(LevelRealization),
    Exceptional(ExceptionalSet),
}

/// `β_{≤w}X → J → β_{≥w+1}X` on the injective model `J` of `X`.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub model: Complex,
    pub aug: ChainMap,
    pub triangle: Triangle,
}

impl Truncation {
    pub fn lower(&self) -> &Complex {
        self.triangle.a()
    }

    pub fn upper(&self) -> &Complex {
        self.triangle.b()
    }
}

/// Splits a termwise-injective complex along generators whose tags satisfy `keep`:
/// the subcomplex they span and the quotient by it.
pub(crate) fn split_tagged(x: &Complex, keep: &dyn Fn(usize) -> bool) -> Triangle {
    let poset = x.poset().clone();
    let field = x.field();
    let Some((lo, hi)) = x.range() else { return Triangle::zero(x) };
    let tags: Vec<Vec<usize>> = (lo..=hi).map(|n| x.tags(n).unwrap().to_vec()).collect();
    let d: Vec<Matrix> = (lo..hi)
        .map(|n| tagged_matrix(&poset, field, x.tags(n).unwrap(), x.tags(n + 1).unwrap(), &x.diff_or_zero(n)))
        .collect();
    let sel = |yes: bool| -> Vec<Vec<usize>> {
        tags.iter().map(|t| (0..t.len()).filter(|&g| keep(t[g]) == yes).collect()).collect()
    };
    let (ins, outs) = (sel(true), sel(false));
    let piece = |idx: &Vec<Vec<usize>>| {
        let t: Vec<Vec<usize>> = idx.iter().zip(&tags).map(|(i, t)| i.iter().map(|&g| t[g]).collect()).collect();
        let dd: Vec<Matrix> = (0..d.len()).map(|k| d[k].submatrix(&idx[k + 1], &idx[k])).collect();
        (materialize(&poset, field, lo, t.clone(), &dd), t)
    };
    let (sub, sub_tags) = piece(&ins);
    let (quo, quo_tags) = piece(&outs);
    let inc = ChainMap::from_fn(&sub, x, |n, y| {
        let i = (n - lo) as usize;
        let mut e = Matrix::zeros(field, tags[i].len(), ins[i].len());
        for (k, &g) in ins[i].iter().enumerate() {
            e.set(g, k, &field.one());
        }
        tagged_at(&poset, &sub_tags[i], &tags[i], &e, y)
    });
    let proj = ChainMap::from_fn(x, &quo, |n, y| {
        let i = (n - lo) as usize;
        let mut e = Matrix::zeros(field, outs[i].len(), tags[i].len());
        for (k, &g) in outs[i].iter().enumerate() {
            e.set(k, g, &field.one());
        }
        tagged_at(&poset, &tags[i], &quo_tags[i], &e, y)
    });
    Triangle::short_exact(inc, proj)
}

/// Sum of chain maps `⊕ S_i → T` out of a direct sum.
pub(crate) fn sum_map(field: Field, maps: &[ChainMap], target: &Complex) -> Result<ChainMap> {
    let srcs: Vec<&Complex> = maps.iter().map(|m| m.source()).collect();
    let src = Complex::direct_sum(&srcs)?;
    Ok(ChainMap::from_fn(&src, target, |n, y| {
        let parts: Vec<Matrix> = maps.iter().map(|m| m.at(n, y)).collect();
        Matrix::hstack(field, target.dim(n, y), &parts.iter().collect::<Vec<_>>())
    }))
}

impl BaricRealization {
    pub fn poset(&self) -> &Arc<StratPoset> {
        match self {
            BaricRealization::Level(l) => &l.poset,
            BaricRealization::Exceptional(e) => &e.poset,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BaricRealization::Level(l) if l.flavor == Flavor::Support => "support",
            BaricRealization::Level(_) => "graded",
            BaricRealization::Exceptional(_) => "exceptional",
        }
    }

    pub fn as_level(&self) -> Option<&LevelRealization> {
        match self {
            BaricRealization::Level(l) => Some(l),
            _ => None,
        }
    }

    fn check_input(&self, x: &Complex) -> Result<()> {
        if crate::posetrep::same_poset(x.poset(), self.poset()) {
            Ok(())
        } else {
            Err(Error::Mismatch)
        }
    }

    /// Levels `[a, b]` outside which truncation of `x` is trivial.
    pub fn window(&self, x: &Complex) -> Option<(i64, i64)> {
        if x.is_zero() {
            return None;
        }
        match self {
            BaricRealization::Level(l) => {
                let supp = x.term_support();
                let p = &l.poset;
                let lv: BTreeSet<i64> = (0..p.len())
                    .filter(|&y| (0..p.len()).any(|z| supp[z] && p.leq(y, z)))
                    .map(|y| l.levels[y])
                    .collect();
                Some((*lv.first()?, *lv.last()?))
            }
            BaricRealization::Exceptional(e) => Some((0, e.len() as i64 - 1)),
        }
    }

    /// The distinct levels at which truncating `x` may change something.
    pub fn cut_points(&self, x: &Complex) -> Vec<i64> {
        match (self, self.window(x)) {
            (_, None) => vec![],
            (BaricRealization::Level(l), Some((a, b))) => {
                let mut v: Vec<i64> = l.levels.iter().copied().filter(|w| (a..=b).contains(w)).collect();
                v.sort();
                v.dedup();
                v
            }
            (BaricRealization::Exceptional(_), Some((a, b))) => (a..=b).collect(),
        }
    }

    /// The triangle `β_{≤w}X → J → β_{≥w+1}X`.
    pub fn truncate(&self, x: &Complex, w: i64) -> Result<Truncation> {
        self.check_input(x)?;
        let r = resolve(x);
        let model = r.model;
        let triangle = match self {
            BaricRealization::Level(l) => {
                let z = l.lower_set(w);
                if !l.poset.is_down_closed(&z) {
                    return Err(Error::Realization(format!("level set {w} is not closed")));
                }
                split_tagged(&model, &|t| z[t])
            }
            BaricRealization::Exceptional(e) => exceptional_truncation(e, &model, w)?,
        };
        Ok(Truncation { model, aug: r.aug, triangle })
    }

    /// `β_{≤w}X` with the counit into the injective model of `X`.
    pub fn beta_leq(&self, x: &Complex, w: i64) -> Result<(Complex, ChainMap)> {
        let t = self.truncate(x, w)?;
        Ok((t.lower().clone(), t.triangle.first))
    }

    /// `β_{≥w}X` with the unit out of the injective model of `X`.
    pub fn beta_geq(&self, x: &Complex, w: i64) -> Result<(Complex, ChainMap)> {
        let t = self.truncate(x, w - 1)?;
        Ok((t.upper().clone(), t.triangle.second))
    }

    pub fn truncation_triangle(&self, x: &Complex, w: i64) -> Result<Triangle> {
        Ok(self.truncate(x, w)?.triangle)
    }

    pub fn member_leq(&self, x: &Complex, w: i64) -> Result<bool> {
        self.check_input(x)?;
        match self {
            BaricRealization::Level(l) => {
                let supp = x.cohomology_support();
                Ok((0..supp.len()).all(|y| !supp[y] || l.levels[y] <= w))
            }
            BaricRealization::Exceptional(_) => Ok(self.truncate(x, w)?.upper().is_acyclic()),
        }
    }

    pub fn member_geq(&self, x: &Complex, w: i64) -> Result<bool> {
        self.check_input(x)?;
        if let Some((a, _)) = self.window(x) {
            if w <= a {
                return Ok(true);
            }
        } else {
            return Ok(true);
        }
        Ok(self.truncate(x, w - 1)?.lower().is_acyclic())
    }

    /// The tight interval `[v, w]` with `x ∈ D_{≥v} ∩ D_{≤w}`; `None` for acyclic `x`.
    pub fn interval(&self, x: &Complex) -> Result<Option<(i64, i64)>> {
        if x.is_acyclic() {
            return Ok(None);
        }
        let (a, b) = self.window(x).expect("nonzero");
        let mut hi = b;
        while hi > a && self.member_leq(x, hi - 1)? {
            hi -= 1;
        }
        let mut lo = a;
        while lo < b && self.member_geq(x, lo + 1)? {
            lo += 1;
        }
        Ok(Some((lo, hi)))
    }

    /// Tensor product used for multiplicativity: pointwise for supports,
    /// Day convolution for graded spaces.
    pub fn tensor(&self, x: &Complex, y: &Complex) -> Result<Complex> {
        match self {
            BaricRealization::Level(l) if l.flavor == Flavor::Support => x.tensor_pointwise(y),
            BaricRealization::Level(l) => graded_tensor(l, x, y),
            BaricRealization::Exceptional(_) => Err(Error::Unsupported("tensor on an exceptional set".into())),
        }
    }
}

fn exceptional_truncation(e: &ExceptionalSet, model: &Complex, w: i64) -> Result<Triangle> {
    let field = e.field;
    let mut cur = model.clone();
    let mut to_cur = ChainMap::identity(model);
    let top = w.min(e.len() as i64 - 1);
    for v in 0..=top {
        let nv = &e.models[v as usize];
        let h = HomComplex::new(nv, &cur);
        let Some((a, b)) = h.degrees() else { continue };
        let maps: Vec<ChainMap> = (a..=b).flat_map(|n| h.basis_maps(n)).collect();
        if maps.is_empty() {
            continue;
        }
        let ev = sum_map(field, &maps, &cur)?;
        let (c, tri) = ev.cone();
        to_cur = tri.second.compose(&to_cur);
        cur = c;
    }
    if top < 0 {
        let z = Complex::zero(model.poset().clone(), field);
        return Ok(Triangle::short_exact(ChainMap::zero(&z, model), ChainMap::identity(model)));
    }
    Ok(Triangle::from_cocone(&to_cur))
}

fn graded_check(l: &LevelRealization, x: &Complex) -> Result<()> {
    if l.flavor != Flavor::Graded {
        return Err(Error::Unsupported("graded operation on a support realization".into()));
    }
    if !crate::posetrep::same_poset(x.poset(), &l.poset) {
        return Err(Error::Mismatch);
    }
    Ok(())
}

fn graded_complex(l: &LevelRealization, field: Field, lo: i64, dims: Vec<Vec<usize>>, d: Vec<Vec<Matrix>>) -> Result<Complex> {
    let terms = dims
        .into_iter()
        .map(|ds| PosetRep::new(l.poset.clone(), field, ds, vec![]))
        .collect::<Result<Vec<_>>>()?;
    let diffs = d.into_iter().map(RepMap::new_unchecked).collect();
    Complex::new(l.poset.clone(), field, lo, terms, diffs)
}

/// Day convolution: weights add, degrees add, `d(x ⊗ y) = dx ⊗ y + (-1)^p x ⊗ dy`.
pub fn graded_tensor(l: &LevelRealization, x: &Complex, y: &Complex) -> Result<Complex> {
    graded_check(l, x)?;
    graded_check(l, y)?;
    let field = x.field();
    let (Some((xa, xb)), Some((ya, yb))) = (x.range(), y.range()) else {
        return Ok(Complex::zero(l.poset.clone(), field));
    };
    let np = l.poset.len();
    let wt = |e: usize| l.levels[e];
    // summands of degree n at element c: (p, a, b) with x^p_a ⊗ y^{n-p}_b
    let summands = |n: i64, c: usize| -> Vec<(i64, usize, usize)> {
        let mut out = vec![];
        for p in xa..=xb {
            for a in 0..np {
                for b in 0..np {
                    if wt(a) + wt(b) == wt(c) && x.dim(p, a) * y.dim(n - p, b) > 0 {
                        out.push((p, a, b));
                    }
                }
            }
        }
        out
    };
    for a in 0..np {
        for b in 0..np {
            for p in xa..=xb {
                for q in ya..=yb {
                    if x.dim(p, a) * y.dim(q, b) > 0 && l.weight_element(wt(a) + wt(b)).is_none() {
                        return Err(Error::Unsupported("tensor weight outside window".into()));
                    }
                }
            }
        }
    }
    let (lo, hi) = (xa + ya, xb + yb);
    let offsets = |n: i64, c: usize| -> (Vec<(i64, usize, usize, usize)>, usize) {
        let mut off = 0;
        let mut v = vec![];
        for (p, a, b) in summands(n, c) {
            v.push((p, a, b, off));
            off += x.dim(p, a) * y.dim(n - p, b);
        }
        (v, off)
    };
    let dims: Vec<Vec<usize>> = (lo..=hi).map(|n| (0..np).map(|c| offsets(n, c).1).collect()).collect();
    let mut diffs = vec![];
    for n in lo..hi {
        let mut comps = vec![];
        for c in 0..np {
            let (src, sd) = offsets(n, c);
            let (dst, dd) = offsets(n + 1, c);
            let mut m = Matrix::zeros(field, dd, sd);
            for &(p, a, b, o) in &src {
                let q = n - p;
                for &(p2, a2, b2, o2) in &dst {
                    if p2 == p + 1 && a2 == a && b2 == b {
                        let blk = x.d_at(p, a).kron(&Matrix::identity(field, y.dim(q, b)));
                        m.add_block(o2, o, &blk);
                    }
                    if p2 == p && a2 == a && b2 == b {
                        let s = field.int(crate::derivedcat::sign(p));
                        let blk = Matrix::identity(field, x.dim(p, a)).kron(&y.d_at(q, b)).scale(&s);
                        m.add_block(o2, o, &blk);
                    }
                }
            }
            comps.push(m);
        }
        diffs.push(comps);
    }
    graded_complex(l, field, lo, dims, diffs)
}

/// Linear dual with weights and degrees negated.
pub fn graded_dual(l: &LevelRealization, x: &Complex) -> Result<Complex> {
    graded_check(l, x)?;
    let field = x.field();
    let Some((a, b)) = x.range() else { return Ok(Complex::zero(l.poset.clone(), field)) };
    let np = l.poset.len();
    let mirror = |e: usize| l.weight_element(-l.levels[e]);
    for e in 0..np {
        if mirror(e).is_none() && (a..=b).any(|n| x.dim(n, e) > 0) {
            return Err(Error::Unsupported("dual weight outside window".into()));
        }
    }
    let dims: Vec<Vec<usize>> =
        (-b..=-a).map(|n| (0..np).map(|e| mirror(e).map_or(0, |m| x.dim(-n, m))).collect()).collect();
    let diffs: Vec<Vec<Matrix>> = (-b..-a)
        .map(|n| {
            (0..np)
                .map(|e| match mirror(e) {
                    Some(m) => x.d_at(-n - 1, m).transpose(),
                    None => Matrix::zeros(field, 0, 0),
                })
                .collect()
        })
        .collect();
    graded_complex(l, field, -b, dims, diffs)
}
