//! Bounded cochain complexes of poset representations.
//!
//! Shift: `X[n]^k = X^{n+k}` with differential `(-1)^n d`. Cone of `f: X → Y`:
//! `cone(f)^n = X^{n+1} ⊕ Y^n` with differential `[[-d_X, 0], [f, d_Y]]`.

mod hom;
pub(crate) mod resolve;

use std::fmt;
use std::sync::Arc;

pub use hom::{ext_dim, factor_post, factor_post_homotopy, factor_pre, find_quasi_iso, hom_dim, is_null_homotopic, HomComplex};
pub use resolve::{reduce, resolve, tagged_matrix, Resolution};

use crate::error::{Error, Result};
use crate::exactlinalg::{Field, Matrix};
use crate::posetrep::{self, same_poset, PosetRep, RepMap, StratPoset};

#[derive(Clone, Debug)]
pub struct Complex {
    poset: Arc<StratPoset>,
    field: Field,
    lo: i64,
    terms: Vec<PosetRep>,
    diffs: Vec<RepMap>,
    // generator tags when every term is a materialized sum of injectives
    tags: Option<Vec<Vec<usize>>>,
}

impl PartialEq for Complex {
    fn eq(&self, other: &Self) -> bool {
        self.lo == other.lo && self.terms == other.terms && self.diffs == other.diffs
    }
}

pub(crate) fn sign(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

impl Complex {
    /// `terms[i]` sits in degree `lo + i`; `diffs[i]` goes from degree `lo + i` to `lo + i + 1`.
    pub fn new(
        poset: Arc<StratPoset>,
        field: Field,
        lo: i64,
        terms: Vec<PosetRep>,
        diffs: Vec<RepMap>,
    ) -> Result<Self> {
        if diffs.len() + 1 != terms.len() && !(terms.is_empty() && diffs.is_empty()) {
            return Err(Error::Shape(format!("{} terms need {} differentials", terms.len(), terms.len().saturating_sub(1))));
        }
        for t in &terms {
            if !same_poset(t.poset(), &poset) || t.field() != field {
                return Err(Error::Mismatch);
            }
        }
        for (i, d) in diffs.iter().enumerate() {
            let d = RepMap::new(&terms[i], &terms[i + 1], d.comps().to_vec())?;
            if i > 0 && !d.compose(&diffs[i - 1]).is_zero() {
                return Err(Error::NotAComplex(lo + i as i64 - 1));
            }
        }
        Ok(Complex { poset, field, lo, terms, diffs, tags: None }.trimmed())
    }

    pub(crate) fn new_unchecked(
        poset: Arc<StratPoset>,
        field: Field,
        lo: i64,
        terms: Vec<PosetRep>,
        diffs: Vec<RepMap>,
        tags: Option<Vec<Vec<usize>>>,
    ) -> Self {
        let c = Complex { poset, field, lo, terms, diffs, tags };
        debug_assert!(c.check_d_squared());
        c.trimmed()
    }

    pub fn zero(poset: Arc<StratPoset>, field: Field) -> Self {
        Complex { poset, field, lo: 0, terms: vec![], diffs: vec![], tags: Some(vec![]) }
    }

    /// `f` placed in degree `deg`.
    pub fn from_rep(f: &PosetRep, deg: i64) -> Self {
        Complex {
            poset: f.poset().clone(),
            field: f.field(),
            lo: deg,
            terms: vec![f.clone()],
            diffs: vec![],
            tags: None,
        }
        .trimmed()
    }

    fn check_d_squared(&self) -> bool {
        self.diffs.windows(2).all(|w| w[1].compose(&w[0]).is_zero())
    }

    fn trimmed(mut self) -> Self {
        while self.terms.last().is_some_and(|t| t.is_zero()) {
            self.terms.pop();
            if let Some(t) = self.tags.as_mut() {
                t.pop();
            }
            self.diffs.pop();
        }
        while self.terms.first().is_some_and(|t| t.is_zero()) {
            self.terms.remove(0);
            if let Some(t) = self.tags.as_mut() {
                t.remove(0);
            }
            if !self.diffs.is_empty() {
                self.diffs.remove(0);
            }
            self.lo += 1;
        }
        if self.terms.is_empty() {
            self.lo = 0;
            self.diffs.clear();
            if self.tags.is_some() {
                self.tags = Some(vec![]);
            }
        }
        self
    }

    pub fn poset(&self) -> &Arc<StratPoset> {
        &self.poset
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Lowest and highest degree with a nonzero term.
    pub fn range(&self) -> Option<(i64, i64)> {
        if self.terms.is_empty() {
            None
        } else {
            Some((self.lo, self.lo + self.terms.len() as i64 - 1))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, n: i64) -> Option<&PosetRep> {
        let i = n - self.lo;
        if i < 0 {
            return None;
        }
        self.terms.get(i as usize)
    }

    pub fn term_or_zero(&self, n: i64) -> PosetRep {
        self.term(n).cloned().unwrap_or_else(|| PosetRep::zero(self.poset.clone(), self.field))
    }

    pub fn dim(&self, n: i64, x: usize) -> usize {
        self.term(n).map_or(0, |t| t.dim(x))
    }

    pub fn dims(&self, n: i64) -> Vec<usize> {
        (0..self.poset.len()).map(|x| self.dim(n, x)).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.terms.iter().map(|t| t.total_dim()).sum()
    }

    /// The differential from degree `n` to `n + 1`, if both terms are present.
    pub fn diff(&self, n: i64) -> Option<&RepMap> {
        let i = n - self.lo;
        if i < 0 {
            return None;
        }
        self.diffs.get(i as usize)
    }

    /// Stalk of `d^n` at `x`, as a `dim(n+1, x) × dim(n, x)` matrix.
    pub fn d_at(&self, n: i64, x: usize) -> Matrix {
        match self.diff(n) {
            Some(d) => d.comp(x).clone(),
            None => Matrix::zeros(self.field, self.dim(n + 1, x), self.dim(n, x)),
        }
    }

    pub fn diff_or_zero(&self, n: i64) -> RepMap {
        match self.diff(n) {
            Some(d) => d.clone(),
            None => RepMap::zero(&self.term_or_zero(n), &self.term_or_zero(n + 1)),
        }
    }

    /// Generator tags of the degree-`n` term, when the complex is termwise injective.
    pub fn tags(&self, n: i64) -> Option<&[usize]> {
        let tags = self.tags.as_ref()?;
        let i = n - self.lo;
        if i < 0 || i as usize >= tags.len() {
            return Some(&[]);
        }
        Some(&tags[i as usize])
    }

    pub fn is_tagged(&self) -> bool {
        self.tags.is_some()
    }

    pub(crate) fn with_tags(mut self, tags: Option<Vec<Vec<usize>>>) -> Self {
        if let Some(t) = &tags {
            debug_assert_eq!(t.len(), self.terms.len());
            debug_assert!(t.iter().zip(&self.terms).all(|(g, term)| {
                *term == PosetRep::injective_sum(self.poset.clone(), self.field, g)
            }));
        }
        self.tags = tags;
        self
    }

    pub fn forget_tags(mut self) -> Self {
        self.tags = None;
        self
    }

    pub fn shift(&self, n: i64) -> Complex {
        let s = self.field.int(sign(n));
        Complex {
            poset: self.poset.clone(),
            field: self.field,
            lo: if self.terms.is_empty() { 0 } else { self.lo - n },
            terms: self.terms.clone(),
            diffs: if n.rem_euclid(2) == 0 { self.diffs.clone() } else { self.diffs.iter().map(|d| d.scale(&s)).collect() },
            tags: self.tags.clone(),
        }
    }

    /// `h^n` with its induced structure maps.
    pub fn cohomology(&self, n: i64) -> PosetRep {
        let x = self.term_or_zero(n);
        let (z, inc) = posetrep::kernel(&self.diff_or_zero(n), &x);
        // d^{n-1} factors through the cycles
        let dprev = self.diff_or_zero(n - 1);
        let comps = (0..self.poset.len())
            .map(|s| {
                inc.comp(s)
                    .solve(dprev.comp(s))
                    .expect("boundaries are cycles")
            })
            .collect();
        let into_z = RepMap::new_unchecked(comps);
        posetrep::cokernel(&into_z, &z).0
    }

    /// Stalk dimensions of `h^n`.
    pub fn cohomology_dims(&self, n: i64) -> Vec<usize> {
        (0..self.poset.len())
            .map(|x| self.dim(n, x) - self.d_at(n, x).rank() - self.d_at(n - 1, x).rank())
            .collect()
    }

    /// Degrees carrying nonzero cohomology.
    pub fn cohomology_degrees(&self) -> Vec<i64> {
        match self.range() {
            None => vec![],
            Some((a, b)) => (a..=b).filter(|&n| self.cohomology_dims(n).iter().any(|&d| d > 0)).collect(),
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.cohomology_degrees().is_empty()
    }

    /// `(min, max)` degrees of nonzero cohomology.
    pub fn amplitude(&self) -> Option<(i64, i64)> {
        let d = self.cohomology_degrees();
        Some((*d.first()?, *d.last()?))
    }

    /// Number of degrees from the lowest to the highest nonzero cohomology.
    pub fn cohomological_length(&self) -> usize {
        self.amplitude().map_or(0, |(a, b)| (b - a + 1) as usize)
    }

    /// Elements where some term is nonzero.
    pub fn term_support(&self) -> Vec<bool> {
        (0..self.poset.len()).map(|x| self.terms.iter().any(|t| t.dim(x) > 0)).collect()
    }

    /// Elements where some cohomology is nonzero.
    pub fn cohomology_support(&self) -> Vec<bool> {
        let mut out = vec![false; self.poset.len()];
        for n in self.cohomology_degrees() {
            for (x, d) in self.cohomology_dims(n).into_iter().enumerate() {
                out[x] |= d > 0;
            }
        }
        out
    }

    pub fn compatible(&self, other: &Complex) -> bool {
        same_poset(&self.poset, &other.poset) && self.field == other.field
    }

    pub fn direct_sum(parts: &[&Complex]) -> Result<Complex> {
        let first = parts.first().ok_or_else(|| Error::Shape("empty direct sum".into()))?;
        if parts.iter().any(|p| !p.compatible(first)) {
            return Err(Error::Mismatch);
        }
        let nonzero: Vec<&&Complex> = parts.iter().filter(|p| !p.is_zero()).collect();
        if nonzero.is_empty() {
            return Ok(Complex::zero(first.poset.clone(), first.field));
        }
        let lo = nonzero.iter().map(|p| p.lo).min().unwrap();
        let hi = nonzero.iter().map(|p| p.range().unwrap().1).max().unwrap();
        let tagged = parts.iter().all(|p| p.is_tagged());
        let mut terms = Vec::new();
        let mut diffs = Vec::new();
        let mut tags = Vec::new();
        for n in lo..=hi {
            let ts: Vec<PosetRep> = parts.iter().map(|p| p.term_or_zero(n)).collect();
            terms.push(PosetRep::direct_sum(&ts.iter().collect::<Vec<_>>())?);
            if tagged {
                tags.push(parts.iter().flat_map(|p| p.tags(n).unwrap().to_vec()).collect());
            }
            if n < hi {
                let ds: Vec<RepMap> = parts.iter().map(|p| p.diff_or_zero(n)).collect();
                let comps = (0..first.poset.len())
                    .map(|x| Matrix::block_diag(first.field, &ds.iter().map(|d| d.comp(x)).collect::<Vec<_>>()))
                    .collect();
                diffs.push(RepMap::new_unchecked(comps));
            }
        }
        Ok(Complex::new_unchecked(
            first.poset.clone(),
            first.field,
            lo,
            terms,
            diffs,
            if tagged { Some(tags) } else { None },
        ))
    }

    /// Restriction to a subposet with embedding `emb`. Tags survive when the
    /// subposet is up-closed.
    pub fn restrict(&self, sub: &Arc<StratPoset>, emb: &[usize]) -> Complex {
        let n = self.poset.len();
        let mut set = vec![false; n];
        for &x in emb {
            set[x] = true;
        }
        let mut pos = vec![usize::MAX; n];
        for (i, &x) in emb.iter().enumerate() {
            pos[x] = i;
        }
        let terms: Vec<PosetRep> = self.terms.iter().map(|t| t.restrict(sub, emb)).collect();
        let diffs = self.diffs.iter().map(|d| d.restrict(emb)).collect();
        let tags = match &self.tags {
            Some(tags) if self.poset.is_up_closed(&set) => Some(
                tags.iter()
                    .map(|g| g.iter().filter(|&&t| set[t]).map(|&t| pos[t]).collect())
                    .collect(),
            ),
            _ => None,
        };
        Complex { poset: sub.clone(), field: self.field, lo: self.lo, terms, diffs, tags: None }
            .with_tags_unchecked(tags)
            .trimmed()
    }

    fn with_tags_unchecked(mut self, tags: Option<Vec<Vec<usize>>>) -> Self {
        self.tags = tags;
        self
    }

    /// Extension by zero from a locally closed subposet (`self` lives on the
    /// subposet, `emb` maps it into `ambient`). Tags survive when the
    /// subposet is down-closed.
    pub fn extend_by_zero(&self, ambient: &Arc<StratPoset>, emb: &[usize]) -> Result<Complex> {
        let n = ambient.len();
        let mut set = vec![false; n];
        for &x in emb {
            set[x] = true;
        }
        let terms = self
            .terms
            .iter()
            .map(|t| t.extend_by_zero(ambient, emb))
            .collect::<Result<Vec<_>>>()?;
        let diffs = self.diffs.iter().map(|d| d.extend_by_zero(self.field, n, emb)).collect();
        let tags = match &self.tags {
            Some(tags) if ambient.is_down_closed(&set) => {
                Some(tags.iter().map(|g| g.iter().map(|&t| emb[t]).collect()).collect())
            }
            _ => None,
        };
        Ok(Complex { poset: ambient.clone(), field: self.field, lo: self.lo, terms, diffs, tags }.trimmed())
    }

    /// Stalkwise tensor product, totalized with `d ⊗ 1 + (-1)^p 1 ⊗ d`.
    pub fn tensor_pointwise(&self, other: &Complex) -> Result<Complex> {
        if !self.compatible(other) {
            return Err(Error::Mismatch);
        }
        let (Some((a0, a1)), Some((b0, b1))) = (self.range(), other.range()) else {
            return Ok(Complex::zero(self.poset.clone(), self.field));
        };
        let field = self.field;
        let np = self.poset.len();
        let mut terms = Vec::new();
        let mut diffs = Vec::new();
        let pieces = |n: i64| -> Vec<(i64, i64)> { (a0..=a1).map(|p| (p, n - p)).filter(|&(_, q)| q >= b0 && q <= b1).collect() };
        for n in a0 + b0..=a1 + b1 {
            let parts: Vec<PosetRep> = pieces(n)
                .iter()
                .map(|&(p, q)| self.term_or_zero(p).tensor(&other.term_or_zero(q)))
                .collect::<Result<_>>()?;
            terms.push(PosetRep::direct_sum(&parts.iter().collect::<Vec<_>>())?);
            if n < a1 + b1 {
                let src = pieces(n);
                let dst = pieces(n + 1);
                let comps = (0..np)
                    .map(|x| {
                        let rows: Vec<usize> = dst.iter().map(|&(p, q)| self.dim(p, x) * other.dim(q, x)).collect();
                        let cols: Vec<usize> = src.iter().map(|&(p, q)| self.dim(p, x) * other.dim(q, x)).collect();
                        let mut m = Matrix::zeros(field, rows.iter().sum(), cols.iter().sum());
                        let mut c0 = 0;
                        for (j, &(p, q)) in src.iter().enumerate() {
                            let mut r0 = 0;
                            for (i, &(p2, q2)) in dst.iter().enumerate() {
                                if p2 == p + 1 && q2 == q {
                                    let blk = self.d_at(p, x).kron(&Matrix::identity(field, other.dim(q, x)));
                                    m.set_block(r0, c0, &blk);
                                } else if p2 == p && q2 == q + 1 {
                                    let blk = Matrix::identity(field, self.dim(p, x))
                                        .kron(&other.d_at(q, x))
                                        .scale(&field.int(sign(p)));
                                    m.set_block(r0, c0, &blk);
                                }
                                r0 += rows[i];
                            }
                            c0 += cols[j];
                        }
                        m
                    })
                    .collect();
                diffs.push(RepMap::new_unchecked(comps));
            }
        }
        Ok(Complex::new_unchecked(self.poset.clone(), field, a0 + b0, terms, diffs, None))
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| format!("{}@{}", t, self.lo + i as i64))
            .collect();
        write!(f, "{}", parts.join(" -> "))
    }
}

/// A degree-0 morphism of complexes. `comps[i]` is the component in degree
/// `source.lo + i`.
#[derive(Clone, Debug)]
pub struct ChainMap {
    source: Complex,
    target: Complex,
    comps: Vec<RepMap>,
}

impl ChainMap {
    /// Components indexed by the degrees of `source` (lowest first).
    pub fn new(source: &Complex, target: &Complex, comps: Vec<RepMap>) -> Result<ChainMap> {
        if !source.compatible(target) {
            return Err(Error::Mismatch);
        }
        if comps.len() != source.terms.len() {
            return Err(Error::Shape("chain map component count".into()));
        }
        let mut checked = Vec::with_capacity(comps.len());
        for (i, c) in comps.into_iter().enumerate() {
            let n = source.lo + i as i64;
            checked.push(RepMap::new(&source.terms[i], &target.term_or_zero(n), c.comps().to_vec())?);
        }
        let f = ChainMap { source: source.clone(), target: target.clone(), comps: checked };
        if !f.commutes() {
            return Err(Error::NotAMorphism("chain map does not commute with differentials".into()));
        }
        Ok(f)
    }

    pub(crate) fn new_unchecked(source: &Complex, target: &Complex, comps: Vec<RepMap>) -> ChainMap {
        let f = ChainMap { source: source.clone(), target: target.clone(), comps };
        debug_assert!(f.commutes(), "chain map does not commute");
        f
    }

    /// Builds a chain map from stalk matrices `at(n, x)`.
    pub(crate) fn from_fn(source: &Complex, target: &Complex, mut at: impl FnMut(i64, usize) -> Matrix) -> ChainMap {
        let comps = match source.range() {
            None => vec![],
            Some((a, b)) => (a..=b)
                .map(|n| RepMap::new_unchecked((0..source.poset.len()).map(|x| at(n, x)).collect()))
                .collect(),
        };
        ChainMap::new_unchecked(source, target, comps)
    }

    pub fn zero(source: &Complex, target: &Complex) -> ChainMap {
        ChainMap::from_fn(source, target, |n, x| Matrix::zeros(source.field, target.dim(n, x), source.dim(n, x)))
    }

    pub fn identity(x: &Complex) -> ChainMap {
        ChainMap::from_fn(x, x, |n, s| Matrix::identity(x.field, x.dim(n, s)))
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    /// Stalk of the degree-`n` component at `x`.
    pub fn at(&self, n: i64, x: usize) -> Matrix {
        let i = n - self.source.lo;
        if i >= 0 && (i as usize) < self.comps.len() {
            self.comps[i as usize].comp(x).clone()
        } else {
            Matrix::zeros(self.source.field, self.target.dim(n, x), self.source.dim(n, x))
        }
    }

    pub fn comp(&self, n: i64) -> RepMap {
        RepMap::new_unchecked((0..self.source.poset.len()).map(|x| self.at(n, x)).collect())
    }

    fn commutes(&self) -> bool {
        let (s, t) = (&self.source, &self.target);
        let lo = s.range().map_or(0, |r| r.0) - 1;
        let hi = s.range().map_or(-1, |r| r.1);
        (lo..=hi).all(|n| {
            (0..s.poset.len()).all(|x| t.d_at(n, x).mul(&self.at(n, x)) == self.at(n + 1, x).mul(&s.d_at(n, x)))
        })
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &ChainMap) -> ChainMap {
        assert_eq!(other.target.total_dim(), self.source.total_dim(), "composable chain maps");
        ChainMap::from_fn(&other.source, &self.target, |n, x| self.at(n, x).mul(&other.at(n, x)))
    }

    pub fn add(&self, other: &ChainMap) -> ChainMap {
        ChainMap::from_fn(&self.source, &self.target, |n, x| self.at(n, x).add(&other.at(n, x)))
    }

    pub fn neg(&self) -> ChainMap {
        ChainMap::from_fn(&self.source, &self.target, |n, x| self.at(n, x).neg())
    }

    pub fn scale(&self, s: &crate::exactlinalg::Scalar) -> ChainMap {
        ChainMap::from_fn(&self.source, &self.target, |n, x| self.at(n, x).scale(s))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    /// `f[k]`, with components `f[k]^n = f^{n+k}`.
    pub fn shift(&self, k: i64) -> ChainMap {
        let (s, t) = (self.source.shift(k), self.target.shift(k));
        ChainMap::from_fn(&s, &t, |n, x| self.at(n + k, x))
    }

    /// Same components viewed between other complexes with identical terms.
    pub(crate) fn retarget(&self, source: &Complex, target: &Complex) -> ChainMap {
        ChainMap::from_fn(source, target, |n, x| self.at(n, x))
    }

    /// The mapping cone with its standard triangle `X → Y → cone(f) → X[1]`.
    pub fn cone(&self) -> (Complex, Triangle) {
        let c = cone_complex(self);
        let tri = Triangle::from_cone(self, &c);
        (c, tri)
    }

    pub fn is_quasi_iso(&self) -> bool {
        cone_complex(self).is_acyclic()
    }

    /// Matrix of `h^n(f)` at stalk `x` in the bases chosen by [`cohomology_basis`].
    pub fn on_cohomology(&self, n: i64, x: usize) -> Matrix {
        let (zs, qs) = cohomology_basis(&self.source, n, x);
        let (zt, qt) = cohomology_basis(&self.target, n, x);
        let reps = zs.mul(&qs.1);
        let img = self.at(n, x).mul(&reps);
        let coords = zt.solve(&img).expect("cycles map to cycles");
        qt.0.mul(&coords)
    }
}

/// At stalk `x` in degree `n`: a cycle basis `Z` and the cokernel data
/// `(q, s)` of the boundaries inside `Z`.
pub fn cohomology_basis(c: &Complex, n: i64, x: usize) -> (Matrix, (Matrix, Matrix)) {
    let z = c.d_at(n, x).kernel();
    let b = c.d_at(n - 1, x);
    let b_in_z = z.solve(&b).expect("boundaries are cycles");
    let q = b_in_z.cokernel();
    (z, q)
}

fn cone_complex(f: &ChainMap) -> Complex {
    let (x, y) = (&f.source, &f.target);
    let field = x.field;
    let np = x.poset.len();
    let lo = [x.range().map(|r| r.0 - 1), y.range().map(|r| r.0)].into_iter().flatten().min();
    let hi = [x.range().map(|r| r.1 - 1), y.range().map(|r| r.1)].into_iter().flatten().max();
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return Complex::zero(x.poset.clone(), field);
    };
    let tagged = x.is_tagged() && y.is_tagged();
    let mut terms = Vec::new();
    let mut diffs = Vec::new();
    let mut tags = Vec::new();
    for n in lo..=hi {
        terms.push(PosetRep::direct_sum(&[&x.term_or_zero(n + 1), &y.term_or_zero(n)]).unwrap());
        if tagged {
            let mut t = x.tags(n + 1).unwrap().to_vec();
            t.extend_from_slice(y.tags(n).unwrap());
            tags.push(t);
        }
        if n < hi {
            let comps = (0..np)
                .map(|s| {
                    let (xa, ya) = (x.dim(n + 1, s), y.dim(n, s));
                    let (xb, yb) = (x.dim(n + 2, s), y.dim(n + 1, s));
                    let mut m = Matrix::zeros(field, xb + yb, xa + ya);
                    m.set_block(0, 0, &x.d_at(n + 1, s).neg());
                    m.set_block(xb, 0, &f.at(n + 1, s));
                    m.set_block(xb, xa, &y.d_at(n, s));
                    m
                })
                .collect();
            diffs.push(RepMap::new_unchecked(comps));
        }
    }
    Complex::new_unchecked(x.poset.clone(), field, lo, terms, diffs, if tagged { Some(tags) } else { None })
}

/// A degree `-1` map `A → B`: `comps` in degree `n` go `A^n → B^{n-1}`.
#[derive(Clone, Debug)]
pub struct Homotopy {
    lo: i64,
    comps: Vec<RepMap>,
}

impl Homotopy {
    pub fn zero() -> Homotopy {
        Homotopy { lo: 0, comps: vec![] }
    }

    /// Stalk at `x` of the component `A^n → B^{n-1}`.
    pub fn at(&self, a: &Complex, b: &Complex, n: i64, x: usize) -> Matrix {
        let i = n - self.lo;
        if i >= 0 && (i as usize) < self.comps.len() {
            self.comps[i as usize].comp(x).clone()
        } else {
            Matrix::zeros(a.field, b.dim(n - 1, x), a.dim(n, x))
        }
    }

    pub(crate) fn from_fn(a: &Complex, mut at: impl FnMut(i64, usize) -> Matrix) -> Homotopy {
        match a.range() {
            None => Homotopy::zero(),
            Some((lo, hi)) => Homotopy {
                lo,
                comps: (lo..=hi)
                    .map(|n| RepMap::new_unchecked((0..a.poset.len()).map(|x| at(n, x)).collect()))
                    .collect(),
            },
        }
    }
}

/// A triangle `A → X → B → A[1]` together with a null-homotopy of `A → B`.
#[derive(Clone, Debug)]
pub struct Triangle {
    pub first: ChainMap,
    pub second: ChainMap,
    pub homotopy: Homotopy,
}

impl Triangle {
    pub fn a(&self) -> &Complex {
        self.first.source()
    }

    pub fn x(&self) -> &Complex {
        self.first.target()
    }

    pub fn b(&self) -> &Complex {
        self.second.target()
    }

    fn from_cone(f: &ChainMap, c: &Complex) -> Triangle {
        let (x, y) = (f.source(), f.target());
        let inc = ChainMap::from_fn(y, c, |n, s| {
            let (xa, ya) = (x.dim(n + 1, s), y.dim(n, s));
            let mut m = Matrix::zeros(x.field, xa + ya, ya);
            m.set_block(xa, 0, &Matrix::identity(x.field, ya));
            m
        });
        // a ↦ (a, 0) in cone^{n-1} = X^n ⊕ Y^{n-1}
        let h = Homotopy::from_fn(x, |n, s| {
            let (xa, ya) = (x.dim(n, s), y.dim(n - 1, s));
            let mut m = Matrix::zeros(x.field, xa + ya, xa);
            m.set_block(0, 0, &Matrix::identity(x.field, xa));
            m
        });
        Triangle { first: f.clone(), second: inc, homotopy: h }
    }

    /// A short exact sequence `0 → A → X → B → 0` of complexes.
    pub fn short_exact(first: ChainMap, second: ChainMap) -> Triangle {
        Triangle { first, second, homotopy: Homotopy::zero() }
    }

    /// The triangle `cocone(g) → X → B` for `g: X → B`, with `cocone(g) = cone(g)[-1]`.
    pub fn from_cocone(g: &ChainMap) -> Triangle {
        let (x, b) = (g.source(), g.target());
        let a = cone_complex(g).shift(-1);
        let field = x.field;
        // A^n = X^n ⊕ B^{n-1}
        let proj = ChainMap::from_fn(&a, x, |n, s| {
            let (xa, bb) = (x.dim(n, s), b.dim(n - 1, s));
            let mut m = Matrix::zeros(field, xa, xa + bb);
            m.set_block(0, 0, &Matrix::identity(field, xa));
            m
        });
        let h = Homotopy::from_fn(&a, |n, s| {
            let (xa, bb) = (x.dim(n, s), b.dim(n - 1, s));
            let mut m = Matrix::zeros(field, bb, xa + bb);
            m.set_block(0, xa, &Matrix::identity(field, bb).neg());
            m
        });
        Triangle { first: proj, second: g.clone(), homotopy: h }
    }

    pub fn zero(x: &Complex) -> Triangle {
        let z = Complex::zero(x.poset.clone(), x.field);
        Triangle::short_exact(ChainMap::zero(&z, x), ChainMap::zero(x, &z))
    }

    /// `g ∘ f = d h + h d`.
    pub fn homotopy_holds(&self) -> bool {
        let (a, b) = (self.a(), self.b());
        let Some((lo, hi)) = a.range() else { return true };
        (lo..=hi).all(|n| {
            (0..a.poset.len()).all(|x| {
                let gf = self.second.at(n, x).mul(&self.first.at(n, x));
                let dh = b.d_at(n - 1, x).mul(&self.homotopy.at(a, b, n, x));
                let hd = self.homotopy.at(a, b, n + 1, x).mul(&a.d_at(n, x));
                gf == dh.add(&hd)
            })
        })
    }

    /// The comparison map `cone(A → X) → B`, `(a, x) ↦ g(x) + h(a)`.
    pub fn comparison(&self) -> ChainMap {
        let (c, _) = self.first.cone();
        let (a, x, b) = (self.a(), self.x(), self.b());
        ChainMap::from_fn(&c, b, |n, s| {
            let _ = x;
            Matrix::hstack(a.field, b.dim(n, s), &[&self.homotopy.at(a, b, n + 1, s), &self.second.at(n, s)])
        })
    }

    /// The stored homotopy is valid and the comparison map is a quasi-isomorphism.
    pub fn is_distinguished(&self) -> bool {
        self.homotopy_holds() && self.comparison().is_quasi_iso()
    }

    /// Exactness of `h(A) → h(X) → h(B) → h(A[1])` at every node, by ranks.
    pub fn long_exact_holds(&self) -> bool {
        let (c, _) = self.first.cone();
        let cmp = self.comparison();
        if !cmp.is_quasi_iso() {
            return false;
        }
        let (a, x) = (self.a(), self.x());
        let inc = cone_inclusion(&self.first, &c);
        let proj = cone_projection(&self.first, &c);
        let lo = [a.range(), x.range(), c.range()].into_iter().flatten().map(|r| r.0).min().unwrap_or(0) - 1;
        let hi = [a.range(), x.range(), c.range()].into_iter().flatten().map(|r| r.1).max().unwrap_or(0) + 1;
        for n in lo..=hi {
            for s in 0..a.poset.len() {
                let f = self.first.on_cohomology(n, s);
                let i = inc.on_cohomology(n, s);
                let p = proj.on_cohomology(n, s);
                let f_next = self.first.on_cohomology(n + 1, s);
                let hx = x.cohomology_dims(n)[s];
                let hc = c.cohomology_dims(n)[s];
                let ha = a.cohomology_dims(n + 1)[s];
                let ok_x = i.mul(&f).is_zero() && f.rank() + i.rank() == hx;
                let ok_c = p.mul(&i).is_zero() && i.rank() + p.rank() == hc;
                let ok_a = f_next.mul(&p).is_zero() && p.rank() + f_next.rank() == ha;
                if !(ok_x && ok_c && ok_a) {
                    return false;
                }
            }
        }
        true
    }
}

fn cone_inclusion(f: &ChainMap, c: &Complex) -> ChainMap {
    Triangle::from_cone(f, c).second
}

/// `cone(f) → X[1]`, the projection `(a, y) ↦ a`.
fn cone_projection(f: &ChainMap, c: &Complex) -> ChainMap {
    let x = f.source();
    let x1 = x.shift(1);
    ChainMap::from_fn(c, &x1, |n, s| {
        let (xa, ya) = (x.dim(n + 1, s), f.target().dim(n, s));
        let mut m = Matrix::zeros(x.field, xa, xa + ya);
        m.set_block(0, 0, &Matrix::identity(x.field, xa));
        m
    })
}

/// Direction of a truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    Leq,
    Geq,
}

/// Smart truncation for the standard t-structure. For `Leq` the map is the
/// inclusion `τ^{≤n}X → X`; for `Geq` it is the projection `X → τ^{≥n}X`.
pub fn truncate_std(x: &Complex, dir: Dir, n: i64) -> (Complex, ChainMap) {
    let np = x.poset.len();
    let field = x.field;
    let Some((lo, hi)) = x.range() else {
        let z = x.clone();
        return (z.clone(), ChainMap::identity(&z));
    };
    match dir {
        Dir::Leq => {
            if n >= hi {
                return (x.clone(), ChainMap::identity(x));
            }
            if n < lo {
                let z = Complex::zero(x.poset.clone(), field);
                return (z.clone(), ChainMap::zero(&z, x));
            }
            let (k, inc) = posetrep::kernel(&x.diff_or_zero(n), &x.term_or_zero(n));
            let mut terms: Vec<PosetRep> = (lo..n).map(|m| x.term_or_zero(m)).collect();
            terms.push(k);
            let mut diffs: Vec<RepMap> = (lo..n - 1).map(|m| x.diff_or_zero(m)).collect();
            if n > lo {
                let comps = (0..np)
                    .map(|s| inc.comp(s).solve(&x.d_at(n - 1, s)).expect("image lies in kernel"))
                    .collect();
                diffs.push(RepMap::new_unchecked(comps));
            }
            let t = Complex::new_unchecked(x.poset.clone(), field, lo, terms, diffs, None);
            let map = ChainMap::from_fn(&t, x, |m, s| if m == n { inc.comp(s).clone() } else { Matrix::identity(field, x.dim(m, s)) });
            (t, map)
        }
        Dir::Geq => {
            if n <= lo {
                return (x.clone(), ChainMap::identity(x));
            }
            if n > hi {
                let z = Complex::zero(x.poset.clone(), field);
                return (z.clone(), ChainMap::zero(x, &z));
            }
            let (q, proj) = posetrep::cokernel(&x.diff_or_zero(n - 1), &x.term_or_zero(n));
            let mut terms = vec![q];
            terms.extend((n + 1..=hi).map(|m| x.term_or_zero(m)));
            let mut diffs = Vec::new();
            if n < hi {
                let comps = (0..np)
                    .map(|s| {
                        // d^n vanishes on boundaries, so it factors through the quotient
                        let (_, sec) = x.d_at(n - 1, s).cokernel();
                        x.d_at(n, s).mul(&sec)
                    })
                    .collect();
                diffs.push(RepMap::new_unchecked(comps));
            }
            diffs.extend((n + 1..hi).map(|m| x.diff_or_zero(m)));
            let t = Complex::new_unchecked(x.poset.clone(), field, n, terms, diffs, None);
            let map = ChainMap::from_fn(x, &t, |m, s| {
                if m == n {
                    proj.comp(s).clone()
                } else if m > n {
                    Matrix::identity(field, x.dim(m, s))
                } else {
                    Matrix::zeros(field, t.dim(m, s), x.dim(m, s))
                }
            });
            (t, map)
        }
    }
}

/// `[a, b]` with `X ∈ D^{≥a} ∩ D^{≤b}` for the standard t-structure.
pub fn std_bounds(x: &Complex) -> Option<(i64, i64)> {
    x.amplitude()
}

pub fn cone(f: &ChainMap) -> (Complex, Triangle) {
    f.cone()
}

pub fn shift(x: &Complex, n: i64) -> Complex {
    x.shift(n)
}

pub fn cohomology(x: &Complex, k: i64) -> PosetRep {
    x.cohomology(k)
}

pub fn is_quasi_iso(f: &ChainMap) -> bool {
    f.is_quasi_iso()
}

pub fn tensor_pointwise(x: &Complex, y: &Complex) -> Result<Complex> {
    x.tensor_pointwise(y)
}
