//! Representations of a finite stratification poset.
//!
//! For `x ≤ y` a representation carries a map `F_x → F_y`. Up-closed subsets
//! are open, down-closed subsets are closed. The injective `I_x` has a line at
//! every `y ≤ x`; the projective `P_x` has a line at every `y ≥ x`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::derivedcat::Complex;
use crate::error::{Error, Result};
use crate::exactlinalg::{Field, Matrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratPoset {
    names: Vec<String>,
    leq: Vec<Vec<bool>>,
    covers: Vec<(usize, usize)>,
    levels: Vec<i64>,
    topo: Vec<usize>,
    // next[x][y]: index of a cover (x, z) with z ≤ y, for x < y
    next: Vec<Vec<Option<usize>>>,
}

impl StratPoset {
    /// Builds the poset generated by `relations` (pairs `x ≤ y`) on `names`.
    pub fn new(names: Vec<String>, relations: &[(usize, usize)], levels: Vec<i64>) -> Result<Self> {
        let n = names.len();
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateElement(name.clone()));
            }
        }
        if levels.len() != n {
            return Err(Error::Shape(format!("{} levels for {} elements", levels.len(), n)));
        }
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(x, y) in relations {
            if x >= n || y >= n {
                return Err(Error::UnknownElement(format!("#{}", x.max(y))));
            }
            leq[x][y] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::NotAntisymmetric(names[i].clone(), names[j].clone()));
                }
            }
        }
        let mut covers = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if x != y && leq[x][y] && !(0..n).any(|z| z != x && z != y && leq[x][z] && leq[z][y]) {
                    covers.push((x, y));
                }
            }
        }
        let mut topo: Vec<usize> = (0..n).collect();
        topo.sort_by_key(|&x| ((0..n).filter(|&z| leq[z][x]).count(), x));
        let mut next = vec![vec![None; n]; n];
        for x in 0..n {
            for y in 0..n {
                if x != y && leq[x][y] {
                    next[x][y] = covers.iter().position(|&(a, b)| a == x && leq[b][y]);
                }
            }
        }
        Ok(StratPoset { names, leq, covers, levels, topo, next })
    }

    pub fn from_names(names: &[&str], relations: &[(&str, &str)], levels: &[i64]) -> Result<Self> {
        let owned: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let idx = |s: &str| -> Result<usize> {
            owned.iter().position(|n| n == s).ok_or_else(|| Error::UnknownElement(s.to_string()))
        };
        let rels = relations
            .iter()
            .map(|(a, b)| Ok((idx(a)?, idx(b)?)))
            .collect::<Result<Vec<_>>>()?;
        StratPoset::new(owned, &rels, levels.to_vec())
    }

    /// The chain `names[0] ≤ names[1] ≤ …`.
    pub fn chain(names: &[&str], levels: &[i64]) -> Result<Self> {
        let rels: Vec<(&str, &str)> = names.windows(2).map(|w| (w[0], w[1])).collect();
        StratPoset::from_names(names, &rels, levels)
    }

    pub fn discrete(names: Vec<String>, levels: Vec<i64>) -> Result<Self> {
        StratPoset::new(names, &[], levels)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x][y]
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn levels(&self) -> &[i64] {
        &self.levels
    }

    pub fn level(&self, x: usize) -> i64 {
        self.levels[x]
    }

    pub fn with_levels(&self, levels: Vec<i64>) -> Result<Self> {
        if levels.len() != self.len() {
            return Err(Error::Shape("level count".into()));
        }
        Ok(StratPoset { levels, ..self.clone() })
    }

    /// Elements sorted so that `x < y` implies `x` comes first.
    pub fn linear_extension(&self) -> &[usize] {
        &self.topo
    }

    pub fn is_discrete(&self) -> bool {
        self.covers.is_empty()
    }

    pub fn is_down_closed(&self, set: &[bool]) -> bool {
        (0..self.len()).all(|y| !set[y] || (0..self.len()).all(|x| !self.leq[x][y] || set[x]))
    }

    pub fn is_up_closed(&self, set: &[bool]) -> bool {
        (0..self.len()).all(|x| !set[x] || (0..self.len()).all(|y| !self.leq[x][y] || set[y]))
    }

    /// `x ≤ z ≤ y` with `x, y` in the set forces `z` into the set.
    pub fn is_locally_closed(&self, set: &[bool]) -> bool {
        let n = self.len();
        (0..n).all(|z| {
            set[z]
                || !(0..n).any(|x| set[x] && self.leq[x][z])
                || !(0..n).any(|y| set[y] && self.leq[z][y])
        })
    }

    pub fn down_set(&self, x: usize) -> Vec<bool> {
        (0..self.len()).map(|y| self.leq[y][x]).collect()
    }

    pub fn up_set(&self, x: usize) -> Vec<bool> {
        (0..self.len()).map(|y| self.leq[x][y]).collect()
    }

    /// `{x : level(x) ≤ w}`
    pub fn level_set(&self, w: i64) -> Vec<bool> {
        self.levels.iter().map(|&l| l <= w).collect()
    }

    /// Number of covers in a longest chain.
    pub fn depth(&self) -> usize {
        let mut best = vec![0usize; self.len()];
        for &y in &self.topo {
            for &(a, b) in &self.covers {
                if b == y {
                    best[y] = best[y].max(best[a] + 1);
                }
            }
        }
        best.into_iter().max().unwrap_or(0)
    }

    /// Cover indices along a fixed chain from `x` to `y`.
    pub fn path(&self, x: usize, y: usize) -> Vec<usize> {
        assert!(self.leq[x][y], "path requires x <= y");
        let mut out = Vec::new();
        let mut cur = x;
        while cur != y {
            let c = self.next[cur][y].expect("cover chain");
            out.push(c);
            cur = self.covers[c].1;
        }
        out
    }

    /// The induced subposet on `set`, with its embedding into `self`.
    pub fn subposet(&self, set: &[bool]) -> (StratPoset, Vec<usize>) {
        let emb: Vec<usize> = (0..self.len()).filter(|&x| set[x]).collect();
        let names = emb.iter().map(|&x| self.names[x].clone()).collect();
        let levels = emb.iter().map(|&x| self.levels[x]).collect();
        let mut rels = Vec::new();
        for (i, &a) in emb.iter().enumerate() {
            for (j, &b) in emb.iter().enumerate() {
                if i != j && self.leq[a][b] {
                    rels.push((i, j));
                }
            }
        }
        (StratPoset::new(names, &rels, levels).expect("subposet of a poset"), emb)
    }
}

impl fmt::Display for StratPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self
            .covers
            .iter()
            .map(|&(a, b)| format!("{}<{}", self.names[a], self.names[b]))
            .collect();
        write!(f, "{{{}}} [{}]", self.names.join(","), rels.join(","))
    }
}

/// A finite-dimensional representation: one vector space per element and one
/// matrix per covering relation.
#[derive(Clone, Debug)]
pub struct PosetRep {
    poset: Arc<StratPoset>,
    field: Field,
    dims: Vec<usize>,
    maps: Vec<Matrix>,
}

impl PartialEq for PosetRep {
    fn eq(&self, other: &Self) -> bool {
        same_poset(&self.poset, &other.poset)
            && self.field == other.field
            && self.dims == other.dims
            && self.maps == other.maps
    }
}

pub(crate) fn same_poset(a: &Arc<StratPoset>, b: &Arc<StratPoset>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl PosetRep {
    pub fn new(poset: Arc<StratPoset>, field: Field, dims: Vec<usize>, maps: Vec<Matrix>) -> Result<Self> {
        let rep = PosetRep { poset, field, dims, maps };
        rep.validate()?;
        Ok(rep)
    }

    fn validate(&self) -> Result<()> {
        let p = &self.poset;
        if self.dims.len() != p.len() {
            return Err(Error::Shape(format!("{} dims for {} elements", self.dims.len(), p.len())));
        }
        if self.maps.len() != p.covers().len() {
            return Err(Error::Shape(format!("{} maps for {} covers", self.maps.len(), p.covers().len())));
        }
        for (i, &(a, b)) in p.covers().iter().enumerate() {
            let m = &self.maps[i];
            if m.field() != self.field {
                return Err(Error::Mismatch);
            }
            if m.rows() != self.dims[b] || m.cols() != self.dims[a] {
                return Err(Error::Shape(format!(
                    "map {}<{} is {}x{}, expected {}x{}",
                    p.name(a),
                    p.name(b),
                    m.rows(),
                    m.cols(),
                    self.dims[b],
                    self.dims[a]
                )));
            }
        }
        // every way of reaching y from x must give the same composite
        for x in 0..p.len() {
            let mut from_x: Vec<Option<Matrix>> = vec![None; p.len()];
            from_x[x] = Some(Matrix::identity(self.field, self.dims[x]));
            for &y in p.linear_extension() {
                if y == x || !p.leq(x, y) {
                    continue;
                }
                for (i, &(a, b)) in p.covers().iter().enumerate() {
                    if b != y || !p.leq(x, a) {
                        continue;
                    }
                    let via = self.maps[i].mul(from_x[a].as_ref().expect("topological order"));
                    match &from_x[y] {
                        None => from_x[y] = Some(via),
                        Some(prev) if *prev != via => {
                            return Err(Error::NotFunctorial(format!("{} to {}", p.name(x), p.name(y))));
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(())
    }

    pub(crate) fn new_unchecked(poset: Arc<StratPoset>, field: Field, dims: Vec<usize>, maps: Vec<Matrix>) -> Self {
        debug_assert!(PosetRep { poset: poset.clone(), field, dims: dims.clone(), maps: maps.clone() }
            .validate()
            .is_ok());
        PosetRep { poset, field, dims, maps }
    }

    pub fn zero(poset: Arc<StratPoset>, field: Field) -> Self {
        let dims = vec![0; poset.len()];
        let maps = poset.covers().iter().map(|_| Matrix::zeros(field, 0, 0)).collect();
        PosetRep { poset, field, dims, maps }
    }

    /// One line at `x`.
    pub fn simple(poset: Arc<StratPoset>, field: Field, x: usize) -> Self {
        let mut dims = vec![0; poset.len()];
        dims[x] = 1;
        PosetRep::from_dims_identity(poset, field, dims)
    }

    /// Lines on the down-set of `x` with identity maps.
    pub fn injective(poset: Arc<StratPoset>, field: Field, x: usize) -> Self {
        let dims = (0..poset.len()).map(|y| poset.leq(y, x) as usize).collect();
        PosetRep::from_dims_identity(poset, field, dims)
    }

    /// Lines on the up-set of `x` with identity maps.
    pub fn projective(poset: Arc<StratPoset>, field: Field, x: usize) -> Self {
        let dims = (0..poset.len()).map(|y| poset.leq(x, y) as usize).collect();
        PosetRep::from_dims_identity(poset, field, dims)
    }

    /// The constant representation: a line everywhere, identity maps.
    pub fn constant(poset: Arc<StratPoset>, field: Field) -> Self {
        let dims = vec![1; poset.len()];
        PosetRep::from_dims_identity(poset, field, dims)
    }

    /// Dimensions in {0, 1} on a locally closed set, identity maps where both ends are lines.
    fn from_dims_identity(poset: Arc<StratPoset>, field: Field, dims: Vec<usize>) -> Self {
        let maps = poset
            .covers()
            .iter()
            .map(|&(a, b)| {
                if dims[a] == 1 && dims[b] == 1 {
                    Matrix::identity(field, 1)
                } else {
                    Matrix::zeros(field, dims[b], dims[a])
                }
            })
            .collect();
        PosetRep::new_unchecked(poset, field, dims, maps)
    }

    /// The direct sum `⊕_g I_{tags[g]}`. The stalk at `y` has one basis vector for
    /// each generator with tag `≥ y`, in generator order.
    pub fn injective_sum(poset: Arc<StratPoset>, field: Field, tags: &[usize]) -> Self {
        let n = poset.len();
        let stalk: Vec<Vec<usize>> =
            (0..n).map(|y| (0..tags.len()).filter(|&g| poset.leq(y, tags[g])).collect()).collect();
        let dims = stalk.iter().map(|s| s.len()).collect();
        let maps = poset
            .covers()
            .iter()
            .map(|&(a, b)| selection(field, &stalk[b], &stalk[a]))
            .collect();
        PosetRep { poset, field, dims, maps }
    }

    pub fn poset(&self) -> &Arc<StratPoset> {
        &self.poset
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, x: usize) -> usize {
        self.dims[x]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    pub fn support(&self) -> Vec<bool> {
        self.dims.iter().map(|&d| d > 0).collect()
    }

    pub fn cover_map(&self, i: usize) -> &Matrix {
        &self.maps[i]
    }

    pub fn cover_maps(&self) -> &[Matrix] {
        &self.maps
    }

    /// The structure map `F_x → F_y` for `x ≤ y`.
    pub fn map_between(&self, x: usize, y: usize) -> Matrix {
        let mut m = Matrix::identity(self.field, self.dims[x]);
        for c in self.poset.path(x, y) {
            m = self.maps[c].mul(&m);
        }
        m
    }

    pub fn compatible(&self, other: &PosetRep) -> bool {
        same_poset(&self.poset, &other.poset) && self.field == other.field
    }

    pub fn direct_sum(parts: &[&PosetRep]) -> Result<PosetRep> {
        let first = parts.first().ok_or_else(|| Error::Shape("empty direct sum".into()))?;
        if parts.iter().any(|p| !p.compatible(first)) {
            return Err(Error::Mismatch);
        }
        let (poset, field) = (first.poset.clone(), first.field);
        let dims = (0..poset.len()).map(|x| parts.iter().map(|p| p.dims[x]).sum()).collect();
        let maps = (0..poset.covers().len())
            .map(|i| Matrix::block_diag(field, &parts.iter().map(|p| &p.maps[i]).collect::<Vec<_>>()))
            .collect();
        Ok(PosetRep { poset, field, dims, maps })
    }

    /// Stalkwise tensor product.
    pub fn tensor(&self, other: &PosetRep) -> Result<PosetRep> {
        if !self.compatible(other) {
            return Err(Error::Mismatch);
        }
        let dims = self.dims.iter().zip(&other.dims).map(|(a, b)| a * b).collect();
        let maps = self.maps.iter().zip(&other.maps).map(|(a, b)| a.kron(b)).collect();
        Ok(PosetRep { poset: self.poset.clone(), field: self.field, dims, maps })
    }

    /// Restriction to the subposet with embedding `emb`.
    pub fn restrict(&self, sub: &Arc<StratPoset>, emb: &[usize]) -> PosetRep {
        let dims = emb.iter().map(|&x| self.dims[x]).collect();
        let maps = sub
            .covers()
            .iter()
            .map(|&(a, b)| self.map_between(emb[a], emb[b]))
            .collect();
        PosetRep { poset: sub.clone(), field: self.field, dims, maps }
    }

    /// Extension by zero from a locally closed subposet (embedding `emb`) of `ambient`.
    pub fn extend_by_zero(&self, ambient: &Arc<StratPoset>, emb: &[usize]) -> Result<PosetRep> {
        let n = ambient.len();
        let mut set = vec![false; n];
        let mut pos = vec![usize::MAX; n];
        for (i, &x) in emb.iter().enumerate() {
            set[x] = true;
            pos[x] = i;
        }
        if !ambient.is_locally_closed(&set) {
            return Err(Error::BadSubset("locally closed"));
        }
        let dims: Vec<usize> = (0..n).map(|x| if set[x] { self.dims[pos[x]] } else { 0 }).collect();
        let maps = ambient
            .covers()
            .iter()
            .map(|&(a, b)| {
                if set[a] && set[b] {
                    self.map_between(pos[a], pos[b])
                } else {
                    Matrix::zeros(self.field, dims[b], dims[a])
                }
            })
            .collect();
        Ok(PosetRep { poset: ambient.clone(), field: self.field, dims, maps })
    }

    /// The subrepresentation spanned stalkwise by the columns of `bases[x]`,
    /// which must be linearly independent and closed under the structure maps.
    pub fn subrep(&self, bases: Vec<Matrix>) -> Result<(PosetRep, RepMap)> {
        let p = self.poset.clone();
        let dims: Vec<usize> = bases.iter().map(|b| b.cols()).collect();
        let mut maps = Vec::with_capacity(p.covers().len());
        for (i, &(a, b)) in p.covers().iter().enumerate() {
            let img = self.maps[i].mul(&bases[a]);
            let m = bases[b]
                .solve(&img)
                .ok_or_else(|| Error::NotAMorphism("subspaces are not closed under structure maps".into()))?;
            maps.push(m);
        }
        let sub = PosetRep::new_unchecked(p, self.field, dims, maps);
        let inc = RepMap::new_unchecked(bases);
        Ok((sub, inc))
    }

    /// The quotient by the image of `f: G → self`, with its projection.
    pub fn quotient(&self, f: &RepMap) -> (PosetRep, RepMap) {
        cokernel(f, self)
    }
}

/// The 0/1 matrix sending basis vector `src[j]` to basis vector `dst[i]` when
/// they carry the same generator index.
fn selection(field: Field, dst: &[usize], src: &[usize]) -> Matrix {
    let mut m = Matrix::zeros(field, dst.len(), src.len());
    let one = field.one();
    for (j, g) in src.iter().enumerate() {
        if let Some(i) = dst.iter().position(|h| h == g) {
            m.set(i, j, &one);
        }
    }
    m
}

impl fmt::Display for PosetRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.poset.len())
            .filter(|&x| self.dims[x] > 0)
            .map(|x| format!("{}:{}", self.poset.name(x), self.dims[x]))
            .collect();
        write!(f, "({})", parts.join(" "))
    }
}

/// A morphism of representations, one matrix per element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepMap {
    comps: Vec<Matrix>,
}

impl RepMap {
    pub fn new(source: &PosetRep, target: &PosetRep, comps: Vec<Matrix>) -> Result<Self> {
        if !source.compatible(target) {
            return Err(Error::Mismatch);
        }
        let p = &source.poset;
        if comps.len() != p.len() {
            return Err(Error::Shape("component count".into()));
        }
        for x in 0..p.len() {
            if comps[x].rows() != target.dims[x] || comps[x].cols() != source.dims[x] {
                return Err(Error::Shape(format!("component at {}", p.name(x))));
            }
        }
        let f = RepMap { comps };
        if !f.commutes(source, target) {
            return Err(Error::NotAMorphism("square does not commute".into()));
        }
        Ok(f)
    }

    pub(crate) fn new_unchecked(comps: Vec<Matrix>) -> Self {
        RepMap { comps }
    }

    pub fn commutes(&self, source: &PosetRep, target: &PosetRep) -> bool {
        source.poset.covers().iter().enumerate().all(|(i, &(a, b))| {
            target.maps[i].mul(&self.comps[a]) == self.comps[b].mul(&source.maps[i])
        })
    }

    pub fn zero(source: &PosetRep, target: &PosetRep) -> Self {
        let comps = (0..source.poset.len())
            .map(|x| Matrix::zeros(source.field, target.dims[x], source.dims[x]))
            .collect();
        RepMap { comps }
    }

    pub fn identity(f: &PosetRep) -> Self {
        RepMap { comps: f.dims.iter().map(|&d| Matrix::identity(f.field, d)).collect() }
    }

    pub fn comp(&self, x: usize) -> &Matrix {
        &self.comps[x]
    }

    pub fn comps(&self) -> &[Matrix] {
        &self.comps
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &RepMap) -> RepMap {
        RepMap { comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.mul(b)).collect() }
    }

    pub fn add(&self, other: &RepMap) -> RepMap {
        RepMap { comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn neg(&self) -> RepMap {
        RepMap { comps: self.comps.iter().map(|a| a.neg()).collect() }
    }

    pub fn scale(&self, s: &crate::exactlinalg::Scalar) -> RepMap {
        RepMap { comps: self.comps.iter().map(|a| a.scale(s)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|m| m.is_zero())
    }

    pub fn restrict(&self, emb: &[usize]) -> RepMap {
        RepMap { comps: emb.iter().map(|&x| self.comps[x].clone()).collect() }
    }

    /// Extension by zero along `emb` into an ambient poset with `n` elements.
    pub fn extend_by_zero(&self, field: Field, n: usize, emb: &[usize]) -> RepMap {
        let mut comps: Vec<Matrix> = (0..n).map(|_| Matrix::zeros(field, 0, 0)).collect();
        for (i, &x) in emb.iter().enumerate() {
            comps[x] = self.comps[i].clone();
        }
        RepMap { comps }
    }

    /// Block matrix map `⊕_j src_j → ⊕_i dst_i` from components `blocks[i][j]`.
    pub fn block(
        field: Field,
        n: usize,
        dst_dims: &[&[usize]],
        src_dims: &[&[usize]],
        blocks: &[Vec<Option<&RepMap>>],
    ) -> RepMap {
        let comps = (0..n)
            .map(|x| {
                let rows: usize = dst_dims.iter().map(|d| d[x]).sum();
                let cols: usize = src_dims.iter().map(|d| d[x]).sum();
                let mut m = Matrix::zeros(field, rows, cols);
                let mut r0 = 0;
                for (i, dd) in dst_dims.iter().enumerate() {
                    let mut c0 = 0;
                    for (j, sd) in src_dims.iter().enumerate() {
                        if let Some(f) = blocks[i][j] {
                            m.set_block(r0, c0, &f.comps[x]);
                        }
                        c0 += sd[x];
                    }
                    r0 += dd[x];
                }
                m
            })
            .collect();
        RepMap { comps }
    }
}

/// Basis of all morphisms `F → G`, from the null space of the commuting-square system.
pub fn hom_basis(f: &PosetRep, g: &PosetRep) -> Result<Vec<RepMap>> {
    if !f.compatible(g) {
        return Err(Error::Mismatch);
    }
    let p = &f.poset;
    let field = f.field;
    let mut offset = vec![0usize; p.len() + 1];
    for x in 0..p.len() {
        offset[x + 1] = offset[x] + g.dims[x] * f.dims[x];
    }
    let unknowns = offset[p.len()];
    let eq_count: usize = p.covers().iter().map(|&(a, b)| g.dims[b] * f.dims[a]).sum();
    let mut sys = Matrix::zeros(field, eq_count, unknowns);
    let mut row = 0;
    for (i, &(a, b)) in p.covers().iter().enumerate() {
        let (gm, fm) = (&g.maps[i], &f.maps[i]);
        for r in 0..g.dims[b] {
            for c in 0..f.dims[a] {
                // (G_ab φ_a)[r][c] - (φ_b F_ab)[r][c]
                for k in 0..g.dims[a] {
                    if !gm.is_entry_zero(r, k) {
                        let col = offset[a] + k * f.dims[a] + c;
                        let cur = sys.get(row, col);
                        sys.set(row, col, &cur.add(&gm.get(r, k)));
                    }
                }
                for k in 0..f.dims[b] {
                    if !fm.is_entry_zero(k, c) {
                        let col = offset[b] + r * f.dims[b] + k;
                        let cur = sys.get(row, col);
                        sys.set(row, col, &cur.sub(&fm.get(k, c)));
                    }
                }
                row += 1;
            }
        }
    }
    let ker = sys.kernel();
    let mut out = Vec::with_capacity(ker.cols());
    for t in 0..ker.cols() {
        let comps = (0..p.len())
            .map(|x| {
                let mut m = Matrix::zeros(field, g.dims[x], f.dims[x]);
                for r in 0..g.dims[x] {
                    for c in 0..f.dims[x] {
                        let idx = offset[x] + r * f.dims[x] + c;
                        if !ker.is_entry_zero(idx, t) {
                            m.set(r, c, &ker.get(idx, t));
                        }
                    }
                }
                m
            })
            .collect();
        out.push(RepMap { comps });
    }
    Ok(out)
}

/// Stalkwise kernel of `f: F → G` with its inclusion.
pub fn kernel(f: &RepMap, source: &PosetRep) -> (PosetRep, RepMap) {
    let bases: Vec<Matrix> = f.comps.iter().map(|m| m.kernel()).collect();
    source.subrep(bases).expect("kernels form a subrepresentation")
}

/// Stalkwise cokernel of `f: F → G` with its projection.
pub fn cokernel(f: &RepMap, target: &PosetRep) -> (PosetRep, RepMap) {
    let p = target.poset.clone();
    let field = target.field;
    let qs: Vec<(Matrix, Matrix)> = f.comps.iter().map(|m| m.cokernel()).collect();
    let dims = qs.iter().map(|(q, _)| q.rows()).collect();
    let maps = p
        .covers()
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| qs[b].0.mul(&target.maps[i]).mul(&qs[a].1))
        .collect();
    let coker = PosetRep::new_unchecked(p, field, dims, maps);
    let proj = RepMap { comps: qs.into_iter().map(|(q, _)| q).collect() };
    (coker, proj)
}

/// Stalkwise image of `f` as a subrepresentation of the target.
pub fn image(f: &RepMap, target: &PosetRep) -> (PosetRep, RepMap) {
    let bases: Vec<Matrix> = f.comps.iter().map(|m| m.image()).collect();
    target.subrep(bases).expect("images form a subrepresentation")
}

pub fn simple_object(poset: &Arc<StratPoset>, field: Field, x: usize) -> PosetRep {
    PosetRep::simple(poset.clone(), field, x)
}

pub fn injective_object(poset: &Arc<StratPoset>, field: Field, x: usize) -> PosetRep {
    PosetRep::injective(poset.clone(), field, x)
}

pub fn projective_object(poset: &Arc<StratPoset>, field: Field, x: usize) -> PosetRep {
    PosetRep::projective(poset.clone(), field, x)
}

/// Injective resolution of `f` placed in degrees `0..=L`, with `L` at most the poset depth.
pub fn injective_resolution(f: &PosetRep) -> Complex {
    crate::derivedcat::resolve(&Complex::from_rep(f, 0)).model
}

/// Largest subrepresentation supported in `t`: for `x ∈ t` the intersection of
/// the kernels of `F_x → F_y` over `y ∉ t` with `x ≤ y`.
pub fn max_subobject_in_support(f: &PosetRep, t: &[bool]) -> (PosetRep, RepMap) {
    let p = &f.poset;
    let bases = (0..p.len())
        .map(|x| {
            if !t[x] {
                return Matrix::zeros(f.field, f.dims[x], 0);
            }
            let outs: Vec<Matrix> = (0..p.len())
                .filter(|&y| !t[y] && p.leq(x, y))
                .map(|y| f.map_between(x, y))
                .collect();
            let stacked = Matrix::vstack(f.field, f.dims[x], &outs.iter().collect::<Vec<_>>());
            stacked.kernel()
        })
        .collect();
    f.subrep(bases).expect("supported subobject")
}

/// The quotient of `f` by its largest subrepresentation supported off `t`.
pub fn max_quotient_in_support(f: &PosetRep, t: &[bool]) -> (PosetRep, RepMap) {
    let comp: Vec<bool> = t.iter().map(|&b| !b).collect();
    let (_, inc) = max_subobject_in_support(f, &comp);
    cokernel(&inc, f)
}
