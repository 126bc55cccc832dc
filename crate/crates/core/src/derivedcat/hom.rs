//! The Hom complex `Hom(X, J)` into a termwise-injective complex, in Yoneda
//! coordinates: a map `X^p → J^q` is one functional on `X^p_{t(g)}` for each
//! generator `g` of `J^q`.

use std::sync::OnceLock;

use super::resolve::{resolve, tagged_matrix};
use super::{sign, ChainMap, Complex, Homotopy};
use crate::exactlinalg::{Field, Matrix};

#[derive(Clone, Debug)]
struct Block {
    p: i64,
    j: usize,
    tag: usize,
    offset: usize,
    len: usize,
}

#[derive(Clone, Debug, Default)]
struct Layout {
    blocks: Vec<Block>,
    // index of the first block for each source degree
    first: Vec<usize>,
    size: usize,
}

/// `Hom^n(X, J) = ∏_p Hom(X^p, J^{p+n})` with `D φ = d_J φ - (-1)^n φ d_X`.
#[derive(Debug)]
pub struct HomComplex {
    src: Complex,
    tgt: Complex,
    plo: i64,
    phi: i64,
    nlo: i64,
    layouts: Vec<Layout>,
    tagged_d: Vec<Matrix>,
    diffs: Vec<OnceLock<Matrix>>,
}

impl HomComplex {
    /// `tgt` must be termwise injective (see [`resolve`]).
    pub fn new(src: &Complex, tgt: &Complex) -> HomComplex {
        assert!(tgt.is_tagged(), "Hom complex target must be an injective model");
        assert!(src.compatible(tgt), "Hom complex over different posets");
        let poset = src.poset().clone();
        let field = src.field();
        let (plo, phi) = src.range().unwrap_or((0, -1));
        let (tlo, thi) = tgt.range().unwrap_or((0, -1));
        let empty = src.is_zero() || tgt.is_zero();
        let (nlo, nhi) = if empty { (0, -1) } else { (tlo - phi, thi - plo) };
        let mut layouts = Vec::new();
        for n in nlo..=nhi {
            let mut lay = Layout::default();
            for p in plo..=phi {
                lay.first.push(lay.blocks.len());
                for (j, &t) in tgt.tags(p + n).unwrap().iter().enumerate() {
                    let len = src.dim(p, t);
                    lay.blocks.push(Block { p, j, tag: t, offset: lay.size, len });
                    lay.size += len;
                }
            }
            layouts.push(lay);
        }
        let tagged_d = match tgt.range() {
            None => vec![],
            Some((a, b)) => (a..=b)
                .map(|m| tagged_matrix(&poset, field, tgt.tags(m).unwrap(), tgt.tags(m + 1).unwrap(), &tgt.diff_or_zero(m)))
                .collect(),
        };
        let diffs = (0..layouts.len()).map(|_| OnceLock::new()).collect();
        HomComplex { src: src.clone(), tgt: tgt.clone(), plo, phi, nlo, layouts, tagged_d, diffs }
    }

    fn field(&self) -> Field {
        self.src.field()
    }

    fn layout(&self, n: i64) -> Option<&Layout> {
        let i = n - self.nlo;
        if i < 0 {
            return None;
        }
        self.layouts.get(i as usize)
    }

    /// Degrees `n` with `Hom^n` possibly nonzero.
    pub fn degrees(&self) -> Option<(i64, i64)> {
        if self.layouts.is_empty() {
            None
        } else {
            Some((self.nlo, self.nlo + self.layouts.len() as i64 - 1))
        }
    }

    /// Dimension of `Hom^n`.
    pub fn dim(&self, n: i64) -> usize {
        self.layout(n).map_or(0, |l| l.size)
    }

    fn block(&self, n: i64, p: i64, j: usize) -> &Block {
        let lay = self.layout(n).unwrap();
        &lay.blocks[lay.first[(p - self.plo) as usize] + j]
    }

    fn tgt_d(&self, m: i64) -> Option<&Matrix> {
        let (a, _) = self.tgt.range()?;
        let i = m - a;
        if i < 0 {
            return None;
        }
        self.tagged_d.get(i as usize)
    }

    /// The differential `Hom^n → Hom^{n+1}`.
    pub fn d(&self, n: i64) -> Matrix {
        let i = n - self.nlo;
        if i >= 0 && (i as usize) < self.diffs.len() {
            return self.diffs[i as usize].get_or_init(|| self.build_d(n)).clone();
        }
        Matrix::zeros(self.field(), self.dim(n + 1), self.dim(n))
    }

    fn build_d(&self, n: i64) -> Matrix {
        let field = self.field();
        let mut m = Matrix::zeros(field, self.dim(n + 1), self.dim(n));
        let Some(next) = self.layout(n + 1) else { return m };
        if self.layout(n).is_none() {
            return m;
        }
        let eps = field.int(-sign(n));
        for b in &next.blocks {
            if b.len == 0 {
                continue;
            }
            // d_J ∘ φ
            if let Some(dj) = self.tgt_d(b.p + n) {
                for j in 0..dj.cols() {
                    if dj.is_entry_zero(b.j, j) {
                        continue;
                    }
                    let cb = self.block(n, b.p, j);
                    if cb.len == 0 {
                        continue;
                    }
                    let s = self.src.term(b.p).unwrap().map_between(b.tag, cb.tag);
                    m.add_block(b.offset, cb.offset, &s.transpose().scale(&dj.get(b.j, j)));
                }
            }
            // -(-1)^n φ ∘ d_X
            if b.p < self.phi {
                let cb = self.block(n, b.p + 1, b.j);
                if cb.len > 0 {
                    let dx = self.src.d_at(b.p, b.tag);
                    m.add_block(b.offset, cb.offset, &dx.transpose().scale(&eps));
                }
            }
        }
        m
    }

    /// `dim H^n`.
    pub fn h_dim(&self, n: i64) -> usize {
        let dim = self.dim(n);
        if dim == 0 {
            return 0;
        }
        dim - self.d(n).rank() - self.d(n - 1).rank()
    }

    /// Cycles in `Hom^n` whose classes form a basis of `H^n`, as columns.
    pub fn h_basis(&self, n: i64) -> Matrix {
        let field = self.field();
        let z = self.d(n).kernel();
        let b = self.d(n - 1).image();
        let both = Matrix::hstack(field, self.dim(n), &[&b, &z]);
        let (_, pivots) = both.rref();
        let picks: Vec<usize> = pivots.iter().filter(|&&c| c >= b.cols()).map(|&c| c - b.cols()).collect();
        z.select_cols(&picks)
    }

    /// Coordinates of a family of maps `X^p → J^{p+n}` given by stalk matrices `at(p, y)`.
    pub fn coords(&self, n: i64, at: impl Fn(i64, usize) -> Matrix) -> Matrix {
        let mut v = Matrix::zeros(self.field(), self.dim(n), 1);
        let Some(lay) = self.layout(n) else { return v };
        let poset = self.src.poset();
        for b in &lay.blocks {
            if b.len == 0 {
                continue;
            }
            let m = at(b.p, b.tag);
            let tags = self.tgt.tags(b.p + n).unwrap();
            let row = (0..b.j).filter(|&g| poset.leq(b.tag, tags[g])).count();
            for c in 0..b.len {
                if !m.is_entry_zero(row, c) {
                    v.set(b.offset + c, 0, &m.get(row, c));
                }
            }
        }
        v
    }

    pub fn coords_of(&self, f: &ChainMap) -> Matrix {
        self.coords(0, |p, y| f.at(p, y))
    }

    /// Stalk at `y` of the degree-`p` component `X^p → J^{p+n}` of `v ∈ Hom^n`.
    fn component_at(&self, n: i64, v: &Matrix, p: i64, y: usize) -> Matrix {
        let field = self.field();
        let poset = self.src.poset();
        let tags = self.tgt.tags(p + n).unwrap();
        let gens: Vec<usize> = (0..tags.len()).filter(|&g| poset.leq(y, tags[g])).collect();
        let mut m = Matrix::zeros(field, gens.len(), self.src.dim(p, y));
        if self.layout(n).is_none() || p < self.plo || p > self.phi {
            return m;
        }
        for (r, &g) in gens.iter().enumerate() {
            let b = self.block(n, p, g);
            if b.len == 0 {
                continue;
            }
            let func = Matrix::from_scalars(
                field,
                1,
                b.len,
                &(0..b.len).map(|c| v.get(b.offset + c, 0)).collect::<Vec<_>>(),
            )
            .unwrap();
            let s = self.src.term(p).unwrap().map_between(y, b.tag);
            m.set_block(r, 0, &func.mul(&s));
        }
        m
    }

    /// The cycle `v ∈ Z^n` as a chain map `X[-n] → J`.
    pub fn to_chain_map(&self, n: i64, v: &Matrix) -> ChainMap {
        let src = self.src.shift(-n);
        ChainMap::from_fn(&src, &self.tgt, |m, y| self.component_at(n, v, m - n, y))
    }

    /// Chain maps `X[-n] → J` whose classes form a basis of `H^n`.
    pub fn basis_maps(&self, n: i64) -> Vec<ChainMap> {
        let b = self.h_basis(n);
        (0..b.cols()).map(|c| self.to_chain_map(n, &b.select_cols(&[c]))).collect()
    }

    /// The element `v ∈ Hom^{-1}` as a homotopy `X → J`.
    pub fn to_homotopy(&self, v: &Matrix) -> Homotopy {
        Homotopy::from_fn(&self.src, |n, y| self.component_at(-1, v, n, y))
    }

    /// Operator `Hom^0(Y, J) → Hom^0(X, J)`, `h ↦ h ∘ q`, for `q: X → Y`;
    /// `self` is `Hom(X, J)` and `other` is `Hom(Y, J)`.
    fn precompose_op(&self, other: &HomComplex, q: &ChainMap) -> Matrix {
        let mut m = Matrix::zeros(self.field(), self.dim(0), other.dim(0));
        let Some(lay) = self.layout(0) else { return m };
        if other.layout(0).is_none() {
            return m;
        }
        for b in &lay.blocks {
            if b.p < other.plo || b.p > other.phi {
                continue;
            }
            let ob = other.block(0, b.p, b.j);
            if b.len == 0 || ob.len == 0 {
                continue;
            }
            m.set_block(b.offset, ob.offset, &q.at(b.p, b.tag).transpose());
        }
        m
    }

    /// Operator `Hom^0(S, K) → Hom^0(S, J)`, `m ↦ e ∘ m`, for `e: K → J`;
    /// `self` is `Hom(S, J)` and `other` is `Hom(S, K)`.
    fn postcompose_op(&self, other: &HomComplex, e: &ChainMap) -> Matrix {
        let field = self.field();
        let poset = self.src.poset().clone();
        let mut m = Matrix::zeros(field, self.dim(0), other.dim(0));
        let Some(lay) = self.layout(0) else { return m };
        if other.layout(0).is_none() {
            return m;
        }
        let mut cache: Vec<Option<Matrix>> = Vec::new();
        let (plo, _) = (self.plo, self.phi);
        for b in &lay.blocks {
            if b.len == 0 {
                continue;
            }
            let pi = (b.p - plo) as usize;
            if cache.len() <= pi {
                cache.resize(pi + 1, None);
            }
            if cache[pi].is_none() {
                let ktags = other.tgt.tags(b.p).unwrap();
                let jtags = self.tgt.tags(b.p).unwrap();
                cache[pi] = Some(tagged_matrix(&poset, field, ktags, jtags, &e.comp(b.p)));
            }
            let em = cache[pi].as_ref().unwrap();
            for j in 0..em.cols() {
                if em.is_entry_zero(b.j, j) {
                    continue;
                }
                let ob = other.block(0, b.p, j);
                if ob.len == 0 {
                    continue;
                }
                let s = self.src.term(b.p).unwrap().map_between(b.tag, ob.tag);
                m.add_block(b.offset, ob.offset, &s.transpose().scale(&em.get(b.j, j)));
            }
        }
        m
    }
}

/// `dim Hom_D(X, Y[k])`.
pub fn ext_dim(x: &Complex, y: &Complex, k: i64) -> usize {
    let r = resolve(y);
    HomComplex::new(x, &r.model).h_dim(k)
}

/// `dim Hom_D(X, Y)`.
pub fn hom_dim(x: &Complex, y: &Complex) -> usize {
    ext_dim(x, y, 0)
}

/// Whether the chain map `g: X → J` (with `J` termwise injective) is null-homotopic.
pub fn is_null_homotopic(g: &ChainMap) -> bool {
    let h = HomComplex::new(g.source(), g.target());
    let v = h.coords_of(g);
    if v.is_zero() {
        return true;
    }
    h.d(-1).solve(&v).is_some()
}

/// Given `g: X → J` and `q: X → Y` with `J` termwise injective, finds a chain
/// map `h: Y → J` with `h ∘ q` homotopic to `g`.
pub fn factor_pre(g: &ChainMap, q: &ChainMap) -> Option<ChainMap> {
    let j = g.target();
    let hx = HomComplex::new(q.source(), j);
    let hy = HomComplex::new(q.target(), j);
    let field = j.field();
    let (nu, nv) = (hy.dim(0), hx.dim(-1));
    let dy = hy.d(0);
    let pre = hx.precompose_op(&hy, q);
    let dx = hx.d(-1);
    let rows = dy.rows() + pre.rows();
    let mut sys = Matrix::zeros(field, rows, nu + nv);
    sys.set_block(0, 0, &dy);
    sys.set_block(dy.rows(), 0, &pre);
    sys.set_block(dy.rows(), nu, &dx.neg());
    let mut rhs = Matrix::zeros(field, rows, 1);
    rhs.set_block(dy.rows(), 0, &hx.coords_of(g));
    let sol = sys.solve(&rhs)?;
    let u = sol.select_rows(&(0..nu).collect::<Vec<_>>());
    Some(hy.to_chain_map(0, &u).retarget(q.target(), j))
}

/// Given `c: S → J` and `e: K → J` with `J`, `K` termwise injective, finds a
/// chain map `m: S → K` with `e ∘ m` homotopic to `c`.
pub fn factor_post(c: &ChainMap, e: &ChainMap) -> Option<ChainMap> {
    factor_post_homotopy(c, e).map(|(m, _)| m)
}

/// As [`factor_post`], also returning `s` with `e ∘ m - c = d s + s d`.
pub fn factor_post_homotopy(c: &ChainMap, e: &ChainMap) -> Option<(ChainMap, Homotopy)> {
    let s = c.source();
    let (k, j) = (e.source(), e.target());
    let hk = HomComplex::new(s, k);
    let hj = HomComplex::new(s, j);
    let field = s.field();
    let (nm, ns) = (hk.dim(0), hj.dim(-1));
    let dk = hk.d(0);
    let post = hj.postcompose_op(&hk, e);
    let dj = hj.d(-1);
    let rows = dk.rows() + post.rows();
    let mut sys = Matrix::zeros(field, rows, nm + ns);
    sys.set_block(0, 0, &dk);
    sys.set_block(dk.rows(), 0, &post);
    sys.set_block(dk.rows(), nm, &dj.neg());
    let mut rhs = Matrix::zeros(field, rows, 1);
    rhs.set_block(dk.rows(), 0, &hj.coords_of(c));
    let sol = sys.solve(&rhs)?;
    let u = sol.select_rows(&(0..nm).collect::<Vec<_>>());
    let h = sol.select_rows(&(nm..nm + ns).collect::<Vec<_>>());
    Some((hk.to_chain_map(0, &u).retarget(s, k), hj.to_homotopy(&h)))
}

/// Searches for a quasi-isomorphism `X → J_Y` among the basis of `H^0 Hom(X, J_Y)`
/// and seeded random combinations of it. `None` means none was found, which
/// over a small prime field is not a proof that `X ≇ Y`.
pub fn find_quasi_iso(x: &Complex, y: &Complex) -> Option<ChainMap> {
    use rand::{Rng, SeedableRng};
    let degs = |c: &Complex| -> Vec<(i64, Vec<usize>)> {
        c.cohomology_degrees().into_iter().map(|k| (k, c.cohomology_dims(k))).collect()
    };
    if degs(x) != degs(y) {
        return None;
    }
    let jy = resolve(y).model;
    let h = HomComplex::new(x, &jy);
    let basis: Vec<ChainMap> = h.basis_maps(0).into_iter().map(|m| m.retarget(x, &jy)).collect();
    if x.is_acyclic() {
        return Some(ChainMap::zero(x, &jy));
    }
    if let Some(m) = basis.iter().find(|m| m.is_quasi_iso()) {
        return Some(m.clone());
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x9e37);
    for _ in 0..64 {
        let mut f = ChainMap::zero(x, &jy);
        for b in &basis {
            f = f.add(&b.scale(&x.field().int(rng.gen_range(-7..=7))));
        }
        if f.is_quasi_iso() {
            return Some(f);
        }
    }
    None
}
