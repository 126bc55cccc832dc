//! Injective models of complexes.
//!
//! A sum of injectives `⊕_g I_{t(g)}` is recorded by its generator tags `t`.
//! A morphism between two such sums is a "tagged matrix" with entry `(i, j)`
//! allowed to be nonzero only when `t(i) ≤ t(j)`; its stalk at `y` is the
//! submatrix on generators with tag `≥ y`.

use std::sync::Arc;

use super::{sign, ChainMap, Complex};
use crate::exactlinalg::{Field, Matrix};
use crate::posetrep::{PosetRep, RepMap, StratPoset};

/// A termwise-injective complex quasi-isomorphic to the input, with the
/// quasi-isomorphism `aug: input → model`.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub model: Complex,
    pub aug: ChainMap,
}

/// Positions of generators in the stalk at `y`.
fn stalk_positions(poset: &StratPoset, tags: &[usize], y: usize) -> Vec<Option<usize>> {
    let mut k = 0;
    tags.iter()
        .map(|&t| {
            if poset.leq(y, t) {
                k += 1;
                Some(k - 1)
            } else {
                None
            }
        })
        .collect()
}

fn stalk_gens(poset: &StratPoset, tags: &[usize], y: usize) -> Vec<usize> {
    (0..tags.len()).filter(|&g| poset.leq(y, tags[g])).collect()
}

/// Stalk of a tagged matrix at `y`.
pub(crate) fn tagged_at(poset: &StratPoset, src: &[usize], dst: &[usize], m: &Matrix, y: usize) -> Matrix {
    m.submatrix(&stalk_gens(poset, dst, y), &stalk_gens(poset, src, y))
}

pub(crate) fn map_from_tagged(poset: &StratPoset, src: &[usize], dst: &[usize], m: &Matrix) -> RepMap {
    RepMap::new_unchecked((0..poset.len()).map(|y| tagged_at(poset, src, dst, m, y)).collect())
}

/// Reads off the tagged matrix of a morphism `f` between materialized sums of injectives.
pub fn tagged_matrix(poset: &StratPoset, field: Field, src: &[usize], dst: &[usize], f: &RepMap) -> Matrix {
    let mut m = Matrix::zeros(field, dst.len(), src.len());
    let pos: Vec<Vec<Option<usize>>> = (0..poset.len()).map(|y| stalk_positions(poset, src, y)).collect();
    let dpos: Vec<Vec<Option<usize>>> = (0..poset.len()).map(|y| stalk_positions(poset, dst, y)).collect();
    for (i, &ti) in dst.iter().enumerate() {
        let row = dpos[ti][i].expect("generator lies in its own stalk");
        for j in 0..src.len() {
            if let Some(col) = pos[ti][j] {
                let c = f.comp(ti);
                if !c.is_entry_zero(row, col) {
                    m.set(i, j, &c.get(row, col));
                }
            }
        }
    }
    m
}

pub(crate) fn materialize(
    poset: &Arc<StratPoset>,
    field: Field,
    lo: i64,
    tags: Vec<Vec<usize>>,
    d: &[Matrix],
) -> Complex {
    let terms: Vec<PosetRep> = tags.iter().map(|t| PosetRep::injective_sum(poset.clone(), field, t)).collect();
    let diffs = d
        .iter()
        .enumerate()
        .map(|(i, m)| map_from_tagged(poset, &tags[i], &tags[i + 1], m))
        .collect();
    Complex::new_unchecked(poset.clone(), field, lo, terms, diffs, Some(tags))
}

/// Generators `(x, b)` of the envelope `⊕_x I_x ⊗ F_x`.
fn envelope_gens(f: &PosetRep) -> Vec<(usize, usize)> {
    (0..f.poset().len()).flat_map(|x| (0..f.dim(x)).map(move |b| (x, b))).collect()
}

/// Stalk at `y` of the unit `F → E(F)`.
fn unit_at(f: &PosetRep, gens: &[(usize, usize)], y: usize) -> Matrix {
    let p = f.poset();
    let rows: Vec<&(usize, usize)> = gens.iter().filter(|(x, _)| p.leq(y, *x)).collect();
    let mut m = Matrix::zeros(f.field(), rows.len(), f.dim(y));
    for (r, &&(x, b)) in rows.iter().enumerate() {
        let s = f.map_between(y, x);
        for c in 0..f.dim(y) {
            if !s.is_entry_zero(b, c) {
                m.set(r, c, &s.get(b, c));
            }
        }
    }
    m
}

struct Stage {
    gens: Vec<(usize, usize)>,
    tags: Vec<usize>,
    // cokernel of the unit at each stalk: projection and section
    q: Vec<Matrix>,
    s: Vec<Matrix>,
    next: PosetRep,
}

fn stage(f: &PosetRep) -> Stage {
    let p = f.poset().clone();
    let gens = envelope_gens(f);
    let tags: Vec<usize> = gens.iter().map(|g| g.0).collect();
    let env = PosetRep::injective_sum(p.clone(), f.field(), &tags);
    let (q, s): (Vec<Matrix>, Vec<Matrix>) = (0..p.len()).map(|y| unit_at(f, &gens, y).cokernel()).unzip();
    let dims = q.iter().map(|m| m.rows()).collect();
    let maps = p
        .covers()
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| q[b].mul(env.cover_map(i)).mul(&s[a]))
        .collect();
    let next = PosetRep::new_unchecked(p, f.field(), dims, maps);
    Stage { gens, tags, q, s, next }
}

/// Tagged matrix of `E(φ)` for `φ: F → G`.
fn envelope_map(field: Field, src: &[(usize, usize)], dst: &[(usize, usize)], phi: &RepMap) -> Matrix {
    let mut m = Matrix::zeros(field, dst.len(), src.len());
    for (i, &(x, bi)) in dst.iter().enumerate() {
        for (j, &(x2, bj)) in src.iter().enumerate() {
            if x == x2 && !phi.comp(x).is_entry_zero(bi, bj) {
                m.set(i, j, &phi.comp(x).get(bi, bj));
            }
        }
    }
    m
}

/// Injective model of `x`. Termwise-injective inputs are returned unchanged.
pub fn resolve(x: &Complex) -> Resolution {
    if x.is_tagged() {
        return Resolution { model: x.clone(), aug: ChainMap::identity(x) };
    }
    let poset = x.poset().clone();
    let field = x.field();
    if poset.is_discrete() {
        let tags = match x.range() {
            None => vec![],
            Some((a, b)) => (a..=b)
                .map(|n| (0..poset.len()).flat_map(|e| std::iter::repeat_n(e, x.dim(n, e))).collect())
                .collect(),
        };
        let model = x.clone().with_tags(Some(tags));
        let aug = ChainMap::identity(x).retarget(x, &model);
        return Resolution { model, aug };
    }
    let Some((lo, hi)) = x.range() else {
        let z = Complex::zero(poset, field);
        return Resolution { model: z.clone(), aug: ChainMap::zero(x, &z) };
    };
    // stages[p][k]
    let mut stages: Vec<Vec<Stage>> = Vec::new();
    for n in lo..=hi {
        let mut row = Vec::new();
        let mut f = x.term_or_zero(n);
        while !f.is_zero() {
            let st = stage(&f);
            f = st.next.clone();
            row.push(st);
        }
        stages.push(row);
    }
    // vertical maps between consecutive columns
    // verts[p][k]: tagged matrix E^k_p → E^k_{p+1}
    let mut verts: Vec<Vec<Matrix>> = Vec::new();
    for pi in 0..stages.len().saturating_sub(1) {
        let mut row = Vec::new();
        let mut phi = x.diff_or_zero(lo + pi as i64);
        let depth = stages[pi].len().max(stages[pi + 1].len());
        for k in 0..depth {
            let (src, dst) = (stages[pi].get(k), stages[pi + 1].get(k));
            let sg = src.map_or(&[][..], |s| &s.gens[..]);
            let dg = dst.map_or(&[][..], |s| &s.gens[..]);
            let m = envelope_map(field, sg, dg, &phi);
            if let (Some(s), Some(d)) = (src, dst) {
                let st: Vec<usize> = s.tags.clone();
                let dt: Vec<usize> = d.tags.clone();
                let comps = (0..poset.len())
                    .map(|y| d.q[y].mul(&tagged_at(&poset, &st, &dt, &m, y)).mul(&s.s[y]))
                    .collect();
                phi = RepMap::new_unchecked(comps);
            } else {
                let sdims = src.map_or(vec![0; poset.len()], |s| s.next.dims().to_vec());
                let ddims = dst.map_or(vec![0; poset.len()], |s| s.next.dims().to_vec());
                phi = RepMap::new_unchecked(
                    (0..poset.len()).map(|y| Matrix::zeros(field, ddims[y], sdims[y])).collect(),
                );
            }
            row.push(m);
        }
        verts.push(row);
    }
    // horizontal maps: horiz(p, k): E^k_p → E^{k+1}_p
    let horiz = |pi: usize, k: usize| -> Matrix {
        let (s, d) = (&stages[pi][k], &stages[pi][k + 1]);
        let mut m = Matrix::zeros(field, d.gens.len(), s.gens.len());
        for (i, &(xp, bp)) in d.gens.iter().enumerate() {
            let pos = stalk_positions(&poset, &s.tags, xp);
            for j in 0..s.gens.len() {
                if let Some(c) = pos[j] {
                    let q = &s.q[xp];
                    if !q.is_entry_zero(bp, c) {
                        m.set(i, j, &q.get(bp, c));
                    }
                }
            }
        }
        m
    };
    let maxk = stages.iter().map(|r| r.len()).max().unwrap_or(0) as i64;
    let top = hi + maxk;
    // blocks of total degree n: (pi, k) with pi ascending
    let blocks = |n: i64| -> Vec<(usize, usize)> {
        (0..stages.len())
            .filter_map(|pi| {
                let k = n - lo - pi as i64;
                (k >= 0 && (k as usize) < stages[pi].len()).then_some((pi, k as usize))
            })
            .collect()
    };
    let mut tags: Vec<Vec<usize>> = Vec::new();
    let mut d: Vec<Matrix> = Vec::new();
    for n in lo..=top {
        let bs = blocks(n);
        tags.push(bs.iter().flat_map(|&(pi, k)| stages[pi][k].tags.clone()).collect());
        if n < top {
            let bt = blocks(n + 1);
            let rows: usize = bt.iter().map(|&(pi, k)| stages[pi][k].gens.len()).sum();
            let cols: usize = bs.iter().map(|&(pi, k)| stages[pi][k].gens.len()).sum();
            let mut m = Matrix::zeros(field, rows, cols);
            let mut c0 = 0;
            for &(pi, k) in &bs {
                let mut r0 = 0;
                for &(pj, kj) in &bt {
                    if pj == pi && kj == k + 1 {
                        let h = horiz(pi, k).scale(&field.int(sign(lo + pi as i64)));
                        m.set_block(r0, c0, &h);
                    } else if pj == pi + 1 && kj == k {
                        m.set_block(r0, c0, &verts[pi][k]);
                    }
                    r0 += stages[pj][kj].gens.len();
                }
                c0 += stages[pi][k].gens.len();
            }
            d.push(m);
        }
    }
    // augmentation per degree and stalk
    let mut aug: Vec<Vec<Matrix>> = Vec::new();
    for n in lo..=top {
        let bs = blocks(n);
        let mut per = Vec::new();
        for y in 0..poset.len() {
            let rows: Vec<usize> = bs
                .iter()
                .map(|&(pi, k)| stalk_gens(&poset, &stages[pi][k].tags, y).len())
                .collect();
            let mut m = Matrix::zeros(field, rows.iter().sum(), x.dim(n, y));
            let mut r0 = 0;
            for (b, &(pi, k)) in bs.iter().enumerate() {
                if k == 0 && lo + pi as i64 == n {
                    let st = &stages[pi][0];
                    m.set_block(r0, 0, &unit_at(&x.term_or_zero(n), &st.gens, y));
                }
                r0 += rows[b];
            }
            per.push(m);
        }
        aug.push(per);
    }
    minimize(&poset, &mut tags, &mut d, &mut aug);
    finish(x, lo, tags, &d, &aug)
}

/// A minimal model of a termwise-injective complex: isomorphic pairs in the
/// differential are cancelled, and the augmentation is a homotopy equivalence.
pub fn reduce(x: &Complex) -> Resolution {
    if !x.is_tagged() {
        return resolve(x);
    }
    let Some((lo, hi)) = x.range() else {
        return Resolution { model: x.clone(), aug: ChainMap::identity(x) };
    };
    let poset = x.poset().clone();
    let field = x.field();
    let mut tags: Vec<Vec<usize>> = (lo..=hi).map(|n| x.tags(n).unwrap().to_vec()).collect();
    let mut d: Vec<Matrix> =
        (lo..hi).map(|n| tagged_matrix(&poset, field, &tags[(n - lo) as usize], &tags[(n - lo + 1) as usize], &x.diff_or_zero(n))).collect();
    let mut aug: Vec<Vec<Matrix>> =
        (lo..=hi).map(|n| (0..poset.len()).map(|y| Matrix::identity(field, x.dim(n, y))).collect()).collect();
    minimize(&poset, &mut tags, &mut d, &mut aug);
    finish(x, lo, tags, &d, &aug)
}

fn finish(x: &Complex, lo: i64, tags: Vec<Vec<usize>>, d: &[Matrix], aug: &[Vec<Matrix>]) -> Resolution {
    let poset = x.poset().clone();
    let field = x.field();
    let model = materialize(&poset, field, lo, tags, d);
    let aug_map = ChainMap::from_fn(x, &model, |n, y| {
        let i = n - lo;
        if i >= 0 && (i as usize) < aug.len() {
            aug[i as usize][y].clone()
        } else {
            Matrix::zeros(field, model.dim(n, y), x.dim(n, y))
        }
    });
    Resolution { model, aug: aug_map }
}

/// Cancels isomorphic pairs `I_t → I_t` appearing in the differential, keeping
/// the augmentation a quasi-isomorphism.
fn minimize(poset: &StratPoset, tags: &mut [Vec<usize>], d: &mut [Matrix], aug: &mut [Vec<Matrix>]) {
    let mut n = 0;
    while n < d.len() {
        let m = &d[n];
        let mut found = None;
        'search: for j in 0..m.cols() {
            for i in 0..m.rows() {
                if tags[n + 1][i] == tags[n][j] && !m.is_entry_zero(i, j) {
                    found = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((i, j)) = found else {
            n += 1;
            continue;
        };
        let m = d[n].clone();
        let field = m.field();
        let ainv = m.get(i, j).inv().unwrap();
        let rows: Vec<usize> = (0..m.rows()).filter(|&r| r != i).collect();
        let cols: Vec<usize> = (0..m.cols()).filter(|&c| c != j).collect();
        let gamma = m.submatrix(&rows, &[j]);
        let beta = m.submatrix(&[i], &cols);
        d[n] = m.submatrix(&rows, &cols).sub(&gamma.mul(&beta).scale(&ainv));
        if n > 0 {
            let keep: Vec<usize> = (0..d[n - 1].rows()).filter(|&r| r != j).collect();
            d[n - 1] = d[n - 1].select_rows(&keep);
        }
        if n + 1 < d.len() {
            let keep: Vec<usize> = (0..d[n + 1].cols()).filter(|&c| c != i).collect();
            d[n + 1] = d[n + 1].select_cols(&keep);
        }
        for y in 0..poset.len() {
            // degree n: drop generator j
            let pos = stalk_positions(poset, &tags[n], y);
            if let Some(pj) = pos[j] {
                let keep: Vec<usize> = (0..aug[n][y].rows()).filter(|&r| r != pj).collect();
                aug[n][y] = aug[n][y].select_rows(&keep);
            }
            // degree n+1: row_r -= (m[r][j] / α) row_i, then drop generator i
            let pos = stalk_positions(poset, &tags[n + 1], y);
            if let Some(pi) = pos[i] {
                let a = &aug[n + 1][y];
                let row_i = a.select_rows(&[pi]);
                let mut coef = Matrix::zeros(field, a.rows(), 1);
                for (g, p) in pos.iter().enumerate() {
                    if let Some(pr) = p {
                        if g != i && !m.is_entry_zero(g, j) {
                            coef.set(*pr, 0, &m.get(g, j).mul(&ainv));
                        }
                    }
                }
                let updated = a.sub(&coef.mul(&row_i));
                let keep: Vec<usize> = (0..a.rows()).filter(|&r| r != pi).collect();
                aug[n + 1][y] = updated.select_rows(&keep);
            }
        }
        tags[n].remove(j);
        tags[n + 1].remove(i);
    }
}
