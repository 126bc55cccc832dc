//! JSON object format for scalars, matrices and complexes.
//!
//! Rationals are strings such as `"3/7"`; residues are `{"p":13,"v":5}`.
//! A complex is `{"lo": n, "terms": [...], "diffs": [...]}` where each term
//! is `{"dims": {elem: d}, "maps": {"x<y": rows}}` and each differential is
//! `{elem: rows}`. Matrices are lists of rows. Zero entries may be omitted
//! from `dims`, `maps` and differentials.

use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::derivedcat::Complex;
use crate::error::{Error, Result};
use crate::exactlinalg::{Field, Matrix, Scalar};
use crate::posetrep::{PosetRep, RepMap, StratPoset};

fn bad(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Shape(format!("{path}: {msg}"))
}

pub fn scalar_to_json(s: &Scalar) -> Value {
    match s {
        Scalar::Rat(_) => Value::String(s.to_string()),
        Scalar::Mod { v, p } => json!({"p": p, "v": v}),
    }
}

pub fn scalar_from_json(v: &Value, field: Field, path: &str) -> Result<Scalar> {
    match v {
        Value::String(s) => field.parse(s).map_err(|e| bad(path, e)),
        Value::Number(n) => {
            let i = n.as_i64().ok_or_else(|| bad(path, "expected an integer"))?;
            Ok(field.int(i))
        }
        Value::Object(o) => {
            let get = |k: &str| o.get(k).and_then(Value::as_u64).ok_or_else(|| bad(path, format!("missing \"{k}\"")));
            let (p, val) = (get("p")?, get("v")?);
            if field != Field::Prime(p as u32) {
                return Err(bad(path, format!("residue mod {p} in field {field}")));
            }
            Ok(field.int(val as i64))
        }
        _ => Err(bad(path, "expected a scalar")),
    }
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row_vec(i).iter().map(scalar_to_json).collect())).collect())
}

pub fn matrix_from_json(v: &Value, field: Field, rows: usize, cols: usize, path: &str) -> Result<Matrix> {
    let rs = v.as_array().ok_or_else(|| bad(path, "expected a list of rows"))?;
    if rows == 0 || cols == 0 {
        if rs.iter().all(|r| r.as_array().is_some_and(|r| r.is_empty())) && rs.len() <= rows {
            return Ok(Matrix::zeros(field, rows, cols));
        }
        return Err(bad(path, format!("expected a {rows}x{cols} matrix")));
    }
    if rs.len() != rows {
        return Err(bad(path, format!("expected {rows} rows, found {}", rs.len())));
    }
    let mut m = Matrix::zeros(field, rows, cols);
    for (i, r) in rs.iter().enumerate() {
        let r = r.as_array().ok_or_else(|| bad(&format!("{path}[{i}]"), "expected a row"))?;
        if r.len() != cols {
            return Err(bad(&format!("{path}[{i}]"), format!("expected {cols} entries, found {}", r.len())));
        }
        for (j, e) in r.iter().enumerate() {
            let s = scalar_from_json(e, field, &format!("{path}[{i}][{j}]"))?;
            m.set(i, j, &s);
        }
    }
    Ok(m)
}

fn cover_key(p: &StratPoset, i: usize) -> String {
    let (a, b) = p.covers()[i];
    format!("{}<{}", p.name(a), p.name(b))
}

pub fn rep_to_json(f: &PosetRep) -> Value {
    let p = f.poset();
    let mut dims = Map::new();
    for x in 0..p.len() {
        if f.dim(x) > 0 {
            dims.insert(p.name(x).to_string(), json!(f.dim(x)));
        }
    }
    let mut maps = Map::new();
    for (i, &(a, b)) in p.covers().iter().enumerate() {
        if f.dim(a) > 0 && f.dim(b) > 0 {
            maps.insert(cover_key(p, i), matrix_to_json(f.cover_map(i)));
        }
    }
    json!({"dims": dims, "maps": maps})
}

pub fn rep_from_json(v: &Value, poset: &Arc<StratPoset>, field: Field, path: &str) -> Result<PosetRep> {
    let o = v.as_object().ok_or_else(|| bad(path, "expected an object"))?;
    let mut dims = vec![0; poset.len()];
    if let Some(d) = o.get("dims") {
        let d = d.as_object().ok_or_else(|| bad(&format!("{path}.dims"), "expected an object"))?;
        for (k, val) in d {
            let x = poset.index(k).map_err(|e| bad(&format!("{path}.dims"), e))?;
            dims[x] = val.as_u64().ok_or_else(|| bad(&format!("{path}.dims.{k}"), "expected a count"))? as usize;
        }
    }
    let empty = Map::new();
    let maps_in = match o.get("maps") {
        Some(m) => m.as_object().ok_or_else(|| bad(&format!("{path}.maps"), "expected an object"))?,
        None => &empty,
    };
    let keys: Vec<String> = (0..poset.covers().len()).map(|i| cover_key(poset, i)).collect();
    for k in maps_in.keys() {
        if !keys.contains(k) {
            return Err(bad(&format!("{path}.maps"), format!("\"{k}\" is not a covering relation")));
        }
    }
    let mut maps = Vec::new();
    for (i, &(a, b)) in poset.covers().iter().enumerate() {
        let m = match maps_in.get(&keys[i]) {
            Some(m) => matrix_from_json(m, field, dims[b], dims[a], &format!("{path}.maps.{}", keys[i]))?,
            None => Matrix::zeros(field, dims[b], dims[a]),
        };
        maps.push(m);
    }
    PosetRep::new(poset.clone(), field, dims, maps).map_err(|e| bad(path, e))
}

pub fn complex_to_json(x: &Complex) -> Value {
    let p = x.poset();
    let Some((lo, hi)) = x.range() else { return json!({"lo": 0, "terms": [], "diffs": []}) };
    let terms: Vec<Value> = (lo..=hi).map(|n| rep_to_json(&x.term_or_zero(n))).collect();
    let diffs: Vec<Value> = (lo..hi)
        .map(|n| {
            let mut m = Map::new();
            for e in 0..p.len() {
                let d = x.d_at(n, e);
                if d.rows() > 0 && d.cols() > 0 {
                    m.insert(p.name(e).to_string(), matrix_to_json(&d));
                }
            }
            Value::Object(m)
        })
        .collect();
    json!({"lo": lo, "terms": terms, "diffs": diffs})
}

pub fn complex_from_json(v: &Value, poset: &Arc<StratPoset>, field: Field, path: &str) -> Result<Complex> {
    let o = v.as_object().ok_or_else(|| bad(path, "expected an object"))?;
    let lo = o.get("lo").map_or(Some(0), Value::as_i64).ok_or_else(|| bad(&format!("{path}.lo"), "expected an integer"))?;
    let terms_v = o
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| bad(&format!("{path}.terms"), "expected a list"))?;
    let terms = terms_v
        .iter()
        .enumerate()
        .map(|(i, t)| rep_from_json(t, poset, field, &format!("{path}.terms[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let empty = vec![];
    let diffs_v = match o.get("diffs") {
        Some(d) => d.as_array().ok_or_else(|| bad(&format!("{path}.diffs"), "expected a list"))?,
        None => &empty,
    };
    if terms.len() > 1 && diffs_v.len() != terms.len() - 1 && !diffs_v.is_empty() {
        return Err(bad(&format!("{path}.diffs"), format!("expected {} differentials", terms.len() - 1)));
    }
    let mut diffs = Vec::new();
    for i in 0..terms.len().saturating_sub(1) {
        let dp = format!("{path}.diffs[{i}]");
        let dv = diffs_v.get(i);
        let obj = match dv {
            Some(d) => Some(d.as_object().ok_or_else(|| bad(&dp, "expected an object"))?),
            None => None,
        };
        let mut comps = Vec::new();
        for e in 0..poset.len() {
            let (r, c) = (terms[i + 1].dim(e), terms[i].dim(e));
            let m = match obj.and_then(|o| o.get(poset.name(e))) {
                Some(m) => matrix_from_json(m, field, r, c, &format!("{dp}.{}", poset.name(e)))?,
                None => Matrix::zeros(field, r, c),
            };
            comps.push(m);
        }
        if let Some(o) = obj {
            for k in o.keys() {
                poset.index(k).map_err(|e| bad(&dp, e))?;
            }
        }
        diffs.push(RepMap::new_unchecked(comps));
    }
    if terms.is_empty() {
        return Ok(Complex::zero(poset.clone(), field));
    }
    Complex::new(poset.clone(), field, lo, terms, diffs).map_err(|e| bad(path, e))
}
