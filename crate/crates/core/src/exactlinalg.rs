//! Exact dense linear algebra over the rationals and prime fields.
//!
//! Matrices are row-major. Row reduction pivots on the leftmost column that
//! still has a nonzero entry below the current row, taking the topmost such
//! entry, so every basis produced here is a deterministic function of the input.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("cannot parse field element {0:?}")]
    Parse(String),
    #[error("expected {expected} entries, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("field mismatch")]
    FieldMismatch,
}

/// The coefficient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rational,
    Prime(u32),
}

impl Field {
    pub fn prime(p: u64) -> Result<Field, LinalgError> {
        if !(2..=(1u64 << 31)).contains(&p) || !is_prime(p) {
            return Err(LinalgError::NotPrime(p));
        }
        Ok(Field::Prime(p as u32))
    }

    pub fn zero(self) -> Scalar {
        self.int(0)
    }

    pub fn one(self) -> Scalar {
        self.int(1)
    }

    pub fn int(self, n: i64) -> Scalar {
        match self {
            Field::Rational => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Scalar::Mod { v: n.rem_euclid(p as i64) as u32, p },
        }
    }

    /// Parses `"a"` or `"a/b"`. Over F_p the denominator is inverted.
    pub fn parse(self, s: &str) -> Result<Scalar, LinalgError> {
        let bad = || LinalgError::Parse(s.to_string());
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (t, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        match self {
            Field::Rational => Ok(Scalar::Rat(BigRational::new(num, den))),
            Field::Prime(p) => {
                let pb = BigInt::from(p);
                let reduce = |x: &BigInt| -> u32 {
                    let r = ((x % &pb) + &pb) % &pb;
                    u32::try_from(r).unwrap()
                };
                let d = reduce(&den);
                if d == 0 {
                    return Err(bad());
                }
                let ops = POps(p);
                Ok(Scalar::Mod { v: ops.mul(&reduce(&num), &ops.inv(&d)), p })
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "Fp:{p}"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact field element. Rationals are kept in lowest terms by `BigRational`;
/// residues are kept in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Mod { v: u32, p: u32 },
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rat(_) => Field::Rational,
            Scalar::Mod { p, .. } => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Mod { v, .. } => *v == 0,
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Mod { v: a, p }, Scalar::Mod { v: b, p: q }) if p == q => {
                Scalar::Mod { v: POps(*p).add(a, b), p: *p }
            }
            _ => panic!("scalar field mismatch"),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Mod { v, p } => Scalar::Mod { v: POps(*p).neg(v), p: *p },
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Mod { v: a, p }, Scalar::Mod { v: b, p: q }) if p == q => {
                Scalar::Mod { v: POps(*p).mul(a, b), p: *p }
            }
            _ => panic!("scalar field mismatch"),
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rat(a) => Scalar::Rat(a.recip()),
            Scalar::Mod { v, p } => Scalar::Mod { v: POps(*p).inv(v), p: *p },
        })
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Scalar::Rat(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Mod { v, .. } => write!(f, "{v}"),
        }
    }
}

pub(crate) trait Ops: Copy + Send + Sync {
    type E: Clone + PartialEq + Send + Sync;
    fn zero(self) -> Self::E;
    fn is_zero(self, a: &Self::E) -> bool;
    fn add(self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(self, a: &Self::E) -> Self::E;
    fn mul(self, a: &Self::E, b: &Self::E) -> Self::E;
    fn inv(self, a: &Self::E) -> Self::E;
    fn sub(self, a: &Self::E, b: &Self::E) -> Self::E {
        self.add(a, &self.neg(b))
    }
    /// `a - b * c`
    fn sub_mul(self, a: &Self::E, b: &Self::E, c: &Self::E) -> Self::E {
        self.sub(a, &self.mul(b, c))
    }
}

/// A rational in lowest terms with a positive denominator, stored inline
/// while numerator and denominator fit in an `i64`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Rat {
    S(i64, i64),
    B(BigRational),
}

impl Rat {
    fn int(n: i64) -> Rat {
        Rat::S(n, 1)
    }

    fn reduce(n: i128, d: i128) -> Rat {
        let g = n.gcd(&d);
        let (mut n, mut d) = if g > 1 { (n / g, d / g) } else { (n, d) };
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rat::S(n, d),
            _ => Rat::B(BigRational::new(BigInt::from(n), BigInt::from(d))),
        }
    }

    pub(crate) fn from_big(b: BigRational) -> Rat {
        match (i64::try_from(b.numer()), i64::try_from(b.denom())) {
            (Ok(n), Ok(d)) => Rat::S(n, d),
            _ => Rat::B(b),
        }
    }

    pub(crate) fn to_big(&self) -> BigRational {
        match self {
            Rat::S(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rat::B(b) => b.clone(),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Rat::S(0, _))
    }

    fn add(&self, o: &Rat) -> Rat {
        match (self, o) {
            (Rat::S(0, _), _) => o.clone(),
            (_, Rat::S(0, _)) => self.clone(),
            (Rat::S(a, b), Rat::S(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                if b == d {
                    Rat::reduce(a + c, b)
                } else {
                    match a.checked_mul(d).zip(c.checked_mul(b)).and_then(|(x, y)| x.checked_add(y)) {
                        Some(n) => Rat::reduce(n, b * d),
                        None => Rat::from_big(self.to_big() + o.to_big()),
                    }
                }
            }
            _ => Rat::from_big(self.to_big() + o.to_big()),
        }
    }

    fn neg(&self) -> Rat {
        match self {
            Rat::S(n, d) if *n != i64::MIN => Rat::S(-n, *d),
            _ => Rat::from_big(-self.to_big()),
        }
    }

    fn mul(&self, o: &Rat) -> Rat {
        match (self, o) {
            (Rat::S(0, _), _) | (_, Rat::S(0, _)) => Rat::int(0),
            (Rat::S(a, b), Rat::S(c, d)) => Rat::reduce(*a as i128 * *c as i128, *b as i128 * *d as i128),
            _ => Rat::from_big(self.to_big() * o.to_big()),
        }
    }

    fn inv(&self) -> Rat {
        match self {
            Rat::S(n, d) => Rat::reduce(*d as i128, *n as i128),
            Rat::B(b) => Rat::from_big(b.recip()),
        }
    }
}

#[derive(Clone, Copy)]
pub(crate) struct QOps;

impl Ops for QOps {
    type E = Rat;
    fn zero(self) -> Rat {
        Rat::int(0)
    }
    fn is_zero(self, a: &Rat) -> bool {
        a.is_zero()
    }
    fn add(self, a: &Rat, b: &Rat) -> Rat {
        a.add(b)
    }
    fn neg(self, a: &Rat) -> Rat {
        a.neg()
    }
    fn mul(self, a: &Rat, b: &Rat) -> Rat {
        a.mul(b)
    }
    fn inv(self, a: &Rat) -> Rat {
        assert!(!a.is_zero(), "division by zero");
        a.inv()
    }
}

#[derive(Clone, Copy)]
pub(crate) struct POps(pub u32);

impl Ops for POps {
    type E = u32;
    fn zero(self) -> u32 {
        0
    }
    fn is_zero(self, a: &u32) -> bool {
        *a == 0
    }
    fn add(self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 + *b as u64) % self.0 as u64) as u32
    }
    fn neg(self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.0 - a
        }
    }
    fn mul(self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.0 as u64) as u32
    }
    fn inv(self, a: &u32) -> u32 {
        let p = self.0 as u64;
        let mut base = *a as u64 % p;
        let mut e = p - 2;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc as u32
    }
    fn sub_mul(self, a: &u32, b: &u32, c: &u32) -> u32 {
        let p = self.0 as u64;
        let bc = (*b as u64 * *c as u64) % p;
        ((*a as u64 + p - bc) % p) as u32
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Data {
    Q(Vec<Rat>),
    P(u32, Vec<u32>),
}

/// A dense matrix over a `Field`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Data,
}

fn g_mul<O: Ops>(o: O, a: &[O::E], b: &[O::E], n: usize, k: usize, m: usize) -> Vec<O::E> {
    let mut out = vec![o.zero(); n * m];
    for i in 0..n {
        for t in 0..k {
            let x = &a[i * k + t];
            if o.is_zero(x) {
                continue;
            }
            for j in 0..m {
                let y = &b[t * m + j];
                if o.is_zero(y) {
                    continue;
                }
                let cell = &mut out[i * m + j];
                *cell = o.add(cell, &o.mul(x, y));
            }
        }
    }
    out
}

/// Reduced row echelon form in place; returns pivot columns.
fn g_rref<O: Ops>(o: O, a: &mut [O::E], rows: usize, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !o.is_zero(&a[i * cols + c])) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = o.inv(&a[r * cols + c]);
        for j in c..cols {
            a[r * cols + j] = o.mul(&a[r * cols + j], &inv);
        }
        let (before, rest) = a.split_at_mut(r * cols);
        let (prow, after) = rest.split_at_mut(cols);
        for row in before.chunks_mut(cols).chain(after.chunks_mut(cols)) {
            let f = row[c].clone();
            if o.is_zero(&f) {
                continue;
            }
            for j in c..cols {
                if !o.is_zero(&prow[j]) {
                    row[j] = o.sub_mul(&row[j], &f, &prow[j]);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn g_rank<O: Ops>(o: O, a: &mut [O::E], rows: usize, cols: usize) -> usize {
    // forward elimination only
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !o.is_zero(&a[i * cols + c])) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = o.inv(&a[r * cols + c]);
        let (top, below) = a.split_at_mut((r + 1) * cols);
        let prow = &top[r * cols..];
        for row in below.chunks_mut(cols) {
            if o.is_zero(&row[c]) {
                continue;
            }
            let f = o.mul(&row[c], &inv);
            for j in c..cols {
                if !o.is_zero(&prow[j]) {
                    row[j] = o.sub_mul(&row[j], &f, &prow[j]);
                }
            }
        }
        r += 1;
    }
    r
}

macro_rules! on_data {
    ($data:expr, $o:ident, $v:ident => $body:expr) => {
        match $data {
            Data::Q($v) => {
                let $o = QOps;
                Data::Q($body)
            }
            Data::P(p, $v) => {
                let $o = POps(*p);
                Data::P(*p, $body)
            }
        }
    };
}

macro_rules! on_pair {
    ($a:expr, $b:expr, $o:ident, $x:ident, $y:ident => $body:expr) => {
        match ($a, $b) {
            (Data::Q($x), Data::Q($y)) => {
                let $o = QOps;
                Data::Q($body)
            }
            (Data::P(p, $x), Data::P(q, $y)) if p == q => {
                let $o = POps(*p);
                Data::P(*p, $body)
            }
            _ => panic!("matrix field mismatch"),
        }
    };
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        let data = match field {
            Field::Rational => Data::Q(vec![Rat::int(0); rows * cols]),
            Field::Prime(p) => Data::P(p, vec![0; rows * cols]),
        };
        Matrix { rows, cols, data }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        let one = field.one();
        for i in 0..n {
            m.set(i, i, &one);
        }
        m
    }

    pub fn from_i64(field: Field, rows: usize, cols: usize, entries: &[i64]) -> Matrix {
        assert_eq!(entries.len(), rows * cols, "entry count");
        let data = match field {
            Field::Rational => Data::Q(
                entries
                    .iter()
                    .map(|&e| Rat::int(e))
                    .collect(),
            ),
            Field::Prime(p) => {
                Data::P(p, entries.iter().map(|&e| e.rem_euclid(p as i64) as u32).collect())
            }
        };
        Matrix { rows, cols, data }
    }

    pub fn from_scalars(
        field: Field,
        rows: usize,
        cols: usize,
        entries: &[Scalar],
    ) -> Result<Matrix, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::Shape { expected: rows * cols, found: entries.len() });
        }
        let mut m = Matrix::zeros(field, rows, cols);
        for (k, e) in entries.iter().enumerate() {
            if e.field() != field {
                return Err(LinalgError::FieldMismatch);
            }
            m.set(k / cols.max(1), k % cols.max(1), e);
        }
        Ok(m)
    }

    pub fn field(&self) -> Field {
        match &self.data {
            Data::Q(_) => Field::Rational,
            Data::P(p, _) => Field::Prime(*p),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        assert!(i < self.rows && j < self.cols, "index out of range");
        match &self.data {
            Data::Q(v) => Scalar::Rat(v[i * self.cols + j].to_big()),
            Data::P(p, v) => Scalar::Mod { v: v[i * self.cols + j], p: *p },
        }
    }

    pub fn set(&mut self, i: usize, j: usize, s: &Scalar) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        let k = i * self.cols + j;
        match (&mut self.data, s) {
            (Data::Q(v), Scalar::Rat(r)) => v[k] = Rat::from_big(r.clone()),
            (Data::P(p, v), Scalar::Mod { v: x, p: q }) if p == q => v[k] = *x,
            _ => panic!("matrix field mismatch"),
        }
    }

    pub fn is_entry_zero(&self, i: usize, j: usize) -> bool {
        let k = i * self.cols + j;
        match &self.data {
            Data::Q(v) => v[k].is_zero(),
            Data::P(_, v) => v[k] == 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            Data::Q(v) => v.iter().all(|x| x.is_zero()),
            Data::P(_, v) => v.iter().all(|&x| x == 0),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Matrix::identity(self.field(), self.rows)
    }

    pub fn transpose(&self) -> Matrix {
        let (r, c) = (self.rows, self.cols);
        let data = on_data!(&self.data, _o, v => {
            let mut out = Vec::with_capacity(r * c);
            for j in 0..c {
                for i in 0..r {
                    out.push(v[i * c + j].clone());
                }
            }
            out
        });
        Matrix { rows: c, cols: r, data }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let data = on_pair!(&self.data, &other.data, o, a, b => g_mul(o, a, b, n, k, m));
        Matrix { rows: n, cols: m, data }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix sum shape");
        let data = on_pair!(&self.data, &other.data, o, a, b =>
            a.iter().zip(b.iter()).map(|(x, y)| o.add(x, y)).collect());
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Matrix {
        let data = on_data!(&self.data, o, v => v.iter().map(|x| o.neg(x)).collect());
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        let mut out = self.clone();
        match (&mut out.data, s) {
            (Data::Q(v), Scalar::Rat(r)) => {
                let r = Rat::from_big(r.clone());
                v.iter_mut().for_each(|x| *x = x.mul(&r));
            }
            (Data::P(p, v), Scalar::Mod { v: c, p: q }) if p == q => {
                let o = POps(*p);
                v.iter_mut().for_each(|x| *x = o.mul(x, c));
            }
            _ => panic!("matrix field mismatch"),
        }
        out
    }

    pub fn mul_vec(&self, x: &[Scalar]) -> Vec<Scalar> {
        let col = Matrix::column(self.field(), x);
        self.mul(&col).column_vec(0)
    }

    pub fn column(field: Field, x: &[Scalar]) -> Matrix {
        Matrix::from_scalars(field, x.len(), 1, x).expect("column")
    }

    pub fn column_vec(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row_vec(&self, i: usize) -> Vec<Scalar> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    /// Submatrix on the given row and column indices (in the given order).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let c = self.cols;
        let data = on_data!(&self.data, _o, v => {
            let mut out = Vec::with_capacity(rows.len() * cols.len());
            for &i in rows {
                for &j in cols {
                    out.push(v[i * c + j].clone());
                }
            }
            out
        });
        Matrix { rows: rows.len(), cols: cols.len(), data }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let all: Vec<usize> = (0..self.cols).collect();
        self.submatrix(rows, &all)
    }

    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        let all: Vec<usize> = (0..self.rows).collect();
        self.submatrix(&all, cols)
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols, "block range");
        let (sc, bc) = (self.cols, block.cols);
        match (&mut self.data, &block.data) {
            (Data::Q(v), Data::Q(b)) => {
                for i in 0..block.rows {
                    for j in 0..bc {
                        v[(r0 + i) * sc + c0 + j] = b[i * bc + j].clone();
                    }
                }
            }
            (Data::P(p, v), Data::P(q, b)) if p == q => {
                for i in 0..block.rows {
                    v[(r0 + i) * sc + c0..(r0 + i) * sc + c0 + bc]
                        .copy_from_slice(&b[i * bc..(i + 1) * bc]);
                }
            }
            _ => panic!("matrix field mismatch"),
        }
    }

    /// Adds `block` into `self` at `(r0, c0)`.
    pub fn add_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        let rows: Vec<usize> = (r0..r0 + block.rows).collect();
        let cols: Vec<usize> = (c0..c0 + block.cols).collect();
        let cur = self.submatrix(&rows, &cols);
        self.set_block(r0, c0, &cur.add(block));
    }

    pub fn hstack(field: Field, rows: usize, blocks: &[&Matrix]) -> Matrix {
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let mut c = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack rows");
            out.set_block(0, c, b);
            c += b.cols;
        }
        out
    }

    pub fn vstack(field: Field, cols: usize, blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let mut r = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack cols");
            out.set_block(r, 0, b);
            r += b.rows;
        }
        out
    }

    pub fn block_diag(field: Field, blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_block(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    /// Kronecker product.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (r1, c1, r2, c2) = (self.rows, self.cols, other.rows, other.cols);
        let data = on_pair!(&self.data, &other.data, o, a, b => {
            let mut out = vec![o.zero(); r1 * r2 * c1 * c2];
            let cols = c1 * c2;
            for i in 0..r1 {
                for j in 0..c1 {
                    let x = &a[i * c1 + j];
                    if o.is_zero(x) {
                        continue;
                    }
                    for k in 0..r2 {
                        for l in 0..c2 {
                            out[(i * r2 + k) * cols + j * c2 + l] = o.mul(x, &b[k * c2 + l]);
                        }
                    }
                }
            }
            out
        });
        Matrix { rows: r1 * r2, cols: c1 * c2, data }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let (r, c) = (self.rows, self.cols);
        let mut out = self.clone();
        let pivots = match &mut out.data {
            Data::Q(v) => g_rref(QOps, v, r, c),
            Data::P(p, v) => g_rref(POps(*p), v, r, c),
        };
        (out, pivots)
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let (r, c) = (self.rows, self.cols);
        let mut tmp = self.clone();
        match &mut tmp.data {
            Data::Q(v) => g_rank(QOps, v, r, c),
            Data::P(p, v) => g_rank(POps(*p), v, r, c),
        }
    }

    /// Kernel basis as the columns of a `cols × nullity` matrix. Column `t`
    /// has a 1 in the `t`-th free position and zeros in the other free positions.
    pub fn kernel(&self) -> Matrix {
        let field = self.field();
        let (red, pivots) = self.rref();
        let free = free_columns(self.cols, &pivots);
        let mut k = Matrix::zeros(field, self.cols, free.len());
        let one = field.one();
        for (t, &f) in free.iter().enumerate() {
            k.set(f, t, &one);
            for (i, &pc) in pivots.iter().enumerate() {
                if !red.is_entry_zero(i, f) {
                    k.set(pc, t, &red.get(i, f).neg());
                }
            }
        }
        k
    }

    /// Free-variable positions of the kernel basis; selecting these rows is a
    /// left inverse of `kernel()`.
    pub fn kernel_free_rows(&self) -> Vec<usize> {
        let (_, pivots) = self.rref();
        free_columns(self.cols, &pivots)
    }

    /// Returns `X` with `self · X = b`, or `None` if inconsistent. Free
    /// variables are set to zero.
    pub fn solve(&self, b: &Matrix) -> Option<Matrix> {
        assert_eq!(self.rows, b.rows, "solve shape");
        let field = self.field();
        let aug = Matrix::hstack(field, self.rows, &[self, b]);
        let (red, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Matrix::zeros(field, self.cols, b.cols);
        for (i, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                if !red.is_entry_zero(i, self.cols + j) {
                    x.set(pc, j, &red.get(i, self.cols + j));
                }
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let id = Matrix::identity(self.field(), self.rows);
        if self.rank() != self.rows {
            return None;
        }
        self.solve(&id)
    }

    /// Cokernel of `self: k^cols → k^rows`: returns `(q, s)` where `q` is an
    /// `r × rows` matrix in reduced row echelon form with `q · self = 0` and
    /// kernel exactly the image, and `s` is a `rows × r` section with `q · s = I`.
    pub fn cokernel(&self) -> (Matrix, Matrix) {
        let field = self.field();
        let q = self.transpose().kernel().transpose();
        let (q, pivots) = q.rref();
        let r = pivots.len();
        let q = q.select_rows(&(0..r).collect::<Vec<_>>());
        let mut s = Matrix::zeros(field, self.rows, r);
        let one = field.one();
        for (i, &pc) in pivots.iter().enumerate() {
            s.set(pc, i, &one);
        }
        (q, s)
    }

    /// A basis of the column space, as the pivot columns of `self`.
    pub fn image(&self) -> Matrix {
        let (_, pivots) = self.rref();
        self.select_cols(&pivots)
    }
}

fn free_columns(cols: usize, pivots: &[usize]) -> Vec<usize> {
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..cols).filter(|&j| !is_pivot[j]).collect()
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

/// Some `x` with `a · x = b`, or `None` when the system is inconsistent.
pub fn solve_linear(a: &Matrix, b: &[Scalar]) -> Option<Vec<Scalar>> {
    let col = Matrix::column(a.field(), b);
    a.solve(&col).map(|x| x.column_vec(0))
}

/// Echelon-normalized basis of the null space of `a`.
pub fn kernel_basis(a: &Matrix) -> Vec<Vec<Scalar>> {
    let k = a.kernel();
    (0..k.cols()).map(|j| k.column_vec(j)).collect()
}

pub fn rank(a: &Matrix) -> usize {
    a.rank()
}
