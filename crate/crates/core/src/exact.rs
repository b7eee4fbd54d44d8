//! Exact integer and rational linear algebra.
//!
//! Everything here is generic over the integer scalar so the same code runs on
//! machine integers (fast, overflow-checked) and on [`num_bigint::BigInt`]
//! (arbitrary precision). Callers that must never fail use the wrappers at the
//! bottom of the module, which retry in arbitrary precision on overflow.

use std::collections::BTreeSet;
use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, One, Signed, ToPrimitive, Zero};


/// An exact signed integer scalar: `i64`, `i128` or `BigInt`.
pub trait ExactInt:
    Clone
    + Debug
    + Display
    + Ord
    + Hash
    + Integer
    + Signed
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
{
}

impl<T> ExactInt for T where
    T: Clone
        + Debug
        + Display
        + Ord
        + Hash
        + Integer
        + Signed
        + CheckedAdd
        + CheckedSub
        + CheckedMul
        + FromPrimitive
        + ToPrimitive
{
}

/// Sparse matrix in row form; each row is sorted by column and holds no zeros.
#[derive(Clone, Debug)]
pub struct SparseMatrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<(usize, T)>>,
}

impl<T: ExactInt> SparseMatrix<T> {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    /// Adds `value` to entry `(r, c)`.
    pub fn add_entry(&mut self, r: usize, c: usize, value: T) {
        let row = &mut self.data[r];
        match row.binary_search_by_key(&c, |(j, _)| *j) {
            Ok(pos) => {
                let v = row[pos].1.clone() + value;
                if v.is_zero() {
                    row.remove(pos);
                } else {
                    row[pos].1 = v;
                }
            }
            Err(pos) => {
                if !value.is_zero() {
                    row.insert(pos, (c, value));
                }
            }
        }
    }

    pub fn from_dense(dense: &[Vec<T>], cols: usize) -> Self {
        let mut m = SparseMatrix::new(dense.len(), cols);
        for (i, row) in dense.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    m.data[i].push((j, v.clone()));
                }
            }
        }
        m
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut out = vec![vec![T::zero(); self.cols]; self.rows];
        for (i, row) in self.data.iter().enumerate() {
            for (j, v) in row {
                out[i][*j] = v.clone();
            }
        }
        out
    }

    /// `self * other`, exact; `None` on overflow.
    pub fn checked_mul(&self, other: &SparseMatrix<T>) -> Option<SparseMatrix<T>> {
        assert_eq!(self.cols, other.rows);
        let mut out = SparseMatrix::new(self.rows, other.cols);
        for (i, row) in self.data.iter().enumerate() {
            let mut acc: std::collections::BTreeMap<usize, T> = Default::default();
            for (k, a) in row {
                for (j, b) in &other.data[*k] {
                    let p = a.checked_mul(b)?;
                    let e = acc.entry(*j).or_insert_with(T::zero);
                    *e = e.checked_add(&p)?;
                }
            }
            out.data[i] = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        }
        Some(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }
}

/// `row_a - factor * row_b` on sorted sparse rows.
fn axpy_rows<T: ExactInt>(a: &[(usize, T)], factor: &T, b: &[(usize, T)]) -> Option<Vec<(usize, T)>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            let v = T::zero().checked_sub(&factor.checked_mul(&b[j].1)?)?;
            out.push((b[j].0, v));
            j += 1;
        } else {
            let v = a[i].1.checked_sub(&factor.checked_mul(&b[j].1)?)?;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

/// Non-zero invariant factors of an integer matrix (positive, each dividing the
/// next). The rank is the length of the result.
///
/// Unit pivots are eliminated first on the sparse form (boundary and relator
/// matrices are mostly ±1); the remaining core is reduced densely with
/// smallest-magnitude pivoting. Returns `None` on fixed-width overflow.
pub fn smith_invariants<T: ExactInt>(m: &SparseMatrix<T>) -> Option<Vec<T>> {
    let mut rows: Vec<Vec<(usize, T)>> = m.data.clone();
    let mut alive = vec![true; m.rows];
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.cols];
    for (i, row) in rows.iter().enumerate() {
        for (j, _) in row {
            col_rows[*j].insert(i);
        }
    }
    let mut unit_count = 0usize;

    loop {
        // Markowitz-style choice: the unit entry minimising fill-in.
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, row) in rows.iter().enumerate() {
            if !alive[i] {
                continue;
            }
            for (j, v) in row {
                if v.abs().is_one() {
                    let cost = (row.len() - 1) * (col_rows[*j].len() - 1);
                    if best.is_none_or(|(_, _, c)| cost < c) {
                        best = Some((i, *j, cost));
                    }
                }
            }
        }
        let Some((pr, pc, _)) = best else { break };
        let pivot_row = std::mem::take(&mut rows[pr]);
        let pivot_val = pivot_row
            .iter()
            .find(|(j, _)| *j == pc)
            .map(|(_, v)| v.clone())
            .expect("pivot present");
        let others: Vec<usize> = col_rows[pc].iter().copied().filter(|&r| r != pr).collect();
        for r in others {
            let entry = rows[r]
                .iter()
                .find(|(j, _)| *j == pc)
                .map(|(_, v)| v.clone())
                .expect("column index consistent");
            // pivot is ±1 so the quotient is exact
            let factor = entry * pivot_val.clone();
            let old: BTreeSet<usize> = rows[r].iter().map(|(j, _)| *j).collect();
            let new_row = axpy_rows(&rows[r], &factor, &pivot_row)?;
            let new: BTreeSet<usize> = new_row.iter().map(|(j, _)| *j).collect();
            for j in old.difference(&new) {
                col_rows[*j].remove(&r);
            }
            for j in new.difference(&old) {
                col_rows[*j].insert(r);
            }
            rows[r] = new_row;
        }
        for (j, _) in &pivot_row {
            col_rows[*j].remove(&pr);
        }
        alive[pr] = false;
        unit_count += 1;
    }

    // Dense core.
    let core_rows: Vec<usize> = (0..m.rows).filter(|&i| alive[i] && !rows[i].is_empty()).collect();
    let core_cols: Vec<usize> = (0..m.cols).filter(|&j| !col_rows[j].is_empty()).collect();
    let col_pos: std::collections::HashMap<usize, usize> =
        core_cols.iter().enumerate().map(|(k, &j)| (j, k)).collect();
    let mut dense = vec![vec![T::zero(); core_cols.len()]; core_rows.len()];
    for (k, &i) in core_rows.iter().enumerate() {
        for (j, v) in &rows[i] {
            dense[k][col_pos[j]] = v.clone();
        }
    }
    let mut invariants = vec![T::one(); unit_count];
    invariants.extend(dense_smith_diagonal(dense)?);
    invariants.sort();
    Some(invariants)
}

/// Diagonal of the Smith form of a dense matrix (non-zero entries only).
fn dense_smith_diagonal<T: ExactInt>(mut a: Vec<Vec<T>>) -> Option<Vec<T>> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // smallest non-zero magnitude in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if !a[i][t].is_zero() {
                    let q = a[i][t].clone() / a[t][t].clone();
                    for j in t..n {
                        let v = a[i][j].checked_sub(&q.checked_mul(&a[t][j])?)?;
                        a[i][j] = v;
                    }
                    if !a[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..n {
                if !a[t][j].is_zero() {
                    let q = a[t][j].clone() / a[t][t].clone();
                    for i in t..m {
                        let v = a[i][j].checked_sub(&q.checked_mul(&a[i][t])?)?;
                        a[i][j] = v;
                    }
                    if !a[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                // move the smallest remainder in row/column t onto the pivot
                let mut best = (t, t);
                for i in t + 1..m {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..n {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                if best.1 == t {
                    a.swap(t, best.0);
                } else {
                    for row in a.iter_mut() {
                        row.swap(t, best.1);
                    }
                }
                continue;
            }
            // divisibility of the trailing block
            let p = a[t][t].clone();
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !a[i][j].is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    for j in t..n {
                        let v = a[t][j].checked_add(&a[i][j])?;
                        a[t][j] = v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    Some(diag)
}

/// Invariant factors in arbitrary precision, trying machine integers first.
pub fn invariant_factors(m: &SparseMatrix<i64>) -> Vec<BigInt> {
    if let Some(v) = smith_invariants(m) {
        return v.into_iter().map(BigInt::from).collect();
    }
    let big = SparseMatrix {
        rows: m.rows,
        cols: m.cols,
        data: m
            .data
            .iter()
            .map(|r| r.iter().map(|(j, v)| (*j, BigInt::from(*v))).collect())
            .collect(),
    };
    smith_invariants(&big).expect("arbitrary precision never overflows")
}

/// Basis of the right null space `{x : A x = 0}` over the rationals, via reduced
/// row echelon form. Basis vectors are indexed by free columns in increasing
/// order, each with a 1 in its own free column.
pub fn rational_nullspace<T: ExactInt>(rows: &[Vec<Ratio<T>>], ncols: usize) -> Vec<Vec<Ratio<T>>> {
    let mut a: Vec<Vec<Ratio<T>>> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..ncols {
                    let sub = f.clone() * a[r][j].clone();
                    a[i][j] = a[i][j].clone() - sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Ratio::zero(); ncols];
            v[f] = Ratio::one();
            for (k, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[k][f].clone();
            }
            v
        })
        .collect()
}

/// Basis of the null space over GF(2). Rows are 0/1 vectors of length `ncols`.
pub fn nullspace_mod2(rows: &[Vec<u8>], ncols: usize) -> Vec<Vec<u8>> {
    let mut a: Vec<Vec<u8>> = rows.iter().map(|r| r.iter().map(|x| x & 1).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..a.len()).find(|&i| a[i][c] == 1) else {
            continue;
        };
        a.swap(r, p);
        for i in 0..a.len() {
            if i != r && a[i][c] == 1 {
                for j in 0..ncols {
                    a[i][j] ^= a[r][j];
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut v = vec![0u8; ncols];
            v[f] = 1;
            for (k, &pc) in pivots.iter().enumerate() {
                v[pc] = a[k][f];
            }
            v
        })
        .collect()
}

/// Scales a rational vector to the primitive integer vector on the same ray.
pub fn primitive_integer_vector(v: &[Ratio<BigInt>]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Ratio::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        ints
    } else {
        ints.into_iter().map(|x| x / g.clone()).collect()
    }
}

/// Serializes nested big integers as JSON numbers when they fit in `i64`,
/// decimal strings otherwise.
pub(crate) fn serialize_nested_bigints<S: serde::Serializer>(v: &[Vec<BigInt>], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut outer = s.serialize_seq(Some(v.len()))?;
    for row in v {
        let vals: Vec<serde_json::Value> = row.iter().map(bigint_value).collect();
        outer.serialize_element(&vals)?;
    }
    outer.end()
}

pub(crate) fn serialize_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&bigint_value(x))?;
    }
    seq.end()
}

pub(crate) fn serialize_bigint<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&bigint_value(x), s)
}

pub(crate) fn bigint_value(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(i) => serde_json::Value::from(i),
        None => serde_json::Value::from(x.to_string()),
    }
}
