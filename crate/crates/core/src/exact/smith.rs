//! Smith normal form with transforms (dense) and invariant factors of large
//! sparse matrices (unit-pivot elimination followed by a dense finish).

use super::matrix::IntMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Result of [`smith_normal_form`]: `u * m * v` is diagonal with entries `diag`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diag: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }
}

struct Dense {
    a: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
}

impl Dense {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        for row in self.v.iter_mut() {
            row.swap(i, j);
        }
    }

    /// row_i += c * row_j
    fn add_row(&mut self, i: usize, j: usize, c: &BigInt) {
        let (src, dst) = two_rows(&mut self.a, j, i);
        for (d, s) in dst.iter_mut().zip(src.iter()) {
            if !s.is_zero() {
                *d += c * s;
            }
        }
        let (src, dst) = two_rows(&mut self.u, j, i);
        for (d, s) in dst.iter_mut().zip(src.iter()) {
            if !s.is_zero() {
                *d += c * s;
            }
        }
    }

    /// col_i += c * col_j
    fn add_col(&mut self, i: usize, j: usize, c: &BigInt) {
        for row in self.a.iter_mut() {
            if !row[j].is_zero() {
                let t = c * &row[j];
                row[i] += t;
            }
        }
        for row in self.v.iter_mut() {
            if !row[j].is_zero() {
                let t = c * &row[j];
                row[i] += t;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -&*x;
        }
        for x in self.u[i].iter_mut() {
            *x = -&*x;
        }
    }
}

fn two_rows<T>(m: &mut [Vec<T>], src: usize, dst: usize) -> (&Vec<T>, &mut Vec<T>) {
    assert_ne!(src, dst);
    if src < dst {
        let (a, b) = m.split_at_mut(dst);
        (&a[src], &mut b[0])
    } else {
        let (a, b) = m.split_at_mut(src);
        (&b[0], &mut a[dst])
    }
}

fn identity_dense(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

/// Smith normal form with unimodular transforms. Pivots are chosen by smallest
/// absolute value to keep entries small.
pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let (rows, cols) = (m.rows(), m.cols());
    let mut st = Dense { a: m.to_dense(), u: identity_dense(rows), v: identity_dense(cols) };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = min_entry(&st.a, t) else { break };
        st.swap_rows(t, pi);
        st.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if st.a[i][t].is_zero() {
                    continue;
                }
                let q = st.a[i][t].div_floor(&st.a[t][t]);
                st.add_row(i, t, &-q);
                if !st.a[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if st.a[t][j].is_zero() {
                    continue;
                }
                let q = st.a[t][j].div_floor(&st.a[t][t]);
                st.add_col(j, t, &-q);
                if !st.a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // Bring the smallest remaining entry of row/column t to the pivot.
                let mut best: Option<(usize, usize)> = None;
                let mut best_val: Option<BigInt> = None;
                let mut consider = |i: usize, j: usize, v: &BigInt| {
                    if !v.is_zero() && best_val.as_ref().is_none_or(|b| v.abs() < *b) {
                        best_val = Some(v.abs());
                        best = Some((i, j));
                    }
                };
                for i in t..rows {
                    consider(i, t, &st.a[i][t]);
                }
                for j in t..cols {
                    consider(t, j, &st.a[t][j]);
                }
                let (bi, bj) = best.expect("pivot row/column cannot vanish");
                st.swap_rows(t, bi);
                st.swap_cols(t, bj);
                continue;
            }
            // Row and column clear; enforce divisibility on the remainder.
            let p = st.a[t][t].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&st.a[i][j] % &p).is_zero()));
            match bad {
                Some(i) => st.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if st.a[t][t].is_negative() {
            st.negate_row(t);
        }
        diag.push(st.a[t][t].clone());
        t += 1;
    }
    Smith {
        diag,
        u: IntMatrix::from_dense_big(rows, rows, &st.u),
        v: IntMatrix::from_dense_big(cols, cols, &st.v),
    }
}

fn min_entry(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, v) in row.iter().enumerate().skip(t) {
            if v.is_zero() {
                continue;
            }
            let av = v.abs();
            if best.as_ref().is_none_or(|b| av < b.2) {
                let one = av.is_one();
                best = Some((i, j, av));
                if one {
                    return best.map(|b| (b.0, b.1));
                }
            }
        }
    }
    best.map(|b| (b.0, b.1))
}

/// Diagonal of the Smith form without transforms.
fn dense_invariant_factors(a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let m = IntMatrix::from_dense_big(rows, cols, &a);
    // Transforms are cheap relative to the rare dense remainders we see here.
    smith_normal_form(&m).diag
}

/// Invariant factors (nonzero Smith diagonal, sorted by divisibility) of a
/// possibly large sparse matrix. Unit pivots are eliminated sparsely; the
/// remainder, if any, goes through dense Smith form.
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    if let Some(res) = sparse_eliminate::<i64>(m) {
        return finish(res);
    }
    finish(sparse_eliminate::<BigInt>(m).expect("BigInt elimination cannot overflow"))
}

pub fn rank(m: &IntMatrix) -> usize {
    invariant_factors(m).len()
}

fn finish(res: (usize, Vec<Vec<BigInt>>)) -> Vec<BigInt> {
    let (units, rest) = res;
    let mut out = vec![BigInt::one(); units];
    if !rest.is_empty() {
        out.extend(dense_invariant_factors(rest));
    }
    out
}

trait Coef: Clone + Zero + One + PartialEq + std::fmt::Debug {
    fn from_big(b: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn is_unit(&self) -> bool;
    fn checked_mul_sub(&self, a: &Self, b: &Self) -> Option<Self>;
    fn neg_c(&self) -> Self;
}

impl Coef for i64 {
    fn from_big(b: &BigInt) -> Option<Self> {
        use num_traits::ToPrimitive;
        b.to_i64()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn checked_mul_sub(&self, a: &Self, b: &Self) -> Option<Self> {
        a.checked_mul(*b).and_then(|p| self.checked_sub(p))
    }
    fn neg_c(&self) -> Self {
        -*self
    }
}

impl Coef for BigInt {
    fn from_big(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn checked_mul_sub(&self, a: &Self, b: &Self) -> Option<Self> {
        Some(self - a * b)
    }
    fn neg_c(&self) -> Self {
        -self
    }
}

/// Eliminate unit pivots, returning the number eliminated and the dense
/// remainder (rows that still have entries, restricted to surviving columns).
/// Returns `None` on i64 overflow.
fn sparse_eliminate<T: Coef>(m: &IntMatrix) -> Option<(usize, Vec<Vec<BigInt>>)> {
    let nrows = m.rows();
    let ncols = m.cols();
    // Row-major sparse rows sorted by column.
    let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); nrows];
    for (j, col) in m.columns().iter().enumerate() {
        for (i, v) in col {
            rows[*i].push((j, T::from_big(v)?));
        }
    }
    // Column -> rows containing it (may contain stale entries).
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); ncols];
    for (i, r) in rows.iter().enumerate() {
        for (j, _) in r {
            col_rows[*j].push(i);
        }
    }
    let mut col_count: Vec<usize> = col_rows.iter().map(|r| r.len()).collect();
    let mut row_alive = vec![true; nrows];
    let mut col_alive = vec![true; ncols];
    let mut units = 0usize;

    loop {
        // Markowitz cost among unit entries; stop scanning at a free pivot.
        let mut best: Option<(usize, usize, usize)> = None; // (cost, row, col)
        for (i, r) in rows.iter().enumerate() {
            if !row_alive[i] || r.is_empty() {
                continue;
            }
            for (j, v) in r {
                if v.is_unit() {
                    let cost = (r.len() - 1) * (col_count[*j].saturating_sub(1));
                    if best.is_none_or(|b| cost < b.0) {
                        best = Some((cost, i, *j));
                    }
                }
            }
            if best.is_some_and(|b| b.0 == 0) {
                break;
            }
        }
        let Some((_, pr, pc)) = best else { break };
        let pivot_row = std::mem::take(&mut rows[pr]);
        row_alive[pr] = false;
        col_alive[pc] = false;
        let pv = pivot_row.iter().find(|e| e.0 == pc).expect("pivot present").1.clone();
        for (j, _) in &pivot_row {
            col_count[*j] = col_count[*j].saturating_sub(1);
        }
        let targets: Vec<usize> = std::mem::take(&mut col_rows[pc]);
        for i in targets {
            if !row_alive[i] {
                continue;
            }
            let Some(a) = rows[i].iter().find(|e| e.0 == pc).map(|e| e.1.clone()) else { continue };
            // factor = a / pv, exact since pv is a unit.
            let factor = if pv.is_one() { a } else { a.neg_c() };
            let old = std::mem::take(&mut rows[i]);
            let mut merged: Vec<(usize, T)> = Vec::with_capacity(old.len() + pivot_row.len());
            let (mut x, mut y) = (0, 0);
            while x < old.len() || y < pivot_row.len() {
                let take_old = y >= pivot_row.len() || (x < old.len() && old[x].0 < pivot_row[y].0);
                let take_piv = x >= old.len() || (y < pivot_row.len() && pivot_row[y].0 < old[x].0);
                if take_old {
                    merged.push(old[x].clone());
                    x += 1;
                } else if take_piv {
                    let (j, pvj) = &pivot_row[y];
                    let val = T::zero().checked_mul_sub(&factor, pvj)?;
                    if !val.is_zero() {
                        merged.push((*j, val));
                        col_count[*j] += 1;
                        col_rows[*j].push(i);
                    }
                    y += 1;
                } else {
                    let (j, ov) = &old[x];
                    let val = ov.checked_mul_sub(&factor, &pivot_row[y].1)?;
                    if val.is_zero() {
                        col_count[*j] = col_count[*j].saturating_sub(1);
                    } else {
                        merged.push((*j, val));
                    }
                    x += 1;
                    y += 1;
                }
            }
            rows[i] = merged;
        }
        units += 1;
    }
    let live_cols: Vec<usize> = (0..ncols).filter(|&j| col_alive[j]).collect();
    let mut colpos = vec![usize::MAX; ncols];
    for (p, &j) in live_cols.iter().enumerate() {
        colpos[j] = p;
    }
    let mut rest = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if !row_alive[i] || r.is_empty() {
            continue;
        }
        let mut dense = vec![BigInt::zero(); live_cols.len()];
        for (j, v) in r {
            dense[colpos[*j]] = v.to_big();
        }
        rest.push(dense);
    }
    Some((units, rest))
}
