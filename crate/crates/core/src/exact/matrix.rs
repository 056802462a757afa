use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Sparse integer matrix stored by columns. Each column is a list of
/// `(row, value)` pairs sorted by row with no explicit zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, BigInt)>>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        if self.rows * self.cols <= 400 {
            for row in self.to_dense() {
                let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                writeln!(f, "  [{}]", cells.join(", "))?;
            }
        }
        Ok(())
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for j in 0..n {
            m.data[j].push((j, BigInt::one()));
        }
        m
    }

    /// Build from `(row, col, value)` triplets; repeated positions are summed.
    pub fn from_triplets<I>(rows: usize, cols: usize, entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, BigInt)>,
    {
        let mut data: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); cols];
        for (i, j, v) in entries {
            assert!(i < rows && j < cols, "triplet ({i},{j}) outside {rows}x{cols}");
            data[j].push((i, v));
        }
        for col in data.iter_mut() {
            normalize_column(col);
        }
        IntMatrix { rows, cols, data }
    }

    pub fn from_i64_triplets<I>(rows: usize, cols: usize, entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, i64)>,
    {
        Self::from_triplets(rows, cols, entries.into_iter().map(|(i, j, v)| (i, j, BigInt::from(v))))
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut trip = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged dense matrix");
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    trip.push((i, j, v));
                }
            }
        }
        Self::from_i64_triplets(r, c, trip)
    }

    pub fn from_dense_big(rows: usize, cols: usize, dense: &[Vec<BigInt>]) -> Self {
        let mut data = vec![Vec::new(); cols];
        for (i, row) in dense.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    data[j].push((i, v.clone()));
                }
            }
        }
        IntMatrix { rows, cols, data }
    }

    /// Build from sparse columns; each column is normalized.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, BigInt)>>) -> Self {
        let cols = columns.len();
        let mut data = columns;
        for col in data.iter_mut() {
            normalize_column(col);
            if let Some(&(i, _)) = col.last() {
                assert!(i < rows, "column entry outside row range");
            }
        }
        IntMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, j: usize) -> &[(usize, BigInt)] {
        &self.data[j]
    }

    pub fn columns(&self) -> &[Vec<(usize, BigInt)>] {
        &self.data
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|c| c.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_empty())
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        match self.data[j].binary_search_by_key(&i, |e| e.0) {
            Ok(pos) => self.data[j][pos].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (j, col) in self.data.iter().enumerate() {
            for (i, v) in col {
                out[*i][j] = v.clone();
            }
        }
        out
    }

    /// Entries as `(row, col, value)` sorted by row, then column.
    pub fn triplets(&self) -> Vec<(usize, usize, BigInt)> {
        let mut t: Vec<_> = self
            .data
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |(i, v)| (*i, j, v.clone())))
            .collect();
        t.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        t
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![Vec::new(); self.rows];
        for (j, col) in self.data.iter().enumerate() {
            for (i, v) in col {
                data[*i].push((j, v.clone()));
            }
        }
        IntMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let data = other.data.iter().map(|col| self.apply_sparse(col)).collect();
        IntMatrix { rows: self.rows, cols: other.cols, data }
    }

    /// Multiply by a sparse column vector.
    pub fn apply_sparse(&self, v: &[(usize, BigInt)]) -> Vec<(usize, BigInt)> {
        let mut acc: Vec<(usize, BigInt)> = Vec::new();
        for (k, b) in v {
            for (i, a) in &self.data[*k] {
                acc.push((*i, a * b));
            }
        }
        normalize_column(&mut acc);
        acc
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![BigInt::zero(); self.rows];
        for (j, col) in self.data.iter().enumerate() {
            if v[j].is_zero() {
                continue;
            }
            for (i, a) in col {
                out[*i] += a * &v[j];
            }
        }
        out
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        self.combine(other, true)
    }

    fn combine(&self, other: &IntMatrix, negate: bool) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "dimension mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let mut c = a.clone();
                c.extend(b.iter().map(|(i, v)| (*i, if negate { -v } else { v.clone() })));
                normalize_column(&mut c);
                c
            })
            .collect();
        IntMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: &BigInt) -> IntMatrix {
        if s.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        let data = self
            .data
            .iter()
            .map(|c| c.iter().map(|(i, v)| (*i, v * s)).collect())
            .collect();
        IntMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> IntMatrix {
        self.scale(&BigInt::from(-1))
    }

    /// Stack columns side by side: `[self | other]`.
    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix { rows: self.rows, cols: self.cols + other.cols, data }
    }

    /// Stack rows: `[self ; other]`.
    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let mut c = a.clone();
                c.extend(b.iter().map(|(i, v)| (i + self.rows, v.clone())));
                c
            })
            .collect();
        IntMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn select_columns(&self, idx: &[usize]) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: idx.len(), data: idx.iter().map(|&j| self.data[j].clone()).collect() }
    }

    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        let mut pos = vec![usize::MAX; self.rows];
        for (new, &old) in idx.iter().enumerate() {
            pos[old] = new;
        }
        let data = self
            .data
            .iter()
            .map(|c| {
                let mut col: Vec<(usize, BigInt)> =
                    c.iter().filter(|(i, _)| pos[*i] != usize::MAX).map(|(i, v)| (pos[*i], v.clone())).collect();
                col.sort_by_key(|e| e.0);
                col
            })
            .collect();
        IntMatrix { rows: idx.len(), cols: self.cols, data }
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && self.data.iter().enumerate().all(|(j, c)| c.len() == 1 && c[0].0 == j && c[0].1.is_one())
    }

    /// True when every nonzero entry sits on the main diagonal.
    pub fn is_diagonal(&self) -> bool {
        self.data.iter().enumerate().all(|(j, c)| c.iter().all(|(i, _)| *i == j))
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.data.iter().flatten().map(|(_, v)| v.abs()).max().unwrap_or_else(BigInt::zero)
    }
}

/// Sort by row, merge duplicates and drop zeros.
pub(crate) fn normalize_column(col: &mut Vec<(usize, BigInt)>) {
    if col.is_empty() {
        return;
    }
    col.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, BigInt)> = Vec::with_capacity(col.len());
    for (i, v) in col.drain(..) {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += v,
            _ => out.push((i, v)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    *col = out;
}
