//! Dense linear algebra over a prime field.

/// A dense matrix over `ℤ/p` with row-major storage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

fn inverse(a: u64, p: u64) -> u64 {
    let (mut t, mut new_t, mut r, mut new_r) = (0i128, 1i128, p as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "{a} is not invertible mod {p}");
    t.rem_euclid(p as i128) as u64
}

pub fn reduce_mod(v: i64, p: u64) -> u64 {
    v.rem_euclid(p as i64) as u64
}

impl FpMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        FpMatrix { p, rows, cols, data: vec![0; rows * cols] }
    }

    /// Columns given as integer vectors of length `rows`.
    pub fn from_columns(p: u64, rows: usize, columns: &[Vec<i64>]) -> Self {
        let mut m = Self::zeros(p, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, &v) in c.iter().enumerate() {
                m.data[i * m.cols + j] = reduce_mod(v, p);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(x).fold(0u64, |acc, (a, b)| (acc + a * b) % self.p)
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        FpSolver::new(self).rank()
    }

    pub fn kernel(&self) -> Vec<Vec<u64>> {
        FpSolver::new(self).kernel()
    }
}

/// Reduced row echelon form of `A` together with the row operations `T`
/// (so `T A = R`), for repeated solves.
#[derive(Clone, Debug)]
pub struct FpSolver {
    p: u64,
    reduced: FpMatrix,
    transform: FpMatrix,
    pivots: Vec<usize>,
}

impl FpSolver {
    pub fn new(a: &FpMatrix) -> Self {
        let p = a.p;
        let (rows, cols) = (a.rows, a.cols);
        let mut r = a.clone();
        let mut t = FpMatrix::zeros(p, rows, rows);
        for i in 0..rows {
            t.data[i * rows + i] = 1;
        }
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..cols {
            if lead == rows {
                break;
            }
            let Some(piv) = (lead..rows).find(|&i| r.data[i * cols + c] != 0) else { continue };
            if piv != lead {
                for j in 0..cols {
                    r.data.swap(piv * cols + j, lead * cols + j);
                }
                for j in 0..rows {
                    t.data.swap(piv * rows + j, lead * rows + j);
                }
            }
            let inv = inverse(r.data[lead * cols + c], p);
            for j in 0..cols {
                r.data[lead * cols + j] = r.data[lead * cols + j] * inv % p;
            }
            for j in 0..rows {
                t.data[lead * rows + j] = t.data[lead * rows + j] * inv % p;
            }
            for i in 0..rows {
                let f = r.data[i * cols + c];
                if i == lead || f == 0 {
                    continue;
                }
                let g = p - f;
                for j in 0..cols {
                    r.data[i * cols + j] = (r.data[i * cols + j] + g * r.data[lead * cols + j]) % p;
                }
                for j in 0..rows {
                    t.data[i * rows + j] = (t.data[i * rows + j] + g * t.data[lead * rows + j]) % p;
                }
            }
            pivots.push(c);
            lead += 1;
        }
        FpSolver { p, reduced: r, transform: t, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// A basis of the null space.
    pub fn kernel(&self) -> Vec<Vec<u64>> {
        let cols = self.reduced.cols;
        let free: Vec<usize> = (0..cols).filter(|c| !self.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0u64; cols];
                v[f] = 1;
                for (i, &pc) in self.pivots.iter().enumerate() {
                    v[pc] = (self.p - self.reduced.get(i, f)) % self.p;
                }
                v
            })
            .collect()
    }

    /// Some `x` with `A x = b`, or `None` when `b` is outside the image.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        let tb = self.transform.apply(b);
        if tb[self.pivots.len()..].iter().any(|&v| v != 0) {
            return None;
        }
        let mut x = vec![0u64; self.reduced.cols];
        for (i, &pc) in self.pivots.iter().enumerate() {
            x[pc] = tb[i];
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_kernel_and_solve() {
        // columns (1,2,3), (2,4,6), (0,1,1) over ℤ/5
        let m = FpMatrix::from_columns(5, 3, &[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]);
        let s = FpSolver::new(&m);
        assert_eq!(s.rank(), 2);
        let k = s.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).iter().all(|&v| v == 0));
        let b = m.apply(&[3, 1, 4]);
        let x = s.solve(&b).unwrap();
        assert_eq!(m.apply(&x), b);
        assert!(s.solve(&[1, 0, 0]).is_none());
    }

    #[test]
    fn inverses() {
        for p in [2u64, 3, 5, 7, 101] {
            for a in 1..p {
                assert_eq!(a * inverse(a, p) % p, 1);
            }
        }
    }
}
