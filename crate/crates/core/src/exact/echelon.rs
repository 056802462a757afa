//! Sparse integer column reduction with unimodular transform tracking.
//!
//! Columns are reduced so that every nonzero reduced column has a distinct
//! pivot row (its largest row index). Combining columns with equal pivots uses
//! extended-gcd steps, so the transform stays unimodular and the zero columns
//! give a lattice basis of the kernel.

use super::matrix::{normalize_column, IntMatrix};
use super::smith::smith_normal_form;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

type SparseCol = Vec<(usize, BigInt)>;

#[derive(Clone, Debug)]
pub struct ColumnEchelon {
    rows: usize,
    cols: usize,
    reduced: Vec<SparseCol>,
    transform: Option<Vec<SparseCol>>,
    pivot_of_row: Vec<Option<usize>>,
}

fn axpy(y: &mut SparseCol, a: &BigInt, x: &SparseCol) {
    if a.is_zero() || x.is_empty() {
        return;
    }
    y.extend(x.iter().map(|(i, v)| (*i, a * v)));
    normalize_column(y);
}

fn lincomb(a: &BigInt, x: &SparseCol, b: &BigInt, y: &SparseCol) -> SparseCol {
    let mut out: SparseCol = Vec::with_capacity(x.len() + y.len());
    if !a.is_zero() {
        out.extend(x.iter().map(|(i, v)| (*i, a * v)));
    }
    if !b.is_zero() {
        out.extend(y.iter().map(|(i, v)| (*i, b * v)));
    }
    normalize_column(&mut out);
    out
}

impl ColumnEchelon {
    pub fn new(m: &IntMatrix, track: bool) -> Self {
        let mut e = ColumnEchelon {
            rows: m.rows(),
            cols: 0,
            reduced: Vec::with_capacity(m.cols()),
            transform: if track { Some(Vec::with_capacity(m.cols())) } else { None },
            pivot_of_row: vec![None; m.rows()],
        };
        for j in 0..m.cols() {
            e.push_column(m.col(j).to_vec());
        }
        e
    }

    fn push_column(&mut self, mut c: SparseCol) {
        let j = self.cols;
        self.cols += 1;
        let mut v: SparseCol = if self.transform.is_some() { vec![(j, BigInt::one())] } else { Vec::new() };
        while let Some((p, a)) = c.last().cloned() {
            let Some(l) = self.pivot_of_row[p] else {
                self.pivot_of_row[p] = Some(j);
                break;
            };
            let b = self.reduced[l].last().expect("pivot column nonzero").1.clone();
            if (&a % &b).is_zero() {
                let q = -(&a / &b);
                axpy(&mut c, &q, &self.reduced[l]);
                if let Some(t) = self.transform.as_ref() {
                    axpy(&mut v, &q, &t[l]);
                }
            } else {
                let eg = b.extended_gcd(&a);
                let (g, x, y) = (eg.gcd, eg.x, eg.y);
                let ag = &a / &g;
                let bg = &b / &g;
                let new_l = lincomb(&x, &self.reduced[l], &y, &c);
                let new_c = lincomb(&-ag.clone(), &self.reduced[l], &bg, &c);
                self.reduced[l] = new_l;
                c = new_c;
                if let Some(t) = self.transform.as_mut() {
                    let tl = lincomb(&x, &t[l], &y, &v);
                    let tc = lincomb(&-ag, &t[l], &bg, &v);
                    t[l] = tl;
                    v = tc;
                }
            }
        }
        self.reduced.push(c);
        if let Some(t) = self.transform.as_mut() {
            t.push(v);
        }
    }

    pub fn rank(&self) -> usize {
        self.reduced.iter().filter(|c| !c.is_empty()).count()
    }

    pub fn pivot_rows(&self) -> Vec<usize> {
        (0..self.rows).filter(|&r| self.pivot_of_row[r].is_some()).collect()
    }

    /// True when every pivot entry is ±1.
    pub fn unit_pivots(&self) -> bool {
        self.reduced.iter().filter_map(|c| c.last()).all(|(_, v)| v.abs().is_one())
    }

    /// Kernel lattice basis as columns (requires tracking).
    pub fn kernel(&self) -> IntMatrix {
        let t = self.transform.as_ref().expect("kernel needs a tracked transform");
        let cols: Vec<SparseCol> =
            self.reduced.iter().zip(t).filter(|(c, _)| c.is_empty()).map(|(_, v)| v.clone()).collect();
        IntMatrix::from_columns(self.cols, cols)
    }

    /// Solve `m x = b` over the integers (requires tracking). Returns `None`
    /// when `b` is not in the column lattice.
    pub fn solve(&self, b: &[(usize, BigInt)]) -> Option<SparseCol> {
        let t = self.transform.as_ref().expect("solve needs a tracked transform");
        let mut r: SparseCol = b.to_vec();
        normalize_column(&mut r);
        let mut x: SparseCol = Vec::new();
        while let Some((p, a)) = r.last().cloned() {
            let l = self.pivot_of_row[p]?;
            let piv = &self.reduced[l].last().expect("pivot").1;
            if !(&a % piv).is_zero() {
                return None;
            }
            let q = &a / piv;
            axpy(&mut r, &-q.clone(), &self.reduced[l]);
            axpy(&mut x, &q, &t[l]);
        }
        Some(x)
    }

    /// Reduce `b` modulo the column lattice, assuming unit pivots. The result
    /// is supported on non-pivot rows and is the canonical representative.
    pub fn reduce(&self, b: &[(usize, BigInt)]) -> SparseCol {
        let mut r: SparseCol = b.to_vec();
        normalize_column(&mut r);
        let mut rest: SparseCol = Vec::new();
        while let Some((p, a)) = r.pop() {
            match self.pivot_of_row[p] {
                None => rest.push((p, a)),
                Some(l) => {
                    r.push((p, a.clone()));
                    let piv = &self.reduced[l].last().expect("pivot").1;
                    debug_assert!(piv.abs().is_one());
                    let q = -(&a * piv);
                    axpy(&mut r, &q, &self.reduced[l]);
                }
            }
        }
        rest.reverse();
        rest
    }
}

pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    ColumnEchelon::new(m, true).kernel()
}

/// A chosen basis of a torsion-free cokernel `Z^rows / im(m)`.
#[derive(Clone, Debug)]
pub struct Cokernel {
    /// `rank x rows`: coordinates of the class of each standard vector.
    pub projection: IntMatrix,
    /// `rows x rank`: lifts of the chosen basis; `projection * section = 1`.
    pub section: IntMatrix,
    /// When the basis consists of standard vectors, the rows used.
    pub basis_rows: Option<Vec<usize>>,
}

impl Cokernel {
    pub fn rank(&self) -> usize {
        self.projection.rows()
    }

    pub fn project(&self, v: &[(usize, BigInt)]) -> SparseCol {
        self.projection.apply_sparse(v)
    }
}

/// Cokernel of `m` with a chosen basis. Fails with `TorsionCokernel(degree)`
/// when the quotient has torsion; `degree` only labels the error.
pub fn cokernel_basis(m: &IntMatrix, degree: i64) -> Result<Cokernel> {
    let rows = m.rows();
    let ech = ColumnEchelon::new(m, false);
    if ech.unit_pivots() {
        let free: Vec<usize> = (0..rows).filter(|&r| ech.pivot_of_row[r].is_none()).collect();
        let mut pos = vec![usize::MAX; rows];
        for (k, &r) in free.iter().enumerate() {
            pos[r] = k;
        }
        let mut cols: Vec<SparseCol> = Vec::with_capacity(rows);
        for r in 0..rows {
            if pos[r] != usize::MAX {
                cols.push(vec![(pos[r], BigInt::one())]);
            } else {
                let red = ech.reduce(&[(r, BigInt::one())]);
                cols.push(red.into_iter().map(|(i, v)| (pos[i], v)).collect());
            }
        }
        let projection = IntMatrix::from_columns(free.len(), cols);
        let section = IntMatrix::from_columns(
            rows,
            free.iter().map(|&r| vec![(r, BigInt::one())]).collect(),
        );
        return Ok(Cokernel { projection, section, basis_rows: Some(free) });
    }
    let s = smith_normal_form(m);
    if s.diag.iter().any(|d| !d.is_one()) {
        return Err(Error::TorsionCokernel(degree));
    }
    let r = s.rank();
    let keep: Vec<usize> = (r..rows).collect();
    let projection = s.u.select_rows(&keep);
    let uinv = inverse_unimodular(&s.u).expect("Smith transform is unimodular");
    let section = uinv.select_columns(&keep);
    Ok(Cokernel { projection, section, basis_rows: None })
}

/// Inverse of a square unimodular matrix, or `None` if it is not unimodular.
pub fn inverse_unimodular(u: &IntMatrix) -> Option<IntMatrix> {
    if u.rows() != u.cols() {
        return None;
    }
    let ech = ColumnEchelon::new(u, true);
    let n = u.rows();
    let mut cols = Vec::with_capacity(n);
    for i in 0..n {
        cols.push(ech.solve(&[(i, BigInt::one())])?);
    }
    Some(IntMatrix::from_columns(n, cols))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_rank_one() {
        let m = IntMatrix::from_dense(&[vec![2, 4, 6]]);
        let k = kernel_basis(&m);
        assert_eq!(k.cols(), 2);
        assert!(m.mul(&k).is_zero());
        // saturated: the Smith form of the kernel basis has unit factors
        assert!(smith_normal_form(&k).diag.iter().all(|d| d.is_one()));
    }

    #[test]
    fn solve_roundtrip() {
        let m = IntMatrix::from_dense(&[vec![2, 3], vec![1, 1], vec![0, 5]]);
        let ech = ColumnEchelon::new(&m, true);
        let x = vec![(0, BigInt::from(4)), (1, BigInt::from(-7))];
        let b = m.apply_sparse(&x);
        assert_eq!(ech.solve(&b).unwrap(), x);
        assert!(ech.solve(&[(0, BigInt::one())]).is_none());
    }

    #[test]
    fn cokernel_fast_and_slow_paths() {
        let m = IntMatrix::from_dense(&[vec![1, 0], vec![1, 1], vec![0, 1]]);
        let c = cokernel_basis(&m, 0).unwrap();
        assert_eq!(c.rank(), 1);
        assert!(c.projection.mul(&m).is_zero());
        assert!(c.projection.mul(&c.section).is_identity());
        let m2 = IntMatrix::from_dense(&[vec![2], vec![3]]);
        let c2 = cokernel_basis(&m2, 0).unwrap();
        assert_eq!(c2.rank(), 1);
        assert!(c2.projection.mul(&m2).is_zero());
        assert!(c2.projection.mul(&c2.section).is_identity());
        assert!(matches!(cokernel_basis(&IntMatrix::from_dense(&[vec![2]]), 3), Err(Error::TorsionCokernel(3))));
    }

    #[test]
    fn inverse_of_unimodular() {
        let u = IntMatrix::from_dense(&[vec![2, 1], vec![1, 1]]);
        let inv = inverse_unimodular(&u).unwrap();
        assert!(u.mul(&inv).is_identity());
        assert!(inverse_unimodular(&IntMatrix::from_dense(&[vec![2]])).is_none());
    }
}
