//! Finite ordinals, order-preserving maps, and finite simplicial sets.

mod sset;

pub use sset::{FiniteSimplicialSet, NonDegenerate, Simplex, SimplexSpec, SimplicialSetSpec};

use crate::error::{Error, Result};
use crate::exact::{GradedIntComplex, IntMatrix, Truncation};
use std::collections::BTreeMap;
use std::fmt;

/// The ordinal `{0, ..., size-1}`; `[m]` has size `m+1` and size 0 is `∅`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FinOrd {
    pub size: usize,
}

impl FinOrd {
    pub fn new(size: usize) -> Self {
        FinOrd { size }
    }

    /// The object `[m]`.
    pub fn level(m: usize) -> Self {
        FinOrd { size: m + 1 }
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }
}

/// An order-preserving map between finite ordinals.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderedMap {
    target: usize,
    values: Vec<usize>,
}

impl fmt::Display for OrderedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.values.iter().map(|x| x.to_string()).collect();
        write!(f, "({})→{}", v.join(","), self.target)
    }
}

impl OrderedMap {
    pub fn new(source: FinOrd, target: FinOrd, values: Vec<usize>) -> Result<Self> {
        if values.len() != source.size {
            return Err(Error::Invalid(format!("{} values for a source of size {}", values.len(), source.size)));
        }
        if values.iter().any(|&v| v >= target.size) {
            return Err(Error::Invalid(format!("values {values:?} exceed target size {}", target.size)));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Invalid(format!("values {values:?} are not weakly increasing")));
        }
        Ok(OrderedMap { target: target.size, values })
    }

    /// Unchecked constructor for internal use on known-valid data.
    pub(crate) fn from_parts(target: usize, values: Vec<usize>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(values.iter().all(|&v| v < target));
        OrderedMap { target, values }
    }

    pub fn identity(size: usize) -> Self {
        OrderedMap { target: size, values: (0..size).collect() }
    }

    pub fn source(&self) -> FinOrd {
        FinOrd::new(self.values.len())
    }

    pub fn target(&self) -> FinOrd {
        FinOrd::new(self.target)
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, x: usize) -> usize {
        self.values[x]
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &OrderedMap) -> OrderedMap {
        assert_eq!(other.target, self.values.len(), "composition of incompatible maps");
        OrderedMap { target: self.target, values: other.values.iter().map(|&x| self.values[x]).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.target == self.values.len() && self.values.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn is_injective(&self) -> bool {
        self.values.windows(2).all(|w| w[0] < w[1])
    }

    pub fn is_surjective(&self) -> bool {
        let mut next = 0;
        for &v in &self.values {
            if v == next {
                next += 1;
            } else if v > next {
                return false;
            }
        }
        next == self.target
    }

    /// Sorted distinct values.
    pub fn image(&self) -> Vec<usize> {
        let mut im = self.values.clone();
        im.dedup();
        im
    }

    /// All order-preserving maps `source -> target`, lexicographically.
    pub fn all(source: usize, target: usize) -> Vec<OrderedMap> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(source);
        fn rec(source: usize, target: usize, lo: usize, cur: &mut Vec<usize>, out: &mut Vec<OrderedMap>) {
            if cur.len() == source {
                out.push(OrderedMap { target, values: cur.clone() });
                return;
            }
            for v in lo..target {
                cur.push(v);
                rec(source, target, v, cur, out);
                cur.pop();
            }
        }
        rec(source, target, 0, &mut cur, &mut out);
        out
    }

    pub fn all_injections(source: usize, target: usize) -> Vec<OrderedMap> {
        Self::all(source, target).into_iter().filter(|m| m.is_injective()).collect()
    }

    pub fn all_surjections(source: usize, target: usize) -> Vec<OrderedMap> {
        Self::all(source, target).into_iter().filter(|m| m.is_surjective()).collect()
    }
}

/// `d^i: [m] -> [m+1]`, the injection whose image omits `i`.
pub fn coface(m: usize, i: usize) -> Result<OrderedMap> {
    if i > m + 1 {
        return Err(Error::IndexOutOfRange { level: m as i64, index: i });
    }
    Ok(OrderedMap { target: m + 2, values: (0..=m).map(|x| if x < i { x } else { x + 1 }).collect() })
}

/// `s^i: [m] -> [m-1]`, the surjection hitting `i` twice.
pub fn codegeneracy(m: usize, i: usize) -> Result<OrderedMap> {
    if m == 0 || i > m - 1 {
        return Err(Error::IndexOutOfRange { level: m as i64, index: i });
    }
    Ok(OrderedMap { target: m, values: (0..=m).map(|x| if x <= i { x } else { x - 1 }).collect() })
}

/// Unique factorization `φ = mono ∘ epi`.
pub fn factor_epi_mono(phi: &OrderedMap) -> (OrderedMap, OrderedMap) {
    let image = phi.image();
    let epi_values = phi.values.iter().map(|v| image.binary_search(v).expect("value in image")).collect();
    let epi = OrderedMap { target: image.len(), values: epi_values };
    let mono = OrderedMap { target: phi.target, values: image };
    (epi, mono)
}

/// Label of a face `[j] -> [m]` as its vertex list, e.g. `[0,2]`.
fn vertex_label(vs: &[usize]) -> String {
    let v: Vec<String> = vs.iter().map(|x| x.to_string()).collect();
    format!("[{}]", v.join(","))
}

/// Normalized chains on the standard `m`-simplex: degree `j` has the
/// injections `[j] -> [m]`, and `∂ = Σ (-1)^i (drop vertex i)`.
pub fn standard_simplex_chains(m: usize) -> GradedIntComplex {
    let mut basis = BTreeMap::new();
    let mut faces: BTreeMap<i64, Vec<OrderedMap>> = BTreeMap::new();
    for j in 0..=m {
        let inj = OrderedMap::all_injections(j + 1, m + 1);
        basis.insert(j as i64, inj.iter().map(|f| vertex_label(f.values())).collect());
        faces.insert(j as i64, inj);
    }
    let mut diff = BTreeMap::new();
    for j in 1..=m as i64 {
        let src = &faces[&j];
        let tgt = &faces[&(j - 1)];
        let mut trips = Vec::new();
        for (c, f) in src.iter().enumerate() {
            for i in 0..f.values.len() {
                let mut v = f.values.clone();
                v.remove(i);
                let r = tgt.iter().position(|g| g.values == v).expect("face is an injection");
                trips.push((r, c, if i % 2 == 0 { 1 } else { -1 }));
            }
        }
        diff.insert(j, IntMatrix::from_i64_triplets(tgt.len(), src.len(), trips));
    }
    GradedIntComplex::new(basis, diff, Truncation::Complete).expect("simplex chains form a complex")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::homology;

    #[test]
    fn generators() {
        assert_eq!(coface(1, 0).unwrap().values(), &[1, 2]);
        assert_eq!(codegeneracy(1, 0).unwrap().values(), &[0, 0]);
        assert!(coface(1, 3).is_err());
        assert!(codegeneracy(0, 0).is_err());
        assert!(codegeneracy(2, 2).is_err());
    }

    #[test]
    fn cosimplicial_identities() {
        for m in 0..=6usize {
            // d^j d^i = d^i d^{j-1} for i < j  (maps [m] -> [m+2])
            for j in 0..=m + 2 {
                for i in 0..j {
                    let lhs = coface(m + 1, j).unwrap().compose(&coface(m, i).unwrap());
                    let rhs = coface(m + 1, i).unwrap().compose(&coface(m, j - 1).unwrap());
                    assert_eq!(lhs, rhs);
                }
            }
            if m == 0 {
                continue;
            }
            // s^j s^i = s^i s^{j+1} for i <= j  (maps [m+1] -> [m-1])
            for i in 0..m {
                for j in i..m {
                    let lhs = codegeneracy(m, j).unwrap().compose(&codegeneracy(m + 1, i).unwrap());
                    let rhs = codegeneracy(m, i).unwrap().compose(&codegeneracy(m + 1, j + 1).unwrap());
                    assert_eq!(lhs, rhs);
                }
            }
            // s^j d^i on [m-1] -> [m] -> [m-1]
            for j in 0..m {
                for i in 0..=m {
                    let lhs = codegeneracy(m, j).unwrap().compose(&coface(m - 1, i).unwrap());
                    let rhs = if i < j {
                        coface(m - 2, i).unwrap().compose(&codegeneracy(m - 1, j - 1).unwrap())
                    } else if i == j || i == j + 1 {
                        OrderedMap::identity(m)
                    } else {
                        coface(m - 2, i - 1).unwrap().compose(&codegeneracy(m - 1, j).unwrap())
                    };
                    if m >= 2 || i == j || i == j + 1 {
                        assert_eq!(lhs, rhs, "s^{j} d^{i} on level {m}");
                    }
                }
            }
        }
    }

    #[test]
    fn factorization_examples() {
        let phi = OrderedMap::new(FinOrd::level(2), FinOrd::level(1), vec![0, 0, 1]).unwrap();
        let (e, m) = factor_epi_mono(&phi);
        assert_eq!(e, phi);
        assert!(m.is_identity());
        let phi = OrderedMap::new(FinOrd::level(1), FinOrd::level(2), vec![1, 2]).unwrap();
        let (e, m) = factor_epi_mono(&phi);
        assert!(e.is_identity());
        assert_eq!(m, phi);
        let phi = OrderedMap::new(FinOrd::level(2), FinOrd::level(2), vec![0, 0, 2]).unwrap();
        let (e, m) = factor_epi_mono(&phi);
        assert_eq!(e.values(), &[0, 0, 1]);
        assert_eq!(m.values(), &[0, 2]);
        assert_eq!(m.target(), FinOrd::level(2));
    }

    #[test]
    fn factorization_is_a_bijection() {
        for s in 0..=6 {
            for t in 0..=6 {
                let maps = OrderedMap::all(s, t);
                // count composable (epi, mono) pairs through every middle size
                let pairs: usize = (0..=s.min(t))
                    .map(|k| OrderedMap::all_surjections(s, k).len() * OrderedMap::all_injections(k, t).len())
                    .sum();
                assert_eq!(maps.len(), pairs, "sizes {s} -> {t}");
                for phi in &maps {
                    let (e, m) = factor_epi_mono(phi);
                    assert!(e.is_surjective() && m.is_injective());
                    assert_eq!(&m.compose(&e), phi);
                }
            }
        }
    }

    #[test]
    fn simplex_chains() {
        let c1 = standard_simplex_chains(1);
        assert_eq!((c1.rank(0), c1.rank(1)), (2, 1));
        let d = c1.differential(1);
        assert_eq!(d.get(c1.index_of(0, "[1]").unwrap(), 0), 1.into());
        assert_eq!(d.get(c1.index_of(0, "[0]").unwrap(), 0), (-1).into());
        let c2 = standard_simplex_chains(2);
        assert_eq!((c2.rank(0), c2.rank(1), c2.rank(2)), (3, 3, 1));
        assert_eq!(homology(&c2, 0).unwrap().betti, 1);
        assert_eq!(homology(&c2, 1).unwrap().betti, 0);
        assert_eq!(homology(&c2, 2).unwrap().betti, 0);
        let c0 = standard_simplex_chains(0);
        assert_eq!((c0.rank(0), c0.rank(1)), (1, 0));
    }
}
