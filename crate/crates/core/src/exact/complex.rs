use super::matrix::IntMatrix;
use super::smith::invariant_factors;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Map, Value};
use std::collections::{BTreeMap, HashSet};

/// Degrees on which a complex's data is known to be complete.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    Complete,
    Window { lo: i64, hi: i64 },
}

impl Truncation {
    pub fn contains(&self, d: i64) -> bool {
        match *self {
            Truncation::Complete => true,
            Truncation::Window { lo, hi } => lo <= d && d <= hi,
        }
    }
}

/// Finitely generated free graded abelian group with labelled bases and
/// differentials `C_d -> C_{d-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedIntComplex {
    basis: BTreeMap<i64, Vec<String>>,
    differential: BTreeMap<i64, IntMatrix>,
    truncation: Truncation,
    /// Free-form note on how degrees relate to the natural grading, e.g.
    /// `"cochain degree m stored at -m"`.
    regrading: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homology {
    pub betti: usize,
    pub torsion: Vec<BigInt>,
}

impl serde::Serialize for Homology {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Homology", 2)?;
        st.serialize_field("betti", &self.betti)?;
        st.serialize_field("torsion", &self.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>())?;
        st.end()
    }
}

impl GradedIntComplex {
    /// Validates dimensions, label uniqueness and `d∘d = 0` inside the window.
    pub fn new(
        basis: BTreeMap<i64, Vec<String>>,
        differential: BTreeMap<i64, IntMatrix>,
        truncation: Truncation,
    ) -> Result<Self> {
        let mut basis = basis;
        basis.retain(|_, v| !v.is_empty());
        for (d, labels) in &basis {
            let set: HashSet<&String> = labels.iter().collect();
            if set.len() != labels.len() {
                return Err(Error::Invalid(format!("duplicate basis label in degree {d}")));
            }
        }
        let mut diff = BTreeMap::new();
        for (d, m) in differential {
            let src = basis.get(&d).map_or(0, |v| v.len());
            let tgt = basis.get(&(d - 1)).map_or(0, |v| v.len());
            if m.cols() != src || m.rows() != tgt {
                return Err(Error::Invalid(format!(
                    "differential in degree {d} is {}x{}, expected {tgt}x{src}",
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.is_zero() {
                diff.insert(d, m);
            }
        }
        let c = GradedIntComplex { basis, differential: diff, truncation, regrading: None };
        c.check_square_zero()?;
        Ok(c)
    }

    pub fn with_regrading(mut self, note: impl Into<String>) -> Self {
        self.regrading = Some(note.into());
        self
    }

    pub fn regrading(&self) -> Option<&str> {
        self.regrading.as_deref()
    }

    pub fn zero() -> Self {
        GradedIntComplex {
            basis: BTreeMap::new(),
            differential: BTreeMap::new(),
            truncation: Truncation::Complete,
            regrading: None,
        }
    }

    fn check_square_zero(&self) -> Result<()> {
        for (&d, m) in &self.differential {
            if !(self.truncation.contains(d) && self.truncation.contains(d - 1)) {
                continue;
            }
            if let Some(m2) = self.differential.get(&(d - 1)) {
                if !m2.mul(m).is_zero() {
                    return Err(Error::Invalid(format!("d∘d ≠ 0 starting in degree {d}")));
                }
            }
        }
        Ok(())
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    /// Smallest and largest degree with a nonzero group.
    pub fn support(&self) -> Option<(i64, i64)> {
        let lo = *self.basis.keys().next()?;
        let hi = *self.basis.keys().next_back()?;
        Some((lo, hi))
    }

    pub fn rank(&self, d: i64) -> usize {
        self.basis.get(&d).map_or(0, |v| v.len())
    }

    pub fn labels(&self, d: i64) -> &[String] {
        self.basis.get(&d).map_or(&[], |v| v.as_slice())
    }

    pub fn index_of(&self, d: i64, label: &str) -> Option<usize> {
        self.labels(d).iter().position(|l| l == label)
    }

    /// The differential out of degree `d` (a zero matrix when absent).
    pub fn differential(&self, d: i64) -> IntMatrix {
        self.differential
            .get(&d)
            .cloned()
            .unwrap_or_else(|| IntMatrix::zeros(self.rank(d - 1), self.rank(d)))
    }

    pub fn to_json(&self) -> Value {
        let mut basis = Map::new();
        let mut diff = Map::new();
        for (d, labels) in &self.basis {
            basis.insert(d.to_string(), json!(labels));
        }
        for (d, m) in &self.differential {
            let trips: Vec<Value> = m.triplets().into_iter().map(|(i, j, v)| json!([i, j, big_json(&v)])).collect();
            diff.insert(d.to_string(), Value::Array(trips));
        }
        let degrees: Vec<i64> = match self.support() {
            Some((lo, hi)) => (lo..=hi).collect(),
            None => Vec::new(),
        };
        let trunc = match self.truncation {
            Truncation::Complete => json!("complete"),
            Truncation::Window { lo, hi } => json!([lo, hi]),
        };
        json!({
            "degrees": degrees,
            "basis": Value::Object(basis),
            "differential": Value::Object(diff),
            "truncation_window": trunc,
            "regrading": self.regrading,
        })
    }
}

pub(crate) fn big_json(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(x) => json!(x),
        None => json!(v.to_string()),
    }
}

/// Homology in degree `d`: Betti number and invariant factors above one.
pub fn homology(c: &GradedIntComplex, d: i64) -> Result<Homology> {
    for e in [d - 1, d, d + 1] {
        if !c.truncation.contains(e) {
            return Err(Error::DegreeOutsideWindow(d));
        }
    }
    let out = invariant_factors(&c.differential(d)).len();
    let inn = invariant_factors(&c.differential(d + 1));
    let betti = c.rank(d) - out - inn.len();
    let torsion = inn.into_iter().filter(|x| !x.is_one()).collect();
    Ok(Homology { betti, torsion })
}

/// Tensor product with the Koszul sign `∂(x⊗y) = ∂x⊗y + (-1)^{|x|} x⊗∂y`.
/// Labels are `x⊗y`. A degree is complete when every pair contributing to it
/// (and to its neighbours through the differential) lies inside both windows.
pub fn tensor(a: &GradedIntComplex, b: &GradedIntComplex) -> GradedIntComplex {
    let (Some((alo, ahi)), Some((blo, bhi))) = (a.support(), b.support()) else {
        return GradedIntComplex::zero();
    };
    // index of (i, x, y) within degree d
    let mut basis: BTreeMap<i64, Vec<String>> = BTreeMap::new();
    let mut index: BTreeMap<(i64, i64), usize> = BTreeMap::new(); // (d, i) -> offset
    for d in alo + blo..=ahi + bhi {
        let mut labels = Vec::new();
        for i in alo..=ahi {
            let j = d - i;
            if a.rank(i) == 0 || b.rank(j) == 0 {
                continue;
            }
            index.insert((d, i), labels.len());
            for x in a.labels(i) {
                for y in b.labels(j) {
                    labels.push(format!("{x}⊗{y}"));
                }
            }
        }
        basis.insert(d, labels);
    }
    let mut diff = BTreeMap::new();
    for d in alo + blo..=ahi + bhi {
        let mut trips: Vec<(usize, usize, BigInt)> = Vec::new();
        for i in alo..=ahi {
            let j = d - i;
            let Some(&off) = index.get(&(d, i)) else { continue };
            let nb = b.rank(j);
            let da = a.differential(i);
            let db = b.differential(j);
            // ∂x ⊗ y
            if let Some(&toff) = index.get(&(d - 1, i - 1)) {
                for (x, col) in da.columns().iter().enumerate() {
                    for (xp, v) in col {
                        for y in 0..nb {
                            trips.push((toff + xp * nb + y, off + x * nb + y, v.clone()));
                        }
                    }
                }
            }
            // (-1)^i x ⊗ ∂y
            if let Some(&toff) = index.get(&(d - 1, i)) {
                let nbp = b.rank(j - 1);
                let sign = if i.rem_euclid(2) == 0 { BigInt::one() } else { -BigInt::one() };
                for x in 0..a.rank(i) {
                    for (y, col) in db.columns().iter().enumerate() {
                        for (yp, v) in col {
                            trips.push((toff + x * nbp + yp, off + x * nb + y, &sign * v));
                        }
                    }
                }
            }
        }
        let rows = basis.get(&(d - 1)).map_or(0, |v| v.len());
        let cols = basis[&d].len();
        diff.insert(d, IntMatrix::from_triplets(rows, cols, trips));
    }
    let truncation = match (a.truncation, b.truncation) {
        (Truncation::Complete, Truncation::Complete) => Truncation::Complete,
        _ => {
            let (wa_lo, wa_hi) = window_bounds(a.truncation);
            let (wb_lo, wb_hi) = window_bounds(b.truncation);
            let lo = (wa_lo.saturating_add(bhi)).max(wb_lo.saturating_add(ahi));
            let hi = (wa_hi.saturating_add(blo)).min(wb_hi.saturating_add(alo));
            Truncation::Window { lo, hi }
        }
    };
    GradedIntComplex::new(basis, diff, truncation).expect("tensor product of valid complexes is valid")
}

fn window_bounds(t: Truncation) -> (i64, i64) {
    match t {
        Truncation::Complete => (i64::MIN / 4, i64::MAX / 4),
        Truncation::Window { lo, hi } => (lo, hi),
    }
}

/// A degree-`shift` map of graded groups, meant to commute with the
/// differentials up to `(-1)^shift`.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: GradedIntComplex,
    pub target: GradedIntComplex,
    pub matrices: BTreeMap<i64, IntMatrix>,
    pub shift: i64,
}

impl ChainMap {
    pub fn matrix(&self, d: i64) -> IntMatrix {
        self.matrices
            .get(&d)
            .cloned()
            .unwrap_or_else(|| IntMatrix::zeros(self.target.rank(d + self.shift), self.source.rank(d)))
    }

    /// First degree where `∂f ≠ ±f∂` on the shared window, if any.
    pub fn check(&self) -> std::result::Result<(), i64> {
        let Some((lo, hi)) = self.source.support() else { return Ok(()) };
        let sign = if self.shift.rem_euclid(2) == 0 { BigInt::one() } else { -BigInt::one() };
        for d in lo..=hi + 1 {
            let inside = self.source.truncation.contains(d)
                && self.source.truncation.contains(d - 1)
                && self.target.truncation.contains(d + self.shift)
                && self.target.truncation.contains(d + self.shift - 1);
            if !inside {
                continue;
            }
            let lhs = self.target.differential(d + self.shift).mul(&self.matrix(d));
            let rhs = self.matrix(d - 1).mul(&self.source.differential(d)).scale(&sign);
            if lhs != rhs {
                return Err(d);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(ranks: &[(i64, usize)], diffs: Vec<(i64, IntMatrix)>) -> GradedIntComplex {
        let basis = ranks
            .iter()
            .map(|&(d, n)| (d, (0..n).map(|i| format!("c{d}_{i}")).collect()))
            .collect();
        GradedIntComplex::new(basis, diffs.into_iter().collect(), Truncation::Complete).unwrap()
    }

    fn interval() -> GradedIntComplex {
        cx(&[(0, 2), (1, 1)], vec![(1, IntMatrix::from_dense(&[vec![-1], vec![1]]))])
    }

    #[test]
    fn triangle_boundary_homology() {
        // vertices a,b,c; edges ab, bc, ca
        let d1 = IntMatrix::from_dense(&[vec![-1, 0, 1], vec![1, -1, 0], vec![0, 1, -1]]);
        let c = cx(&[(0, 3), (1, 3)], vec![(1, d1)]);
        assert_eq!(homology(&c, 0).unwrap(), Homology { betti: 1, torsion: vec![] });
        assert_eq!(homology(&c, 1).unwrap(), Homology { betti: 1, torsion: vec![] });
    }

    #[test]
    fn zero_differential_and_torsion() {
        let c = cx(&[(0, 2), (1, 1)], vec![]);
        assert_eq!(homology(&c, 0).unwrap().betti, 2);
        let t = cx(&[(0, 1), (1, 1)], vec![(1, IntMatrix::from_dense(&[vec![2]]))]);
        assert_eq!(homology(&t, 0).unwrap(), Homology { betti: 0, torsion: vec![BigInt::from(2)] });
        assert_eq!(homology(&t, 1).unwrap().betti, 0);
    }

    #[test]
    fn window_is_enforced() {
        let basis = [(0, vec!["a".to_string()])].into_iter().collect();
        let c = GradedIntComplex::new(basis, BTreeMap::new(), Truncation::Window { lo: 0, hi: 1 }).unwrap();
        assert_eq!(homology(&c, 0), Err(Error::DegreeOutsideWindow(0)));
    }

    #[test]
    fn nonzero_square_rejected() {
        let basis: BTreeMap<i64, Vec<String>> =
            [(0, vec!["a".into()]), (1, vec!["b".into()]), (2, vec!["c".into()])].into_iter().collect();
        let d = [(1, IntMatrix::from_dense(&[vec![1]])), (2, IntMatrix::from_dense(&[vec![1]]))].into_iter().collect();
        assert!(GradedIntComplex::new(basis, d, Truncation::Complete).is_err());
    }

    #[test]
    fn interval_squared() {
        let i = interval();
        let t = tensor(&i, &i);
        assert_eq!((t.rank(0), t.rank(1), t.rank(2)), (4, 4, 1));
        // ∂(e⊗e) = (v1−v0)⊗e − e⊗(v1−v0)
        let d2 = t.differential(2);
        let lab = |s: &str| t.index_of(1, s).unwrap();
        let e = "c1_0";
        let (v0, v1) = ("c0_0", "c0_1");
        assert_eq!(d2.get(lab(&format!("{v1}⊗{e}")), 0), BigInt::from(1));
        assert_eq!(d2.get(lab(&format!("{v0}⊗{e}")), 0), BigInt::from(-1));
        assert_eq!(d2.get(lab(&format!("{e}⊗{v1}")), 0), BigInt::from(-1));
        assert_eq!(d2.get(lab(&format!("{e}⊗{v0}")), 0), BigInt::from(1));
        for d in 0..=2 {
            assert_eq!(homology(&t, d).unwrap().betti, usize::from(d == 0));
        }
    }

    #[test]
    fn point_is_tensor_unit() {
        let p = cx(&[(0, 1)], vec![]);
        let i = interval();
        let t = tensor(&p, &i);
        assert_eq!((t.rank(0), t.rank(1)), (2, 1));
        assert_eq!(t.differential(1), i.differential(1));
    }

    #[test]
    fn chain_map_check() {
        let i = interval();
        let id = ChainMap {
            source: i.clone(),
            target: i.clone(),
            matrices: [(0, IntMatrix::identity(2)), (1, IntMatrix::identity(1))].into_iter().collect(),
            shift: 0,
        };
        assert!(id.check().is_ok());
        let bad = ChainMap {
            matrices: [(0, IntMatrix::identity(2)), (1, IntMatrix::from_dense(&[vec![2]]))].into_iter().collect(),
            ..id
        };
        assert_eq!(bad.check(), Err(1));
    }

    #[test]
    fn json_export_is_deterministic() {
        let i = interval();
        let a = serde_json::to_string(&i.to_json()).unwrap();
        let b = serde_json::to_string(&i.clone().to_json()).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"differential\""));
    }
}
