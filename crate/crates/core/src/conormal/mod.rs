//! Cosimplicial abelian groups with finite levelwise bases and their
//! conormalizations.
//!
//! The kernel form keeps `∩ ker s^i` with differential `Σ(-1)^i d^i`; the
//! cokernel form is `A^m / Σ_{i>0} im d^i` with differential induced by `d^0`.
//! Cochain degree `m` is stored in homological degree `-m`.

mod bicomplex;

pub use bicomplex::{conormalize_bicomplex, CosimplicialChainComplex, Form};

use crate::delta::{codegeneracy, coface, FiniteSimplicialSet, OrderedMap};
use crate::error::{Error, Result};
use crate::exact::{cokernel_basis, invariant_factors, inverse_unimodular, ColumnEchelon, Cokernel, GradedIntComplex, IntMatrix, Truncation};
use num_bigint::BigInt;
use num_traits::One;
use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

/// Data for the empty level of an augmented cosimplicial group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Augmentation {
    pub labels: Vec<String>,
    /// The map induced by `∅ -> [0]`.
    pub coface: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosimplicialAbGroup {
    labels: Vec<Vec<String>>,
    /// `cofaces[m][i]: A^m -> A^{m+1}` for `m < top`.
    cofaces: Vec<Vec<IntMatrix>>,
    /// `codegeneracies[m][i]: A^m -> A^{m-1}` for `1 ≤ m ≤ top` (index 0 empty).
    codegeneracies: Vec<Vec<IntMatrix>>,
    augmentation: Option<Augmentation>,
}

impl CosimplicialAbGroup {
    /// Validates every cosimplicial identity available in the level window.
    pub fn new(
        labels: Vec<Vec<String>>,
        cofaces: Vec<Vec<IntMatrix>>,
        codegeneracies: Vec<Vec<IntMatrix>>,
        augmentation: Option<Augmentation>,
    ) -> Result<Self> {
        let a = CosimplicialAbGroup { labels, cofaces, codegeneracies, augmentation };
        a.validate()?;
        Ok(a)
    }

    /// Build from a functor given on basis keys: `act(θ, key)` is the image of
    /// the basis element `key` of level `dom θ` under `θ`, as a list of
    /// `(key, coefficient)` in level `cod θ`.
    pub fn from_action<K, F>(levels: Vec<Vec<K>>, label: impl Fn(&K) -> String, act: F) -> Result<Self>
    where
        K: Clone + Eq + Hash,
        F: Fn(&OrderedMap, &K) -> Vec<(K, i64)>,
    {
        let top = levels.len().saturating_sub(1);
        let index: Vec<HashMap<K, usize>> =
            levels.iter().map(|l| l.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect()).collect();
        let matrix = |theta: &OrderedMap, from: usize, to: usize| -> Result<IntMatrix> {
            let mut trips = Vec::new();
            for (c, key) in levels[from].iter().enumerate() {
                for (img, coef) in act(theta, key) {
                    let r = *index[to]
                        .get(&img)
                        .ok_or_else(|| Error::Invalid(format!("image of a level-{from} basis element is not in level {to}")))?;
                    trips.push((r, c, coef));
                }
            }
            Ok(IntMatrix::from_i64_triplets(levels[to].len(), levels[from].len(), trips))
        };
        let mut cofaces = Vec::new();
        for m in 0..top {
            cofaces.push((0..=m + 1).map(|i| matrix(&coface(m, i).expect("index"), m, m + 1)).collect::<Result<Vec<_>>>()?);
        }
        let mut codeg = vec![Vec::new()];
        for m in 1..=top {
            codeg.push((0..m).map(|i| matrix(&codegeneracy(m, i).expect("index"), m, m - 1)).collect::<Result<Vec<_>>>()?);
        }
        let labels = levels.iter().map(|l| l.iter().map(&label).collect()).collect();
        Self::new(labels, cofaces, codeg, None)
    }

    /// Levelwise dual `m ↦ Map(W_m, Z)` of a finite simplicial set, levels `0..=top`.
    pub fn dual_of(w: &FiniteSimplicialSet, top: usize) -> Result<Self> {
        let levels: Vec<Vec<crate::delta::Simplex>> = (0..=top).map(|m| w.all_simplices(m)).collect();
        let index: Vec<HashMap<crate::delta::Simplex, usize>> =
            levels.iter().map(|l| l.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect()).collect();
        // (θ_* δ_τ) = Σ_{σ: θ^*σ = τ} δ_σ, assembled from the transpose.
        let matrix = |theta: &OrderedMap, from: usize, to: usize| -> IntMatrix {
            let trips = levels[to].iter().enumerate().map(|(r, sigma)| (r, index[from][&w.pullback(sigma, theta)], 1));
            IntMatrix::from_i64_triplets(levels[to].len(), levels[from].len(), trips)
        };
        let mut cofaces = Vec::new();
        for m in 0..top {
            cofaces.push((0..=m + 1).map(|i| matrix(&coface(m, i).expect("index"), m, m + 1)).collect());
        }
        let mut codeg = vec![Vec::new()];
        for m in 1..=top {
            codeg.push((0..m).map(|i| matrix(&codegeneracy(m, i).expect("index"), m, m - 1)).collect());
        }
        let labels = levels.iter().map(|l| l.iter().map(|s| format!("{}*", w.simplex_label(s))).collect()).collect();
        Self::new(labels, cofaces, codeg, None)
    }

    /// The constant cosimplicial group `Z` with every operator the identity.
    pub fn constant(top: usize) -> Self {
        let levels = vec![vec![()]; top + 1];
        Self::from_action(levels, |_| "1".into(), |_, _| vec![((), 1)]).expect("constant")
    }

    pub fn zero(top: usize) -> Self {
        let levels: Vec<Vec<()>> = vec![Vec::new(); top + 1];
        Self::from_action(levels, |_| String::new(), |_, _| Vec::new()).expect("zero")
    }

    pub fn with_augmentation(mut self, aug: Augmentation) -> Result<Self> {
        self.augmentation = Some(aug);
        self.validate()?;
        Ok(self)
    }

    pub fn augmentation(&self) -> Option<&Augmentation> {
        self.augmentation.as_ref()
    }

    pub fn top(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn rank(&self, m: usize) -> usize {
        self.labels[m].len()
    }

    pub fn labels(&self, m: usize) -> &[String] {
        &self.labels[m]
    }

    pub fn coface(&self, m: usize, i: usize) -> &IntMatrix {
        &self.cofaces[m][i]
    }

    pub fn codegeneracy(&self, m: usize, i: usize) -> &IntMatrix {
        &self.codegeneracies[m][i]
    }

    fn validate(&self) -> Result<()> {
        let top = self.top();
        let bad = |what: &str, m: usize| Err(Error::Invalid(format!("cosimplicial identity {what} fails at level {m}")));
        for m in 0..top {
            if self.cofaces[m].len() != m + 2 {
                return Err(Error::Invalid(format!("level {m} needs {} cofaces", m + 2)));
            }
            for (i, d) in self.cofaces[m].iter().enumerate() {
                if d.rows() != self.rank(m + 1) || d.cols() != self.rank(m) {
                    return Err(Error::Invalid(format!("coface d^{i} on level {m} has wrong shape")));
                }
            }
        }
        for m in 1..=top {
            if self.codegeneracies[m].len() != m {
                return Err(Error::Invalid(format!("level {m} needs {m} codegeneracies")));
            }
            for (i, s) in self.codegeneracies[m].iter().enumerate() {
                if s.rows() != self.rank(m - 1) || s.cols() != self.rank(m) {
                    return Err(Error::Invalid(format!("codegeneracy s^{i} on level {m} has wrong shape")));
                }
            }
        }
        let d = |m: usize, i: usize| &self.cofaces[m][i];
        let s = |m: usize, i: usize| &self.codegeneracies[m][i];
        for m in 0..top.saturating_sub(1) {
            for j in 0..=m + 2 {
                for i in 0..j {
                    if d(m + 1, j).mul(d(m, i)) != d(m + 1, i).mul(d(m, j - 1)) {
                        return bad("d^j d^i = d^i d^{j-1}", m);
                    }
                }
            }
        }
        for m in 1..top {
            for i in 0..m {
                for j in i..m {
                    if s(m, j).mul(s(m + 1, i)) != s(m, i).mul(s(m + 1, j + 1)) {
                        return bad("s^j s^i = s^i s^{j+1}", m);
                    }
                }
            }
        }
        for m in 1..=top {
            for j in 0..m {
                for i in 0..=m {
                    let lhs = s(m, j).mul(d(m - 1, i));
                    let rhs = if i == j || i == j + 1 {
                        IntMatrix::identity(self.rank(m - 1))
                    } else if i < j {
                        d(m - 2, i).mul(s(m - 1, j - 1))
                    } else {
                        d(m - 2, i - 1).mul(s(m - 1, j))
                    };
                    if lhs != rhs {
                        return bad("s^j d^i", m);
                    }
                }
            }
        }
        if let Some(aug) = &self.augmentation {
            if aug.coface.cols() != aug.labels.len() || aug.coface.rows() != self.rank(0) {
                return Err(Error::Invalid("augmentation coface has wrong shape".into()));
            }
            if top >= 1 && d(0, 0).mul(&aug.coface) != d(0, 1).mul(&aug.coface) {
                return bad("d^0 e = d^1 e", 0);
            }
        }
        Ok(())
    }

    fn alternating_coface(&self, m: usize) -> IntMatrix {
        let mut acc = IntMatrix::zeros(self.rank(m + 1), self.rank(m));
        for (i, d) in self.cofaces[m].iter().enumerate() {
            acc = if i % 2 == 0 { acc.add(d) } else { acc.sub(d) };
        }
        acc
    }

    /// Stacked codegeneracies out of level `m`.
    fn codegeneracy_stack(&self, m: usize) -> IntMatrix {
        let mut acc = IntMatrix::zeros(0, self.rank(m));
        for s in &self.codegeneracies[m] {
            acc = acc.vstack(s);
        }
        acc
    }

    /// Positive cofaces into level `m`, side by side.
    fn positive_coface_block(&self, m: usize) -> IntMatrix {
        let mut acc = IntMatrix::zeros(self.rank(m), 0);
        if m == 0 {
            return acc;
        }
        for d in &self.cofaces[m - 1][1..] {
            acc = acc.hstack(d);
        }
        acc
    }
}

/// Kernel-form data per level: basis columns and a solver for coordinates.
pub struct KernelForm {
    pub basis: Vec<IntMatrix>,
    solvers: Vec<ColumnEchelon>,
    pub complex: GradedIntComplex,
}

impl KernelForm {
    /// Coordinates of a vector of `A^m` lying in the kernel form.
    pub fn coordinates(&self, m: usize, v: &[(usize, BigInt)]) -> Option<Vec<(usize, BigInt)>> {
        self.solvers[m].solve(v)
    }
}

pub struct CokernelForm {
    pub quotients: Vec<Cokernel>,
    pub complex: GradedIntComplex,
}

fn level_window(top: usize) -> Truncation {
    Truncation::Window { lo: -(top as i64), hi: 1 }
}

const REGRADING: &str = "cochain degree m stored at homological degree -m";

/// Kernel form with its bases, for levels `0..=top`.
pub fn kernel_form(a: &CosimplicialAbGroup) -> Result<KernelForm> {
    let top = a.top();
    let mut basis = Vec::new();
    let mut solvers = Vec::new();
    for m in 0..=top {
        let k = if m == 0 {
            IntMatrix::identity(a.rank(0))
        } else {
            ColumnEchelon::new(&a.codegeneracy_stack(m), true).kernel()
        };
        if invariant_factors(&k).iter().any(|x| !x.is_one()) {
            return Err(Error::NonSplitKernel(-(m as i64)));
        }
        solvers.push(ColumnEchelon::new(&k, true));
        basis.push(k);
    }
    let mut labels = BTreeMap::new();
    for m in 0..=top {
        labels.insert(-(m as i64), (0..basis[m].cols()).map(|j| format!("N{m}.{j}")).collect::<Vec<_>>());
    }
    let mut diff = BTreeMap::new();
    for m in 0..top {
        let delta = a.alternating_coface(m);
        let mut cols = Vec::with_capacity(basis[m].cols());
        for j in 0..basis[m].cols() {
            let img = delta.apply_sparse(basis[m].col(j));
            cols.push(solvers[m + 1].solve(&img).ok_or(Error::NonSplitKernel(-(m as i64) - 1))?);
        }
        diff.insert(-(m as i64), IntMatrix::from_columns(basis[m + 1].cols(), cols));
    }
    let complex = GradedIntComplex::new(labels, diff, level_window(top))?.with_regrading(REGRADING);
    Ok(KernelForm { basis, solvers, complex })
}

pub fn cokernel_form(a: &CosimplicialAbGroup) -> Result<CokernelForm> {
    let top = a.top();
    let mut quotients = Vec::new();
    for m in 0..=top {
        quotients.push(cokernel_basis(&a.positive_coface_block(m), -(m as i64))?);
    }
    let mut labels = BTreeMap::new();
    for (m, q) in quotients.iter().enumerate() {
        let l: Vec<String> = match &q.basis_rows {
            Some(rows) => rows.iter().map(|&r| a.labels(m)[r].clone()).collect(),
            None => (0..q.rank()).map(|j| format!("Q{m}.{j}")).collect(),
        };
        labels.insert(-(m as i64), l);
    }
    let mut diff = BTreeMap::new();
    for m in 0..top {
        let d0 = &a.cofaces[m][0];
        let mat = quotients[m + 1].projection.mul(d0).mul(&quotients[m].section);
        diff.insert(-(m as i64), mat);
    }
    let complex = GradedIntComplex::new(labels, diff, level_window(top))?.with_regrading(REGRADING);
    Ok(CokernelForm { quotients, complex })
}

pub fn conormalize_kernel(a: &CosimplicialAbGroup) -> Result<GradedIntComplex> {
    Ok(kernel_form(a)?.complex)
}

pub fn conormalize_cokernel(a: &CosimplicialAbGroup) -> Result<GradedIntComplex> {
    Ok(cokernel_form(a)?.complex)
}

/// Mutually inverse chain isomorphisms between the kernel and cokernel forms.
#[derive(Clone, Debug)]
pub struct ComparisonCertificate {
    pub kernel: GradedIntComplex,
    pub cokernel: GradedIntComplex,
    /// kernel coordinates -> cokernel coordinates, per level.
    pub to_cokernel: Vec<IntMatrix>,
    /// cokernel coordinates -> kernel coordinates, per level.
    pub to_kernel: Vec<IntMatrix>,
    /// Kernel-form representatives of the chosen cokernel basis, as columns in `A^m`.
    pub kernel_representatives: Vec<IntMatrix>,
}

/// Composite `N^m ↪ A^m ↠ A^m/D^m` in every level, its inverse, and checks
/// that both commute with the differentials.
pub fn compare_conormalizations(a: &CosimplicialAbGroup) -> Result<ComparisonCertificate> {
    let kf = kernel_form(a)?;
    let cf = cokernel_form(a)?;
    let top = a.top();
    let mut to_c = Vec::new();
    let mut to_k = Vec::new();
    let mut reps = Vec::new();
    for m in 0..=top {
        let phi = cf.quotients[m].projection.mul(&kf.basis[m]);
        let psi = inverse_unimodular(&phi).ok_or(Error::ComparisonFailed(-(m as i64)))?;
        if !phi.mul(&psi).is_identity() || !psi.mul(&phi).is_identity() {
            return Err(Error::ComparisonFailed(-(m as i64)));
        }
        reps.push(kf.basis[m].mul(&psi));
        to_c.push(phi);
        to_k.push(psi);
    }
    for m in 0..top {
        let d = -(m as i64);
        let lhs = cf.complex.differential(d).mul(&to_c[m]);
        let rhs = to_c[m + 1].mul(&kf.complex.differential(d));
        if lhs != rhs {
            return Err(Error::ComparisonFailed(d));
        }
        let lhs = kf.complex.differential(d).mul(&to_k[m]);
        let rhs = to_k[m + 1].mul(&cf.complex.differential(d));
        if lhs != rhs {
            return Err(Error::ComparisonFailed(d));
        }
    }
    Ok(ComparisonCertificate {
        kernel: kf.complex,
        cokernel: cf.complex,
        to_cokernel: to_c,
        to_kernel: to_k,
        kernel_representatives: reps,
    })
}

pub(crate) fn sign(e: i64) -> BigInt {
    if e.rem_euclid(2) == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ranks(c: &GradedIntComplex, top: usize) -> Vec<usize> {
        (0..=top).map(|m| c.rank(-(m as i64))).collect()
    }

    #[test]
    fn dual_of_one_simplex() {
        let w = FiniteSimplicialSet::standard_simplex(1);
        let a = CosimplicialAbGroup::dual_of(&w, 3).unwrap();
        assert_eq!(ranks(&conormalize_kernel(&a).unwrap(), 3), vec![2, 1, 0, 0]);
        assert_eq!(ranks(&conormalize_cokernel(&a).unwrap(), 3), vec![2, 1, 0, 0]);
        let cert = compare_conormalizations(&a).unwrap();
        assert_eq!(cert.to_cokernel.len(), 4);
    }

    #[test]
    fn constant_group() {
        let a = CosimplicialAbGroup::constant(3);
        assert_eq!(ranks(&conormalize_kernel(&a).unwrap(), 3), vec![1, 0, 0, 0]);
        let c = conormalize_cokernel(&a).unwrap();
        assert_eq!(ranks(&c, 3), vec![1, 0, 0, 0]);
        assert_eq!(c.labels(0), a.labels(0));
        compare_conormalizations(&a).unwrap();
    }

    #[test]
    fn zero_group() {
        let a = CosimplicialAbGroup::zero(3);
        assert_eq!(ranks(&conormalize_kernel(&a).unwrap(), 3), vec![0; 4]);
        compare_conormalizations(&a).unwrap();
    }

    #[test]
    fn matches_cochains_of_circle_and_sphere() {
        for w in [FiniteSimplicialSet::circle(), FiniteSimplicialSet::sphere(2)] {
            let a = CosimplicialAbGroup::dual_of(&w, 4).unwrap();
            let cert = compare_conormalizations(&a).unwrap();
            let direct = w.cochains();
            for m in 0..=3i64 {
                assert_eq!(cert.kernel.rank(-m), direct.rank(-m));
                assert_eq!(cert.cokernel.rank(-m), direct.rank(-m));
            }
        }
    }

    #[test]
    fn broken_identity_rejected() {
        let a = CosimplicialAbGroup::constant(2);
        let mut cof = a.cofaces.clone();
        cof[0][1] = IntMatrix::from_dense(&[vec![2]]);
        assert!(CosimplicialAbGroup::new(a.labels.clone(), cof, a.codegeneracies.clone(), None).is_err());
    }

    #[test]
    fn augmentation_consistency() {
        let a = CosimplicialAbGroup::constant(2);
        let good = Augmentation { labels: vec!["e".into()], coface: IntMatrix::identity(1) };
        assert!(a.clone().with_augmentation(good).is_ok());
        let b = CosimplicialAbGroup::dual_of(&FiniteSimplicialSet::standard_simplex(1), 2).unwrap();
        let vertex = Augmentation { labels: vec!["e".into()], coface: IntMatrix::from_dense(&[vec![1], vec![0]]) };
        assert!(b.clone().with_augmentation(vertex).is_err());
        let sum = Augmentation { labels: vec!["e".into()], coface: IntMatrix::from_dense(&[vec![1], vec![1]]) };
        assert!(b.with_augmentation(sum).is_ok());
    }
}
