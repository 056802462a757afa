//! The `⟨f⟩` operations on cochains of a finite simplicial set.
//!
//! Level `T` (a finite ordered set of size `s`) carries `S^T W`, the integer
//! functions on all `(s-1)`-simplices of `W`, degenerate ones included. The
//! empty level has a single simplex, so `S^∅ W = ℤ`.

mod verify;

pub use verify::{verify_identities, verify_identities_variant, verify_identities_with, CochainCaps};

use crate::delta::{codegeneracy, coface, FinOrd, FiniteSimplicialSet, OrderedMap, Simplex};
use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CochainElement {
    /// Size of the level `T`.
    pub size: usize,
    pub values: Vec<i64>,
}

impl CochainElement {
    /// Cochain degree; `-1` on the empty level.
    pub fn degree(&self) -> i64 {
        self.size as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    fn support(&self) -> Vec<String> {
        self.values.iter().enumerate().filter(|(_, v)| **v != 0).map(|(i, v)| format!("{v}·#{i}")).collect()
    }
}

impl fmt::Display for CochainElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.support();
        if s.is_empty() {
            write!(f, "0@{}", self.size)
        } else {
            write!(f, "{}@{}", s.join(" + "), self.size)
        }
    }
}

/// How `⟨f⟩` restricts a simplex to a fiber.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AngleVariant {
    #[default]
    Faithful,
    /// Restricts to the first `|U|` vertices instead of to `U` (a deliberately
    /// wrong operation used to exercise the verifier).
    DroppedRenumbering,
}

/// `S^T W` for every `T` with `|T| <= max_size`, with the maps induced by
/// ordered maps.
#[derive(Debug)]
pub struct AugmentedCochainSystem {
    w: FiniteSimplicialSet,
    simplices: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
    variant: AngleVariant,
    /// Pullback along an ordered map, as simplex index to simplex index.
    tables: Mutex<HashMap<(usize, usize, Vec<usize>), Arc<Vec<usize>>>>,
}

impl AugmentedCochainSystem {
    pub fn new(w: FiniteSimplicialSet, max_size: usize) -> Self {
        let mut simplices = vec![Vec::new()];
        let mut index = vec![HashMap::new()];
        for s in 1..=max_size {
            let all = w.all_simplices(s - 1);
            index.push(all.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect());
            simplices.push(all);
        }
        AugmentedCochainSystem { w, simplices, index, variant: AngleVariant::Faithful, tables: Mutex::default() }
    }

    pub fn with_variant(mut self, variant: AngleVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn simplicial_set(&self) -> &FiniteSimplicialSet {
        &self.w
    }

    pub fn max_size(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn rank(&self, size: usize) -> usize {
        if size == 0 {
            1
        } else {
            self.simplices[size].len()
        }
    }

    /// The simplices indexing level `size` (empty for the one-point level 0).
    pub fn simplices(&self, size: usize) -> &[Simplex] {
        &self.simplices[size]
    }

    fn check_size(&self, size: usize) -> Result<()> {
        if size > self.max_size() {
            return Err(Error::LevelMismatch(format!("level of size {size} exceeds the cap {}", self.max_size())));
        }
        Ok(())
    }

    /// `σ(U)`: the face of `σ` spanned by the sorted vertex list `u`; `None`
    /// is the unique simplex of the empty level.
    pub fn restrict(&self, sigma: &Simplex, u: &[usize]) -> Option<Simplex> {
        if u.is_empty() {
            return None;
        }
        let inc = OrderedMap::new(FinOrd::new(u.len()), FinOrd::new(sigma.dim() + 1), u.to_vec())
            .expect("restriction to a sorted vertex subset");
        Some(self.w.pullback(sigma, &inc))
    }

    pub fn zero(&self, size: usize) -> CochainElement {
        CochainElement { size, values: vec![0; self.rank(size)] }
    }

    /// The dual basis element of simplex number `i` of level `size`.
    pub fn basis_element(&self, size: usize, i: usize) -> CochainElement {
        let mut x = self.zero(size);
        x.values[i] = 1;
        x
    }

    pub fn basis(&self, size: usize) -> Vec<CochainElement> {
        (0..self.rank(size)).map(|i| self.basis_element(size, i)).collect()
    }

    /// The generator `ε` of `S^∅ W`.
    pub fn epsilon(&self) -> CochainElement {
        CochainElement { size: 0, values: vec![1] }
    }

    /// The constant function `1` on vertices.
    pub fn unit(&self) -> CochainElement {
        CochainElement { size: 1, values: vec![1; self.rank(1)] }
    }

    /// For `φ: A -> B` (sizes), entry `j` is the index of `φ^*` of simplex
    /// `j` of level `B` within level `A`.
    fn table(&self, a: usize, b: usize, values: &[usize]) -> Arc<Vec<usize>> {
        let key = (a, b, values.to_vec());
        if let Some(t) = self.tables.lock().expect("table cache").get(&key) {
            return t.clone();
        }
        let t: Vec<usize> = if a == 0 {
            vec![0; self.rank(b)]
        } else {
            let phi = OrderedMap::new(FinOrd::new(a), FinOrd::new(b), values.to_vec()).expect("ordered map");
            self.simplices[b].iter().map(|s| self.index[a][&self.w.pullback(s, &phi)]).collect()
        };
        let t = Arc::new(t);
        self.tables.lock().expect("table cache").insert(key, t.clone());
        t
    }

    /// `φ_* x` with `(φ_* x)(σ) = x(φ^* σ)`.
    pub fn push_forward(&self, phi: &OrderedMap, x: &CochainElement) -> Result<CochainElement> {
        if phi.source().size != x.size {
            return Err(Error::LevelMismatch(format!("map from size {} applied at size {}", phi.source().size, x.size)));
        }
        let t = phi.target().size;
        self.check_size(t)?;
        if t == 0 {
            return Ok(x.clone());
        }
        let table = self.table(x.size, t, phi.values());
        let values = table.iter().map(|&j| x.values[j]).collect();
        Ok(CochainElement { size: t, values })
    }

    /// `d^i x`, raising the degree by one.
    pub fn coface(&self, i: usize, x: &CochainElement) -> Result<CochainElement> {
        if x.size == 0 {
            if i != 0 {
                return Err(Error::IndexOutOfRange { level: -1, index: i });
            }
            return self.push_forward(&OrderedMap::new(FinOrd::new(0), FinOrd::new(1), vec![])?, x);
        }
        self.push_forward(&coface(x.size - 1, i)?, x)
    }

    /// `s^i x`, lowering the degree by one.
    pub fn codegeneracy(&self, i: usize, x: &CochainElement) -> Result<CochainElement> {
        if x.size < 2 {
            return Err(Error::IndexOutOfRange { level: x.size as i64 - 1, index: i });
        }
        self.push_forward(&codegeneracy(x.size - 1, i)?, x)
    }

    fn same_system(&self, xs: &[&CochainElement]) -> Result<()> {
        for x in xs {
            if x.values.len() != self.rank(x.size) {
                return Err(Error::LevelMismatch(format!("cochain of length {} at size {}", x.values.len(), x.size)));
            }
        }
        Ok(())
    }

    /// `(x ⌣ y)(σ) = x(σ(0..p)) · y(σ(p..p+q))`.
    pub fn cup(&self, x: &CochainElement, y: &CochainElement) -> Result<CochainElement> {
        self.same_system(&[x, y])?;
        if x.size == 0 || y.size == 0 {
            return Err(Error::LevelMismatch("cup needs nonempty levels".into()));
        }
        let (p, q) = (x.size - 1, y.size - 1);
        let size = p + q + 1;
        self.check_size(size)?;
        let front: Vec<usize> = (0..=p).collect();
        let back: Vec<usize> = (p..=p + q).collect();
        Ok(self.product(size, &[(&front, x), (&back, y)]))
    }

    /// `(x ⊔ y)(σ) = x(σ(0..p)) · y(σ(p+1..p+q+1))`.
    pub fn sqcup(&self, x: &CochainElement, y: &CochainElement) -> Result<CochainElement> {
        self.same_system(&[x, y])?;
        let size = x.size + y.size;
        self.check_size(size)?;
        let front: Vec<usize> = (0..x.size).collect();
        let back: Vec<usize> = (x.size..size).collect();
        Ok(self.product(size, &[(&front, x), (&back, y)]))
    }

    /// `⟨f⟩(x_1, ..., x_k)(σ) = Π x_i(σ(f^{-1}(i)))` for `f: T -> {1..k}`
    /// given by its values. `x_i` must live on a level of size `|f^{-1}(i)|`.
    pub fn angle(&self, f: &[usize], xs: &[&CochainElement]) -> Result<CochainElement> {
        self.same_system(xs)?;
        let k = xs.len();
        if let Some(v) = f.iter().find(|&&v| v == 0 || v > k) {
            return Err(Error::LevelMismatch(format!("value {v} outside 1..={k}")));
        }
        let fibers = fibers(f, k);
        for (i, (u, x)) in fibers.iter().zip(xs).enumerate() {
            if u.len() != x.size {
                return Err(Error::LevelMismatch(format!(
                    "argument {} has size {} but its fiber has size {}",
                    i + 1,
                    x.size,
                    u.len()
                )));
            }
        }
        let size = f.len();
        self.check_size(size)?;
        if size == 0 {
            return Ok(CochainElement { size: 0, values: vec![xs.iter().map(|x| x.values[0]).product()] });
        }
        let fibers: Vec<Vec<usize>> = match self.variant {
            AngleVariant::Faithful => fibers,
            AngleVariant::DroppedRenumbering => fibers.iter().map(|u| (0..u.len()).collect()).collect(),
        };
        let parts: Vec<(&[usize], &CochainElement)> = fibers.iter().map(|u| u.as_slice()).zip(xs.iter().copied()).collect();
        Ok(self.product(size, &parts))
    }

    /// `σ ↦ Π x(σ(U))` over the given (vertex list, cochain) pairs.
    fn product(&self, size: usize, parts: &[(&[usize], &CochainElement)]) -> CochainElement {
        let tables: Vec<Arc<Vec<usize>>> = parts.iter().map(|(u, _)| self.table(u.len(), size, u)).collect();
        let values = (0..self.rank(size))
            .map(|j| {
                let mut acc = 1i64;
                for (t, (_, x)) in tables.iter().zip(parts) {
                    acc *= x.values[t[j]];
                    if acc == 0 {
                        break;
                    }
                }
                acc
            })
            .collect();
        CochainElement { size, values }
    }
}

/// `f^{-1}(1), ..., f^{-1}(k)` as sorted position lists.
pub fn fibers(f: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); k];
    for (t, &v) in f.iter().enumerate() {
        out[v - 1].push(t);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex1() -> AugmentedCochainSystem {
        AugmentedCochainSystem::new(FiniteSimplicialSet::standard_simplex(1), 3)
    }

    fn dual(sys: &AugmentedCochainSystem, size: usize, name: &str) -> CochainElement {
        let i = sys.simplices(size).iter().position(|s| sys.simplicial_set().simplex_label(s) == name).unwrap();
        sys.basis_element(size, i)
    }

    fn eval(sys: &AugmentedCochainSystem, x: &CochainElement, name: &str) -> i64 {
        let i = sys.simplices(x.size).iter().position(|s| sys.simplicial_set().simplex_label(s) == name).unwrap();
        x.values[i]
    }

    #[test]
    fn restriction_examples() {
        let sys = simplex1();
        let w = sys.simplicial_set();
        let e = sys.simplices(2).iter().find(|s| !s.is_degenerate()).unwrap().clone();
        assert_eq!(w.simplex_label(&sys.restrict(&e, &[0]).unwrap()), "0");
        assert_eq!(sys.restrict(&e, &[0, 1]).unwrap(), e);
        assert_eq!(sys.restrict(&e, &[]), None);

        let sys2 = AugmentedCochainSystem::new(FiniteSimplicialSet::standard_simplex(2), 3);
        let top = sys2.simplices(3).iter().find(|s| !s.is_degenerate()).unwrap().clone();
        assert_eq!(sys2.simplicial_set().simplex_label(&sys2.restrict(&top, &[0, 2]).unwrap()), "02");
        assert_eq!(sys2.restrict(&top, &[0, 1, 2]).unwrap(), top);
    }

    #[test]
    fn cup_and_sqcup_on_an_edge() {
        let sys = simplex1();
        let (v0, v1, e) = (dual(&sys, 1, "0"), dual(&sys, 1, "1"), dual(&sys, 2, "01"));
        assert_eq!(eval(&sys, &sys.cup(&v0, &e).unwrap(), "01"), 1);
        assert_eq!(eval(&sys, &sys.cup(&v1, &e).unwrap(), "01"), 0);
        assert_eq!(eval(&sys, &sys.cup(&e, &v1).unwrap(), "01"), 1);
        assert_eq!(eval(&sys, &sys.sqcup(&v0, &v1).unwrap(), "01"), 1);
        assert_eq!(eval(&sys, &sys.sqcup(&v1, &v0).unwrap(), "01"), 0);
        // pointwise product in degree 0
        let x = CochainElement { size: 1, values: vec![2, 3] };
        let y = CochainElement { size: 1, values: vec![5, 7] };
        assert_eq!(sys.cup(&x, &y).unwrap().values, vec![10, 21]);
    }

    #[test]
    fn angle_checks_levels() {
        let sys = simplex1();
        let v = sys.basis_element(1, 0);
        assert!(matches!(sys.angle(&[1, 1], &[&v, &sys.epsilon()]), Err(Error::LevelMismatch(_))));
        assert!(matches!(sys.angle(&[1, 3], &[&v, &v]), Err(Error::LevelMismatch(_))));
        let e = sys.basis_element(2, 1);
        assert_eq!(sys.angle(&[1, 1], &[&e, &sys.epsilon()]).unwrap(), e);
    }

    #[test]
    fn coface_of_the_empty_level_is_constant() {
        let sys = simplex1();
        let c = sys.coface(0, &CochainElement { size: 0, values: vec![4] }).unwrap();
        assert_eq!(c.values, vec![4, 4]);
    }
}
