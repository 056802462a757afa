//! The chain operads `T` and `T_n` on the symbol basis of the conormalized box
//! products: composition, symmetric group action, unit, axiom verification
//! and homology.
//!
//! Composition is computed twice. The substitution route projects each
//! `g_i` to its normalized lift with the closed-form projector and substitutes
//! it into `h`. The box route lifts every argument by integer linear algebra
//! on the cosimplicial structure, applies the functorial map of box products
//! and projects back.

mod homology;
mod verify;

pub use homology::{little_cubes_comparison, operad_homology, CubesComparison, HomologyReport};
pub use verify::{verify_operad_axioms, OperadAxiomReport, SamplePolicy};

use crate::boxprod::{
    box_functorial_map, conormal_boundary, pattern_block, substitute, ComplexityBound, Permutation, SlotMap, Symbol,
    SymbolChain,
};
use crate::conormal::compare_conormalizations;
use crate::error::{Error, Result};
use num_traits::ToPrimitive;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

/// Deliberate defects for negative controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Corruption {
    /// Negate `γ(h; g)` when `h` has arity two and `g_1` has odd degree.
    FlipSign,
}

fn parity(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn codegeneracy_phi(a: u8, phi: &[u8]) -> Vec<u8> {
    phi.iter().map(|&x| if x <= a { x } else { x - 1 }).collect()
}

fn coface_phi(a: u8, phi: &[u8]) -> Vec<u8> {
    phi.iter().map(|&x| if x < a { x } else { x + 1 }).collect()
}

/// `s^a` on box-level chains.
pub fn codegeneracy_chain(a: usize, x: &SymbolChain) -> SymbolChain {
    x.iter()
        .filter_map(|(s, c)| {
            let t = s.with_phi(codegeneracy_phi(a as u8, s.phi()), s.level() - 1);
            t.no_collapsed_pair().then_some((t, c))
        })
        .collect()
}

/// `d^a` on box-level chains.
pub fn coface_chain(a: usize, x: &SymbolChain) -> SymbolChain {
    x.iter().map(|(s, c)| (s.with_phi(coface_phi(a as u8, s.phi()), s.level() + 1), c)).collect()
}

/// `(1 - d^r s^{r-1}) ∘ … ∘ (1 - d^1 s^0)` applied to a conormal symbol: the
/// unique element of `∩ ker s^i` with the same class modulo positive cofaces.
pub fn projector(s: &Symbol) -> SymbolChain {
    let mut cur = SymbolChain::single(s.clone(), 1);
    for i in 1..=s.level() {
        let corr = coface_chain(i, &codegeneracy_chain(i - 1, &cur));
        cur.add_scaled(&corr, -1);
    }
    cur
}

/// Differential of `T_n` on chains of conormal symbols.
pub fn boundary(x: &SymbolChain, n: ComplexityBound) -> SymbolChain {
    let mut out = SymbolChain::new();
    for (s, c) in x.iter() {
        out.add_scaled(&conormal_boundary(s, n, None), c);
    }
    out
}

/// The unit `Σ_r id_r` of arity one, truncated to levels `0..=max_level`.
pub fn unit(max_level: usize) -> SymbolChain {
    (0..=max_level).map(|r| (Symbol::unit(r), 1)).collect()
}

struct Lift {
    /// Column `j` is the normalized lift of the `j`-th cokernel generator.
    columns: Vec<Vec<(Vec<u8>, i64)>>,
    index: HashMap<Vec<u8>, usize>,
}

/// `T` or `T_n` with composition, action and caches for lifts.
pub struct SymbolOperad {
    n: ComplexityBound,
    corruption: Option<Corruption>,
    projections: Mutex<HashMap<Symbol, Arc<SymbolChain>>>,
    lifts: Mutex<HashMap<(usize, u64, usize), Arc<Lift>>>,
}

impl SymbolOperad {
    pub fn new(n: ComplexityBound) -> Self {
        SymbolOperad { n, corruption: None, projections: Mutex::default(), lifts: Mutex::default() }
    }

    pub fn corrupted(n: ComplexityBound, c: Corruption) -> Self {
        SymbolOperad { corruption: Some(c), ..SymbolOperad::new(n) }
    }

    pub fn bound(&self) -> ComplexityBound {
        self.n
    }

    pub fn boundary(&self, x: &SymbolChain) -> SymbolChain {
        boundary(x, self.n)
    }

    fn projection(&self, s: &Symbol) -> Arc<SymbolChain> {
        if let Some(p) = self.projections.lock().unwrap().get(s) {
            return p.clone();
        }
        let p = Arc::new(projector(s));
        self.projections.lock().unwrap().insert(s.clone(), p.clone());
        p
    }

    fn sign(&self, h: &Symbol, gs: &[&Symbol]) -> i64 {
        let sizes = h.fiber_sizes();
        let mut e = 0i64;
        let mut before = 0i64;
        let mut total = 0i64;
        for (g, &size) in gs.iter().zip(&sizes) {
            e += g.degree() * before;
            before += size as i64 - 1;
            total += g.degree();
        }
        e += h.degree() * total;
        let mut sign = parity(e);
        if self.corruption == Some(Corruption::FlipSign) && h.arity() == 2 && gs[0].degree() % 2 != 0 {
            sign = -sign;
        }
        sign
    }

    fn check_inputs(&self, h: &Symbol, gs: &[&Symbol]) -> Result<bool> {
        if gs.len() != h.arity() {
            return Err(Error::IncompatibleInputs(format!("{} arguments for arity {}", gs.len(), h.arity())));
        }
        for s in std::iter::once(h).chain(gs.iter().copied()) {
            if !s.is_conormal_basis() || !self.n.allows(s.complexity()) {
                return Err(Error::IncompatibleInputs(format!("{s} is not a basis symbol of this operad")));
            }
        }
        Ok(gs.iter().zip(h.fiber_sizes()).all(|(g, size)| g.level() + 1 == size))
    }

    /// `γ(h; g_1, …, g_k)` by substituting normalized lifts of the `g_i` into `h`.
    pub fn compose(&self, h: &Symbol, gs: &[&Symbol]) -> Result<SymbolChain> {
        if !self.check_inputs(h, gs)? {
            return Ok(SymbolChain::new());
        }
        let sign = self.sign(h, gs);
        let lifts: Vec<Arc<SymbolChain>> = gs.iter().map(|g| self.projection(g)).collect();
        let terms: Vec<Vec<(&Symbol, i64)>> = lifts.iter().map(|l| l.iter().collect()).collect();
        let mut out = SymbolChain::new();
        let mut idx = vec![0usize; terms.len()];
        if terms.iter().any(|t| t.is_empty()) {
            return Ok(out);
        }
        'outer: loop {
            let inner: Vec<&Symbol> = idx.iter().zip(&terms).map(|(&i, t)| t[i].0).collect();
            let coef: i64 = idx.iter().zip(&terms).map(|(&i, t)| t[i].1).product();
            if let Some(s) = substitute(h, &inner)? {
                if s.covers_positive() {
                    if !self.n.allows(s.complexity()) {
                        return Err(Error::NormalizationFailure(format!("{s} exceeds complexity {}", self.n)));
                    }
                    out.add_term(s, sign * coef);
                }
            }
            for d in (0..idx.len()).rev() {
                idx[d] += 1;
                if idx[d] < terms[d].len() {
                    continue 'outer;
                }
                idx[d] = 0;
            }
            break;
        }
        Ok(out)
    }

    /// Multilinear extension of [`SymbolOperad::compose`].
    pub fn compose_chains(&self, h: &SymbolChain, gs: &[SymbolChain]) -> Result<SymbolChain> {
        let mut out = SymbolChain::new();
        for (hs, hc) in h.iter() {
            if gs.len() != hs.arity() {
                return Err(Error::IncompatibleInputs(format!("{} arguments for arity {}", gs.len(), hs.arity())));
            }
            let terms: Vec<Vec<(&Symbol, i64)>> = gs.iter().map(|g| g.iter().collect()).collect();
            if terms.iter().any(|t| t.is_empty()) {
                continue;
            }
            let mut idx = vec![0usize; terms.len()];
            'outer: loop {
                let inner: Vec<&Symbol> = idx.iter().zip(&terms).map(|(&i, t)| t[i].0).collect();
                let coef: i64 = idx.iter().zip(&terms).map(|(&i, t)| t[i].1).product();
                out.add_scaled(&self.compose(hs, &inner)?, hc * coef);
                for d in (0..idx.len()).rev() {
                    idx[d] += 1;
                    if idx[d] < terms[d].len() {
                        continue 'outer;
                    }
                    idx[d] = 0;
                }
                break;
            }
        }
        Ok(out)
    }

    fn lift_table(&self, q: usize, mask: u64, r: usize) -> Result<Arc<Lift>> {
        let key = (q, mask, r);
        if let Some(l) = self.lifts.lock().unwrap().get(&key) {
            return Ok(l.clone());
        }
        let block = pattern_block(q, mask, r)?;
        let cert = compare_conormalizations(&block.group)?;
        let (phis, _) = block.conormal_phis()?;
        let reps = &cert.kernel_representatives[r];
        let columns = (0..reps.cols())
            .map(|j| {
                reps.col(j)
                    .iter()
                    .map(|(row, v)| (block.phis[r][*row].clone(), v.to_i64().expect("small lift coefficient")))
                    .collect()
            })
            .collect();
        let index = phis[r].iter().enumerate().map(|(j, p)| (p.clone(), j)).collect();
        let lift = Arc::new(Lift { columns, index });
        self.lifts.lock().unwrap().insert(key, lift.clone());
        Ok(lift)
    }

    /// Normalized lift of a conormal symbol, from the kernel and cokernel
    /// forms of its pattern block.
    pub fn lift(&self, s: &Symbol) -> Result<SymbolChain> {
        let table = self.lift_table(s.q(), s.equal_mask(), s.level())?;
        let j = *table
            .index
            .get(s.phi())
            .ok_or_else(|| Error::NormalizationFailure(format!("{s} is not a cokernel generator of its block")))?;
        Ok(table.columns[j].iter().map(|(phi, c)| (s.with_phi(phi.clone(), s.level()), *c)).collect())
    }

    /// `γ(h; g_1, …, g_k)` as the composite of `h`, viewed as a map out of
    /// `Δ^•_*`, with the box product of the `g_i`, then projected back.
    pub fn compose_via_box(&self, h: &Symbol, gs: &[&Symbol]) -> Result<SymbolChain> {
        if !self.check_inputs(h, gs)? {
            return Ok(SymbolChain::new());
        }
        let mut slots = Vec::new();
        for g in gs {
            let mut images = BTreeMap::new();
            images.insert(g.level(), self.lift(g)?);
            slots.push(SlotMap { arity: g.arity(), degree: g.degree(), images });
        }
        let map = box_functorial_map(slots, h.arity())?;
        let total: i64 = gs.iter().map(|g| g.degree()).sum();
        let mut image = map.apply(&self.lift(h)?)?.scaled(parity(h.degree() * total));
        if self.corruption == Some(Corruption::FlipSign) && h.arity() == 2 && gs[0].degree() % 2 != 0 {
            image = image.scaled(-1);
        }
        for a in 0..h.level() {
            if !codegeneracy_chain(a, &image).is_zero() {
                return Err(Error::NormalizationFailure(format!("composite of {h} is not normalized at s^{a}")));
            }
        }
        image.retain(|s| s.covers_positive());
        Ok(image)
    }

    /// Right action of `σ` on a chain of arity `σ.len()`.
    pub fn act(&self, x: &SymbolChain, sigma: &Permutation) -> SymbolChain {
        x.act(sigma)
    }
}

/// All basis symbols of `T_n(k)` with source size at most `qmax + 1`, for
/// `k ≤ kmax`, together with the operations. This window is closed under the
/// differential.
pub struct TruncatedChainOperad {
    pub operad: SymbolOperad,
    pub kmax: usize,
    pub qmax: usize,
    basis: BTreeMap<usize, Vec<Symbol>>,
}

pub fn build_t(kmax: usize, n: ComplexityBound, qmax: usize) -> Result<TruncatedChainOperad> {
    build_with(SymbolOperad::new(n), kmax, qmax)
}

pub fn build_with(operad: SymbolOperad, kmax: usize, qmax: usize) -> Result<TruncatedChainOperad> {
    if kmax == 0 {
        return Err(Error::Invalid("arity window must contain 1".into()));
    }
    let n = operad.bound();
    let mut basis = BTreeMap::new();
    let mut total = 0usize;
    for k in 1..=kmax {
        let mut b = Vec::new();
        for q in k - 1..=qmax {
            for r in 0..=q + 1 {
                b.extend(crate::boxprod::enumerate_symbols(k, q, r, n));
            }
        }
        total += b.len();
        if total > 2_000_000 {
            return Err(Error::BoundsExceeded(format!("more than 2000000 symbols up to q = {qmax}")));
        }
        basis.insert(k, b);
    }
    Ok(TruncatedChainOperad { operad, kmax, qmax, basis })
}

impl TruncatedChainOperad {
    pub fn basis(&self, k: usize) -> &[Symbol] {
        self.basis.get(&k).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn unit(&self) -> SymbolChain {
        unit(self.qmax + 1)
    }

    pub fn compose(&self, h: &Symbol, gs: &[&Symbol]) -> Result<SymbolChain> {
        self.operad.compose(h, gs)
    }

    /// The window of arity `k` as a graded complex.
    pub fn complex(&self, k: usize) -> Result<crate::exact::GradedIntComplex> {
        let mut by_degree: BTreeMap<i64, Vec<&Symbol>> = BTreeMap::new();
        for s in self.basis(k) {
            by_degree.entry(s.degree()).or_default().push(s);
        }
        let mut labels = BTreeMap::new();
        let mut diff = BTreeMap::new();
        for (&p, b) in &by_degree {
            labels.insert(p, b.iter().map(|s| s.to_string()).collect());
            let Some(target) = by_degree.get(&(p - 1)) else { continue };
            let idx: HashMap<&Symbol, usize> = target.iter().enumerate().map(|(i, s)| (*s, i)).collect();
            let mut trips = Vec::new();
            for (c, s) in b.iter().enumerate() {
                for (t, v) in conormal_boundary(s, self.operad.bound(), None).iter() {
                    let row = *idx
                        .get(t)
                        .ok_or_else(|| Error::NormalizationFailure(format!("boundary of {s} leaves the window")))?;
                    trips.push((row, c, v));
                }
            }
            diff.insert(p, crate::exact::IntMatrix::from_i64_triplets(target.len(), b.len(), trips));
        }
        crate::exact::GradedIntComplex::new(labels, diff, crate::exact::Truncation::Complete)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(k: usize, f: &[u8], phi: &[u8], r: usize) -> Symbol {
        Symbol::new(k, f.to_vec(), phi.to_vec(), r).unwrap()
    }

    #[test]
    fn degree_zero_generators_of_arity_two() {
        let op = SymbolOperad::new(ComplexityBound::Unbounded);
        let a = sym(2, &[1, 2], &[0, 0], 0);
        let b = sym(2, &[2, 1], &[0, 0], 0);
        let u = Symbol::unit(0);
        for g in [&a, &b] {
            assert_eq!(op.compose(g, &[&u, &u]).unwrap(), SymbolChain::single(g.clone(), 1));
            assert_eq!(op.compose(&u, &[g]).unwrap(), SymbolChain::single(g.clone(), 1));
        }
        let c = op.compose(&a, &[&a, &u]).unwrap();
        assert_eq!(c, SymbolChain::single(sym(3, &[1, 2, 3], &[0, 0, 0], 0), 1));
        assert_eq!(op.compose_via_box(&a, &[&a, &u]).unwrap(), c);
    }

    #[test]
    fn projector_equals_linear_algebra_lift() {
        let op = SymbolOperad::new(ComplexityBound::Unbounded);
        for k in 1..=2 {
            for q in k - 1..=4 {
                for r in 0..=q + 1 {
                    for s in crate::boxprod::enumerate_symbols(k, q, r, ComplexityBound::Unbounded) {
                        assert_eq!(projector(&s), op.lift(&s).unwrap(), "{s}");
                    }
                }
            }
        }
    }

    #[test]
    fn window_is_a_complex() {
        let t = build_t(2, ComplexityBound::Unbounded, 4).unwrap();
        for k in 1..=2 {
            t.complex(k).unwrap();
        }
    }

    #[test]
    fn unit_is_a_cycle_up_to_truncation() {
        let u = unit(5);
        let d = boundary(&u, ComplexityBound::Unbounded);
        assert!(d.iter().all(|(s, _)| s.level() == 6), "{d}");
    }

    #[test]
    fn corrupted_sign_changes_results() {
        let good = SymbolOperad::new(ComplexityBound::Unbounded);
        let bad = SymbolOperad::corrupted(ComplexityBound::Unbounded, Corruption::FlipSign);
        let h = sym(2, &[1, 2], &[0, 0], 0);
        let g = sym(2, &[1, 2], &[0, 0], 0);
        let u = Symbol::unit(0);
        assert_eq!(good.compose(&h, &[&g, &u]).unwrap(), bad.compose(&h, &[&g, &u]).unwrap());
        let h = sym(2, &[1, 2, 1], &[0, 0, 1], 1);
        let g = sym(1, &[1, 1], &[0, 1], 1);
        assert_eq!(g.degree(), 0);
        let g = sym(2, &[1, 2], &[0, 1], 1);
        assert_eq!(g.degree(), -1);
        assert_eq!(good.compose(&h, &[&g, &u]).unwrap(), bad.compose(&h, &[&g, &u]).unwrap().scaled(-1));
    }
}
