//! Substitution of symbols into the fibers of another symbol, the symmetric
//! group action on symbols, and maps between box products induced by maps
//! out of `Δ^•_*` in each slot.

use super::{Symbol, SymbolChain};
use crate::delta::OrderedMap;
use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;

/// Flattens `outer` with `inner[i]` placed in the `i`-th fiber of `outer`.
///
/// `inner[i]` must sit at level `|f^{-1}(i)| - 1`, its `φ` indexing the
/// elements of that fiber. Labels of `inner[i]` are shifted past the arities of
/// the earlier inner symbols. Returns `None` when the result has a collapsed
/// pair and therefore vanishes.
pub fn substitute(outer: &Symbol, inner: &[&Symbol]) -> Result<Option<Symbol>> {
    let s = substitute_unreduced(outer, inner)?;
    Ok(s.no_collapsed_pair().then_some(s))
}

/// [`substitute`] without discarding collapsed results. A collapsed pair only
/// makes the class vanish once every position carries a top simplex, so
/// iterated substitution must defer the check to the last step.
pub fn substitute_unreduced(outer: &Symbol, inner: &[&Symbol]) -> Result<Symbol> {
    let k = outer.arity();
    if inner.len() != k {
        return Err(Error::IncompatibleInputs(format!("{} symbols for arity {k}", inner.len())));
    }
    // positions of outer source grouped by fiber: fiber i is order[start[i]..start[i + 1]]
    let mut start = vec![0usize; k + 1];
    for &v in outer.f() {
        start[v as usize] += 1;
    }
    for i in 0..k {
        start[i + 1] += start[i];
    }
    let mut order = vec![0usize; outer.f().len()];
    let mut fill = start.clone();
    for (t, &v) in outer.f().iter().enumerate() {
        order[fill[v as usize - 1]] = t;
        fill[v as usize - 1] += 1;
    }
    let mut offset = 0usize;
    // (position in outer source, position in inner source, new label)
    let mut elems: Vec<(usize, usize, u8)> = Vec::with_capacity(inner.iter().map(|g| g.f().len()).sum());
    for (i, g) in inner.iter().enumerate() {
        let fiber = &order[start[i]..start[i + 1]];
        if g.level() + 1 != fiber.len() {
            return Err(Error::IncompatibleInputs(format!(
                "slot {} has {} elements but the symbol sits at level {}",
                i + 1,
                fiber.len(),
                g.level()
            )));
        }
        for (s, (&gv, &gp)) in g.f().iter().zip(g.phi()).enumerate() {
            elems.push((fiber[gp as usize], s, gv + offset as u8));
        }
        offset += g.arity();
    }
    elems.sort_unstable_by_key(|&(pos, s, _)| (pos, s));
    let f: Vec<u8> = elems.iter().map(|e| e.2).collect();
    let phi: Vec<u8> = elems.iter().map(|e| outer.phi()[e.0]).collect();
    Ok(Symbol::raw(offset, f, phi, outer.level()))
}

/// A symbol with symbols substituted into its slots, not yet flattened.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NestedSymbol {
    pub outer: Symbol,
    pub inner: Vec<Symbol>,
}

impl NestedSymbol {
    pub fn new(outer: Symbol, inner: Vec<Symbol>) -> Self {
        NestedSymbol { outer, inner }
    }

    pub fn flatten(&self) -> Result<Option<Symbol>> {
        let refs: Vec<&Symbol> = self.inner.iter().collect();
        substitute(&self.outer, &refs)
    }
}

/// A permutation of `{0..k-1}`, stored as the list of images.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || seen[x] {
                return Err(Error::Invalid(format!("{images:?} is not a permutation")));
            }
            seen[x] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(k: usize) -> Self {
        Permutation((0..k).collect())
    }

    pub fn transposition(k: usize, a: usize, b: usize) -> Self {
        let mut v: Vec<usize> = (0..k).collect();
        v.swap(a, b);
        Permutation(v)
    }

    /// All permutations of `k` letters in lexicographic order.
    pub fn all(k: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..k).collect();
        loop {
            out.push(Permutation(cur.clone()));
            let Some(i) = (1..k).rev().find(|&i| cur[i - 1] < cur[i]) else { return out };
            let j = (i..k).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor");
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Permutation(inv)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Sign of listing items of the given degrees in the order
    /// `σ(0), σ(1), …` instead of `0, 1, …`: one factor `-1` per pair of odd
    /// items that changes relative order.
    pub fn koszul_sign(&self, degrees: &[i64]) -> i64 {
        let mut sign = 1;
        for a in 0..self.0.len() {
            for b in a + 1..self.0.len() {
                let (x, y) = (self.0[a], self.0[b]);
                if x > y && degrees[x] % 2 != 0 && degrees[y] % 2 != 0 {
                    sign = -sign;
                }
            }
        }
        sign
    }

    /// The permutation of `Σ sizes` letters moving whole blocks: block `i`
    /// of the result is block `σ(i)` of the input, blocks sized by `sizes`
    /// (indexed by input block).
    pub fn block(&self, sizes: &[usize]) -> Permutation {
        let mut starts = vec![0];
        for s in sizes {
            starts.push(starts.last().unwrap() + s);
        }
        let mut out = Vec::new();
        for &b in &self.0 {
            out.extend(starts[b]..starts[b] + sizes[b]);
        }
        Permutation(out)
    }

    /// Block sum `τ_1 ⊕ … ⊕ τ_k`.
    pub fn sum(parts: &[Permutation]) -> Permutation {
        let mut out = Vec::new();
        let mut off = 0;
        for p in parts {
            out.extend(p.0.iter().map(|&x| x + off));
            off += p.0.len();
        }
        Permutation(out)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.0.iter().map(|x| (x + 1).to_string()).collect();
        write!(f, "({})", v.join(" "))
    }
}

impl Symbol {
    /// Right action: label `i` of the result is label `σ(i)` of `self`, with
    /// the Koszul sign of reordering the fiber simplices, whose degrees are
    /// the fiber sizes minus one.
    pub fn act(&self, sigma: &Permutation) -> (Symbol, i64) {
        assert_eq!(sigma.len(), self.arity(), "permutation size");
        let inv = sigma.inverse();
        let f = self.f().iter().map(|&v| inv.apply(v as usize - 1) as u8 + 1).collect();
        let degs: Vec<i64> = self.fiber_sizes().iter().map(|&s| s as i64 - 1).collect();
        (Symbol::raw(self.arity(), f, self.phi().to_vec(), self.level()), sigma.koszul_sign(&degs))
    }

    /// Cosimplicial action of `θ: [r] → [r']` on a box-level symbol.
    pub fn push_forward(&self, theta: &OrderedMap) -> Option<Symbol> {
        let phi = self.phi().iter().map(|&x| theta.apply(x as usize) as u8).collect();
        let s = self.with_phi(phi, theta.target().size - 1);
        s.no_collapsed_pair().then_some(s)
    }
}

impl SymbolChain {
    pub fn act(&self, sigma: &Permutation) -> SymbolChain {
        self.iter()
            .map(|(s, c)| {
                let (t, e) = s.act(sigma);
                (t, c * e)
            })
            .collect()
    }

    pub fn push_forward(&self, theta: &OrderedMap) -> SymbolChain {
        self.iter().filter_map(|(s, c)| s.push_forward(theta).map(|t| (t, c))).collect()
    }
}

/// A map of cosimplicial chain complexes out of `Δ^•_*`, of degree `degree`,
/// into the box product of `arity` copies of `Δ^•_*`. It is determined by the
/// image of the top simplex of each `Δ^s`; missing levels map to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotMap {
    pub arity: usize,
    pub degree: i64,
    pub images: BTreeMap<usize, SymbolChain>,
}

impl SlotMap {
    pub fn identity(max_level: usize) -> Self {
        let images = (0..=max_level).map(|s| (s, SymbolChain::single(Symbol::unit(s), 1))).collect();
        SlotMap { arity: 1, degree: 0, images }
    }

    pub fn scaled(&self, c: i64) -> Self {
        SlotMap {
            arity: self.arity,
            degree: self.degree,
            images: self.images.iter().map(|(&s, v)| (s, v.scaled(c))).collect(),
        }
    }

    pub fn image(&self, level: usize) -> Option<&SymbolChain> {
        self.images.get(&level)
    }
}

/// The map `Ξ_k(Δ, …, Δ) → Ξ_j(Δ, …, Δ)` obtained by applying one slot map in
/// each slot and flattening the nested result, `j` the sum of slot arities.
#[derive(Clone, Debug)]
pub struct BoxFunctorialMap {
    slots: Vec<SlotMap>,
}

pub fn box_functorial_map(slots: Vec<SlotMap>, k: usize) -> Result<BoxFunctorialMap> {
    if slots.len() != k {
        return Err(Error::IncompatibleInputs(format!("{} slot maps for arity {k}", slots.len())));
    }
    Ok(BoxFunctorialMap { slots })
}

impl BoxFunctorialMap {
    pub fn source_arity(&self) -> usize {
        self.slots.len()
    }

    pub fn target_arity(&self) -> usize {
        self.slots.iter().map(|s| s.arity).sum()
    }

    pub fn degree(&self) -> i64 {
        self.slots.iter().map(|s| s.degree).sum()
    }

    /// Image of one box-level symbol. Passing slot `i` across the fiber
    /// simplices of earlier slots costs `(-1)^{|g_i| (|U_a| - 1)}` per slot `a < i`.
    pub fn apply_symbol(&self, s: &Symbol) -> Result<SymbolChain> {
        if s.arity() != self.slots.len() {
            return Err(Error::IncompatibleInputs(format!("symbol of arity {} for {} slots", s.arity(), self.slots.len())));
        }
        let sizes = s.fiber_sizes();
        let mut images = Vec::with_capacity(sizes.len());
        for (slot, &size) in self.slots.iter().zip(&sizes) {
            match slot.image(size - 1) {
                Some(img) if !img.is_zero() => images.push(img),
                _ => return Ok(SymbolChain::new()),
            }
        }
        let mut exponent = 0i64;
        let mut before = 0i64;
        for (slot, &size) in self.slots.iter().zip(&sizes) {
            exponent += slot.degree * before;
            before += size as i64 - 1;
        }
        let sign = if exponent % 2 == 0 { 1 } else { -1 };
        let mut out = SymbolChain::new();
        let terms: Vec<Vec<(&Symbol, i64)>> = images.iter().map(|c| c.iter().collect()).collect();
        let mut idx = vec![0usize; terms.len()];
        'outer: loop {
            let inner: Vec<&Symbol> = idx.iter().zip(&terms).map(|(&i, t)| t[i].0).collect();
            let coef: i64 = idx.iter().zip(&terms).map(|(&i, t)| t[i].1).product();
            if let Some(flat) = substitute(s, &inner)? {
                out.add_term(flat, sign * coef);
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

    pub fn apply(&self, x: &SymbolChain) -> Result<SymbolChain> {
        let mut out = SymbolChain::new();
        for (s, c) in x.iter() {
            out.add_scaled(&self.apply_symbol(s)?, c);
        }
        Ok(out)
    }

    /// Matrix of the map between two ordered lists of box-level symbols.
    pub fn matrix(&self, source: &[Symbol], target: &[Symbol]) -> Result<crate::exact::IntMatrix> {
        let idx: std::collections::HashMap<&Symbol, usize> = target.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut trips = Vec::new();
        for (c, s) in source.iter().enumerate() {
            for (t, v) in self.apply_symbol(s)?.iter() {
                let row = *idx
                    .get(t)
                    .ok_or_else(|| Error::IncompatibleInputs(format!("image {t} is outside the target basis")))?;
                trips.push((row, c, v));
            }
        }
        Ok(crate::exact::IntMatrix::from_i64_triplets(target.len(), source.len(), trips))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxprod::{enumerate_box_symbols, internal_boundary_chain, ComplexityBound};

    fn sym(k: usize, f: &[u8], phi: &[u8], r: usize) -> Symbol {
        Symbol::new(k, f.to_vec(), phi.to_vec(), r).unwrap()
    }

    #[test]
    fn substitution_example() {
        // (1,2) with the unit in slot 1 and (1,2) in slot 2
        let h = sym(2, &[1, 2], &[0, 0], 0);
        let a = Symbol::unit(0);
        let b = sym(2, &[1, 2], &[0, 0], 0);
        assert_eq!(substitute(&h, &[&a, &b]).unwrap(), Some(sym(3, &[1, 2, 3], &[0, 0, 0], 0)));
        assert_eq!(substitute(&h, &[&b, &a]).unwrap(), Some(sym(3, &[1, 2, 3], &[0, 0, 0], 0)));
        let h = sym(2, &[1, 2, 2], &[0, 0, 1], 1);
        let b = sym(2, &[1, 2], &[0, 1], 1);
        assert_eq!(substitute(&h, &[&a, &b]).unwrap(), Some(sym(3, &[1, 2, 3], &[0, 0, 1], 1)));
    }

    #[test]
    fn units_are_neutral() {
        for k in 1..=3 {
            for q in k - 1..=4 {
                for r in 0..=2 {
                    for s in enumerate_box_symbols(k, q, r, ComplexityBound::Unbounded) {
                        let units: Vec<Symbol> = s.fiber_sizes().iter().map(|&n| Symbol::unit(n - 1)).collect();
                        let refs: Vec<&Symbol> = units.iter().collect();
                        assert_eq!(substitute(&s, &refs).unwrap(), Some(s.clone()));
                        let u = Symbol::unit(r);
                        assert_eq!(substitute(&u, &[&s]).unwrap(), Some(s.clone()));
                    }
                }
            }
        }
    }

    #[test]
    fn substitution_is_associative() {
        // outer of arity 2, middle symbols of arity ≤ 2, innermost anything that fits
        let outers: Vec<Symbol> = (1..=3).flat_map(|q| enumerate_box_symbols(2, q, 1, ComplexityBound::Unbounded)).collect();
        let pool: Vec<Symbol> = (1..=2)
            .flat_map(|k| (k - 1..=3).flat_map(move |q| (0..=3).flat_map(move |r| enumerate_box_symbols(k, q, r, ComplexityBound::Unbounded))))
            .collect();
        let mut checked = 0;
        for h in &outers {
            let sizes = h.fiber_sizes();
            let g1s: Vec<&Symbol> = pool.iter().filter(|g| g.level() + 1 == sizes[0] && g.q() <= 2).collect();
            let g2s: Vec<&Symbol> = pool.iter().filter(|g| g.level() + 1 == sizes[1] && g.q() <= 2).collect();
            for g1 in &g1s {
                for g2 in &g2s {
                    let inner_sizes: Vec<usize> = g1.fiber_sizes().into_iter().chain(g2.fiber_sizes()).collect();
                    let xs: Vec<Vec<&Symbol>> = inner_sizes
                        .iter()
                        .map(|&n| pool.iter().filter(|x| x.level() + 1 == n && x.q() <= 1).collect())
                        .collect();
                    let mut idx = vec![0usize; xs.len()];
                    if xs.iter().any(|v| v.is_empty()) {
                        continue;
                    }
                    'next: loop {
                        let chosen: Vec<&Symbol> = idx.iter().zip(&xs).map(|(&i, v)| v[i]).collect();
                        let hg = substitute_unreduced(h, &[g1, g2]).unwrap();
                        let left = Some(substitute(&hg, &chosen).unwrap());
                        let (c1, c2) = chosen.split_at(g1.arity());
                        let a = substitute(g1, c1).unwrap();
                        let b = substitute(g2, c2).unwrap();
                        let right = match (a, b) {
                            (Some(a), Some(b)) => Some(substitute(h, &[&a, &b]).unwrap()),
                            _ => None,
                        };
                        assert_eq!(left.flatten(), right.flatten(), "{h} {g1} {g2} {chosen:?}");
                        checked += 1;
                        for d in (0..idx.len()).rev() {
                            idx[d] += 1;
                            if idx[d] < xs[d].len() {
                                continue 'next;
                            }
                            idx[d] = 0;
                        }
                        break;
                    }
                }
            }
        }
        assert!(checked > 1000, "{checked}");
    }

    #[test]
    fn permutations_form_a_group() {
        for k in 1..=4 {
            let all = Permutation::all(k);
            assert_eq!(all.len(), (1..=k).product::<usize>());
            for a in &all {
                assert!(a.compose(&a.inverse()).is_identity());
                for b in &all {
                    for c in &all {
                        assert_eq!(a.compose(b).compose(c), a.compose(&b.compose(c)));
                    }
                }
            }
        }
    }

    #[test]
    fn action_is_a_right_action_with_signs() {
        for q in 2..=5 {
            for s in enumerate_box_symbols(3, q, 1, ComplexityBound::Unbounded) {
                for a in Permutation::all(3) {
                    for b in Permutation::all(3) {
                        let (sa, ea) = s.act(&a);
                        let (sab, eab) = sa.act(&b);
                        let (direct, e) = s.act(&a.compose(&b));
                        assert_eq!((sab, ea * eab), (direct, e));
                    }
                }
            }
        }
    }

    #[test]
    fn action_commutes_with_boundary() {
        for q in 2..=5 {
            for s in enumerate_box_symbols(3, q, 2, ComplexityBound::Unbounded) {
                for a in Permutation::all(3) {
                    let lhs = internal_boundary_chain(&SymbolChain::single(s.clone(), 1)).act(&a);
                    let (t, e) = s.act(&a);
                    let rhs = internal_boundary_chain(&SymbolChain::single(t, e));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn substitution_respects_relabeling() {
        // Γ(h·σ; g_σ(0), …) equals Γ(h; g) relabeled by the block permutation;
        // the block sign only sees the internal degrees of the g_i.
        let outers: Vec<Symbol> = (2..=4).flat_map(|q| enumerate_box_symbols(3, q, 1, ComplexityBound::Unbounded)).collect();
        let pool: Vec<Symbol> = (1..=2)
            .flat_map(|k| (k - 1..=2).flat_map(move |q| (0..=3).flat_map(move |r| enumerate_box_symbols(k, q, r, ComplexityBound::Unbounded))))
            .collect();
        let mut checked = 0;
        for h in &outers {
            let sizes = h.fiber_sizes();
            let choices: Vec<Vec<&Symbol>> =
                sizes.iter().map(|&n| pool.iter().filter(|g| g.level() + 1 == n).take(4).collect()).collect();
            for g0 in &choices[0] {
                for g1 in &choices[1] {
                    for g2 in &choices[2] {
                        let gs = [*g0, *g1, *g2];
                        let Some(flat) = substitute(h, &gs).unwrap() else { continue };
                        for sigma in Permutation::all(3) {
                            let (hs, e1) = h.act(&sigma);
                            let permuted: Vec<&Symbol> = (0..3).map(|i| gs[sigma.apply(i)]).collect();
                            let left = substitute(&hs, &permuted).unwrap().expect("relabeling keeps validity");
                            let arities: Vec<usize> = gs.iter().map(|g| g.arity()).collect();
                            let (right, e2) = flat.act(&sigma.block(&arities));
                            assert_eq!(left, right);
                            let inner: Vec<i64> = gs.iter().map(|g| g.internal_degree()).collect();
                            let outer: Vec<i64> = sizes.iter().map(|&n| n as i64 - 1).collect();
                            assert_eq!(e1, sigma.koszul_sign(&outer));
                            assert_eq!(e2, sigma.koszul_sign(&inner));
                            checked += 1;
                        }
                    }
                }
            }
        }
        assert!(checked > 500, "{checked}");
    }

    #[test]
    fn identity_slots_give_identity() {
        let id = box_functorial_map(vec![SlotMap::identity(6), SlotMap::identity(6)], 2).unwrap();
        for q in 1..=4 {
            for s in enumerate_box_symbols(2, q, 2, ComplexityBound::Unbounded) {
                assert_eq!(id.apply_symbol(&s).unwrap(), SymbolChain::single(s.clone(), 1));
            }
        }
        assert!(box_functorial_map(vec![SlotMap::identity(2)], 2).is_err());
    }

    #[test]
    fn scalar_slots_are_chain_maps_and_natural() {
        let g = box_functorial_map(vec![SlotMap::identity(6).scaled(2), SlotMap::identity(6).scaled(3)], 2).unwrap();
        for q in 1..=4 {
            let src = enumerate_box_symbols(2, q, 1, ComplexityBound::Unbounded);
            for s in &src {
                let x = SymbolChain::single(s.clone(), 1);
                let lhs = internal_boundary_chain(&g.apply(&x).unwrap());
                let rhs = g.apply(&internal_boundary_chain(&x)).unwrap();
                assert_eq!(lhs, rhs);
                assert_eq!(g.apply(&x).unwrap(), x.scaled(6));
                let d0 = crate::delta::coface(1, 0).unwrap();
                assert_eq!(g.apply(&x.push_forward(&d0)).unwrap(), g.apply(&x).unwrap().push_forward(&d0));
            }
            let tgt = enumerate_box_symbols(2, q, 1, ComplexityBound::Unbounded);
            let m = g.matrix(&src, &tgt).unwrap();
            assert!(m.is_diagonal());
        }
    }
}
