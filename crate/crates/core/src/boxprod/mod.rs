//! Box products of copies of `Δ^•_*`, their complexity filtration, and the
//! symbol basis of the conormalized result.
//!
//! A symbol `(f, φ)` records a function `f: [q] → {1..k}` and an
//! order-preserving `φ: [q] → [r]`. At a box level the fibers of `f` carry the
//! top simplices of `Δ^{f^{-1}(i)}`; after conormalization `φ` must also hit
//! every vertex `1..=r`.

mod chain;
mod level;
mod substitution;

pub use chain::SymbolChain;
pub use level::{
    box_cosimplicial, box_level, conormal_boundary, internal_boundary_chain, conormalized_box_basis, enumerate_box_symbols, pattern_block,
    symbol_complex, BoxVariant, PatternBlock, SymbolComplex,
};
pub use substitution::{box_functorial_map, substitute, substitute_unreduced, BoxFunctorialMap, NestedSymbol, Permutation, SlotMap};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Number of adjacent value changes in a sequence drawn from two values,
/// maximized over all pairs of values.
pub fn complexity(values: &[usize], k: usize) -> Result<usize> {
    if let Some(&v) = values.iter().find(|&&v| v == 0 || v > k) {
        return Err(Error::ValueOutOfRange { value: v, k });
    }
    Ok(complexity_unchecked(values.iter().copied(), k))
}

/// Change counts of every two-value subsequence `(a, b)` with `a < b`.
pub fn pair_complexities(values: &[usize], k: usize) -> Result<Vec<((usize, usize), usize)>> {
    complexity(values, k)?;
    let mut out = Vec::new();
    for a in 1..=k {
        for b in a + 1..=k {
            out.push(((a, b), pair_changes(values.iter().copied(), a, b)));
        }
    }
    Ok(out)
}

fn pair_changes(values: impl Iterator<Item = usize>, a: usize, b: usize) -> usize {
    let mut last = None;
    let mut changes = 0;
    for v in values.filter(|&v| v == a || v == b) {
        if last.is_some_and(|l| l != v) {
            changes += 1;
        }
        last = Some(v);
    }
    changes
}

pub(crate) fn complexity_unchecked<I>(values: I, k: usize) -> usize
where
    I: Iterator<Item = usize> + Clone,
{
    let mut best = 0;
    for a in 1..=k {
        for b in a + 1..=k {
            best = best.max(pair_changes(values.clone(), a, b));
        }
    }
    best
}

/// Upper bound on the complexity of `f`; `Unbounded` gives the full product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComplexityBound {
    Finite(usize),
    Unbounded,
}

impl ComplexityBound {
    pub fn finite(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("complexity bound must be at least 1".into()));
        }
        Ok(ComplexityBound::Finite(n))
    }

    pub fn allows(&self, c: usize) -> bool {
        match self {
            ComplexityBound::Finite(n) => c <= *n,
            ComplexityBound::Unbounded => true,
        }
    }

    pub fn at_least(&self, other: &ComplexityBound) -> bool {
        match (self, other) {
            (ComplexityBound::Unbounded, _) => true,
            (ComplexityBound::Finite(_), ComplexityBound::Unbounded) => false,
            (ComplexityBound::Finite(a), ComplexityBound::Finite(b)) => a >= b,
        }
    }
}

impl fmt::Display for ComplexityBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexityBound::Finite(n) => write!(f, "{n}"),
            ComplexityBound::Unbounded => write!(f, "∞"),
        }
    }
}

/// A pair `(f, φ)` with `f: [q] → {1..k}` and `φ: [q] → [r]` order-preserving.
///
/// Values of `f` are stored 1-based. Whether the symbol is a basis element of
/// a box level or of its conormalization depends on which conditions hold;
/// see [`Symbol::is_box_basis`] and [`Symbol::is_conormal_basis`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    k: u8,
    f: Vec<u8>,
    phi: Vec<u8>,
    r: u8,
}

impl Symbol {
    pub fn new(k: usize, f: Vec<u8>, phi: Vec<u8>, r: usize) -> Result<Self> {
        if f.is_empty() || f.len() != phi.len() {
            return Err(Error::Invalid("f and φ need the same nonempty source".into()));
        }
        if k == 0 || k > u8::MAX as usize || r > u8::MAX as usize {
            return Err(Error::Invalid(format!("arity {k} or level {r} out of range")));
        }
        if let Some(&v) = f.iter().find(|&&v| v == 0 || v as usize > k) {
            return Err(Error::ValueOutOfRange { value: v as usize, k });
        }
        if phi.windows(2).any(|w| w[0] > w[1]) || phi.iter().any(|&x| x as usize > r) {
            return Err(Error::Invalid("φ must be order-preserving into [r]".into()));
        }
        Ok(Symbol { k: k as u8, f, phi, r: r as u8 })
    }

    pub(crate) fn raw(k: usize, f: Vec<u8>, phi: Vec<u8>, r: usize) -> Self {
        debug_assert_eq!(f.len(), phi.len());
        Symbol { k: k as u8, f, phi, r: r as u8 }
    }

    /// The identity symbol of arity one at level `r`: `f` constant, `φ = id`.
    pub fn unit(r: usize) -> Self {
        Symbol::raw(1, vec![1; r + 1], (0..=r as u8).collect(), r)
    }

    pub fn arity(&self) -> usize {
        self.k as usize
    }

    pub fn q(&self) -> usize {
        self.f.len() - 1
    }

    pub fn level(&self) -> usize {
        self.r as usize
    }

    pub fn f(&self) -> &[u8] {
        &self.f
    }

    pub fn phi(&self) -> &[u8] {
        &self.phi
    }

    /// `q + 1 - k`, the degree of the tensor of top simplices.
    pub fn internal_degree(&self) -> i64 {
        self.f.len() as i64 - self.k as i64
    }

    /// Total degree `q + 1 - k - r`.
    pub fn degree(&self) -> i64 {
        self.internal_degree() - self.r as i64
    }

    pub fn fiber(&self, i: usize) -> Vec<usize> {
        (0..self.f.len()).filter(|&t| self.f[t] as usize == i).collect()
    }

    pub fn fiber_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k as usize];
        for &v in &self.f {
            sizes[v as usize - 1] += 1;
        }
        sizes
    }

    pub fn complexity(&self) -> usize {
        complexity_unchecked(self.f.iter().map(|&v| v as usize), self.k as usize)
    }

    pub fn is_onto(&self) -> bool {
        let mut hit = [false; 256];
        for &v in &self.f {
            hit[v as usize] = true;
        }
        hit[1..=self.k as usize].iter().all(|&h| h)
    }

    /// No adjacent pair with equal `φ` and equal `f`.
    pub fn no_collapsed_pair(&self) -> bool {
        (0..self.f.len() - 1).all(|t| self.phi[t] != self.phi[t + 1] || self.f[t] != self.f[t + 1])
    }

    /// `φ` hits every vertex `1..=r`.
    pub fn covers_positive(&self) -> bool {
        // φ is monotone, so it covers 1..=r exactly when it climbs in unit steps
        self.r == 0
            || (self.phi[0] <= 1
                && self.phi[self.phi.len() - 1] == self.r
                && self.phi.windows(2).all(|w| w[1] - w[0] <= 1))
    }

    pub fn is_surjective(&self) -> bool {
        self.covers_positive() && self.phi[0] == 0
    }

    /// Basis element of an (unconormalized) box level.
    pub fn is_box_basis(&self) -> bool {
        self.is_onto() && self.no_collapsed_pair()
    }

    /// Basis element of the conormalized box product.
    pub fn is_conormal_basis(&self) -> bool {
        self.is_box_basis() && self.covers_positive()
    }

    /// Bitmask with bit `t` set when `f(t) = f(t+1)`.
    pub fn equal_mask(&self) -> u64 {
        mask_of(&self.f)
    }

    /// The same `f` with another `φ` at level `r`.
    pub fn with_phi(&self, phi: Vec<u8>, r: usize) -> Symbol {
        Symbol::raw(self.k as usize, self.f.clone(), phi, r)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "k": self.k, "f": self.f, "phi": self.phi })
    }

    /// Reads `{"k", "f", "phi"}`; the level is `max φ` unless `"r"` is given.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            k: usize,
            f: Vec<u8>,
            phi: Vec<u8>,
            r: Option<usize>,
        }
        let raw: Raw = serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(e.to_string()))?;
        let r = raw.r.unwrap_or_else(|| raw.phi.iter().copied().max().unwrap_or(0) as usize);
        Symbol::new(raw.k, raw.f, raw.phi, r)
    }
}

pub(crate) fn mask_of(f: &[u8]) -> u64 {
    let mut m = 0u64;
    for t in 0..f.len().saturating_sub(1) {
        if f[t] == f[t + 1] {
            m |= 1 << t;
        }
    }
    m
}

impl fmt::Display for Symbol {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u8]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(fm, "k{}:{}|{}|r{}", self.k, join(&self.f), join(&self.phi), self.r)
    }
}

/// Onto functions `[q] → {1..k}` of complexity within `n`, lexicographic.
pub fn onto_functions(k: usize, q: usize, n: ComplexityBound) -> Vec<Vec<u8>> {
    let len = q + 1;
    if k == 0 || len < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![1u8; len];
    loop {
        let mut seen = vec![false; k];
        for &v in &cur {
            seen[v as usize - 1] = true;
        }
        if seen.iter().all(|&s| s) && n.allows(complexity_unchecked(cur.iter().map(|&v| v as usize), k)) {
            out.push(cur.clone());
        }
        let mut t = len;
        loop {
            if t == 0 {
                return out;
            }
            t -= 1;
            if (cur[t] as usize) < k {
                cur[t] += 1;
                for x in cur.iter_mut().skip(t + 1) {
                    *x = 1;
                }
                break;
            }
        }
    }
}

/// Order-preserving `φ: [q] → [r]` never constant across a position whose bit
/// is set in `mask`; optionally required to hit `1..=r`. Lexicographic.
pub fn admissible_phis(q: usize, r: usize, mask: u64, cover_positive: bool) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(q + 1);
    fn rec(t: usize, q: usize, r: usize, mask: u64, cover: bool, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if t == q + 1 {
            if !cover || *cur.last().unwrap() as usize == r {
                out.push(cur.clone());
            }
            return;
        }
        let lo = match cur.last() {
            None => 0,
            Some(&prev) if mask >> (t - 1) & 1 == 1 => prev as usize + 1,
            Some(&prev) => prev as usize,
        };
        // with `cover`, a step may not skip a positive value
        let hi = match cur.last() {
            Some(&prev) if cover => (prev as usize + 1).min(r),
            None if cover => 1.min(r),
            _ => r,
        };
        // remaining positions must still be able to reach r
        for v in lo..=hi {
            if cover && r - v > q - t {
                continue;
            }
            cur.push(v as u8);
            rec(t + 1, q, r, mask, cover, cur, out);
            cur.pop();
        }
    }
    rec(0, q, r, mask, cover_positive, &mut cur, &mut out);
    out
}

/// Basis symbols of the conormalized box product with source `[q]` and level `r`,
/// ordered lexicographically by `(f, φ)`.
pub fn enumerate_symbols(k: usize, q: usize, r: usize, n: ComplexityBound) -> Vec<Symbol> {
    let mut out = Vec::new();
    for f in onto_functions(k, q, n) {
        let mask = mask_of(&f);
        for phi in admissible_phis(q, r, mask, true) {
            out.push(Symbol::raw(k, f.clone(), phi, r));
        }
    }
    out
}

/// All conormal basis symbols of total degree `p` with level at most `max_level`.
pub fn symbols_of_degree(k: usize, p: i64, max_level: usize, n: ComplexityBound) -> Vec<Symbol> {
    let mut out = Vec::new();
    for r in 0..=max_level {
        let q = p + k as i64 - 1 + r as i64;
        if q < k as i64 - 1 {
            continue;
        }
        out.extend(enumerate_symbols(k, q as usize, r, n));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> Vec<usize> {
        s.chars().map(|c| c.to_digit(10).unwrap() as usize).collect()
    }

    #[test]
    fn worked_complexities() {
        assert_eq!(complexity(&seq("11222122112"), 2).unwrap(), 5);
        assert_eq!(complexity(&seq("12313212"), 3).unwrap(), 5);
        let pairs = pair_complexities(&seq("12313212"), 3).unwrap();
        assert_eq!(pairs, vec![((1, 2), 5), ((1, 3), 4), ((2, 3), 2)]);
        assert_eq!(complexity(&seq("1111"), 2).unwrap(), 0);
        assert_eq!(complexity(&seq("1122"), 2).unwrap(), 1);
        assert_eq!(complexity(&[], 2).unwrap(), 0);
        assert_eq!(complexity(&[1], 1).unwrap(), 0);
        assert_eq!(complexity(&[1, 3], 2), Err(Error::ValueOutOfRange { value: 3, k: 2 }));
    }

    #[test]
    fn small_enumerations() {
        let s = enumerate_symbols(2, 1, 0, ComplexityBound::Unbounded);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].f(), &[1, 2]);
        assert_eq!(s[1].f(), &[2, 1]);
        assert!(enumerate_symbols(1, 1, 0, ComplexityBound::Unbounded).is_empty());
        assert!(enumerate_symbols(2, 2, 0, ComplexityBound::Finite(1)).is_empty());
        let two = enumerate_symbols(2, 2, 0, ComplexityBound::Finite(2));
        assert_eq!(two.iter().map(|s| s.f().to_vec()).collect::<Vec<_>>(), vec![vec![1, 2, 1], vec![2, 1, 2]]);
    }

    #[test]
    fn enumeration_matches_filtering() {
        for k in 1..=3 {
            for q in 0..=4 {
                for r in 0..=4 {
                    let fast = enumerate_symbols(k, q, r, ComplexityBound::Unbounded);
                    let mut slow = Vec::new();
                    for f in onto_functions(k, q, ComplexityBound::Unbounded) {
                        for phi in crate::delta::OrderedMap::all(q + 1, r + 1) {
                            let s = Symbol::raw(k, f.clone(), phi.values().iter().map(|&x| x as u8).collect(), r);
                            if s.is_conormal_basis() {
                                slow.push(s);
                            }
                        }
                    }
                    slow.sort_by(|a, b| (a.f(), a.phi()).cmp(&(b.f(), b.phi())));
                    assert_eq!(fast, slow, "k={k} q={q} r={r}");
                }
            }
        }
    }

    #[test]
    fn filtration_is_monotone_and_exhausts() {
        for q in 0..=5 {
            for r in 0..=3 {
                let full = enumerate_symbols(3, q, r, ComplexityBound::Unbounded);
                let mut prev: Vec<Symbol> = Vec::new();
                for n in 1..=q.max(1) {
                    let cur = enumerate_symbols(3, q, r, ComplexityBound::Finite(n));
                    assert!(prev.iter().all(|s| cur.contains(s)));
                    prev = cur;
                }
                assert_eq!(enumerate_symbols(3, q, r, ComplexityBound::Finite(q.max(1))), full);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let s = Symbol::new(2, vec![1, 2, 1], vec![0, 1, 1], 1).unwrap();
        assert_eq!(Symbol::from_json(&s.to_json()).unwrap(), s);
        assert_eq!(s.degree(), 0);
        assert!(s.is_conormal_basis());
    }
}
