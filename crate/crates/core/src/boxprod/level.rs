use super::{admissible_phis, mask_of, onto_functions, ComplexityBound, Symbol, SymbolChain};
use crate::conormal::{
    compare_conormalizations, conormalize_cokernel, ComparisonCertificate, CosimplicialAbGroup, CosimplicialChainComplex,
};
use crate::delta::OrderedMap;
use crate::error::{Error, Result};
use crate::exact::{GradedIntComplex, IntMatrix, Truncation};
use std::collections::{BTreeMap, HashMap};

/// Cap on the number of basis elements any single box construction may hold.
const MAX_BASIS: usize = 400_000;

/// Whether fibers of `f` may be empty. An empty fiber carries chains on the
/// empty simplex, which vanish, so both variants give the same groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BoxVariant {
    #[default]
    Augmented,
    Unaugmented,
}

/// Box-level basis symbols: `f` onto, `φ` arbitrary order-preserving with no
/// collapsed pair. Lexicographic in `(f, φ)`.
pub fn enumerate_box_symbols(k: usize, q: usize, r: usize, n: ComplexityBound) -> Vec<Symbol> {
    let mut out = Vec::new();
    for f in onto_functions(k, q, n) {
        let mask = mask_of(&f);
        for phi in admissible_phis(q, r, mask, false) {
            out.push(Symbol::raw(k, f.clone(), phi, r));
        }
    }
    out
}

fn box_symbols_variant(k: usize, q: usize, r: usize, n: ComplexityBound, variant: BoxVariant) -> Vec<Symbol> {
    match variant {
        BoxVariant::Unaugmented => enumerate_box_symbols(k, q, r, n),
        BoxVariant::Augmented => {
            // every function, dropping those with an empty fiber as zero summands
            let mut out = Vec::new();
            let mut cur = vec![1u8; q + 1];
            loop {
                let s = Symbol::raw(k, cur.clone(), vec![0; q + 1], r);
                if s.is_onto() && n.allows(s.complexity()) {
                    for phi in admissible_phis(q, r, mask_of(&cur), false) {
                        out.push(s.with_phi(phi, r));
                    }
                }
                let Some(t) = (0..=q).rev().find(|&t| (cur[t] as usize) < k) else { break };
                cur[t] += 1;
                for x in cur.iter_mut().skip(t + 1) {
                    *x = 1;
                }
            }
            out
        }
    }
}

/// Internal boundary of the tensor of top simplices: drop one element from a
/// fiber of size at least two, with the Koszul sign of the fibers before it.
/// Terms that become collapsed are dropped.
pub(crate) fn internal_boundary(s: &Symbol, out: &mut SymbolChain, coef: i64) {
    let sizes = s.fiber_sizes();
    let mut seen = vec![0usize; sizes.len()];
    let mut before = vec![0usize; sizes.len()];
    for i in 1..sizes.len() {
        before[i] = before[i - 1] + sizes[i - 1] - 1;
    }
    for t in 0..=s.q() {
        let i = s.f()[t] as usize - 1;
        let j = seen[i];
        seen[i] += 1;
        if sizes[i] < 2 {
            continue;
        }
        let mut f = s.f().to_vec();
        let mut phi = s.phi().to_vec();
        f.remove(t);
        phi.remove(t);
        let face = Symbol::raw(s.arity(), f, phi, s.level());
        if face.no_collapsed_pair() {
            let sign = if (before[i] + j) % 2 == 0 { 1 } else { -1 };
            out.add_term(face, sign * coef);
        }
    }
}

/// Internal boundary extended linearly to chains of box-level symbols.
pub fn internal_boundary_chain(x: &SymbolChain) -> SymbolChain {
    let mut out = SymbolChain::new();
    for (s, c) in x.iter() {
        internal_boundary(s, &mut out, c);
    }
    out
}

/// Total differential of a conormal basis symbol: internal boundary plus
/// `-(-1)^p` times the coface `d^0` when it survives the quotient. Levels above
/// `max_level` are discarded.
pub fn conormal_boundary(s: &Symbol, n: ComplexityBound, max_level: Option<usize>) -> SymbolChain {
    let mut out = SymbolChain::new();
    internal_boundary(s, &mut out, 1);
    out.retain(|t| t.covers_positive() && n.allows(t.complexity()));
    if s.is_surjective() && max_level.is_none_or(|m| s.level() < m) {
        let phi = s.phi().iter().map(|&x| x + 1).collect();
        let eps = if s.degree() % 2 == 0 { -1 } else { 1 };
        out.add_term(s.with_phi(phi, s.level() + 1), eps);
    }
    out
}

/// One level `S = [r]` of the box product of `k` copies of `Δ^•_*`, as a chain
/// complex in internal degrees `0..=max_internal`.
pub fn box_level(
    k: usize,
    n: ComplexityBound,
    r: usize,
    max_internal: usize,
    variant: BoxVariant,
) -> Result<GradedIntComplex> {
    let mut bases: Vec<Vec<Symbol>> = Vec::new();
    let mut total = 0;
    for m in 0..=max_internal {
        let b = box_symbols_variant(k, m + k - 1, r, n, variant);
        total += b.len();
        if total > MAX_BASIS {
            return Err(Error::BoundsExceeded(format!("box level {r} of arity {k} exceeds {MAX_BASIS} generators")));
        }
        bases.push(b);
    }
    let mut basis = BTreeMap::new();
    let mut diff = BTreeMap::new();
    for (m, b) in bases.iter().enumerate() {
        basis.insert(m as i64, b.iter().map(|s| s.to_string()).collect());
        if m == 0 {
            continue;
        }
        let idx: HashMap<&Symbol, usize> = bases[m - 1].iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut trips = Vec::new();
        for (c, s) in b.iter().enumerate() {
            let mut img = SymbolChain::new();
            internal_boundary(s, &mut img, 1);
            for (t, v) in img.iter() {
                trips.push((idx[t], c, v));
            }
        }
        diff.insert(m as i64, IntMatrix::from_i64_triplets(bases[m - 1].len(), b.len(), trips));
    }
    GradedIntComplex::new(basis, diff, Truncation::Window { lo: 0, hi: max_internal as i64 })
}

/// Cosimplicial action on box symbols: post-compose `φ`, vanishing on collapse.
fn act_on_phi(theta: &OrderedMap, s: &Symbol) -> Vec<(Symbol, i64)> {
    let phi: Vec<u8> = s.phi().iter().map(|&x| theta.apply(x as usize) as u8).collect();
    let t = s.with_phi(phi, theta.target().size - 1);
    if t.no_collapsed_pair() {
        vec![(t, 1)]
    } else {
        Vec::new()
    }
}

/// The cosimplicial chain complex `S ↦ box level at S`, levels `0..=top`,
/// internal degrees `0..=max_internal`.
pub fn box_cosimplicial(
    k: usize,
    n: ComplexityBound,
    top: usize,
    max_internal: usize,
) -> Result<CosimplicialChainComplex> {
    let mut keys = Vec::new();
    let mut total = 0;
    for m in 0..=max_internal {
        let mut per_level = Vec::new();
        for r in 0..=top {
            let b = enumerate_box_symbols(k, m + k - 1, r, n);
            total += b.len();
            per_level.push(b);
        }
        keys.push(per_level);
    }
    if total > MAX_BASIS {
        return Err(Error::BoundsExceeded(format!("{total} box generators requested")));
    }
    let boundary = |s: &Symbol| {
        let mut out = SymbolChain::new();
        internal_boundary(s, &mut out, 1);
        out.iter().map(|(t, c)| (t.clone(), c)).collect()
    };
    CosimplicialChainComplex::from_action(0, keys, |s| s.to_string(), act_on_phi, boundary, true)
}

/// For a fixed source `[q]` and a fixed pattern of equal neighbours in `f`,
/// the cosimplicial group spanned by the admissible `φ`. Every `f` with this
/// pattern contributes an isomorphic copy.
#[derive(Clone, Debug)]
pub struct PatternBlock {
    pub q: usize,
    pub mask: u64,
    pub phis: Vec<Vec<Vec<u8>>>,
    pub group: CosimplicialAbGroup,
}

fn phi_label(phi: &[u8]) -> String {
    phi.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_phi(label: &str) -> Option<Vec<u8>> {
    label.split(',').map(|x| x.parse().ok()).collect()
}

pub fn pattern_block(q: usize, mask: u64, top: usize) -> Result<PatternBlock> {
    let phis: Vec<Vec<Vec<u8>>> = (0..=top).map(|r| admissible_phis(q, r, mask, false)).collect();
    let act = |theta: &OrderedMap, phi: &Vec<u8>| {
        let img: Vec<u8> = phi.iter().map(|&x| theta.apply(x as usize) as u8).collect();
        if mask_of_collapses(&img, mask) {
            Vec::new()
        } else {
            vec![(img, 1)]
        }
    };
    let group = CosimplicialAbGroup::from_action(phis.clone(), |p| phi_label(p), act)?;
    Ok(PatternBlock { q, mask, phis, group })
}

fn mask_of_collapses(phi: &[u8], mask: u64) -> bool {
    (0..phi.len().saturating_sub(1)).any(|t| mask >> t & 1 == 1 && phi[t] == phi[t + 1])
}

impl PatternBlock {
    /// Conormalizes in both forms, certifies they agree, and reads off the
    /// `φ` of each cokernel generator per level.
    pub fn conormal_phis(&self) -> Result<(Vec<Vec<Vec<u8>>>, ComparisonCertificate)> {
        let cert = compare_conormalizations(&self.group)?;
        let coker = conormalize_cokernel(&self.group)?;
        let mut out = Vec::new();
        for r in 0..=self.group.top() {
            let labels = coker.labels(-(r as i64));
            let phis: Option<Vec<Vec<u8>>> = labels.iter().map(|l| parse_phi(l)).collect();
            out.push(phis.ok_or_else(|| {
                Error::NormalizationFailure(format!("pattern {:#b} level {r} has no basis of box generators", self.mask))
            })?);
        }
        Ok((out, cert))
    }
}

/// Conormalized basis of the box product of arity `k` with source `[q]`,
/// computed pattern by pattern from the cosimplicial structure, for levels
/// `0..=top`. Each pattern's kernel and cokernel forms are certified equal.
pub fn conormalized_box_basis(k: usize, q: usize, top: usize, n: ComplexityBound) -> Result<Vec<Vec<Symbol>>> {
    let fs = onto_functions(k, q, n);
    let mut by_mask: BTreeMap<u64, Vec<Vec<u8>>> = BTreeMap::new();
    for f in fs {
        by_mask.entry(mask_of(&f)).or_default().push(f);
    }
    let mut out = vec![Vec::new(); top + 1];
    for (mask, fs) in by_mask {
        let block = pattern_block(q, mask, top)?;
        let (phis, _) = block.conormal_phis()?;
        for f in &fs {
            for (r, level) in phis.iter().enumerate() {
                for phi in level {
                    out[r].push(Symbol::raw(k, f.clone(), phi.clone(), r));
                }
            }
        }
    }
    for level in &mut out {
        level.sort_by(|a, b| (a.f(), a.phi()).cmp(&(b.f(), b.phi())));
    }
    Ok(out)
}

/// The conormalized box product on its symbol basis, over a degree window,
/// with cosimplicial levels above `max_level` discarded.
#[derive(Clone, Debug)]
pub struct SymbolComplex {
    pub k: usize,
    pub n: ComplexityBound,
    pub lo: i64,
    pub hi: i64,
    pub max_level: usize,
    basis: BTreeMap<i64, Vec<Symbol>>,
}

/// Basis in degrees `lo-1..=hi+1` so homology is determined on `lo..=hi`.
pub fn symbol_complex(k: usize, n: ComplexityBound, lo: i64, hi: i64, max_level: usize) -> Result<SymbolComplex> {
    if k == 0 || lo > hi {
        return Err(Error::Invalid(format!("arity {k}, degrees {lo}..{hi}")));
    }
    let mut basis = BTreeMap::new();
    let mut total = 0;
    for p in lo - 1..=hi + 1 {
        let b = super::symbols_of_degree(k, p, max_level, n);
        total += b.len();
        if total > MAX_BASIS {
            return Err(Error::BoundsExceeded(format!("more than {MAX_BASIS} symbols in degrees {lo}..{hi}")));
        }
        basis.insert(p, b);
    }
    Ok(SymbolComplex { k, n, lo, hi, max_level, basis })
}

impl SymbolComplex {
    pub fn basis(&self, p: i64) -> &[Symbol] {
        self.basis.get(&p).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Largest source size `q` among the basis symbols.
    pub fn max_q(&self) -> usize {
        self.basis.values().flatten().map(|s| s.q()).max().unwrap_or(0)
    }

    pub fn differential(&self, s: &Symbol) -> SymbolChain {
        conormal_boundary(s, self.n, Some(self.max_level))
    }

    pub fn graded(&self) -> Result<GradedIntComplex> {
        let mut labels = BTreeMap::new();
        let mut diff = BTreeMap::new();
        for (&p, b) in &self.basis {
            labels.insert(p, b.iter().map(|s| s.to_string()).collect());
            let Some(target) = self.basis.get(&(p - 1)) else { continue };
            let idx: HashMap<&Symbol, usize> = target.iter().enumerate().map(|(i, s)| (s, i)).collect();
            let mut trips = Vec::new();
            for (c, s) in b.iter().enumerate() {
                for (t, v) in self.differential(s).iter() {
                    let row = *idx.get(t).ok_or_else(|| {
                        Error::NormalizationFailure(format!("boundary term {t} of {s} is not a basis symbol"))
                    })?;
                    trips.push((row, c, v));
                }
            }
            diff.insert(p, IntMatrix::from_i64_triplets(target.len(), b.len(), trips));
        }
        Ok(GradedIntComplex::new(labels, diff, Truncation::Window { lo: self.lo - 1, hi: self.hi + 1 })?
            .with_regrading("degree q+1-k-r; cochain degree is the negative"))
    }
}
