use super::{boundary, projector, unit, SymbolOperad, TruncatedChainOperad};
use crate::boxprod::{conormal_boundary, ComplexityBound, Permutation, Symbol, SymbolChain};
use crate::check::{CheckReport, CheckResult};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

/// How many instances of each family of tuples to check. Families larger than
/// `exhaustive_cap` are replaced by a uniform sample of that size drawn with `seed`.
#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub struct SamplePolicy {
    pub exhaustive_cap: u64,
    pub seed: u64,
}

impl Default for SamplePolicy {
    fn default() -> Self {
        SamplePolicy { exhaustive_cap: 250_000, seed: 0x5eed }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OperadAxiomReport {
    pub bound: String,
    pub kmax: usize,
    pub qmax: usize,
    pub policy: SamplePolicy,
    /// Per tuple family: total size and whether every member was checked.
    pub families: BTreeMap<String, (u64, bool)>,
    pub report: CheckReport,
}

impl OperadAxiomReport {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }

    pub fn exhaustive(&self) -> bool {
        self.families.values().all(|(_, e)| *e)
    }
}

const CHUNK: usize = 4096;

/// Enumerates a family twice: once to count it, then to check every member
/// (or a seeded sample of `cap` members) in parallel chunks.
fn run_family<T: Send + Sync>(
    policy: SamplePolicy,
    salt: u64,
    enumerate: &dyn Fn(&mut dyn FnMut(T)),
    check: &(dyn Fn(&T, &mut Tally) + Sync),
) -> (Tally, u64, bool) {
    let mut total = 0u64;
    enumerate(&mut |_| total += 1);
    let exhaustive = total <= policy.exhaustive_cap;
    let keep: Option<Vec<usize>> = (!exhaustive).then(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(policy.seed ^ salt);
        let mut v = rand::seq::index::sample(&mut rng, total as usize, policy.exhaustive_cap as usize).into_vec();
        v.sort_unstable();
        v
    });
    let mut tally = Tally::default();
    let mut chunk = Vec::with_capacity(CHUNK);
    let flush = |chunk: &mut Vec<T>, tally: &mut Tally| {
        let part = chunk
            .par_iter()
            .fold(Tally::default, |mut acc, item| {
                check(item, &mut acc);
                acc
            })
            .reduce(Tally::default, Tally::merge);
        *tally = std::mem::take(tally).merge(part);
        chunk.clear();
    };
    let mut index = 0usize;
    let mut next = 0usize;
    enumerate(&mut |item| {
        let wanted = match &keep {
            None => true,
            Some(k) => {
                let hit = next < k.len() && k[next] == index;
                if hit {
                    next += 1;
                }
                hit
            }
        };
        index += 1;
        if wanted {
            chunk.push(item);
            if chunk.len() == CHUNK {
                flush(&mut chunk, &mut tally);
            }
        }
    });
    flush(&mut chunk, &mut tally);
    (tally, total, exhaustive)
}

type Composition<'a> = (&'a Symbol, Vec<&'a Symbol>);
type Association<'a> = (&'a Symbol, Vec<&'a Symbol>, Vec<Vec<&'a Symbol>>);

struct Window<'a> {
    kmax: usize,
    qmax: usize,
    all: Vec<&'a Symbol>,
    /// Symbols by level, sorted by source size.
    by_level: HashMap<usize, Vec<&'a Symbol>>,
}

impl<'a> Window<'a> {
    fn new(t: &'a TruncatedChainOperad) -> Self {
        let all: Vec<&Symbol> = (1..=t.kmax).flat_map(|k| t.basis(k)).collect();
        let mut by_level: HashMap<usize, Vec<&Symbol>> = HashMap::new();
        for s in &all {
            by_level.entry(s.level()).or_default().push(s);
        }
        for v in by_level.values_mut() {
            v.sort_by_key(|s| s.q());
        }
        Window { kmax: t.kmax, qmax: t.qmax, all, by_level }
    }

    /// Every choice of one symbol per fiber size with total arity at most
    /// `arity` and total source size at most `size`.
    fn fill(&self, sizes: &[usize], arity: usize, size: usize, visit: &mut dyn FnMut(&[&'a Symbol])) {
        fn rec<'a>(
            w: &Window<'a>,
            sizes: &[usize],
            arity: usize,
            size: usize,
            chosen: &mut Vec<&'a Symbol>,
            visit: &mut dyn FnMut(&[&'a Symbol]),
        ) {
            let i = chosen.len();
            if i == sizes.len() {
                visit(chosen);
                return;
            }
            let rest = sizes.len() - i - 1;
            let Some(cands) = w.by_level.get(&(sizes[i] - 1)) else { return };
            for g in cands {
                if g.q() + 1 + rest > size {
                    break;
                }
                if g.arity() + rest > arity {
                    continue;
                }
                chosen.push(g);
                rec(w, sizes, arity - g.arity(), size - g.q() - 1, chosen, visit);
                chosen.pop();
            }
        }
        rec(self, sizes, arity, size, &mut Vec::new(), visit);
    }

    fn compositions(&self, visit: &mut dyn FnMut(&'a Symbol, &[&'a Symbol])) {
        for h in &self.all {
            self.fill(&h.fiber_sizes(), self.kmax, self.qmax + 1, &mut |gs| visit(h, gs));
        }
    }

    fn associations(&self, visit: &mut dyn FnMut(&'a Symbol, &[&'a Symbol], &[&'a Symbol])) {
        self.compositions(&mut |h, gs| {
            let sizes: Vec<usize> = gs.iter().flat_map(|g| g.fiber_sizes()).collect();
            self.fill(&sizes, self.kmax, self.qmax + 1, &mut |xs| visit(h, gs, xs));
        });
    }
}

#[derive(Default)]
struct Tally {
    checks: BTreeMap<&'static str, CheckResult>,
    /// Basis compositions keyed by the addresses of window symbols.
    memo: HashMap<Vec<usize>, SymbolChain>,
}

const MEMO_LIMIT: usize = 1 << 16;

impl Tally {
    fn record(&mut self, name: &'static str, ok: bool, witness: impl FnOnce() -> String) {
        self.checks.entry(name).or_insert_with(|| CheckResult::new(name)).record(ok, witness);
    }

    fn compose(&mut self, op: &SymbolOperad, h: &Symbol, gs: &[&Symbol]) -> SymbolChain {
        let key: Vec<usize> =
            std::iter::once(h as *const Symbol as usize).chain(gs.iter().map(|g| *g as *const Symbol as usize)).collect();
        if let Some(c) = self.memo.get(&key) {
            return c.clone();
        }
        let c = op.compose(h, gs).unwrap_or_default();
        if self.memo.len() >= MEMO_LIMIT {
            self.memo.clear();
        }
        self.memo.insert(key, c.clone());
        c
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (k, v) in other.checks {
            match self.checks.get_mut(k) {
                Some(c) => c.merge(v),
                None => {
                    self.checks.insert(k, v);
                }
            }
        }
        self
    }
}

fn show(h: &Symbol, gs: &[&Symbol]) -> String {
    let inner: Vec<String> = gs.iter().map(|g| g.to_string()).collect();
    format!("γ([{h}]; [{}])", inner.join("], ["))
}

fn check_symbol(op: &SymbolOperad, s: &Symbol, qmax: usize, t: &mut Tally) {
    let n = op.bound();
    let x = SymbolChain::single(s.clone(), 1);
    let dx = boundary(&x, n);
    t.record("d_squared", boundary(&dx, n).is_zero(), || format!("∂∂[{s}] ≠ 0"));
    if let ComplexityBound::Finite(m) = n {
        let wider = conormal_boundary(s, ComplexityBound::Finite(m + 1), None);
        t.record("filtration_inclusion", wider == dx, || format!("∂[{s}] depends on the filtration"));
    }
    let u = unit(qmax + 1);
    t.record("unit_left", op.compose_chains(&u, &[x.clone()]).ok().as_ref() == Some(&x), || format!("γ(1; [{s}])"));
    let units = vec![u.clone(); s.arity()];
    t.record("unit_right", op.compose_chains(&x, &units).ok().as_ref() == Some(&x), || format!("γ([{s}]; 1, …, 1)"));
    let p = projector(s);
    let normalized = (0..s.level()).all(|a| super::codegeneracy_chain(a, &p).is_zero());
    t.record("projector_normalized", normalized, || format!("π[{s}] not killed by codegeneracies"));
    t.record("projector_matches_lift", op.lift(s).ok().as_ref() == Some(&p), || format!("π[{s}] ≠ linear lift"));
    let perms = Permutation::all(s.arity());
    for a in &perms {
        let xa = x.act(a);
        t.record("sigma_chain_map", boundary(&xa, n) == dx.act(a), || format!("∂([{s}]·{a})"));
        for b in &perms {
            t.record("sigma_right_action", xa.act(b) == x.act(&a.compose(b)), || format!("([{s}]·{a})·{b}"));
        }
    }
}

fn check_composition(op: &SymbolOperad, h: &Symbol, gs: &[&Symbol], t: &mut Tally) {
    let n = op.bound();
    let a = match op.compose(h, gs) {
        Ok(a) => a,
        Err(e) => {
            t.record("composition_defined", false, || format!("{}: {e}", show(h, gs)));
            return;
        }
    };
    t.record("composition_defined", true, String::new);
    let b = op.compose_via_box(h, gs);
    t.record("routes_agree", b.as_ref().ok() == Some(&a), || format!("{}: {a} vs {b:?}", show(h, gs)));
    let deg = h.degree() + gs.iter().map(|g| g.degree()).sum::<i64>();
    t.record("degree_additive", a.iter().all(|(s, _)| s.degree() == deg), || show(h, gs));

    // ∂γ(h; g) = γ(∂h; g) + Σ (-1)^{|h| + Σ_{a<i} |g_a|} γ(h; …, ∂g_i, …)
    let gch: Vec<SymbolChain> = gs.iter().map(|g| SymbolChain::single((*g).clone(), 1)).collect();
    let hch = SymbolChain::single(h.clone(), 1);
    let lhs = boundary(&a, n);
    let mut rhs = op.compose_chains(&boundary(&hch, n), &gch).unwrap_or_default();
    let mut before = h.degree();
    for i in 0..gs.len() {
        let mut args = gch.clone();
        args[i] = boundary(&gch[i], n);
        let sign = if before % 2 == 0 { 1 } else { -1 };
        rhs.add_scaled(&op.compose_chains(&hch, &args).unwrap_or_default(), sign);
        before += gs[i].degree();
    }
    t.record("chain_map", lhs == rhs, || format!("{}: ∂γ = {lhs}, expected {rhs}", show(h, gs)));

    // γ(h·σ; g) = ± γ(h; g_{σ⁻¹(0)}, …)·β with β moving whole blocks
    let k = h.arity();
    let degrees: Vec<i64> = gs.iter().map(|g| g.degree()).collect();
    for sigma in Permutation::all(k).into_iter().filter(|s| !s.is_identity()) {
        let (hs, e) = h.act(&sigma);
        let lhs = op.compose(&hs, gs).map(|c| c.scaled(e));
        let inv = sigma.inverse();
        let permuted: Vec<&Symbol> = (0..k).map(|i| gs[inv.apply(i)]).collect();
        let arities: Vec<usize> = permuted.iter().map(|g| g.arity()).collect();
        let beta = sigma.block(&arities);
        let rhs = op.compose(h, &permuted).map(|c| c.act(&beta).scaled(inv.koszul_sign(&degrees)));
        t.record("equivariance_outer", lhs.ok() == rhs.ok(), || format!("{} with σ = {sigma}", show(h, gs)));
    }

    // γ(h; g_1·τ_1, …) = γ(h; g)·(τ_1 ⊕ … ⊕ τ_k)
    let choices: Vec<Vec<Permutation>> = gs.iter().map(|g| Permutation::all(g.arity())).collect();
    let mut idx = vec![0usize; k];
    loop {
        if idx.iter().any(|&i| i > 0) {
            let taus: Vec<Permutation> = idx.iter().zip(&choices).map(|(&i, c)| c[i].clone()).collect();
            let acted: Vec<SymbolChain> = gs.iter().zip(&taus).map(|(g, tau)| {
                let (s, e) = g.act(tau);
                SymbolChain::single(s, e)
            }).collect();
            let lhs = op.compose_chains(&hch, &acted);
            let rhs = a.act(&Permutation::sum(&taus));
            t.record("equivariance_inner", lhs.as_ref().ok() == Some(&rhs), || {
                let names: Vec<String> = taus.iter().map(|p| p.to_string()).collect();
                format!("{} with τ = {}", show(h, gs), names.join(" ⊕ "))
            });
        }
        let mut d = k;
        loop {
            if d == 0 {
                return;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < choices[d].len() {
                break;
            }
            idx[d] = 0;
        }
    }
}

fn check_association(op: &SymbolOperad, h: &Symbol, gs: &[&Symbol], xs: &[&Symbol], t: &mut Tally) {
    let hg = t.compose(op, h, gs);
    let xch: Vec<SymbolChain> = xs.iter().map(|x| SymbolChain::single((*x).clone(), 1)).collect();
    let lhs = op.compose_chains(&hg, &xch).unwrap_or_default();
    let mut inner = Vec::new();
    let mut sign_exp = 0i64;
    let mut start = 0;
    let mut blocks: Vec<i64> = Vec::new();
    for g in gs {
        let block = &xs[start..start + g.arity()];
        inner.push(t.compose(op, g, block));
        blocks.push(block.iter().map(|x| x.degree()).sum());
        start += g.arity();
    }
    for a in 0..gs.len() {
        for b in a + 1..gs.len() {
            sign_exp += gs[b].degree() * blocks[a];
        }
    }
    let hch = SymbolChain::single(h.clone(), 1);
    let rhs = op
        .compose_chains(&hch, &inner)
        .unwrap_or_default()
        .scaled(if sign_exp % 2 == 0 { 1 } else { -1 });
    t.record("associativity", lhs == rhs, || {
        let xn: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
        format!("{} then [{}]: {lhs} vs {rhs}", show(h, gs), xn.join("], ["))
    });
}

/// Checks the operad axioms on every window symbol and on composable tuples
/// whose results stay in the window.
pub fn verify_operad_axioms(t: &TruncatedChainOperad, policy: SamplePolicy) -> OperadAxiomReport {
    let w = Window::new(t);
    let op = &t.operad;
    let mut families = BTreeMap::new();

    let tally = w.all.par_iter().fold(Tally::default, |mut acc, s| {
        check_symbol(op, s, t.qmax, &mut acc);
        acc
    });
    let mut tally = tally.reduce(Tally::default, Tally::merge);
    families.insert("symbols".to_string(), (w.all.len() as u64, true));

    let (more, total, exhaustive) = run_family::<Composition>(
        policy,
        0,
        &|emit| w.compositions(&mut |h, gs| emit((h, gs.to_vec()))),
        &|(h, gs), acc| check_composition(op, h, gs, acc),
    );
    families.insert("compositions".to_string(), (total, exhaustive));
    tally = tally.merge(more);

    let (more, total, exhaustive) = run_family::<Association>(
        policy,
        0xa55,
        &|emit| {
            w.associations(&mut |h, gs, xs| {
                let mut blocks = Vec::with_capacity(gs.len());
                let mut start = 0;
                for g in gs {
                    blocks.push(xs[start..start + g.arity()].to_vec());
                    start += g.arity();
                }
                emit((h, gs.to_vec(), blocks))
            })
        },
        &|(h, gs, blocks), acc| {
            let xs: Vec<&Symbol> = blocks.iter().flatten().copied().collect();
            check_association(op, h, gs, &xs, acc)
        },
    );
    families.insert("associations".to_string(), (total, exhaustive));
    tally = tally.merge(more);

    let mut report = CheckReport::default();
    for (_, c) in tally.checks {
        report.push(c);
    }
    OperadAxiomReport {
        bound: op.bound().to_string(),
        kmax: t.kmax,
        qmax: t.qmax,
        policy,
        families,
        report,
    }
}
