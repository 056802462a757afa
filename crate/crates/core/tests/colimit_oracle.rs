//! Box-product levels against an explicit colimit: the free abelian group on
//! every tensor of simplices over every object `(f, φ)` with a small source,
//! modulo the identifications `x ~ ψ_* x` for the elementary maps `ψ`.
//! Degenerate images are identified with zero. None of the relations carry
//! signs, so the quotient is computed with a union-find.

use operadkit::boxprod::{complexity, enumerate_box_symbols, internal_boundary_chain, ComplexityBound, SymbolChain};
use std::collections::HashMap;

const ZERO: usize = 0;

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            // keep ZERO as a root so "is zero" is a root comparison
            if b == ZERO {
                self.0[a] = b;
            } else {
                self.0[b] = a;
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct Object {
    f: Vec<u8>,
    phi: Vec<u8>,
}

/// Generators of one internal degree: a bitmask over the source picking a
/// nonempty subset of every fiber.
struct Colimit {
    k: usize,
    r: usize,
    ids: HashMap<(Object, u32), usize>,
    uf: UnionFind,
}

fn objects(k: usize, r: usize, t: usize, n: ComplexityBound) -> Vec<Object> {
    let mut out = Vec::new();
    let mut f = vec![1u8; t];
    loop {
        let values: Vec<usize> = f.iter().map(|&v| v as usize).collect();
        if n.allows(complexity(&values, k).unwrap()) {
            let mut phi = vec![0u8; t];
            loop {
                out.push(Object { f: f.clone(), phi: phi.clone() });
                let Some(i) = (0..t).rev().find(|&i| (phi[i] as usize) < r) else { break };
                let v = phi[i] + 1;
                phi[i..].fill(v);
            }
        }
        let Some(i) = (0..t).rev().find(|&i| (f[i] as usize) < k) else { break };
        f[i] += 1;
        f[i + 1..].fill(1);
    }
    out
}

fn masks(o: &Object, k: usize, degree: usize) -> Vec<u32> {
    let t = o.f.len();
    (1u32..1 << t)
        .filter(|&m| {
            let mut sizes = vec![0usize; k];
            for x in 0..t {
                if m >> x & 1 == 1 {
                    sizes[o.f[x] as usize - 1] += 1;
                }
            }
            sizes.iter().all(|&s| s > 0) && sizes.iter().map(|s| s - 1).sum::<usize>() == degree
        })
        .collect()
}

fn insert_bit_gap(m: u32, j: usize) -> u32 {
    let low = m & ((1 << j) - 1);
    let high = m >> j;
    low | (high << (j + 1))
}

impl Colimit {
    fn build(k: usize, r: usize, degree: usize, max_source: usize, n: ComplexityBound) -> Colimit {
        let mut ids = HashMap::new();
        let mut by_size: Vec<Vec<Object>> = vec![Vec::new(); max_source + 1];
        for t in 1..=max_source {
            by_size[t] = objects(k, r, t, n);
            for o in &by_size[t] {
                for m in masks(o, k, degree) {
                    let id = ids.len() + 1;
                    ids.insert((o.clone(), m), id);
                }
            }
        }
        let mut uf = UnionFind((0..=ids.len()).collect());
        let allowed = |o: &Object| {
            let values: Vec<usize> = o.f.iter().map(|&v| v as usize).collect();
            n.allows(complexity(&values, k).unwrap())
        };
        for t in 1..=max_source {
            for b in &by_size[t] {
                // cofaces [t-1] -> [t] skipping j
                for j in 0..t {
                    if t == 1 {
                        break;
                    }
                    let mut a = b.clone();
                    a.f.remove(j);
                    a.phi.remove(j);
                    if !allowed(&a) {
                        continue;
                    }
                    for m in masks(&a, k, degree) {
                        let src = ids[&(a.clone(), m)];
                        let dst = ids[&(b.clone(), insert_bit_gap(m, j))];
                        uf.union(src, dst);
                    }
                }
                // codegeneracies [t+1] -> [t] hitting j twice
                if t + 1 > max_source {
                    continue;
                }
                for j in 0..t {
                    let mut a = b.clone();
                    a.f.insert(j, b.f[j]);
                    a.phi.insert(j, b.phi[j]);
                    if !allowed(&a) {
                        continue;
                    }
                    for m in masks(&a, k, degree) {
                        let src = ids[&(a.clone(), m)];
                        if m >> j & 1 == 1 && m >> (j + 1) & 1 == 1 {
                            uf.union(src, ZERO);
                        } else {
                            let low = m & ((1 << j) - 1);
                            let mid = (m >> j | m >> (j + 1)) & 1;
                            let high = m >> (j + 2);
                            let image = low | mid << j | high << (j + 1);
                            uf.union(src, ids[&(b.clone(), image)]);
                        }
                    }
                }
            }
        }
        Colimit { k, r, ids, uf }
    }

    fn class(&mut self, o: &Object, m: u32) -> usize {
        let id = self.ids[&(o.clone(), m)];
        self.uf.find(id)
    }

    fn nonzero_classes(&mut self) -> usize {
        let ids: Vec<usize> = self.ids.values().copied().collect();
        let mut roots: Vec<usize> = ids.into_iter().map(|i| self.uf.find(i)).filter(|&x| x != ZERO).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    fn label(&self, o: &Object) -> String {
        let join = |v: &[u8]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        format!("k{}:{}|{}|r{}", self.k, join(&o.f), join(&o.phi), self.r)
    }
}

fn top(o: &Object) -> u32 {
    (1u32 << o.f.len()) - 1
}

fn parse(label: &str) -> Object {
    let parts: Vec<&str> = label.split('|').collect();
    let nums = |s: &str| s.split(',').map(|x| x.parse::<u8>().unwrap()).collect::<Vec<_>>();
    Object { f: nums(parts[0].split(':').nth(1).unwrap()), phi: nums(parts[1]) }
}

/// Tensor boundary of a top generator: drop one element of a fiber with at
/// least two elements, signed by its position among the fiber simplices.
fn brute_boundary(lower: &mut Colimit, o: &Object) -> HashMap<usize, i64> {
    let k = lower.k;
    let t = o.f.len();
    let mut sizes = vec![0usize; k];
    for &v in &o.f {
        sizes[v as usize - 1] += 1;
    }
    let mut out: HashMap<usize, i64> = HashMap::new();
    let mut seen = vec![0usize; k];
    for x in 0..t {
        let i = o.f[x] as usize - 1;
        let pos = seen[i];
        seen[i] += 1;
        if sizes[i] < 2 {
            continue;
        }
        let before: usize = sizes[..i].iter().map(|s| s - 1).sum();
        let sign = if (before + pos) % 2 == 0 { 1 } else { -1 };
        let cls = lower.class(o, top(o) & !(1 << x));
        if cls != ZERO {
            *out.entry(cls).or_default() += sign;
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

fn check(k: usize, q: usize, r: usize, n: ComplexityBound) {
    let degree = q + 1 - k;
    let max_source = q + 2;
    let mut c = Colimit::build(k, r, degree, max_source, n);
    let symbols = enumerate_box_symbols(k, q, r, n);
    assert_eq!(c.nonzero_classes(), symbols.len(), "k={k} q={q} r={r} n={n}: class count");

    let mut class_of = HashMap::new();
    for s in &symbols {
        let o = parse(&s.to_string());
        let cls = c.class(&o, top(&o));
        assert_ne!(cls, ZERO, "{s} vanishes in the colimit");
        assert!(class_of.insert(cls, s.to_string()).is_none(), "{s} shares a class");
    }
    // every top generator not in the symbol list is zero or equals a listed symbol's class
    for o in objects(k, r, q + 1, n) {
        let m = top(&o);
        if masks(&o, k, degree).contains(&m) {
            let cls = c.class(&o, m);
            let listed = symbols.iter().any(|s| s.to_string() == c.label(&o));
            assert!(listed || cls == ZERO, "unlisted top generator {} survives", c.label(&o));
        }
    }

    if degree == 0 {
        return;
    }
    let mut lower = Colimit::build(k, r, degree - 1, max_source, n);
    let lower_symbols = enumerate_box_symbols(k, q - 1, r, n);
    let mut lower_class = HashMap::new();
    for s in &lower_symbols {
        let o = parse(&s.to_string());
        lower_class.insert(lower.class(&o, top(&o)), s.to_string());
    }
    for s in &symbols {
        let o = parse(&s.to_string());
        let brute: HashMap<String, i64> =
            brute_boundary(&mut lower, &o).into_iter().map(|(cls, v)| (lower_class[&cls].clone(), v)).collect();
        let lib: HashMap<String, i64> =
            internal_boundary_chain(&SymbolChain::single(s.clone(), 1)).iter().map(|(t, v)| (t.to_string(), v)).collect();
        assert_eq!(brute, lib, "boundary of {s}");
    }
}

#[test]
fn box_levels_match_the_explicit_colimit() {
    for n in [ComplexityBound::Unbounded, ComplexityBound::Finite(1), ComplexityBound::Finite(2)] {
        for k in 1..=2 {
            for q in k - 1..=4 {
                for r in 0..=2 {
                    check(k, q, r, n);
                }
            }
        }
    }
}

#[test]
fn arity_three_matches_the_explicit_colimit() {
    for q in 2..=3 {
        for r in 0..=1 {
            check(3, q, r, ComplexityBound::Unbounded);
        }
    }
}

#[test]
fn arity_two_on_two_points_over_a_point_has_rank_two() {
    let mut c = Colimit::build(2, 0, 0, 3, ComplexityBound::Unbounded);
    assert_eq!(c.nonzero_classes(), 2);
}
