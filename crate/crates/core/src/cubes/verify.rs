use super::{rat, CubesElement, GeneratedElement, IntervalsElement, TDMap};
use crate::boxprod::Permutation;
use crate::check::{CheckReport, CheckResult};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub struct CubesCaps {
    pub n_max: usize,
    pub k_max: usize,
    /// Inner arities range over `0..=j_max`.
    pub j_max: usize,
    pub instances: usize,
    pub seed: u64,
}

impl Default for CubesCaps {
    fn default() -> Self {
        CubesCaps { n_max: 2, k_max: 3, j_max: 3, instances: 1000, seed: 0x5eed }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CubesAxiomReport {
    pub caps: CubesCaps,
    /// Number of `(n, k, j_1..j_k)` configurations.
    pub configurations: usize,
    pub report: CheckReport,
}

impl CubesAxiomReport {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

/// A random point of `C_n(k)` with small denominators: `k` distinct cells of
/// a grid, each holding one cube of random size and position.
pub fn random_element(n: usize, k: usize, rng: &mut impl Rng) -> CubesElement {
    let mut m = 1usize;
    while m.pow(n as u32) < k {
        m += 1;
    }
    m += rng.gen_range(0..2);
    let mut cells: Vec<usize> = (0..m.pow(n as u32)).collect();
    cells.shuffle(rng);
    let m = m as i64;
    let cubes = cells[..k]
        .iter()
        .map(|&cell| {
            let den = rng.gen_range(1..=6);
            let b = rat(rng.gen_range(1..=den), den * m);
            let slack = rat(1, m) - &b;
            let mut c = cell as i64;
            let a = (0..n)
                .map(|_| {
                    let corner = rat(c % m, m);
                    c /= m;
                    let d = rng.gen_range(1..=4);
                    corner + &slack * rat(rng.gen_range(0..=d), d)
                })
                .collect();
            TDMap::new(a, b).expect("cube inside its cell")
        })
        .collect();
    CubesElement::new(n, cubes).expect("cells are disjoint")
}

fn random_perm(k: usize, rng: &mut impl Rng) -> Permutation {
    let mut v: Vec<usize> = (0..k).collect();
    v.shuffle(rng);
    Permutation::new(v).expect("shuffled identity")
}

fn random_intervals(k: usize, rng: &mut impl Rng) -> IntervalsElement {
    let c = random_element(1, k, rng);
    IntervalsElement::new(c.cubes().iter().map(|t| (t.a[0].clone(), &t.a[0] + &t.b)).collect()).expect("disjoint")
}

#[derive(Default)]
struct Tally {
    checks: Vec<CheckResult>,
}

impl Tally {
    fn record(&mut self, name: &str, ok: bool, witness: impl FnOnce() -> String) {
        let i = match self.checks.iter().position(|c| c.name == name) {
            Some(i) => i,
            None => {
                self.checks.push(CheckResult::new(name));
                self.checks.len() - 1
            }
        };
        self.checks[i].record(ok, witness);
    }

    fn merge(mut self, other: Tally) -> Tally {
        for c in other.checks {
            match self.checks.iter_mut().find(|x| x.name == c.name) {
                Some(x) => x.merge(c),
                None => self.checks.push(c),
            }
        }
        self
    }
}

fn configurations(caps: &CubesCaps) -> Vec<(usize, Vec<usize>)> {
    let mut out = Vec::new();
    for n in 1..=caps.n_max {
        for k in 1..=caps.k_max {
            let mut js = vec![0; k];
            loop {
                out.push((n, js.clone()));
                let Some(i) = js.iter().rposition(|&j| j < caps.j_max) else { break };
                js[i] += 1;
                js[i + 1..].fill(0);
            }
        }
    }
    out
}

fn check_configuration(n: usize, js: &[usize], caps: &CubesCaps, salt: u64) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(caps.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut t = Tally::default();
    let k = js.len();
    let tag = format!("n={n} j={js:?}");
    let unit = CubesElement::unit(n);
    for _ in 0..caps.instances {
        let c = random_element(n, k, &mut rng);
        let ds: Vec<CubesElement> = js.iter().map(|&j| random_element(n, j, &mut rng)).collect();
        let es: Vec<Vec<CubesElement>> =
            js.iter().map(|&j| (0..j).map(|_| random_element(n, rng.gen_range(0..=2), &mut rng)).collect()).collect();
        let g = c.gamma(&ds);
        t.record("composition_defined", g.is_ok(), || format!("{tag}: {c} with {ds:?}"));
        let Ok(g) = g else { continue };

        t.record("unit_left", unit.gamma(&[c.clone()]).as_ref() == Ok(&c), || format!("{tag}: {c}"));
        let units = vec![unit.clone(); k];
        t.record("unit_right", c.gamma(&units).as_ref() == Ok(&c), || format!("{tag}: {c}"));

        let flat: Vec<CubesElement> = es.iter().flatten().cloned().collect();
        let lhs = g.gamma(&flat);
        let inner: Result<Vec<CubesElement>, _> = ds.iter().zip(&es).map(|(d, e)| d.gamma(e)).collect();
        let rhs = inner.and_then(|v| c.gamma(&v));
        t.record("associativity", lhs.is_ok() && lhs == rhs, || format!("{tag}: {c}"));

        let sigma = random_perm(k, &mut rng);
        let inv = sigma.inverse();
        let reordered: Vec<CubesElement> = (0..k).map(|m| ds[inv.apply(m)].clone()).collect();
        let sizes: Vec<usize> = reordered.iter().map(|d| d.arity()).collect();
        let lhs = c.act(&sigma).and_then(|cs| cs.gamma(&ds));
        let rhs = c.gamma(&reordered).and_then(|x| x.act(&sigma.block(&sizes)));
        t.record("equivariance_outer", lhs.is_ok() && lhs == rhs, || format!("{tag}: {c} σ={sigma}"));

        let taus: Vec<Permutation> = js.iter().map(|&j| random_perm(j, &mut rng)).collect();
        let acted: Result<Vec<CubesElement>, _> = ds.iter().zip(&taus).map(|(d, tau)| d.act(tau)).collect();
        let lhs = acted.and_then(|v| c.gamma(&v));
        let rhs = g.act(&Permutation::sum(&taus));
        t.record("equivariance_inner", lhs.is_ok() && lhs == rhs, || format!("{tag}: {c}"));

        if n == 1 {
            check_generated(&mut t, js, &tag, &mut rng);
        }
    }
    t
}

/// The operad generated by the little intervals: its own axioms, and that
/// sending `(a, σ)` to the tuple of `a` permuted by `σ` commutes with `γ`.
fn check_generated(t: &mut Tally, js: &[usize], tag: &str, rng: &mut ChaCha8Rng) {
    let k = js.len();
    let x = GeneratedElement::new(random_intervals(k, rng), random_perm(k, rng)).expect("arity");
    let ys: Vec<GeneratedElement> = js
        .iter()
        .map(|&j| GeneratedElement::new(random_intervals(j, rng), random_perm(j, rng)).expect("arity"))
        .collect();
    let zs: Vec<Vec<GeneratedElement>> = js
        .iter()
        .map(|&j| {
            (0..j)
                .map(|_| {
                    let i = rng.gen_range(0..=2);
                    GeneratedElement::new(random_intervals(i, rng), random_perm(i, rng)).expect("arity")
                })
                .collect()
        })
        .collect();
    let g = x.gamma(&ys).expect("arity");
    let images: Vec<CubesElement> = ys.iter().map(|y| y.to_cubes()).collect();
    t.record("generated_morphism", x.to_cubes().gamma(&images).as_ref() == Ok(&g.to_cubes()), || {
        format!("{tag}: {x:?}")
    });
    let u = GeneratedElement::unit();
    t.record("generated_unit", u.gamma(&[x.clone()]).as_ref() == Ok(&x) && x.gamma(&vec![u; k]).as_ref() == Ok(&x), || {
        format!("{tag}: {x:?}")
    });
    let flat: Vec<GeneratedElement> = zs.iter().flatten().cloned().collect();
    let inner: Vec<GeneratedElement> = ys.iter().zip(&zs).map(|(y, z)| y.gamma(z).expect("arity")).collect();
    let lhs = g.gamma(&flat).ok();
    t.record("generated_associativity", lhs.is_some() && lhs == x.gamma(&inner).ok(), || format!("{tag}: {x:?}"));
}

/// Randomized exact checks of unit, associativity and both equivariance laws
/// for every `n ≤ n_max`, `k ≤ k_max` and inner arities `j_i ≤ j_max`, with
/// `caps.instances` instances per configuration.
pub fn verify_cubes_axioms(caps: CubesCaps) -> CubesAxiomReport {
    let configs = configurations(&caps);
    let tally = configs
        .par_iter()
        .enumerate()
        .map(|(i, (n, js))| check_configuration(*n, js, &caps, i as u64))
        .reduce(Tally::default, Tally::merge);
    let mut report = CheckReport::default();
    for c in tally.checks {
        report.push(c);
    }
    CubesAxiomReport { caps, configurations: configs.len(), report }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_elements_are_valid_and_varied() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let xs: Vec<CubesElement> = (0..50).map(|_| random_element(2, 3, &mut rng)).collect();
        assert!(xs.iter().all(|x| x.arity() == 3));
        let distinct: std::collections::HashSet<_> = xs.iter().collect();
        assert!(distinct.len() > 40);
    }

    #[test]
    fn configurations_are_counted() {
        let caps = CubesCaps { n_max: 2, k_max: 3, j_max: 3, instances: 1, seed: 0 };
        assert_eq!(configurations(&caps).len(), 2 * (4 + 16 + 64));
    }

    #[test]
    fn small_run_passes() {
        let r = verify_cubes_axioms(CubesCaps { n_max: 2, k_max: 2, j_max: 2, instances: 20, seed: 3 });
        assert!(r.passed(), "{:#?}", r.report);
        assert!(r.report.get("generated_morphism").unwrap().instances > 0);
    }
}
