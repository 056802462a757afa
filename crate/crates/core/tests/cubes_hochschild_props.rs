use operadkit::boxprod::Permutation;
use operadkit::cubes::{random_element, CubesElement, GeneratedElement, IntervalsElement};
use operadkit::hochschild::{Coefficients, FiniteRankAlgebra, HochschildCochain};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn permutation(k: usize, seed: u64) -> Permutation {
    let all = Permutation::all(k);
    all[(seed as usize) % all.len()].clone()
}

fn elements(n: usize, arities: &[usize], rng: &mut ChaCha8Rng) -> Vec<CubesElement> {
    arities.iter().map(|&k| random_element(n, k, rng)).collect()
}

fn intervals(k: usize, rng: &mut ChaCha8Rng) -> IntervalsElement {
    let c = random_element(1, k, rng);
    let spans = c.cubes().iter().map(|t| (t.translation()[0].clone(), &t.translation()[0] + t.scale())).collect();
    IntervalsElement::new(spans).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cubes_composition_is_associative(seed: u64, n in 1usize..=2, k in 1usize..=3, js in prop::collection::vec(0usize..=2, 3)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_element(n, k, &mut rng);
        let ds = elements(n, &js[..k], &mut rng);
        let total: usize = ds.iter().map(|d| d.arity()).sum();
        let es: Vec<usize> = (0..total).map(|i| i % 2 + 1).collect();
        let es = elements(n, &es, &mut rng);
        let left = c.gamma(&ds).unwrap().gamma(&es).unwrap();
        let mut start = 0;
        let mut inner = Vec::new();
        for d in &ds {
            inner.push(d.gamma(&es[start..start + d.arity()]).unwrap());
            start += d.arity();
        }
        prop_assert_eq!(left, c.gamma(&inner).unwrap());
    }

    #[test]
    fn cubes_units_and_equivariance(seed: u64, n in 1usize..=2, k in 1usize..=3, pick: u64, js in prop::collection::vec(1usize..=2, 3)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_element(n, k, &mut rng);
        let u = CubesElement::unit(n);
        prop_assert_eq!(u.gamma(std::slice::from_ref(&c)).unwrap(), c.clone());
        prop_assert_eq!(c.gamma(&vec![u; k]).unwrap(), c.clone());
        let sigma = permutation(k, pick);
        let ds = elements(n, &js[..k], &mut rng);
        let inv = sigma.inverse();
        let permuted: Vec<CubesElement> = (0..k).map(|i| ds[inv.apply(i)].clone()).collect();
        let sizes: Vec<usize> = permuted.iter().map(|d| d.arity()).collect();
        let lhs = c.act(&sigma).unwrap().gamma(&ds).unwrap();
        let rhs = c.gamma(&permuted).unwrap().act(&sigma.block(&sizes)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn generated_operad_maps_to_cubes(seed: u64, k in 1usize..=3, pick: u64, js in prop::collection::vec(0usize..=2, 3), picks in prop::collection::vec(any::<u64>(), 3)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = GeneratedElement::new(intervals(k, &mut rng), permutation(k, pick)).unwrap();
        let bs: Vec<GeneratedElement> = (0..k)
            .map(|i| GeneratedElement::new(intervals(js[i], &mut rng), permutation(js[i], picks[i])).unwrap())
            .collect();
        let inner: Vec<CubesElement> = bs.iter().map(|b| b.to_cubes()).collect();
        prop_assert_eq!(a.gamma(&bs).unwrap().to_cubes(), a.to_cubes().gamma(&inner).unwrap());
    }
}

fn algebras() -> Vec<FiniteRankAlgebra> {
    vec![
        FiniteRankAlgebra::dual_numbers(Coefficients::Mod(3)),
        FiniteRankAlgebra::upper_triangular(Coefficients::Integers),
        FiniteRankAlgebra::matrix_algebra(Coefficients::Mod(2)),
    ]
}

fn cochain(alg: &FiniteRankAlgebra, p: usize, raw: &[i64]) -> HochschildCochain {
    let mut c = alg.zero_cochain(p);
    for (v, r) in c.values.iter_mut().zip(raw.iter().cycle()) {
        *v = *r;
    }
    alg.combine(&[(1, &c)])
}

fn sign(e: usize) -> i64 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn differential_squares_to_zero_and_cup_is_a_derivation(
        which in 0usize..3, p in 0usize..=2, q in 0usize..=1, raw in prop::collection::vec(-3i64..=3, 1..40)
    ) {
        let alg = &algebras()[which];
        let f = cochain(alg, p, &raw);
        let g = cochain(alg, q, &raw[raw.len() / 2..].iter().chain(&raw).copied().collect::<Vec<_>>());
        prop_assert!(alg.differential(&alg.differential(&f)).is_zero());
        let lhs = alg.differential(&alg.cup(&f, &g));
        let rhs = alg.combine(&[(1, &alg.cup(&alg.differential(&f), &g)), (sign(p), &alg.cup(&f, &alg.differential(&g)))]);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn circle_product_is_right_pre_lie(
        which in 0usize..3, p in 1usize..=2, q in 1usize..=2, r in 1usize..=2, raw in prop::collection::vec(-3i64..=3, 1..30)
    ) {
        let alg = &algebras()[which];
        let f = cochain(alg, p, &raw);
        let g = cochain(alg, q, &raw.iter().rev().copied().collect::<Vec<_>>());
        let h = cochain(alg, r, &raw.iter().map(|x| x + 1).collect::<Vec<_>>());
        let assoc = |x: &HochschildCochain, y: &HochschildCochain, z: &HochschildCochain| {
            let a = alg.circle(&alg.circle(x, y).unwrap(), z).unwrap();
            let b = alg.circle(x, &alg.circle(y, z).unwrap()).unwrap();
            alg.combine(&[(1, &a), (-1, &b)])
        };
        let swapped = assoc(&f, &h, &g);
        prop_assert_eq!(assoc(&f, &g, &h), alg.combine(&[(sign((q + 1) * (r + 1)), &swapped)]));
    }

    #[test]
    fn bracket_is_graded_antisymmetric_and_satisfies_jacobi(
        which in 0usize..3, p in 1usize..=2, q in 1usize..=2, r in 1usize..=2, raw in prop::collection::vec(-3i64..=3, 1..30)
    ) {
        let alg = &algebras()[which];
        let f = cochain(alg, p, &raw);
        let g = cochain(alg, q, &raw.iter().rev().copied().collect::<Vec<_>>());
        let h = cochain(alg, r, &raw.iter().map(|x| x - 1).collect::<Vec<_>>());
        let fg = alg.bracket(&f, &g).unwrap();
        let gf = alg.bracket(&g, &f).unwrap();
        prop_assert_eq!(fg.clone(), alg.combine(&[(-sign((p + 1) * (q + 1)), &gf)]));
        let b = |x: &HochschildCochain, y: &HochschildCochain| alg.bracket(x, y).unwrap();
        let terms = [
            (sign((p + 1) * (r + 1)), b(&f, &b(&g, &h))),
            (sign((q + 1) * (p + 1)), b(&g, &b(&h, &f))),
            (sign((r + 1) * (q + 1)), b(&h, &b(&f, &g))),
        ];
        let refs: Vec<(i64, &HochschildCochain)> = terms.iter().map(|(s, x)| (*s, x)).collect();
        prop_assert!(alg.combine(&refs).is_zero());
    }
}
