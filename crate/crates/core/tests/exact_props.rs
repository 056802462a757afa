use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use operadkit::exact::{
    homology, invariant_factors, kernel_basis, smith_normal_form, tensor, GradedIntComplex, IntMatrix, Truncation,
};
use proptest::prelude::*;
use std::collections::BTreeMap;

fn dense_matrix(max: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-6i64..=6, c), r))
}

/// Random unimodular matrix as a product of elementary operations.
fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    for &(i, j, c) in ops {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        let e = IntMatrix::identity(n).add(&IntMatrix::from_i64_triplets(n, n, vec![(i, j, c)]));
        m = e.mul(&m);
    }
    m
}

fn det(m: &IntMatrix) -> BigInt {
    let s = smith_normal_form(m);
    if s.rank() < m.rows() {
        return BigInt::zero();
    }
    s.diag.iter().product()
}

proptest! {
    #[test]
    fn smith_form_is_valid(rows in dense_matrix(5)) {
        let m = IntMatrix::from_dense(&rows);
        let s = smith_normal_form(&m);
        let d = s.u.mul(&m).mul(&s.v);
        prop_assert!(d.is_diagonal());
        prop_assert_eq!(d.nnz(), s.diag.len());
        for i in 0..s.diag.len() {
            prop_assert_eq!(&d.get(i, i), &s.diag[i]);
            prop_assert!(s.diag[i].is_positive());
            if i > 0 {
                prop_assert!((&s.diag[i] % &s.diag[i - 1]).is_zero());
            }
        }
        prop_assert!(det(&s.u).abs().is_one());
        prop_assert!(det(&s.v).abs().is_one());
        prop_assert_eq!(invariant_factors(&m), s.diag);
    }

    #[test]
    fn kernel_is_saturated(rows in dense_matrix(5)) {
        let m = IntMatrix::from_dense(&rows);
        let k = kernel_basis(&m);
        prop_assert!(m.mul(&k).is_zero());
        let r = smith_normal_form(&m).rank();
        prop_assert_eq!(k.cols(), m.cols() - r);
        prop_assert!(smith_normal_form(&k).diag.iter().all(|x| x.is_one()));
    }

    #[test]
    fn kunneth_for_disguised_free_complexes(
        a in prop::collection::vec((0i64..3, any::<bool>()), 1..4),
        b in prop::collection::vec((0i64..3, any::<bool>()), 1..4),
        ops_a in prop::collection::vec((0usize..8, 0usize..8, -2i64..=2), 0..12),
        ops_b in prop::collection::vec((0usize..8, 0usize..8, -2i64..=2), 0..12),
    ) {
        let (ca, ha) = build(&a, &ops_a);
        let (cb, hb) = build(&b, &ops_b);
        let t = tensor(&ca, &cb);
        for n in -1..=7 {
            let expect: usize = (0..=n).map(|i| ha.get(&i).unwrap_or(&0) * hb.get(&(n - i)).unwrap_or(&0)).sum();
            let h = homology(&t, n).unwrap();
            prop_assert_eq!(h.betti, expect);
            prop_assert!(h.torsion.is_empty());
        }
    }
}

/// Direct sum of pieces: `(d, false)` is Z in degree d, `(d, true)` is the
/// acyclic Z --1--> Z in degrees d+1 -> d. Each degree is then hit by a
/// random change of basis, which leaves homology unchanged.
fn build(pieces: &[(i64, bool)], ops: &[(usize, usize, i64)]) -> (GradedIntComplex, BTreeMap<i64, usize>) {
    let mut rank: BTreeMap<i64, usize> = BTreeMap::new();
    let mut betti: BTreeMap<i64, usize> = BTreeMap::new();
    let mut edges: Vec<(i64, usize, usize)> = Vec::new(); // (source degree, src idx, tgt idx)
    for &(d, acyclic) in pieces {
        if acyclic {
            let s = *rank.entry(d + 1).or_default();
            let t = *rank.entry(d).or_default();
            *rank.get_mut(&(d + 1)).unwrap() += 1;
            *rank.get_mut(&d).unwrap() += 1;
            edges.push((d + 1, s, t));
        } else {
            *rank.entry(d).or_default() += 1;
            *betti.entry(d).or_default() += 1;
        }
    }
    let change: BTreeMap<i64, IntMatrix> = rank.iter().map(|(&d, &n)| (d, unimodular(n, ops))).collect();
    let mut diff = BTreeMap::new();
    for (&d, &n) in &rank {
        let tgt = rank.get(&(d - 1)).copied().unwrap_or(0);
        let raw = IntMatrix::from_i64_triplets(
            tgt,
            n,
            edges.iter().filter(|e| e.0 == d).map(|e| (e.2, e.1, 1)).collect::<Vec<_>>(),
        );
        if tgt == 0 {
            continue;
        }
        // conjugate: P_{d-1} * raw * P_d^{-1}
        let p_tgt = &change[&(d - 1)];
        let p_src_inv = inverse(&change[&d]);
        diff.insert(d, p_tgt.mul(&raw).mul(&p_src_inv));
    }
    let basis = rank.iter().map(|(&d, &n)| (d, (0..n).map(|i| format!("g{d}.{i}")).collect())).collect();
    (GradedIntComplex::new(basis, diff, Truncation::Complete).unwrap(), betti)
}

fn inverse(u: &IntMatrix) -> IntMatrix {
    let s = smith_normal_form(u);
    assert!(s.diag.iter().all(|x| x.is_one()));
    // u = U^{-1} V^{-1}  =>  u^{-1} = V U
    s.v.mul(&s.u)
}
