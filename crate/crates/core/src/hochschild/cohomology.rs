use super::{Coefficients, FiniteRankAlgebra, HochschildCochain};
use crate::check::{CheckReport, CheckResult};
use crate::error::{Error, Result};
use crate::exact::{
    homology, kernel_basis, reduce_mod, ColumnEchelon, FpMatrix, FpSolver, GradedIntComplex, Homology, IntMatrix, Truncation,
};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use std::collections::BTreeMap;

/// Largest cochain group (as a rank) any computation may touch.
pub const MAX_COCHAIN_RANK: usize = 1024;

fn guard(alg: &FiniteRankAlgebra, p: usize) -> Result<()> {
    let r = alg.n.checked_pow(p as u32 + 1).unwrap_or(usize::MAX);
    if r > MAX_COCHAIN_RANK {
        return Err(Error::InfeasibleSize(format!(
            "degree {p} cochains of a rank-{} algebra have rank {r} (limit {MAX_COCHAIN_RANK})",
            alg.n
        )));
    }
    Ok(())
}

/// Columns of `d: C^p -> C^{p+1}` in the basis of basis cochains.
fn differential_columns(alg: &FiniteRankAlgebra, p: usize) -> Vec<Vec<i64>> {
    (0..alg.cochain_rank(p)).map(|j| alg.differential(&alg.basis_cochain(p, j)).values).collect()
}

fn int_matrix(rows: usize, cols: &[Vec<i64>]) -> IntMatrix {
    let trip = cols.iter().enumerate().flat_map(|(j, c)| c.iter().enumerate().filter(|(_, v)| **v != 0).map(move |(i, &v)| (i, j, v)));
    IntMatrix::from_i64_triplets(rows, cols.len(), trip)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CohomologyDegree {
    pub p: usize,
    pub cochain_rank: usize,
    /// Over `ℤ/p`: the dimension.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    /// Over `ℤ`: rank and torsion.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<Homology>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct HochschildCohomology {
    pub algebra: String,
    pub coefficients: String,
    pub degrees: Vec<CohomologyDegree>,
}

impl HochschildCohomology {
    /// Dimensions over a field, or ranks over `ℤ`.
    pub fn dimensions(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.dimension.unwrap_or_else(|| d.group.as_ref().map_or(0, |g| g.betti))).collect()
    }
}

/// `H^p` for `0 <= p <= pmax`; degree `pmax + 1` cochains are built to get
/// the outgoing differential of degree `pmax`.
pub fn hochschild_cohomology(alg: &FiniteRankAlgebra, pmax: usize) -> Result<HochschildCohomology> {
    guard(alg, pmax + 1)?;
    let cols: Vec<Vec<Vec<i64>>> = (0..=pmax).map(|p| differential_columns(alg, p)).collect();
    let degrees = match alg.coefficients {
        Coefficients::Mod(q) => {
            let ranks: Vec<usize> =
                (0..=pmax).map(|p| FpMatrix::from_columns(q, alg.cochain_rank(p + 1), &cols[p]).rank()).collect();
            (0..=pmax)
                .map(|p| {
                    let below = if p == 0 { 0 } else { ranks[p - 1] };
                    CohomologyDegree {
                        p,
                        cochain_rank: alg.cochain_rank(p),
                        dimension: Some(alg.cochain_rank(p) - ranks[p] - below),
                        group: None,
                    }
                })
                .collect()
        }
        Coefficients::Integers => {
            let mut basis = BTreeMap::new();
            let mut diff = BTreeMap::new();
            for p in 0..=pmax + 1 {
                basis.insert(-(p as i64), (0..alg.cochain_rank(p)).map(|j| format!("c{p}_{j}")).collect());
            }
            for p in 0..=pmax {
                diff.insert(-(p as i64), int_matrix(alg.cochain_rank(p + 1), &cols[p]));
            }
            let c = GradedIntComplex::new(basis, diff, Truncation::Window { lo: -(pmax as i64) - 1, hi: 1 })?
                .with_regrading("cochain degree p stored at -p");
            (0..=pmax)
                .map(|p| {
                    Ok(CohomologyDegree {
                        p,
                        cochain_rank: alg.cochain_rank(p),
                        dimension: None,
                        group: Some(homology(&c, -(p as i64))?),
                    })
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(HochschildCohomology { algebra: alg.name.clone(), coefficients: alg.coefficients.to_string(), degrees })
}

fn sign(e: usize) -> i64 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Exhaustive cochain-level checks on basis cochains: `d² = 0` for degrees up
/// to `pmax`, and the Leibniz rule, associativity, the unit and the
/// compatibility of the bracket with `d` whenever every degree involved is at
/// most `pmax + 1`.
pub fn verify_cochain_identities(alg: &FiniteRankAlgebra, pmax: usize) -> Result<CheckReport> {
    guard(alg, pmax + 1)?;
    let basis: Vec<Vec<HochschildCochain>> =
        (0..=pmax + 1).map(|p| (0..alg.cochain_rank(p)).map(|j| alg.basis_cochain(p, j)).collect()).collect();
    let diffs: Vec<Vec<HochschildCochain>> =
        (0..=pmax).map(|p| basis[p].iter().map(|x| alg.differential(x)).collect()).collect();
    let mut d2 = CheckResult::new("d_squared");
    for p in 0..pmax {
        for (j, dx) in diffs[p].iter().enumerate() {
            d2.record(alg.differential(dx).is_zero(), || format!("d d e_{j} in degree {p}"));
        }
    }
    let mut leibniz = CheckResult::new("cup_leibniz");
    let mut unit = CheckResult::new("cup_unit");
    let mut bracket = CheckResult::new("bracket_compatible_with_d")
        .with_note("d[f, g] = (-1)^(q-1) [df, g] + [f, dg] for f of degree p and g of degree q");
    let e = alg.unit_cochain();
    for p in 0..=pmax {
        for (i, x) in basis[p].iter().enumerate() {
            unit.record(alg.cup(&e, x) == *x && alg.cup(x, &e) == *x, || format!("e_{i} in degree {p}"));
            for q in 0..=pmax - p {
                for (j, y) in basis[q].iter().enumerate() {
                    if p + q < pmax {
                        let lhs = alg.differential(&alg.cup(x, y));
                        let a = alg.cup(&diffs[p][i], y);
                        let b = alg.cup(x, &diffs[q][j]);
                        let rhs = alg.combine(&[(1, &a), (sign(p), &b)]);
                        leibniz.record(lhs == rhs, || format!("degrees ({p}, {q}), basis ({i}, {j})"));
                    }
                    if p + q >= 1 && p + q <= pmax {
                        let lhs = alg.differential(&alg.bracket(x, y)?);
                        let a = alg.bracket(&diffs[p][i], y)?;
                        let b = alg.bracket(x, &diffs[q][j])?;
                        let rhs = alg.combine(&[(sign(q + 1), &a), (1, &b)]);
                        bracket.record(lhs == rhs, || format!("degrees ({p}, {q}), basis ({i}, {j})"));
                    }
                }
            }
        }
    }
    let mut assoc = CheckResult::new("cup_associative");
    for p in 0..=pmax {
        for q in 0..=pmax - p {
            for r in 0..=pmax - p - q {
                for x in &basis[p] {
                    for y in &basis[q] {
                        let xy = alg.cup(x, y);
                        for z in &basis[r] {
                            let ok = alg.cup(&xy, z) == alg.cup(x, &alg.cup(y, z));
                            assoc.record(ok, || format!("degrees ({p}, {q}, {r})"));
                        }
                    }
                }
            }
        }
    }
    let mut report = CheckReport::default();
    for c in [d2, leibniz, assoc, unit, bracket] {
        report.push(c);
    }
    Ok(report)
}

/// Which cup product the Gerstenhaber checks use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum CupVariant {
    #[default]
    Standard,
    /// Zero whenever the left factor has the lower degree; a deliberately
    /// broken product for exercising the checks.
    Skewed,
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub struct GerstenhaberCaps {
    /// Representatives are taken in degrees `0..=max_degree`.
    pub max_degree: usize,
    /// Identities whose terms land above this degree are skipped.
    pub max_output: usize,
}

impl Default for GerstenhaberCaps {
    fn default() -> Self {
        GerstenhaberCaps { max_degree: 2, max_output: 4 }
    }
}

/// A cochain `c` with `d c` equal to the defect of an identity.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Certificate {
    pub identity: String,
    /// Representatives as `degree:index`.
    pub inputs: Vec<String>,
    /// Degree of `c`; `None` when the defect sits in degree 0 and must vanish.
    pub degree: Option<usize>,
    pub values: Vec<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GerstenhaberReport {
    pub algebra: String,
    pub coefficients: String,
    pub caps: GerstenhaberCaps,
    pub variant: CupVariant,
    /// `"cohomology basis"` over a field, `"cocycle basis"` over `ℤ`.
    pub representatives: String,
    pub representative_counts: BTreeMap<usize, usize>,
    pub checks: CheckReport,
    pub certificates: Vec<Certificate>,
}

impl GerstenhaberReport {
    pub fn passed(&self) -> bool {
        self.checks.passed()
    }
}

enum Preimage {
    Field(u64, FpSolver),
    Lattice(usize, ColumnEchelon),
}

impl Preimage {
    fn new(alg: &FiniteRankAlgebra, p: usize) -> Self {
        let cols = differential_columns(alg, p);
        let rows = alg.cochain_rank(p + 1);
        match alg.coefficients {
            Coefficients::Mod(q) => Preimage::Field(q, FpSolver::new(&FpMatrix::from_columns(q, rows, &cols))),
            Coefficients::Integers => Preimage::Lattice(cols.len(), ColumnEchelon::new(&int_matrix(rows, &cols), true)),
        }
    }

    fn solve(&self, target: &[i64]) -> Option<Vec<i64>> {
        match self {
            Preimage::Field(q, s) => {
                let b: Vec<u64> = target.iter().map(|&v| reduce_mod(v, *q)).collect();
                s.solve(&b).map(|x| x.into_iter().map(|v| v as i64).collect())
            }
            Preimage::Lattice(n, e) => {
                let b: Vec<(usize, BigInt)> =
                    target.iter().enumerate().filter(|(_, v)| **v != 0).map(|(i, &v)| (i, BigInt::from(v))).collect();
                let mut out = vec![0i64; *n];
                for (i, v) in e.solve(&b)? {
                    out[i] = v.to_i64()?;
                }
                Some(out)
            }
        }
    }
}

fn representatives(alg: &FiniteRankAlgebra, p: usize) -> (Vec<HochschildCochain>, &'static str) {
    let cols = differential_columns(alg, p);
    match alg.coefficients {
        Coefficients::Mod(q) => {
            let z = FpMatrix::from_columns(q, alg.cochain_rank(p + 1), &cols).kernel();
            let mut span: Vec<Vec<i64>> = if p == 0 { Vec::new() } else { differential_columns(alg, p - 1) };
            let mut rank = FpMatrix::from_columns(q, alg.cochain_rank(p), &span).rank();
            let mut out = Vec::new();
            for v in z {
                let v: Vec<i64> = v.into_iter().map(|x| x as i64).collect();
                span.push(v.clone());
                let r = FpMatrix::from_columns(q, alg.cochain_rank(p), &span).rank();
                if r > rank {
                    rank = r;
                    out.push(HochschildCochain { p, n: alg.n, values: v });
                } else {
                    span.pop();
                }
            }
            (out, "cohomology basis")
        }
        Coefficients::Integers => {
            let k = kernel_basis(&int_matrix(alg.cochain_rank(p + 1), &cols));
            let out = (0..k.cols())
                .map(|j| {
                    let mut v = vec![0i64; alg.cochain_rank(p)];
                    for (i, x) in k.col(j) {
                        v[*i] = x.to_i64().expect("small cocycle entries");
                    }
                    HochschildCochain { p, n: alg.n, values: v }
                })
                .collect();
            (out, "cocycle basis")
        }
    }
}

struct Certifier<'a> {
    alg: &'a FiniteRankAlgebra,
    solvers: BTreeMap<usize, Preimage>,
    certificates: Vec<Certificate>,
}

impl<'a> Certifier<'a> {
    /// Finds `c` with `d c = defect`, checks it by applying `d` directly and
    /// records it.
    fn certify(&mut self, check: &mut CheckResult, inputs: Vec<String>, defect: &HochschildCochain) {
        let deg = defect.p;
        let identity = check.name.clone();
        if deg == 0 {
            let ok = defect.is_zero();
            check.record(ok, || format!("{inputs:?}: nonzero defect in degree 0"));
            if ok {
                self.certificates.push(Certificate { identity, inputs, degree: None, values: vec![] });
            }
            return;
        }
        let alg = self.alg;
        let solver = self.solvers.entry(deg - 1).or_insert_with(|| Preimage::new(alg, deg - 1));
        let found = solver.solve(&defect.values).map(|v| HochschildCochain { p: deg - 1, n: alg.n, values: v });
        let ok = matches!(&found, Some(c) if alg.differential(c) == *defect);
        check.record(ok, || format!("{inputs:?}: defect in degree {deg} is not a coboundary"));
        if let (true, Some(c)) = (ok, found) {
            self.certificates.push(Certificate { identity, inputs, degree: Some(deg - 1), values: c.values });
        }
    }
}

fn cup_with(alg: &FiniteRankAlgebra, v: CupVariant, a: &HochschildCochain, b: &HochschildCochain) -> HochschildCochain {
    match v {
        CupVariant::Skewed if a.p < b.p => alg.zero_cochain(a.p + b.p),
        _ => alg.cup(a, b),
    }
}

pub fn gerstenhaber_report(alg: &FiniteRankAlgebra, caps: GerstenhaberCaps) -> Result<GerstenhaberReport> {
    gerstenhaber_report_with(alg, caps, CupVariant::Standard)
}

/// Checks on cohomology representatives: `⌣` and `[ , ]` send cocycles to
/// cocycles, and graded commutativity, antisymmetry, Jacobi and the
/// derivation rule hold up to explicit coboundaries.
pub fn gerstenhaber_report_with(alg: &FiniteRankAlgebra, caps: GerstenhaberCaps, variant: CupVariant) -> Result<GerstenhaberReport> {
    guard(alg, caps.max_output.max(caps.max_degree + 1))?;
    let mut reps = BTreeMap::new();
    let mut kind = "";
    for p in 0..=caps.max_degree {
        let (r, k) = representatives(alg, p);
        kind = k;
        reps.insert(p, r);
    }
    let all: Vec<(String, &HochschildCochain)> =
        reps.iter().flat_map(|(p, v)| v.iter().enumerate().map(move |(i, x)| (format!("{p}:{i}"), x))).collect();
    let out_ok = |d: usize| d <= caps.max_output;
    let mut cert = Certifier { alg, solvers: BTreeMap::new(), certificates: Vec::new() };
    let mut closed_cup = CheckResult::new("cup_of_cocycles_is_a_cocycle");
    let mut closed_bracket = CheckResult::new("bracket_of_cocycles_is_a_cocycle");
    let mut commutative = CheckResult::new("cup_graded_commutative");
    let mut antisym = CheckResult::new("bracket_antisymmetric");
    let mut jacobi = CheckResult::new("bracket_jacobi");
    let mut derivation = CheckResult::new("bracket_derivation");

    for (nx, x) in &all {
        for (ny, y) in &all {
            let (p, q) = (x.p, y.p);
            if out_ok(p + q) {
                let xy = cup_with(alg, variant, x, y);
                let yx = cup_with(alg, variant, y, x);
                if out_ok(p + q + 1) {
                    closed_cup.record(alg.differential(&xy).is_zero(), || format!("{nx} ⌣ {ny}"));
                }
                let defect = alg.combine(&[(1, &xy), (-sign(p * q), &yx)]);
                cert.certify(&mut commutative, vec![nx.clone(), ny.clone()], &defect);
            }
            if p + q >= 1 && out_ok(p + q - 1) {
                let b = alg.bracket(x, y)?;
                closed_bracket.record(alg.differential(&b).is_zero(), || format!("[{nx}, {ny}]"));
                let ba = alg.bracket(y, x)?;
                let defect = alg.combine(&[(1, &b), (sign((p + 1) * (q + 1)), &ba)]);
                cert.certify(&mut antisym, vec![nx.clone(), ny.clone()], &defect);
            }
            for (nz, z) in &all {
                let r = z.p;
                // [x, [y, z]] (-1)^{(p-1)(r-1)} + cyclic
                if p + q + r >= 2 && q + r >= 1 && p + r >= 1 && p + q >= 1 && out_ok(p + q + r - 2) {
                    let t1 = alg.bracket(x, &alg.bracket(y, z)?)?;
                    let t2 = alg.bracket(y, &alg.bracket(z, x)?)?;
                    let t3 = alg.bracket(z, &alg.bracket(x, y)?)?;
                    let defect = alg.combine(&[
                        (sign((p + 1) * (r + 1)), &t1),
                        (sign((q + 1) * (p + 1)), &t2),
                        (sign((r + 1) * (q + 1)), &t3),
                    ]);
                    cert.certify(&mut jacobi, vec![nx.clone(), ny.clone(), nz.clone()], &defect);
                }
                // [x, y ⌣ z] - [x, y] ⌣ z - (-1)^{(p-1)q} y ⌣ [x, z]
                if p + q + r >= 1 && p + q >= 1 && p + r >= 1 && out_ok(p + q + r - 1) {
                    let lhs = alg.bracket(x, &cup_with(alg, variant, y, z))?;
                    let a = cup_with(alg, variant, &alg.bracket(x, y)?, z);
                    let b = cup_with(alg, variant, y, &alg.bracket(x, z)?);
                    let defect = alg.combine(&[(1, &lhs), (-1, &a), (-sign((p + 1) * q), &b)]);
                    cert.certify(&mut derivation, vec![nx.clone(), ny.clone(), nz.clone()], &defect);
                }
            }
        }
    }
    let mut checks = CheckReport::default();
    for c in [closed_cup, closed_bracket, commutative, antisym, jacobi, derivation] {
        checks.push(c);
    }
    Ok(GerstenhaberReport {
        algebra: alg.name.clone(),
        coefficients: alg.coefficients.to_string(),
        caps,
        variant,
        representatives: kind.to_string(),
        representative_counts: reps.iter().map(|(p, v)| (*p, v.len())).collect(),
        checks,
        certificates: cert.certificates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const F2: Coefficients = Coefficients::Mod(2);

    #[test]
    fn integers_have_cohomology_only_in_degree_zero() {
        let h = hochschild_cohomology(&FiniteRankAlgebra::integers(), 3).unwrap();
        assert_eq!(h.dimensions(), vec![1, 0, 0, 0]);
        assert!(h.degrees.iter().all(|d| d.group.as_ref().unwrap().torsion.is_empty()));
    }

    #[test]
    fn matrices_are_separable() {
        let h = hochschild_cohomology(&FiniteRankAlgebra::matrix_algebra(F2), 2).unwrap();
        assert_eq!(h.dimensions(), vec![1, 0, 0]);
    }

    #[test]
    fn oversized_requests_are_refused() {
        let m = FiniteRankAlgebra::matrix_algebra(F2);
        assert!(matches!(hochschild_cohomology(&m, 6), Err(Error::InfeasibleSize(_))));
    }

    #[test]
    fn cochain_identities_hold() {
        for a in [
            FiniteRankAlgebra::dual_numbers(Coefficients::Integers),
            FiniteRankAlgebra::upper_triangular(Coefficients::Integers),
            FiniteRankAlgebra::dual_numbers(Coefficients::Mod(3)),
        ] {
            let r = verify_cochain_identities(&a, 2).unwrap();
            assert!(r.passed(), "{}: {:#?}", a.name(), r);
            assert!(r.checks.iter().all(|c| c.instances > 0), "{r:#?}");
        }
    }

    #[test]
    fn dual_numbers_form_a_gerstenhaber_algebra() {
        for c in [F2, Coefficients::Mod(3), Coefficients::Integers] {
            let a = FiniteRankAlgebra::dual_numbers(c);
            let r = gerstenhaber_report(&a, GerstenhaberCaps::default()).unwrap();
            assert!(r.passed(), "{c}: {:#?}", r.checks);
            assert!(!r.certificates.is_empty());
        }
    }

    #[test]
    fn commutative_degree_zero_needs_no_certificate() {
        let a = FiniteRankAlgebra::dual_numbers(F2);
        let r = gerstenhaber_report(&a, GerstenhaberCaps { max_degree: 0, max_output: 0 }).unwrap();
        assert!(r.passed());
        assert!(r.certificates.iter().filter(|c| c.identity == "cup_graded_commutative").all(|c| c.degree.is_none()));
    }

    #[test]
    fn skewed_cup_is_caught() {
        let a = FiniteRankAlgebra::dual_numbers(F2);
        let r = gerstenhaber_report_with(&a, GerstenhaberCaps::default(), CupVariant::Skewed).unwrap();
        let c = r.checks.get("cup_graded_commutative").unwrap();
        assert!(c.failures > 0 && !c.witnesses.is_empty());
    }
}
