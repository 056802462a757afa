//! Hochschild cochains of algebras that are free of finite rank over `ℤ` or
//! `ℤ/p`, with the cup product, the circle product and the bracket.

mod cohomology;

pub use cohomology::{
    gerstenhaber_report, gerstenhaber_report_with, hochschild_cohomology, verify_cochain_identities, Certificate,
    CohomologyDegree, GerstenhaberCaps, GerstenhaberReport, HochschildCohomology,
};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coefficients {
    Integers,
    Mod(u64),
}

impl Coefficients {
    pub fn reduce(&self, v: i64) -> i64 {
        match self {
            Coefficients::Integers => v,
            Coefficients::Mod(p) => v.rem_euclid(*p as i64),
        }
    }
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficients::Integers => write!(f, "Z"),
            Coefficients::Mod(p) => write!(f, "Z/{p}"),
        }
    }
}

/// JSON form of an algebra. `structure[i][j]` is the product `e_i e_j` as a
/// coefficient vector.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub ring: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    pub rank: usize,
    pub structure: Vec<Vec<Vec<i64>>>,
    pub unit: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteRankAlgebra {
    name: String,
    coefficients: Coefficients,
    n: usize,
    /// `c[(i * n + j) * n + k]`: coefficient of `e_k` in `e_i e_j`.
    structure: Vec<i64>,
    unit: Vec<i64>,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl FiniteRankAlgebra {
    /// Checks associativity and the two-sided unit on all basis triples.
    pub fn new(name: impl Into<String>, coefficients: Coefficients, structure: Vec<Vec<Vec<i64>>>, unit: Vec<i64>) -> Result<Self> {
        if let Coefficients::Mod(p) = coefficients {
            if !is_prime(p) || p >= 1 << 31 {
                return Err(Error::Invalid(format!("coefficient modulus {p} must be a prime below 2^31")));
            }
        }
        let n = unit.len();
        if n == 0 || structure.len() != n || structure.iter().any(|row| row.len() != n || row.iter().any(|v| v.len() != n)) {
            return Err(Error::Invalid(format!("structure constants must form a {n} x {n} table of length-{n} vectors")));
        }
        let flat = structure.iter().flatten().flatten().map(|&v| coefficients.reduce(v)).collect();
        let unit = unit.iter().map(|&v| coefficients.reduce(v)).collect();
        let a = FiniteRankAlgebra { name: name.into(), coefficients, n, structure: flat, unit };
        for i in 0..n {
            let ei = a.basis_vector(i);
            if a.mul(&a.unit, &ei) != ei || a.mul(&ei, &a.unit) != ei {
                return Err(Error::Invalid(format!("the unit is not two-sided on e_{i}")));
            }
            for j in 0..n {
                for k in 0..n {
                    let ej = a.basis_vector(j);
                    let ek = a.basis_vector(k);
                    if a.mul(&a.mul(&ei, &ej), &ek) != a.mul(&ei, &a.mul(&ej, &ek)) {
                        return Err(Error::Invalid(format!("(e_{i} e_{j}) e_{k} ≠ e_{i} (e_{j} e_{k})")));
                    }
                }
            }
        }
        Ok(a)
    }

    pub fn from_spec(spec: &AlgebraSpec) -> Result<Self> {
        let coefficients = match (spec.ring.as_str(), spec.p) {
            ("Z", None) => Coefficients::Integers,
            ("Zp", Some(p)) => Coefficients::Mod(p),
            ("Zp", None) => return Err(Error::Invalid("ring Zp needs p".into())),
            (r, _) => return Err(Error::Invalid(format!("unknown ring {r}; expected Z or Zp"))),
        };
        if spec.rank != spec.unit.len() {
            return Err(Error::Invalid(format!("rank {} but unit of length {}", spec.rank, spec.unit.len())));
        }
        let name = spec.name.clone().unwrap_or_else(|| "algebra".into());
        Self::new(name, coefficients, spec.structure.clone(), spec.unit.clone())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: AlgebraSpec = serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
        Self::from_spec(&spec)
    }

    pub fn to_spec(&self) -> AlgebraSpec {
        let (ring, p) = match self.coefficients {
            Coefficients::Integers => ("Z".to_string(), None),
            Coefficients::Mod(p) => ("Zp".to_string(), Some(p)),
        };
        let n = self.n;
        let structure =
            (0..n).map(|i| (0..n).map(|j| self.product_of_basis(i, j).to_vec()).collect()).collect();
        AlgebraSpec { name: Some(self.name.clone()), ring, p, rank: n, structure, unit: self.unit.clone() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> Coefficients {
        self.coefficients
    }

    pub fn unit(&self) -> &[i64] {
        &self.unit
    }

    pub fn basis_vector(&self, i: usize) -> Vec<i64> {
        let mut v = vec![0; self.n];
        v[i] = 1;
        v
    }

    pub fn product_of_basis(&self, i: usize, j: usize) -> &[i64] {
        let start = (i * self.n + j) * self.n;
        &self.structure[start..start + self.n]
    }

    pub fn mul(&self, u: &[i64], v: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.n];
        for (i, &a) in u.iter().enumerate().filter(|(_, a)| **a != 0) {
            for (j, &b) in v.iter().enumerate().filter(|(_, b)| **b != 0) {
                for (o, &c) in out.iter_mut().zip(self.product_of_basis(i, j)) {
                    *o += a * b * c;
                }
            }
        }
        self.reduce_vec(out)
    }

    fn reduce_vec(&self, v: Vec<i64>) -> Vec<i64> {
        v.into_iter().map(|x| self.coefficients.reduce(x)).collect()
    }

    // ----- examples -----

    pub fn integers() -> Self {
        Self::new("Z", Coefficients::Integers, vec![vec![vec![1]]], vec![1]).expect("ℤ")
    }

    /// `k[x]/(x²)` with basis `1, x`.
    pub fn dual_numbers(c: Coefficients) -> Self {
        let s = vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![0, 0]]];
        Self::new(format!("{c}[x]/(x^2)"), c, s, vec![1, 0]).expect("dual numbers")
    }

    /// 2×2 upper-triangular matrices with basis `E11, E12, E22`.
    pub fn upper_triangular(c: Coefficients) -> Self {
        let units = [(0, 0), (0, 1), (1, 1)];
        Self::matrix_units(format!("upper triangular 2x2 over {c}"), c, &units)
    }

    /// All 2×2 matrices with basis `E11, E12, E21, E22`.
    pub fn matrix_algebra(c: Coefficients) -> Self {
        let units = [(0, 0), (0, 1), (1, 0), (1, 1)];
        Self::matrix_units(format!("2x2 matrices over {c}"), c, &units)
    }

    fn matrix_units(name: String, c: Coefficients, units: &[(usize, usize)]) -> Self {
        let n = units.len();
        let structure = units
            .iter()
            .map(|&(a, b)| {
                units
                    .iter()
                    .map(|&(x, d)| {
                        let mut v = vec![0; n];
                        if b == x {
                            v[units.iter().position(|&u| u == (a, d)).expect("closed under products")] = 1;
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        let unit = units.iter().map(|&(a, b)| i64::from(a == b)).collect();
        Self::new(name, c, structure, unit).expect("matrix units")
    }

    // ----- cochains -----

    pub fn zero_cochain(&self, p: usize) -> HochschildCochain {
        HochschildCochain { p, n: self.n, values: vec![0; self.n.pow(p as u32 + 1)] }
    }

    pub fn cochain_rank(&self, p: usize) -> usize {
        self.n.pow(p as u32 + 1)
    }

    pub fn basis_cochain(&self, p: usize, j: usize) -> HochschildCochain {
        let mut c = self.zero_cochain(p);
        c.values[j] = 1;
        c
    }

    pub fn cochain(&self, p: usize, values: Vec<i64>) -> Result<HochschildCochain> {
        if values.len() != self.cochain_rank(p) {
            return Err(Error::Invalid(format!("degree {p} cochain needs {} values", self.cochain_rank(p))));
        }
        Ok(HochschildCochain { p, n: self.n, values: self.reduce_vec(values) })
    }

    /// The degree-0 cochain given by the unit.
    pub fn unit_cochain(&self) -> HochschildCochain {
        HochschildCochain { p: 0, n: self.n, values: self.unit.clone() }
    }

    /// `ρ` evaluated on basis arguments with one slot replaced by a vector.
    fn eval_with(&self, rho: &HochschildCochain, before: &[usize], v: &[i64], after: &[usize]) -> Vec<i64> {
        let mut out = vec![0i64; self.n];
        let mut args: Vec<usize> = before.to_vec();
        args.push(0);
        args.extend_from_slice(after);
        for (k, &c) in v.iter().enumerate().filter(|(_, c)| **c != 0) {
            args[before.len()] = k;
            for (o, &x) in out.iter_mut().zip(rho.at(&args)) {
                *o += c * x;
            }
        }
        self.reduce_vec(out)
    }

    /// `(dρ)(r_1..r_{p+1}) = r_1 ρ(r_2..) + Σ (-1)^i ρ(.., r_i r_{i+1}, ..) + (-1)^{p+1} ρ(..r_p) r_{p+1}`.
    pub fn differential(&self, rho: &HochschildCochain) -> HochschildCochain {
        let p = rho.p;
        let mut out = self.zero_cochain(p + 1);
        for (t, args) in tuples(self.n, p + 1).enumerate() {
            let mut acc = self.mul(&self.basis_vector(args[0]), rho.at(&args[1..]));
            for i in 1..=p {
                let prod = self.product_of_basis(args[i - 1], args[i]).to_vec();
                let term = self.eval_with(rho, &args[..i - 1], &prod, &args[i + 1..]);
                add_signed(&mut acc, &term, sign(i));
            }
            let last = self.mul(rho.at(&args[..p]), &self.basis_vector(args[p]));
            add_signed(&mut acc, &last, sign(p + 1));
            out.set(t, self.reduce_vec(acc));
        }
        out
    }

    /// `(ρ1 ⌣ ρ2)(r_1..r_{p+q}) = ρ1(r_1..r_p) · ρ2(r_{p+1}..r_{p+q})`.
    pub fn cup(&self, a: &HochschildCochain, b: &HochschildCochain) -> HochschildCochain {
        let (p, q) = (a.p, b.p);
        let mut out = self.zero_cochain(p + q);
        for (t, args) in tuples(self.n, p + q).enumerate() {
            out.set(t, self.mul(a.at(&args[..p]), b.at(&args[p..])));
        }
        out
    }

    /// `f ∘ g = Σ_i (-1)^{i(q-1)} f(r_1..r_i, g(r_{i+1}..r_{i+q}), ..)`.
    pub fn circle(&self, f: &HochschildCochain, g: &HochschildCochain) -> Result<HochschildCochain> {
        let (p, q) = (f.p, g.p);
        if p + q == 0 {
            return Err(Error::Invalid("circle product needs total degree at least 1".into()));
        }
        let mut out = self.zero_cochain(p + q - 1);
        if p == 0 {
            return Ok(out);
        }
        for (t, args) in tuples(self.n, p + q - 1).enumerate() {
            let mut acc = vec![0i64; self.n];
            for i in 0..p {
                let inner = g.at(&args[i..i + q]).to_vec();
                let term = self.eval_with(f, &args[..i], &inner, &args[i + q..]);
                add_signed(&mut acc, &term, sign(i * (q + 1)));
            }
            out.set(t, self.reduce_vec(acc));
        }
        Ok(out)
    }

    /// `[f, g] = f ∘ g - (-1)^{(p-1)(q-1)} g ∘ f`.
    pub fn bracket(&self, f: &HochschildCochain, g: &HochschildCochain) -> Result<HochschildCochain> {
        let a = self.circle(f, g)?;
        let b = self.circle(g, f)?;
        let s = sign((f.p + 1) * (g.p + 1));
        Ok(self.combine(&[(1, &a), (-s, &b)]))
    }

    /// `Σ c_i x_i` for cochains of one degree.
    pub fn combine(&self, terms: &[(i64, &HochschildCochain)]) -> HochschildCochain {
        let p = terms[0].1.p;
        let mut out = self.zero_cochain(p);
        for (c, x) in terms {
            assert_eq!(x.p, p, "combining cochains of different degrees");
            for (o, v) in out.values.iter_mut().zip(&x.values) {
                *o += c * v;
            }
        }
        out.values = self.reduce_vec(out.values);
        out
    }
}

fn sign(e: usize) -> i64 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

fn add_signed(acc: &mut [i64], v: &[i64], s: i64) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += s * b;
    }
}

/// All argument tuples `(i_1..i_p)` in lexicographic order.
fn tuples(n: usize, p: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..n.pow(p as u32)).map(move |mut t| {
        let mut v = vec![0; p];
        for slot in v.iter_mut().rev() {
            *slot = t % n;
            t /= n;
        }
        v
    })
}

/// A multilinear map `R^{⊗p} -> R`, stored as `n^p` output vectors in
/// lexicographic order of basis arguments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HochschildCochain {
    pub p: usize,
    pub n: usize,
    pub values: Vec<i64>,
}

impl HochschildCochain {
    fn offset(&self, args: &[usize]) -> usize {
        args.iter().fold(0, |acc, &a| acc * self.n + a) * self.n
    }

    /// The value on basis arguments.
    pub fn at(&self, args: &[usize]) -> &[i64] {
        assert_eq!(args.len(), self.p, "wrong number of arguments");
        let o = self.offset(args);
        &self.values[o..o + self.n]
    }

    fn set(&mut self, t: usize, v: Vec<i64>) {
        self.values[t * self.n..(t + 1) * self.n].copy_from_slice(&v);
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const F2: Coefficients = Coefficients::Mod(2);

    #[test]
    fn degree_zero_differential_is_a_commutator() {
        let m = FiniteRankAlgebra::matrix_algebra(Coefficients::Integers);
        for j in 0..4 {
            let rho = m.basis_cochain(0, j);
            let d = m.differential(&rho);
            for i in 0..4 {
                let r = m.basis_vector(i);
                let expected: Vec<i64> =
                    m.mul(&r, &rho.values).iter().zip(m.mul(&rho.values, &r)).map(|(a, b)| a - b).collect();
                assert_eq!(d.at(&[i]), expected.as_slice());
            }
        }
        let d = FiniteRankAlgebra::dual_numbers(F2);
        assert!(d.differential(&d.basis_cochain(0, 1)).is_zero());
    }

    #[test]
    fn cup_in_degree_zero_is_multiplication() {
        let m = FiniteRankAlgebra::matrix_algebra(Coefficients::Integers);
        for i in 0..4 {
            for j in 0..4 {
                let c = m.cup(&m.basis_cochain(0, i), &m.basis_cochain(0, j));
                assert_eq!(c.values, m.product_of_basis(i, j));
            }
        }
    }

    #[test]
    fn unit_cochain_is_a_cup_unit() {
        let a = FiniteRankAlgebra::upper_triangular(Coefficients::Integers);
        let e = a.unit_cochain();
        for p in 0..3 {
            for j in 0..a.cochain_rank(p) {
                let x = a.basis_cochain(p, j);
                assert_eq!(a.cup(&e, &x), x);
                assert_eq!(a.cup(&x, &e), x);
            }
        }
    }

    #[test]
    fn bracket_of_degree_one_cochains_is_a_commutator() {
        let a = FiniteRankAlgebra::dual_numbers(Coefficients::Integers);
        let f = a.cochain(1, vec![1, 2, -1, 3]).unwrap();
        let g = a.cochain(1, vec![0, 1, 4, -2]).unwrap();
        let b = a.bracket(&f, &g).unwrap();
        for i in 0..2 {
            let fg = a.eval_with(&f, &[], g.at(&[i]), &[]);
            let gf = a.eval_with(&g, &[], f.at(&[i]), &[]);
            let expected: Vec<i64> = fg.iter().zip(&gf).map(|(x, y)| x - y).collect();
            assert_eq!(b.at(&[i]), expected.as_slice());
        }
    }

    #[test]
    fn rejects_bad_tables() {
        // basis 1, a, b with a a = b, a b = 0, b a = a: (a a) a = a but a (a a) = 0
        let e = |i: usize| {
            let mut v = vec![0; 3];
            v[i] = 1;
            v
        };
        let z = vec![0; 3];
        let s = vec![
            vec![e(0), e(1), e(2)],
            vec![e(1), e(2), z.clone()],
            vec![e(2), e(1), z.clone()],
        ];
        assert!(matches!(FiniteRankAlgebra::new("bad", Coefficients::Integers, s, e(0)), Err(Error::Invalid(_))));
        let s = vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![1, 1]]];
        assert!(FiniteRankAlgebra::new("golden", Coefficients::Integers, s.clone(), vec![1, 0]).is_ok());
        assert!(FiniteRankAlgebra::new("wrong unit", Coefficients::Integers, s, vec![0, 1]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let a = FiniteRankAlgebra::upper_triangular(F2);
        let text = serde_json::to_string(&a.to_spec()).unwrap();
        assert_eq!(FiniteRankAlgebra::from_json(&text).unwrap(), a);
        assert!(FiniteRankAlgebra::from_json(r#"{"ring":"Zp","p":4,"rank":1,"structure":[[[1]]],"unit":[1]}"#).is_err());
    }
}
