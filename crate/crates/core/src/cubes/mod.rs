//! Little intervals and little cubes with exact rational coordinates.

mod components;
mod verify;

pub use components::{count_components, ComponentCount};
pub use verify::{random_element, verify_cubes_axioms, CubesAxiomReport, CubesCaps};

use crate::boxprod::Permutation;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

pub type Rational = BigRational;

/// Parses `"3"`, `"-2/7"` or `"0.55"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let whole = whole.trim_start_matches(['-', '+']);
        let digits: BigInt = format!("{}{frac}", if whole.is_empty() { "0" } else { whole }).parse().map_err(|_| bad())?;
        let q = Rational::new(digits, num_traits::pow(BigInt::from(10), frac.len()));
        return Ok(if neg { -q } else { q });
    }
    s.parse::<BigInt>().map(Rational::from_integer).map_err(|_| bad())
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `t ↦ a + b t` on the unit cube, with `a_i ≥ 0`, `b > 0` and `a_i + b ≤ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TDMap {
    a: Vec<Rational>,
    b: Rational,
}

impl TDMap {
    pub fn new(a: Vec<Rational>, b: Rational) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Invalid("a TD-map needs dimension at least 1".into()));
        }
        if !b.is_positive() {
            return Err(Error::Invalid(format!("scale {b} is not positive")));
        }
        for x in &a {
            if x.is_negative() || x + &b > Rational::one() {
                return Err(Error::Invalid(format!("translation {x} with scale {b} leaves the unit cube")));
            }
        }
        Ok(TDMap { a, b })
    }

    pub fn identity(n: usize) -> Self {
        TDMap { a: vec![Rational::zero(); n], b: Rational::one() }
    }

    pub fn parse(a: &[&str], b: &str) -> Result<Self> {
        TDMap::new(a.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?, parse_rational(b)?)
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn translation(&self) -> &[Rational] {
        &self.a
    }

    pub fn scale(&self) -> &Rational {
        &self.b
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &TDMap) -> TDMap {
        TDMap { a: self.a.iter().zip(&other.a).map(|(x, y)| x + &self.b * y).collect(), b: &self.b * &other.b }
    }

    pub fn apply(&self, t: &[Rational]) -> Vec<Rational> {
        self.a.iter().zip(t).map(|(x, y)| x + &self.b * y).collect()
    }

    /// Whether the two image cubes meet at most in their boundaries.
    pub fn interiors_disjoint(&self, other: &TDMap) -> bool {
        self.a.iter().zip(&other.a).any(|(x, y)| x + &self.b <= *y || y + &other.b <= *x)
    }
}

impl fmt::Display for TDMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a: Vec<String> = self.a.iter().map(|x| x.to_string()).collect();
        write!(f, "(a=({}), b={})", a.join(","), self.b)
    }
}

#[derive(Serialize, Deserialize)]
struct TDMapRepr {
    a: Vec<String>,
    b: String,
}

impl Serialize for TDMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TDMapRepr { a: self.a.iter().map(|x| x.to_string()).collect(), b: self.b.to_string() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TDMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = TDMapRepr::deserialize(d)?;
        let a: Vec<&str> = r.a.iter().map(String::as_str).collect();
        TDMap::parse(&a, &r.b).map_err(serde::de::Error::custom)
    }
}

/// A point of `C_n(k)`: `k` TD-maps whose images have disjoint interiors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CubesElement {
    n: usize,
    cubes: Vec<TDMap>,
}

impl CubesElement {
    pub fn new(n: usize, cubes: Vec<TDMap>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("dimension must be at least 1".into()));
        }
        if let Some(c) = cubes.iter().find(|c| c.dim() != n) {
            return Err(Error::IncompatibleInputs(format!("cube {c} in a {n}-dimensional element")));
        }
        for i in 0..cubes.len() {
            for j in i + 1..cubes.len() {
                if !cubes[i].interiors_disjoint(&cubes[j]) {
                    return Err(Error::DisjointnessViolation(format!(
                        "cubes {} {} and {} {} overlap",
                        i + 1,
                        cubes[i],
                        j + 1,
                        cubes[j]
                    )));
                }
            }
        }
        Ok(CubesElement { n, cubes })
    }

    pub fn unit(n: usize) -> Self {
        CubesElement { n, cubes: vec![TDMap::identity(n)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.cubes.len()
    }

    pub fn cubes(&self) -> &[TDMap] {
        &self.cubes
    }

    /// Right action: cube `i` of the result is cube `σ(i)` of `self`.
    pub fn act(&self, sigma: &Permutation) -> Result<CubesElement> {
        if sigma.len() != self.arity() {
            return Err(Error::IncompatibleInputs(format!("permutation {sigma} on arity {}", self.arity())));
        }
        Ok(CubesElement { n: self.n, cubes: (0..sigma.len()).map(|i| self.cubes[sigma.apply(i)].clone()).collect() })
    }

    /// `γ(c; d_1, …, d_k)`: cube `l` of `d_i` is carried into cube `i` of `c`.
    pub fn gamma(&self, ds: &[CubesElement]) -> Result<CubesElement> {
        if ds.len() != self.arity() {
            return Err(Error::IncompatibleInputs(format!("{} inputs for arity {}", ds.len(), self.arity())));
        }
        if let Some(d) = ds.iter().find(|d| d.n != self.n) {
            return Err(Error::IncompatibleInputs(format!("dimension {} input for dimension {}", d.n, self.n)));
        }
        let cubes = self.cubes.iter().zip(ds).flat_map(|(k, d)| d.cubes.iter().map(move |l| k.compose(l))).collect();
        CubesElement::new(self.n, cubes)
    }
}

impl<'de> Deserialize<'de> for CubesElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            n: usize,
            cubes: Vec<TDMap>,
        }
        let r = Repr::deserialize(d)?;
        CubesElement::new(r.n, r.cubes).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for CubesElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.cubes.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", v.join(", "))
    }
}

/// A point of the little intervals operad: closed subintervals of `[0, 1]`
/// with disjoint interiors, kept in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntervalsElement {
    intervals: Vec<(Rational, Rational)>,
}

impl IntervalsElement {
    pub fn new(mut intervals: Vec<(Rational, Rational)>) -> Result<Self> {
        for (u, v) in &intervals {
            if v <= u {
                return Err(Error::DegenerateInterval(u.to_string(), v.to_string()));
            }
            if u.is_negative() || *v > Rational::one() {
                return Err(Error::Invalid(format!("[{u}, {v}] is not inside [0, 1]")));
            }
        }
        intervals.sort();
        for w in intervals.windows(2) {
            if w[0].1 > w[1].0 {
                return Err(Error::DisjointnessViolation(format!(
                    "[{}, {}] and [{}, {}] overlap",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        Ok(IntervalsElement { intervals })
    }

    pub fn unit() -> Self {
        IntervalsElement { intervals: vec![(Rational::zero(), Rational::one())] }
    }

    pub fn arity(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    /// The `2k` endpoints in increasing order.
    pub fn endpoints(&self) -> Vec<Rational> {
        self.intervals.iter().flat_map(|(u, v)| [u.clone(), v.clone()]).collect()
    }

    /// Rescales the intervals of `bs[i]` into the `i`-th interval of `self`.
    pub fn gamma(&self, bs: &[IntervalsElement]) -> Result<IntervalsElement> {
        if bs.len() != self.arity() {
            return Err(Error::IncompatibleInputs(format!("{} inputs for arity {}", bs.len(), self.arity())));
        }
        let mut out = Vec::new();
        for ((u, v), b) in self.intervals.iter().zip(bs) {
            let len = v - u;
            out.extend(b.intervals.iter().map(|(s, t)| (u + &len * s, u + &len * t)));
        }
        IntervalsElement::new(out)
    }

    /// Each `[u, v]` becomes the TD-map `t ↦ u + (v - u) t`, in increasing order.
    pub fn to_cubes(&self) -> CubesElement {
        let cubes = self.intervals.iter().map(|(u, v)| TDMap { a: vec![u.clone()], b: v - u }).collect();
        CubesElement { n: 1, cubes }
    }
}

pub fn intervals_to_cubes(a: &IntervalsElement) -> CubesElement {
    a.to_cubes()
}

/// An element `(a, σ)` of the operad generated by the little intervals:
/// arity `k` is `A(k) × Σ_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeneratedElement {
    pub intervals: IntervalsElement,
    pub sigma: Permutation,
}

impl GeneratedElement {
    pub fn new(intervals: IntervalsElement, sigma: Permutation) -> Result<Self> {
        if sigma.len() != intervals.arity() {
            return Err(Error::IncompatibleInputs(format!("permutation {sigma} on arity {}", intervals.arity())));
        }
        Ok(GeneratedElement { intervals, sigma })
    }

    pub fn unit() -> Self {
        GeneratedElement { intervals: IntervalsElement::unit(), sigma: Permutation::identity(1) }
    }

    pub fn arity(&self) -> usize {
        self.intervals.arity()
    }

    pub fn act(&self, tau: &Permutation) -> Result<GeneratedElement> {
        if tau.len() != self.arity() {
            return Err(Error::IncompatibleInputs(format!("permutation {tau} on arity {}", self.arity())));
        }
        Ok(GeneratedElement { intervals: self.intervals.clone(), sigma: self.sigma.compose(tau) })
    }

    /// `γ((a, σ); (b_1, τ_1), …)`: the inputs are fed to the intervals of
    /// `a` in the order `σ⁻¹`, and the permutations assemble into the block
    /// permutation of `σ` followed by `τ_1 ⊕ … ⊕ τ_k`.
    pub fn gamma(&self, bs: &[GeneratedElement]) -> Result<GeneratedElement> {
        let k = self.arity();
        if bs.len() != k {
            return Err(Error::IncompatibleInputs(format!("{} inputs for arity {k}", bs.len())));
        }
        let inv = self.sigma.inverse();
        let reordered: Vec<IntervalsElement> = (0..k).map(|m| bs[inv.apply(m)].intervals.clone()).collect();
        let sizes: Vec<usize> = reordered.iter().map(|b| b.arity()).collect();
        let taus: Vec<Permutation> = bs.iter().map(|b| b.sigma.clone()).collect();
        Ok(GeneratedElement {
            intervals: self.intervals.gamma(&reordered)?,
            sigma: self.sigma.block(&sizes).compose(&Permutation::sum(&taus)),
        })
    }

    pub fn to_cubes(&self) -> CubesElement {
        generated_operad_element(&self.intervals, &self.sigma).expect("arity checked on construction")
    }
}

/// The image of `(a, σ)` in `C_1`: the canonical increasing tuple acted on by `σ`.
pub fn generated_operad_element(a: &IntervalsElement, sigma: &Permutation) -> Result<CubesElement> {
    a.to_cubes().act(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn td(a: &[&str], b: &str) -> TDMap {
        TDMap::parse(a, b).unwrap()
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("0.55").unwrap(), rat(11, 20));
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("2").unwrap(), rat(2, 1));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        for s in ["", "1/0", "a", "1.", "0.5.5"] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn worked_composition() {
        let k = td(&["0.55", "0.55"], "0.4");
        let l = td(&["0.1", "0.3"], "0.25");
        assert_eq!(k.compose(&l), td(&["0.59", "0.67"], "0.1"));
    }

    #[test]
    fn td_map_bounds() {
        assert!(TDMap::parse(&["0.5"], "0.5").is_ok());
        assert!(TDMap::parse(&["0.6"], "0.5").is_err());
        assert!(TDMap::parse(&["-0.1"], "0.5").is_err());
        assert!(TDMap::parse(&["0"], "0").is_err());
    }

    #[test]
    fn units() {
        let c = CubesElement::new(2, vec![td(&["0", "0"], "1/2"), td(&["1/2", "0"], "1/3")]).unwrap();
        let u = CubesElement::unit(2);
        assert_eq!(u.gamma(&[c.clone()]).unwrap(), c);
        assert_eq!(c.gamma(&[u.clone(), u]).unwrap(), c);
    }

    #[test]
    fn overlapping_cubes_are_rejected() {
        let r = CubesElement::new(2, vec![td(&["0", "0"], "1/2"), td(&["1/4", "1/4"], "1/2")]);
        assert!(matches!(r, Err(Error::DisjointnessViolation(_))));
        // touching along an edge is allowed
        assert!(CubesElement::new(2, vec![td(&["0", "0"], "1/2"), td(&["1/2", "1/4"], "1/2")]).is_ok());
    }

    #[test]
    fn transposition_squares_to_identity() {
        let c = CubesElement::new(1, vec![td(&["0"], "1/3"), td(&["1/2"], "1/2")]).unwrap();
        let t = Permutation::transposition(2, 0, 1);
        assert_eq!(c.act(&Permutation::identity(2)).unwrap(), c);
        assert_ne!(c.act(&t).unwrap(), c);
        assert_eq!(c.act(&t).unwrap().act(&t).unwrap(), c);
    }

    #[test]
    fn intervals() {
        let half = IntervalsElement::new(vec![(rat(0, 1), rat(1, 2))]).unwrap();
        assert_eq!(half.to_cubes().cubes(), &[td(&["0"], "1/2")]);
        let empty = IntervalsElement::new(vec![]).unwrap();
        assert_eq!(empty.arity(), 0);
        assert_eq!(empty.to_cubes().arity(), 0);
        assert!(matches!(IntervalsElement::new(vec![(rat(1, 2), rat(1, 2))]), Err(Error::DegenerateInterval(..))));
        let two = IntervalsElement::new(vec![(rat(1, 2), rat(1, 1)), (rat(0, 1), rat(1, 3))]).unwrap();
        assert_eq!(two.endpoints(), vec![rat(0, 1), rat(1, 3), rat(1, 2), rat(1, 1)]);
        let swapped = generated_operad_element(&two, &Permutation::transposition(2, 0, 1)).unwrap();
        assert_eq!(swapped.cubes()[0], td(&["1/2"], "1/2"));
    }

    #[test]
    fn json_round_trip() {
        let c = CubesElement::new(2, vec![td(&["0.55", "0.55"], "0.4")]).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"n":2,"cubes":[{"a":["11/20","11/20"],"b":"2/5"}]}"#);
        assert_eq!(serde_json::from_str::<CubesElement>(&s).unwrap(), c);
        let bad = r#"{"n":1,"cubes":[{"a":["0"],"b":"1/2"},{"a":["1/4"],"b":"1/2"}]}"#;
        assert!(serde_json::from_str::<CubesElement>(bad).is_err());
    }
}
