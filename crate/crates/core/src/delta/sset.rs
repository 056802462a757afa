use super::{codegeneracy, coface, factor_epi_mono, OrderedMap};
use crate::error::{Error, Result};
use crate::exact::{GradedIntComplex, IntMatrix, Truncation};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;

/// A simplex in normal form `η^*(y)`: a nondegenerate simplex `y` (by index)
/// pulled back along a surjection `η: [n] -> [dim y]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex {
    pub nd: usize,
    pub degen: OrderedMap,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.degen.source().size - 1
    }

    pub fn is_degenerate(&self) -> bool {
        !self.degen.is_identity()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonDegenerate {
    pub name: String,
    pub dim: usize,
    /// `d_0, ..., d_dim` (empty in dimension 0).
    pub faces: Vec<Simplex>,
}

/// A simplicial set with finitely many nondegenerate simplices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSimplicialSet {
    simplices: Vec<NonDegenerate>,
}

/// JSON form: nondegenerate simplices in any order; each face names a
/// simplex and optionally a degeneracy (a surjection onto its dimension, by
/// values). Faces must be listed for every simplex of positive dimension.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimplicialSetSpec {
    pub simplices: Vec<SimplexSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimplexSpec {
    pub name: String,
    pub dim: usize,
    #[serde(default)]
    pub faces: Vec<FaceSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FaceSpec {
    pub simplex: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degeneracy: Option<Vec<usize>>,
}

impl FiniteSimplicialSet {
    /// Builds and verifies `d_i d_j = d_{j-1} d_i` for `i < j` on every
    /// nondegenerate generator.
    pub fn new(simplices: Vec<NonDegenerate>) -> Result<Self> {
        for (k, s) in simplices.iter().enumerate() {
            let expected = if s.dim == 0 { 0 } else { s.dim + 1 };
            if s.faces.len() != expected {
                return Err(Error::Invalid(format!("simplex {} needs {expected} faces", s.name)));
            }
            for f in &s.faces {
                if f.nd >= simplices.len() {
                    return Err(Error::Invalid(format!("face of {} references a missing simplex", s.name)));
                }
                let target_dim = simplices[f.nd].dim;
                if f.degen.source().size != s.dim || f.degen.target().size != target_dim + 1 || !f.degen.is_surjective()
                {
                    return Err(Error::Invalid(format!("face of {} has a malformed degeneracy", s.name)));
                }
                if f.nd == k {
                    return Err(Error::Invalid(format!("simplex {} is its own face", s.name)));
                }
            }
        }
        let w = FiniteSimplicialSet { simplices };
        for y in 0..w.simplices.len() {
            let d = w.simplices[y].dim;
            if d < 2 {
                continue;
            }
            for j in 0..=d {
                for i in 0..j {
                    let a = w.pullback(&w.simplices[y].faces[j], &coface(d - 2, i)?);
                    let b = w.pullback(&w.simplices[y].faces[i], &coface(d - 2, j - 1)?);
                    if a != b {
                        return Err(Error::Invalid(format!(
                            "simplicial identity d_{i} d_{j} fails on {}",
                            w.simplices[y].name
                        )));
                    }
                }
            }
        }
        Ok(w)
    }

    pub fn from_spec(spec: &SimplicialSetSpec) -> Result<Self> {
        let index: HashMap<&str, usize> =
            spec.simplices.iter().enumerate().map(|(i, s)| (s.name.as_str(), i)).collect();
        if index.len() != spec.simplices.len() {
            return Err(Error::Invalid("duplicate simplex name".into()));
        }
        let mut out = Vec::new();
        for s in &spec.simplices {
            let mut faces = Vec::new();
            for f in &s.faces {
                let nd = *index.get(f.simplex.as_str()).ok_or_else(|| Error::Invalid(format!("unknown simplex {}", f.simplex)))?;
                let tdim = spec.simplices[nd].dim;
                let values = f.degeneracy.clone().unwrap_or_else(|| (0..s.dim).collect());
                let degen = OrderedMap::new(super::FinOrd::new(s.dim), super::FinOrd::level(tdim), values)?;
                faces.push(Simplex { nd, degen });
            }
            out.push(NonDegenerate { name: s.name.clone(), dim: s.dim, faces });
        }
        Self::new(out)
    }

    pub fn to_spec(&self) -> SimplicialSetSpec {
        SimplicialSetSpec {
            simplices: self
                .simplices
                .iter()
                .map(|s| SimplexSpec {
                    name: s.name.clone(),
                    dim: s.dim,
                    faces: s
                        .faces
                        .iter()
                        .map(|f| FaceSpec {
                            simplex: self.simplices[f.nd].name.clone(),
                            degeneracy: if f.degen.is_identity() { None } else { Some(f.degen.values().to_vec()) },
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SimplicialSetSpec = serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
        Self::from_spec(&spec)
    }

    pub fn nondegenerate(&self) -> &[NonDegenerate] {
        &self.simplices
    }

    pub fn num_nondegenerate(&self) -> usize {
        self.simplices.len()
    }

    pub fn max_dim(&self) -> usize {
        self.simplices.iter().map(|s| s.dim).max().unwrap_or(0)
    }

    pub fn nondegenerate_of_dim(&self, m: usize) -> Vec<usize> {
        (0..self.simplices.len()).filter(|&i| self.simplices[i].dim == m).collect()
    }

    pub fn name(&self, nd: usize) -> &str {
        &self.simplices[nd].name
    }

    pub fn simplex_label(&self, s: &Simplex) -> String {
        if s.is_degenerate() {
            format!("{}{}", self.simplices[s.nd].name, s.degen)
        } else {
            self.simplices[s.nd].name.clone()
        }
    }

    pub fn nondegenerate_simplex(&self, nd: usize) -> Simplex {
        Simplex { nd, degen: OrderedMap::identity(self.simplices[nd].dim + 1) }
    }

    /// `θ^*(x)` for `θ: [a] -> [dim x]`, in normal form.
    pub fn pullback(&self, x: &Simplex, theta: &OrderedMap) -> Simplex {
        assert_eq!(theta.target().size, x.dim() + 1, "pullback along a map with the wrong target");
        let comp = x.degen.compose(theta);
        let (epi, mono) = factor_epi_mono(&comp);
        let face = self.face_along(x.nd, &mono);
        Simplex { nd: face.nd, degen: face.degen.compose(&epi) }
    }

    /// `μ^*(y)` for an injection `μ` into `[dim y]`.
    fn face_along(&self, y: usize, mu: &OrderedMap) -> Simplex {
        if mu.is_identity() {
            return self.nondegenerate_simplex(y);
        }
        let d = self.simplices[y].dim;
        let vals = mu.values();
        // largest vertex missing from the image
        let i = (0..=d).rev().find(|v| vals.binary_search(v).is_err()).expect("proper injection misses a vertex");
        let rest = OrderedMap::from_parts(d, vals.iter().map(|&v| if v < i { v } else { v - 1 }).collect());
        self.pullback(&self.simplices[y].faces[i], &rest)
    }

    pub fn face(&self, x: &Simplex, i: usize) -> Simplex {
        let n = x.dim();
        self.pullback(x, &coface(n - 1, i).expect("face index in range"))
    }

    pub fn degeneracy(&self, x: &Simplex, i: usize) -> Simplex {
        let n = x.dim();
        self.pullback(x, &codegeneracy(n + 1, i).expect("degeneracy index in range"))
    }

    /// Every `m`-simplex (degenerate ones included) in a fixed order.
    pub fn all_simplices(&self, m: usize) -> Vec<Simplex> {
        let mut out = Vec::new();
        for (nd, s) in self.simplices.iter().enumerate() {
            if s.dim > m {
                continue;
            }
            for eta in OrderedMap::all_surjections(m + 1, s.dim + 1) {
                out.push(Simplex { nd, degen: eta });
            }
        }
        out
    }

    /// Normalized cochains, stored with cochain degree `m` in homological
    /// degree `-m`.
    pub fn cochains(&self) -> GradedIntComplex {
        let top = self.max_dim();
        let mut basis = BTreeMap::new();
        let mut pos: HashMap<usize, usize> = HashMap::new();
        for m in 0..=top {
            let nds = self.nondegenerate_of_dim(m);
            for (k, &y) in nds.iter().enumerate() {
                pos.insert(y, k);
            }
            basis.insert(-(m as i64), nds.iter().map(|&y| format!("{}*", self.simplices[y].name)).collect::<Vec<_>>());
        }
        let mut diff = BTreeMap::new();
        for m in 0..top {
            let src = self.nondegenerate_of_dim(m);
            let tgt = self.nondegenerate_of_dim(m + 1);
            let mut trips = Vec::new();
            for (r, &sigma) in tgt.iter().enumerate() {
                for (i, f) in self.simplices[sigma].faces.iter().enumerate() {
                    if f.is_degenerate() {
                        continue;
                    }
                    trips.push((r, pos[&f.nd], if i % 2 == 0 { 1 } else { -1 }));
                }
            }
            diff.insert(-(m as i64), IntMatrix::from_i64_triplets(tgt.len(), src.len(), trips));
        }
        GradedIntComplex::new(basis, diff, Truncation::Complete)
            .expect("cochains form a complex")
            .with_regrading("cochain degree m stored at homological degree -m")
    }

    // ----- builders -----

    pub fn point() -> Self {
        Self::new(vec![NonDegenerate { name: "v".into(), dim: 0, faces: vec![] }]).expect("point")
    }

    /// The standard `n`-simplex; simplices are named by their vertex lists.
    pub fn standard_simplex(n: usize) -> Self {
        let all: Vec<Vec<usize>> = (1..=n + 1)
            .flat_map(|k| OrderedMap::all_injections(k, n + 1).into_iter().map(|m| m.values().to_vec()))
            .collect();
        Self::from_faces(&all)
    }

    /// A simplicial complex given by a downward-closed family of vertex sets
    /// (each sorted). Missing faces are added.
    pub fn from_faces(sets: &[Vec<usize>]) -> Self {
        let mut family: Vec<Vec<usize>> = Vec::new();
        for s in sets {
            let k = s.len();
            for mask in 1u32..(1 << k) {
                let sub: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| s[b]).collect();
                family.push(sub);
            }
        }
        family.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        family.dedup();
        let index: HashMap<Vec<usize>, usize> = family.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let simplices = family
            .iter()
            .map(|s| {
                let dim = s.len() - 1;
                let faces = if dim == 0 {
                    vec![]
                } else {
                    (0..s.len())
                        .map(|i| {
                            let mut f = s.clone();
                            f.remove(i);
                            Simplex { nd: index[&f], degen: OrderedMap::identity(dim) }
                        })
                        .collect()
                };
                let name: Vec<String> = s.iter().map(|v| v.to_string()).collect();
                NonDegenerate { name: name.join(""), dim, faces }
            })
            .collect();
        Self::new(simplices).expect("simplicial complexes satisfy the identities")
    }

    /// One vertex and one edge whose two faces are that vertex.
    pub fn circle() -> Self {
        let v = Simplex { nd: 0, degen: OrderedMap::identity(1) };
        Self::new(vec![
            NonDegenerate { name: "v".into(), dim: 0, faces: vec![] },
            NonDegenerate { name: "e".into(), dim: 1, faces: vec![v.clone(), v] },
        ])
        .expect("circle")
    }

    /// `Δ^n / ∂Δ^n` for `n ≥ 1`: one vertex and one `n`-simplex whose faces
    /// are all degenerate on the vertex.
    pub fn sphere(n: usize) -> Self {
        assert!(n >= 1);
        let f = Simplex { nd: 0, degen: OrderedMap::from_parts(1, vec![0; n]) };
        Self::new(vec![
            NonDegenerate { name: "v".into(), dim: 0, faces: vec![] },
            NonDegenerate { name: format!("s{n}"), dim: n, faces: vec![f; n + 1] },
        ])
        .expect("sphere")
    }

    /// Disjoint union.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        let off = self.simplices.len();
        let mut s = self.simplices.clone();
        let taken: std::collections::HashSet<&str> = self.simplices.iter().map(|t| t.name.as_str()).collect();
        let mut mark = String::from("'");
        while other.simplices.iter().any(|t| taken.contains(format!("{}{mark}", t.name).as_str())) {
            mark.push('\'');
        }
        for t in &other.simplices {
            s.push(NonDegenerate {
                name: format!("{}{mark}", t.name),
                dim: t.dim,
                faces: t.faces.iter().map(|f| Simplex { nd: f.nd + off, degen: f.degen.clone() }).collect(),
            });
        }
        Self::new(s).expect("disjoint union")
    }
}

impl fmt::Display for FiniteSimplicialSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let counts: Vec<String> =
            (0..=self.max_dim()).map(|m| self.nondegenerate_of_dim(m).len().to_string()).collect();
        write!(f, "simplicial set with nondegenerate counts ({})", counts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::homology;

    #[test]
    fn simplex_counts() {
        let d2 = FiniteSimplicialSet::standard_simplex(2);
        assert_eq!(d2.num_nondegenerate(), 7);
        // m-simplices of Δ^2 are order-preserving maps [m] -> [2]
        for m in 0..5 {
            assert_eq!(d2.all_simplices(m).len(), OrderedMap::all(m + 1, 3).len());
        }
    }

    #[test]
    fn faces_of_degenerate_simplices() {
        let c = FiniteSimplicialSet::circle();
        let e = c.nondegenerate_simplex(1);
        let s0e = c.degeneracy(&e, 0);
        assert_eq!(s0e.dim(), 2);
        // d_0 s_0 = d_1 s_0 = id
        assert_eq!(c.face(&s0e, 0), e);
        assert_eq!(c.face(&s0e, 1), e);
        assert!(c.face(&s0e, 2).is_degenerate());
    }

    #[test]
    fn cochain_examples() {
        let d1 = FiniteSimplicialSet::standard_simplex(1).cochains();
        assert_eq!((d1.rank(0), d1.rank(-1)), (2, 1));
        assert_eq!(FiniteSimplicialSet::point().cochains().rank(0), 1);
        let c = FiniteSimplicialSet::circle().cochains();
        assert!(c.differential(0).is_zero());
        assert_eq!(homology(&c, 0).unwrap().betti, 1);
        assert_eq!(homology(&c, -1).unwrap().betti, 1);
        let s2 = FiniteSimplicialSet::sphere(2).cochains();
        assert_eq!(homology(&s2, -2).unwrap().betti, 1);
        assert_eq!(homology(&s2, -1).unwrap().betti, 0);
    }

    #[test]
    fn json_round_trip() {
        let w = FiniteSimplicialSet::sphere(2).disjoint_union(&FiniteSimplicialSet::standard_simplex(1));
        let text = serde_json::to_string(&w.to_spec()).unwrap();
        assert_eq!(FiniteSimplicialSet::from_json(&text).unwrap(), w);
    }

    #[test]
    fn repeated_unions_keep_names_distinct() {
        let p = FiniteSimplicialSet::point();
        let w = p.disjoint_union(&p).disjoint_union(&p);
        let text = serde_json::to_string(&w.to_spec()).unwrap();
        assert_eq!(FiniteSimplicialSet::from_json(&text).unwrap(), w);
        assert_eq!(w.nondegenerate_of_dim(0).len(), 3);
    }

    #[test]
    fn identities_enforced() {
        // an edge and a triangle whose faces do not fit together
        let bad = r#"{"simplices":[
            {"name":"a","dim":0},{"name":"b","dim":0},
            {"name":"x","dim":1,"faces":[{"simplex":"b"},{"simplex":"a"}]},
            {"name":"t","dim":2,"faces":[{"simplex":"x"},{"simplex":"x"},{"simplex":"x"}]}]}"#;
        assert!(FiniteSimplicialSet::from_json(bad).is_err());
        let restrict = r#"{"simplices":[{"name":"v","dim":0},{"name":"e","dim":1,"faces":[{"simplex":"v"},{"simplex":"v"}]}]}"#;
        assert_eq!(FiniteSimplicialSet::from_json(restrict).unwrap(), FiniteSimplicialSet::circle());
    }
}
