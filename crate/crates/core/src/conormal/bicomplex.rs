use super::{cokernel_form, kernel_form, sign, CosimplicialAbGroup};
use crate::delta::OrderedMap;
use crate::error::{Error, Result};
use crate::exact::{GradedIntComplex, IntMatrix, Truncation};
use num_bigint::BigInt;
use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

/// Which conormalization to apply levelwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    Kernel,
    Cokernel,
}

/// A cosimplicial chain complex: for each internal degree `m` a cosimplicial
/// group `B_m^•`, and internal differentials `B_m^r -> B_{m-1}^r` commuting
/// with every cosimplicial operator.
#[derive(Clone, Debug)]
pub struct CosimplicialChainComplex {
    mlo: i64,
    groups: Vec<CosimplicialAbGroup>,
    /// `internal[k][r]` for internal degree `mlo + k`, mapping to degree `mlo + k - 1`; empty for `k = 0`.
    internal: Vec<Vec<IntMatrix>>,
    /// Whether the groups outside the stored internal degrees are zero.
    zero_outside: bool,
}

impl CosimplicialChainComplex {
    pub fn new(
        mlo: i64,
        groups: Vec<CosimplicialAbGroup>,
        internal: Vec<Vec<IntMatrix>>,
        zero_outside: bool,
    ) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::Invalid("no internal degrees".into()));
        }
        let top = groups[0].top();
        if groups.iter().any(|g| g.top() != top) || internal.len() != groups.len() {
            return Err(Error::Invalid("inconsistent level windows".into()));
        }
        for k in 1..groups.len() {
            if internal[k].len() != top + 1 {
                return Err(Error::Invalid("internal differential missing a level".into()));
            }
            let (src, tgt) = (&groups[k], &groups[k - 1]);
            for r in 0..=top {
                let d = &internal[k][r];
                if d.rows() != tgt.rank(r) || d.cols() != src.rank(r) {
                    return Err(Error::Invalid(format!("internal differential shape at level {r}")));
                }
                if k >= 2 && !internal[k - 1][r].mul(d).is_zero() {
                    return Err(Error::Invalid(format!("internal d∘d ≠ 0 at level {r}")));
                }
            }
            for r in 0..top {
                for i in 0..=r + 1 {
                    if internal[k][r + 1].mul(src.coface(r, i)) != tgt.coface(r, i).mul(&internal[k][r]) {
                        return Err(Error::Invalid(format!("d^{i} is not a chain map at level {r}")));
                    }
                }
            }
            for r in 1..=top {
                for i in 0..r {
                    if internal[k][r - 1].mul(src.codegeneracy(r, i)) != tgt.codegeneracy(r, i).mul(&internal[k][r]) {
                        return Err(Error::Invalid(format!("s^{i} is not a chain map at level {r}")));
                    }
                }
            }
        }
        Ok(CosimplicialChainComplex { mlo, groups, internal, zero_outside })
    }

    /// Build from basis keys per (internal degree, level), a cosimplicial
    /// action on keys, and an internal differential on keys.
    pub fn from_action<K, A, D>(
        mlo: i64,
        keys: Vec<Vec<Vec<K>>>,
        label: impl Fn(&K) -> String + Copy,
        act: A,
        boundary: D,
        zero_outside: bool,
    ) -> Result<Self>
    where
        K: Clone + Eq + Hash,
        A: Fn(&OrderedMap, &K) -> Vec<(K, i64)> + Copy,
        D: Fn(&K) -> Vec<(K, i64)>,
    {
        let mut groups = Vec::new();
        for levels in &keys {
            groups.push(CosimplicialAbGroup::from_action(levels.clone(), label, act)?);
        }
        let mut internal = vec![Vec::new()];
        for k in 1..keys.len() {
            let mut per_level = Vec::new();
            for r in 0..keys[k].len() {
                let idx: HashMap<&K, usize> = keys[k - 1][r].iter().enumerate().map(|(i, x)| (x, i)).collect();
                let mut trips = Vec::new();
                for (c, key) in keys[k][r].iter().enumerate() {
                    for (img, coef) in boundary(key) {
                        let row = *idx.get(&img).ok_or_else(|| Error::Invalid("boundary leaves the basis".into()))?;
                        trips.push((row, c, coef));
                    }
                }
                per_level.push(IntMatrix::from_i64_triplets(keys[k - 1][r].len(), keys[k][r].len(), trips));
            }
            internal.push(per_level);
        }
        Self::new(mlo, groups, internal, zero_outside)
    }

    /// The cosimplicial chain complex `r ↦ N_*(Δ^r)` for levels `0..=top`.
    pub fn standard_simplices(top: usize) -> Self {
        let keys: Vec<Vec<Vec<Vec<usize>>>> = (0..=top)
            .map(|m| {
                (0..=top)
                    .map(|r| OrderedMap::all_injections(m + 1, r + 1).into_iter().map(|f| f.values().to_vec()).collect())
                    .collect()
            })
            .collect();
        let label = |v: &Vec<usize>| format!("{v:?}");
        let act = |theta: &OrderedMap, v: &Vec<usize>| {
            let img: Vec<usize> = v.iter().map(|&x| theta.apply(x)).collect();
            if img.windows(2).all(|w| w[0] < w[1]) {
                vec![(img, 1)]
            } else {
                vec![]
            }
        };
        let boundary = |v: &Vec<usize>| {
            (0..v.len())
                .filter(|_| v.len() > 1)
                .map(|i| {
                    let mut f = v.clone();
                    f.remove(i);
                    (f, if i % 2 == 0 { 1 } else { -1 })
                })
                .collect()
        };
        Self::from_action(0, keys, label, act, boundary, true).expect("standard simplices")
    }

    pub fn internal_range(&self) -> (i64, i64) {
        (self.mlo, self.mlo + self.groups.len() as i64 - 1)
    }

    pub fn top_level(&self) -> usize {
        self.groups[0].top()
    }

    pub fn group(&self, m: i64) -> Option<&CosimplicialAbGroup> {
        let k = m - self.mlo;
        if k < 0 {
            return None;
        }
        self.groups.get(k as usize)
    }

    fn internal_matrix(&self, m: i64, r: usize) -> Option<&IntMatrix> {
        let k = m - self.mlo;
        if k <= 0 {
            return None;
        }
        self.internal.get(k as usize).map(|v| &v[r])
    }
}

/// Conormalized level data for one internal degree.
struct Levelwise {
    labels: Vec<Vec<String>>,
    cosimplicial: Vec<IntMatrix>,
    /// Maps a vector of `B_m^r` in the conormalized subgroup (kernel form) or
    /// any vector (cokernel form) to conormalized coordinates.
    to_coords: Box<dyn Fn(usize, &[(usize, BigInt)]) -> Result<Vec<(usize, BigInt)>>>,
    /// Lifts conormalized coordinates back to `B_m^r`.
    lifts: Vec<IntMatrix>,
}

fn levelwise(a: &CosimplicialAbGroup, form: Form) -> Result<Levelwise> {
    let top = a.top();
    match form {
        Form::Cokernel => {
            let cf = cokernel_form(a)?;
            let labels = (0..=top).map(|r| cf.complex.labels(-(r as i64)).to_vec()).collect();
            let cosimplicial = (0..top).map(|r| cf.complex.differential(-(r as i64))).collect();
            let lifts = cf.quotients.iter().map(|q| q.section.clone()).collect();
            let projections: Vec<IntMatrix> = cf.quotients.iter().map(|q| q.projection.clone()).collect();
            Ok(Levelwise {
                labels,
                cosimplicial,
                to_coords: Box::new(move |r, v| Ok(projections[r].apply_sparse(v))),
                lifts,
            })
        }
        Form::Kernel => {
            let kf = kernel_form(a)?;
            let labels = (0..=top).map(|r| kf.complex.labels(-(r as i64)).to_vec()).collect();
            let cosimplicial = (0..top).map(|r| kf.complex.differential(-(r as i64))).collect();
            let lifts = kf.basis.clone();
            Ok(Levelwise {
                labels,
                cosimplicial,
                to_coords: Box::new(move |r, v| kf.coordinates(r, v).ok_or(Error::NonSplitKernel(-(r as i64)))),
                lifts,
            })
        }
    }
}

/// Total complex of the levelwise conormalization, keeping cosimplicial
/// levels `0..=levels`. A generator at level `r` and internal degree `m` has
/// degree `m - r`; the differential is `∂_int + (-1)^{m-r+1} δ`.
/// The result covers degrees `lo-1..=hi+1` so homology is available on `lo..=hi`.
pub fn conormalize_bicomplex(
    b: &CosimplicialChainComplex,
    form: Form,
    levels: usize,
    lo: i64,
    hi: i64,
) -> Result<GradedIntComplex> {
    if levels > b.top_level() {
        return Err(Error::WindowTooSmall(format!("{levels} levels requested, {} available", b.top_level())));
    }
    let (mlo, mhi) = b.internal_range();
    let plo = lo - 1;
    let phi = hi + 1;
    for p in plo..=phi {
        for r in 0..=levels as i64 {
            let m = p + r;
            if (m < mlo || m > mhi) && !b.zero_outside {
                return Err(Error::WindowTooSmall(format!("degree {p} needs internal degree {m}")));
            }
        }
    }
    let truncated: BTreeMap<i64, CosimplicialAbGroup> = (mlo..=mhi)
        .filter(|m| (plo..=phi).any(|p| m - p >= 0 && m - p <= levels as i64))
        .map(|m| (m, b.group(m).expect("in range").truncate(levels)))
        .collect();
    let mut lw: BTreeMap<i64, Levelwise> = BTreeMap::new();
    for (&m, g) in &truncated {
        lw.insert(m, levelwise(g, form)?);
    }
    // offsets of (m, r) blocks inside each total degree
    let mut basis: BTreeMap<i64, Vec<String>> = BTreeMap::new();
    let mut offset: HashMap<(i64, usize), usize> = HashMap::new();
    for p in plo..=phi {
        let mut labels = Vec::new();
        for r in 0..=levels {
            let m = p + r as i64;
            if let Some(l) = lw.get(&m) {
                offset.insert((m, r), labels.len());
                labels.extend(l.labels[r].iter().map(|x| format!("r{r}|{x}")));
            }
        }
        basis.insert(p, labels);
    }
    let mut diff = BTreeMap::new();
    for p in plo + 1..=phi {
        let mut trips: Vec<(usize, usize, BigInt)> = Vec::new();
        for r in 0..=levels {
            let m = p + r as i64;
            let Some(src) = lw.get(&m) else { continue };
            let off = offset[&(m, r)];
            // cosimplicial part
            if r < levels {
                let eps = sign(m - r as i64 + 1);
                let toff = offset[&(m, r + 1)];
                for (c, col) in src.cosimplicial[r].columns().iter().enumerate() {
                    for (i, v) in col {
                        trips.push((toff + i, off + c, &eps * v));
                    }
                }
            }
            // internal part
            if let (Some(tgt), Some(d)) = (lw.get(&(m - 1)), b.internal_matrix(m, r)) {
                let toff = offset[&(m - 1, r)];
                for c in 0..src.labels[r].len() {
                    let img = d.apply_sparse(src.lifts[r].col(c));
                    for (i, v) in (tgt.to_coords)(r, &img)? {
                        trips.push((toff + i, off + c, v));
                    }
                }
            }
        }
        let rows = basis[&(p - 1)].len();
        let cols = basis[&p].len();
        diff.insert(p, IntMatrix::from_triplets(rows, cols, trips));
    }
    GradedIntComplex::new(basis, diff, Truncation::Window { lo: plo, hi: phi })
}

impl CosimplicialAbGroup {
    /// Restriction to levels `0..=top`.
    pub fn truncate(&self, top: usize) -> CosimplicialAbGroup {
        assert!(top <= self.top());
        CosimplicialAbGroup {
            labels: self.labels[..=top].to_vec(),
            cofaces: self.cofaces[..top].to_vec(),
            codegeneracies: self.codegeneracies[..=top].to_vec(),
            augmentation: self.augmentation.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::homology;

    #[test]
    fn standard_bicomplex_is_contractible() {
        let b = CosimplicialChainComplex::standard_simplices(7);
        for form in [Form::Cokernel, Form::Kernel] {
            for levels in 4..=6 {
                let c = conormalize_bicomplex(&b, form, levels, -2, 2).unwrap();
                for p in -2..=2 {
                    let h = homology(&c, p).unwrap();
                    assert_eq!(h.betti, usize::from(p == 0), "form {form:?}, levels {levels}, degree {p}");
                    assert!(h.torsion.is_empty());
                }
            }
        }
    }

    #[test]
    fn internal_degree_zero_only() {
        // constant Z in internal degree 0: total complex is the conormalization regraded
        let g = CosimplicialAbGroup::constant(3);
        let b = CosimplicialChainComplex::new(0, vec![g], vec![Vec::new()], true).unwrap();
        let c = conormalize_bicomplex(&b, Form::Cokernel, 3, -2, 1).unwrap();
        assert_eq!((c.rank(0), c.rank(-1), c.rank(-2)), (1, 0, 0));
    }

    #[test]
    fn window_too_small() {
        let g = CosimplicialAbGroup::constant(2);
        let b = CosimplicialChainComplex::new(0, vec![g], vec![Vec::new()], false).unwrap();
        assert!(matches!(conormalize_bicomplex(&b, Form::Cokernel, 2, 0, 0), Err(Error::WindowTooSmall(_))));
    }
}
