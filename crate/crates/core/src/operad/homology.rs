use crate::boxprod::{symbol_complex, ComplexityBound};
use crate::error::{Error, Result};
use crate::exact::{homology, GradedIntComplex, Homology, IntMatrix, Truncation};
use serde::Serialize;
use std::collections::BTreeMap;

/// Homology of one arity over a degree window, computed at two truncations.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct HomologyReport {
    pub bound: String,
    pub k: usize,
    pub degrees: (i64, i64),
    pub qmax: usize,
    /// Cosimplicial levels kept at `qmax` and at `qmax + 1`.
    pub levels: (usize, usize),
    pub groups: BTreeMap<i64, Homology>,
}

impl HomologyReport {
    pub fn betti(&self) -> Vec<usize> {
        self.groups.values().map(|h| h.betti).collect()
    }

    pub fn torsion_free(&self) -> bool {
        self.groups.values().all(|h| h.torsion.is_empty())
    }
}

fn homology_at(n: ComplexityBound, k: usize, lo: i64, hi: i64, levels: usize) -> Result<BTreeMap<i64, Homology>> {
    let c = symbol_complex(k, n, lo, hi, levels)?.graded()?;
    (lo..=hi).map(|p| Ok((p, homology(&c, p)?))).collect()
}

/// Homology of `T_n(k)` in degrees `lo..=hi`. Symbols of source size up to
/// `qmax + 1` are kept in the top degree of the computation; the result is
/// returned only when keeping one more cosimplicial level changes nothing.
pub fn operad_homology(n: ComplexityBound, k: usize, lo: i64, hi: i64, qmax: usize) -> Result<HomologyReport> {
    let levels = qmax as i64 - hi - k as i64;
    if levels < 0 {
        return Err(Error::WindowTooSmall(format!("qmax {qmax} cannot reach degree {} in arity {k}", hi + 1)));
    }
    let levels = levels as usize;
    let a = homology_at(n, k, lo, hi, levels)?;
    let b = homology_at(n, k, lo, hi, levels + 1)?;
    if a != b {
        return Err(Error::NotStabilized(format!("levels {levels}: {a:?}; levels {}: {b:?}", levels + 1)));
    }
    Ok(HomologyReport { bound: n.to_string(), k, degrees: (lo, hi), qmax, levels: (levels, levels + 1), groups: a })
}

/// Operad homology next to the homology of a cellular model of the
/// configuration space of `k` little `n`-cubes.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CubesComparison {
    pub n: usize,
    pub k: usize,
    pub operad: HomologyReport,
    pub model: BTreeMap<i64, Homology>,
    pub matches: bool,
}

/// Cellular models: `k = 1` a point; `n = 1, k = 2` two points; `n = 2, k = 2`
/// a circle with one vertex and one edge.
fn cellular_model(n: usize, k: usize) -> Result<GradedIntComplex> {
    let cells: Vec<Vec<&str>> = match (n, k) {
        (1 | 2, 1) => vec![vec!["pt"]],
        (1, 2) => vec![vec!["12", "21"]],
        (2, 2) => vec![vec!["v"], vec!["e"]],
        _ => return Err(Error::UnsupportedInstance(format!("no cellular model for n = {n}, k = {k}"))),
    };
    let mut basis = BTreeMap::new();
    let mut diff = BTreeMap::new();
    for (d, c) in cells.iter().enumerate() {
        basis.insert(d as i64, c.iter().map(|s| s.to_string()).collect());
        if d > 0 {
            diff.insert(d as i64, IntMatrix::zeros(cells[d - 1].len(), c.len()));
        }
    }
    GradedIntComplex::new(basis, diff, Truncation::Complete)
}

pub fn little_cubes_comparison(n: usize, k: usize, lo: i64, hi: i64, qmax: usize) -> Result<CubesComparison> {
    let model = cellular_model(n, k)?;
    let operad = operad_homology(ComplexityBound::finite(n)?, k, lo, hi, qmax)?;
    let model: BTreeMap<i64, Homology> = (lo..=hi).map(|p| Ok((p, homology(&model, p)?))).collect::<Result<_>>()?;
    let matches = model == operad.groups;
    Ok(CubesComparison { n, k, operad, model, matches })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arity_one_is_contractible() {
        let h = operad_homology(ComplexityBound::Unbounded, 1, 0, 3, 7).unwrap();
        assert_eq!(h.betti(), vec![1, 0, 0, 0]);
        assert!(h.torsion_free());
    }

    #[test]
    fn small_qmax_is_rejected() {
        assert!(matches!(operad_homology(ComplexityBound::Unbounded, 2, 0, 2, 3), Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn unsupported_comparison() {
        assert!(matches!(little_cubes_comparison(3, 2, 0, 1, 6), Err(Error::UnsupportedInstance(_))));
    }
}
