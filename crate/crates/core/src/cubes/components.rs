use crate::error::{Error, Result};
use num_rational::Ratio;
use serde::Serialize;

const MAX_SAMPLES: usize = 50_000;

/// Path components of a sampled configuration space. This is a heuristic:
/// it counts components of a graph on grid samples, not of `C_n(k)` itself.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ComponentCount {
    pub n: usize,
    pub k: usize,
    pub resolution: usize,
    pub samples: usize,
    pub components: usize,
    pub refined_resolution: usize,
    pub refined_components: usize,
    pub heuristic: bool,
}

/// A cube with integer corner `a` and side `b` in units of `1/resolution`.
#[derive(Clone, Debug)]
struct GridCube {
    a: Vec<i64>,
    b: i64,
}

fn grid_cubes(n: usize, r: i64) -> Vec<GridCube> {
    let mut out = Vec::new();
    for b in 1..=r {
        let mut a = vec![0i64; n];
        loop {
            out.push(GridCube { a: a.clone(), b });
            let Some(i) = a.iter().rposition(|&x| x + b < r) else { break };
            a[i] += 1;
            a[i + 1..].fill(0);
        }
    }
    out
}

fn separated(x: &GridCube, y: &GridCube) -> bool {
    x.a.iter().zip(&y.a).any(|(p, q)| p + x.b <= *q || q + y.b <= *p)
}

fn samples(n: usize, k: usize, r: i64) -> Result<Vec<Vec<usize>>> {
    let cubes = grid_cubes(n, r);
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn extend(cubes: &[GridCube], k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) -> bool {
        if cur.len() == k {
            out.push(cur.clone());
            return out.len() <= MAX_SAMPLES;
        }
        for i in 0..cubes.len() {
            if cur.iter().all(|&j| separated(&cubes[i], &cubes[j])) {
                cur.push(i);
                if !extend(cubes, k, cur, out) {
                    return false;
                }
                cur.pop();
            }
        }
        true
    }
    if !extend(&cubes, k, &mut cur, &mut out) {
        return Err(Error::InfeasibleSize(format!(
            "more than {MAX_SAMPLES} samples for n = {n}, k = {k} at resolution {r}"
        )));
    }
    Ok(out)
}

/// Whether `g_0 + (g_1 - g_0) t ≥ 0` on a subinterval of `[0, 1]`, returned
/// as its closed endpoints.
fn nonnegative_on(g0: i64, g1: i64) -> Option<(Ratio<i64>, Ratio<i64>)> {
    let (zero, one) = (Ratio::from_integer(0), Ratio::from_integer(1));
    let slope = g1 - g0;
    if slope == 0 {
        return (g0 >= 0).then_some((zero, one));
    }
    let root = Ratio::new(-g0, slope);
    let (lo, hi) = if slope > 0 { (root.max(zero), one) } else { (zero, root.min(one)) };
    (lo <= hi).then_some((lo, hi))
}

/// Whether the straight line from `x` to `y` stays inside the configuration
/// space. Bounds are convex, so only the pairwise separation can fail; each
/// way of separating two cubes holds on a closed interval of times, and the
/// segment is valid when these intervals cover `[0, 1]`.
fn segment_valid(cubes: &[GridCube], x: &[usize], y: &[usize]) -> bool {
    let k = x.len();
    for i in 0..k {
        for j in i + 1..k {
            let (xi, xj, yi, yj) = (&cubes[x[i]], &cubes[x[j]], &cubes[y[i]], &cubes[y[j]]);
            let mut spans = Vec::new();
            for c in 0..xi.a.len() {
                spans.extend(nonnegative_on(xj.a[c] - xi.a[c] - xi.b, yj.a[c] - yi.a[c] - yi.b));
                spans.extend(nonnegative_on(xi.a[c] - xj.a[c] - xj.b, yi.a[c] - yj.a[c] - yj.b));
            }
            spans.sort();
            let mut reach = Ratio::from_integer(0);
            for (lo, hi) in spans {
                if lo > reach {
                    break;
                }
                reach = reach.max(hi);
            }
            if reach < Ratio::from_integer(1) {
                return false;
            }
        }
    }
    true
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn components_at(n: usize, k: usize, r: usize) -> Result<(usize, usize)> {
    let r = r as i64;
    let cubes = grid_cubes(n, r);
    let pts = samples(n, k, r)?;
    if pts.is_empty() {
        return Err(Error::ResolutionTooCoarse(format!("no configurations of {k} cubes at resolution {r}")));
    }
    let mut parent: Vec<usize> = (0..pts.len()).collect();
    let mut count = pts.len();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b && segment_valid(&cubes, &pts[i], &pts[j]) {
                parent[a] = b;
                count -= 1;
            }
        }
    }
    Ok((pts.len(), count))
}

/// Counts components of the graph whose vertices are the configurations of
/// `k` cubes with corners and sides on the grid of step `1/resolution`,
/// joined when the straight segment between them stays valid. The count is
/// repeated at `resolution + 1` and must agree.
pub fn count_components(n: usize, k: usize, resolution: usize) -> Result<ComponentCount> {
    if n == 0 || resolution == 0 {
        return Err(Error::Invalid("dimension and resolution must be positive".into()));
    }
    let (samples, components) = components_at(n, k, resolution)?;
    let (_, refined) = components_at(n, k, resolution + 1)?;
    if refined != components {
        return Err(Error::ResolutionTooCoarse(format!(
            "{components} components at resolution {resolution} but {refined} at {}",
            resolution + 1
        )));
    }
    Ok(ComponentCount {
        n,
        k,
        resolution,
        samples,
        components,
        refined_resolution: resolution + 1,
        refined_components: refined,
        heuristic: true,
    })
}
