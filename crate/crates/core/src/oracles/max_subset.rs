use std::cmp::Ordering;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use num_bigint::{BigInt, Sign};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{failed, OracleError};
use crate::geometry::{convex_position_test, PointSet};

/// Largest planar subset in convex position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxConvexSubset {
    pub size: usize,
    /// Increasing ids of one largest convex subset.
    pub ids: Vec<usize>,
}

/// Exact maximum convex subset of a planar set in `O(n^3)` time.
///
/// A polygon is strictly convex exactly when, walking counterclockwise from
/// its lowest vertex, edge directions increase strictly within `[0, 2pi)`.
/// Directed edges are sorted by direction once; then for each candidate
/// lowest vertex `p`, a scan over the sorted edges keeps the longest chain
/// from `p` ending at every point, and edges back into `p` close polygons.
/// Edges of equal direction are relaxed together so collinear chains never
/// count.
pub fn max_convex_subset_2d(ps: &PointSet) -> Result<MaxConvexSubset, OracleError> {
    if ps.dim() != 2 {
        return Err(OracleError::WrongDimension {
            expected: 2,
            found: ps.dim(),
        });
    }
    let n = ps.len();
    // rank points by (y, x); rank order = bottom-vertex order
    let hom: Vec<[BigInt; 3]> = ps
        .iter()
        .map(|p| {
            let h = p.homogeneous();
            [h[0].clone(), h[1].clone(), h[2].clone()]
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (ha, hb) = (&hom[a], &hom[b]);
        (&ha[1] * &hb[2])
            .cmp(&(&hb[1] * &ha[2]))
            .then_with(|| (&ha[0] * &hb[2]).cmp(&(&hb[0] * &ha[2])))
    });
    if n < 3 {
        return Ok(MaxConvexSubset {
            size: n,
            ids: sorted(order),
        });
    }
    let ranked: Vec<&[BigInt; 3]> = order.iter().map(|&i| &hom[i]).collect();
    let graph = EdgeOrder::new(&ranked);

    // A polygon with lowest vertex p has at most n - p vertices, so bottoms
    // that cannot beat the best size seen so far are skipped.
    let seen = AtomicU32::new(0);
    let (size, p) = (0..n - 2)
        .into_par_iter()
        .map(|p| {
            if ((n - p) as u32) < seen.load(AtomicOrdering::Relaxed) {
                return (0, p);
            }
            let v = graph.chain_value(p, n);
            seen.fetch_max(v, AtomicOrdering::Relaxed);
            (v, p)
        })
        .reduce(
            || (0, usize::MAX),
            |a, b| if (b.0, a.1) > (a.0, b.1) { b } else { a },
        );
    if size < 3 {
        // all points collinear: the two ends
        return Ok(MaxConvexSubset {
            size: 2,
            ids: sorted(vec![order[0], order[n - 1]]),
        });
    }
    let polygon = graph.chain_polygon(p, n);
    let ids = sorted(polygon.into_iter().map(|r| order[r]).collect());
    if ids.len() != size as usize {
        return Err(failed("polygon size", format!("{} != {}", ids.len(), size)));
    }
    let subset = ps.subset(&ids)?;
    if !convex_position_test(&subset).in_convex_position {
        return Err(failed("realizing subset is convex", format!("{ids:?}")));
    }
    Ok(MaxConvexSubset {
        size: ids.len(),
        ids,
    })
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

struct EdgeOrder {
    /// `(from, to)` by rank, sorted by direction.
    edges: Vec<(u32, u32)>,
    /// Whether edge `i` has the same direction as edge `i + 1`.
    tied: Vec<bool>,
}

/// Direction of `b - a` scaled by the positive `D_a D_b`.
fn direction(a: &[BigInt; 3], b: &[BigInt; 3]) -> (BigInt, BigInt) {
    (&b[0] * &a[2] - &a[0] * &b[2], &b[1] * &a[2] - &a[1] * &b[2])
}

fn upper_half(v: &(BigInt, BigInt)) -> bool {
    v.1.sign() == Sign::Plus || (v.1.sign() == Sign::NoSign && v.0.sign() == Sign::Plus)
}

/// Angular order on `[0, 2pi)`.
fn compare_directions(u: &(BigInt, BigInt), v: &(BigInt, BigInt)) -> Ordering {
    match (upper_half(u), upper_half(v)) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        _ => (&v.0 * &u.1).cmp(&(&u.0 * &v.1)),
    }
}

fn approx_angle(v: &(BigInt, BigInt)) -> f64 {
    let a =
        v.1.to_f64()
            .unwrap_or(0.0)
            .atan2(v.0.to_f64().unwrap_or(0.0));
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}

/// Float angles closer than this are re-ordered exactly.
const ANGLE_SLACK: f64 = 1e-9;

impl EdgeOrder {
    fn new(pts: &[&[BigInt; 3]]) -> Self {
        let n = pts.len();
        let mut keyed: Vec<(f64, u32, u32)> = Vec::with_capacity(n * (n - 1));
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    let v = direction(pts[a], pts[b]);
                    keyed.push((approx_angle(&v), a as u32, b as u32));
                }
            }
        }
        keyed.par_sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
        let dir = |e: &(f64, u32, u32)| direction(pts[e.1 as usize], pts[e.2 as usize]);
        let mut tied = vec![false; keyed.len()];
        let mut start = 0;
        while start < keyed.len() {
            let mut end = start + 1;
            while end < keyed.len() && keyed[end].0 - keyed[end - 1].0 < ANGLE_SLACK {
                end += 1;
            }
            if end - start > 1 {
                let run = &mut keyed[start..end];
                run.sort_by(|x, y| compare_directions(&dir(x), &dir(y)));
                for i in start..end - 1 {
                    tied[i] =
                        compare_directions(&dir(&keyed[i]), &dir(&keyed[i + 1])) == Ordering::Equal;
                }
            }
            start = end;
        }
        EdgeOrder {
            edges: keyed.into_iter().map(|(_, a, b)| (a, b)).collect(),
            tied,
        }
    }

    /// Most vertices of a convex polygon whose lowest vertex is `p`.
    fn chain_value(&self, p: usize, n: usize) -> u32 {
        let mut best = vec![0u32; n];
        best[p] = 1;
        let mut answer = 0;
        let mut pending: Vec<(usize, u32)> = Vec::new();
        let p32 = p as u32;
        let mut i = 0;
        while i < self.edges.len() {
            let mut j = i;
            while self.tied[j] {
                j += 1;
            }
            for &(a, b) in &self.edges[i..=j] {
                if a < p32 || b < p32 {
                    continue;
                }
                let va = best[a as usize];
                if va == 0 {
                    continue;
                }
                if b == p32 {
                    answer = answer.max(if va >= 3 { va } else { 0 });
                } else if i == j {
                    if va + 1 > best[b as usize] {
                        best[b as usize] = va + 1;
                    }
                } else {
                    pending.push((b as usize, va + 1));
                }
            }
            for (b, v) in pending.drain(..) {
                if v > best[b] {
                    best[b] = v;
                }
            }
            i = j + 1;
        }
        answer
    }

    /// Vertex ranks of a largest convex polygon with lowest vertex `p`.
    fn chain_polygon(&self, p: usize, n: usize) -> Vec<usize> {
        const NONE: u32 = u32::MAX;
        let mut best = vec![0u32; n];
        let mut via = vec![NONE; n];
        let mut parent = vec![NONE; self.edges.len()];
        best[p] = 1;
        let mut answer = (0u32, NONE);
        let mut pending: Vec<(usize, u32, u32)> = Vec::new();
        let p32 = p as u32;
        let mut i = 0;
        while i < self.edges.len() {
            let mut j = i;
            while self.tied[j] {
                j += 1;
            }
            for e in i..=j {
                let (a, b) = self.edges[e];
                if a < p32 || b < p32 {
                    continue;
                }
                let va = best[a as usize];
                if va == 0 {
                    continue;
                }
                if b == p32 {
                    if va >= 3 && va > answer.0 {
                        answer = (va, via[a as usize]);
                    }
                } else {
                    parent[e] = via[a as usize];
                    pending.push((b as usize, va + 1, e as u32));
                }
            }
            for (b, v, e) in pending.drain(..) {
                if v > best[b] {
                    best[b] = v;
                    via[b] = e;
                }
            }
            i = j + 1;
        }
        let mut polygon = vec![p];
        let mut e = answer.1;
        while e != NONE {
            polygon.push(self.edges[e as usize].1 as usize);
            e = parent[e as usize];
        }
        polygon
    }
}
