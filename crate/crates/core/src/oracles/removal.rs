use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::OracleError;
use crate::geometry::{convex_position_test, orientation, PointSet};

/// Largest input accepted by [`min_removal_to_convex`].
pub const MIN_REMOVAL_BUDGET: usize = 24;

/// A smallest set whose removal leaves the input in convex position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FarnessCertificate {
    pub min_removal: usize,
    /// Increasing ids; lexicographically least among minimum removals.
    pub removed_ids: Vec<usize>,
}

impl FarnessCertificate {
    /// Whether the complement of `removed_ids` is in convex position.
    pub fn verify(&self, ps: &PointSet) -> bool {
        self.removed_ids.len() == self.min_removal
            && self.removed_ids.windows(2).all(|w| w[0] < w[1])
            && self.removed_ids.last().is_none_or(|&i| i < ps.len())
            && remainder_witness(ps, &self.removed_ids).is_none()
    }
}

/// Ids of a witness of non-convexity of `ps` minus `removed`, if any.
fn remainder_witness(ps: &PointSet, removed: &[usize]) -> Option<Vec<usize>> {
    let (kept, _) = ps.without(removed);
    let rest = ps.subset(&kept).expect("at least one point kept");
    convex_position_test(&rest)
        .witness
        .map(|w| w.ids().into_iter().map(|i| kept[i]).collect())
}

/// Minimum number of points to delete for convex position, with the
/// lexicographically least optimal deletion set.
///
/// A set of at least `d+2` points is in convex position exactly when none of
/// its `(d+2)`-subsets is in a non-convex configuration, so deletion sets
/// leaving that many points are the hitting sets of the non-convex
/// `(d+2)`-subsets. These are listed once from cached orientations and the
/// hitting sets searched on bitmasks. When the optimum would leave fewer
/// than `d+2` points the search falls back to branching on witnesses of the
/// remainder.
pub fn min_removal_to_convex(ps: &PointSet) -> Result<FarnessCertificate, OracleError> {
    if ps.len() > MIN_REMOVAL_BUDGET {
        return Err(OracleError::TooLarge {
            n: ps.len(),
            budget: MIN_REMOVAL_BUDGET,
        });
    }
    let n = ps.len();
    let m = ps.dim() + 2;
    let mut start = 0;
    if n >= m {
        let edges = non_convex_subsets(ps)?;
        for bound in 0..=n - m {
            let mut search = HittingSearch {
                edges: &edges,
                bound,
                seen: HashSet::new(),
                found: None,
            };
            search.branch(0, 0);
            if let Some(mask) = search.found {
                return Ok(FarnessCertificate {
                    min_removal: bound,
                    removed_ids: ids_of(mask),
                });
            }
        }
        start = n - m + 1;
    }
    for bound in start..n {
        let mut search = Search {
            ps,
            bound,
            seen: HashSet::new(),
            found: BTreeSet::new(),
        };
        search.branch(&mut Vec::new());
        if let Some(best) = search.found.into_iter().next() {
            return Ok(FarnessCertificate {
                min_removal: bound,
                removed_ids: best,
            });
        }
    }
    unreachable!("removing all but one point always succeeds")
}

fn ids_of(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

/// Ids of `k`-subsets of `0..n` as bitmasks, in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<u32> {
    fn rec(n: usize, k: usize, from: usize, mask: u32, out: &mut Vec<u32>) {
        if k == 0 {
            out.push(mask);
            return;
        }
        for i in from..=n - k {
            rec(n, k - 1, i + 1, mask | 1 << i, out);
        }
    }
    let mut out = Vec::new();
    rec(n, k, 0, 0, &mut out);
    out
}

/// All `(d+2)`-subsets not in convex position.
///
/// The affine dependency of `d+2` points has coefficients
/// `lambda_i = (-1)^i orient(all but i)`; one point lies in the hull of the
/// others exactly when it alone carries its sign. If every coefficient
/// vanishes the points span less than a hyperplane and the subset is
/// tested directly.
fn non_convex_subsets(ps: &PointSet) -> Result<Vec<u32>, OracleError> {
    let n = ps.len();
    let d = ps.dim();
    let mut orient: HashMap<u32, i8> = HashMap::new();
    for mask in subsets(n, d + 1) {
        let pts: Vec<_> = ids_of(mask).into_iter().map(|i| ps.point(i)).collect();
        orient.insert(mask, orientation(&pts)?.as_i8());
    }
    let mut edges = Vec::new();
    for mask in subsets(n, d + 2) {
        let ids = ids_of(mask);
        let lambda: Vec<i8> = ids
            .iter()
            .enumerate()
            .map(|(pos, &i)| {
                let s = orient[&(mask & !(1 << i))];
                if pos % 2 == 0 {
                    s
                } else {
                    -s
                }
            })
            .collect();
        let pos = lambda.iter().filter(|&&l| l > 0).count();
        let neg = lambda.iter().filter(|&&l| l < 0).count();
        let non_convex = if pos + neg == 0 {
            !convex_position_test(&ps.subset(&ids)?).in_convex_position
        } else {
            pos == 1 || neg == 1
        };
        if non_convex {
            edges.push(mask);
        }
    }
    Ok(edges)
}

struct HittingSearch<'a> {
    edges: &'a [u32],
    bound: usize,
    seen: HashSet<u32>,
    /// Least hitting set of size `bound` in lexicographic order of id lists.
    found: Option<u32>,
}

impl HittingSearch<'_> {
    fn branch(&mut self, removed: u32, size: usize) {
        if !self.seen.insert(removed) {
            return;
        }
        let Some(&edge) = self.edges.iter().find(|&&e| e & removed == 0) else {
            if self.found.is_none_or(|f| ids_of(removed) < ids_of(f)) {
                self.found = Some(removed);
            }
            return;
        };
        if size + self.packing_bound(removed) > self.bound {
            return;
        }
        for i in ids_of(edge) {
            self.branch(removed | 1 << i, size + 1);
        }
    }

    /// Pairwise disjoint edges missing `removed`, found greedily.
    fn packing_bound(&self, removed: u32) -> usize {
        let mut used = removed;
        let mut count = 0;
        for &e in self.edges {
            if e & used == 0 {
                used |= e;
                count += 1;
            }
        }
        count
    }
}

struct Search<'a> {
    ps: &'a PointSet,
    bound: usize,
    seen: HashSet<Vec<usize>>,
    found: BTreeSet<Vec<usize>>,
}

impl Search<'_> {
    fn branch(&mut self, removed: &mut Vec<usize>) {
        let mut key = removed.clone();
        key.sort_unstable();
        if !self.seen.insert(key.clone()) {
            return;
        }
        let Some(witness) = remainder_witness(self.ps, &key) else {
            self.found.insert(key);
            return;
        };
        if removed.len() + self.packing_bound(&key, witness.clone()) > self.bound {
            return;
        }
        for id in witness {
            removed.push(id);
            self.branch(removed);
            removed.pop();
        }
    }

    /// Number of pairwise disjoint witnesses found greedily, starting from
    /// `first`, after deleting `removed`.
    fn packing_bound(&self, removed: &[usize], first: Vec<usize>) -> usize {
        let mut gone = removed.to_vec();
        let mut next = Some(first);
        let mut count = 0;
        while let Some(w) = next {
            count += 1;
            if removed.len() + count > self.bound {
                break;
            }
            gone.extend(w);
            gone.sort_unstable();
            next = if gone.len() < self.ps.len() {
                remainder_witness(self.ps, &gone)
            } else {
                None
            };
        }
        count
    }
}
