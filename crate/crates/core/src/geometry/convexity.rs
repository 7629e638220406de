use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::predicates::det3;
use super::{point_in_hull, Point, PointSet};

/// `d+2` points of which one, `interior_id`, is a convex combination of the
/// other `d+1`. Indisputable evidence that a set is not in convex position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegativeWitness {
    pub interior_id: usize,
    /// The other `d+1` ids, increasing.
    pub support: Vec<usize>,
    /// `coefficients[i]` multiplies the point `support[i]`.
    #[serde(with = "rational_strings")]
    pub coefficients: Vec<BigRational>,
}

impl NegativeWitness {
    /// All witness ids (interior point included), increasing.
    pub fn ids(&self) -> Vec<usize> {
        let mut ids = self.support.clone();
        ids.push(self.interior_id);
        ids.sort_unstable();
        ids
    }

    /// Re-checks the witness against `ps` in exact arithmetic: ids distinct
    /// and in range, coefficients nonnegative and summing to one, and the
    /// combination reproducing the interior point.
    pub fn verify(&self, ps: &PointSet) -> bool {
        let ids = self.ids();
        if ids.len() != (ps.dim() + 2).min(ps.len())
            || ids.windows(2).any(|w| w[0] == w[1])
            || ids.iter().any(|&i| i >= ps.len())
            || self.support.len() != self.coefficients.len()
        {
            return false;
        }
        if self.coefficients.iter().any(|c| c.is_negative()) {
            return false;
        }
        let total = self
            .coefficients
            .iter()
            .fold(BigRational::zero(), |acc, c| acc + c);
        if total != BigRational::one() {
            return false;
        }
        let mut x = vec![BigRational::zero(); ps.dim()];
        for (&id, c) in self.support.iter().zip(&self.coefficients) {
            for (xi, qi) in x.iter_mut().zip(ps.point(id).coords()) {
                *xi += c * qi;
            }
        }
        x == ps.point(self.interior_id).coords()
    }

    /// True when every coefficient is strictly positive, which always holds
    /// for inputs in general position.
    pub fn is_strict(&self) -> bool {
        self.coefficients.iter().all(|c| c.is_positive())
    }

    /// Rewrites ids through `map` (local id -> id in an enclosing set).
    pub fn remap(&self, map: &[usize]) -> NegativeWitness {
        let mut pairs: Vec<(usize, BigRational)> = self
            .support
            .iter()
            .zip(&self.coefficients)
            .map(|(&i, c)| (map[i], c.clone()))
            .collect();
        pairs.sort_by_key(|(i, _)| *i);
        let (support, coefficients) = pairs.into_iter().unzip();
        NegativeWitness {
            interior_id: map[self.interior_id],
            support,
            coefficients,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexityResult {
    pub in_convex_position: bool,
    pub witness: Option<NegativeWitness>,
}

impl ConvexityResult {
    fn convex() -> Self {
        ConvexityResult {
            in_convex_position: true,
            witness: None,
        }
    }
}

/// Decides whether no point of `ps` lies in the convex hull of the others.
///
/// Points that are strict vertices of the hull of some coordinate-plane
/// projection (and whose projection is not shared) are extreme in `R^d` and
/// need no LP. Every remaining point is checked with [`point_in_hull`] in
/// index order; the first one found inside yields the witness.
///
/// Inputs violating general position may get either verdict.
pub fn convex_position_test(ps: &PointSet) -> ConvexityResult {
    let n = ps.len();
    if n <= 1 {
        return ConvexityResult::convex();
    }
    let certified = certified_extreme(ps);
    let all: Vec<&Point> = ps.iter().collect();
    for i in 0..n {
        if certified[i] {
            continue;
        }
        let others: Vec<&Point> = all[..i].iter().chain(&all[i + 1..]).copied().collect();
        let membership =
            point_in_hull(ps.point(i), &others).expect("points of a PointSet share one dimension");
        if let Some(m) = membership {
            let unshift = |j: usize| if j < i { j } else { j + 1 };
            let mut support: Vec<usize> = m.support.iter().map(|&j| unshift(j)).collect();
            let mut coefficients = m.coefficients;
            pad_support(ps, i, &mut support, &mut coefficients);
            return ConvexityResult {
                in_convex_position: false,
                witness: Some(NegativeWitness {
                    interior_id: i,
                    support,
                    coefficients,
                }),
            };
        }
    }
    ConvexityResult::convex()
}

/// Under general position the support has exactly `d+1` points; on
/// degenerate input it can be smaller, and is padded with the lowest unused
/// ids at coefficient zero so the witness keeps `d+2` points.
fn pad_support(
    ps: &PointSet,
    interior: usize,
    support: &mut Vec<usize>,
    coefficients: &mut Vec<BigRational>,
) {
    let target = (ps.dim() + 1).min(ps.len() - 1);
    let mut candidate = 0;
    while support.len() < target {
        if candidate != interior && !support.contains(&candidate) {
            support.push(candidate);
            coefficients.push(BigRational::zero());
        }
        candidate += 1;
    }
    let mut pairs: Vec<_> = support.drain(..).zip(coefficients.drain(..)).collect();
    pairs.sort_by_key(|(i, _)| *i);
    for (i, c) in pairs {
        support.push(i);
        coefficients.push(c);
    }
}

/// Marks points proven extreme by a strict vertex of a projected hull.
fn certified_extreme(ps: &PointSet) -> Vec<bool> {
    let n = ps.len();
    let d = ps.dim();
    let mut certified = vec![false; n];
    if d == 1 {
        let cmp = |a: &usize, b: &usize| ps.point(*a).coords()[0].cmp(&ps.point(*b).coords()[0]);
        if let Some(lo) = (0..n).min_by(cmp) {
            certified[lo] = true;
        }
        if let Some(hi) = (0..n).max_by(cmp) {
            certified[hi] = true;
        }
        return certified;
    }
    for a in 0..d {
        for b in a + 1..d {
            mark_projected_hull(ps, a, b, &mut certified);
            if certified.iter().all(|&c| c) {
                return certified;
            }
        }
    }
    certified
}

fn mark_projected_hull(ps: &PointSet, a: usize, b: usize, certified: &mut [bool]) {
    let d = ps.dim();
    let proj: Vec<[&BigInt; 3]> = ps
        .iter()
        .map(|p| {
            let h = p.homogeneous();
            [&h[a], &h[b], &h[d]]
        })
        .collect();
    let cmp = |i: &usize, j: &usize| -> Ordering {
        let (p, q) = (&proj[*i], &proj[*j]);
        (p[0] * q[2])
            .cmp(&(q[0] * p[2]))
            .then_with(|| (p[1] * q[2]).cmp(&(q[1] * p[2])))
    };
    let mut order: Vec<usize> = (0..ps.len()).collect();
    order.sort_by(cmp);

    // One representative per distinct projection; shared projections stay
    // in the hull but prove nothing about their points.
    let mut unique = Vec::with_capacity(order.len());
    let mut shared = vec![false; ps.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && cmp(&order[i], &order[j]) == Ordering::Equal {
            j += 1;
        }
        shared[order[i]] = j > i + 1;
        unique.push(order[i]);
        i = j;
    }
    if unique.len() == 1 {
        certified[unique[0]] |= !shared[unique[0]];
        return;
    }

    let left_turn = |o: usize, p: usize, q: usize| -> bool {
        let rows: [Vec<BigInt>; 3] =
            [o, p, q].map(|k| proj[k].iter().map(|v| (*v).clone()).collect());
        det3(&rows[0], &rows[1], &rows[2]).sign() == Sign::Plus
    };
    let chain = |pts: &mut dyn Iterator<Item = usize>| -> Vec<usize> {
        let mut hull: Vec<usize> = Vec::new();
        for p in pts {
            while hull.len() >= 2 && !left_turn(hull[hull.len() - 2], hull[hull.len() - 1], p) {
                hull.pop();
            }
            hull.push(p);
        }
        hull
    };
    let lower = chain(&mut unique.iter().copied());
    let upper = chain(&mut unique.iter().rev().copied());
    for v in lower.into_iter().chain(upper) {
        certified[v] |= !shared[v];
    }
}

pub(crate) mod rational_strings {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| r.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| s.parse::<BigRational>().map_err(D::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(d: usize, coords: &[&[i64]]) -> PointSet {
        PointSet::new(d, coords.iter().map(|c| Point::from_integers(c)).collect()).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn square_is_convex() {
        let r = convex_position_test(&set(2, &[&[0, 0], &[1, 0], &[1, 1], &[0, 1]]));
        assert!(r.in_convex_position);
        assert!(r.witness.is_none());
    }

    #[test]
    fn triangle_with_centroid() {
        let ps = set(2, &[&[0, 0], &[6, 0], &[0, 6], &[2, 2]]);
        let r = convex_position_test(&ps);
        assert!(!r.in_convex_position);
        let w = r.witness.unwrap();
        assert_eq!(w.interior_id, 3);
        assert_eq!(w.ids(), vec![0, 1, 2, 3]);
        assert_eq!(w.coefficients, vec![q(1, 3), q(1, 3), q(1, 3)]);
        assert!(w.verify(&ps));
        assert!(w.is_strict());
    }

    #[test]
    fn tetrahedron_with_barycenter() {
        let ps = PointSet::new(
            3,
            vec![
                Point::from_integers(&[0, 0, 0]),
                Point::from_ratios(&[(1, 4), (1, 4), (1, 4)]),
                Point::from_integers(&[1, 0, 0]),
                Point::from_integers(&[0, 1, 0]),
                Point::from_integers(&[0, 0, 1]),
            ],
        )
        .unwrap();
        let r = convex_position_test(&ps);
        let w = r.witness.unwrap();
        assert_eq!(w.interior_id, 1);
        assert_eq!(w.support, vec![0, 2, 3, 4]);
        assert_eq!(w.coefficients, vec![q(1, 4); 4]);
        assert!(w.verify(&ps));
    }

    #[test]
    fn lowest_interior_index_is_reported() {
        // two interior points; index 1 must win over index 4
        let ps = set(2, &[&[0, 0], &[1, 1], &[10, 0], &[0, 10], &[2, 3]]);
        let w = convex_position_test(&ps).witness.unwrap();
        assert_eq!(w.interior_id, 1);
        assert!(w.verify(&ps));
    }

    #[test]
    fn tampered_witness_fails_verification() {
        let ps = set(2, &[&[0, 0], &[6, 0], &[0, 6], &[2, 2]]);
        let mut w = convex_position_test(&ps).witness.unwrap();
        w.coefficients[0] = q(1, 2);
        w.coefficients[1] = q(1, 6);
        assert!(!w.verify(&ps));
        let mut w2 = convex_position_test(&ps).witness.unwrap();
        w2.interior_id = 0;
        w2.support = vec![1, 2, 3];
        assert!(!w2.verify(&ps));
    }

    #[test]
    fn one_dimensional_sets() {
        assert!(convex_position_test(&set(1, &[&[4], &[-2]])).in_convex_position);
        let ps = set(1, &[&[4], &[-2], &[1]]);
        let w = convex_position_test(&ps).witness.unwrap();
        assert_eq!(w.interior_id, 2);
        assert_eq!(w.coefficients, vec![q(1, 2), q(1, 2)]);
        assert!(w.verify(&ps));
    }

    #[test]
    fn degenerate_support_is_padded() {
        // collinear input: every support has at most 2 points
        let ps = set(2, &[&[0, 0], &[1, 1], &[2, 2], &[3, 3]]);
        let w = convex_position_test(&ps).witness.unwrap();
        assert_eq!(w.interior_id, 1);
        assert_eq!(w.ids().len(), 4);
        assert!(w.verify(&ps));
        assert!(!w.is_strict());
    }

    #[test]
    fn projection_duplicates_fall_back_to_lp() {
        // all points share the projection onto the first two coordinates
        // in pairs; the set is still convex
        let ps = set(
            3,
            &[
                &[0, 0, 0],
                &[0, 0, 5],
                &[4, 0, 1],
                &[4, 0, 7],
                &[0, 4, 2],
                &[0, 4, 3],
            ],
        );
        assert!(convex_position_test(&ps).in_convex_position);
    }

    #[test]
    fn remap_translates_ids() {
        let ps = set(2, &[&[0, 0], &[6, 0], &[0, 6], &[2, 2]]);
        let w = convex_position_test(&ps).witness.unwrap();
        let r = w.remap(&[40, 10, 30, 20]);
        assert_eq!(r.interior_id, 20);
        assert_eq!(r.support, vec![10, 30, 40]);
    }
}
