//! Definition-level brute force, independent of the LP.
//!
//! Hull membership is decided by Carathéodory: `p` is in the hull of a set
//! iff it is a convex combination of some affinely independent subset of at
//! most `d+1` of its points, so every such subset is tried.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::combinatorics::Combinations;
use crate::geometry::{Point, PointSet};

/// Barycentric coefficients of `p` with respect to `simplex`, if the simplex
/// is affinely independent and `p` lies in its affine hull.
pub fn barycentric(p: &Point, simplex: &[&Point]) -> Option<Vec<BigRational>> {
    let d = p.dim();
    let m = simplex.len();
    // rows: d coordinates plus the affine row; columns: m unknowns plus rhs
    let mut rows: Vec<Vec<BigRational>> = (0..=d)
        .map(|r| {
            let mut row: Vec<BigRational> = simplex
                .iter()
                .map(|q| {
                    if r < d {
                        q.coords()[r].clone()
                    } else {
                        BigRational::one()
                    }
                })
                .collect();
            row.push(if r < d {
                p.coords()[r].clone()
            } else {
                BigRational::one()
            });
            row
        })
        .collect();
    let mut rank = 0;
    for col in 0..m {
        let piv = (rank..rows.len()).find(|&r| !rows[r][col].is_zero())?;
        rows.swap(rank, piv);
        let inv = rows[rank][col].recip();
        for v in rows[rank].iter_mut() {
            *v *= &inv;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                let pivot_row = rows[rank].clone();
                for (v, w) in rows[r].iter_mut().zip(&pivot_row) {
                    *v -= &f * w;
                }
            }
        }
        rank += 1;
    }
    if rows[rank..].iter().any(|row| !row[m].is_zero()) {
        return None;
    }
    Some(rows[..m].iter().map(|row| row[m].clone()).collect())
}

/// Whether `p` lies in the convex hull of `others`.
pub fn in_hull(p: &Point, others: &[&Point]) -> bool {
    let max = (p.dim() + 1).min(others.len());
    (1..=max).any(|size| {
        Combinations::new(others.len(), size).any(|ids| {
            let simplex: Vec<&Point> = ids.iter().map(|&i| others[i]).collect();
            barycentric(p, &simplex).is_some_and(|c| c.iter().all(|x| !x.is_negative()))
        })
    })
}

/// Whether no point lies in the hull of the others.
pub fn convex_position(ps: &PointSet) -> bool {
    (0..ps.len()).all(|i| {
        let (_, others) = ps.without(&[i]);
        !in_hull(ps.point(i), &others)
    })
}

/// Smallest removal set by enumerating subsets in increasing size and then
/// lexicographic order. Exponential; meant for `n <= 12`.
pub fn min_removal(ps: &PointSet) -> Vec<usize> {
    for r in 0..=ps.len() {
        for removed in Combinations::new(ps.len(), r) {
            let (kept, _) = ps.without(&removed);
            if convex_position(&ps.subset(&kept).expect("non-empty")) {
                return removed;
            }
        }
    }
    unreachable!("a single point is in convex position")
}

/// Size of the largest subset in convex position.
pub fn max_convex_subset(ps: &PointSet) -> usize {
    ps.len() - min_removal(ps).len()
}
