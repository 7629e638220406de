use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;

use super::{failed, OracleError};
use crate::geometry::{convex_position_test, point_in_hull, solve, Point, PointSet};

/// A simplex around an interior point and the cone that sees many points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lemma1Outcome {
    pub interior_id: usize,
    /// The `d+1` ids of a simplex containing the interior point strictly.
    pub simplex: Vec<usize>,
    /// Position in `simplex` of the vertex left out of the chosen cone.
    pub cone: usize,
    /// The `d` ids spanning the chosen cone (the simplex minus `cone`).
    pub facet: Vec<usize>,
    /// Points of the chosen cone other than the interior point and `facet`.
    pub u: Vec<usize>,
    /// Number of points in each of the `d+1` cones.
    pub cone_counts: Vec<usize>,
}

fn difference(a: &Point, b: &Point) -> Vec<BigRational> {
    a.coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| x - y)
        .collect()
}

/// Locates `interior_id` in a simplex `W` of other points and partitions
/// space around it into the `d+1` cones spanned by the reflected vectors
/// `p - w`, `w ∈ W \ {w_j}`. The fullest cone holds at least `(n-1)/(d+1)`
/// points, and `p` is strictly inside `conv(W \ {w_j} ∪ {q})` for each `q`
/// in it. Both facts are checked before returning.
pub fn lemma1_verify(ps: &PointSet, interior_id: usize) -> Result<Lemma1Outcome, OracleError> {
    let d = ps.dim();
    let n = ps.len();
    let p = ps.point(interior_id);
    let (ids, others) = ps.without(&[interior_id]);
    let hull = point_in_hull(p, &others)?.ok_or(OracleError::NotInterior { id: interior_id })?;
    if hull.support.len() != d + 1 || hull.coefficients.iter().any(|c| !c.is_positive()) {
        return Err(OracleError::Degenerate(format!(
            "point {interior_id} lies on a face of {} points",
            hull.support.len()
        )));
    }
    let simplex: Vec<usize> = hull.support.iter().map(|&i| ids[i]).collect();

    // column vectors p - w for each simplex vertex
    let reflected: Vec<Vec<BigRational>> = simplex
        .iter()
        .map(|&w| difference(p, ps.point(w)))
        .collect();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); d + 1];
    for q in 0..n {
        if q == interior_id {
            continue;
        }
        let target = difference(ps.point(q), p);
        let cone = (0..=d).find(|&j| {
            let matrix: Vec<Vec<BigRational>> = (0..d)
                .map(|r| {
                    (0..=d)
                        .filter(|&i| i != j)
                        .map(|i| reflected[i][r].clone())
                        .collect()
                })
                .collect();
            solve(&matrix, &target).is_some_and(|mu| mu.iter().all(|m| !m.is_negative()))
        });
        match cone {
            Some(j) => members[j].push(q),
            None => {
                return Err(failed(
                    "cones cover space",
                    format!("point {q} is in no cone"),
                ));
            }
        }
    }
    let cone_counts: Vec<usize> = members.iter().map(Vec::len).collect();
    let cone = (0..=d)
        .max_by_key(|&j| (cone_counts[j], std::cmp::Reverse(j)))
        .expect("d + 1 cones");
    let facet: Vec<usize> = (0..=d).filter(|&i| i != cone).map(|i| simplex[i]).collect();
    let u: Vec<usize> = members[cone]
        .iter()
        .copied()
        .filter(|q| !facet.contains(q))
        .collect();

    // |U| >= (n-1)/(d+1)
    if (u.len() * (d + 1)) < n - 1 {
        return Err(failed(
            "cone size",
            format!("|U| = {} < ({n} - 1)/{}", u.len(), d + 1),
        ));
    }
    for &q in &u {
        let mut corners: Vec<&Point> = facet.iter().map(|&i| ps.point(i)).collect();
        corners.push(ps.point(q));
        if !strictly_inside(p, &corners) {
            return Err(failed(
                "interior point inside facet plus q",
                format!("q = {q}"),
            ));
        }
    }
    Ok(Lemma1Outcome {
        interior_id,
        simplex,
        cone,
        facet,
        u,
        cone_counts,
    })
}

/// Whether `p` has strictly positive barycentric coordinates in `simplex`.
fn strictly_inside(p: &Point, simplex: &[&Point]) -> bool {
    let d = p.dim();
    let base = simplex[d];
    let matrix: Vec<Vec<BigRational>> = (0..d)
        .map(|r| {
            (0..d)
                .map(|i| &simplex[i].coords()[r] - &base.coords()[r])
                .collect()
        })
        .collect();
    let rhs = difference(p, base);
    match solve(&matrix, &rhs) {
        Some(lambda) => {
            let rest = lambda
                .iter()
                .fold(BigRational::from_integer(1.into()), |acc, l| acc - l);
            lambda.iter().all(|l| l.is_positive()) && rest.is_positive()
        }
        None => false,
    }
}

/// Disjoint simplices `W_i` and their witness sets `U_i`, built by peeling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lemma2Construction {
    pub k: usize,
    /// `W_i`: a cone facet plus the interior point, increasing ids.
    pub w_sets: Vec<Vec<usize>>,
    pub u_sets: Vec<Vec<usize>>,
}

/// Runs `k = floor(epsilon n/(d+1))` rounds of: find an interior point of
/// the remaining set, apply [`lemma1_verify`] to it, keep `W_i` and `U_i`,
/// and delete `W_i`. The five properties are checked exactly on the result:
///
/// 1. `|W_i| = d+1`;
/// 2. the `W_i` are pairwise disjoint;
/// 3. `W_i ∩ U_i = ∅`;
/// 4. `W_i ∪ {q}` is not in convex position for each `q ∈ U_i`;
/// 5. `|U_i| >= n/(d+1) - k` and `|U_i| >= (1 - epsilon) n/(d+1)`.
///
/// The input must be `epsilon`-far from convex position; if a remaining set
/// turns out convex the input was not, and an error is returned.
pub fn lemma2_construct(
    ps: &PointSet,
    epsilon: &BigRational,
) -> Result<Lemma2Construction, OracleError> {
    let n = ps.len();
    let d = ps.dim();
    let nq = BigRational::from_integer(BigInt::from(n));
    let dq = BigRational::from_integer(BigInt::from(d + 1));
    let k = (epsilon * &nq / &dq)
        .floor()
        .to_integer()
        .try_into()
        .unwrap_or(0usize);
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut w_sets = Vec::with_capacity(k);
    let mut u_sets = Vec::with_capacity(k);
    for round in 0..k {
        let current = ps.subset(&remaining)?;
        let witness = convex_position_test(&current)
            .witness
            .ok_or(OracleError::ConvexRound { round })?;
        let local = lemma1_verify(&current, witness.interior_id)?;
        let mut w: Vec<usize> = local.facet.iter().map(|&i| remaining[i]).collect();
        w.push(remaining[local.interior_id]);
        w.sort_unstable();
        let u: Vec<usize> = local.u.iter().map(|&i| remaining[i]).collect();
        remaining.retain(|i| w.binary_search(i).is_err());
        w_sets.push(w);
        u_sets.push(u);
    }
    let out = Lemma2Construction { k, w_sets, u_sets };
    out.check(ps, epsilon)?;
    Ok(out)
}

impl Lemma2Construction {
    /// Re-checks all five properties against `ps`.
    pub fn check(&self, ps: &PointSet, epsilon: &BigRational) -> Result<(), OracleError> {
        let d = ps.dim();
        let n = BigRational::from_integer(BigInt::from(ps.len()));
        let dq = BigRational::from_integer(BigInt::from(d + 1));
        let kq = BigRational::from_integer(BigInt::from(self.k));
        let floor_a = &n / &dq - &kq;
        let floor_b = (BigRational::from_integer(1.into()) - epsilon) * &n / &dq;
        if self.w_sets.len() != self.k || self.u_sets.len() != self.k {
            return Err(failed("k rounds", format!("{} sets", self.w_sets.len())));
        }
        let mut used = vec![false; ps.len()];
        for (i, (w, u)) in self.w_sets.iter().zip(&self.u_sets).enumerate() {
            if w.len() != d + 1 {
                return Err(failed("(i) |W_i| = d+1", format!("round {i}: {w:?}")));
            }
            for &x in w {
                if std::mem::replace(&mut used[x], true) {
                    return Err(failed("(ii) W_i disjoint", format!("point {x}")));
                }
            }
            if u.iter().any(|q| w.contains(q)) {
                return Err(failed("(iii) W_i ∩ U_i = ∅", format!("round {i}")));
            }
            for &q in u {
                let mut ids = w.clone();
                ids.push(q);
                if convex_position_test(&ps.subset(&ids)?).in_convex_position {
                    return Err(failed(
                        "(iv) W_i ∪ {q} not convex",
                        format!("round {i}, q = {q}"),
                    ));
                }
            }
            let size = BigRational::from_integer(BigInt::from(u.len()));
            if size < floor_a || size < floor_b {
                return Err(failed(
                    "(v) |U_i| lower bounds",
                    format!(
                        "round {i}: |U_i| = {}, bounds {floor_a}, {floor_b}",
                        u.len()
                    ),
                ));
            }
        }
        Ok(())
    }
}
