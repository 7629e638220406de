use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{GeometryError, Point};

/// A convex combination expressing a point through some of the candidates.
///
/// `support` indexes into the candidate slice passed to [`point_in_hull`];
/// `coefficients[i]` belongs to `support[i]`. Coefficients are positive and
/// sum to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HullMembership {
    pub support: Vec<usize>,
    pub coefficients: Vec<BigRational>,
}

/// Decides whether `p` lies in the convex hull of `others`.
///
/// Solves `sum(l_i q_i) = p, sum(l_i) = 1, l >= 0` with a phase-one simplex
/// in exact rationals using Bland's rule, so it always terminates. A basic
/// feasible solution has at most `d+1` nonzero entries, which makes the
/// returned support a Carathéodory support.
pub fn point_in_hull(
    p: &Point,
    others: &[&Point],
) -> Result<Option<HullMembership>, GeometryError> {
    let d = p.dim();
    for q in others {
        if q.dim() != d {
            return Err(GeometryError::DimensionMismatch {
                expected: d,
                found: q.dim(),
            });
        }
    }
    if others.is_empty() {
        return Ok(None);
    }
    // Column j is the homogeneous vector (x_j D_j, D_j); the system
    // sum(mu_j col_j) = (x_p D_p, D_p) with mu >= 0 is equivalent to the
    // convex-combination system via l_j = mu_j D_j / D_p.
    let cols: Vec<&[BigInt]> = others.iter().map(|q| q.homogeneous()).collect();
    let rhs = p.homogeneous();
    let Some(mu) = phase_one(&cols, rhs) else {
        return Ok(None);
    };
    let dp = BigRational::from_integer(p.denominator().clone());
    let mut support = Vec::new();
    let mut coefficients = Vec::new();
    for (j, m) in mu {
        let lambda = m * BigRational::from_integer(others[j].denominator().clone()) / &dp;
        support.push(j);
        coefficients.push(lambda);
    }
    debug_assert_eq!(
        coefficients.iter().fold(BigRational::zero(), |a, c| a + c),
        BigRational::one()
    );
    Ok(Some(HullMembership {
        support,
        coefficients,
    }))
}

/// Finds `mu >= 0` with `sum(mu_j cols[j]) = rhs`, returning the strictly
/// positive entries sorted by column.
fn phase_one(cols: &[&[BigInt]], rhs: &[BigInt]) -> Option<Vec<(usize, BigRational)>> {
    let m = rhs.len();
    let n = cols.len();
    let width = n + m + 1;
    let rhs_col = n + m;

    let mut tab: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for r in 0..m {
        let flip = rhs[r].is_negative();
        let mut row = Vec::with_capacity(width);
        for c in cols {
            let v = BigRational::from_integer(c[r].clone());
            row.push(if flip { -v } else { v });
        }
        for a in 0..m {
            row.push(if a == r {
                BigRational::one()
            } else {
                BigRational::zero()
            });
        }
        let b = BigRational::from_integer(rhs[r].clone());
        row.push(if flip { -b } else { b });
        tab.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Reduced costs of "minimize the sum of artificials".
    let mut obj: Vec<BigRational> = vec![BigRational::zero(); width];
    for j in (0..n).chain(std::iter::once(rhs_col)) {
        obj[j] = -tab
            .iter()
            .fold(BigRational::zero(), |acc, row| acc + &row[j]);
    }

    loop {
        // Bland: lowest-index improving column, artificials never re-enter.
        let Some(enter) = (0..n).find(|&j| obj[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, BigRational)> = None;
        for (r, row) in tab.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = &row[rhs_col] / &row[enter];
            let better = match &leave {
                None => true,
                Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        // Phase one is bounded below by zero, so a pivot row always exists.
        let (pr, _) = leave?;
        pivot(&mut tab, &mut obj, pr, enter);
        basis[pr] = enter;
    }

    if !obj[rhs_col].is_zero() {
        return None;
    }
    let mut sol: Vec<(usize, BigRational)> = basis
        .iter()
        .zip(&tab)
        .filter(|(&b, row)| b < n && row[rhs_col].is_positive())
        .map(|(&b, row)| (b, row[rhs_col].clone()))
        .collect();
    sol.sort_by_key(|(j, _)| *j);
    Some(sol)
}

fn pivot(tab: &mut [Vec<BigRational>], obj: &mut [BigRational], pr: usize, pc: usize) {
    let inv = tab[pr][pc].recip();
    for v in tab[pr].iter_mut() {
        if !v.is_zero() {
            *v = &*v * &inv;
        }
    }
    let prow = tab[pr].clone();
    let eliminate = |row: &mut [BigRational]| {
        let f = row[pc].clone();
        if f.is_zero() {
            return;
        }
        for (v, pv) in row.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v = &*v - &f * pv;
            }
        }
    };
    for (r, row) in tab.iter_mut().enumerate() {
        if r != pr {
            eliminate(row);
        }
    }
    eliminate(obj);
}
