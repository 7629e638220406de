use num_bigint::{BigInt, Sign};
use num_traits::Zero;

use super::{GeometryError, Point, PointSet};
use crate::combinatorics::{binomial, Combinations};

/// Default cap on predicate calls for [`general_position_check`].
pub const DEFAULT_PREDICATE_BUDGET: u128 = 1_000_000_000;

/// Sign of the orientation determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Negative,
    Degenerate,
    Positive,
}

impl Orientation {
    pub fn as_i8(self) -> i8 {
        match self {
            Orientation::Negative => -1,
            Orientation::Degenerate => 0,
            Orientation::Positive => 1,
        }
    }

    fn from_sign(s: Sign) -> Self {
        match s {
            Sign::Minus => Orientation::Negative,
            Sign::NoSign => Orientation::Degenerate,
            Sign::Plus => Orientation::Positive,
        }
    }
}

/// Sign of the `(d+1) x (d+1)` determinant whose rows are `(1, p_i)`,
/// equivalently of the `d x d` determinant with rows `p_i - p_0`.
///
/// Zero exactly when the points are affinely dependent. The standard simplex
/// `0, e_1, ..., e_d` is positive in every dimension.
pub fn orientation(simplex: &[&Point]) -> Result<Orientation, GeometryError> {
    let d = simplex.first().map(|p| p.dim()).unwrap_or(0);
    if simplex.len() != d + 1 {
        return Err(GeometryError::WrongArity {
            expected: d + 1,
            found: simplex.len(),
        });
    }
    for p in simplex {
        if p.dim() != d {
            return Err(GeometryError::DimensionMismatch {
                expected: d,
                found: p.dim(),
            });
        }
    }
    // Each homogeneous row is (p_i, 1) scaled by a positive denominator;
    // moving the last column to the front multiplies by (-1)^d.
    let rows: Vec<&[BigInt]> = simplex.iter().map(|p| p.homogeneous()).collect();
    let sign = det_sign(&rows);
    Ok(Orientation::from_sign(if d % 2 == 1 {
        -sign
    } else {
        sign
    }))
}

/// [`orientation`] of the points of `ps` at `ids`.
pub fn orientation_of(ps: &PointSet, ids: &[usize]) -> Result<Orientation, GeometryError> {
    let pts: Vec<&Point> = ids.iter().map(|&i| ps.point(i)).collect();
    orientation(&pts)
}

pub(crate) fn det_sign(rows: &[&[BigInt]]) -> Sign {
    match rows.len() {
        1 => rows[0][0].sign(),
        2 => (&rows[0][0] * &rows[1][1] - &rows[0][1] * &rows[1][0]).sign(),
        3 => det3(rows[0], rows[1], rows[2]).sign(),
        _ => bareiss_det(rows.iter().map(|r| r.to_vec()).collect()).sign(),
    }
}

pub(crate) fn det3(a: &[BigInt], b: &[BigInt], c: &[BigInt]) -> BigInt {
    &a[0] * (&b[1] * &c[2] - &b[2] * &c[1]) - &a[1] * (&b[0] * &c[2] - &b[2] * &c[0])
        + &a[2] * (&b[0] * &c[1] - &b[1] * &c[0])
}

/// Fraction-free Gaussian elimination; every division is exact.
fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut negate = false;
    let mut prev = BigInt::from(1);
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Rank of the rows `(p_i, 1)`, i.e. one more than the dimension of the
/// affine hull of `points`.
pub fn affine_rank(points: &[&Point]) -> usize {
    let mut m: Vec<Vec<BigInt>> = points.iter().map(|p| p.homogeneous().to_vec()).collect();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        for r in rank + 1..m.len() {
            if m[r][c].is_zero() {
                continue;
            }
            for j in c + 1..cols {
                let v = &m[r][j] * &m[rank][c] - &m[rank][j] * &m[r][c];
                m[r][j] = v;
            }
            m[r][c] = BigInt::zero();
        }
        rank += 1;
    }
    rank
}

/// True iff every `(d+1)`-subset of `ps` is affinely independent.
///
/// Exhaustive over all `C(n, d+1)` subsets; refuses with
/// [`GeometryError::TooLarge`] past [`DEFAULT_PREDICATE_BUDGET`] calls.
pub fn general_position_check(ps: &PointSet) -> Result<bool, GeometryError> {
    general_position_check_with_budget(ps, DEFAULT_PREDICATE_BUDGET)
}

pub fn general_position_check_with_budget(
    ps: &PointSet,
    budget: u128,
) -> Result<bool, GeometryError> {
    let n = ps.len();
    let d = ps.dim();
    if n <= d + 1 {
        let pts: Vec<&Point> = ps.iter().collect();
        return Ok(affine_rank(&pts) == n);
    }
    let required = binomial(n as u64, (d + 1) as u64);
    if required > budget {
        return Err(GeometryError::TooLarge { required, budget });
    }
    for ids in Combinations::new(n, d + 1) {
        let rows: Vec<&[BigInt]> = ids.iter().map(|&i| ps.point(i).homogeneous()).collect();
        if det_sign(&rows) == Sign::NoSign {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(coords: &[&[i64]]) -> Vec<Point> {
        coords.iter().map(|c| Point::from_integers(c)).collect()
    }

    fn orient(coords: &[&[i64]]) -> Orientation {
        let p = pts(coords);
        let refs: Vec<&Point> = p.iter().collect();
        orientation(&refs).unwrap()
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orient(&[&[0, 0], &[1, 0], &[0, 1]]), Orientation::Positive);
        assert_eq!(
            orient(&[&[0, 0], &[1, 1], &[2, 2]]),
            Orientation::Degenerate
        );
        assert_eq!(
            orient(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
            Orientation::Positive
        );
        assert_eq!(orient(&[&[0, 1], &[1, 0], &[0, 0]]), Orientation::Negative);
        assert_eq!(orient(&[&[1, 0], &[0, 0], &[0, 1]]), Orientation::Negative);
        assert_eq!(orient(&[&[3], &[5]]), Orientation::Positive);
        assert_eq!(orient(&[&[5], &[3]]), Orientation::Negative);
    }

    #[test]
    fn orientation_uses_rational_coordinates() {
        let a = Point::from_ratios(&[(1, 3), (0, 1)]);
        let b = Point::from_ratios(&[(2, 3), (1, 7)]);
        let c = Point::from_ratios(&[(1, 1), (2, 7)]);
        assert_eq!(orientation(&[&a, &b, &c]).unwrap(), Orientation::Degenerate);
        let c2 = Point::from_ratios(&[(1, 1), (3, 7)]);
        assert_eq!(orientation(&[&a, &b, &c2]).unwrap(), Orientation::Positive);
    }

    #[test]
    fn orientation_rejects_bad_arity() {
        let p = pts(&[&[0, 0], &[1, 0]]);
        let refs: Vec<&Point> = p.iter().collect();
        assert_eq!(
            orientation(&refs),
            Err(GeometryError::WrongArity {
                expected: 3,
                found: 2
            })
        );
        let mixed = [
            Point::from_integers(&[0, 0]),
            Point::from_integers(&[1, 0, 0]),
            Point::from_integers(&[0, 1]),
        ];
        let refs: Vec<&Point> = mixed.iter().collect();
        assert!(matches!(
            orientation(&refs),
            Err(GeometryError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let m: Vec<Vec<BigInt>> = vec![
            vec![2.into(), (-1).into(), 0.into(), 3.into()],
            vec![1.into(), 4.into(), (-2).into(), 0.into()],
            vec![0.into(), 5.into(), 1.into(), (-1).into()],
            vec![3.into(), 0.into(), 2.into(), 1.into()],
        ];
        // det computed independently with sympy
        assert_eq!(bareiss_det(m), BigInt::from(-103));
        let zero_pivot: Vec<Vec<BigInt>> = vec![
            vec![0.into(), 1.into(), 2.into()],
            vec![1.into(), 0.into(), 3.into()],
            vec![4.into(), (-3).into(), 8.into()],
        ];
        assert_eq!(bareiss_det(zero_pivot), BigInt::from(-2));
    }

    #[test]
    fn general_position_examples() {
        let square = PointSet::new(2, pts(&[&[0, 0], &[1, 0], &[1, 1], &[0, 1]])).unwrap();
        assert_eq!(general_position_check(&square), Ok(true));
        let collinear = PointSet::new(2, pts(&[&[0, 0], &[1, 1], &[2, 2], &[5, 0]])).unwrap();
        assert_eq!(general_position_check(&collinear), Ok(false));
        let small = PointSet::new(3, pts(&[&[0, 0, 0], &[1, 1, 1], &[2, 2, 2]])).unwrap();
        assert_eq!(general_position_check(&small), Ok(false));
        assert!(matches!(
            general_position_check_with_budget(&square, 3),
            Err(GeometryError::TooLarge {
                required: 4,
                budget: 3
            })
        ));
    }

    #[test]
    fn affine_rank_counts_independent_points() {
        let p = pts(&[&[0, 0, 0], &[1, 0, 0], &[2, 0, 0], &[0, 1, 0]]);
        let refs: Vec<&Point> = p.iter().collect();
        assert_eq!(affine_rank(&refs), 3);
    }
}
