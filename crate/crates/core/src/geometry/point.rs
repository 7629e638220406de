use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

use super::GeometryError;

/// A point with exact rational coordinates.
///
/// Alongside the coordinates the point keeps a homogeneous integer form
/// `(x_1 D, ..., x_d D, D)` with `D > 0` the least common denominator. The
/// homogeneous rows are what the predicates and the LP operate on.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Point {
    coords: Vec<BigRational>,
    hom: Vec<BigInt>,
}

impl Point {
    pub fn new(coords: Vec<BigRational>) -> Self {
        let den = coords
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut hom: Vec<BigInt> = coords
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        hom.push(den);
        Point { coords, hom }
    }

    pub fn from_integers(coords: &[i64]) -> Self {
        Point::new(
            coords
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    /// Builds a point from `(numerator, denominator)` pairs.
    ///
    /// Panics if a denominator is zero.
    pub fn from_ratios(coords: &[(i64, i64)]) -> Self {
        Point::new(
            coords
                .iter()
                .map(|&(n, d)| BigRational::new(n.into(), d.into()))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    /// Homogeneous integer coordinates; the last entry is the positive
    /// common denominator.
    pub fn homogeneous(&self) -> &[BigInt] {
        &self.hom
    }

    pub fn denominator(&self) -> &BigInt {
        &self.hom[self.coords.len()]
    }

    /// Approximate coordinates, for display and plotting only.
    pub fn to_f64(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.coords
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// The universe `P`: `n >= 1` distinct points in `R^d`, addressed by their
/// 0-based position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Point>) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::ZeroDimension);
        }
        if points.is_empty() {
            return Err(GeometryError::Empty);
        }
        let mut seen: HashMap<&[BigRational], usize> = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if p.dim() != dim {
                return Err(GeometryError::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            if let Some(&first) = seen.get(p.coords()) {
                return Err(GeometryError::DuplicatePoint { first, second: i });
            }
            seen.insert(p.coords(), i);
        }
        Ok(PointSet { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, id: usize) -> &Point {
        &self.points[id]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    /// The points at `ids`, in the given order; id `i` of the result refers
    /// to `ids[i]` of `self`.
    pub fn subset(&self, ids: &[usize]) -> Result<PointSet, GeometryError> {
        let mut pts = Vec::with_capacity(ids.len());
        for &id in ids {
            let p = self.points.get(id).ok_or(GeometryError::IndexOutOfRange {
                index: id,
                len: self.points.len(),
            })?;
            pts.push(p.clone());
        }
        PointSet::new(self.dim, pts)
    }

    /// All points except those in `removed` (which must be sorted), plus the
    /// map from new ids back to ids of `self`.
    pub fn without(&self, removed: &[usize]) -> (Vec<usize>, Vec<&Point>) {
        let mut keep = Vec::with_capacity(self.len());
        let mut r = removed.iter().peekable();
        for i in 0..self.len() {
            if r.peek() == Some(&&i) {
                r.next();
                continue;
            }
            keep.push(i);
        }
        let pts = keep.iter().map(|&i| &self.points[i]).collect();
        (keep, pts)
    }

    /// Applies `f` to every point. Used for translation tests.
    pub fn map_points(&self, f: impl Fn(&Point) -> Point) -> Result<PointSet, GeometryError> {
        PointSet::new(self.dim, self.points.iter().map(f).collect())
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a Point;
    type IntoIter = std::slice::Iter<'a, Point>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_form_uses_common_denominator() {
        let p = Point::from_ratios(&[(1, 2), (2, 3)]);
        let h: Vec<i64> = p
            .homogeneous()
            .iter()
            .map(|v| v.try_into().unwrap())
            .collect();
        assert_eq!(h, vec![3, 4, 6]);
        let q = Point::from_ratios(&[(-3, 1), (0, 5)]);
        let h: Vec<i64> = q
            .homogeneous()
            .iter()
            .map(|v| v.try_into().unwrap())
            .collect();
        assert_eq!(h, vec![-3, 0, 1]);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(PointSet::new(2, vec![]), Err(GeometryError::Empty));
        assert_eq!(
            PointSet::new(0, vec![Point::from_integers(&[])]),
            Err(GeometryError::ZeroDimension)
        );
        assert_eq!(
            PointSet::new(2, vec![Point::from_integers(&[1, 2, 3])]),
            Err(GeometryError::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
        let dup = PointSet::new(
            2,
            vec![
                Point::from_integers(&[1, 2]),
                Point::from_integers(&[0, 0]),
                Point::from_ratios(&[(2, 2), (4, 2)]),
            ],
        );
        assert_eq!(
            dup,
            Err(GeometryError::DuplicatePoint {
                first: 0,
                second: 2
            })
        );
    }

    #[test]
    fn without_skips_removed_ids() {
        let ps = PointSet::new(1, (0..5).map(|i| Point::from_integers(&[i])).collect()).unwrap();
        let (ids, pts) = ps.without(&[1, 3]);
        assert_eq!(ids, vec![0, 2, 4]);
        assert_eq!(pts.len(), 3);
    }
}
