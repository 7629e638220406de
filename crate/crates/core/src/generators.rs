//! Deterministic instances whose convexity, farness or closeness is known by
//! construction.
//!
//! All outputs are exact and depend only on the arguments and the seed.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::binomial;
use crate::geometry::{
    general_position_check_with_budget, orientation, GeometryError, Point, PointSet,
};
use crate::sampler::{random_subset, split_seed, SampleRng, Seed};
use crate::tester::{default_delta, derive_close_params, TesterError};

/// Exhaustive general-position certification is skipped past this many
/// orientation tests; a random spot check runs instead.
pub const CERTIFY_BUDGET: u128 = 400_000;

const SPOT_CHECKS: usize = 10_000;
const ATTEMPTS: u64 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("{kind} needs {requirement}, got n = {n}, d = {d}")]
    InvalidShape {
        kind: GenKind,
        requirement: &'static str,
        n: usize,
        d: usize,
    },
    #[error("{kind} needs an epsilon")]
    MissingEpsilon { kind: GenKind },
    #[error("no configuration in general position found after {attempts} attempts")]
    GeneralPosition { attempts: u64 },
    #[error(transparent)]
    Params(#[from] TesterError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    ConvexCircle,
    ConvexMomentCurve,
    Sawtooth,
    ConvexPlusInterior,
    TriangleCentroid,
}

impl GenKind {
    pub const ALL: [GenKind; 5] = [
        GenKind::ConvexCircle,
        GenKind::ConvexMomentCurve,
        GenKind::Sawtooth,
        GenKind::ConvexPlusInterior,
        GenKind::TriangleCentroid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GenKind::ConvexCircle => "convex-circle",
            GenKind::ConvexMomentCurve => "convex-moment-curve",
            GenKind::Sawtooth => "sawtooth",
            GenKind::ConvexPlusInterior => "convex-plus-interior",
            GenKind::TriangleCentroid => "triangle-centroid",
        }
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GenKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GenKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown generator kind `{s}`"))
    }
}

/// What is known about a generated set without running any oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructionTag {
    /// In convex position.
    Convex,
    /// Far from convex position for every epsilon < 1/4 (and 1/4-close).
    FarBelowQuarter,
    /// Becomes convex after removing the listed interior points.
    Close {
        #[serde(serialize_with = "display")]
        epsilon: BigRational,
    },
    /// Not in convex position.
    NotConvex,
}

fn display<T: fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl fmt::Display for ConstructionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstructionTag::Convex => f.write_str("convex"),
            ConstructionTag::FarBelowQuarter => f.write_str("far<1/4"),
            ConstructionTag::Close { epsilon } => write!(f, "{epsilon}-close"),
            ConstructionTag::NotConvex => f.write_str("not-convex"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    pub d: usize,
    /// Closeness target for `convex-plus-interior`.
    pub epsilon: Option<BigRational>,
    pub seed: Seed,
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub points: PointSet,
    pub tag: ConstructionTag,
    /// Ids whose removal leaves a convex set, when known.
    pub interior_ids: Vec<usize>,
}

/// Dispatches on `spec.kind`.
pub fn generate(spec: &GenSpec) -> Result<Generated, GeneratorError> {
    match spec.kind {
        GenKind::ConvexCircle => {
            if spec.d != 2 {
                return Err(shape(spec.kind, "d = 2", spec.n, spec.d));
            }
            Ok(convex(gen_convex_circle(spec.n, spec.seed)?))
        }
        GenKind::ConvexMomentCurve => Ok(convex(gen_moment_curve(spec.n, spec.d, spec.seed)?)),
        GenKind::Sawtooth => {
            if spec.d != 2 {
                return Err(shape(spec.kind, "d = 2", spec.n, spec.d));
            }
            let ps = gen_sawtooth(spec.n, spec.seed)?;
            let teeth = (spec.n / 2..spec.n).collect();
            Ok(Generated {
                points: ps,
                tag: ConstructionTag::FarBelowQuarter,
                interior_ids: teeth,
            })
        }
        GenKind::ConvexPlusInterior => {
            let epsilon = spec
                .epsilon
                .as_ref()
                .ok_or(GeneratorError::MissingEpsilon { kind: spec.kind })?;
            let inst = gen_close(spec.n, spec.d, epsilon, spec.seed)?;
            Ok(Generated {
                points: inst.points,
                tag: ConstructionTag::Close {
                    epsilon: epsilon.clone(),
                },
                interior_ids: inst.interior_ids,
            })
        }
        GenKind::TriangleCentroid => Ok(Generated {
            points: gen_triangle_centroid(),
            tag: ConstructionTag::NotConvex,
            interior_ids: vec![3],
        }),
    }
}

fn convex(points: PointSet) -> Generated {
    Generated {
        points,
        tag: ConstructionTag::Convex,
        interior_ids: Vec::new(),
    }
}

fn shape(kind: GenKind, requirement: &'static str, n: usize, d: usize) -> GeneratorError {
    GeneratorError::InvalidShape {
        kind,
        requirement,
        n,
        d,
    }
}

fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

/// The point of the unit circle with tan-half-angle `a / b`.
fn circle_point(a: &BigInt, b: &BigInt) -> Point {
    let w = a * a + b * b;
    Point::new(vec![
        BigRational::new(b * b - a * a, w.clone()),
        BigRational::new(2 * a * b, w),
    ])
}

/// `n` points in convex and general position: the unit circle for `d = 2`,
/// the moment curve for `d >= 3`.
pub fn gen_convex(n: usize, d: usize, seed: Seed) -> Result<PointSet, GeneratorError> {
    if d == 2 {
        gen_convex_circle(n, seed)
    } else {
        gen_moment_curve(n, d, seed)
    }
}

const CIRCLE_DENOM_BITS: u32 = 16;
const CIRCLE_RANGE: i64 = 1 << 18;

/// Distinct rational points on the unit circle at tan-half-angle parameters
/// `a / 2^16` with distinct integers `|a| <= 2^18`, ordered by angle.
///
/// Distinct points of a circle are in convex position and no three are
/// collinear, so no certification is needed.
pub fn gen_convex_circle(n: usize, seed: Seed) -> Result<PointSet, GeneratorError> {
    let slots = 2 * CIRCLE_RANGE as usize + 1;
    if n < 3 || n > slots {
        return Err(shape(GenKind::ConvexCircle, "3 ≤ n ≤ 2^19 + 1", n, 2));
    }
    let b = int(1 << CIRCLE_DENOM_BITS);
    let sample = random_subset(slots, n, seed).expect("n within range");
    let points = sample
        .indices
        .iter()
        .map(|&i| circle_point(&int(i as i64 - CIRCLE_RANGE), &b))
        .collect();
    Ok(PointSet::new(2, points)?)
}

/// Points `(t, t^2, ..., t^d)` at distinct parameters `t = a / 2^10`.
///
/// Any `d+1` distinct points of the moment curve are affinely independent
/// (Vandermonde), and every point is extreme, so the output is convex and in
/// general position by construction.
pub fn gen_moment_curve(n: usize, d: usize, seed: Seed) -> Result<PointSet, GeneratorError> {
    if d < 2 || n < d + 1 {
        return Err(shape(GenKind::ConvexMomentCurve, "d ≥ 2 and n ≥ d+1", n, d));
    }
    let range = n.max(1024) as i64;
    let sample = random_subset(2 * range as usize + 1, n, seed).expect("n within range");
    let den = int(1 << 10);
    let points = sample
        .indices
        .iter()
        .map(|&i| {
            let t = BigRational::new(int(i as i64 - range), den.clone());
            let mut coords = Vec::with_capacity(d);
            let mut power = t.clone();
            for _ in 0..d {
                coords.push(power.clone());
                power = &power * &t;
            }
            Point::new(coords)
        })
        .collect();
    Ok(PointSet::new(d, points)?)
}

/// The sawtooth configuration: `n/2` rational points of the unit circle at
/// nearly regular angles, followed by `n/2` teeth, tooth `j` being the
/// midpoint of side `(v_j, v_{j+1})` pulled toward the center by the factor
/// `1 - 4/n^3`.
///
/// The pull keeps each tooth strictly inside the polygon, yet far closer to
/// its side than any chord that skips a vertex, so a tooth is interior to a
/// subset exactly when both endpoints of its side are present. Hence the
/// largest convex subset has `3n/4` points. The seed rotates the polygon.
pub fn gen_sawtooth(n: usize, seed: Seed) -> Result<PointSet, GeneratorError> {
    if n < 8 || !n.is_multiple_of(4) {
        return Err(shape(GenKind::Sawtooth, "n ≥ 8 and 4 | n", n, 2));
    }
    let m = n / 2;
    let pull = BigRational::new(int(4), BigInt::from(n).pow(3));
    let keep = BigRational::from_integer(int(1)) - pull;
    let half = BigRational::new(int(1), int(2));
    for attempt in 0..ATTEMPTS {
        let mut rng = SampleRng::new(split_seed(seed, attempt));
        let phase = (1.0 + 6.0 * rng.unit_f64()) / 8.0;
        let scale = int(1 << 24);
        let vertices: Vec<Point> = (0..m)
            .map(|j| {
                let mut theta = 2.0 * std::f64::consts::PI * (j as f64 + phase) / m as f64;
                if theta > std::f64::consts::PI {
                    theta -= 2.0 * std::f64::consts::PI;
                }
                let a = ((theta / 2.0).tan() * (1u64 << 24) as f64).round() as i64;
                circle_point(&int(a), &scale)
            })
            .collect();
        let teeth: Vec<Point> = (0..m)
            .map(|j| {
                let (p, q) = (&vertices[j], &vertices[(j + 1) % m]);
                Point::new(
                    p.coords()
                        .iter()
                        .zip(q.coords())
                        .map(|(a, b)| (a + b) * &half * &keep)
                        .collect(),
                )
            })
            .collect();
        let ps = PointSet::new(2, vertices.into_iter().chain(teeth).collect())?;
        if plausibly_general(&ps, &mut rng) {
            return Ok(ps);
        }
    }
    Err(GeneratorError::GeneralPosition { attempts: ATTEMPTS })
}

/// Exhaustive general-position check within [`CERTIFY_BUDGET`], otherwise
/// [`SPOT_CHECKS`] random `(d+1)`-subsets.
fn plausibly_general(ps: &PointSet, rng: &mut SampleRng) -> bool {
    match general_position_check_with_budget(ps, CERTIFY_BUDGET) {
        Ok(ok) => ok,
        Err(_) => spot_check_general_position(ps, SPOT_CHECKS, Seed(rng.next_u64())),
    }
}

/// Tests `checks` random `(d+1)`-subsets for affine independence.
pub fn spot_check_general_position(ps: &PointSet, checks: usize, seed: Seed) -> bool {
    let k = ps.dim() + 1;
    if ps.len() < k {
        return true;
    }
    (0..checks).all(|i| {
        let ids = random_subset(ps.len(), k, split_seed(seed, i as u64))
            .expect("k <= n")
            .indices;
        let pts: Vec<&Point> = ids.iter().map(|&i| ps.point(i)).collect();
        orientation(&pts).map(|o| o.as_i8() != 0).unwrap_or(false)
    })
}

/// A convex set with some interior points: `P = C ∪ D`.
#[derive(Debug, Clone)]
pub struct CloseInstance {
    pub points: PointSet,
    /// Ids of `C`, in convex position.
    pub convex_ids: Vec<usize>,
    /// Ids of `D`, each strictly inside `conv(C)`.
    pub interior_ids: Vec<usize>,
}

/// Orientation tests allowed for certifying interior points.
const INTERIOR_CERTIFY_BUDGET: u128 = 20_000_000;

/// `gen_convex(n - interior, d)` followed by `interior` points, each a convex
/// combination of `d+1` random points of `C` with random positive weights.
/// Weights are redrawn if the new point breaks general position (checked
/// exhaustively when the total work fits [`INTERIOR_CERTIFY_BUDGET`]).
pub fn gen_convex_plus_interior(
    n: usize,
    d: usize,
    interior: usize,
    seed: Seed,
) -> Result<CloseInstance, GeneratorError> {
    if interior >= n || n - interior < d + 2 {
        return Err(shape(
            GenKind::ConvexPlusInterior,
            "at least d+2 convex points",
            n,
            d,
        ));
    }
    let hull_size = n - interior;
    let base = gen_convex(hull_size, d, split_seed(seed, 0))?;
    let mut points: Vec<Point> = base.points().to_vec();
    let certify =
        binomial(n as u64, d as u64).saturating_mul(interior as u128) <= INTERIOR_CERTIFY_BUDGET;
    let mut rng = SampleRng::new(split_seed(seed, 1));
    for _ in 0..interior {
        let mut placed = false;
        for _ in 0..ATTEMPTS {
            let ids = random_subset(hull_size, d + 1, Seed(rng.next_u64()))
                .expect("d+1 <= hull size")
                .indices;
            let weights: Vec<BigRational> = (0..=d)
                .map(|_| BigRational::from_integer(int(1 + rng.below(1 << 16) as i64)))
                .collect();
            let total = weights.iter().fold(BigRational::zero(), |a, w| a + w);
            let mut coords = vec![BigRational::zero(); d];
            for (&id, w) in ids.iter().zip(&weights) {
                for (c, x) in coords.iter_mut().zip(base.point(id).coords()) {
                    *c += w * x;
                }
            }
            let candidate = Point::new(coords.into_iter().map(|c| c / &total).collect());
            if points.contains(&candidate) {
                continue;
            }
            if certify && !keeps_general_position(&points, &candidate, d) {
                continue;
            }
            points.push(candidate);
            placed = true;
            break;
        }
        if !placed {
            return Err(GeneratorError::GeneralPosition { attempts: ATTEMPTS });
        }
    }
    Ok(CloseInstance {
        points: PointSet::new(d, points)?,
        convex_ids: (0..hull_size).collect(),
        interior_ids: (hull_size..n).collect(),
    })
}

fn keeps_general_position(existing: &[Point], candidate: &Point, d: usize) -> bool {
    crate::combinatorics::Combinations::new(existing.len(), d).all(|ids| {
        let mut pts: Vec<&Point> = ids.iter().map(|&i| &existing[i]).collect();
        pts.push(candidate);
        orientation(&pts).map(|o| o.as_i8() != 0).unwrap_or(false)
    })
}

/// An `epsilon`-close instance: `floor(epsilon n)` interior points added to a
/// convex set. `(n, epsilon)` must satisfy the close tester's constraints
/// with the default `delta = 1/10`.
pub fn gen_close(
    n: usize,
    d: usize,
    epsilon: &BigRational,
    seed: Seed,
) -> Result<CloseInstance, GeneratorError> {
    derive_close_params(n, d, epsilon, &default_delta())?;
    let interior = (epsilon * BigRational::from_integer(BigInt::from(n)))
        .floor()
        .to_integer()
        .to_usize()
        .expect("interior count fits");
    gen_convex_plus_interior(n, d, interior, seed)
}

/// `{(0,0), (6,0), (0,6), (2,2)}`: a triangle and its centroid.
pub fn gen_triangle_centroid() -> PointSet {
    PointSet::new(
        2,
        [[0, 0], [6, 0], [0, 6], [2, 2]]
            .iter()
            .map(|c| Point::from_integers(c))
            .collect(),
    )
    .expect("fixture is valid")
}

/// Small hand-built planar sets.
pub mod fixtures {
    use super::*;

    fn on_circle(tans: &[(i64, i64)]) -> Vec<Point> {
        tans.iter()
            .map(|&(a, b)| circle_point(&int(a), &int(b)))
            .collect()
    }

    fn inset_midpoint(p: &Point, q: &Point, keep: &BigRational) -> Point {
        let half = BigRational::new(int(1), int(2));
        Point::new(
            p.coords()
                .iter()
                .zip(q.coords())
                .map(|(a, b)| (a + b) * &half * keep)
                .collect(),
        )
    }

    /// Seven points of a nearly regular heptagon plus teeth on two
    /// non-adjacent sides: 9 points, 2 removals needed, so `2/9`-close and
    /// `1/5`-far.
    pub fn two_teeth_heptagon() -> PointSet {
        // tan(theta/2) for theta = 2 pi j / 7 - pi + pi/7, rounded to 1/64ths
        let v = on_circle(&[
            (-289, 64),
            (-80, 64),
            (-31, 64),
            (0, 64),
            (31, 64),
            (80, 64),
            (289, 64),
        ]);
        let keep = BigRational::new(int(49), int(50));
        let t0 = inset_midpoint(&v[0], &v[1], &keep);
        let t3 = inset_midpoint(&v[3], &v[4], &keep);
        let mut pts = v;
        pts.push(t0);
        pts.push(t3);
        PointSet::new(2, pts).expect("fixture is valid")
    }

    /// Eight points of the unit circle and one point near the center.
    pub fn octagon_and_center() -> PointSet {
        let mut pts = on_circle(&[
            (-5, 2),
            (-1, 1),
            (-2, 5),
            (0, 1),
            (1, 4),
            (3, 4),
            (3, 2),
            (5, 1),
        ]);
        pts.push(Point::from_ratios(&[(1, 7), (-1, 11)]));
        PointSet::new(2, pts).expect("fixture is valid")
    }
}
