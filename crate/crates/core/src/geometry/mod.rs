//! Exact geometric predicates and the convex-position decision.
//!
//! Every routine here works on arbitrary-precision rationals. Nothing in this
//! module rounds, so the same input bits always produce the same output bits.

mod convexity;
mod linalg;
mod lp;
mod point;
mod predicates;

pub use convexity::{convex_position_test, ConvexityResult, NegativeWitness};
pub use linalg::solve;
pub use lp::{point_in_hull, HullMembership};
pub use point::{Point, PointSet};
pub use predicates::{
    affine_rank, general_position_check, general_position_check_with_budget, orientation,
    orientation_of, Orientation, DEFAULT_PREDICATE_BUDGET,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("point set must contain at least one point")]
    Empty,
    #[error("points {first} and {second} are identical")]
    DuplicatePoint { first: usize, second: usize },
    #[error("expected {expected} points, found {found}")]
    WrongArity { expected: usize, found: usize },
    #[error("too large to certify: {required} predicate calls exceed budget {budget}")]
    TooLarge { required: u128, budget: u128 },
    #[error("index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },
}
