//! Randomized property testing for convex position of point sets in `R^d`.
//!
//! Two sampling testers are provided: [`tester::convex_minus`] rejects sets
//! that are far from convex position and returns a `(d+2)`-point witness of
//! non-convexity, and [`tester::convex_plus`] accepts sets that are close to
//! convex position and returns a sampled subset that is itself in convex
//! position. All geometric decisions are made in exact rational arithmetic,
//! so every certificate either tester emits can be re-verified independently.
//!
//! Supporting modules:
//!
//! - [`geometry`]: exact predicates, LP-based hull membership, and the
//!   convex-position decision with witness extraction.
//! - [`sampler`]: seeded uniform `s`-subset selection (Floyd's method).
//! - [`oracles`]: brute-force and analytic ground truth (distance to convex
//!   position, planar maximum convex subset, the sampling-bound calculators).
//! - [`generators`]: deterministic instances with known convexity or farness.

pub mod combinatorics;
pub mod generators;
pub mod geometry;
pub mod oracles;
pub mod sampler;
pub mod tester;

pub use geometry::{
    convex_position_test, general_position_check, orientation, point_in_hull, ConvexityResult,
    GeometryError, HullMembership, NegativeWitness, Orientation, Point, PointSet,
};
pub use sampler::{random_subset, split_seed, SampleRecord, Seed};
pub use tester::{
    approximation_ratio, convex_minus, convex_plus, derive_close_params, derive_far_params,
    CloseParams, Decision, FarParams, TesterError, TrialRecord, Verdict,
};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
