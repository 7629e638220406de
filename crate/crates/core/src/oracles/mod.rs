//! Ground truth for testing the testers.
//!
//! Exhaustive and exact computations that are too slow for the testers
//! themselves: distance to convex position, the planar maximum convex subset,
//! constructive checks of the cone and disjoint-witness arguments behind the
//! far tester, and calculators for its sampling bound.

pub mod bounds;
pub mod brute;
mod lemmas;
mod max_subset;
mod removal;

pub use bounds::{
    exact_hit_probability, hit_frequency, lemma3_constraints, lemma3_factors, lemma3_monte_carlo,
    old_lemma34_counterexample, s0_dominates_log_bound, AppendixReport, BoundFactors,
    LemmaScenario, MonteCarloEstimate,
};
pub use lemmas::{lemma1_verify, lemma2_construct, Lemma1Outcome, Lemma2Construction};
pub use max_subset::{max_convex_subset_2d, MaxConvexSubset};
pub use removal::{min_removal_to_convex, FarnessCertificate, MIN_REMOVAL_BUDGET};

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::sampler::SamplerError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("n = {n} exceeds the exhaustive search budget of {budget} points")]
    TooLarge { n: usize, budget: usize },
    #[error("expected dimension {expected}, found {found}")]
    WrongDimension { expected: usize, found: usize },
    #[error("point {id} is extreme")]
    NotInterior { id: usize },
    #[error("input is not in general position: {0}")]
    Degenerate(String),
    #[error("remaining set is in convex position at round {round}; the input is not far enough")]
    ConvexRound { round: usize },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("constraint `{constraint}` violated")]
    Constraint { constraint: &'static str },
    #[error("check `{check}` failed: {detail}")]
    CheckFailed { check: &'static str, detail: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

fn failed(check: &'static str, detail: impl Into<String>) -> OracleError {
    OracleError::CheckFailed {
        check,
        detail: detail.into(),
    }
}
