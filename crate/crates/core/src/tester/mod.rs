//! The two sampling testers.
//!
//! [`convex_minus`] is built to reject inputs that are far from convex
//! position; [`convex_plus`] is built to accept inputs that are close to it.
//! Each run carries the seeds and samples it used, so any verdict can be
//! replayed. Certificates are exact: a rejection always comes with a witness
//! that re-verifies, an acceptance from [`convex_plus`] with a subset that is
//! in convex position. For inputs that are neither far nor close the verdict
//! carries no probabilistic guarantee.

mod params;

pub use params::{
    approximation_floor_at_least, approximation_floor_f64, approximation_ratio, ceil_scaled_root,
    certified_sample_size, default_delta, derive_close_params, derive_far_params,
    meets_approximation_floor, s0_bounds, s0_estimate, CloseParams, Constraint, FarParams,
    DEFAULT_REPETITIONS, S0_PRECISION_BITS,
};

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{convex_position_test, NegativeWitness, PointSet};
use crate::sampler::{random_subset, split_seed, SampleRecord, SamplerError, Seed};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TesterError {
    #[error("constraint `{constraint}` violated: {detail}")]
    ConstraintViolated {
        constraint: Constraint,
        detail: String,
    },
    #[error("approximation ratio needs 1 ≤ cert_size ≤ opt, got {cert_size}/{opt}")]
    InvalidRatio { cert_size: usize, opt: usize },
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub sample: SampleRecord,
    pub sample_convex: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub decision: Decision,
    /// Present exactly when the decision is a rejection; ids refer to the
    /// tested point set.
    pub negative: Option<NegativeWitness>,
    /// Sampled ids found in convex position (close tester only).
    pub positive: Option<Vec<usize>>,
    pub trials: Vec<TrialRecord>,
}

impl Verdict {
    pub fn is_reject(&self) -> bool {
        self.decision == Decision::Reject
    }
}

/// Knobs for [`convex_minus_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FarOptions {
    pub repetitions: u32,
    /// Run the repetitions concurrently. The verdict is identical to the
    /// sequential one: the lowest rejecting trial wins and later trials are
    /// dropped from the log.
    pub parallel: bool,
}

impl Default for FarOptions {
    fn default() -> Self {
        FarOptions {
            repetitions: DEFAULT_REPETITIONS,
            parallel: false,
        }
    }
}

struct TrialOutcome {
    record: TrialRecord,
    witness: Option<NegativeWitness>,
}

fn run_trial(
    ps: &PointSet,
    s: usize,
    seed: Seed,
    index: usize,
) -> Result<TrialOutcome, TesterError> {
    let sample = random_subset(ps.len(), s, split_seed(seed, index as u64))?;
    let sub = ps
        .subset(&sample.indices)
        .expect("sample indices are in range and distinct");
    let result = convex_position_test(&sub);
    let witness = result.witness.map(|w| w.remap(&sample.indices));
    Ok(TrialOutcome {
        record: TrialRecord {
            trial_index: index,
            sample,
            sample_convex: result.in_convex_position,
        },
        witness,
    })
}

/// The far tester with the default 22 repetitions, run sequentially.
pub fn convex_minus(
    ps: &PointSet,
    epsilon: &BigRational,
    seed: Seed,
) -> Result<Verdict, TesterError> {
    convex_minus_with(ps, epsilon, seed, FarOptions::default())
}

/// Draws up to `repetitions` independent samples of size `s = ceil(s0)` and
/// tests each for convex position, rejecting on the first one that is not.
/// Trial `i` uses the seed `split_seed(seed, i)`.
pub fn convex_minus_with(
    ps: &PointSet,
    epsilon: &BigRational,
    seed: Seed,
    options: FarOptions,
) -> Result<Verdict, TesterError> {
    let mut params = derive_far_params(ps.len(), ps.dim(), epsilon)?;
    if options.repetitions == 0 {
        return Err(TesterError::ConstraintViolated {
            constraint: Constraint::PositiveRepetitions,
            detail: "repetitions = 0".into(),
        });
    }
    params.repetitions = options.repetitions;
    let reps = params.repetitions as usize;

    let outcomes: Vec<TrialOutcome> = if options.parallel {
        let mut all = (0..reps)
            .into_par_iter()
            .map(|i| run_trial(ps, params.s, seed, i))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = all.iter().position(|o| o.witness.is_some()) {
            all.truncate(first + 1);
        }
        all
    } else {
        let mut out = Vec::with_capacity(reps);
        for i in 0..reps {
            let o = run_trial(ps, params.s, seed, i)?;
            let stop = o.witness.is_some();
            out.push(o);
            if stop {
                break;
            }
        }
        out
    };

    let mut negative = None;
    let mut trials = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        if o.witness.is_some() {
            negative = o.witness;
        }
        trials.push(o.record);
    }
    Ok(Verdict {
        decision: if negative.is_some() {
            Decision::Reject
        } else {
            Decision::Accept
        },
        negative,
        positive: None,
        trials,
    })
}

/// The close tester: one sample of size `ceil(1/(6 epsilon))`, accepted with
/// the sample as certificate when it is in convex position. The sample seed
/// is `split_seed(seed, 0)`.
pub fn convex_plus(
    ps: &PointSet,
    epsilon: &BigRational,
    delta: &BigRational,
    seed: Seed,
) -> Result<Verdict, TesterError> {
    let params = derive_close_params(ps.len(), ps.dim(), epsilon, delta)?;
    let o = run_trial(ps, params.s, seed, 0)?;
    let (decision, positive) = match o.witness {
        None => (Decision::Accept, Some(o.record.sample.indices.clone())),
        Some(_) => (Decision::Reject, None),
    };
    Ok(Verdict {
        decision,
        negative: o.witness,
        positive,
        trials: vec![o.record],
    })
}
