//! JSON records written to stdout. The layout of [`ResultRecord`] is
//! published as `docs/result_record.schema.json`.

use convextest::tester::{CloseParams, FarParams};
use convextest::{Decision, NegativeWitness, Verdict};
use serde::{Deserialize, Serialize};

/// One tester run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub command: String,
    pub params: Params,
    /// The seed of this run; passing it back with `--seed` replays the run.
    pub seed: u64,
    pub decision: Decision,
    pub certificate: Option<Certificate>,
    pub trials: Vec<Trial>,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub n: usize,
    pub d: usize,
    pub epsilon: String,
    pub delta: Option<String>,
    pub k: Option<u64>,
    pub ell: Option<u64>,
    pub s: usize,
    pub repetitions: Option<u32>,
}

impl From<&FarParams> for Params {
    fn from(p: &FarParams) -> Self {
        Params {
            n: p.n,
            d: p.d,
            epsilon: p.epsilon.to_string(),
            delta: None,
            k: Some(p.k),
            ell: Some(p.ell),
            s: p.s,
            repetitions: Some(p.repetitions),
        }
    }
}

impl From<&CloseParams> for Params {
    fn from(p: &CloseParams) -> Self {
        Params {
            n: p.n,
            d: p.d,
            epsilon: p.epsilon.to_string(),
            delta: Some(p.delta.to_string()),
            k: None,
            ell: None,
            s: p.s,
            repetitions: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateKind {
    /// `d+2` ids, one of them (`interior_id`) a convex combination of the
    /// `support` ids with the given coefficients.
    Negative,
    /// Ids of a subset in convex position.
    Positive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    /// Increasing.
    pub ids: Vec<usize>,
    pub interior_id: Option<usize>,
    pub support: Vec<usize>,
    /// Exact rationals, `coefficients[i]` pairs with `support[i]`.
    pub coefficients: Vec<String>,
}

impl Certificate {
    pub fn negative(w: &NegativeWitness) -> Self {
        Certificate {
            kind: CertificateKind::Negative,
            ids: w.ids(),
            interior_id: Some(w.interior_id),
            support: w.support.clone(),
            coefficients: w.coefficients.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn positive(ids: &[usize]) -> Self {
        Certificate {
            kind: CertificateKind::Positive,
            ids: ids.to_vec(),
            interior_id: None,
            support: Vec::new(),
            coefficients: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trial {
    pub index: usize,
    /// Seed of this trial's sample.
    pub seed: u64,
    pub sample_convex: bool,
}

impl ResultRecord {
    pub fn new(command: &str, params: Params, seed: u64, verdict: &Verdict, wall_ms: u64) -> Self {
        let certificate = match (&verdict.negative, &verdict.positive) {
            (Some(w), _) => Some(Certificate::negative(w)),
            (None, Some(ids)) => Some(Certificate::positive(ids)),
            (None, None) => None,
        };
        ResultRecord {
            command: command.to_string(),
            params,
            seed,
            decision: verdict.decision,
            certificate,
            trials: verdict
                .trials
                .iter()
                .map(|t| Trial {
                    index: t.trial_index,
                    seed: t.sample.seed.0,
                    sample_convex: t.sample_convex,
                })
                .collect(),
            wall_ms,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use convextest::generators::gen_sawtooth;
    use convextest::{convex_minus, BigRational, Seed};

    #[test]
    fn records_round_trip() {
        let ps = gen_sawtooth(1024, Seed(0)).unwrap();
        let eps = BigRational::new(1.into(), 10.into());
        let v = convex_minus(&ps, &eps, Seed(3)).unwrap();
        let params = Params::from(&convextest::derive_far_params(1024, 2, &eps).unwrap());
        let r = ResultRecord::new("test-far", params, 3, &v, 12);
        assert!(matches!(
            r.certificate,
            Some(Certificate {
                kind: CertificateKind::Negative,
                ..
            })
        ));
        let text = serde_json::to_string(&r).unwrap();
        let back: ResultRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);

        let pos = Certificate::positive(&[1, 4, 9]);
        let text = serde_json::to_string(&pos).unwrap();
        assert_eq!(
            text,
            r#"{"kind":"positive","ids":[1,4,9],"interior_id":null,"support":[],"coefficients":[]}"#
        );
        assert_eq!(serde_json::from_str::<Certificate>(&text).unwrap(), pos);
    }
}
