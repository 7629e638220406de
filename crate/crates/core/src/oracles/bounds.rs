//! Calculators for the probability that a random `s`-subset swallows at
//! least one of `k` disjoint `ell`-sets.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::OracleError;
use crate::combinatorics::binomial;
use crate::sampler::{random_subset, split_seed, Seed};
use crate::tester::{ceil_scaled_root, s0_bounds};

fn int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn as_string<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// `k` pairwise disjoint `ell`-subsets of `0..n` and a sample size `s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaScenario {
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    pub s: usize,
    pub witness_sets: Vec<Vec<usize>>,
}

impl LemmaScenario {
    /// Uses the consecutive blocks `[i ell, (i+1) ell)` as witness sets.
    pub fn new(n: usize, k: usize, ell: usize, s: usize) -> Result<Self, OracleError> {
        let sets = (0..k).map(|i| (i * ell..(i + 1) * ell).collect()).collect();
        if k.checked_mul(ell).is_none_or(|t| t > n) {
            return Err(OracleError::InvalidScenario(format!(
                "k ell = {k} * {ell} > n = {n}"
            )));
        }
        Self::with_sets(n, s, sets)
    }

    pub fn with_sets(n: usize, s: usize, sets: Vec<Vec<usize>>) -> Result<Self, OracleError> {
        let k = sets.len();
        let ell = sets.first().map_or(0, Vec::len);
        if k == 0 || ell == 0 {
            return Err(OracleError::InvalidScenario("no witness sets".into()));
        }
        if s < ell || s > n {
            return Err(OracleError::InvalidScenario(format!(
                "need ell <= s <= n, got ell = {ell}, s = {s}, n = {n}"
            )));
        }
        let mut seen = vec![false; n];
        for set in &sets {
            if set.len() != ell {
                return Err(OracleError::InvalidScenario("sets differ in size".into()));
            }
            for &x in set {
                if x >= n || std::mem::replace(&mut seen[x], true) {
                    return Err(OracleError::InvalidScenario(format!(
                        "element {x} out of range or repeated"
                    )));
                }
            }
        }
        Ok(LemmaScenario {
            n,
            k,
            ell,
            s,
            witness_sets: sets,
        })
    }
}

/// The two factors of the second-order lower bound `F1 F2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundFactors {
    /// `k ((s - ell)/(n - ell))^ell`.
    #[serde(serialize_with = "as_string")]
    pub f1: BigRational,
    /// `1 - F1/2`.
    #[serde(serialize_with = "as_string")]
    pub f2: BigRational,
}

impl BoundFactors {
    /// `1 - F1`, the second factor as it appears in the older argument.
    pub fn f2_appendix(&self) -> BigRational {
        BigRational::one() - &self.f1
    }

    pub fn product(&self) -> BigRational {
        &self.f1 * &self.f2
    }
}

pub fn lemma3_factors(scn: &LemmaScenario) -> BoundFactors {
    factors(scn.n as u64, scn.k as u64, scn.ell as u64, scn.s as u64)
}

fn factors(n: u64, k: u64, ell: u64, s: u64) -> BoundFactors {
    let base = BigRational::new(BigInt::from(s - ell), BigInt::from(n - ell));
    let f1 = int(k) * num_traits::pow(base, ell as usize);
    let f2 = BigRational::one() - &f1 / int(2);
    BoundFactors { f1, f2 }
}

/// Checks `k >= 10`, `3 <= ell <= n/32`, `n >= 2^10` and
/// `ell + (n - ell)/(2k)^(1/ell) <= s <= n`, all exactly.
pub fn lemma3_constraints(n: usize, k: usize, ell: usize, s: usize) -> Result<(), OracleError> {
    let fail = |constraint| Err(OracleError::Constraint { constraint });
    if k < 10 {
        return fail("k ≥ 10");
    }
    if ell < 3 || 32 * ell > n {
        return fail("3 ≤ ell ≤ n/32");
    }
    if n < 1 << 10 {
        return fail("n ≥ 2^10");
    }
    if s > n {
        return fail("s ≤ n");
    }
    // 2k (s - ell)^ell >= (n - ell)^ell
    let e = ell as u32;
    if s < ell || BigInt::from(2 * k) * BigInt::from(s - ell).pow(e) < BigInt::from(n - ell).pow(e)
    {
        return fail("s ≥ ell + (n−ell)/(2k)^(1/ell)");
    }
    Ok(())
}

/// Exact `Prob(some W_i ⊆ S)` by inclusion–exclusion: any `j` of the sets
/// lie in `S` together with probability `prod_{r < j ell} (s - r)/(n - r)`.
pub fn exact_hit_probability(n: usize, k: usize, ell: usize, s: usize) -> BigRational {
    let mut total = BigRational::zero();
    let mut joint = BigRational::one();
    for j in 1..=k {
        for r in (j - 1) * ell..j * ell {
            if r >= s {
                joint = BigRational::zero();
                break;
            }
            joint *= BigRational::new(BigInt::from(s - r), BigInt::from(n - r));
        }
        if joint.is_zero() {
            break;
        }
        let term = BigRational::from_integer(BigInt::from(binomial(k as u64, j as u64))) * &joint;
        if j % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub trials: u64,
    pub hits: u64,
    pub probability: f64,
    /// Binomial standard error `sqrt(p (1 - p)/trials)` at the estimate.
    pub std_error: f64,
}

impl MonteCarloEstimate {
    /// Whether the estimate is at least `target - 3 sigma`.
    pub fn consistent_with_at_least(&self, target: f64) -> bool {
        self.probability >= target - 3.0 * self.std_error
    }
}

/// Fraction of `trials` uniform `s`-samples that contain some witness set,
/// for a scenario meeting [`lemma3_constraints`]. Trial `t` samples with
/// `split_seed(seed, t)`, so the result does not depend on thread count.
pub fn lemma3_monte_carlo(
    scn: &LemmaScenario,
    trials: u64,
    seed: Seed,
) -> Result<MonteCarloEstimate, OracleError> {
    lemma3_constraints(scn.n, scn.k, scn.ell, scn.s)?;
    hit_frequency(scn, trials, seed)
}

/// [`lemma3_monte_carlo`] without the parameter constraints.
pub fn hit_frequency(
    scn: &LemmaScenario,
    trials: u64,
    seed: Seed,
) -> Result<MonteCarloEstimate, OracleError> {
    let mut owner = vec![usize::MAX; scn.n];
    for (i, set) in scn.witness_sets.iter().enumerate() {
        for &x in set {
            owner[x] = i;
        }
    }
    let hits = (0..trials)
        .into_par_iter()
        .map(|t| {
            let sample = random_subset(scn.n, scn.s, split_seed(seed, t))?;
            let mut counts = vec![0usize; scn.k];
            let hit = sample.indices.iter().any(|&x| {
                let o = owner[x];
                o != usize::MAX && {
                    counts[o] += 1;
                    counts[o] == scn.ell
                }
            });
            Ok(hit as u64)
        })
        .sum::<Result<u64, OracleError>>()?;
    let p = hits as f64 / trials.max(1) as f64;
    Ok(MonteCarloEstimate {
        trials,
        hits,
        probability: p,
        std_error: (p * (1.0 - p) / trials.max(1) as f64).sqrt(),
    })
}

/// Decides `s0 >= 3 ell log2(k)` exactly, where
/// `s0 = ell + (n - ell)/(2k)^(1/ell)`.
///
/// `log2 k` is bracketed by `a/2^b` with `2^a` against `k^(2^b)`, and `s0`
/// by [`s0_bounds`]; precision grows until the brackets separate.
pub fn s0_dominates_log_bound(n: usize, k: usize, ell: usize) -> Result<bool, OracleError> {
    if k <= 1 {
        return Ok(true);
    }
    let (lo, hi) = s0_bounds(n as u64, k as u64, ell as u64, 64);
    for b in [12u32, 14, 16] {
        let x = BigInt::from(k).pow(1u32 << b);
        let ceil_log = (&x - 1u32).bits();
        let floor_log = x.bits() - 1;
        let scale = BigRational::new(BigInt::from(3 * ell as u64), BigInt::one() << b);
        if lo >= &scale * int(ceil_log) {
            return Ok(true);
        }
        if hi < &scale * int(floor_log) {
            return Ok(false);
        }
    }
    Err(OracleError::CheckFailed {
        check: "s0 vs 3 ell log2 k",
        detail: format!("undecided at n = {n}, k = {k}, ell = {ell}"),
    })
}

/// Exact figures for the sample-size rule of the older argument at
/// `n = 256`, `k = 8`, `ell = 8`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixReport {
    pub n: u64,
    pub k: u64,
    pub ell: u64,
    /// `ceil(2n/(2k)^(1/ell))`.
    pub s_original: u64,
    pub original_infeasible: bool,
    /// `ell + ceil((n - ell)/(2k)^(1/ell))`.
    pub s_ceiling: u64,
    #[serde(serialize_with = "as_string")]
    pub f1: BigRational,
    /// `1 - F1`.
    #[serde(serialize_with = "as_string")]
    pub f2_appendix: BigRational,
    /// `F1 (1 - F1) < 1/4`, decided exactly.
    pub appendix_product_below_quarter: bool,
    /// `1 - F1/2`, the corrected factor.
    #[serde(serialize_with = "as_string")]
    pub f2: BigRational,
    pub corrected_product_at_least_quarter: bool,
    /// `ell + floor((n - ell)/(2k)^(1/ell))`.
    pub s_floor: u64,
    #[serde(serialize_with = "as_string")]
    pub f1_floor: BigRational,
    pub floor_product_below_quarter: bool,
    pub f1_approx: f64,
    pub f2_appendix_approx: f64,
}

pub fn old_lemma34_counterexample() -> AppendixReport {
    let (n, k, ell) = (256u64, 8u64, 8u64);
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    let s_original = ceil_scaled_root(2 * n, 2 * k, ell as u32);
    let s_ceiling = ell + ceil_scaled_root(n - ell, 2 * k, ell as u32);
    let s_floor = s_ceiling - 1;
    let at_ceiling = factors(n, k, ell, s_ceiling);
    let at_floor = factors(n, k, ell, s_floor);
    let f2_appendix = at_ceiling.f2_appendix();
    AppendixReport {
        n,
        k,
        ell,
        s_original,
        original_infeasible: s_original > n,
        s_ceiling,
        appendix_product_below_quarter: &at_ceiling.f1 * &f2_appendix < quarter,
        corrected_product_at_least_quarter: at_ceiling.product() >= quarter,
        f1_approx: at_ceiling.f1.to_f64().unwrap_or(f64::NAN),
        f2_appendix_approx: f2_appendix.to_f64().unwrap_or(f64::NAN),
        f1: at_ceiling.f1,
        f2_appendix,
        f2: at_ceiling.f2,
        s_floor,
        floor_product_below_quarter: &at_floor.f1 * at_floor.f2_appendix() < quarter,
        f1_floor: at_floor.f1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tester::certified_sample_size;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn appendix_numbers() {
        let r = old_lemma34_counterexample();
        assert_eq!(r.s_original, 363);
        assert!(r.original_infeasible);
        assert_eq!(r.s_ceiling, 184);
        assert_eq!(r.f1, q(8, 1) * num_traits::pow(q(176, 248), 8));
        assert!(r.f1 > q(5147, 10_000) && r.f1 < q(5148, 10_000));
        assert!(r.f2_appendix > q(4852, 10_000) && r.f2_appendix < q(4853, 10_000));
        assert!(r.appendix_product_below_quarter);
        assert!(r.corrected_product_at_least_quarter);
        assert_eq!(r.s_floor, 183);
        assert!(r.f1_floor < q(1, 2));
        assert!(r.floor_product_below_quarter);
    }

    #[test]
    fn degenerate_and_full_samples() {
        let f = lemma3_factors(&LemmaScenario::new(1024, 10, 3, 3).unwrap());
        assert_eq!(f.f1, q(0, 1));
        assert_eq!(f.f2, q(1, 1));
        assert_eq!(exact_hit_probability(1024, 10, 3, 1024), q(1, 1));
    }

    #[test]
    fn hit_probability_single_set() {
        // 10 / C(1024, 3) for s = ell
        let p = exact_hit_probability(1024, 10, 3, 3);
        assert_eq!(p, q(10, 1) / q(178_433_024, 1));
        // two disjoint pairs of {0..4}, s = 2: only exact hits, no overlap
        assert_eq!(exact_hit_probability(4, 2, 2, 2), q(2, 6));
        // s = 4 covers everything
        assert_eq!(exact_hit_probability(4, 2, 2, 4), q(1, 1));
    }

    #[test]
    fn scenario_validation() {
        assert!(LemmaScenario::new(10, 4, 3, 5).is_err());
        assert!(LemmaScenario::new(10, 2, 3, 2).is_err());
        assert!(LemmaScenario::with_sets(6, 3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(LemmaScenario::with_sets(6, 3, vec![vec![0, 1], vec![2]]).is_err());
    }

    #[test]
    fn constraints_are_named() {
        let s = certified_sample_size(1024, 10, 3) as usize;
        assert!(lemma3_constraints(1024, 10, 3, s).is_ok());
        assert_eq!(
            lemma3_constraints(1024, 10, 3, s - 1),
            Err(OracleError::Constraint {
                constraint: "s ≥ ell + (n−ell)/(2k)^(1/ell)"
            })
        );
        assert!(lemma3_constraints(1024, 9, 3, s).is_err());
        assert!(lemma3_constraints(1024, 10, 33, 1024).is_err());
        assert!(lemma3_constraints(512, 10, 3, 500).is_err());
    }

    #[test]
    fn certified_size_gives_half() {
        let n = 1024;
        let s = certified_sample_size(n, 10, 3);
        let f = factors(n, 10, 3, s);
        assert!(f.f1 >= q(1, 2));
        assert!(factors(n, 10, 3, s - 1).f1 < q(1, 2));
    }

    #[test]
    fn log_bound() {
        assert_eq!(s0_dominates_log_bound(1024, 10, 3), Ok(true));
        assert_eq!(s0_dominates_log_bound(1024, 10, 32), Ok(true));
        // tiny n breaks it: s0 ~ 3.85 but 9 log2(10) ~ 29.9
        assert_eq!(s0_dominates_log_bound(6, 10, 3), Ok(false));
    }

    #[test]
    fn monte_carlo_extremes() {
        let full = LemmaScenario::new(1024, 10, 3, 1024).unwrap();
        assert_eq!(lemma3_monte_carlo(&full, 50, Seed(1)).unwrap().hits, 50);
        let tiny = LemmaScenario::new(1024, 10, 3, 3).unwrap();
        assert!(lemma3_monte_carlo(&tiny, 10, Seed(1)).is_err());
        assert_eq!(hit_frequency(&tiny, 2000, Seed(1)).unwrap().hits, 0);
    }
}
