use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive};
use serde::Serialize;

use super::TesterError;

/// Repetitions of the sample-and-test step in the far tester.
pub const DEFAULT_REPETITIONS: u32 = 22;

/// Bits of the dyadic bracket kept around the irrational `s0`.
pub const S0_PRECISION_BITS: u32 = 128;

/// An input constraint of one of the testers, displayed as its formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Constraint {
    EpsilonInUnitInterval,
    FarMinimumSize,
    FarSizePerDimension,
    FarEpsilonFloor,
    FarEpsilonCeiling,
    SampleWithinUniverse,
    CloseMinimumSize,
    CloseEpsilonFloor,
    CloseEpsilonCeiling,
    DeltaRange,
    PositiveRepetitions,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::EpsilonInUnitInterval => "0 < epsilon < 1",
            Constraint::FarMinimumSize => "n ≥ 2^10",
            Constraint::FarSizePerDimension => "n ≥ 32(d+1)",
            Constraint::FarEpsilonFloor => "epsilon ≥ 10(d+1)/n",
            Constraint::FarEpsilonCeiling => "epsilon ≤ (d−1)/(2d)",
            Constraint::SampleWithinUniverse => "s ≤ n",
            Constraint::CloseMinimumSize => "n ≥ 1500",
            Constraint::CloseEpsilonFloor => "epsilon ≥ 1/n",
            Constraint::CloseEpsilonCeiling => "epsilon ≤ n^(delta−1)",
            Constraint::DeltaRange => "0 < delta ≤ 1/2",
            Constraint::PositiveRepetitions => "repetitions ≥ 1",
        })
    }
}

fn violated(constraint: Constraint, detail: String) -> TesterError {
    TesterError::ConstraintViolated { constraint, detail }
}

fn ratio(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parameters of the far tester.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FarParams {
    pub n: usize,
    pub d: usize,
    #[serde(serialize_with = "display")]
    pub epsilon: BigRational,
    /// `floor(epsilon n / (d+1))`
    pub k: u64,
    /// `d + 1`
    pub ell: u64,
    /// `ell + (n - ell) / (2k)^(1/ell)`, for display.
    pub s0: f64,
    /// Dyadic bracket `s0_lower < s0 <= s0_upper` of width `2^-128`.
    #[serde(serialize_with = "display")]
    pub s0_lower: BigRational,
    #[serde(serialize_with = "display")]
    pub s0_upper: BigRational,
    /// `ceil(s0)`, certified exactly.
    pub s: usize,
    pub repetitions: u32,
}

fn display<T: fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Derives and validates the far tester's parameters.
///
/// `s` is the least integer with `2k (s - ell)^ell >= (n - ell)^ell`, i.e.
/// `k ((s - ell)/(n - ell))^ell >= 1/2`, which is exactly `ceil(s0)`.
pub fn derive_far_params(
    n: usize,
    d: usize,
    epsilon: &BigRational,
) -> Result<FarParams, TesterError> {
    check_unit_interval(epsilon)?;
    if n < 1 << 10 {
        return Err(violated(Constraint::FarMinimumSize, format!("n = {n}")));
    }
    if n < 32 * (d + 1) {
        return Err(violated(
            Constraint::FarSizePerDimension,
            format!("n = {n}, 32(d+1) = {}", 32 * (d + 1)),
        ));
    }
    let floor = ratio(10 * (d as u64 + 1), n as u64);
    if *epsilon < floor {
        return Err(violated(
            Constraint::FarEpsilonFloor,
            format!("epsilon = {epsilon}, 10(d+1)/n = {floor}"),
        ));
    }
    let ceiling = ratio(d.saturating_sub(1) as u64, 2 * d as u64);
    if *epsilon > ceiling {
        return Err(violated(
            Constraint::FarEpsilonCeiling,
            format!("epsilon = {epsilon}, (d−1)/(2d) = {ceiling}"),
        ));
    }

    let k = (epsilon * ratio(n as u64, d as u64 + 1))
        .floor()
        .to_integer()
        .to_u64()
        .expect("k fits in u64");
    let ell = d as u64 + 1;
    let s = certified_sample_size(n as u64, k, ell);
    if s > n as u64 {
        return Err(violated(
            Constraint::SampleWithinUniverse,
            format!("s = {s}, n = {n}"),
        ));
    }
    let (s0_lower, s0_upper) = s0_bounds(n as u64, k, ell, S0_PRECISION_BITS);
    Ok(FarParams {
        n,
        d,
        epsilon: epsilon.clone(),
        k,
        ell,
        s0: s0_estimate(n as u64, k, ell),
        s0_lower,
        s0_upper,
        s: s as usize,
        repetitions: DEFAULT_REPETITIONS,
    })
}

fn check_unit_interval(epsilon: &BigRational) -> Result<(), TesterError> {
    if !epsilon.is_positive() || *epsilon >= BigRational::one() {
        return Err(violated(
            Constraint::EpsilonInUnitInterval,
            format!("epsilon = {epsilon}"),
        ));
    }
    Ok(())
}

/// `s0 = ell + (n - ell)/(2k)^(1/ell)` in double precision.
pub fn s0_estimate(n: u64, k: u64, ell: u64) -> f64 {
    ell as f64 + (n - ell) as f64 / (2.0 * k as f64).powf(1.0 / ell as f64)
}

/// The least integer `m >= 0` with `radicand * m^root >= numer^root`, that
/// is `ceil(numer / radicand^(1/root))`, decided in exact integers.
///
/// Panics if `radicand` or `root` is zero.
pub fn ceil_scaled_root(numer: u64, radicand: u64, root: u32) -> u64 {
    assert!(radicand > 0 && root > 0);
    let target = BigInt::from(numer).pow(root);
    let rad = BigInt::from(radicand);
    let holds = |m: u64| &rad * BigInt::from(m).pow(root) >= target;
    let guess = (numer as f64 / (radicand as f64).powf(1.0 / root as f64)).ceil();
    let mut m = if guess.is_finite() && guess >= 0.0 {
        guess as u64
    } else {
        numer
    };
    while !holds(m) {
        m += 1;
    }
    while m > 0 && holds(m - 1) {
        m -= 1;
    }
    m
}

/// `ceil(s0)`: the least `s` with `k ((s - ell)/(n - ell))^ell >= 1/2`.
pub fn certified_sample_size(n: u64, k: u64, ell: u64) -> u64 {
    ell + ceil_scaled_root(n - ell, 2 * k, ell as u32)
}

/// Dyadic bounds `lo < s0 <= hi` with `hi - lo = 2^-bits`.
pub fn s0_bounds(n: u64, k: u64, ell: u64, bits: u32) -> (BigRational, BigRational) {
    let m = ceil_scaled_root(n - ell, 2 * k, ell as u32);
    let e = ell as u32;
    let scale = BigInt::one() << bits;
    // x = (n - ell)/(2k)^(1/ell) lies in (m - 1, m]; find the least N with
    // N / 2^bits >= x.
    let target = BigInt::from(n - ell).pow(e) * Pow::pow(&scale, e);
    let rad = BigInt::from(2 * k);
    let holds = |v: &BigInt| &rad * v.pow(e) >= target;
    let mut lo = BigInt::from(m.saturating_sub(1)) * &scale;
    let mut hi = BigInt::from(m) * &scale;
    // invariant: holds(hi), and lo fails unless lo == 0 == x
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1;
        if holds(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let base = BigRational::from_integer(BigInt::from(ell));
    let den = BigRational::from_integer(scale);
    (
        &base + BigRational::from_integer(hi.clone() - 1) / &den,
        &base + BigRational::from_integer(hi) / &den,
    )
}

/// Parameters of the close tester.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CloseParams {
    pub n: usize,
    pub d: usize,
    #[serde(serialize_with = "display")]
    pub epsilon: BigRational,
    #[serde(serialize_with = "display")]
    pub delta: BigRational,
    /// `ceil(1 / (6 epsilon))`
    pub s: usize,
    /// `epsilon n`, the removal budget of a close input.
    #[serde(serialize_with = "display")]
    pub t: BigRational,
}

pub fn default_delta() -> BigRational {
    ratio(1, 10)
}

pub fn derive_close_params(
    n: usize,
    d: usize,
    epsilon: &BigRational,
    delta: &BigRational,
) -> Result<CloseParams, TesterError> {
    check_unit_interval(epsilon)?;
    if !delta.is_positive() || *delta > ratio(1, 2) {
        return Err(violated(Constraint::DeltaRange, format!("delta = {delta}")));
    }
    if n < 1500 {
        return Err(violated(Constraint::CloseMinimumSize, format!("n = {n}")));
    }
    let nn = BigRational::from_integer(BigInt::from(n));
    if *epsilon < nn.recip() {
        return Err(violated(
            Constraint::CloseEpsilonFloor,
            format!("epsilon = {epsilon}, 1/n = {}", nn.recip()),
        ));
    }
    if !below_power(epsilon, n, &(delta - BigRational::one())) {
        return Err(violated(
            Constraint::CloseEpsilonCeiling,
            format!("epsilon = {epsilon}, n = {n}, delta = {delta}"),
        ));
    }
    let s = (BigRational::one() / (epsilon * BigRational::from_integer(6.into())))
        .ceil()
        .to_integer()
        .to_usize()
        .expect("s fits in usize");
    if s > n {
        return Err(violated(
            Constraint::SampleWithinUniverse,
            format!("s = {s}, n = {n}"),
        ));
    }
    Ok(CloseParams {
        n,
        d,
        epsilon: epsilon.clone(),
        delta: delta.clone(),
        s,
        t: epsilon * nn,
    })
}

/// Exact test of `x <= n^e` for positive rational `x` and rational `e`.
fn below_power(x: &BigRational, n: usize, e: &BigRational) -> bool {
    // x <= n^(p/q)  <=>  x^q <= n^p  (q > 0)
    let p = e.numer();
    let q = e
        .denom()
        .to_u32()
        .expect("exponent denominator fits in u32");
    let lhs = Pow::pow(x, q);
    let base = BigRational::from_integer(BigInt::from(n));
    let rhs = if p.is_negative() {
        Pow::pow(base, (-p).to_u32().expect("exponent fits")).recip()
    } else {
        Pow::pow(base, p.to_u32().expect("exponent fits"))
    };
    lhs <= rhs
}

/// `cert_size / opt`.
pub fn approximation_ratio(cert_size: usize, opt: usize) -> Result<BigRational, TesterError> {
    if opt == 0 || cert_size == 0 || cert_size > opt {
        return Err(TesterError::InvalidRatio { cert_size, opt });
    }
    Ok(ratio(cert_size as u64, opt as u64))
}

/// Exact test of `ratio >= 1 / (6 n^delta)`.
pub fn meets_approximation_floor(ratio_value: &BigRational, n: usize, delta: &BigRational) -> bool {
    // ratio >= n^-delta / 6  <=>  1/(6 ratio) <= n^delta
    if !ratio_value.is_positive() {
        return false;
    }
    let x = (ratio_value * BigRational::from_integer(6.into())).recip();
    below_power(&x, n, delta)
}

/// The guaranteed floor `1 / (6 n^delta)` in double precision.
pub fn approximation_floor_f64(n: usize, delta: f64) -> f64 {
    1.0 / (6.0 * (n as f64).powf(delta))
}

/// Exact test of `1 / (6 n^delta) >= value`.
pub fn approximation_floor_at_least(n: usize, delta: &BigRational, value: &BigRational) -> bool {
    // n^delta <= 1/(6 value)
    value.is_positive()
        && power_at_most(
            n,
            delta,
            &(value * BigRational::from_integer(6.into())).recip(),
        )
}

/// Exact test of `n^e <= x` for rational `e > 0`.
fn power_at_most(n: usize, e: &BigRational, x: &BigRational) -> bool {
    let p = e.numer().to_u32().expect("exponent fits in u32");
    let q = e.denom().to_u32().expect("exponent fits in u32");
    Pow::pow(BigRational::from_integer(BigInt::from(n)), p) <= Pow::pow(x, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn step_one_arithmetic() {
        let p = derive_far_params(2048, 2, &q(1, 10)).unwrap();
        assert_eq!((p.k, p.ell), (68, 3));
        assert_eq!(p.repetitions, 22);
        assert!(p.s0_lower < p.s0_upper);
        assert!(p.s0_upper <= BigRational::from_integer(p.s.into()));
        assert!(p.s0_lower > BigRational::from_integer((p.s - 1).into()));
    }

    #[test]
    fn raw_ceiling_matches_appendix_value() {
        // ell + ceil((n - ell)/(2k)^(1/ell)) for n = 256, k = ell = 8
        assert_eq!(8 + ceil_scaled_root(248, 16, 8), 184);
        assert_eq!(certified_sample_size(256, 8, 8), 184);
    }

    #[test]
    fn n1024_certified_ceiling() {
        let p = derive_far_params(1024, 2, &q(1, 20)).unwrap();
        assert_eq!(p.k, 17);
        assert_eq!(p.ell, 3);
        // k ((s - 3)/1021)^3 >= 1/2 holds at s and fails at s - 1
        let f = |s: usize| q(17, 1) * Pow::pow(q(s as i64 - 3, 1021), 3u32);
        assert!(f(p.s) >= q(1, 2));
        assert!(f(p.s - 1) < q(1, 2));
        // frozen: 3 + 1021 / 34^(1/3) = 318.1612..., evaluated with mpmath at 50 digits
        assert_eq!(p.s, 319);
        assert!((p.s0 - 318.161_217_648_79).abs() < 1e-9);
    }

    #[test]
    fn s0_bracket_is_tight() {
        let (lo, hi) = s0_bounds(1024, 17, 3, 64);
        assert_eq!(&hi - &lo, BigRational::new(1.into(), BigInt::one() << 64));
        // 2k (x - ell)^ell vs (n - ell)^ell on either side
        let g = |x: &BigRational| q(34, 1) * Pow::pow(x - q(3, 1), 3u32) - q(1021 * 1021 * 1021, 1);
        assert!(g(&lo).is_negative());
        assert!(!g(&hi).is_negative());
    }

    #[test]
    fn far_constraints_are_named() {
        let name = |r: Result<FarParams, TesterError>| match r {
            Err(TesterError::ConstraintViolated { constraint, .. }) => constraint,
            other => panic!("unexpected {other:?}"),
        };
        assert_eq!(
            name(derive_far_params(1000, 2, &q(1, 10))),
            Constraint::FarMinimumSize
        );
        assert_eq!(
            name(derive_far_params(1024, 40, &q(1, 10))),
            Constraint::FarSizePerDimension
        );
        assert_eq!(
            name(derive_far_params(2048, 2, &q(1, 100))),
            Constraint::FarEpsilonFloor
        );
        assert_eq!(
            name(derive_far_params(2048, 2, &q(2, 5))),
            Constraint::FarEpsilonCeiling
        );
        assert_eq!(
            name(derive_far_params(2048, 2, &q(0, 1))),
            Constraint::EpsilonInUnitInterval
        );
        assert_eq!(
            name(derive_far_params(2048, 1, &q(1, 10))),
            Constraint::FarEpsilonCeiling
        );
        let msg = derive_far_params(2048, 2, &q(2, 5))
            .unwrap_err()
            .to_string();
        assert!(msg.contains("epsilon ≤ (d−1)/(2d)"), "{msg}");
        // boundary values are admitted
        assert!(derive_far_params(2048, 2, &q(1, 4)).is_ok());
        assert!(derive_far_params(1024, 2, &q(30, 1024)).is_ok());
    }

    #[test]
    fn close_params_examples() {
        let p = derive_close_params(2000, 2, &q(1, 100), &default_delta());
        // 1/100 > 2000^(-0.9) ~ 0.00107, so the ceiling rejects it
        assert!(matches!(
            p,
            Err(TesterError::ConstraintViolated {
                constraint: Constraint::CloseEpsilonCeiling,
                ..
            })
        ));
        let p = derive_close_params(2000, 2, &q(1, 100), &q(1, 2)).unwrap();
        assert_eq!(p.s, 17);
        assert_eq!(p.t, q(20, 1));
        assert!(matches!(
            derive_close_params(1000, 2, &q(1, 1000), &default_delta()),
            Err(TesterError::ConstraintViolated {
                constraint: Constraint::CloseMinimumSize,
                ..
            })
        ));
        assert!(matches!(
            derive_close_params(1500, 2, &q(1, 1501), &default_delta()),
            Err(TesterError::ConstraintViolated {
                constraint: Constraint::CloseEpsilonFloor,
                ..
            })
        ));
        assert!(matches!(
            derive_close_params(1500, 2, &q(1, 1000), &q(3, 5)),
            Err(TesterError::ConstraintViolated {
                constraint: Constraint::DeltaRange,
                ..
            })
        ));
        // 1/n is the smallest admitted epsilon; s = ceil(n/6)
        assert_eq!(
            derive_close_params(1500, 2, &q(1, 1500), &default_delta())
                .unwrap()
                .s,
            250
        );
    }

    #[test]
    fn ratio_and_floor() {
        assert_eq!(approximation_ratio(17, 1500).unwrap(), q(17, 1500));
        assert_eq!(approximation_ratio(9, 9).unwrap(), q(1, 1));
        assert!(approximation_ratio(3, 0).is_err());
        assert!(approximation_ratio(4, 3).is_err());
        // 17/1500 ~ 0.01133 < 1/(6 * 1500^0.1) ~ 0.0802
        assert!(!meets_approximation_floor(
            &q(17, 1500),
            1500,
            &default_delta()
        ));
        assert!(meets_approximation_floor(
            &q(174, 1499),
            1500,
            &default_delta()
        ));
        assert!(meets_approximation_floor(&q(1, 1), 1500, &default_delta()));
    }

    #[test]
    fn one_twenty_fourth_floor_up_to_a_million() {
        // 1/(6 n^0.1) >= 1/24  <=>  n <= 4^10
        let quarter_floor = |n: usize| approximation_floor_at_least(n, &default_delta(), &q(1, 24));
        assert!(quarter_floor(1_000_000));
        assert!(quarter_floor(1 << 20));
        assert!(!quarter_floor((1 << 20) + 1));
    }
}
