use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use convextest::generators::{generate, GenKind, GenSpec, GeneratorError};
use convextest::oracles::{
    exact_hit_probability, hit_frequency, lemma3_constraints, lemma3_factors, max_convex_subset_2d,
    min_removal_to_convex, old_lemma34_counterexample, LemmaScenario, MonteCarloEstimate,
    OracleError,
};
use convextest::tester::{
    certified_sample_size, convex_minus_with, derive_close_params, derive_far_params, FarOptions,
};
use convextest::{
    convex_plus, convex_position_test, split_seed, BigRational, Decision, GeometryError, PointSet,
    Seed, TesterError,
};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::pointfile::{parse_point_set, write_point_set, ParseError};
use crate::record::{Certificate, Params, ResultRecord};
use crate::{BatchArgs, Command, OracleMode};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Tester(#[from] TesterError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
}

pub fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::TestFar {
            file,
            epsilon,
            seed,
            reps,
            parallel,
            batch,
        } => {
            let ps = read_point_set(&file)?;
            let mut params = derive_far_params(ps.len(), ps.dim(), &epsilon)?;
            params.repetitions = reps;
            let opts = FarOptions {
                repetitions: reps,
                parallel,
            };
            let params = Params::from(&params);
            run_batch(seed.seed, &batch, |s| {
                let start = Instant::now();
                let v = convex_minus_with(&ps, &epsilon, Seed(s), opts)?;
                Ok(ResultRecord::new(
                    "test-far",
                    params.clone(),
                    s,
                    &v,
                    elapsed_ms(start),
                ))
            })
        }
        Command::TestClose {
            file,
            epsilon,
            delta,
            seed,
            batch,
        } => {
            let ps = read_point_set(&file)?;
            let params = Params::from(&derive_close_params(ps.len(), ps.dim(), &epsilon, &delta)?);
            run_batch(seed.seed, &batch, |s| {
                let start = Instant::now();
                let v = convex_plus(&ps, &epsilon, &delta, Seed(s))?;
                Ok(ResultRecord::new(
                    "test-close",
                    params.clone(),
                    s,
                    &v,
                    elapsed_ms(start),
                ))
            })
        }
        Command::Gen {
            kind,
            n,
            d,
            epsilon,
            seed,
            out,
        } => gen(kind, n, d, epsilon, seed.seed, out),
        Command::Oracle { file, mode, subset } => oracle(&file, mode, subset),
        Command::VerifyLemma3 {
            n,
            k,
            ell,
            s,
            trials,
            seed,
            unconstrained,
            appendix,
        } => {
            if appendix {
                print_json(&old_lemma34_counterexample())?;
                return Ok(ExitCode::SUCCESS);
            }
            verify_lemma3(n, k, ell, s, trials, seed.seed, unconstrained)
        }
    }
}

fn read_point_set(path: &Path) -> Result<PointSet, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_point_set(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let line = serde_json::to_string(value).map_err(io::Error::from)?;
    let mut out = io::stdout().lock();
    writeln!(out, "{line}")?;
    Ok(())
}

/// Runs `one` for the base seed, or for `split_seed(seed, i)`, `i < batch`,
/// and prints the records in run order. Exits 1 if any run rejected.
fn run_batch<F>(seed: u64, batch: &BatchArgs, one: F) -> Result<ExitCode, CliError>
where
    F: Fn(u64) -> Result<ResultRecord, CliError> + Sync,
{
    let seeds: Vec<u64> = match batch.batch {
        None => vec![seed],
        Some(0) => return Err(CliError::Usage("--batch must be at least 1".into())),
        Some(runs) => (0..runs).map(|i| split_seed(Seed(seed), i).0).collect(),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    match batch.jobs {
        Some(0) => return Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(jobs) => pool = pool.num_threads(jobs),
        None => {}
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let records = pool.install(|| {
        seeds
            .par_iter()
            .map(|&s| one(s))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut out = io::stdout().lock();
    for r in &records {
        let line = serde_json::to_string(r).map_err(io::Error::from)?;
        writeln!(out, "{line}")?;
    }
    let rejected = records.iter().any(|r| r.decision == Decision::Reject);
    Ok(ExitCode::from(rejected as u8))
}

#[derive(Serialize)]
struct GenSummary {
    kind: GenKind,
    n: usize,
    d: usize,
    seed: u64,
    tag: String,
    interior_ids: Vec<usize>,
    out: PathBuf,
}

fn gen(
    kind: GenKind,
    n: usize,
    d: usize,
    epsilon: Option<BigRational>,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<ExitCode, CliError> {
    let g = generate(&GenSpec {
        kind,
        n,
        d,
        epsilon: epsilon.clone(),
        seed: Seed(seed),
    })?;
    let mut invocation = format!("convextest gen {kind} --n {n} --d {d}");
    if let Some(e) = &epsilon {
        invocation += &format!(" --epsilon {e}");
    }
    invocation += &format!(" --seed {seed}");
    let text = write_point_set(&g.points, &[invocation, format!("tag: {}", g.tag)]);
    match out {
        None => {
            io::stdout().lock().write_all(text.as_bytes())?;
        }
        Some(path) => {
            fs::write(&path, text).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            print_json(&GenSummary {
                kind,
                n: g.points.len(),
                d: g.points.dim(),
                seed,
                tag: g.tag.to_string(),
                interior_ids: g.interior_ids,
                out: path,
            })?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
enum OracleReport {
    Convex {
        n: usize,
        d: usize,
        in_convex_position: bool,
        witness: Option<Certificate>,
    },
    MinRemoval {
        n: usize,
        d: usize,
        min_removal: usize,
        removed_ids: Vec<usize>,
    },
    #[serde(rename = "max-subset-2d")]
    MaxSubset2d {
        n: usize,
        d: usize,
        size: usize,
        ids: Vec<usize>,
    },
}

/// Exit 1 only for a set found not to be in convex position.
fn oracle(file: &Path, mode: OracleMode, subset: Option<Vec<usize>>) -> Result<ExitCode, CliError> {
    let full = read_point_set(file)?;
    let (ps, ids) = match subset {
        Some(ids) => (full.subset(&ids)?, ids),
        None => {
            let ids = (0..full.len()).collect();
            (full, ids)
        }
    };
    let global = |local: Vec<usize>| -> Vec<usize> {
        let mut v: Vec<usize> = local.into_iter().map(|i| ids[i]).collect();
        v.sort_unstable();
        v
    };
    let (n, d) = (ps.len(), ps.dim());
    let (report, code) = match mode {
        OracleMode::Convex => {
            let r = convex_position_test(&ps);
            let witness = r.witness.map(|w| Certificate::negative(&w.remap(&ids)));
            let code = ExitCode::from(!r.in_convex_position as u8);
            let report = OracleReport::Convex {
                n,
                d,
                in_convex_position: r.in_convex_position,
                witness,
            };
            (report, code)
        }
        OracleMode::MinRemoval => {
            let c = min_removal_to_convex(&ps)?;
            let report = OracleReport::MinRemoval {
                n,
                d,
                min_removal: c.min_removal,
                removed_ids: global(c.removed_ids),
            };
            (report, ExitCode::SUCCESS)
        }
        OracleMode::MaxSubset2d => {
            let m = max_convex_subset_2d(&ps)?;
            let report = OracleReport::MaxSubset2d {
                n,
                d,
                size: m.size,
                ids: global(m.ids),
            };
            (report, ExitCode::SUCCESS)
        }
    };
    print_json(&report)?;
    Ok(code)
}

#[derive(Serialize)]
struct Lemma3Report {
    n: usize,
    k: usize,
    ell: usize,
    s: usize,
    f1: String,
    f2: String,
    f2_appendix: String,
    product: String,
    product_at_least_quarter: bool,
    f1_approx: f64,
    f2_approx: f64,
    exact_probability: String,
    exact_probability_approx: f64,
    empirical: MonteCarloEstimate,
    empirical_consistent_with_quarter: bool,
}

fn approx(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn verify_lemma3(
    n: usize,
    k: usize,
    ell: usize,
    s: Option<usize>,
    trials: u64,
    seed: u64,
    unconstrained: bool,
) -> Result<ExitCode, CliError> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let s = match s {
        Some(s) => s,
        None => {
            if k == 0 || ell == 0 || k * ell > n {
                return Err(CliError::Usage(format!(
                    "no default sample size for n = {n}, k = {k}, ell = {ell}"
                )));
            }
            certified_sample_size(n as u64, k as u64, ell as u64) as usize
        }
    };
    if !unconstrained {
        lemma3_constraints(n, k, ell, s)?;
    }
    let scn = LemmaScenario::new(n, k, ell, s)?;
    let f = lemma3_factors(&scn);
    let exact = exact_hit_probability(n, k, ell, s);
    let empirical = hit_frequency(&scn, trials, Seed(seed))?;
    let product = f.product();
    let quarter = BigRational::new(1.into(), 4.into());
    print_json(&Lemma3Report {
        n,
        k,
        ell,
        s,
        f1: f.f1.to_string(),
        f2: f.f2.to_string(),
        f2_appendix: f.f2_appendix().to_string(),
        product_at_least_quarter: product >= quarter,
        product: product.to_string(),
        f1_approx: approx(&f.f1),
        f2_approx: approx(&f.f2),
        exact_probability: exact.to_string(),
        exact_probability_approx: approx(&exact),
        empirical_consistent_with_quarter: empirical.consistent_with_at_least(0.25),
        empirical,
    })?;
    Ok(ExitCode::SUCCESS)
}
