use std::fmt::Write as _;
use std::path::PathBuf;

use cjl_core::montecarlo::{
    calibrate_offdiag_constant, run_counterexample, run_lm_tail, run_norm_concentration,
    run_pairwise_jl, CheckOutcome, ExperimentConfig, ExperimentResult, LmTailResult,
    PairwiseResult, TestVector,
};
use cjl_core::rng::{derive_seed, SeedStream};
use cjl_core::{CoefficientDistribution, PointSet};
use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::csvio::read_points;
use crate::error::{io_error, CliError};
use crate::{DistArg, StructureArg};

/// Standard errors of slack allowed by the mean, flatness and tail-bound checks.
const N_STDERR: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Norm,
    Pairs,
    Counterexample,
    LmTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Decay,
    Mean,
    Flat,
    Monotone,
    TwoThirds,
    Bound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VectorArg {
    Constant,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Ambient dimension (norm, counterexample, and pairs without --input).
    #[arg(long)]
    pub d: Option<usize>,
    /// Target dimensions, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// Number of random unit points for pairs mode.
    #[arg(long, default_value_t = 30)]
    pub n: usize,
    /// Points for pairs mode instead of random ones.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// The --input file has a header row.
    #[arg(long)]
    pub header: bool,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    /// Trials per target dimension (draws per k in pairs mode).
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub master_seed: u64,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub dist: DistArg,
    #[arg(long, value_enum, default_value = "circulant")]
    pub structure: StructureArg,
    /// Test vector for norm mode.
    #[arg(long, value_enum, default_value = "random")]
    pub vector: VectorArg,
    /// Tail levels for lm-tail mode, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 4.0])]
    pub t: Vec<f64>,
    /// Number of unit weights for lm-tail mode.
    #[arg(long, default_value_t = 100)]
    pub dim: usize,
    /// Check to evaluate; repeatable. Any failure gives exit status 1.
    #[arg(long = "assert", value_enum)]
    pub asserts: Vec<Check>,
    /// Fit the off-diagonal decay constant to the measured failure rates (norm mode).
    #[arg(long)]
    pub calibrate: bool,
    /// Report path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    #[serde(flatten)]
    result: &'a T,
    assertions: &'a [CheckOutcome],
}

enum Outcome {
    Experiment(ExperimentResult),
    Pairs(PairwiseResult),
    LmTail(LmTailResult),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn allowed(mode: Mode) -> &'static [Check] {
    match mode {
        Mode::Norm => &[Check::Decay, Check::Mean],
        Mode::Counterexample => &[Check::Flat],
        Mode::Pairs => &[Check::Monotone, Check::TwoThirds],
        Mode::LmTail => &[Check::Bound],
    }
}

fn validate_flags(args: &VerifyArgs) -> Result<(), CliError> {
    for check in &args.asserts {
        if !allowed(args.mode).contains(check) {
            let name = check
                .to_possible_value()
                .map(|v| v.get_name().to_owned())
                .unwrap_or_default();
            return Err(usage(format!(
                "--assert {name} does not apply to this mode"
            )));
        }
    }
    if args.calibrate && args.mode != Mode::Norm {
        return Err(usage("--calibrate applies to norm mode only"));
    }
    if args.mode != Mode::LmTail {
        if args.k.is_empty() {
            return Err(usage("--k is required"));
        }
        if args.k.contains(&0) {
            return Err(usage("--k values must be at least 1"));
        }
        let needs_d = args.mode != Mode::Pairs || args.input.is_none();
        if needs_d && args.d.is_none() {
            return Err(usage("--d is required"));
        }
    }
    if args.mode == Mode::Counterexample
        && CoefficientDistribution::from(args.dist) != CoefficientDistribution::Gaussian
    {
        return Err(usage("counterexample mode uses gaussian coefficients"));
    }
    Ok(())
}

fn experiment_config(
    args: &VerifyArgs,
    test_vector: TestVector,
    apply_sign_flip: bool,
) -> ExperimentConfig {
    ExperimentConfig {
        d: args.d.unwrap_or(0),
        ks: args.k.clone(),
        distribution: args.dist.into(),
        structure: args.structure.into(),
        eps: args.eps,
        trials: args.trials,
        master_seed: args.master_seed,
        test_vector,
        apply_sign_flip,
    }
}

fn pair_points(args: &VerifyArgs) -> Result<PointSet, CliError> {
    if let Some(path) = &args.input {
        return read_points(path, args.header, args.d);
    }
    let d = args.d.unwrap_or(0);
    if args.n == 0 || d == 0 {
        return Err(usage("--n and --d must be at least 1"));
    }
    let mut stream = SeedStream::new(derive_seed(args.master_seed, u64::MAX));
    Ok(PointSet::from_rows(
        (0..args.n).map(|_| stream.unit_sphere(d)).collect(),
    )?)
}

fn execute(args: &VerifyArgs) -> Result<Outcome, CliError> {
    Ok(match args.mode {
        Mode::Norm => {
            let test_vector = match args.vector {
                VectorArg::Constant => TestVector::ConstantUnit,
                VectorArg::Random => TestVector::RandomUnitSphere,
            };
            let mut result = run_norm_concentration(&experiment_config(args, test_vector, true))?;
            if args.calibrate {
                let fit = calibrate_offdiag_constant(&result.failure_observations(), args.eps)
                    .map_err(|e| CliError::Data(e.to_string()))?;
                result.fitted_constants = Some(fit);
            }
            Outcome::Experiment(result)
        }
        Mode::Counterexample => Outcome::Experiment(run_counterexample(&experiment_config(
            args,
            TestVector::ConstantUnit,
            false,
        ))?),
        Mode::Pairs => {
            let points = pair_points(args)?;
            Outcome::Pairs(run_pairwise_jl(
                &points,
                args.eps,
                &args.k,
                args.trials,
                args.master_seed,
                args.dist.into(),
                args.structure.into(),
            )?)
        }
        Mode::LmTail => {
            if args.dim == 0 {
                return Err(usage("--dim must be at least 1"));
            }
            Outcome::LmTail(run_lm_tail(
                &vec![1.0; args.dim],
                &args.t,
                args.trials,
                args.master_seed,
            )?)
        }
    })
}

fn evaluate(outcome: &Outcome, check: Check) -> CheckOutcome {
    match (outcome, check) {
        (Outcome::Experiment(r), Check::Decay) => r.check_decay(),
        (Outcome::Experiment(r), Check::Mean) => r.check_mean(N_STDERR),
        (Outcome::Experiment(r), Check::Flat) => {
            r.check_flat(r.reference_tail.unwrap_or(f64::NAN), N_STDERR)
        }
        (Outcome::Pairs(r), Check::Monotone) => r.check_monotone(),
        (Outcome::Pairs(r), Check::TwoThirds) => r.check_two_thirds(),
        (Outcome::LmTail(r), Check::Bound) => r.check_bound(N_STDERR),
        _ => unreachable!("assertion validated against mode"),
    }
}

fn to_json(outcome: &Outcome, assertions: &[CheckOutcome]) -> serde_json::Result<String> {
    match outcome {
        Outcome::Experiment(result) => serde_json::to_string_pretty(&Report { result, assertions }),
        Outcome::Pairs(result) => serde_json::to_string_pretty(&Report { result, assertions }),
        Outcome::LmTail(result) => serde_json::to_string_pretty(&Report { result, assertions }),
    }
}

fn to_csv(outcome: &Outcome) -> String {
    let mut s = String::new();
    match outcome {
        Outcome::Experiment(r) => {
            s.push_str("k,trials,fail_hi,fail_lo,p_hat_two_sided,ci_lo,ci_hi,mean_norm_sq,stderr_norm_sq\n");
            for t in &r.per_k {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{:?},{:?},{:?},{:?},{:?}",
                    t.k,
                    t.trials,
                    t.fail_hi,
                    t.fail_lo,
                    t.p_hat_two_sided,
                    t.ci_two_sided.lo,
                    t.ci_two_sided.hi,
                    t.mean_norm_sq,
                    t.stderr_norm_sq
                );
            }
        }
        Outcome::Pairs(r) => {
            s.push_str("k,draws,successes,success_fraction,ci_lo,ci_hi\n");
            for t in &r.per_k {
                let _ = writeln!(
                    s,
                    "{},{},{},{:?},{:?},{:?}",
                    t.k, t.draws, t.successes, t.success_fraction, t.ci.lo, t.ci.hi
                );
            }
        }
        Outcome::LmTail(r) => {
            s.push_str("t,trials,exceed_hi,exceed_lo,p_hat_hi,p_hat_lo,bound\n");
            for t in &r.per_t {
                let _ = writeln!(
                    s,
                    "{:?},{},{},{},{:?},{:?},{:?}",
                    t.t, t.trials, t.exceed_hi, t.exceed_lo, t.p_hat_hi, t.p_hat_lo, t.bound
                );
            }
        }
    }
    s
}

pub fn run(args: &VerifyArgs) -> Result<(), CliError> {
    validate_flags(args)?;
    let outcome = execute(args)?;
    let assertions: Vec<CheckOutcome> = args
        .asserts
        .iter()
        .map(|&c| evaluate(&outcome, c))
        .collect();

    let body = match args.format {
        Format::Json => to_json(&outcome, &assertions).map_err(|e| usage(e.to_string()))? + "\n",
        Format::Csv => to_csv(&outcome),
    };
    match &args.out {
        Some(path) => std::fs::write(path, body).map_err(|e| io_error(path, e))?,
        None => print!("{body}"),
    }

    for a in &assertions {
        eprintln!(
            "{} {}: {}",
            if a.passed { "PASS" } else { "FAIL" },
            a.name,
            a.detail
        );
    }
    let failed: Vec<&str> = assertions
        .iter()
        .filter(|a| !a.passed)
        .map(|a| a.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(failed.join(", ")))
    }
}
