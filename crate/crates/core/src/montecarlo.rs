//! Reproducible Monte Carlo experiments.
//!
//! Every experiment is a pure function of its configuration. Trial `τ` at
//! target dimension `k` uses the transform seed
//! `derive_trial_seed(derive_trial_seed(master, k), τ)`, so the tallies for a
//! given `k` do not depend on which other dimensions share the grid. Trials
//! run in parallel; results are gathered in trial order and reduced
//! sequentially, which makes them identical to a sequential run.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{distortion_report, lm_lower_threshold, lm_upper_threshold, TailBoundParams};
use crate::error::{Error, Result};
use crate::fastconv::FastEmbedder;
use crate::points::PointSet;
use crate::rng::{derive_seed, SeedStream, SEED_RULE_ID};
use crate::stats::{binomial_stderr, chi1_upper_tail, mean_stderr, wilson95, Interval};
use crate::transform::{
    check_eps, CoefficientDistribution, MatrixStructure, SampledTransform, TransformSpec,
};

/// Fewest trials for which a statistical check is evaluated.
pub const MIN_TRIALS_FOR_ASSERTION: u64 = 100;

/// Fewest transform draws accepted by [`run_pairwise_jl`].
pub const MIN_PAIRWISE_DRAWS: u64 = 30;

/// Sub-stream index of the test vector; never a valid `k`.
const VECTOR_STREAM: u64 = u64::MAX;

/// Seed of trial `trial_index` under `master_seed`.
pub fn derive_trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    derive_seed(master_seed, trial_index)
}

/// The unit vector whose embedded norm is tallied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestVector {
    /// `(1, .., 1) / √d`.
    ConstantUnit,
    /// One uniform point on the sphere, drawn from the master seed and shared
    /// by all trials.
    RandomUnitSphere,
    /// A caller-supplied vector, normalized to unit length.
    Provided(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub d: usize,
    pub ks: Vec<usize>,
    pub distribution: CoefficientDistribution,
    pub structure: MatrixStructure,
    pub eps: f64,
    pub trials: u64,
    pub master_seed: u64,
    pub test_vector: TestVector,
    pub apply_sign_flip: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        check_eps(self.eps)?;
        if self.ks.is_empty() {
            return Err(Error::invalid("at least one target dimension is required"));
        }
        for &k in &self.ks {
            TransformSpec::new(self.d, k, self.distribution, self.structure, 0)?;
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be positive"));
        }
        if let TestVector::Provided(v) = &self.test_vector {
            Error::check_len(self.d, v.len())?;
            if !v.iter().any(|&x| x != 0.0) || v.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid(
                    "provided test vector must be finite and nonzero",
                ));
            }
        }
        Ok(())
    }

    /// The unit test vector this configuration evaluates.
    pub fn unit_vector(&self) -> Vec<f64> {
        match &self.test_vector {
            TestVector::ConstantUnit => vec![1.0 / (self.d as f64).sqrt(); self.d],
            TestVector::RandomUnitSphere => {
                SeedStream::new(derive_seed(self.master_seed, VECTOR_STREAM)).unit_sphere(self.d)
            }
            TestVector::Provided(v) => {
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.iter().map(|x| x / norm).collect()
            }
        }
    }
}

/// Tallies for one target dimension. "hi" counts `‖f(x)‖² > 1 + ε`, "lo"
/// counts `‖f(x)‖² < 1 - ε`; intervals are 95% Wilson.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KTally {
    pub k: usize,
    pub trials: u64,
    pub fail_hi: u64,
    pub fail_lo: u64,
    pub p_hat_hi: f64,
    pub p_hat_lo: f64,
    pub ci_hi: Interval,
    pub ci_lo: Interval,
    pub p_hat_two_sided: f64,
    pub ci_two_sided: Interval,
    /// Sample mean of `‖f(x)‖²`.
    pub mean_norm_sq: f64,
    pub stderr_norm_sq: f64,
}

impl KTally {
    fn from_norms(k: usize, eps: f64, norms: &[f64]) -> Self {
        let trials = norms.len() as u64;
        let fail_hi = norms.iter().filter(|&&v| v > 1.0 + eps).count() as u64;
        let fail_lo = norms.iter().filter(|&&v| v < 1.0 - eps).count() as u64;
        let (mean_norm_sq, stderr_norm_sq) = mean_stderr(norms);
        let p = |f: u64| f as f64 / trials as f64;
        Self {
            k,
            trials,
            fail_hi,
            fail_lo,
            p_hat_hi: p(fail_hi),
            p_hat_lo: p(fail_lo),
            ci_hi: wilson95(fail_hi, trials),
            ci_lo: wilson95(fail_lo, trials),
            p_hat_two_sided: p(fail_hi + fail_lo),
            ci_two_sided: wilson95(fail_hi + fail_lo, trials),
            mean_norm_sq,
            stderr_norm_sq,
        }
    }

    pub fn failures(&self) -> u64 {
        self.fail_hi + self.fail_lo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config_echo: ExperimentConfig,
    pub seed_rule: String,
    pub per_k: Vec<KTally>,
    /// `P(b² > 1 + ε)` for standard normal `b`; set by counterexample runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_tail: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitted_constants: Option<OffdiagFit>,
}

/// Outcome of a statistical check on an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

fn too_few_trials(name: &str, trials: u64) -> Option<CheckOutcome> {
    (trials < MIN_TRIALS_FOR_ASSERTION).then(|| {
        CheckOutcome::new(
            name,
            false,
            format!("{trials} trials is below the minimum of {MIN_TRIALS_FOR_ASSERTION}"),
        )
    })
}

/// `later` is not above `earlier` unless their intervals overlap.
fn non_increasing_up_to_overlap(earlier: (f64, Interval), later: (f64, Interval)) -> bool {
    later.0 <= earlier.0 || later.1.overlaps(&earlier.1)
}

impl ExperimentResult {
    fn sorted(&self) -> Vec<&KTally> {
        let mut v: Vec<&KTally> = self.per_k.iter().collect();
        v.sort_by_key(|t| t.k);
        v
    }

    /// Failure probabilities (each tail and both together) do not increase
    /// with `k` beyond CI overlap, and the smallest and largest `k` have
    /// separated two-sided intervals.
    pub fn check_decay(&self) -> CheckOutcome {
        const NAME: &str = "decay";
        if let Some(c) = too_few_trials(NAME, self.config_echo.trials) {
            return c;
        }
        let rows = self.sorted();
        if rows.len() < 2 {
            return CheckOutcome::new(NAME, false, "need at least two target dimensions".into());
        }
        let mut problems = Vec::new();
        for w in rows.windows(2) {
            let (a, b) = (w[0], w[1]);
            let pairs = [
                ("hi", (a.p_hat_hi, a.ci_hi), (b.p_hat_hi, b.ci_hi)),
                ("lo", (a.p_hat_lo, a.ci_lo), (b.p_hat_lo, b.ci_lo)),
                (
                    "two-sided",
                    (a.p_hat_two_sided, a.ci_two_sided),
                    (b.p_hat_two_sided, b.ci_two_sided),
                ),
            ];
            for (tail, e, l) in pairs {
                if !non_increasing_up_to_overlap(e, l) {
                    problems.push(format!("{tail} tail rises from k={} to k={}", a.k, b.k));
                }
            }
        }
        let (first, last) = (rows[0], rows[rows.len() - 1]);
        if !last.ci_two_sided.strictly_below(&first.ci_two_sided) {
            problems.push(format!(
                "k={} interval {} not separated below k={} interval {}",
                last.k, last.ci_two_sided, first.k, first.ci_two_sided
            ));
        }
        let summary = rows
            .iter()
            .map(|t| format!("k={}: {:.4}", t.k, t.p_hat_two_sided))
            .collect::<Vec<_>>()
            .join(", ");
        CheckOutcome::new(
            NAME,
            problems.is_empty(),
            if problems.is_empty() {
                summary
            } else {
                format!("{summary}; {}", problems.join("; "))
            },
        )
    }

    /// Sample mean of `‖f(x)‖²` within `n_stderr` standard errors of 1.
    pub fn check_mean(&self, n_stderr: f64) -> CheckOutcome {
        const NAME: &str = "mean";
        if let Some(c) = too_few_trials(NAME, self.config_echo.trials) {
            return c;
        }
        let mut ok = true;
        let mut parts = Vec::new();
        for t in self.sorted() {
            let dev = (t.mean_norm_sq - 1.0).abs();
            let pass = dev <= n_stderr * t.stderr_norm_sq + 1e-12;
            ok &= pass;
            parts.push(format!(
                "k={}: mean {:.5} ± {:.5}{}",
                t.k,
                t.mean_norm_sq,
                t.stderr_norm_sq,
                if pass { "" } else { " FAIL" }
            ));
        }
        CheckOutcome::new(NAME, ok, parts.join(", "))
    }

    /// Every upper-tail estimate within `n_stderr` binomial standard errors
    /// (evaluated at the reference) of `reference`.
    pub fn check_flat(&self, reference: f64, n_stderr: f64) -> CheckOutcome {
        const NAME: &str = "flat";
        if let Some(c) = too_few_trials(NAME, self.config_echo.trials) {
            return c;
        }
        let mut ok = true;
        let mut parts = Vec::new();
        for t in self.sorted() {
            let se = (reference * (1.0 - reference) / t.trials as f64).sqrt();
            let pass = (t.p_hat_hi - reference).abs() <= n_stderr * se;
            ok &= pass;
            parts.push(format!(
                "k={}: {:.4} (ref {:.4} ± {:.4}){}",
                t.k,
                t.p_hat_hi,
                reference,
                n_stderr * se,
                if pass { "" } else { " FAIL" }
            ));
        }
        CheckOutcome::new(NAME, ok, parts.join(", "))
    }

    /// Two-sided failure observations for [`calibrate_offdiag_constant`].
    pub fn failure_observations(&self) -> Vec<FailureObservation> {
        self.per_k
            .iter()
            .map(|t| FailureObservation {
                k: t.k,
                p_hat: t.p_hat_two_sided,
            })
            .collect()
    }
}

/// Tallies two-sided deviations of `‖f(x)‖²` from 1 over fresh transforms.
pub fn run_norm_concentration(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    if !cfg.apply_sign_flip {
        return Err(Error::invalid(
            "norm concentration requires the sign flip; use run_counterexample without it",
        ));
    }
    run_tallies(cfg)
}

/// The same tallies with the sign flip disabled, Gaussian coefficients and
/// the constant unit vector; the embedded squared norm is then `b²` for a
/// single standard normal `b`, whatever `k` and `d` are.
pub fn run_counterexample(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    if cfg.apply_sign_flip {
        return Err(Error::invalid(
            "counterexample requires the sign flip to be disabled",
        ));
    }
    if cfg.distribution != CoefficientDistribution::Gaussian {
        return Err(Error::invalid(
            "counterexample requires Gaussian coefficients",
        ));
    }
    if cfg.test_vector != TestVector::ConstantUnit {
        return Err(Error::invalid(
            "counterexample requires the constant unit vector",
        ));
    }
    let mut result = run_tallies(cfg)?;
    result.reference_tail = Some(chi1_upper_tail(cfg.eps));
    Ok(result)
}

fn run_tallies(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let x = cfg.unit_vector();
    let per_k = cfg
        .ks
        .iter()
        .map(|&k| {
            let spec = TransformSpec::new(cfg.d, k, cfg.distribution, cfg.structure, 0)?;
            let stream = derive_trial_seed(cfg.master_seed, k as u64);
            let norms = (0..cfg.trials)
                .into_par_iter()
                .map(|trial| {
                    let mut t =
                        SampledTransform::sample(spec.with_seed(derive_trial_seed(stream, trial)));
                    if !cfg.apply_sign_flip {
                        t = t.without_sign_flip();
                    }
                    FastEmbedder::new(t).norm_sq(&x)
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(KTally::from_norms(k, cfg.eps, &norms))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResult {
        config_echo: cfg.clone(),
        seed_rule: SEED_RULE_ID.to_string(),
        per_k,
        reference_tail: None,
        fitted_constants: None,
    })
}

/// Empirical two-sided failure probability at one target dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FailureObservation {
    pub k: usize,
    pub p_hat: f64,
}

/// Least-squares fit of `-ln p̂ = c' · (kε²)^{1/3} + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffdiagFit {
    pub c_offdiag: f64,
    pub intercept: f64,
    /// `(k, observed - fitted)` for every usable point.
    pub residuals: Vec<(usize, f64)>,
    pub usable_points: usize,
    /// Points with `p̂ = 0`, dropped from the fit.
    pub censored_points: usize,
    pub note: String,
}

/// Fits the off-diagonal rate constant from failure estimates over a grid of
/// target dimensions. Zero estimates are censored, not extrapolated.
pub fn calibrate_offdiag_constant(obs: &[FailureObservation], eps: f64) -> Result<OffdiagFit> {
    check_eps(eps)?;
    let (usable, censored): (Vec<&FailureObservation>, Vec<_>) =
        obs.iter().partition(|o| o.p_hat > 0.0);
    let insufficient = || Error::InsufficientData {
        usable: usable.len(),
        censored: censored.len(),
    };
    if usable.len() < 2 {
        return Err(insufficient());
    }
    let pts: Vec<(usize, f64, f64)> = usable
        .iter()
        .map(|o| (o.k, (o.k as f64 * eps * eps).cbrt(), -o.p_hat.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.2).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.1 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.1 - mx) * (p.2 - my)).sum();
    if sxx <= 0.0 {
        return Err(insufficient());
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    Ok(OffdiagFit {
        c_offdiag: slope,
        intercept,
        residuals: pts
            .iter()
            .map(|&(k, x, y)| (k, y - (slope * x + intercept)))
            .collect(),
        usable_points: pts.len(),
        censored_points: censored.len(),
        note:
            "rate constant of exp(-c'(k eps^2)^(1/3)); defined only up to an unspecified constant"
                .into(),
    })
}

/// Success statistics of the pairwise distortion test at one `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseTally {
    pub k: usize,
    pub draws: u64,
    pub successes: u64,
    pub success_fraction: f64,
    pub ci: Interval,
    /// Extreme pair ratios over all draws.
    pub min_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseResult {
    pub n: usize,
    pub d: usize,
    pub eps: f64,
    pub distribution: CoefficientDistribution,
    pub structure: MatrixStructure,
    pub master_seed: u64,
    pub seed_rule: String,
    pub per_k: Vec<PairwiseTally>,
    /// Smallest tested `k` whose success fraction is at least 2/3.
    pub smallest_k_two_thirds: Option<usize>,
}

impl PairwiseResult {
    /// Success fraction does not drop with `k` beyond CI overlap.
    pub fn check_monotone(&self) -> CheckOutcome {
        let mut rows: Vec<&PairwiseTally> = self.per_k.iter().collect();
        rows.sort_by_key(|t| t.k);
        let mut problems = Vec::new();
        for w in rows.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b.success_fraction < a.success_fraction && !b.ci.overlaps(&a.ci) {
                problems.push(format!("success drops from k={} to k={}", a.k, b.k));
            }
        }
        let summary = rows
            .iter()
            .map(|t| format!("k={}: {:.2}", t.k, t.success_fraction))
            .collect::<Vec<_>>()
            .join(", ");
        let ok = problems.is_empty();
        CheckOutcome::new(
            "monotone",
            ok,
            if ok {
                summary
            } else {
                format!("{summary}; {}", problems.join("; "))
            },
        )
    }

    /// At the largest `k`, success fraction ≥ 2/3 - CI half-width.
    pub fn check_two_thirds(&self) -> CheckOutcome {
        match self.per_k.iter().max_by_key(|t| t.k) {
            None => CheckOutcome::new("two-thirds", false, "no target dimensions".into()),
            Some(t) => {
                let floor = 2.0 / 3.0 - t.ci.half_width();
                CheckOutcome::new(
                    "two-thirds",
                    t.success_fraction >= floor,
                    format!(
                        "k={}: success {:.3} vs floor {:.3}; smallest k reaching 2/3: {:?}",
                        t.k, t.success_fraction, floor, self.smallest_k_two_thirds
                    ),
                )
            }
        }
    }
}

/// For each `k` and each of `draws` fresh transforms, embeds the whole point
/// set and records whether every pairwise squared distance stays within
/// `[1 - eps, 1 + eps]`.
#[allow(clippy::too_many_arguments)]
pub fn run_pairwise_jl(
    points: &PointSet,
    eps: f64,
    ks: &[usize],
    draws: u64,
    master_seed: u64,
    distribution: CoefficientDistribution,
    structure: MatrixStructure,
) -> Result<PairwiseResult> {
    check_eps(eps)?;
    if draws < MIN_PAIRWISE_DRAWS {
        return Err(Error::invalid(format!(
            "draws must be at least {MIN_PAIRWISE_DRAWS}"
        )));
    }
    if ks.is_empty() {
        return Err(Error::invalid("at least one target dimension is required"));
    }
    let d = points.d();
    let per_k = ks
        .iter()
        .map(|&k| {
            let spec = TransformSpec::new(d, k, distribution, structure, 0)?;
            let stream = derive_trial_seed(master_seed, k as u64);
            let reports = (0..draws)
                .into_par_iter()
                .map(|draw| {
                    let t =
                        SampledTransform::sample(spec.with_seed(derive_trial_seed(stream, draw)));
                    let embedded = FastEmbedder::new(t).embed_points(points)?;
                    distortion_report(points, &embedded, eps)
                })
                .collect::<Result<Vec<_>>>()?;
            let successes = reports.iter().filter(|r| r.success).count() as u64;
            Ok(PairwiseTally {
                k,
                draws,
                successes,
                success_fraction: successes as f64 / draws as f64,
                ci: wilson95(successes, draws),
                min_ratio: reports.iter().filter_map(|r| r.min_ratio).reduce(f64::min),
                max_ratio: reports.iter().filter_map(|r| r.max_ratio).reduce(f64::max),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let smallest_k_two_thirds = per_k
        .iter()
        .filter(|t| t.success_fraction >= 2.0 / 3.0)
        .map(|t| t.k)
        .min();
    Ok(PairwiseResult {
        n: points.n(),
        d,
        eps,
        distribution,
        structure,
        master_seed,
        seed_rule: SEED_RULE_ID.to_string(),
        per_k,
        smallest_k_two_thirds,
    })
}

/// Empirical tails of `Z = Σ α_i (a_i² - 1)` at one level `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmTally {
    pub t: f64,
    pub upper_threshold: f64,
    pub lower_threshold: f64,
    /// `exp(-t)`.
    pub bound: f64,
    pub trials: u64,
    /// Count of `Z ≥ upper_threshold`.
    pub exceed_hi: u64,
    /// Count of `Z ≤ -lower_threshold`.
    pub exceed_lo: u64,
    pub p_hat_hi: f64,
    pub p_hat_lo: f64,
    pub stderr_hi: f64,
    pub stderr_lo: f64,
    pub ci_hi: Interval,
    pub ci_lo: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmTailResult {
    pub alpha_len: usize,
    pub master_seed: u64,
    pub seed_rule: String,
    pub per_t: Vec<LmTally>,
}

impl LmTailResult {
    /// Both empirical tails at most `exp(-t) + n_stderr · stderr`.
    pub fn check_bound(&self, n_stderr: f64) -> CheckOutcome {
        const NAME: &str = "bound";
        if let Some(t) = self.per_t.first() {
            if let Some(c) = too_few_trials(NAME, t.trials) {
                return c;
            }
        }
        let mut ok = true;
        let mut parts = Vec::new();
        for r in &self.per_t {
            let hi = r.p_hat_hi <= r.bound + n_stderr * r.stderr_hi;
            let lo = r.p_hat_lo <= r.bound + n_stderr * r.stderr_lo;
            ok &= hi && lo;
            parts.push(format!(
                "t={}: hi {:.5}, lo {:.5}, bound {:.5}{}",
                r.t,
                r.p_hat_hi,
                r.p_hat_lo,
                r.bound,
                if hi && lo { "" } else { " FAIL" }
            ));
        }
        CheckOutcome::new(NAME, ok, parts.join(", "))
    }
}

/// Simulates `Z = Σ α_i (a_i² - 1)` with standard normal `a` and tallies
/// both tails against the Laurent–Massart thresholds at each level in `ts`.
pub fn run_lm_tail(
    alpha: &[f64],
    ts: &[f64],
    trials: u64,
    master_seed: u64,
) -> Result<LmTailResult> {
    if alpha.is_empty() {
        return Err(Error::invalid("weights must be nonempty"));
    }
    if trials == 0 || ts.is_empty() {
        return Err(Error::invalid("trials and levels must be nonempty"));
    }
    let params = ts
        .iter()
        .map(|&t| TailBoundParams::new(alpha.to_vec(), t))
        .collect::<Result<Vec<_>>>()?;
    let zs: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut s = SeedStream::new(derive_trial_seed(master_seed, trial));
            alpha.iter().map(|w| w * (s.gaussian().powi(2) - 1.0)).sum()
        })
        .collect();
    let per_t = params
        .iter()
        .map(|p| {
            let upper = lm_upper_threshold(p);
            let lower = lm_lower_threshold(p);
            let exceed_hi = zs.iter().filter(|&&z| z >= upper).count() as u64;
            let exceed_lo = zs.iter().filter(|&&z| z <= -lower).count() as u64;
            LmTally {
                t: p.t(),
                upper_threshold: upper,
                lower_threshold: lower,
                bound: p.probability_bound(),
                trials,
                exceed_hi,
                exceed_lo,
                p_hat_hi: exceed_hi as f64 / trials as f64,
                p_hat_lo: exceed_lo as f64 / trials as f64,
                stderr_hi: binomial_stderr(exceed_hi, trials),
                stderr_lo: binomial_stderr(exceed_lo, trials),
                ci_hi: wilson95(exceed_hi, trials),
                ci_lo: wilson95(exceed_lo, trials),
            }
        })
        .collect();
    Ok(LmTailResult {
        alpha_len: alpha.len(),
        master_seed,
        seed_rule: SEED_RULE_ID.to_string(),
        per_t,
    })
}
