//! Outcome classification, exact binomial confidence intervals, and the
//! Monte Carlo campaign driver.
//!
//! A campaign fixes (code, decoder spec, master seed) and sweeps a p_x
//! grid. Trial `t` draws its error from `RngStream(master_seed, t)` and is
//! classified independently, so the work can be sharded across any number
//! of threads; aggregation sums integer counters, which makes the final
//! statistics exactly thread-count-invariant.

use crate::channel::{sample_error, syndrome, ChannelError, NoiseModel, RngStream};
use crate::code::{tanner_graph, CssCode, TannerGraph};
use crate::decoders::{decode, BpParams, DecodeResult, DecoderKind, GdParams, Schedule};
use crate::gf2::BitVector;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{Beta, ContinuousCDF};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(
        "decoder bug: converged estimate misses the syndrome on {mismatched_checks} check(s) \
         (decoder {decoder}, trial {trial})"
    )]
    SyndromeViolation {
        decoder: &'static str,
        trial: u64,
        mismatched_checks: usize,
    },
}

/// The four ways a trial can end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    /// x̂ equals the true error.
    ExactRecovery,
    /// x̂ differs from the truth by an X-stabilizer: physically a success.
    DegenerateRecovery,
    /// Zero-syndrome residual outside the stabilizer rowspace: an
    /// undetected failure.
    LogicalError,
    /// The decoder never satisfied the syndrome.
    Failure,
}

/// Classifies one decode result against the true error.
///
/// A converged result whose estimate does not actually reproduce the true
/// error's syndrome indicates a decoder bug and comes back as an error, not
/// an outcome.
///
/// # Panics
/// Panics if vector lengths disagree with `code.n()`.
pub fn classify(code: &CssCode, x_true: &BitVector, result: &DecodeResult) -> Result<Outcome, EvalError> {
    assert_eq!(x_true.len(), code.n(), "x_true length != n");
    assert_eq!(result.x_hat.len(), code.n(), "x_hat length != n");
    if !result.converged {
        return Ok(Outcome::Failure);
    }
    let mut residual = x_true.clone();
    residual ^= &result.x_hat;
    let residual_syndrome = code.h1().mul_vec(&residual);
    if !residual_syndrome.is_zero() {
        return Err(EvalError::SyndromeViolation {
            decoder: "unknown",
            trial: 0,
            mismatched_checks: residual_syndrome.weight(),
        });
    }
    if residual.is_zero() {
        Ok(Outcome::ExactRecovery)
    } else if code.g2().in_rowspace(&residual) {
        Ok(Outcome::DegenerateRecovery)
    } else {
        Ok(Outcome::LogicalError)
    }
}

/// Exact (Clopper-Pearson) two-sided binomial confidence interval for `k`
/// successes in `n` trials.
///
/// # Panics
/// Panics if `n == 0`, `k > n`, or `confidence` is not in (0,1).
pub fn clopper_pearson(k: u64, n: u64, confidence: f64) -> (f64, f64) {
    assert!(n >= 1, "interval needs at least one trial");
    assert!(k <= n, "k must not exceed n");
    assert!(confidence > 0.0 && confidence < 1.0, "confidence must be in (0,1)");
    let alpha = 1.0 - confidence;
    let low = if k == 0 {
        0.0
    } else {
        Beta::new(k as f64, (n - k + 1) as f64)
            .expect("valid shape parameters")
            .inverse_cdf(alpha / 2.0)
    };
    let high = if k == n {
        1.0
    } else {
        Beta::new((k + 1) as f64, (n - k) as f64)
            .expect("valid shape parameters")
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    (low, high)
}

/// One-sided upper Clopper-Pearson bound, the honest summary for a cell
/// with very few (or zero) observed events.
pub fn clopper_pearson_upper(k: u64, n: u64, confidence: f64) -> f64 {
    assert!(n >= 1, "interval needs at least one trial");
    assert!(k <= n, "k must not exceed n");
    assert!(confidence > 0.0 && confidence < 1.0, "confidence must be in (0,1)");
    if k == n {
        1.0
    } else {
        Beta::new((k + 1) as f64, (n - k) as f64)
            .expect("valid shape parameters")
            .inverse_cdf(confidence)
    }
}

/// Aggregated results of one (decoder, p_x) cell.
///
/// `fer` counts LogicalError and Failure frames; degenerate recoveries are
/// successes. `fer_nonconv_only` counts only Failure, for comparison with
/// conventions that ignore logical errors. Means are derived from the
/// integer totals, so equal totals imply bitwise-equal means.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialStats {
    pub p_x: f64,
    pub trials: u64,
    pub exact: u64,
    pub degenerate: u64,
    pub logical: u64,
    pub failure: u64,
    pub fer: f64,
    pub fer_ci_low: f64,
    pub fer_ci_high: f64,
    pub fer_nonconv_only: f64,
    pub mean_messages: f64,
    pub mean_decimations: f64,
    pub mean_iterations: f64,
    pub total_messages: u64,
    pub total_decimations: u64,
    pub total_iterations: u64,
}

impl TrialStats {
    /// Frame errors (logical + non-converged).
    pub fn frame_errors(&self) -> u64 {
        self.logical + self.failure
    }
}

/// Everything that defines a decoder column in a campaign.
#[derive(Debug, Clone)]
pub struct DecoderSpec {
    pub kind: DecoderKind,
    pub bp: BpParams,
    pub gd: GdParams,
    /// Seed for the SCNS/SVNS permutation draw; ignored by flooding kinds.
    pub order_seed: u64,
    /// Draw a fresh permutation per trial (stream-addressed by trial
    /// index) instead of one fixed order for the whole run.
    pub reshuffle_per_trial: bool,
}

impl DecoderSpec {
    pub fn new(kind: DecoderKind, bp: BpParams, gd: GdParams, order_seed: u64) -> Self {
        DecoderSpec {
            kind,
            bp,
            gd,
            order_seed,
            reshuffle_per_trial: false,
        }
    }
}

/// Campaign-wide controls.
#[derive(Debug, Clone, Copy)]
pub struct CampaignOptions {
    pub trials: u64,
    pub master_seed: u64,
    /// 0 uses the global rayon pool; any other value builds a dedicated
    /// pool of that size. The value never affects the statistics.
    pub threads: usize,
    /// Stop a cell at the next multiple of [`MAX_FAILURES_BATCH`] trials
    /// once this many frame errors have accumulated. Batch-aligned stopping
    /// keeps the consumed trial set, and therefore the statistics,
    /// independent of thread scheduling.
    pub max_failures: Option<u64>,
}

/// Cell granularity of the max-failures accelerator.
pub const MAX_FAILURES_BATCH: u64 = 1024;

#[derive(Debug, Default, Clone, Copy)]
struct CellTotals {
    trials: u64,
    exact: u64,
    degenerate: u64,
    logical: u64,
    failure: u64,
    messages: u64,
    decimations: u64,
    iterations: u64,
}

impl CellTotals {
    fn merge(mut self, other: CellTotals) -> CellTotals {
        self.trials += other.trials;
        self.exact += other.exact;
        self.degenerate += other.degenerate;
        self.logical += other.logical;
        self.failure += other.failure;
        self.messages += other.messages;
        self.decimations += other.decimations;
        self.iterations += other.iterations;
        self
    }

    fn frame_errors(&self) -> u64 {
        self.logical + self.failure
    }

    fn into_stats(self, p_x: f64) -> TrialStats {
        let n = self.trials;
        let frames = self.frame_errors();
        let (fer_ci_low, fer_ci_high) = clopper_pearson(frames, n, 0.95);
        TrialStats {
            p_x,
            trials: n,
            exact: self.exact,
            degenerate: self.degenerate,
            logical: self.logical,
            failure: self.failure,
            fer: frames as f64 / n as f64,
            fer_ci_low,
            fer_ci_high,
            fer_nonconv_only: self.failure as f64 / n as f64,
            mean_messages: self.messages as f64 / n as f64,
            mean_decimations: self.decimations as f64 / n as f64,
            mean_iterations: self.iterations as f64 / n as f64,
            total_messages: self.messages,
            total_decimations: self.decimations,
            total_iterations: self.iterations,
        }
    }
}

/// Runs `opts.trials` seeded trials per p_x value and aggregates one
/// [`TrialStats`] per grid point. Identical inputs give identical outputs
/// for every thread count.
///
/// # Panics
/// Panics if `opts.trials == 0`.
pub fn run_campaign(
    code: &CssCode,
    spec: &DecoderSpec,
    p_grid: &[f64],
    opts: &CampaignOptions,
) -> Result<Vec<TrialStats>, EvalError> {
    assert!(opts.trials >= 1, "a campaign needs at least one trial");
    let graph = tanner_graph(code);
    let schedule = Schedule::drawn(spec.kind.schedule_kind(), &graph, spec.order_seed);
    let pool = (opts.threads > 0).then(|| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .expect("failed to build thread pool")
    });

    let mut out = Vec::with_capacity(p_grid.len());
    for &p_x in p_grid {
        let model = NoiseModel::new(p_x)?;
        let cell = || run_cell(code, &graph, spec, &schedule, &model, opts);
        let totals = match &pool {
            Some(pool) => pool.install(cell)?,
            None => cell()?,
        };
        out.push(totals.into_stats(p_x));
    }
    Ok(out)
}

fn run_cell(
    code: &CssCode,
    graph: &TannerGraph,
    spec: &DecoderSpec,
    schedule: &Schedule,
    model: &NoiseModel,
    opts: &CampaignOptions,
) -> Result<CellTotals, EvalError> {
    let run_range = |from: u64, to: u64| -> Result<CellTotals, EvalError> {
        (from..to)
            .into_par_iter()
            .map(|trial| run_trial(code, graph, spec, schedule, model, opts.master_seed, trial))
            .try_reduce(CellTotals::default, |a, b| Ok(a.merge(b)))
    };

    let Some(max_failures) = opts.max_failures else {
        return run_range(0, opts.trials);
    };
    // Fixed batch boundaries: whether the cap is crossed mid-batch never
    // depends on how threads interleaved, so the consumed prefix is stable.
    let mut totals = CellTotals::default();
    let mut start = 0;
    while start < opts.trials {
        let end = opts.trials.min(start + MAX_FAILURES_BATCH);
        totals = totals.merge(run_range(start, end)?);
        if totals.frame_errors() >= max_failures {
            break;
        }
        start = end;
    }
    Ok(totals)
}

fn run_trial(
    code: &CssCode,
    graph: &TannerGraph,
    spec: &DecoderSpec,
    schedule: &Schedule,
    model: &NoiseModel,
    master_seed: u64,
    trial: u64,
) -> Result<CellTotals, EvalError> {
    let mut rng = RngStream::new(master_seed, trial);
    let x_true = sample_error(model, code.n(), &mut rng);
    let s_x = syndrome(code, &x_true);

    let per_trial_schedule;
    let schedule = if spec.reshuffle_per_trial {
        per_trial_schedule = Schedule::drawn_for_trial(spec.kind.schedule_kind(), graph, spec.order_seed, trial);
        &per_trial_schedule
    } else {
        schedule
    };

    let result = decode(spec.kind, code.h1(), graph, &s_x, model, &spec.bp, &spec.gd, schedule);
    // Counting-rule identity: every schedule stores exactly edge_count
    // CN->VN messages per iteration. Holding this on every single trial is
    // part of the instrumentation contract.
    assert_eq!(
        result.cn_to_vn_messages,
        result.iterations_used * graph.edge_count() as u64,
        "message counter identity broken on trial {trial}"
    );
    let outcome = classify(code, &x_true, &result).map_err(|e| match e {
        EvalError::SyndromeViolation { mismatched_checks, .. } => EvalError::SyndromeViolation {
            decoder: spec.kind.label(),
            trial,
            mismatched_checks,
        },
        other => other,
    })?;

    let mut totals = CellTotals {
        trials: 1,
        messages: result.cn_to_vn_messages,
        decimations: result.decimations,
        iterations: result.iterations_used,
        ..CellTotals::default()
    };
    match outcome {
        Outcome::ExactRecovery => totals.exact = 1,
        Outcome::DegenerateRecovery => totals.degenerate = 1,
        Outcome::LogicalError => totals.logical = 1,
        Outcome::Failure => totals.failure = 1,
    }
    Ok(totals)
}

/// Side-by-side significance summary of two campaigns on the same grid.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonCell {
    pub p_x: f64,
    pub fer_a: f64,
    pub fer_b: f64,
    /// `fer_a / fer_b`, with zero-frame cells replaced by their one-sided
    /// 95% upper bound (flagged below).
    pub fer_ratio: f64,
    /// True when either side had zero frames, making the ratio a bound
    /// rather than a point estimate.
    pub ratio_is_bound: bool,
    /// True when the 95% intervals do not overlap.
    pub intervals_disjoint: bool,
}

/// # Panics
/// Panics if the two stat lists cover different p_x grids.
pub fn compare_report(a: &[TrialStats], b: &[TrialStats]) -> Vec<ComparisonCell> {
    assert_eq!(a.len(), b.len(), "grids have different lengths");
    a.iter()
        .zip(b)
        .map(|(sa, sb)| {
            assert_eq!(sa.p_x, sb.p_x, "grids cover different p_x points");
            let mut ratio_is_bound = false;
            let mut effective = |s: &TrialStats| {
                if s.frame_errors() == 0 {
                    ratio_is_bound = true;
                    clopper_pearson_upper(0, s.trials, 0.95)
                } else {
                    s.fer
                }
            };
            let num = effective(sa);
            let den = effective(sb);
            ComparisonCell {
                p_x: sa.p_x,
                fer_a: sa.fer,
                fer_b: sb.fer,
                fer_ratio: num / den,
                ratio_is_bound,
                intervals_disjoint: sa.fer_ci_high < sb.fer_ci_low || sb.fer_ci_high < sa.fer_ci_low,
            }
        })
        .collect()
}
