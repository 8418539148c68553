//! Decoding engines: flooding BP, sequential check-node BP (SCNS),
//! sequential variable-node BP (SVNS), guided decimation around any of the
//! three (BPGD), and flooding BP with order-0 OSD post-processing.
//!
//! Every decoder reports the same instrumentation: iterations consumed,
//! stored CN→VN messages (the complexity currency throughout this crate),
//! and decimation count. Under the counting rule here, each BP iteration
//! stores exactly `edge_count` CN→VN messages no matter the schedule, so
//! `cn_to_vn_messages == iterations_used × edge_count` holds for every
//! decoder; schedules differ in how *few iterations* they need, not in the
//! cost of one iteration. SCNS's auxiliary bias-refresh evaluations are
//! deliberately recomputed on the fly, never stored, and never counted.

mod engine;

pub use engine::{cn_update, vn_update, BpEngine};

use crate::channel::NoiseModel;
use crate::code::TannerGraph;
use crate::gf2::{BitMatrix, BitVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Iteration order of one BP sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScheduleKind {
    Flooding,
    Scns,
    Svns,
}

impl ScheduleKind {
    pub fn label(&self) -> &'static str {
        match self {
            ScheduleKind::Flooding => "flooding",
            ScheduleKind::Scns => "scns",
            ScheduleKind::Svns => "svns",
        }
    }
}

/// A sweep order: flooding (no order), or a fixed permutation of check
/// nodes (SCNS) / variable nodes (SVNS) drawn from `order_seed`.
#[derive(Debug, Clone)]
pub struct Schedule {
    kind: ScheduleKind,
    order: Vec<usize>,
    order_seed: u64,
}

impl Schedule {
    pub fn flooding() -> Self {
        Schedule {
            kind: ScheduleKind::Flooding,
            order: Vec::new(),
            order_seed: 0,
        }
    }

    /// Draws the node permutation for `kind` on `graph` by Fisher-Yates
    /// shuffle of a ChaCha8 generator seeded with `order_seed`. Flooding
    /// ignores the seed and carries an empty order.
    pub fn drawn(kind: ScheduleKind, graph: &TannerGraph, order_seed: u64) -> Self {
        let len = match kind {
            ScheduleKind::Flooding => 0,
            ScheduleKind::Scns => graph.n_checks(),
            ScheduleKind::Svns => graph.n_vars(),
        };
        let mut order: Vec<usize> = (0..len).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(order_seed));
        Schedule { kind, order, order_seed }
    }

    /// Like [`Schedule::drawn`] but addressed by trial index, so a campaign
    /// can reshuffle per trial while staying reproducible: trial `t` always
    /// sees the same permutation regardless of threading.
    pub fn drawn_for_trial(kind: ScheduleKind, graph: &TannerGraph, order_seed: u64, trial: u64) -> Self {
        let len = match kind {
            ScheduleKind::Flooding => 0,
            ScheduleKind::Scns => graph.n_checks(),
            ScheduleKind::Svns => graph.n_vars(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(order_seed);
        rng.set_stream(trial.wrapping_add(1));
        let mut order: Vec<usize> = (0..len).collect();
        order.shuffle(&mut rng);
        Schedule { kind, order, order_seed }
    }

    /// Wraps an explicit permutation (tests, externally chosen orders).
    ///
    /// # Panics
    /// Panics if `order` is not a permutation of `0..order.len()`, or if a
    /// flooding schedule is given a nonempty order.
    pub fn from_order(kind: ScheduleKind, order: Vec<usize>) -> Self {
        if kind == ScheduleKind::Flooding {
            assert!(order.is_empty(), "flooding takes no order");
        }
        let mut seen = vec![false; order.len()];
        for &i in &order {
            assert!(i < order.len() && !seen[i], "order is not a permutation of 0..{}", order.len());
            seen[i] = true;
        }
        Schedule { kind, order, order_seed: 0 }
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn order_seed(&self) -> u64 {
        self.order_seed
    }
}

/// BP iteration controls shared by all decoders.
#[derive(Debug, Clone, Copy)]
pub struct BpParams {
    /// Iteration cap T per BP round.
    pub max_iterations: u64,
    /// Magnitude bound on every stored message and bias.
    pub llr_clip: f64,
    /// ε keeping tanh-product magnitudes at most 1 − ε before atanh.
    pub atanh_guard: f64,
}

impl Default for BpParams {
    fn default() -> Self {
        BpParams {
            max_iterations: 100,
            llr_clip: 30.0,
            atanh_guard: 1e-12,
        }
    }
}

/// Guided-decimation controls.
#[derive(Debug, Clone, Copy)]
pub struct GdParams {
    /// Prior magnitude written when a variable is decimated. May exceed
    /// llr_clip; messages derived from it still clip.
    pub clamp_llr: f64,
    /// Cap on decimation events; `None` means one per variable. Values
    /// above n behave as n.
    pub max_decimations: Option<u64>,
    /// Keep messages across rounds instead of reinitializing after each
    /// decimation. Off by default: each round restarts BP from the updated
    /// priors.
    pub warm_start: bool,
}

impl Default for GdParams {
    fn default() -> Self {
        GdParams {
            clamp_llr: 25.0,
            max_decimations: None,
            warm_start: false,
        }
    }
}

/// What one decode call produced.
#[derive(Debug, Clone)]
pub struct DecodeResult {
    pub x_hat: BitVector,
    /// True iff `h1 · x_hat == s_x`.
    pub converged: bool,
    /// BP iterations consumed; for decimation decoders, summed over rounds.
    pub iterations_used: u64,
    /// Stored CN→VN messages; equals `iterations_used × edge_count`.
    pub cn_to_vn_messages: u64,
    /// Clamping events (0 for non-decimating decoders).
    pub decimations: u64,
    /// True iff the OSD-0 fallback ran.
    pub osd_applied: bool,
}

/// Channel prior `ln((1-p)/p)` replicated per variable, capped at llr_clip
/// so the stored state stays finite even for p_x = 0.
pub fn channel_priors(model: &NoiseModel, n: usize, params: &BpParams) -> Vec<f64> {
    vec![model.prior_llr().min(params.llr_clip); n]
}

/// Flooding BP with per-iteration early stopping.
pub fn decode_flooding(
    graph: &TannerGraph,
    s_x: &BitVector,
    model: &NoiseModel,
    params: &BpParams,
) -> DecodeResult {
    run_bp(graph, s_x, model, params, &Schedule::flooding())
}

/// Sequential check-node BP.
///
/// # Panics
/// Panics unless `schedule` is an SCNS schedule whose order permutes the
/// check indices of `graph`.
pub fn decode_scns(
    graph: &TannerGraph,
    s_x: &BitVector,
    model: &NoiseModel,
    params: &BpParams,
    schedule: &Schedule,
) -> DecodeResult {
    assert_eq!(schedule.kind(), ScheduleKind::Scns, "decode_scns needs an SCNS schedule");
    run_bp(graph, s_x, model, params, schedule)
}

/// Sequential variable-node BP.
///
/// # Panics
/// Panics unless `schedule` is an SVNS schedule whose order permutes the
/// variable indices of `graph`.
pub fn decode_svns(
    graph: &TannerGraph,
    s_x: &BitVector,
    model: &NoiseModel,
    params: &BpParams,
    schedule: &Schedule,
) -> DecodeResult {
    assert_eq!(schedule.kind(), ScheduleKind::Svns, "decode_svns needs an SVNS schedule");
    run_bp(graph, s_x, model, params, schedule)
}

fn run_bp(
    graph: &TannerGraph,
    s_x: &BitVector,
    model: &NoiseModel,
    params: &BpParams,
    schedule: &Schedule,
) -> DecodeResult {
    let priors = channel_priors(model, graph.n_vars(), params);
    let mut engine = BpEngine::new(graph, s_x, &priors, params);
    let (converged, iterations) = engine.run(schedule, params.max_iterations);
    DecodeResult {
        x_hat: engine.hard_decision(),
        converged,
        iterations_used: iterations,
        cn_to_vn_messages: engine.messages(),
        decimations: 0,
        osd_applied: false,
    }
}

/// BP with guided decimation. Rounds of inner BP run until convergence;
/// after each failed round the undecimated variable with the largest |bias|
/// (ties to the lowest index) has its prior clamped to
/// `sign(bias)·clamp_llr` (a zero bias clamps positive, toward "no error")
/// and messages restart from the updated priors. Decimated variables keep
/// message-passing with the clamped prior but leave the candidate pool.
///
/// `inner_schedule` picks the BP flavor of each round: flooding, SCNS, or
/// SVNS.
pub fn decode_bpgd(
    graph: &TannerGraph,
    s_x: &BitVector,
    model: &NoiseModel,
    params: &BpParams,
    gd: &GdParams,
    inner_schedule: &Schedule,
) -> DecodeResult {
    let n = graph.n_vars();
    assert!(gd.clamp_llr > 0.0 && gd.clamp_llr.is_finite(), "clamp_llr must be positive and finite");
    let cap = gd.max_decimations.map_or(n as u64, |m| m.min(n as u64));

    let mut priors = channel_priors(model, n, params);
    let mut decimated = vec![false; n];
    let mut engine = BpEngine::new(graph, s_x, &priors, params);
    let mut total_iterations = 0u64;
    let mut decimations = 0u64;

    loop {
        let (converged, iterations) = engine.run(inner_schedule, params.max_iterations);
        total_iterations += iterations;
        let finish = |engine: &BpEngine, converged: bool| DecodeResult {
            x_hat: engine.hard_decision(),
            converged,
            iterations_used: total_iterations,
            cn_to_vn_messages: engine.messages(),
            decimations,
            osd_applied: false,
        };
        if converged || decimations >= cap {
            return finish(&engine, converged);
        }
        let Some(pick) = most_reliable_undecimated(engine.biases(), &decimated) else {
            return finish(&engine, false);
        };
        let sign = if engine.biases()[pick] < 0.0 { -1.0 } else { 1.0 };
        priors[pick] = sign * gd.clamp_llr;
        decimated[pick] = true;
        decimations += 1;
        if gd.warm_start {
            engine.set_priors(&priors);
        } else {
            engine.reinit(&priors);
        }
    }
}

fn most_reliable_undecimated(biases: &[f64], decimated: &[bool]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (v, &b) in biases.iter().enumerate() {
        if decimated[v] {
            continue;
        }
        let magnitude = b.abs();
        // Strict > keeps the earliest index on ties.
        if best.is_none_or(|(_, m)| magnitude > m) {
            best = Some((v, magnitude));
        }
    }
    best.map(|(v, _)| v)
}

/// Columns ordered most-reliable-first: descending |bias|, ties broken by
/// lowest index. This is the pivot preference fed to the OSD-0 solve.
pub fn reliability_order(biases: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..biases.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        biases[b]
            .abs()
            .partial_cmp(&biases[a].abs())
            .expect("biases are finite")
            .then(a.cmp(&b))
    });
    order
}

/// Flooding BP with order-0 OSD post-processing: if BP exhausts its
/// iterations, solve `h1·x = s_x` directly with pivots preferred in
/// most-reliable-first bias order. The solve succeeds for every syndrome a
/// real error can produce; an out-of-column-space syndrome comes back
/// `converged = false`.
///
/// # Panics
/// Panics if `h1` and `graph` disagree on dimensions.
pub fn decode_bp_osd0(
    h1: &BitMatrix,
    graph: &TannerGraph,
    s_x: &BitVector,
    model: &NoiseModel,
    params: &BpParams,
) -> DecodeResult {
    assert_eq!(h1.rows(), graph.n_checks(), "h1 rows != check count");
    assert_eq!(h1.cols(), graph.n_vars(), "h1 cols != variable count");
    let priors = channel_priors(model, graph.n_vars(), params);
    let mut engine = BpEngine::new(graph, s_x, &priors, params);
    let (converged, iterations) = engine.run(&Schedule::flooding(), params.max_iterations);
    if converged {
        return DecodeResult {
            x_hat: engine.hard_decision(),
            converged: true,
            iterations_used: iterations,
            cn_to_vn_messages: engine.messages(),
            decimations: 0,
            osd_applied: false,
        };
    }
    let order = reliability_order(engine.biases());
    match h1.solve_consistent(s_x, &order) {
        Some(x_hat) => DecodeResult {
            x_hat,
            converged: true,
            iterations_used: iterations,
            cn_to_vn_messages: engine.messages(),
            decimations: 0,
            osd_applied: true,
        },
        None => DecodeResult {
            x_hat: engine.hard_decision(),
            converged: false,
            iterations_used: iterations,
            cn_to_vn_messages: engine.messages(),
            decimations: 0,
            osd_applied: true,
        },
    }
}

/// The decoder configurations the evaluation harness and CLI know about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecoderKind {
    /// Flooding BP.
    Bp,
    /// Sequential check-node BP.
    Scns,
    /// Sequential variable-node BP.
    Svns,
    /// Guided decimation around flooding BP.
    Bpgd,
    /// Guided decimation around SCNS.
    ScnsBpgd,
    /// Guided decimation around SVNS.
    SvnsBpgd,
    /// Flooding BP + order-0 OSD fallback.
    BpOsd0,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 7] = [
        DecoderKind::Bp,
        DecoderKind::Scns,
        DecoderKind::Svns,
        DecoderKind::Bpgd,
        DecoderKind::ScnsBpgd,
        DecoderKind::SvnsBpgd,
        DecoderKind::BpOsd0,
    ];

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "bp" => DecoderKind::Bp,
            "scns" => DecoderKind::Scns,
            "svns" => DecoderKind::Svns,
            "bpgd" => DecoderKind::Bpgd,
            "scns-bpgd" => DecoderKind::ScnsBpgd,
            "svns-bpgd" => DecoderKind::SvnsBpgd,
            "bp-osd0" => DecoderKind::BpOsd0,
            _ => return None,
        })
    }

    pub fn label(&self) -> &'static str {
        match self {
            DecoderKind::Bp => "bp",
            DecoderKind::Scns => "scns",
            DecoderKind::Svns => "svns",
            DecoderKind::Bpgd => "bpgd",
            DecoderKind::ScnsBpgd => "scns-bpgd",
            DecoderKind::SvnsBpgd => "svns-bpgd",
            DecoderKind::BpOsd0 => "bp-osd0",
        }
    }

    /// The sweep order this decoder's BP rounds use.
    pub fn schedule_kind(&self) -> ScheduleKind {
        match self {
            DecoderKind::Bp | DecoderKind::Bpgd | DecoderKind::BpOsd0 => ScheduleKind::Flooding,
            DecoderKind::Scns | DecoderKind::ScnsBpgd => ScheduleKind::Scns,
            DecoderKind::Svns | DecoderKind::SvnsBpgd => ScheduleKind::Svns,
        }
    }

    pub fn is_decimating(&self) -> bool {
        matches!(self, DecoderKind::Bpgd | DecoderKind::ScnsBpgd | DecoderKind::SvnsBpgd)
    }
}

/// Dispatches one decode call. `schedule` must match
/// `kind.schedule_kind()`; `gd` is ignored by non-decimating kinds; `h1` is
/// only consulted by OSD-0.
pub fn decode(
    kind: DecoderKind,
    h1: &BitMatrix,
    graph: &TannerGraph,
    s_x: &BitVector,
    model: &NoiseModel,
    params: &BpParams,
    gd: &GdParams,
    schedule: &Schedule,
) -> DecodeResult {
    match kind {
        DecoderKind::Bp => decode_flooding(graph, s_x, model, params),
        DecoderKind::Scns => decode_scns(graph, s_x, model, params, schedule),
        DecoderKind::Svns => decode_svns(graph, s_x, model, params, schedule),
        DecoderKind::Bpgd | DecoderKind::ScnsBpgd | DecoderKind::SvnsBpgd => {
            assert_eq!(schedule.kind(), kind.schedule_kind(), "inner schedule kind mismatch");
            decode_bpgd(graph, s_x, model, params, gd, schedule)
        }
        DecoderKind::BpOsd0 => decode_bp_osd0(h1, graph, s_x, model, params),
    }
}
