//! Message-passing state and the three sweep orders (flooding, sequential
//! check-node, sequential variable-node).
//!
//! All decoding happens in the syndrome domain: variables are candidate
//! error bits with channel prior `μ = ln((1-p)/p)`, checks carry the sign
//! `σ_c = (-1)^{s_c}` of the measured syndrome, and the hard decision is
//! `x̂_v = 1` iff the bias goes negative.
//!
//! Numeric policy: tanh-product magnitudes are held at `1 - atanh_guard`
//! before atanh, and every *stored* message or bias is clipped to
//! `±llr_clip`. Within one update the unclipped running value is used, so
//! clipping one output never contaminates its siblings.

use crate::code::TannerGraph;
use crate::decoders::{BpParams, Schedule, ScheduleKind};
use crate::gf2::BitVector;

#[inline]
fn clip(x: f64, limit: f64) -> f64 {
    x.clamp(-limit, limit)
}

/// Sum-product CN→VN message `2·(-1)^s·atanh(Π tanh(m/2))` over the other
/// neighbors' messages. The product magnitude is pre-clipped to
/// `1 - atanh_guard`; the result is clipped to `±llr_clip`.
pub fn cn_update(incoming: &[f64], syndrome_bit: bool, params: &BpParams) -> f64 {
    let mut product = if syndrome_bit { -1.0 } else { 1.0 };
    for &m in incoming {
        product *= (0.5 * m).tanh();
    }
    let bound = 1.0 - params.atanh_guard;
    let out = clip(2.0 * product.clamp(-bound, bound).atanh(), params.llr_clip);
    debug_assert!(out.is_finite());
    out
}

/// VN bias `prior + Σ incoming` and the extrinsic outputs
/// `bias - incoming[k]`. The unclipped sum feeds the subtractions; the
/// returned bias and every outgoing message are clipped.
pub fn vn_update(prior: f64, incoming: &[f64], params: &BpParams) -> (f64, Vec<f64>) {
    let mut raw = prior;
    for &m in incoming {
        raw += m;
    }
    let bias = clip(raw, params.llr_clip);
    let outgoing = incoming.iter().map(|&m| clip(raw - m, params.llr_clip)).collect();
    (bias, outgoing)
}

/// Per-call decoding state over a borrowed Tanner graph.
///
/// Message storage is flat: `m_cv` is variable-major (slot `var_off[v] + k`
/// holds the message from `var_neighbors(v)[k]` into `v`), `m_vc` is
/// check-major (slot `check_off[c] + k` holds the message from
/// `check_neighbors(c)[k]` into `c`). The graph's cross-position indices
/// translate between the two sides.
pub struct BpEngine<'g> {
    graph: &'g TannerGraph,
    params: BpParams,
    var_off: Vec<usize>,
    check_off: Vec<usize>,
    prior: Vec<f64>,
    sigma: Vec<f64>,
    s_bits: Vec<bool>,
    m_vc: Vec<f64>,
    m_cv: Vec<f64>,
    bias: Vec<f64>,
    x_hat: Vec<bool>,
    messages: u64,
}

impl<'g> BpEngine<'g> {
    /// # Panics
    /// Panics if `s_x.len() != n_checks`, `priors.len() != n_vars`, any
    /// prior is not finite, or the params are out of range.
    pub fn new(graph: &'g TannerGraph, s_x: &BitVector, priors: &[f64], params: &BpParams) -> Self {
        assert!(params.llr_clip > 0.0 && params.llr_clip.is_finite(), "llr_clip must be positive and finite");
        assert!(params.atanh_guard > 0.0 && params.atanh_guard < 1.0, "atanh_guard must be in (0,1)");
        assert_eq!(s_x.len(), graph.n_checks(), "syndrome length != check count");
        assert_eq!(priors.len(), graph.n_vars(), "prior length != variable count");

        let mut var_off = Vec::with_capacity(graph.n_vars() + 1);
        var_off.push(0);
        for v in 0..graph.n_vars() {
            var_off.push(var_off[v] + graph.var_neighbors(v).len());
        }
        let mut check_off = Vec::with_capacity(graph.n_checks() + 1);
        check_off.push(0);
        for c in 0..graph.n_checks() {
            check_off.push(check_off[c] + graph.check_neighbors(c).len());
        }

        let s_bits: Vec<bool> = (0..graph.n_checks()).map(|c| s_x.get(c)).collect();
        let sigma: Vec<f64> = s_bits.iter().map(|&b| if b { -1.0 } else { 1.0 }).collect();

        let mut engine = BpEngine {
            graph,
            params: *params,
            var_off,
            check_off,
            prior: Vec::new(),
            sigma,
            s_bits,
            m_vc: vec![0.0; graph.edge_count()],
            m_cv: vec![0.0; graph.edge_count()],
            bias: vec![0.0; graph.n_vars()],
            x_hat: vec![false; graph.n_vars()],
            messages: 0,
        };
        engine.reinit(priors);
        engine
    }

    /// Resets all messages and biases from the given priors: `m_vc = μ_v`
    /// on every edge, `m_cv = 0`, `bias = μ_v`. The CN→VN message counter
    /// survives, so decimation rounds accumulate into one total.
    ///
    /// # Panics
    /// Panics on length mismatch or non-finite priors.
    pub fn reinit(&mut self, priors: &[f64]) {
        self.set_priors(priors);
        for v in 0..self.graph.n_vars() {
            let init = clip(self.prior[v], self.params.llr_clip);
            self.bias[v] = init;
            for (k, &c) in self.graph.var_neighbors(v).iter().enumerate() {
                self.m_vc[self.check_off[c] + self.graph.var_pos_in_check(v)[k]] = init;
            }
        }
        self.m_cv.fill(0.0);
        self.x_hat.fill(false);
    }

    /// Replaces the priors without touching messages (warm start).
    ///
    /// # Panics
    /// Panics on length mismatch or non-finite priors.
    pub fn set_priors(&mut self, priors: &[f64]) {
        assert_eq!(priors.len(), self.graph.n_vars(), "prior length != variable count");
        assert!(priors.iter().all(|p| p.is_finite()), "priors must be finite");
        self.prior.clear();
        self.prior.extend_from_slice(priors);
    }

    /// CN→VN message for the edge in slot `skip_pos` of check `c`, from the
    /// current v→c messages of the other neighbors. Identical arithmetic to
    /// [`cn_update`] on the gathered messages.
    fn check_message_excluding(&self, c: usize, skip_pos: usize) -> f64 {
        let base = self.check_off[c];
        let deg = self.graph.check_neighbors(c).len();
        let mut product = self.sigma[c];
        for k in 0..deg {
            if k != skip_pos {
                product *= (0.5 * self.m_vc[base + k]).tanh();
            }
        }
        let bound = 1.0 - self.params.atanh_guard;
        let out = clip(2.0 * product.clamp(-bound, bound).atanh(), self.params.llr_clip);
        debug_assert!(out.is_finite());
        out
    }

    /// Recomputes `bias[v]` and all of v's outgoing messages from the
    /// current incoming `m_cv`. Same arithmetic as [`vn_update`].
    fn vn_update_at(&mut self, v: usize) {
        let base = self.var_off[v];
        let deg = self.graph.var_neighbors(v).len();
        let mut raw = self.prior[v];
        for k in 0..deg {
            raw += self.m_cv[base + k];
        }
        self.bias[v] = clip(raw, self.params.llr_clip);
        for k in 0..deg {
            let c = self.graph.var_neighbors(v)[k];
            let pos = self.graph.var_pos_in_check(v)[k];
            let out = clip(raw - self.m_cv[base + k], self.params.llr_clip);
            debug_assert!(out.is_finite());
            self.m_vc[self.check_off[c] + pos] = out;
        }
    }

    /// One full iteration in the given schedule order. Exactly `edge_count`
    /// stored CN→VN messages are produced regardless of the schedule.
    pub fn sweep(&mut self, schedule: &Schedule) {
        match schedule.kind() {
            ScheduleKind::Flooding => self.sweep_flooding(),
            ScheduleKind::Scns => {
                assert_eq!(schedule.order().len(), self.graph.n_checks(), "SCNS order length != check count");
                self.sweep_scns(schedule.order());
            }
            ScheduleKind::Svns => {
                assert_eq!(schedule.order().len(), self.graph.n_vars(), "SVNS order length != variable count");
                self.sweep_svns(schedule.order());
            }
        }
    }

    /// Classic two-phase sweep: every CN message from last iteration's VN
    /// messages, then every VN update.
    fn sweep_flooding(&mut self) {
        for c in 0..self.graph.n_checks() {
            for k in 0..self.graph.check_neighbors(c).len() {
                let v = self.graph.check_neighbors(c)[k];
                let pos = self.graph.check_pos_in_var(c)[k];
                self.m_cv[self.var_off[v] + pos] = self.check_message_excluding(c, k);
                self.messages += 1;
            }
        }
        for v in 0..self.graph.n_vars() {
            self.vn_update_at(v);
        }
    }

    /// Sequential CN sweep. Per check c (in π_C order): propagate stored
    /// messages to all of ∂c, then refresh each neighbor's bias by freshly
    /// evaluating every *other* incident check. Those auxiliary evaluations
    /// are recomputed on the spot, never stored, and never counted.
    fn sweep_scns(&mut self, order: &[usize]) {
        for &c in order {
            let deg = self.graph.check_neighbors(c).len();
            for k in 0..deg {
                let v = self.graph.check_neighbors(c)[k];
                let pos = self.graph.check_pos_in_var(c)[k];
                self.m_cv[self.var_off[v] + pos] = self.check_message_excluding(c, k);
                self.messages += 1;
            }
            for k in 0..deg {
                let v = self.graph.check_neighbors(c)[k];
                let pos_of_c = self.graph.check_pos_in_var(c)[k];
                let fresh = self.m_cv[self.var_off[v] + pos_of_c];
                let mut sum = self.prior[v] + fresh;
                for (j, &c2) in self.graph.var_neighbors(v).iter().enumerate() {
                    if j == pos_of_c {
                        continue;
                    }
                    let skip = self.graph.var_pos_in_check(v)[j];
                    sum += self.check_message_excluding(c2, skip);
                }
                self.bias[v] = clip(sum, self.params.llr_clip);
                let out = clip(sum - fresh, self.params.llr_clip);
                debug_assert!(out.is_finite());
                self.m_vc[self.check_off[c] + k] = out;
            }
        }
    }

    /// Sequential VN sweep. Per variable v (in π_V order): gather fresh
    /// messages from every incident check (stored and counted), then one
    /// VN update redistributes the new bias extrinsically.
    fn sweep_svns(&mut self, order: &[usize]) {
        for &v in order {
            for k in 0..self.graph.var_neighbors(v).len() {
                let c = self.graph.var_neighbors(v)[k];
                let skip = self.graph.var_pos_in_check(v)[k];
                self.m_cv[self.var_off[v] + k] = self.check_message_excluding(c, skip);
                self.messages += 1;
            }
            self.vn_update_at(v);
        }
    }

    /// Hard decision from the current biases: `x̂_v = 1` iff `bias_v < 0`.
    pub fn update_hard_decision(&mut self) {
        for v in 0..self.graph.n_vars() {
            self.x_hat[v] = self.bias[v] < 0.0;
        }
    }

    /// Whether the current hard decision reproduces the measured syndrome.
    pub fn syndrome_satisfied(&self) -> bool {
        (0..self.graph.n_checks()).all(|c| {
            let parity = self
                .graph
                .check_neighbors(c)
                .iter()
                .fold(false, |acc, &v| acc ^ self.x_hat[v]);
            parity == self.s_bits[c]
        })
    }

    /// Runs sweeps until the hard decision matches the syndrome or the
    /// iteration cap is hit. Returns (converged, iterations used); the
    /// check happens after each full iteration, so a zero syndrome
    /// converges at iteration 1, not 0.
    ///
    /// # Panics
    /// Panics if `max_iterations == 0`.
    pub fn run(&mut self, schedule: &Schedule, max_iterations: u64) -> (bool, u64) {
        assert!(max_iterations >= 1, "iteration cap must be at least 1");
        for t in 1..=max_iterations {
            self.sweep(schedule);
            self.update_hard_decision();
            if self.syndrome_satisfied() {
                return (true, t);
            }
        }
        (false, max_iterations)
    }

    pub fn biases(&self) -> &[f64] {
        &self.bias
    }

    /// Total stored CN→VN messages so far; never reset, monotone over the
    /// engine's life.
    pub fn messages(&self) -> u64 {
        self.messages
    }

    pub fn hard_decision(&self) -> BitVector {
        let mut x = BitVector::zeros(self.graph.n_vars());
        for (v, &bit) in self.x_hat.iter().enumerate() {
            if bit {
                x.set(v, true);
            }
        }
        x
    }

    /// True when every stored message and bias is finite and within
    /// ±llr_clip, and every prior is finite. Cheap enough to assert in
    /// stress tests.
    pub fn state_bounded(&self) -> bool {
        let lim = self.params.llr_clip;
        let ok = |x: &f64| x.is_finite() && x.abs() <= lim;
        self.m_vc.iter().all(ok)
            && self.m_cv.iter().all(ok)
            && self.bias.iter().all(ok)
            && self.prior.iter().all(|p| p.is_finite())
    }
}
