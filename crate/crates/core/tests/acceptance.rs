//! Acceptance gate: one test per release criterion, each printing a
//! single PASS/FAIL verdict line (run with `--nocapture` to see verdicts
//! for passing criteria; failing ones surface theirs in the panic).
//!
//! Criteria that depend on the large published benchmark matrices run
//! only when `QLDPC_B1_MANIFEST` points at a code manifest for the
//! [[882,24]] code; otherwise the documented desk-scale fallback runs.

use qldpc::channel::{sample_error, syndrome, NoiseModel, RngStream};
use qldpc::code::{builtin_code, load_manifest, tanner_graph, CssCode, TannerGraph};
use qldpc::decoders::{
    channel_priors, decode, BpEngine, BpParams, DecodeResult, DecoderKind, GdParams, Schedule, ScheduleKind,
};
use qldpc::eval::{classify, compare_report, run_campaign, CampaignOptions, DecoderSpec, Outcome, TrialStats};
use qldpc::gf2::{BitMatrix, BitVector};
use std::time::Instant;

fn verdict(number: u32, name: &str, pass: bool, detail: &str) {
    let line = format!(
        "criterion {number} ({name}): {} - {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    println!("{line}");
    assert!(pass, "{line}");
}

fn spec_with(kind: DecoderKind, t: u64, order_seed: u64) -> DecoderSpec {
    DecoderSpec::new(
        kind,
        BpParams {
            max_iterations: t,
            ..BpParams::default()
        },
        GdParams::default(),
        order_seed,
    )
}

fn campaign(code: &CssCode, spec: &DecoderSpec, p: &[f64], trials: u64, seed: u64) -> Vec<TrialStats> {
    run_campaign(
        code,
        spec,
        p,
        &CampaignOptions {
            trials,
            master_seed: seed,
            threads: 0,
            max_failures: None,
        },
    )
    .expect("campaign must classify every trial")
}

fn b1_manifest() -> Option<CssCode> {
    let path = std::env::var_os("QLDPC_B1_MANIFEST")?;
    Some(load_manifest(std::path::Path::new(&path)).expect("QLDPC_B1_MANIFEST must point at a valid manifest"))
}

/// 1: every converged result reproduces the syndrome, across all decoder
/// kinds, two codes, and three noise levels, with at least 1e5 trials
/// inside a two-minute budget. `run_campaign` turns any converged
/// syndrome violation into an error, so an `Ok` sweep is the proof.
#[test]
fn criterion_1_syndrome_soundness() {
    let started = Instant::now();
    let mut total_trials = 0u64;
    let mut seed = 1000;
    for code_name in ["hgp:rep3", "hgp:hamming7"] {
        let code = builtin_code(code_name).unwrap();
        for kind in DecoderKind::ALL {
            let trials = if kind.is_decimating() { 1000 } else { 3500 };
            for p in [0.01, 0.05, 0.1] {
                seed += 1;
                let stats = campaign(&code, &spec_with(kind, 20, seed), &[p], trials, seed);
                total_trials += stats[0].trials;
            }
        }
    }
    let elapsed = started.elapsed();
    verdict(
        1,
        "syndrome soundness",
        total_trials >= 100_000 && elapsed.as_secs_f64() < 120.0,
        &format!("{total_trials} trials, 0 violations, {:.1}s", elapsed.as_secs_f64()),
    );
}

/// (n-1) x n bidiagonal chain: row i checks bits i and i+1. Cycle-free,
/// so BP marginals are exact once messages cross the diameter.
fn chain_h1(n: usize) -> BitMatrix {
    let rows: Vec<Vec<u8>> = (0..n - 1)
        .map(|i| {
            let mut row = vec![0u8; n];
            row[i] = 1;
            row[i + 1] = 1;
            row
        })
        .collect();
    BitMatrix::from_dense(&rows)
}

/// Posterior bit LLRs by brute force over all 2^n error patterns that
/// reproduce the syndrome.
fn exhaustive_bit_llrs(h1: &BitMatrix, s: &BitVector, p: f64) -> Vec<f64> {
    let n = h1.cols();
    assert!(n <= 20);
    let log_flip = (p / (1.0 - p)).ln();
    let mut mass = vec![[0.0f64; 2]; n];
    for pattern in 0u32..1 << n {
        let bits: Vec<u8> = (0..n).map(|v| (pattern >> v & 1) as u8).collect();
        let e = BitVector::from_bits(&bits);
        if h1.mul_vec(&e) != *s {
            continue;
        }
        let weight = e.weight() as f64;
        let w = (weight * log_flip).exp();
        for v in 0..n {
            mass[v][bits[v] as usize] += w;
        }
    }
    mass.iter().map(|m| (m[0] / m[1]).ln()).collect()
}

/// 2: on a cycle-free code the converged biases equal the exact posterior
/// LLRs for every syndrome and every schedule, within 1e-9.
#[test]
fn criterion_2_tree_exactness() {
    let n = 10;
    let p = 0.2;
    let sweeps = 25;
    let tol = 1e-9;
    let h1 = chain_h1(n);
    let graph = TannerGraph::from_h1(&h1);
    let params = BpParams::default();
    let model = NoiseModel::new(p).unwrap();
    let priors = channel_priors(&model, n, &params);

    let schedules = [
        Schedule::flooding(),
        Schedule::from_order(ScheduleKind::Scns, (0..graph.n_checks()).collect()),
        Schedule::drawn(ScheduleKind::Scns, &graph, 41),
        Schedule::from_order(ScheduleKind::Svns, (0..graph.n_vars()).collect()),
        Schedule::drawn(ScheduleKind::Svns, &graph, 43),
    ];

    let mut worst: f64 = 0.0;
    let mut checked = 0u64;
    for mask in 0u32..1 << graph.n_checks() {
        let bits: Vec<u8> = (0..graph.n_checks()).map(|c| (mask >> c & 1) as u8).collect();
        let s = BitVector::from_bits(&bits);
        let oracle = exhaustive_bit_llrs(&h1, &s, p);
        for schedule in &schedules {
            let mut engine = BpEngine::new(&graph, &s, &priors, &params);
            for _ in 0..sweeps {
                engine.sweep(schedule);
            }
            for (v, (&got, &want)) in engine.biases().iter().zip(&oracle).enumerate() {
                let err = (got - want).abs();
                worst = worst.max(err);
                assert!(
                    err <= tol,
                    "syndrome {mask:#b}, {:?} schedule, bit {v}: bias {got} vs exact {want}",
                    schedule.kind()
                );
            }
            checked += 1;
        }
    }
    verdict(
        2,
        "tree exactness",
        true,
        &format!(
            "{} syndromes x {} schedules = {checked} runs, worst |bias error| {worst:.2e} <= {tol:.0e}",
            1 << graph.n_checks(),
            schedules.len()
        ),
    );
}

/// 3: counted CN->VN messages == iterations_used x edge_count, exactly,
/// for every decoder kind on every trial. (`run_campaign` additionally
/// asserts this per trial, so every other criterion re-enforces it.)
#[test]
fn criterion_3_message_count_identity() {
    let mut checked = 0u64;
    for code_name in ["hgp:rep3", "hgp:hamming7"] {
        let code = builtin_code(code_name).unwrap();
        let graph = tanner_graph(&code);
        let edges = graph.edge_count() as u64;
        let model = NoiseModel::new(0.08).unwrap();
        let params = BpParams {
            max_iterations: 12,
            ..BpParams::default()
        };
        let gd = GdParams::default();
        for kind in DecoderKind::ALL {
            let schedule = Schedule::drawn(kind.schedule_kind(), &graph, 17);
            for trial in 0..50 {
                let mut rng = RngStream::new(2000, trial);
                let x = sample_error(&model, code.n(), &mut rng);
                let s = syndrome(&code, &x);
                let result = decode(kind, code.h1(), &graph, &s, &model, &params, &gd, &schedule);
                assert_eq!(
                    result.cn_to_vn_messages,
                    result.iterations_used * edges,
                    "{code_name} {kind:?} trial {trial}"
                );
                checked += 1;
            }
        }
        // Aggregated form: totals stay integer-exact through campaigns.
        for kind in DecoderKind::ALL {
            let stats = campaign(&code, &spec_with(kind, 12, 3), &[0.08], 400, 3);
            assert_eq!(stats[0].total_messages, stats[0].total_iterations * edges);
            checked += stats[0].trials;
        }
    }
    verdict(3, "message count identity", true, &format!("{checked} trials, zero deviation"));
}

// Reference mean-message counts for the [[882,24]] benchmark code,
// flooding/SCNS/SVNS at T=100.
const B1_MEAN_MESSAGES_P005: [f64; 3] = [64334.0, 12050.0, 12055.0];
const B1_MEAN_MESSAGES_P010: [f64; 3] = [252394.0, 244792.0, 244239.0];

/// 4: message-traffic reduction from sequential scheduling. With the
/// [[882,24]] matrices available, reproduce the reference means (15% at
/// p=0.05, 10% at p=0.10). Without them, the stated fallback property:
/// on hgp:rep5 at low p_x, SVNS and SCNS mean messages each at most 50%
/// of flooding's at matched T.
#[test]
fn criterion_4_message_traffic_reduction() {
    let kinds = [DecoderKind::Bp, DecoderKind::Scns, DecoderKind::Svns];
    if let Some(code) = b1_manifest() {
        let mut detail = String::new();
        let mut pass = true;
        for (p, expected, tol) in [(0.05, B1_MEAN_MESSAGES_P005, 0.15), (0.10, B1_MEAN_MESSAGES_P010, 0.10)] {
            for (kind, want) in kinds.iter().zip(expected) {
                let stats = campaign(&code, &spec_with(*kind, 100, 7), &[p], 10_000, 7);
                let got = stats[0].mean_messages;
                let ok = (got - want).abs() <= tol * want;
                pass &= ok;
                detail.push_str(&format!("{} p={p}: {got:.0} vs {want:.0} ({}); ", kind.label(), if ok { "ok" } else { "off" }));
            }
        }
        verdict(4, "message traffic reduction", pass, detail.trim_end());
        return;
    }

    // Fallback operating point: the envelope-best for this property on
    // hgp:rep5. Long iteration caps make non-convergence dominate the
    // mean, so the ratio approaches the stall-rate ratio between
    // schedules; p=0.01 minimizes that ratio.
    let code = builtin_code("hgp:rep5").unwrap();
    let (t, p, trials, seed) = (1000, 0.01, 20_000, 44);
    let mean = |kind| campaign(&code, &spec_with(kind, t, seed), &[p], trials, seed)[0].mean_messages;
    let flooding = mean(DecoderKind::Bp);
    let scns = mean(DecoderKind::Scns);
    let svns = mean(DecoderKind::Svns);
    let (scns_ratio, svns_ratio) = (scns / flooding, svns / flooding);
    verdict(
        4,
        "message traffic reduction",
        scns_ratio <= 0.5 && svns_ratio <= 0.5,
        &format!(
            "reference matrices unavailable; fallback on hgp:rep5 (T={t}, p={p}, N={trials}): \
             mean messages flooding {flooding:.0}, scns {scns:.0} (ratio {scns_ratio:.2}), \
             svns {svns:.0} (ratio {svns_ratio:.2}); required <= 0.50 each. \
             The non-convergence sets of the three schedules coincide almost exactly on \
             this 41-qubit code, so sequential scheduling cannot halve the traffic here \
             at any (p, T); the reduction mechanism needs the larger benchmark code."
        ),
    );
}

/// 5: at an operating point where flooding FER sits inside [1e-2, 1e-1],
/// SVNS achieves a lower FER with disjoint 95% intervals.
#[test]
fn criterion_5_fer_ordering() {
    let code = builtin_code("hgp:rep5").unwrap();
    let (t, p, trials, seed) = (100, 0.03, 50_000, 5);
    let flooding = campaign(&code, &spec_with(DecoderKind::Bp, t, seed), &[p], trials, seed);
    let svns = campaign(&code, &spec_with(DecoderKind::Svns, t, seed), &[p], trials, seed);
    let report = &compare_report(&svns, &flooding)[0];
    let in_window = flooding[0].fer >= 1e-2 && flooding[0].fer <= 1e-1;
    verdict(
        5,
        "fer ordering",
        in_window && svns[0].fer < flooding[0].fer && report.intervals_disjoint,
        &format!(
            "hgp:rep5 T={t} p={p} N={trials}: flooding fer {:.4} [{:.4},{:.4}], svns fer {:.4} [{:.4},{:.4}], \
             ratio {:.2}, intervals disjoint: {}",
            flooding[0].fer,
            flooding[0].fer_ci_low,
            flooding[0].fer_ci_high,
            svns[0].fer,
            svns[0].fer_ci_low,
            svns[0].fer_ci_high,
            report.fer_ratio,
            report.intervals_disjoint
        ),
    );
}

/// 6: guided decimation works less when the inner decoder is sequential.
/// With the [[882,24]] matrices, reproduce the reference decimation
/// means; unconditionally, SVNS-BPGD must average fewer decimations than
/// BPGD at every tested p where flooding FER >= 1e-2.
#[test]
fn criterion_6_decimation_reduction() {
    if let Some(code) = b1_manifest() {
        let bpgd = campaign(&code, &spec_with(DecoderKind::Bpgd, 100, 7), &[0.05], 10_000, 7);
        let svns_bpgd = campaign(&code, &spec_with(DecoderKind::SvnsBpgd, 100, 7), &[0.05], 10_000, 7);
        // Reference decimation means for the [[882,24]] code at p=0.05, T=100.
        let (want_bpgd, want_svns) = (1.4948, 0.0587);
        let ok_bpgd = (bpgd[0].mean_decimations - want_bpgd).abs() <= 0.25 * want_bpgd;
        let ok_svns = (svns_bpgd[0].mean_decimations - want_svns).abs() <= 0.50 * want_svns;
        verdict(
            6,
            "decimation reduction",
            ok_bpgd && ok_svns,
            &format!(
                "bpgd {:.4} vs {want_bpgd} (25%), svns-bpgd {:.4} vs {want_svns} (50%)",
                bpgd[0].mean_decimations, svns_bpgd[0].mean_decimations
            ),
        );
        return;
    }

    let code = builtin_code("hgp:rep5").unwrap();
    let grid = [0.02, 0.03, 0.04, 0.05];
    let (t, trials, seed) = (100, 4000, 6);
    let flooding = campaign(&code, &spec_with(DecoderKind::Bp, t, seed), &grid, trials, seed);
    let bpgd = campaign(&code, &spec_with(DecoderKind::Bpgd, t, seed), &grid, trials, seed);
    let svns_bpgd = campaign(&code, &spec_with(DecoderKind::SvnsBpgd, t, seed), &grid, trials, seed);
    let mut detail = String::from("reference matrices unavailable; hgp:rep5: ");
    let mut pass = true;
    for i in 0..grid.len() {
        let applicable = flooding[i].fer >= 1e-2;
        let ok = svns_bpgd[i].mean_decimations < bpgd[i].mean_decimations;
        pass &= !applicable || ok;
        detail.push_str(&format!(
            "p={}: flooding fer {:.3}, decimations {:.3} vs {:.3} ({}); ",
            grid[i],
            flooding[i].fer,
            svns_bpgd[i].mean_decimations,
            bpgd[i].mean_decimations,
            if !applicable { "out of scope" } else if ok { "ok" } else { "violated" }
        ));
    }
    // The comparison must actually have bite somewhere.
    pass &= flooding.iter().any(|s| s.fer >= 1e-2);
    verdict(6, "decimation reduction", pass, detail.trim_end());
}

/// 7: the rank-based degenerate/logical split agrees with brute-force
/// stabilizer enumeration for every zero-syndrome vector of weight <= 3.
#[test]
fn criterion_7_classification_oracle() {
    let code = builtin_code("hgp:rep3").unwrap();
    let n = code.n();
    let x_true = BitVector::zeros(n);

    // All 2^rank(g2) stabilizers, as a set.
    let g2 = code.g2();
    let mut stabilizers = std::collections::HashSet::new();
    for mask in 0u32..1 << g2.rows() {
        let mut s = BitVector::zeros(n);
        for r in 0..g2.rows() {
            if mask >> r & 1 == 1 {
                s ^= &g2.row(r);
            }
        }
        stabilizers.insert(s);
    }
    assert_eq!(stabilizers.len(), 64);

    let mut candidates: Vec<BitVector> = Vec::new();
    for a in 0..n {
        candidates.push(BitVector::from_support(n, &[a]));
        for b in a + 1..n {
            candidates.push(BitVector::from_support(n, &[a, b]));
            for c in b + 1..n {
                candidates.push(BitVector::from_support(n, &[a, b, c]));
            }
        }
    }

    let (mut zero_syndrome, mut degenerate, mut logical) = (0u32, 0u32, 0u32);
    for r in candidates {
        if !code.h1().mul_vec(&r).is_zero() {
            continue;
        }
        zero_syndrome += 1;
        let result = DecodeResult {
            x_hat: r.clone(),
            converged: true,
            iterations_used: 1,
            cn_to_vn_messages: 0,
            decimations: 0,
            osd_applied: false,
        };
        let got = classify(&code, &x_true, &result).unwrap();
        let want = if stabilizers.contains(&r) {
            degenerate += 1;
            Outcome::DegenerateRecovery
        } else {
            logical += 1;
            Outcome::LogicalError
        };
        assert_eq!(got, want, "residual {r:?}");
    }
    verdict(
        7,
        "classification oracle",
        zero_syndrome > 0 && degenerate > 0 && logical > 0,
        &format!("{zero_syndrome} zero-syndrome vectors of weight <= 3: {degenerate} stabilizers, {logical} logicals, all verdicts match"),
    );
}

/// 8: thread count never leaks into the statistics.
#[test]
fn criterion_8_thread_determinism() {
    let configs = [
        ("hgp:rep3", DecoderKind::SvnsBpgd, 0.08),
        ("hgp:hamming7", DecoderKind::BpOsd0, 0.06),
    ];
    for (name, kind, p) in configs {
        let code = builtin_code(name).unwrap();
        let mut spec = spec_with(kind, 15, 8);
        spec.reshuffle_per_trial = kind == DecoderKind::SvnsBpgd;
        let runs: Vec<Vec<TrialStats>> = [1usize, 4, 8]
            .iter()
            .map(|&threads| {
                run_campaign(
                    &code,
                    &spec,
                    &[p],
                    &CampaignOptions {
                        trials: 2000,
                        master_seed: 8,
                        threads,
                        max_failures: None,
                    },
                )
                .unwrap()
            })
            .collect();
        assert_eq!(runs[0], runs[1], "{name} threads 1 vs 4");
        assert_eq!(runs[0], runs[2], "{name} threads 1 vs 8");
    }
    verdict(8, "thread determinism", true, "threads 1/4/8 bitwise-equal TrialStats on both configs");
}

/// 9: OSD-0 always lands on the syndrome when one is reachable, and
/// post-processing never hurts the frame error rate at low p.
#[test]
fn criterion_9_osd_contract() {
    let code = builtin_code("hgp:rep5").unwrap();
    let graph = tanner_graph(&code);
    let model = NoiseModel::new(0.04).unwrap();
    let params = BpParams {
        max_iterations: 12,
        ..BpParams::default()
    };
    let schedule = Schedule::flooding();
    let mut osd_rescues = 0u32;
    for trial in 0..500 {
        let mut rng = RngStream::new(900, trial);
        let x = sample_error(&model, code.n(), &mut rng);
        let s = syndrome(&code, &x);
        let result = decode(
            DecoderKind::BpOsd0,
            code.h1(),
            &graph,
            &s,
            &model,
            &params,
            &GdParams::default(),
            &schedule,
        );
        assert!(result.converged, "real-error syndromes are always reachable");
        assert_eq!(code.h1().mul_vec(&result.x_hat), s, "trial {trial}");
        osd_rescues += u32::from(result.osd_applied);
    }
    assert!(osd_rescues > 0, "operating point must exercise the OSD path");

    let (t, p, trials, seed) = (100, 0.01, 20_000, 9);
    let flooding = campaign(&code, &spec_with(DecoderKind::Bp, t, seed), &[p], trials, seed);
    let osd = campaign(&code, &spec_with(DecoderKind::BpOsd0, t, seed), &[p], trials, seed);
    verdict(
        9,
        "osd contract",
        osd[0].failure == 0 && osd[0].fer <= flooding[0].fer,
        &format!(
            "500/500 post-processed syndromes satisfied ({osd_rescues} rescues); \
             hgp:rep5 p={p} N={trials}: fer {:.4} (osd) <= {:.4} (flooding)",
            osd[0].fer, flooding[0].fer
        ),
    );
}
