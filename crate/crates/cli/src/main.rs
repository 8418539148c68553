//! qldpc-sim: Monte Carlo frame-error-rate campaigns for CSS codes.
//!
//! Typical invocation:
//!
//! ```text
//! qldpc-sim --code hgp:rep3 --decoder svns --p 0.05 --iters 100 \
//!           --trials 1000 --seed 7 --out run.csv
//! ```
//!
//! Exit codes: 0 success, 2 configuration/usage error, 1 runtime failure.

mod config;
mod output;

use clap::Parser;
use config::{ConfigEcho, OutputFormat, RunConfig};
use output::CellRow;
use qldpc::code::{
    builtin_code, hypergraph_product, load_alist, load_manifest, repetition_check_matrix, tanner_graph, CssCode,
};
use qldpc::eval::{run_campaign, CampaignOptions};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "qldpc-sim",
    version,
    about = "Syndrome-domain BP decoder benchmarks for CSS codes",
    after_help = "Config precedence: flags override --config file values; unset fields fall back \
                  to defaults. QLDPC_THREADS sets the default worker count."
)]
pub struct Cli {
    /// TOML run description carrying the same fields as the flags.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Code to decode: hgp:rep3 | hgp:rep<n> | hgp:hamming7 |
    /// hgp:<seed_a.alist>,<seed_b.alist> | path to a manifest TOML.
    #[arg(long, value_name = "SPEC")]
    code: Option<String>,

    /// Decoder kind(s): bp, scns, svns, bpgd, scns-bpgd, svns-bpgd, bp-osd0.
    /// Repeat or comma-separate for several columns.
    #[arg(long = "decoder", value_name = "KIND", value_delimiter = ',')]
    decoders: Option<Vec<String>>,

    /// Physical X-error probabilities (repeat or comma-separate).
    #[arg(long = "p", value_name = "PROB", value_delimiter = ',', allow_negative_numbers = true)]
    p: Option<Vec<f64>>,

    /// Iteration cap T for each BP run.
    #[arg(long, value_name = "N")]
    iters: Option<u64>,

    /// Trials per (decoder, p_x) cell.
    #[arg(long, value_name = "N")]
    trials: Option<u64>,

    /// Master seed; trial t draws from RNG stream t.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,

    /// Seed for the SCNS/SVNS node-order draw (default: master seed).
    #[arg(long, value_name = "SEED")]
    order_seed: Option<u64>,

    /// Worker threads (0 = rayon default). Overrides QLDPC_THREADS.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,

    /// Stop a cell early once this many frame errors accumulate
    /// (checked at fixed 1024-trial boundaries; consumed trials are recorded).
    #[arg(long, value_name = "N")]
    max_failures: Option<u64>,

    /// Output path (default: stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format: csv or json (default: csv, or json for a .json --out path).
    #[arg(long, value_name = "FMT")]
    format: Option<String>,

    /// Message and bias clipping bound.
    #[arg(long, value_name = "LLR")]
    llr_clip: Option<f64>,

    /// Distance from +/-1 at which tanh products are clamped before atanh.
    #[arg(long, value_name = "EPS")]
    atanh_guard: Option<f64>,

    /// Magnitude of the decimation clamp applied to frozen priors.
    #[arg(long, value_name = "LLR")]
    clamp_llr: Option<f64>,

    /// Cap on decimation rounds (default: one per variable).
    #[arg(long, value_name = "N")]
    max_decimations: Option<u64>,

    /// Keep messages across decimation rounds instead of reinitializing.
    #[arg(long)]
    warm_start: bool,

    /// Redraw the SCNS/SVNS node order per trial (stream-addressed, still
    /// deterministic).
    #[arg(long)]
    reshuffle_per_trial: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match config::resolve(&cli) {
        Ok(run) => run,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let code = match resolve_code(&run.code_source) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match execute(&run, &code) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn resolve_code(source: &str) -> Result<CssCode, String> {
    if let Some(code) = builtin_code(source) {
        return Ok(code);
    }
    if let Some(rest) = source.strip_prefix("hgp:") {
        if let Some(n) = rest.strip_prefix("rep").and_then(|s| s.parse::<usize>().ok()) {
            if n < 2 {
                return Err(format!("hgp:rep{n}: repetition seed needs length >= 2"));
            }
            let seed = repetition_check_matrix(n);
            return hypergraph_product(&seed, &seed)
                .map(|c| c.with_name(source).with_claimed_distance(Some(n)))
                .map_err(|e| format!("cannot build {source}: {e}"));
        }
        if let Some((a, b)) = rest.split_once(',') {
            let ha = load_alist(Path::new(a)).map_err(|e| e.to_string())?;
            let hb = load_alist(Path::new(b)).map_err(|e| e.to_string())?;
            return hypergraph_product(&ha, &hb).map_err(|e| format!("cannot build {source}: {e}"));
        }
        return Err(format!(
            "unknown builtin code '{source}' (try hgp:rep3, hgp:rep5, hgp:hamming7, or hgp:<a.alist>,<b.alist>)"
        ));
    }
    load_manifest(Path::new(source)).map_err(|e| e.to_string())
}

fn execute(run: &RunConfig, code: &CssCode) -> Result<(), String> {
    let graph = tanner_graph(code);
    let isolated = graph.isolated_vars();
    if !isolated.is_empty() {
        eprintln!(
            "warning: {} variable(s) touch no check (first: {}); BP leaves them at the channel prior",
            isolated.len(),
            isolated[0]
        );
    }
    eprintln!(
        "code {}: n={} k={} checks={} edges={}",
        code.name(),
        code.n(),
        code.k(),
        graph.n_checks(),
        graph.edge_count()
    );

    let echo = ConfigEcho::from_run(run);
    let total_cells = run.decoders.len() * run.p_grid.len();
    let mut rows = Vec::with_capacity(total_cells);
    let mut done = 0;
    for dec in &run.decoders {
        for &p_x in &run.p_grid {
            let opts = CampaignOptions {
                trials: run.trials,
                master_seed: run.master_seed,
                threads: run.threads,
                max_failures: run.max_failures,
            };
            let stats = run_campaign(code, &dec.spec, &[p_x], &opts).map_err(|e| e.to_string())?;
            let stats = &stats[0];
            done += 1;
            eprintln!(
                "[{done}/{total_cells}] {} p={p_x}: fer={:.3e} ({}/{} frames) mean_msgs={:.1} mean_decim={:.3}",
                dec.spec.kind.label(),
                stats.fer,
                stats.frame_errors(),
                stats.trials,
                stats.mean_messages,
                stats.mean_decimations,
            );
            rows.push(CellRow::new(
                code.name(),
                dec.spec.kind.label(),
                dec.spec.kind.schedule_kind().label(),
                dec.spec.order_seed,
                dec.iters,
                run.master_seed,
                stats,
            ));
        }
    }

    let timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    let text = match run.format {
        OutputFormat::Csv => output::render_csv(&rows, &echo, &timestamp),
        OutputFormat::Json => output::render_json(&rows, &echo, &timestamp),
    };
    match &run.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            eprintln!("wrote {} cell(s) to {}", rows.len(), path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}
