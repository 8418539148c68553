//! Flag and config-file merging into one resolved run description.
//!
//! Precedence per field: command-line flag, then config-file value, then
//! default. A `--decoder` flag replaces the file's decoder list outright;
//! otherwise each `[[decoder]]` entry fills unset fields from the file's
//! top level and the defaults.

use crate::Cli;
use qldpc::decoders::{BpParams, DecoderKind, GdParams};
use qldpc::eval::DecoderSpec;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown output format '{other}' (expected csv or json)")),
        }
    }
}

/// One decoder column, fully resolved.
#[derive(Debug, Clone)]
pub struct DecoderConfig {
    pub spec: DecoderSpec,
    pub iters: u64,
}

/// The complete resolved run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub code_source: String,
    pub decoders: Vec<DecoderConfig>,
    pub p_grid: Vec<f64>,
    pub trials: u64,
    pub master_seed: u64,
    pub threads: usize,
    pub max_failures: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    code: Option<String>,
    p: Option<Vec<f64>>,
    trials: Option<u64>,
    seed: Option<u64>,
    order_seed: Option<u64>,
    threads: Option<usize>,
    max_failures: Option<u64>,
    out: Option<PathBuf>,
    format: Option<String>,
    iters: Option<u64>,
    llr_clip: Option<f64>,
    atanh_guard: Option<f64>,
    clamp_llr: Option<f64>,
    max_decimations: Option<u64>,
    warm_start: Option<bool>,
    reshuffle_per_trial: Option<bool>,
    #[serde(default)]
    decoder: Vec<FileDecoder>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileDecoder {
    kind: String,
    iters: Option<u64>,
    order_seed: Option<u64>,
    llr_clip: Option<f64>,
    atanh_guard: Option<f64>,
    clamp_llr: Option<f64>,
    max_decimations: Option<u64>,
    warm_start: Option<bool>,
    reshuffle_per_trial: Option<bool>,
}

/// Environment variable consulted for the default worker count.
pub const THREADS_ENV: &str = "QLDPC_THREADS";

pub fn resolve(cli: &Cli) -> Result<RunConfig, String> {
    let file = match &cli.config {
        Some(path) => load_file(path)?,
        None => FileConfig::default(),
    };

    let code_source = cli
        .code
        .clone()
        .or(file.code)
        .ok_or("no code given: pass --code or set `code` in the config file")?;

    let trials = cli
        .trials
        .or(file.trials)
        .ok_or("missing --trials (or `trials` in the config file)")?;
    if trials == 0 {
        return Err("--trials must be at least 1".into());
    }

    let p_grid = cli.p.clone().or(file.p).unwrap_or_default();
    for &p in &p_grid {
        if !(0.0..0.5).contains(&p) {
            return Err(format!("p_x = {p} out of range: need 0 <= p < 0.5"));
        }
    }

    let master_seed = cli.seed.or(file.seed).unwrap_or(0);
    let threads = match cli.threads.or(file.threads) {
        Some(t) => t,
        None => threads_from_env()?,
    };
    let max_failures = cli.max_failures.or(file.max_failures);
    let out = cli.out.clone().or(file.out);
    let format = match cli.format.as_deref().or(file.format.as_deref()) {
        Some(s) => OutputFormat::parse(s)?,
        None => match &out {
            Some(p) if p.extension().is_some_and(|e| e == "json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        },
    };

    // Per-decoder parameter fallback chain: flag, then decoder entry, then
    // config top level, then the library default.
    let defaults = (BpParams::default(), GdParams::default());
    let resolve_decoder = |kind_str: &str, entry: Option<&FileDecoder>| -> Result<DecoderConfig, String> {
        let kind = DecoderKind::parse(kind_str)
            .ok_or_else(|| format!("unknown decoder kind '{kind_str}' (expected one of {})", kind_list()))?;
        let pick_u64 = |flag: Option<u64>, field: fn(&FileDecoder) -> Option<u64>, top: Option<u64>| {
            flag.or(entry.and_then(field)).or(top)
        };
        let pick_f64 = |flag: Option<f64>, field: fn(&FileDecoder) -> Option<f64>, top: Option<f64>| {
            flag.or(entry.and_then(field)).or(top)
        };
        let iters = pick_u64(cli.iters, |d| d.iters, file.iters).unwrap_or(defaults.0.max_iterations);
        if iters == 0 {
            return Err("--iters must be at least 1".into());
        }
        let llr_clip = pick_f64(cli.llr_clip, |d| d.llr_clip, file.llr_clip).unwrap_or(defaults.0.llr_clip);
        if !(llr_clip > 0.0 && llr_clip.is_finite()) {
            return Err(format!("llr_clip = {llr_clip} must be positive and finite"));
        }
        let atanh_guard =
            pick_f64(cli.atanh_guard, |d| d.atanh_guard, file.atanh_guard).unwrap_or(defaults.0.atanh_guard);
        if !(atanh_guard > 0.0 && atanh_guard < 1.0) {
            return Err(format!("atanh_guard = {atanh_guard} must lie in (0,1)"));
        }
        let clamp_llr = pick_f64(cli.clamp_llr, |d| d.clamp_llr, file.clamp_llr).unwrap_or(defaults.1.clamp_llr);
        if !(clamp_llr > 0.0 && clamp_llr.is_finite()) {
            return Err(format!("clamp_llr = {clamp_llr} must be positive and finite"));
        }
        let max_decimations = pick_u64(cli.max_decimations, |d| d.max_decimations, file.max_decimations);
        let warm_start = cli
            .warm_start
            .then_some(true)
            .or(entry.and_then(|d| d.warm_start))
            .or(file.warm_start)
            .unwrap_or(defaults.1.warm_start);
        let reshuffle = cli
            .reshuffle_per_trial
            .then_some(true)
            .or(entry.and_then(|d| d.reshuffle_per_trial))
            .or(file.reshuffle_per_trial)
            .unwrap_or(false);
        let order_seed = pick_u64(cli.order_seed, |d| d.order_seed, file.order_seed).unwrap_or(master_seed);

        let mut spec = DecoderSpec::new(
            kind,
            BpParams {
                max_iterations: iters,
                llr_clip,
                atanh_guard,
            },
            GdParams {
                clamp_llr,
                max_decimations,
                warm_start,
            },
            order_seed,
        );
        spec.reshuffle_per_trial = reshuffle;
        Ok(DecoderConfig { spec, iters })
    };

    let decoders = match &cli.decoders {
        Some(kinds) => kinds
            .iter()
            .map(|k| resolve_decoder(k, None))
            .collect::<Result<Vec<_>, _>>()?,
        None => file
            .decoder
            .iter()
            .map(|d| resolve_decoder(&d.kind, Some(d)))
            .collect::<Result<Vec<_>, _>>()?,
    };
    if decoders.is_empty() {
        return Err("no decoder given: pass --decoder or add a [[decoder]] block to the config file".into());
    }

    Ok(RunConfig {
        code_source,
        decoders,
        p_grid,
        trials,
        master_seed,
        threads,
        max_failures,
        out,
        format,
    })
}

fn load_file(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("bad config file {}: {e}", path.display()))
}

fn threads_from_env() -> Result<usize, String> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("{THREADS_ENV}={v} is not a thread count")),
        Err(_) => Ok(0),
    }
}

fn kind_list() -> String {
    DecoderKind::ALL
        .iter()
        .map(|k| k.label())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Deterministic echo of the resolved run, embedded in every output file
/// so a result can be reproduced without the original command line.
#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub code: String,
    pub p: Vec<f64>,
    pub trials: u64,
    pub master_seed: u64,
    pub threads: usize,
    pub max_failures: Option<u64>,
    pub decoders: Vec<DecoderEcho>,
}

#[derive(Debug, Serialize)]
pub struct DecoderEcho {
    pub kind: String,
    pub schedule_kind: String,
    pub iters: u64,
    pub order_seed: u64,
    pub llr_clip: f64,
    pub atanh_guard: f64,
    pub clamp_llr: f64,
    pub max_decimations: Option<u64>,
    pub warm_start: bool,
    pub reshuffle_per_trial: bool,
}

impl ConfigEcho {
    pub fn from_run(run: &RunConfig) -> Self {
        ConfigEcho {
            code: run.code_source.clone(),
            p: run.p_grid.clone(),
            trials: run.trials,
            master_seed: run.master_seed,
            threads: run.threads,
            max_failures: run.max_failures,
            decoders: run
                .decoders
                .iter()
                .map(|d| DecoderEcho {
                    kind: d.spec.kind.label().to_string(),
                    schedule_kind: d.spec.kind.schedule_kind().label().to_string(),
                    iters: d.iters,
                    order_seed: d.spec.order_seed,
                    llr_clip: d.spec.bp.llr_clip,
                    atanh_guard: d.spec.bp.atanh_guard,
                    clamp_llr: d.spec.gd.clamp_llr,
                    max_decimations: d.spec.gd.max_decimations,
                    warm_start: d.spec.gd.warm_start,
                    reshuffle_per_trial: d.spec.reshuffle_per_trial,
                })
                .collect(),
        }
    }
}
