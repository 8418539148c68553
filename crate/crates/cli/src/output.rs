//! Result emission: CSV (one row per (decoder, p_x) cell) and JSON (same
//! fields plus the config echo).
//!
//! Rule for both formats: apart from the generation timestamp, identical
//! runs produce byte-identical files. Floats are written in Rust's default
//! shortest round-trip form, so re-parsing a JSON file reproduces every
//! numeric field exactly.

use crate::config::ConfigEcho;
use qldpc::eval::TrialStats;
use serde::Serialize;
use std::fmt::Write as _;

pub const CSV_HEADER: &str = "code,decoder,schedule_kind,order_seed,T,p_x,trials,exact,degenerate,\
                              logical,failure,fer,fer_ci_low,fer_ci_high,fer_nonconv_only,\
                              mean_messages,mean_decimations,mean_iterations,master_seed";

/// One output row: campaign statistics plus the identifying metadata.
#[derive(Debug, Serialize)]
pub struct CellRow {
    pub code: String,
    pub decoder: &'static str,
    pub schedule_kind: &'static str,
    pub order_seed: u64,
    #[serde(rename = "T")]
    pub t: u64,
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
    pub master_seed: u64,
}

impl CellRow {
    pub fn new(
        code: &str,
        decoder: &'static str,
        schedule_kind: &'static str,
        order_seed: u64,
        t: u64,
        master_seed: u64,
        stats: &TrialStats,
    ) -> Self {
        CellRow {
            code: code.to_string(),
            decoder,
            schedule_kind,
            order_seed,
            t,
            p_x: stats.p_x,
            trials: stats.trials,
            exact: stats.exact,
            degenerate: stats.degenerate,
            logical: stats.logical,
            failure: stats.failure,
            fer: stats.fer,
            fer_ci_low: stats.fer_ci_low,
            fer_ci_high: stats.fer_ci_high,
            fer_nonconv_only: stats.fer_nonconv_only,
            mean_messages: stats.mean_messages,
            mean_decimations: stats.mean_decimations,
            mean_iterations: stats.mean_iterations,
            master_seed,
        }
    }

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.code,
            self.decoder,
            self.schedule_kind,
            self.order_seed,
            self.t,
            self.p_x,
            self.trials,
            self.exact,
            self.degenerate,
            self.logical,
            self.failure,
            self.fer,
            self.fer_ci_low,
            self.fer_ci_high,
            self.fer_nonconv_only,
            self.mean_messages,
            self.mean_decimations,
            self.mean_iterations,
            self.master_seed
        )
    }
}

pub fn render_csv(rows: &[CellRow], echo: &ConfigEcho, timestamp: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# generated: {timestamp}");
    let _ = writeln!(
        out,
        "# config: {}",
        serde_json::to_string(echo).expect("config echo serializes")
    );
    let _ = writeln!(out, "{CSV_HEADER}");
    for row in rows {
        let _ = writeln!(out, "{}", row.csv_line());
    }
    out
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    generated: &'a str,
    config: &'a ConfigEcho,
    cells: &'a [CellRow],
}

pub fn render_json(rows: &[CellRow], echo: &ConfigEcho, timestamp: &str) -> String {
    let doc = JsonDocument {
        generated: timestamp,
        config: echo,
        cells: rows,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("results serialize");
    text.push('\n');
    text
}
