// SPDX-License-Identifier: Apache-2.0

//! Config-driven front end: parse a JSON experiment, run one task, write
//! CSV tables with JSON schema sidecars.

pub mod build;
pub mod config;
pub mod error;
pub mod output;
pub mod tasks;

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use config::{parse_document, TaskKind};
use error::{CliError, CliResult};
use tasks::{Context, TaskOutput};

/// Environment variable overriding the output directory (below `--output`).
pub const OUTPUT_ENV: &str = "BOSENT_OUTPUT_DIR";

/// `--config` value selecting the bundled configuration of each task.
pub const BUNDLED: &str = "paper-examples";

pub fn bundled_config(kind: TaskKind) -> &'static str {
    match kind {
        TaskKind::Evolve => include_str!("../configs/paper-examples/evolve.json"),
        TaskKind::Verify => include_str!("../configs/paper-examples/verify.json"),
        TaskKind::Threshold => include_str!("../configs/paper-examples/threshold.json"),
        TaskKind::LargeN => include_str!("../configs/paper-examples/large-n.json"),
        TaskKind::Stationary => include_str!("../configs/paper-examples/stationary.json"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub kind: TaskKind,
    /// Path of the config document, or [`BUNDLED`].
    pub config: String,
    pub output: Option<PathBuf>,
    /// Value of [`OUTPUT_ENV`], if set.
    pub env_output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub oracle: bool,
}

#[derive(Debug, Default)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub violations: Vec<String>,
}

pub fn load_config(config: &str, kind: TaskKind) -> CliResult<String> {
    if config == BUNDLED {
        return Ok(bundled_config(kind).to_string());
    }
    fs::read_to_string(config).map_err(|e| CliError::config("", format!("cannot read {config}: {e}")))
}

/// Runs every experiment of the document under `opts.kind`. Invariant
/// violations are collected in the report after all tables are written.
pub fn run(opts: &RunOptions) -> CliResult<RunReport> {
    let text = load_config(&opts.config, opts.kind)?;
    let docs = parse_document(&text)?;
    let mut stems = BTreeSet::new();
    for doc in &docs {
        doc.config.validate(opts.kind, &doc.pointer)?;
        if !stems.insert(doc.config.file_stem(opts.kind)) {
            return Err(CliError::config(
                format!("{}/name", doc.pointer),
                "experiments in one document need distinct names",
            ));
        }
    }
    let mut report = RunReport::default();
    for doc in &docs {
        let cfg = &doc.config;
        let seed = opts.seed.or(cfg.seed).unwrap_or(0);
        let ctx = Context {
            seed,
            oracle: opts.oracle,
        };
        let dir = opts
            .output
            .clone()
            .or_else(|| opts.env_output.clone())
            .or_else(|| cfg.output.as_ref().and_then(|o| o.path.as_ref()).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        let out: TaskOutput = match opts.kind {
            TaskKind::Evolve => tasks::evolve::run(ctx, cfg, &doc.pointer)?,
            TaskKind::Verify => tasks::verify::run(ctx, cfg, &doc.pointer)?,
            TaskKind::Threshold => tasks::threshold::run(ctx, cfg, &doc.pointer)?,
            TaskKind::LargeN => tasks::largen::run(ctx, cfg, &doc.pointer)?,
            TaskKind::Stationary => tasks::stationary::run(ctx, cfg, &doc.pointer)?,
        };
        for table in &out.tables {
            report.files.extend(output::write_table(&dir, table, opts.kind.as_str(), seed)?);
        }
        let label = cfg.file_stem(opts.kind);
        report.violations.extend(out.violations.into_iter().map(|v| format!("{label}: {v}")));
    }
    Ok(report)
}
