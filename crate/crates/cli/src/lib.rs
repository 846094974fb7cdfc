//! The `memecomm` command-line pipeline as a library, so integration tests
//! can drive stages directly.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod manifest;
pub mod pipeline;
pub mod reproduce;

use anyhow::Result;

use cli::{Cli, Command};
use config::RunConfig;

/// Load the config, apply flags and run the chosen command.
pub fn run(cli: &Cli) -> Result<()> {
    let mut cfg = match &cli.global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cli.apply(&mut cfg);
    if let Some(n) = cfg.threads {
        // a pool may already exist when called more than once in-process
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::debug!("thread pool already configured: {e}");
        }
    }
    let ctx = commands::Ctx::new(cfg)?;
    match &cli.command {
        Command::Ingest(_) => commands::ingest_cmd(&ctx),
        Command::Communities(_) => commands::communities_cmd(&ctx),
        Command::Simulate(_) => commands::simulate_cmd(&ctx),
        Command::Metrics(_) => commands::metrics_cmd(&ctx),
        Command::Features(_) => commands::features_cmd(&ctx),
        Command::Train(_) => commands::train_cmd(&ctx),
        Command::Eval(_) => commands::eval_cmd(&ctx),
        Command::Synth(_) => commands::synth_cmd(&ctx),
        Command::Reproduce => commands::reproduce_cmd(&ctx),
    }
}
