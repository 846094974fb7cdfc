//! Stage helpers shared by the subcommands and `reproduce`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use anyhow::{Context, Result};
use rayon::prelude::*;

use memecomm::cascade::{read_traces, run_ensemble, CascadeParams, EnsembleConfig, EnsembleSummary, M1Mode, MemeTrace, Model};
use memecomm::community::{read_partition, Partition};
use memecomm::graph::io::{read_edge_list, read_interactions};
use memecomm::graph::{BuildMode, InteractionLog, SocialNetwork};
use memecomm::metrics::{binned_curve, early_stage, relative_report, write_binned_csv, ConcentrationReport, M1Baseline};
use memecomm::rng::derive_seed;

use crate::manifest::OutDir;

pub fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

/// An undirected network file as written by `ingest` or `synth`.
pub fn load_network(path: &Path) -> Result<SocialNetwork> {
    let (net, _) = read_edge_list(open(path)?, BuildMode::AsIs).with_context(|| format!("network {}", path.display()))?;
    Ok(net)
}

pub fn load_partition(path: &Path, net: &SocialNetwork) -> Result<Partition> {
    let part = read_partition(open(path)?, net.ids()).with_context(|| format!("partition {}", path.display()))?;
    part.check_covers(net.n())?;
    Ok(part)
}

pub fn load_traces(path: &Path, net: &SocialNetwork) -> Result<Vec<MemeTrace>> {
    read_traces(open(path)?, net.ids()).with_context(|| format!("traces {}", path.display()))
}

pub fn load_log(path: &Path, net: &SocialNetwork) -> Result<InteractionLog> {
    let raw = read_interactions(open(path)?).with_context(|| format!("interactions {}", path.display()))?;
    Ok(InteractionLog::from_raw(&raw, net.ids())?)
}

/// Label that keeps users-mode baseline seeds apart from tweets-mode ones.
const USERS_BASELINE: u64 = 1 << 32;

/// Relative concentration reports for every trace. M1 reference ensembles
/// are built once per distinct early-stage tweet count (tweets mode) and
/// once per distinct adopter count (users mode); the ensemble for target
/// `x` is seeded from `params.seed` and `x` only, so a meme's baseline does
/// not depend on which other memes are in the batch.
pub fn concentration_reports(
    traces: &[MemeTrace],
    net: &SocialNetwork,
    part: &Partition,
    early_n: usize,
    params: &CascadeParams,
    ensemble: &EnsembleConfig,
) -> Result<Vec<ConcentrationReport>> {
    let windows: Vec<MemeTrace> = traces.iter().map(|t| early_stage(t, early_n)).collect();
    let tweet_targets: BTreeSet<usize> = windows.iter().map(MemeTrace::len).collect();
    let user_targets: BTreeSet<usize> = windows.iter().map(|w| w.adopters().len()).collect();
    let run = |mode: M1Mode, target: usize, label: u64| -> Result<EnsembleSummary> {
        let p = CascadeParams {
            target_tweets: target,
            seed: derive_seed(params.seed, label),
            ..params.clone()
        };
        let ens = run_ensemble(net, Some(part), Model::M1(mode), &p, ensemble)
            .with_context(|| format!("M1 {mode:?} baseline for {target}"))?;
        Ok(ens.summary)
    };
    let mut usage = BTreeMap::new();
    for &t in &tweet_targets {
        usage.insert(t, run(M1Mode::Tweets, t, t as u64)?);
    }
    let mut adoption = BTreeMap::new();
    for &u in &user_targets {
        adoption.insert(u, run(M1Mode::Users, u, USERS_BASELINE | u as u64)?);
    }
    log::info!(
        "built {} tweets-mode and {} users-mode baselines",
        usage.len(),
        adoption.len()
    );
    traces
        .par_iter()
        .zip(&windows)
        .map(|(t, w)| {
            let baseline = M1Baseline {
                usage: usage[&w.len()].clone(),
                adoption: adoption[&w.adopters().len()].clone(),
            };
            Ok(relative_report(t, net, part, &baseline, early_n)?)
        })
        .collect()
}

/// Metric columns plotted against popularity.
pub fn curve_values(rep: &ConcentrationReport) -> [(&'static str, Option<f64>); 12] {
    let r = &rep.raw;
    [
        ("r", Some(r.r)),
        ("g", Some(r.g)),
        ("Ht", Some(r.ht)),
        ("Hu", Some(r.hu)),
        ("Nt", Some(r.nt)),
        ("Nu", Some(r.nu)),
        ("r_rel", rep.r_rel),
        ("g_rel", rep.g_rel),
        ("Ht_rel", rep.ht_rel),
        ("Hu_rel", rep.hu_rel),
        ("Nt_rel", rep.nt_rel),
        ("Nu_rel", rep.nu_rel),
    ]
}

/// One binned curve per metric under `dir/`, with popularity measured as
/// total tweets of the meme.
pub fn write_curves(out: &mut OutDir, dir: &str, reports: &[ConcentrationReport], traces: &[MemeTrace]) -> Result<()> {
    let names: Vec<&str> = reports.first().map(|r| curve_values(r).map(|(n, _)| n).to_vec()).unwrap_or_default();
    for (i, name) in names.iter().enumerate() {
        let points: Vec<(f64, f64)> = reports
            .iter()
            .zip(traces)
            .filter_map(|(rep, t)| curve_values(rep)[i].1.map(|v| (t.len() as f64, v)))
            .collect();
        let rows = binned_curve(&points);
        out.write(&format!("{dir}/{name}.csv"), |w| Ok(write_binned_csv(&rows, w)?))?;
    }
    Ok(())
}

/// A header line plus comma-joined rows; fields must not need quoting.
pub fn write_csv_rows<W: Write>(mut w: W, header: &str, rows: &[Vec<String>]) -> Result<()> {
    writeln!(w, "{header}")?;
    for r in rows {
        writeln!(w, "{}", r.join(","))?;
    }
    Ok(())
}
