//! Shard-parallel execution of atom searches and lemma trials on a rayon pool.

use std::path::PathBuf;

use prodone_core::enumeration::{make_shards, merge_states, Search, SearchMode, SearchOutcome, ShardState, Stratum};
use prodone_core::oracles::{run_trial, LemmaId, LemmaReport};
use prodone_core::GroupCtx;
use rayon::prelude::*;

use crate::checkpoint;
use crate::error::{Error, Result};

/// `PRODONE_THREADS` if set, otherwise the available parallelism.
pub fn thread_count() -> usize {
    std::env::var("PRODONE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub shards: u32,
    /// Process only this shard of the plan.
    pub shard_index: Option<u32>,
    pub threads: usize,
    /// One file per shard inside this directory.
    pub checkpoint_dir: Option<PathBuf>,
    /// A single checkpoint file; only valid when exactly one shard runs.
    pub checkpoint_file: Option<PathBuf>,
    /// Ranks between checkpoint writes.
    pub checkpoint_every: u64,
    /// Stop each shard after this many ranks in this invocation.
    pub stop_after: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            shards: 1,
            shard_index: None,
            threads: thread_count(),
            checkpoint_dir: None,
            checkpoint_file: None,
            checkpoint_every: 1 << 20,
            stop_after: None,
        }
    }
}

pub struct StratumRun {
    pub outcome: SearchOutcome,
    pub states: Vec<ShardState>,
    pub complete: bool,
}

fn run_shard(ctx: &GroupCtx, search: &Search<'_>, opts: &RunOptions, mut state: ShardState) -> Result<ShardState> {
    let stratum = *search.stratum();
    let mode = search.mode();
    let path = checkpoint_path(opts, &stratum, mode, state.shard.index);
    let mut remaining = opts.stop_after.unwrap_or(u64::MAX);
    while !state.done() && remaining > 0 {
        let step = opts.checkpoint_every.max(1).min(remaining);
        let before = state.next_rank;
        search.run(&mut state, Some(step));
        remaining -= state.next_rank - before;
        if let Some(path) = &path {
            checkpoint::save(path, ctx, &stratum, mode, opts.shards, &state)?;
        }
    }
    if let Some(path) = &path {
        if state.done() && !path.exists() {
            checkpoint::save(path, ctx, &stratum, mode, opts.shards, &state)?;
        }
    }
    Ok(state)
}

fn checkpoint_path(opts: &RunOptions, stratum: &Stratum, mode: SearchMode, index: u32) -> Option<PathBuf> {
    match (&opts.checkpoint_file, &opts.checkpoint_dir) {
        (Some(file), _) => Some(file.clone()),
        (None, Some(dir)) => Some(checkpoint::shard_file(dir, stratum, mode, opts.shards, index)),
        (None, None) => None,
    }
}

/// Runs the shards of one stratum (all of them, or the selected one) in parallel.
pub fn run_stratum(ctx: &GroupCtx, stratum: Stratum, mode: SearchMode, opts: &RunOptions) -> Result<StratumRun> {
    let search = Search::new(ctx, stratum, mode)?;
    let mut shards = make_shards(search.layout().total(), opts.shards);
    if let Some(i) = opts.shard_index {
        if i >= opts.shards {
            return Err(Error::Usage(format!(
                "shard index {i} out of range for {} shards",
                opts.shards
            )));
        }
        shards.retain(|s| s.index == i);
    }
    if opts.checkpoint_file.is_some() && shards.len() != 1 {
        return Err(Error::Usage(
            "a checkpoint file needs a single shard; use --shard-index or a directory".into(),
        ));
    }
    let initial: Vec<ShardState> = shards
        .iter()
        .map(|&shard| match checkpoint_path(opts, &stratum, mode, shard.index) {
            Some(path) => checkpoint::load_or_fresh(&path, ctx, &stratum, mode, opts.shards, shard),
            None => Ok(ShardState::fresh(shard)),
        })
        .collect::<Result<_>>()?;
    let states: Vec<ShardState> = pool(opts.threads)?.install(|| {
        initial
            .into_par_iter()
            .map(|state| run_shard(ctx, &search, opts, state))
            .collect::<Result<Vec<_>>>()
    })?;
    let complete = states.iter().all(ShardState::done);
    Ok(StratumRun {
        outcome: merge_states(&search, &states),
        states,
        complete,
    })
}

/// Randomized lemma trials spread over the pool; the report equals the sequential one.
pub fn run_lemma(ctx: &GroupCtx, lemma: LemmaId, trials: u64, seed: u64, threads: usize) -> Result<LemmaReport> {
    let outcomes = pool(threads)?.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| run_trial(ctx, lemma, seed, t))
            .collect::<std::result::Result<Vec<_>, _>>()
    })?;
    Ok(LemmaReport::from_outcomes(lemma, seed, outcomes))
}
