//! Checkpoint files: one `checkpoint` certificate per shard, rewritten in place.

use std::path::{Path, PathBuf};

use prodone_core::enumeration::{SearchMode, Shard, ShardState, Stratum};
use prodone_core::GroupCtx;

use crate::cert::{Certificate, Kind};
use crate::error::{Error, Result};
use crate::payload::{checkpoint_certificate, checkpoint_from, mode_str};

/// File name for a shard of a plan inside a checkpoint directory.
pub fn shard_file(dir: &Path, stratum: &Stratum, mode: SearchMode, shards: u32, index: u32) -> PathBuf {
    let k = stratum.k.map_or_else(|| "any".to_string(), |k| k.to_string());
    dir.join(format!(
        "len{}-k{}-{}-shard{}of{}.json",
        stratum.length,
        k,
        mode_str(mode),
        index,
        shards
    ))
}

pub fn save(
    path: &Path,
    ctx: &GroupCtx,
    stratum: &Stratum,
    mode: SearchMode,
    shards: u32,
    state: &ShardState,
) -> Result<()> {
    checkpoint_certificate(ctx, stratum, mode, shards, state).write(path)
}

/// Loads a checkpoint and confirms it belongs to the same plan and shard.
pub fn load(
    path: &Path,
    ctx: &GroupCtx,
    stratum: &Stratum,
    mode: SearchMode,
    shards: u32,
    shard: Shard,
) -> Result<ShardState> {
    let cert = Certificate::read(path)?;
    if cert.kind != Kind::Checkpoint || !cert.digest_ok() {
        return Err(Error::format(format!("{} is not an intact checkpoint", path.display())));
    }
    if cert.group != ctx.params() {
        return Err(Error::format("checkpoint belongs to another group"));
    }
    let data = checkpoint_from(ctx, &cert.payload)?;
    if data.stratum != *stratum || data.mode != mode || data.shards != shards || data.state.shard != shard {
        return Err(Error::format("checkpoint belongs to a different plan"));
    }
    if data.state.recomputed_digest() != data.state.digest || !data.state.counters.reconciles() {
        return Err(Error::format("checkpoint counters or digest are inconsistent"));
    }
    Ok(data.state)
}

/// Loads when the file exists, otherwise starts fresh.
pub fn load_or_fresh(
    path: &Path,
    ctx: &GroupCtx,
    stratum: &Stratum,
    mode: SearchMode,
    shards: u32,
    shard: Shard,
) -> Result<ShardState> {
    if path.exists() {
        load(path, ctx, stratum, mode, shards, shard)
    } else {
        Ok(ShardState::fresh(shard))
    }
}
