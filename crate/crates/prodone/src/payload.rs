//! Payload layouts for each certificate kind, both directions.

use std::collections::BTreeMap;

use prodone_core::digest::FindingsDigest;
use prodone_core::engine::AtomVerdict;
use prodone_core::enumeration::{Counters, SearchMode, SearchOutcome, Shard, ShardState, Stratum};
use prodone_core::invariants::{
    Bound, ElasticityTable, ElasticityWitness, InverseReport, InverseScope, SmallDavenport, StratumLine,
};
use prodone_core::oracles::{Counterexample, LemmaReport};
use prodone_core::{GroupCtx, Sequence};
use serde_json::{json, Map, Value};

use crate::cert::{Certificate, Kind};
use crate::error::{Error, Result};

pub fn seq_text(ctx: &GroupCtx, s: &Sequence) -> Value {
    json!(s.format(ctx))
}

fn seq_list(ctx: &GroupCtx, list: &[Sequence]) -> Value {
    Value::Array(list.iter().map(|s| seq_text(ctx, s)).collect())
}

pub fn field<'v>(v: &'v Value, name: &str) -> Result<&'v Value> {
    v.get(name)
        .ok_or_else(|| Error::format(format!("payload lacks {name:?}")))
}

pub fn get_u64(v: &Value, name: &str) -> Result<u64> {
    field(v, name)?
        .as_u64()
        .ok_or_else(|| Error::format(format!("{name:?} is not a non-negative integer")))
}

pub fn get_bool(v: &Value, name: &str) -> Result<bool> {
    field(v, name)?
        .as_bool()
        .ok_or_else(|| Error::format(format!("{name:?} is not a boolean")))
}

pub fn get_str<'v>(v: &'v Value, name: &str) -> Result<&'v str> {
    field(v, name)?
        .as_str()
        .ok_or_else(|| Error::format(format!("{name:?} is not a string")))
}

pub fn get_array<'v>(v: &'v Value, name: &str) -> Result<&'v Vec<Value>> {
    field(v, name)?
        .as_array()
        .ok_or_else(|| Error::format(format!("{name:?} is not an array")))
}

pub fn parse_seq(ctx: &GroupCtx, v: &Value) -> Result<Sequence> {
    let text = v.as_str().ok_or_else(|| Error::format("sequence is not a string"))?;
    Ok(Sequence::parse(ctx, text)?)
}

pub fn get_seq(ctx: &GroupCtx, v: &Value, name: &str) -> Result<Sequence> {
    parse_seq(ctx, field(v, name)?)
}

pub fn get_seq_list(ctx: &GroupCtx, v: &Value, name: &str) -> Result<Vec<Sequence>> {
    get_array(v, name)?.iter().map(|s| parse_seq(ctx, s)).collect()
}

pub fn atom_certificate(ctx: &GroupCtx, seq: &Sequence, verdict: &AtomVerdict) -> Certificate {
    let kind = if verdict.atom { Kind::Atom } else { Kind::NonAtom };
    let witness = match &verdict.witness {
        Some((t1, t2)) => json!([t1.format(ctx), t2.format(ctx)]),
        None => Value::Null,
    };
    let mut payload = json!({
        "sequence": seq.format(ctx),
        "length": seq.len(),
        "product_one": verdict.product_one,
        "atom": verdict.atom,
    });
    if !verdict.atom {
        payload["witness"] = witness;
    }
    Certificate::new(kind, ctx.params(), None, payload)
}

pub fn davenport_certificate(ctx: &GroupCtx, d: &SmallDavenport) -> Certificate {
    let formula = (ctx.p() + ctx.q() - 2) as usize;
    Certificate::new(
        Kind::DavenportSmall,
        ctx.params(),
        None,
        json!({
            "value": d.value,
            "expected": formula,
            "extremal": d.extremal.format(ctx),
            "by_length": d.by_length,
            "nodes": d.nodes(),
            "refuted_length": d.value + 1,
            "up_to_aut": d.up_to_aut,
        }),
    )
}

fn stratum_value(s: &Stratum) -> Value {
    json!({
        "length": s.length,
        "k": s.k,
        "exclude_identity": s.exclude_identity,
        "residue_filter": s.residue_filter,
    })
}

pub fn stratum_from(v: &Value) -> Result<Stratum> {
    let k = match field(v, "k")? {
        Value::Null => None,
        x => Some(x.as_u64().ok_or_else(|| Error::format("k is not an integer"))? as u32),
    };
    Ok(Stratum {
        length: get_u64(v, "length")? as u32,
        k,
        exclude_identity: get_bool(v, "exclude_identity")?,
        residue_filter: get_bool(v, "residue_filter")?,
    })
}

pub fn mode_str(mode: SearchMode) -> &'static str {
    match mode {
        SearchMode::Raw => "raw",
        SearchMode::UpToAut => "up_to_aut",
    }
}

pub fn mode_from(text: &str) -> Result<SearchMode> {
    match text {
        "raw" => Ok(SearchMode::Raw),
        "up_to_aut" | "up-to-aut" => Ok(SearchMode::UpToAut),
        other => Err(Error::format(format!("unknown search mode {other:?}"))),
    }
}

fn line_value(l: &StratumLine) -> Value {
    json!({
        "k": l.k,
        "mode": mode_str(l.mode),
        "candidates": l.candidates,
        "filtered": l.filtered,
        "checked": l.checked,
        "atoms": l.atoms,
        "matched": l.matched,
        "unverified": l.unverified,
    })
}

pub fn line_from(v: &Value) -> Result<StratumLine> {
    Ok(StratumLine {
        k: get_u64(v, "k")? as u32,
        mode: mode_from(get_str(v, "mode")?)?,
        candidates: get_u64(v, "candidates")?,
        filtered: get_u64(v, "filtered")?,
        checked: get_u64(v, "checked")?,
        atoms: get_u64(v, "atoms")?,
        matched: get_u64(v, "matched")?,
        unverified: get_u64(v, "unverified")?,
    })
}

pub fn scope_str(scope: InverseScope) -> &'static str {
    match scope {
        InverseScope::KLe2 => "k_le_2",
        InverseScope::Full => "full",
    }
}

pub fn scope_from(text: &str) -> Result<InverseScope> {
    match text {
        "k_le_2" => Ok(InverseScope::KLe2),
        "full" => Ok(InverseScope::Full),
        other => Err(Error::format(format!("unknown scope {other:?}"))),
    }
}

/// `beyond` lists searches at lengths past `2q`, which must find nothing.
pub fn inverse_certificate(
    ctx: &GroupCtx,
    report: &InverseReport,
    forma: &[Sequence],
    beyond: &[SearchOutcome],
) -> Certificate {
    let beyond: Vec<Value> = beyond
        .iter()
        .map(|o| {
            json!({
                "stratum": stratum_value(&o.stratum),
                "mode": mode_str(o.mode),
                "candidates": o.candidates,
                "filtered": o.counters.filtered_residue + o.counters.filtered_orbit,
                "checked": o.counters.checked,
                "atoms": o.atoms.iter().map(|(a, _)| a.format(ctx)).collect::<Vec<_>>(),
                "unverified": o.counters.unverified,
            })
        })
        .collect();
    Certificate::new(
        Kind::InverseReport,
        ctx.params(),
        None,
        json!({
            "scope": scope_str(report.scope),
            "length": 2 * ctx.q(),
            "n_f": report.n_f,
            "forma_set": seq_list(ctx, forma),
            "strata": report.strata.iter().map(line_value).collect::<Vec<_>>(),
            "atoms": seq_list(ctx, &report.atoms),
            "exceptions": seq_list(ctx, &report.exceptions),
            "subgroup_violations": seq_list(ctx, &report.subgroup_violations),
            "unverified": seq_list(ctx, &report.unverified),
            "beyond": beyond,
            "verified": report.verified() && beyond_clean(&beyond),
        }),
    )
}

fn beyond_clean(beyond: &[Value]) -> bool {
    beyond
        .iter()
        .all(|b| b["atoms"].as_array().is_some_and(|a| a.is_empty()) && b["unverified"].as_u64() == Some(0))
}

fn bound_value(b: &Bound) -> Value {
    match *b {
        Bound::Exact(v) => json!(v),
        Bound::Range(lo, hi) => json!({ "min": lo, "max": hi }),
    }
}

pub fn bound_from(v: &Value) -> Result<Bound> {
    if let Some(x) = v.as_u64() {
        return Ok(Bound::Exact(x));
    }
    Ok(Bound::Range(get_u64(v, "min")?, get_u64(v, "max")?))
}

pub fn table_value(t: &ElasticityTable) -> Value {
    json!({
        "D": t.d,
        "k": t.k,
        "rho_2k": t.rho_even,
        "rho_2k_plus_1": bound_value(&t.rho_odd),
        "rho_2k_plus_1_general": bound_value(&t.rho_odd_general),
        "rho_limit": format!("{}/{}", t.rho_limit.0, t.rho_limit.1),
        "lambda": t.lambda.iter().map(bound_value).collect::<Vec<_>>(),
    })
}

pub fn elasticity_certificate(
    ctx: &GroupCtx,
    k: u32,
    witness: &ElasticityWitness,
    table: &ElasticityTable,
    extra: Option<Value>,
) -> Certificate {
    let (a, b) = witness.lengths();
    let mut payload = json!({
        "k": k,
        "left": seq_list(ctx, &witness.left),
        "right": seq_list(ctx, &witness.right),
        "lengths": [a, b],
        "product": witness.product().format(ctx),
        "calculator": table_value(table),
    });
    if let Some(extra) = extra {
        payload["u_k"] = extra;
    }
    Certificate::new(Kind::ElasticityWitness, ctx.params(), None, payload)
}

fn counterexample_value(c: &Counterexample) -> Value {
    let inputs: Map<String, Value> = c.inputs.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    let measured: Map<String, Value> = c.measured.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    json!({ "trial": c.trial, "inputs": inputs, "measured": measured })
}

pub fn counterexample_from(v: &Value) -> Result<Counterexample> {
    let pairs = |name: &str| -> Result<Vec<(String, Value)>> {
        Ok(field(v, name)?
            .as_object()
            .ok_or_else(|| Error::format(format!("{name:?} is not an object")))?
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect())
    };
    Ok(Counterexample {
        trial: get_u64(v, "trial")?,
        inputs: pairs("inputs")?
            .into_iter()
            .map(|(k, v)| v.as_str().map(|s| (k, s.to_string())))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::format("inputs must be strings"))?,
        measured: pairs("measured")?
            .into_iter()
            .map(|(k, v)| v.as_i64().map(|x| (k, x)))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::format("measurements must be integers"))?,
    })
}

/// `params` records lemma-specific settings such as `n` and the mode of the cyclic check.
pub fn lemma_certificate(ctx: &GroupCtx, report: &LemmaReport, params: Value) -> Certificate {
    Certificate::new(
        Kind::LemmaReport,
        ctx.params(),
        Some(report.seed),
        json!({
            "lemma": report.lemma.name(),
            "params": params,
            "trials": report.trials,
            "hypothesis_unmet": report.hypothesis_unmet,
            "counterexample": report.counterexample.as_ref().map(counterexample_value),
            "holds": report.holds(),
        }),
    )
}

fn counters_value(c: &Counters) -> Value {
    json!({
        "visited": c.visited,
        "filtered_residue": c.filtered_residue,
        "filtered_orbit": c.filtered_orbit,
        "checked": c.checked,
        "atoms": c.atoms,
        "unverified": c.unverified,
    })
}

fn counters_from(v: &Value) -> Result<Counters> {
    Ok(Counters {
        visited: get_u64(v, "visited")?,
        filtered_residue: get_u64(v, "filtered_residue")?,
        filtered_orbit: get_u64(v, "filtered_orbit")?,
        checked: get_u64(v, "checked")?,
        atoms: get_u64(v, "atoms")?,
        unverified: get_u64(v, "unverified")?,
    })
}

/// A shard's progress. `shards` is the plan size the shard belongs to.
pub fn checkpoint_certificate(
    ctx: &GroupCtx,
    stratum: &Stratum,
    mode: SearchMode,
    shards: u32,
    state: &ShardState,
) -> Certificate {
    let hits: Vec<Value> = state.atoms.iter().map(|(a, n)| json!([a.format(ctx), n])).collect();
    Certificate::new(
        Kind::Checkpoint,
        ctx.params(),
        None,
        json!({
            "stratum": stratum_value(stratum),
            "mode": mode_str(mode),
            "shards": shards,
            "shard": { "index": state.shard.index, "start": state.shard.start, "end": state.shard.end },
            "next_rank": state.next_rank,
            "complete": state.done(),
            "counters": counters_value(&state.counters),
            "findings_digest": state.digest.hex(),
            "hits": hits,
            "unverified": seq_list(ctx, &state.unverified),
        }),
    )
}

/// Everything a checkpoint payload describes.
pub struct CheckpointData {
    pub stratum: Stratum,
    pub mode: SearchMode,
    pub shards: u32,
    pub state: ShardState,
}

pub fn checkpoint_from(ctx: &GroupCtx, payload: &Value) -> Result<CheckpointData> {
    let shard_v = field(payload, "shard")?;
    let shard = Shard {
        index: get_u64(shard_v, "index")? as u32,
        start: get_u64(shard_v, "start")?,
        end: get_u64(shard_v, "end")?,
    };
    let counters = counters_from(field(payload, "counters")?)?;
    let mut atoms = BTreeMap::new();
    for hit in get_array(payload, "hits")? {
        let pair = hit
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| Error::format("hit is not a pair"))?;
        let seq = parse_seq(ctx, &pair[0])?;
        let n = pair[1]
            .as_u64()
            .ok_or_else(|| Error::format("hit count is not an integer"))?;
        atoms.insert(seq, n);
    }
    let digest = FindingsDigest::from_hex(get_str(payload, "findings_digest")?, counters.atoms)
        .ok_or_else(|| Error::format("findings_digest is not 32 hex digits"))?;
    Ok(CheckpointData {
        stratum: stratum_from(field(payload, "stratum")?)?,
        mode: mode_from(get_str(payload, "mode")?)?,
        shards: get_u64(payload, "shards")? as u32,
        state: ShardState {
            shard,
            next_rank: get_u64(payload, "next_rank")?,
            counters,
            digest,
            atoms,
            unverified: get_seq_list(ctx, payload, "unverified")?,
        },
    })
}
