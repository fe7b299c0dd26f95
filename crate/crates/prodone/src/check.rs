//! Independent re-verification of certificates from their fields alone.

use std::collections::BTreeSet;

use prodone_core::engine::{classify, is_atom, pi_set};
use prodone_core::enumeration::{canonical_form, Layout, SearchMode};
use prodone_core::group::IDENTITY;
use prodone_core::invariants::{elasticity_calculator, forma_s_enumerate, order_p_subgroups, ElasticityWitness};
use prodone_core::oracles::{check_cyclic_extremal, check_lemma, Counterexample, CyclicMode, LemmaId};
use prodone_core::{GroupCtx, Sequence};
use serde_json::Value;

use crate::cert::{Certificate, Kind};
use crate::error::{Error, Result};
use crate::payload::*;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verdict {
    pub failures: Vec<String>,
    /// What was deliberately not re-verified.
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn require(&mut self, cond: bool, what: impl FnOnce() -> String) {
        if !cond {
            self.failures.push(what());
        }
    }
}

/// Checks the digest and then recomputes the claim. Malformed payloads are
/// failures; only an unusable group descriptor is an error.
pub fn check_certificate(cert: &Certificate) -> Result<Verdict> {
    let mut v = Verdict::default();
    v.require(cert.digest_ok(), || {
        format!(
            "digest mismatch: recorded {}, computed {}",
            cert.digest,
            cert.compute_digest()
        )
    });
    let ctx = GroupCtx::new(cert.group)?;
    let p = &cert.payload;
    let outcome = match cert.kind {
        Kind::Atom => check_atom(&ctx, p, &mut v),
        Kind::NonAtom => check_non_atom(&ctx, p, &mut v),
        Kind::DavenportSmall => check_davenport(&ctx, p, &mut v),
        Kind::InverseReport => check_inverse(&ctx, p, &mut v),
        Kind::ElasticityWitness => check_elasticity(&ctx, p, &mut v),
        Kind::LemmaReport => check_lemma_report(&ctx, cert.seed, p, &mut v),
        Kind::Checkpoint => check_checkpoint(&ctx, p, &mut v),
    };
    if let Err(e) = outcome {
        v.failures.push(e.to_string());
    }
    Ok(v)
}

fn product_one(ctx: &GroupCtx, s: &Sequence) -> Result<bool> {
    Ok(pi_set(ctx, s)?.contains(IDENTITY))
}

fn check_atom(ctx: &GroupCtx, p: &Value, v: &mut Verdict) -> Result<()> {
    let seq = get_seq(ctx, p, "sequence")?;
    v.require(get_u64(p, "length")? as usize == seq.len(), || {
        "length field disagrees".into()
    });
    v.require(get_bool(p, "atom")? && get_bool(p, "product_one")?, || {
        "payload does not claim an atom".into()
    });
    let verdict = is_atom(ctx, &seq)?;
    v.require(verdict.atom, || format!("{} is not an atom", seq.format(ctx)));
    Ok(())
}

fn check_non_atom(ctx: &GroupCtx, p: &Value, v: &mut Verdict) -> Result<()> {
    let seq = get_seq(ctx, p, "sequence")?;
    v.require(get_u64(p, "length")? as usize == seq.len(), || {
        "length field disagrees".into()
    });
    v.require(!get_bool(p, "atom")?, || "payload claims an atom".into());
    let claimed_one = get_bool(p, "product_one")?;
    v.require(product_one(ctx, &seq)? == claimed_one, || {
        "product-one flag is wrong".into()
    });
    match field(p, "witness")? {
        Value::Null => v.require(!claimed_one, || "product-one non-atom needs a witness".into()),
        w => {
            let parts = w
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::format("witness is not a pair"))?;
            let t1 = parse_seq(ctx, &parts[0])?;
            let t2 = parse_seq(ctx, &parts[1])?;
            v.require(!t1.is_empty() && !t2.is_empty(), || "witness part is empty".into());
            v.require(t1.concat(&t2) == seq, || {
                "witness parts do not multiply to the sequence".into()
            });
            v.require(product_one(ctx, &t1)?, || {
                "first witness part is not product-one".into()
            });
            v.require(product_one(ctx, &t2)?, || {
                "second witness part is not product-one".into()
            });
        }
    }
    Ok(())
}

fn check_davenport(ctx: &GroupCtx, p: &Value, v: &mut Verdict) -> Result<()> {
    let value = get_u64(p, "value")? as usize;
    let extremal = get_seq(ctx, p, "extremal")?;
    v.require(extremal.len() == value, || {
        "extremal example has the wrong length".into()
    });
    v.require(classify(ctx, &extremal)?.product_one_free, || {
        "extremal example has a product-one subsequence".into()
    });
    let by_length = get_array(p, "by_length")?;
    v.require(by_length.len() == value + 1, || {
        "by_length does not end at the value".into()
    });
    v.require(by_length.last().and_then(Value::as_u64).unwrap_or(0) > 0, || {
        "no sequences at the maximal length".into()
    });
    let nodes: u64 = by_length.iter().filter_map(Value::as_u64).sum();
    v.require(nodes == get_u64(p, "nodes")?, || "node count does not add up".into());
    v.require(get_u64(p, "refuted_length")? as usize == value + 1, || {
        "refuted length is not value+1".into()
    });
    v.notes
        .push("the exhaustive refutation at value+1 is not re-run".into());
    Ok(())
}

fn check_inverse(ctx: &GroupCtx, p: &Value, v: &mut Verdict) -> Result<()> {
    let two_q = 2 * ctx.q();
    v.require(get_u64(p, "length")? == two_q as u64, || "length is not 2q".into());
    let scope = scope_from(get_str(p, "scope")?)?;
    let forma: BTreeSet<Sequence> = forma_s_enumerate(ctx).into_iter().collect();
    let listed: BTreeSet<Sequence> = get_seq_list(ctx, p, "forma_set")?.into_iter().collect();
    v.require(listed == forma, || {
        "forma_set differs from the recomputed family".into()
    });
    v.require(get_u64(p, "n_f")? as usize == forma.len(), || {
        "n_f differs from the recomputed count".into()
    });

    let lines: Vec<_> = get_array(p, "strata")?.iter().map(line_from).collect::<Result<_>>()?;
    let expected_ks: Vec<u32> = scope.strata(ctx).iter().map(|s| s.k.unwrap_or(0)).collect();
    v.require(lines.iter().map(|l| l.k).collect::<Vec<_>>() == expected_ks, || {
        "strata do not match the scope".into()
    });
    for l in &lines {
        let total = Layout::new(ctx, &prodone_core::enumeration::Stratum::atoms(two_q, Some(l.k)))?.total();
        v.require(l.candidates == total, || {
            format!("k={}: candidate count {} != {}", l.k, l.candidates, total)
        });
        v.require(l.filtered + l.checked == l.candidates, || {
            format!("k={}: filtered + checked != candidates", l.k)
        });
        v.require(l.k > 2 || l.mode == SearchMode::Raw, || {
            format!("k={}: the expected atoms can only be counted by a raw walk", l.k)
        });
        v.require(l.matched <= l.atoms && l.atoms + l.unverified <= l.checked, || {
            format!("k={}: counts inconsistent", l.k)
        });
    }
    let atoms = get_seq_list(ctx, p, "atoms")?;
    let count: u64 = lines.iter().map(|l| l.atoms).sum();
    v.require(count as usize == atoms.len(), || {
        "atom list length differs from the stratum counts".into()
    });
    let matched: u64 = lines.iter().map(|l| l.matched).sum();
    v.require(
        matched as usize == atoms.iter().filter(|a| forma.contains(a)).count(),
        || "matched counts are wrong".into(),
    );
    let subgroups = order_p_subgroups(ctx);
    let q = ctx.q() as usize;
    let mut exceptions = Vec::new();
    let mut violations = Vec::new();
    for a in &atoms {
        v.require(a.len() == two_q as usize, || {
            format!("{} has the wrong length", a.format(ctx))
        });
        v.require(is_atom(ctx, a)?.atom, || format!("{} is not an atom", a.format(ctx)));
        if !forma.contains(a) {
            exceptions.push(a.clone());
        }
        if subgroups.iter().any(|h| a.count_where(|g| h.contains(&g)) > q - 1) {
            violations.push(a.clone());
        }
    }
    v.require(get_seq_list(ctx, p, "exceptions")? == exceptions, || {
        "exception list is wrong".into()
    });
    v.require(get_seq_list(ctx, p, "subgroup_violations")? == violations, || {
        "subgroup violation list is wrong".into()
    });
    let unverified = get_seq_list(ctx, p, "unverified")?;
    let unverified_count: u64 = lines.iter().map(|l| l.unverified).sum();
    v.require(unverified.len() as u64 == unverified_count, || {
        "unverified list length is wrong".into()
    });

    let mut beyond_clean = true;
    for b in get_array(p, "beyond")? {
        let stratum = stratum_from(field(b, "stratum")?)?;
        let total = Layout::new(ctx, &stratum)?.total();
        v.require(get_u64(b, "candidates")? == total, || {
            "beyond: candidate count is wrong".into()
        });
        v.require(get_u64(b, "filtered")? + get_u64(b, "checked")? == total, || {
            "beyond: filtered + checked != candidates".into()
        });
        let found = get_seq_list(ctx, b, "atoms")?;
        for a in &found {
            v.require(is_atom(ctx, a)?.atom, || format!("{} is not an atom", a.format(ctx)));
        }
        beyond_clean &= found.is_empty() && get_u64(b, "unverified")? == 0;
    }
    let verified = exceptions.is_empty()
        && violations.is_empty()
        && unverified.is_empty()
        && atoms.len() == forma.len()
        && beyond_clean;
    v.require(get_bool(p, "verified")? == verified, || {
        "verified flag disagrees with the recomputation".into()
    });
    v.notes
        .push("exhaustiveness of the search is not re-verified; re-run the search to confirm it".into());
    Ok(())
}

fn check_elasticity(ctx: &GroupCtx, p: &Value, v: &mut Verdict) -> Result<()> {
    let witness = ElasticityWitness {
        left: get_seq_list(ctx, p, "left")?,
        right: get_seq_list(ctx, p, "right")?,
    };
    if let Err(e) = witness.verify(ctx) {
        v.failures.push(format!("witness fails: {e:?}"));
    }
    let lengths = get_array(p, "lengths")?;
    let (a, b) = witness.lengths();
    v.require(
        lengths.len() == 2 && lengths[0].as_u64() == Some(a as u64) && lengths[1].as_u64() == Some(b as u64),
        || "lengths field disagrees".into(),
    );
    v.require(get_u64(p, "k")? as usize == a, || "k is not the left length".into());
    v.require(get_seq(ctx, p, "product")? == witness.product(), || {
        "product field disagrees".into()
    });
    let calc = field(p, "calculator")?;
    let table = elasticity_calculator(get_u64(calc, "D")?, get_u64(calc, "k")?)?;
    v.require(table_value(&table) == *calc, || {
        "calculator output differs from recomputation".into()
    });
    if let Some(uk) = p.get("u_k") {
        for w in get_array(uk, "witnesses")? {
            let w = ElasticityWitness {
                left: get_seq_list(ctx, w, "left")?,
                right: get_seq_list(ctx, w, "right")?,
            };
            if let Err(e) = w.verify(ctx) {
                v.failures.push(format!("U_k witness fails: {e:?}"));
            }
        }
    }
    Ok(())
}

fn check_lemma_report(ctx: &GroupCtx, seed: Option<u64>, p: &Value, v: &mut Verdict) -> Result<()> {
    let lemma: LemmaId = get_str(p, "lemma")?
        .parse()
        .map_err(|_| Error::format("unknown lemma"))?;
    let seed = seed.ok_or_else(|| Error::format("lemma report without a seed"))?;
    let trials = get_u64(p, "trials")?;
    let recomputed = if lemma == LemmaId::CyclicExtremal {
        let params = field(p, "params")?;
        let n = get_u64(params, "n")? as u32;
        let mode = match get_str(params, "mode")? {
            "multiplicity" => CyclicMode::Multiplicity,
            "extremal" => CyclicMode::Extremal,
            other => return Err(Error::format(format!("unknown mode {other:?}"))),
        };
        check_cyclic_extremal(n, mode)?
    } else {
        check_lemma(ctx, lemma, trials, seed)?
    };
    v.require(recomputed.trials == trials, || "trial count differs on rerun".into());
    v.require(recomputed.hypothesis_unmet == get_u64(p, "hypothesis_unmet")?, || {
        "hypothesis count differs on rerun".into()
    });
    let recorded = match field(p, "counterexample")? {
        Value::Null => None,
        c => Some(counterexample_from(c)?),
    };
    // JSON objects sort their keys, so compare the named fields in sorted order.
    let sorted = |c: Option<Counterexample>| {
        c.map(|mut c| {
            c.inputs.sort();
            c.measured.sort();
            c
        })
    };
    v.require(get_bool(p, "holds")? == recorded.is_none(), || {
        "holds flag disagrees".into()
    });
    if recorded.is_some() {
        v.notes.push("the report records a reproducible counterexample".into());
    }
    v.require(sorted(recomputed.counterexample) == sorted(recorded), || {
        "counterexample differs on rerun".into()
    });
    Ok(())
}

fn check_checkpoint(ctx: &GroupCtx, p: &Value, v: &mut Verdict) -> Result<()> {
    let data = checkpoint_from(ctx, p)?;
    let st = &data.state;
    let layout = Layout::new(ctx, &data.stratum)?;
    v.require(st.shard.start <= st.next_rank && st.next_rank <= st.shard.end, || {
        "next_rank outside the shard".into()
    });
    v.require(st.shard.end <= layout.total(), || {
        "shard extends past the stratum".into()
    });
    v.require(st.counters.visited == st.next_rank - st.shard.start, || {
        "visited count != ranks walked".into()
    });
    v.require(st.counters.reconciles(), || "counters do not reconcile".into());
    let hits: u64 = st.atoms.values().sum();
    v.require(hits == st.counters.atoms, || {
        "hit counts do not sum to the atom counter".into()
    });
    v.require(st.unverified.len() as u64 == st.counters.unverified, || {
        "unverified list length is wrong".into()
    });
    v.require(st.recomputed_digest().hex() == st.digest.hex(), || {
        "findings digest does not match the hits".into()
    });
    v.require(get_bool(p, "complete")? == st.done(), || {
        "complete flag disagrees".into()
    });
    let auts = match data.mode {
        SearchMode::Raw => Vec::new(),
        SearchMode::UpToAut => ctx.automorphisms(),
    };
    for a in st.atoms.keys() {
        v.require(is_atom(ctx, a)?.atom, || format!("{} is not an atom", a.format(ctx)));
        match data.mode {
            SearchMode::Raw => {
                let rank = layout.rank_of(a);
                v.require(rank.is_some_and(|r| r >= st.shard.start && r < st.next_rank), || {
                    format!("{} is not in the processed range", a.format(ctx))
                });
            }
            SearchMode::UpToAut => {
                v.require(canonical_form(a, &auts) == *a, || {
                    format!("{} is not canonical", a.format(ctx))
                });
            }
        }
    }
    v.notes
        .push("candidates reported as non-atoms are not re-examined".into());
    Ok(())
}
