//! The `prodone` command line.
//!
//! Exit codes: 0 when the claim is verified, 1 when it is falsified or a
//! counterexample turns up, 2 on usage, input or resource errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use prodone_core::engine::{is_atom, length_set_bounded, pi_set};
use prodone_core::enumeration::{SearchMode, ShardState, Stratum};
use prodone_core::invariants::{
    elasticity_calculator, elasticity_witness_for, forma_s_enumerate, inverse_mode, large_davenport_strata,
    small_davenport, standard_pair, uk_bounded, InverseReport, InverseScope, LargeMode,
};
use prodone_core::oracles::{check_cyclic_extremal, CyclicMode, LemmaId};
use prodone_core::{GroupCtx, GroupParams, Sequence};
use serde_json::{json, Value};

use crate::cert::Certificate;
use crate::check::check_certificate;
use crate::error::{Error, Result};
use crate::payload::{
    atom_certificate, checkpoint_certificate, davenport_certificate, elasticity_certificate, inverse_certificate,
    lemma_certificate, mode_str, seq_text,
};
use crate::runner::{run_lemma, run_stratum, thread_count, RunOptions, StratumRun};

pub const EXIT_VERIFIED: i32 = 0;
pub const EXIT_FALSIFIED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "prodone", version, about = "Product-one sequences over C_q x| C_p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct GroupArg {
    /// Group descriptor `p,q,s`.
    #[arg(long, value_name = "P,Q,S")]
    group: GroupParams,
}

#[derive(clap::Args, Debug, Clone)]
struct Output {
    /// Write the certificate here instead of standard output.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Structure census of the group.
    Group(GroupArg),
    /// Operations on a single sequence.
    Seq {
        #[command(subcommand)]
        op: SeqOp,
    },
    /// Exhaustive atom search over one stratum.
    Search(SearchArgs),
    /// Small or large Davenport constant.
    Davenport(DavenportArgs),
    /// Verify that every length-2q atom has the expected form.
    VerifyInverse(InverseArgs),
    /// Elasticity witnesses and the closed-form calculator.
    Elasticity(ElasticityArgs),
    /// Randomized and exhaustive lemma checkers.
    Lemmas(LemmaArgs),
    /// Re-verify a certificate file.
    CheckCert { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum SeqOp {
    /// Atom or non-atom certificate.
    Check {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        seq: String,
        /// Exit 1 unless the verdict matches.
        #[arg(long, value_enum)]
        expect: Option<Expect>,
        #[command(flatten)]
        output: Output,
    },
    /// The set of ordered products.
    Pi {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        seq: String,
    },
    /// Factorization lengths.
    Lengths {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        seq: String,
        /// Maximum atom peels examined.
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Expect {
    Atom,
    NonAtom,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ModeArg {
    Raw,
    UpToAut,
}

impl From<ModeArg> for SearchMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Raw => SearchMode::Raw,
            ModeArg::UpToAut => SearchMode::UpToAut,
        }
    }
}

#[derive(clap::Args, Debug, Clone)]
struct ShardArgs {
    #[arg(long, default_value_t = 1)]
    shards: u32,
    /// Run only this shard of the plan.
    #[arg(long)]
    shard_index: Option<u32>,
    /// Checkpoint file for a single shard.
    #[arg(long, value_name = "FILE", conflicts_with = "checkpoint_dir")]
    checkpoint: Option<PathBuf>,
    /// Directory holding one checkpoint per shard.
    #[arg(long, value_name = "DIR")]
    checkpoint_dir: Option<PathBuf>,
    /// Ranks between checkpoint writes.
    #[arg(long, default_value_t = 1 << 20)]
    checkpoint_every: u64,
    /// Stop each shard after this many ranks (for interruption testing).
    #[arg(long)]
    stop_after: Option<u64>,
}

impl ShardArgs {
    fn options(&self) -> Result<RunOptions> {
        if self.shards == 0 {
            return Err(Error::Usage("--shards must be at least 1".into()));
        }
        if let Some(dir) = &self.checkpoint_dir {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        Ok(RunOptions {
            shards: self.shards,
            shard_index: self.shard_index,
            threads: thread_count(),
            checkpoint_dir: self.checkpoint_dir.clone(),
            checkpoint_file: self.checkpoint.clone(),
            checkpoint_every: self.checkpoint_every,
            stop_after: self.stop_after,
        })
    }
}

#[derive(clap::Args, Debug)]
struct SearchArgs {
    #[command(flatten)]
    group: GroupArg,
    #[arg(long)]
    length: u32,
    /// Number of terms outside the commutator subgroup; omit to mix all terms.
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, value_enum, default_value = "raw")]
    mode: ModeArg,
    #[command(flatten)]
    shard: ShardArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Which {
    Small,
    Large,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum LargeModeArg {
    #[value(name = "lower_witness", alias = "lower-witness")]
    LowerWitness,
    #[value(name = "exhaustive_at_2q", alias = "exhaustive-at-2q")]
    ExhaustiveAt2q,
    #[value(name = "exhaustive_full", alias = "exhaustive-full")]
    ExhaustiveFull,
}

#[derive(clap::Args, Debug)]
struct DavenportArgs {
    #[command(flatten)]
    group: GroupArg,
    #[arg(long, value_enum)]
    which: Which,
    #[arg(long, value_enum, default_value = "lower_witness")]
    mode: LargeModeArg,
    /// Restrict the small-constant search to orbit-minimal least terms.
    #[arg(long)]
    up_to_aut: bool,
    /// Walk every stratum raw; by default strata that only need to be empty prune automorphism orbits.
    #[arg(long)]
    raw: bool,
    #[command(flatten)]
    shard: ShardArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ScopeArg {
    #[value(name = "k_le_2", alias = "k-le-2")]
    KLe2,
    Full,
}

#[derive(clap::Args, Debug)]
struct InverseArgs {
    #[command(flatten)]
    group: GroupArg,
    #[arg(long, value_enum)]
    scope: ScopeArg,
    /// Walk every stratum raw; by default strata that only need to be empty prune automorphism orbits.
    #[arg(long)]
    raw: bool,
    #[command(flatten)]
    shard: ShardArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(clap::Args, Debug)]
struct ElasticityArgs {
    #[command(flatten)]
    group: GroupArg,
    #[arg(long)]
    k: u32,
    /// Also collect a witnessed subset of U_k from products of length-2q atoms.
    #[arg(long)]
    uk: bool,
    /// Products examined by --uk.
    #[arg(long, default_value_t = 2_000)]
    uk_budget: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum CyclicModeArg {
    Multiplicity,
    Extremal,
}

#[derive(clap::Args, Debug)]
struct LemmaArgs {
    #[command(flatten)]
    group: GroupArg,
    /// Lemma name, or `all`.
    #[arg(long, default_value = "all")]
    lemma: String,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cyclic orders for the exhaustive cyclic check.
    #[arg(long = "n", value_delimiter = ',', default_values_t = [5u32, 7, 9])]
    n: Vec<u32>,
    #[arg(long, value_enum, default_value = "extremal")]
    cyclic_mode: CyclicModeArg,
    /// Write one certificate per lemma into this directory.
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

/// Parses arguments and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_VERIFIED };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Group(g) => group(g.group),
        Command::Seq { op } => seq(op),
        Command::Search(args) => search(args),
        Command::Davenport(args) => davenport(args),
        Command::VerifyInverse(args) => verify_inverse(args),
        Command::Elasticity(args) => elasticity(args),
        Command::Lemmas(args) => lemmas(args),
        Command::CheckCert { file } => check_cert(file),
    }
}

fn emit(cert: &Certificate, output: &Output) -> Result<()> {
    match &output.out {
        Some(path) => cert.write(path),
        None => {
            out(&cert.to_pretty());
            Ok(())
        }
    }
}

/// Stdout write that tolerates a closed pipe.
fn out(text: &str) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush());
}

fn print_json(value: &Value) {
    out(&format!(
        "{}\n",
        serde_json::to_string_pretty(value).expect("JSON values serialize")
    ));
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

fn group(params: GroupParams) -> Result<i32> {
    let ctx = GroupCtx::new(params)?;
    let mut orders: BTreeMap<String, usize> = BTreeMap::new();
    for g in ctx.elements() {
        *orders.entry(ctx.element_order(g).to_string()).or_default() += 1;
    }
    let center = ctx
        .elements()
        .filter(|&g| ctx.elements().all(|h| ctx.commutes(g, h)))
        .count();
    let pairs = ctx.generator_pairs();
    let residues: std::collections::BTreeSet<u32> = pairs.iter().map(|p| p.s_eff).collect();
    print_json(&json!({
        "group": params.to_string(),
        "order": ctx.order(),
        "commutator_order": ctx.elements().filter(|&g| ctx.in_commutator(g)).count(),
        "element_orders": orders,
        "center_order": center,
        "automorphisms": ctx.automorphisms().len(),
        "generator_pairs": pairs.len(),
        "effective_residues": residues,
    }));
    Ok(EXIT_VERIFIED)
}

fn seq(op: SeqOp) -> Result<i32> {
    match op {
        SeqOp::Check {
            group,
            seq,
            expect,
            output,
        } => {
            let ctx = GroupCtx::new(group.group)?;
            let s = Sequence::parse(&ctx, &seq)?;
            let start = Instant::now();
            let verdict = is_atom(&ctx, &s)?;
            let cert = atom_certificate(&ctx, &s, &verdict).with_elapsed(elapsed_ms(start));
            emit(&cert, &output)?;
            eprintln!(
                "{}: {}",
                s.format(&ctx),
                if verdict.atom { "atom" } else { "not an atom" }
            );
            let matches = match expect {
                None => true,
                Some(Expect::Atom) => verdict.atom,
                Some(Expect::NonAtom) => !verdict.atom,
            };
            Ok(if matches { EXIT_VERIFIED } else { EXIT_FALSIFIED })
        }
        SeqOp::Pi { group, seq } => {
            let ctx = GroupCtx::new(group.group)?;
            let s = Sequence::parse(&ctx, &seq)?;
            let pi = pi_set(&ctx, &s)?;
            let elems: Vec<String> = pi.iter().map(|g| ctx.element(g).to_string()).collect();
            print_json(&json!({
                "sequence": seq_text(&ctx, &s),
                "pi": elems,
                "size": pi.len(),
                "product_one": pi.contains(prodone_core::group::IDENTITY),
            }));
            Ok(EXIT_VERIFIED)
        }
        SeqOp::Lengths { group, seq, budget } => {
            let ctx = GroupCtx::new(group.group)?;
            let s = Sequence::parse(&ctx, &seq)?;
            let ls = length_set_bounded(&ctx, &s, budget)?;
            let facts: BTreeMap<String, Vec<String>> = ls
                .factorizations
                .iter()
                .map(|(len, atoms)| (len.to_string(), atoms.iter().map(|a| a.format(&ctx)).collect()))
                .collect();
            print_json(&json!({
                "sequence": seq_text(&ctx, &s),
                "lengths": ls.lengths(),
                "exact": ls.exact,
                "factorizations": facts,
            }));
            Ok(EXIT_VERIFIED)
        }
    }
}

/// Collapses the shard states of a run into one state spanning the whole stratum.
fn whole_state(run: &StratumRun) -> ShardState {
    let mut merged = ShardState::fresh(prodone_core::enumeration::Shard {
        index: 0,
        start: run.states.iter().map(|s| s.shard.start).min().unwrap_or(0),
        end: run.states.iter().map(|s| s.shard.end).max().unwrap_or(0),
    });
    for s in &run.states {
        merged.counters.merge(&s.counters);
        merged.digest.merge(&s.digest);
        for (a, n) in &s.atoms {
            *merged.atoms.entry(a.clone()).or_insert(0) += n;
        }
        merged.unverified.extend(s.unverified.iter().cloned());
    }
    merged.next_rank = merged.shard.start + merged.counters.visited;
    merged
}

fn search(args: SearchArgs) -> Result<i32> {
    let ctx = GroupCtx::new(args.group.group)?;
    let stratum = Stratum::atoms(args.length, args.k);
    let mode: SearchMode = args.mode.into();
    let opts = args.shard.options()?;
    let start = Instant::now();
    let run = run_stratum(&ctx, stratum, mode, &opts)?;
    // An interrupted multi-shard run covers several disjoint ranges; its shard
    // checkpoints are the resumable record, so no merged certificate is written.
    let state = match run.states.as_slice() {
        [one] => Some((one.clone(), if opts.shard_index.is_some() { opts.shards } else { 1 })),
        _ if run.complete => Some((whole_state(&run), 1)),
        _ => None,
    };
    if let Some((state, plan)) = state {
        let cert = checkpoint_certificate(&ctx, &stratum, mode, plan, &state).with_elapsed(elapsed_ms(start));
        emit(&cert, &args.output)?;
    }
    let o = &run.outcome;
    eprintln!(
        "length {} k {}: {} candidates visited, {} checked, {} atoms ({} distinct), {} unverified, digest {}, {}",
        stratum.length,
        stratum.k.map_or("any".to_string(), |k| k.to_string()),
        o.counters.visited,
        o.counters.checked,
        o.counters.atoms,
        o.atoms.len(),
        o.counters.unverified,
        o.digest.hex(),
        if run.complete { "complete" } else { "interrupted" }
    );
    Ok(if o.counters.unverified > 0 || !run.complete {
        EXIT_ERROR
    } else {
        EXIT_VERIFIED
    })
}

/// Strata that only need to be empty use the orbit-pruned walk unless `raw` is set.
fn run_strata(
    ctx: &GroupCtx,
    strata: &[Stratum],
    raw: bool,
    opts: &RunOptions,
) -> Result<(Vec<prodone_core::enumeration::SearchOutcome>, bool)> {
    let mut outcomes = Vec::with_capacity(strata.len());
    let mut complete = true;
    for &stratum in strata {
        let started = Instant::now();
        let mode = if raw {
            SearchMode::Raw
        } else {
            inverse_mode(ctx, &stratum)
        };
        let run = run_stratum(ctx, stratum, mode, opts)?;
        eprintln!(
            "  length {} k={} {}: {} candidates, {} checked, {} atoms{} ({} ms)",
            stratum.length,
            stratum.k.unwrap_or(0),
            mode_str(mode),
            run.outcome.candidates,
            run.outcome.counters.checked,
            run.outcome.counters.atoms,
            if run.complete { "" } else { ", interrupted" },
            elapsed_ms(started)
        );
        complete &= run.complete;
        outcomes.push(run.outcome);
    }
    Ok((outcomes, complete))
}

fn davenport(args: DavenportArgs) -> Result<i32> {
    let ctx = GroupCtx::new(args.group.group)?;
    let start = Instant::now();
    match args.which {
        Which::Small => {
            let d = small_davenport(&ctx, args.up_to_aut)?;
            let cert = davenport_certificate(&ctx, &d).with_elapsed(elapsed_ms(start));
            emit(&cert, &args.output)?;
            let expected = (ctx.p() + ctx.q() - 2) as usize;
            eprintln!(
                "d = {} (p+q-2 = {expected}), extremal {}",
                d.value,
                d.extremal.format(&ctx)
            );
            Ok(if d.value == expected {
                EXIT_VERIFIED
            } else {
                EXIT_FALSIFIED
            })
        }
        Which::Large => {
            let pair = standard_pair(&ctx);
            let witness = prodone_core::invariants::forma_s_construct(&ctx, pair.x, pair.y)?.sequence;
            let verdict = is_atom(&ctx, &witness)?;
            let mode = match args.mode {
                LargeModeArg::LowerWitness => LargeMode::LowerWitness,
                LargeModeArg::ExhaustiveAt2q => LargeMode::ExhaustiveAt2q,
                LargeModeArg::ExhaustiveFull => LargeMode::ExhaustiveFull,
            };
            if mode == LargeMode::LowerWitness {
                let cert = atom_certificate(&ctx, &witness, &verdict).with_elapsed(elapsed_ms(start));
                emit(&cert, &args.output)?;
                eprintln!("D >= {}: {}", witness.len(), witness.format(&ctx));
                return Ok(if verdict.atom { EXIT_VERIFIED } else { EXIT_FALSIFIED });
            }
            let opts = args.shard.options()?;
            let strata = large_davenport_strata(&ctx, mode);
            let two_q = 2 * ctx.q();
            let (at_2q, beyond): (Vec<Stratum>, Vec<Stratum>) = strata.into_iter().partition(|s| s.length == two_q);
            let (outcomes, done_a) = run_strata(&ctx, &at_2q, args.raw, &opts)?;
            let (beyond_outcomes, done_b) = run_strata(&ctx, &beyond, args.raw, &opts)?;
            finish_inverse(
                &ctx,
                InverseScope::Full,
                &outcomes,
                &beyond_outcomes,
                done_a && done_b,
                start,
                &args.output,
            )
        }
    }
}

fn finish_inverse(
    ctx: &GroupCtx,
    scope: InverseScope,
    outcomes: &[prodone_core::enumeration::SearchOutcome],
    beyond: &[prodone_core::enumeration::SearchOutcome],
    complete: bool,
    start: Instant,
    output: &Output,
) -> Result<i32> {
    if !complete {
        eprintln!("run interrupted; rerun with the same checkpoint options to resume");
        return Ok(EXIT_ERROR);
    }
    let report = InverseReport::from_outcomes(ctx, scope, outcomes);
    let forma = forma_s_enumerate(ctx);
    let cert = inverse_certificate(ctx, &report, &forma, beyond).with_elapsed(elapsed_ms(start));
    emit(&cert, output)?;
    let verified = cert.payload["verified"].as_bool() == Some(true);
    eprintln!(
        "N_f = {}, atoms found = {}, exceptions = {}, unverified = {}: {}",
        report.n_f,
        report.atom_count(),
        report.exceptions.len(),
        report.unverified.len(),
        if verified { "verified" } else { "NOT verified" }
    );
    Ok(if !report.unverified.is_empty() {
        EXIT_ERROR
    } else if verified {
        EXIT_VERIFIED
    } else {
        EXIT_FALSIFIED
    })
}

fn verify_inverse(args: InverseArgs) -> Result<i32> {
    let ctx = GroupCtx::new(args.group.group)?;
    let scope = match args.scope {
        ScopeArg::KLe2 => InverseScope::KLe2,
        ScopeArg::Full => InverseScope::Full,
    };
    let opts = args.shard.options()?;
    if opts.shard_index.is_some() {
        return Err(Error::Usage(
            "verify-inverse runs every shard; use `search` for a single shard".into(),
        ));
    }
    let start = Instant::now();
    let (outcomes, complete) = run_strata(&ctx, &scope.strata(&ctx), args.raw, &opts)?;
    finish_inverse(&ctx, scope, &outcomes, &[], complete, start, &args.output)
}

fn elasticity(args: ElasticityArgs) -> Result<i32> {
    let ctx = GroupCtx::new(args.group.group)?;
    let start = Instant::now();
    let pair = standard_pair(&ctx);
    let witness = elasticity_witness_for(&ctx, &pair, args.k)?;
    let d = 2 * ctx.q() as u64;
    let table = elasticity_calculator(d, args.k as u64 / 2)?;
    let extra = if args.uk {
        let pool = forma_s_enumerate(&ctx);
        let report = uk_bounded(
            &ctx,
            args.k,
            std::slice::from_ref(&witness),
            &pool,
            args.uk_budget,
            1_000_000,
        )?;
        let witnesses: Vec<Value> = report
            .witnesses
            .values()
            .map(|w| {
                json!({
                    "lengths": [w.left.len(), w.right.len()],
                    "left": w.left.iter().map(|s| s.format(&ctx)).collect::<Vec<_>>(),
                    "right": w.right.iter().map(|s| s.format(&ctx)).collect::<Vec<_>>(),
                })
            })
            .collect();
        eprintln!("U_{} contains {:?}", args.k, report.lengths());
        Some(json!({
            "lengths": report.lengths(),
            "products_examined": report.products_examined,
            "exhaustive": report.exhaustive,
            "lower_approximation": true,
            "witnesses": witnesses,
        }))
    } else {
        None
    };
    let verified = witness.verify(&ctx).is_ok();
    let cert = elasticity_certificate(&ctx, args.k, &witness, &table, extra).with_elapsed(elapsed_ms(start));
    emit(&cert, &args.output)?;
    let (a, b) = witness.lengths();
    eprintln!(
        "{} atoms = {} atoms; witness {}",
        a,
        b,
        if verified { "verified" } else { "FAILED" }
    );
    Ok(if verified { EXIT_VERIFIED } else { EXIT_FALSIFIED })
}

fn lemmas(args: LemmaArgs) -> Result<i32> {
    let ctx = GroupCtx::new(args.group.group)?;
    let selected: Vec<LemmaId> = if args.lemma == "all" {
        LemmaId::ALL.to_vec()
    } else {
        vec![args
            .lemma
            .parse()
            .map_err(|_| Error::Usage(format!("unknown lemma {:?}", args.lemma)))?]
    };
    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut code = EXIT_VERIFIED;
    let mut emit_one = |name: String, cert: Certificate| -> Result<()> {
        let holds = cert.payload["holds"].as_bool() == Some(true);
        eprintln!(
            "{name}: {} trials, {} without a hypothesis instance, {}",
            cert.payload["trials"],
            cert.payload["hypothesis_unmet"],
            if holds { "no counterexample" } else { "COUNTEREXAMPLE" }
        );
        if !holds {
            code = EXIT_FALSIFIED;
        }
        match &args.out_dir {
            Some(dir) => cert.write(&dir.join(format!("{name}.json"))),
            None => {
                out(&cert.to_pretty());
                Ok(())
            }
        }
    };
    let threads = thread_count();
    for lemma in selected {
        let start = Instant::now();
        if lemma == LemmaId::CyclicExtremal {
            let mode = match args.cyclic_mode {
                CyclicModeArg::Multiplicity => CyclicMode::Multiplicity,
                CyclicModeArg::Extremal => CyclicMode::Extremal,
            };
            for &n in &args.n {
                let report = check_cyclic_extremal(n, mode)?;
                let mode_name = if mode == CyclicMode::Extremal {
                    "extremal"
                } else {
                    "multiplicity"
                };
                let cert = lemma_certificate(&ctx, &report, json!({ "n": n, "mode": mode_name }))
                    .with_elapsed(elapsed_ms(start));
                emit_one(format!("{lemma}-n{n}"), cert)?;
            }
        } else {
            let report = run_lemma(&ctx, lemma, args.trials, args.seed, threads)?;
            let cert = lemma_certificate(&ctx, &report, json!({})).with_elapsed(elapsed_ms(start));
            emit_one(lemma.to_string(), cert)?;
        }
    }
    Ok(code)
}

fn check_cert(file: PathBuf) -> Result<i32> {
    let cert = Certificate::read(&file)?;
    let verdict = check_certificate(&cert)?;
    for note in &verdict.notes {
        eprintln!("note: {note}");
    }
    if verdict.ok() {
        out(&format!("{}: {} certificate verified\n", file.display(), cert.kind));
        Ok(EXIT_VERIFIED)
    } else {
        for f in &verdict.failures {
            eprintln!("failed: {f}");
        }
        out(&format!("{}: {} certificate REJECTED\n", file.display(), cert.kind));
        Ok(EXIT_FALSIFIED)
    }
}
