//! Slow reference implementations straight from the definitions, and
//! randomized or exhaustive checkers for the structural lemmas the search
//! relies on. None of this code goes through the subproduct DP except where a
//! checker measures the engine's own output.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::digest::mix64;
use crate::engine::{pi_set, AtomVerdict, SubproductTable, DEFAULT_STATE_CAP};
use crate::error::EngineError;
use crate::group::{ElemIdx, GroupCtx, IDENTITY};
use crate::product_set::ProductSet;
use crate::sequence::Sequence;

/// Longest sequence the permutation oracles accept.
pub const ORACLE_MAX_LEN: usize = 8;

/// Retry cap for hypothesis rejection sampling.
pub const HYPOTHESIS_RETRIES: u32 = 10_000;

/// Cayley table built from the faithful affine action `x ↦ s^a·x + b` on `Z_q`,
/// composing permutations rather than using the closed multiplication law.
pub fn cayley_oracle(ctx: &GroupCtx) -> Vec<ElemIdx> {
    let q = ctx.q() as usize;
    let perm = |g: ElemIdx| -> Vec<usize> {
        let e = ctx.element(g);
        let mult = ctx.s_pow(e.a) as usize;
        (0..q).map(|x| (mult * x + e.b as usize) % q).collect()
    };
    let perms: Vec<Vec<usize>> = ctx.elements().map(perm).collect();
    let n = ctx.order();
    let mut table = vec![0; n * n];
    for g in 0..n {
        for h in 0..n {
            // gh acts as "apply g, then h"
            let composed: Vec<usize> = (0..q).map(|x| perms[h][perms[g][x]]).collect();
            table[g * n + h] = perms
                .iter()
                .position(|p| *p == composed)
                .expect("the affine representation is faithful") as ElemIdx;
        }
    }
    table
}

fn next_permutation(terms: &mut [ElemIdx]) -> bool {
    if terms.len() < 2 {
        return false;
    }
    let mut i = terms.len() - 1;
    while i > 0 && terms[i - 1] >= terms[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = terms.len() - 1;
    while terms[j] <= terms[i - 1] {
        j -= 1;
    }
    terms.swap(i - 1, j);
    terms[i..].reverse();
    true
}

/// `π(S)` by multiplying out every distinct ordering.
pub fn naive_pi_set(ctx: &GroupCtx, seq: &Sequence) -> Result<ProductSet, EngineError> {
    if seq.len() > ORACLE_MAX_LEN {
        return Err(EngineError::OracleTooLong {
            len: seq.len(),
            max: ORACLE_MAX_LEN,
        });
    }
    let mut terms: Vec<ElemIdx> = seq.terms().collect();
    let mut out = ProductSet::empty(ctx);
    loop {
        out.insert(terms.iter().fold(IDENTITY, |acc, &g| ctx.mul(acc, g)));
        if !next_permutation(&mut terms) {
            break;
        }
    }
    Ok(out)
}

/// Every sub-multiset of `seq`, in odometer order.
pub fn sub_multisets(seq: &Sequence) -> Vec<Sequence> {
    let entries = seq.entries();
    let mut digits = vec![0u32; entries.len()];
    let mut out = Vec::new();
    loop {
        out.push(Sequence::from_counts(
            entries.iter().zip(&digits).map(|(&(g, _), &d)| (g, d)),
        ));
        let mut i = 0;
        loop {
            if i == entries.len() {
                return out;
            }
            if digits[i] < entries[i].1 {
                digits[i] += 1;
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Atom test by scanning every proper nonempty split with [`naive_pi_set`] on both sides.
pub fn naive_is_atom(ctx: &GroupCtx, seq: &Sequence) -> Result<AtomVerdict, EngineError> {
    if seq.is_empty() {
        return Err(EngineError::Empty);
    }
    let product_one = naive_pi_set(ctx, seq)?.contains(IDENTITY);
    if !product_one {
        return Ok(AtomVerdict {
            product_one,
            atom: false,
            witness: None,
        });
    }
    let mut best: Option<(usize, Vec<ElemIdx>, Sequence)> = None;
    for t in sub_multisets(seq) {
        if t.is_empty() || t.len() == seq.len() {
            continue;
        }
        let rest = seq.remove(&t).expect("sub-multiset");
        if naive_pi_set(ctx, &t)?.contains(IDENTITY) && naive_pi_set(ctx, &rest)?.contains(IDENTITY) {
            let key: Vec<ElemIdx> = t.terms().collect();
            let better = match &best {
                None => true,
                Some((l, c, _)) => (t.len(), &key) < (*l, c),
            };
            if better {
                best = Some((t.len(), key, t));
            }
        }
    }
    Ok(match best {
        None => AtomVerdict {
            product_one,
            atom: true,
            witness: None,
        },
        Some((_, _, t)) => {
            let rest = seq.remove(&t).expect("sub-multiset");
            AtomVerdict {
                product_one,
                atom: false,
                witness: Some((t, rest)),
            }
        }
    })
}

/// Which structural statement a checker exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LemmaId {
    /// `|A+B| ≥ min{q, |A|+|B|−1}` in a cyclic group of prime order.
    CauchyDavenport,
    /// Zero-sum free sequences over `C_n` have a term of multiplicity `≥ 2|S|−n+1`.
    CyclicExtremal,
    /// `|π(g·S)| ≥ min{q, |g·S|}` for `S` over `G'∖{1}` and `g ∉ G'`.
    /// Allowing `S` over all of `G∖{1}` breaks it: `π(τ·τ) = {τ²}`.
    PiWithOutsideTerm,
    /// `|π(g₁·g₂·S)| ≥ min{q, 2|S|+1}` for `S` over `G'∖{1}`, `g₁,g₂,g₁g₂ ∉ G'`.
    PiWithTwoOutsideTerms,
    /// `|π(S)| ≥ min{p, |S|}` when `supp(S)` generates `G`.
    PiOfGeneratingSequence,
    /// `|S| ≥ q+2p−3` forces a product-one subsequence of length at most `q`.
    ShortProductOneSubsequence,
    /// Lower bounds on `|π(T_1)…π(T_r)|` for conjugation-closed product sets.
    ProductOfProductSets,
    /// `|T| ≥ q` with `π(T) ∩ G' ≠ ∅` forces a product-one subsequence.
    CommutatorCosetProductOne,
}

impl LemmaId {
    pub const ALL: [LemmaId; 8] = [
        LemmaId::CauchyDavenport,
        LemmaId::CyclicExtremal,
        LemmaId::PiWithOutsideTerm,
        LemmaId::PiWithTwoOutsideTerms,
        LemmaId::PiOfGeneratingSequence,
        LemmaId::ShortProductOneSubsequence,
        LemmaId::ProductOfProductSets,
        LemmaId::CommutatorCosetProductOne,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            LemmaId::CauchyDavenport => "cauchy-davenport",
            LemmaId::CyclicExtremal => "cyclic-extremal",
            LemmaId::PiWithOutsideTerm => "pi-with-outside-term",
            LemmaId::PiWithTwoOutsideTerms => "pi-with-two-outside-terms",
            LemmaId::PiOfGeneratingSequence => "pi-of-generating-sequence",
            LemmaId::ShortProductOneSubsequence => "short-product-one-subsequence",
            LemmaId::ProductOfProductSets => "product-of-product-sets",
            LemmaId::CommutatorCosetProductOne => "commutator-coset-product-one",
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LemmaId {
    type Err = ();

    fn from_str(text: &str) -> Result<Self, ()> {
        LemmaId::ALL.into_iter().find(|l| l.name() == text).ok_or(())
    }
}

/// A falsifying instance: named inputs and measured quantities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub trial: u64,
    pub inputs: Vec<(String, String)>,
    pub measured: Vec<(String, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TrialOutcome {
    Held,
    /// No hypothesis-satisfying instance within the retry cap.
    HypothesisUnmet,
    Counterexample(Counterexample),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub lemma: LemmaId,
    pub seed: u64,
    /// Instances examined (random trials, or sequences visited for exhaustive checks).
    pub trials: u64,
    pub hypothesis_unmet: u64,
    pub counterexample: Option<Counterexample>,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }

    /// Folds per-trial outcomes in trial order; the first counterexample wins.
    pub fn from_outcomes<I: IntoIterator<Item = TrialOutcome>>(lemma: LemmaId, seed: u64, outcomes: I) -> Self {
        let mut report = LemmaReport {
            lemma,
            seed,
            trials: 0,
            hypothesis_unmet: 0,
            counterexample: None,
        };
        for outcome in outcomes {
            report.trials += 1;
            match outcome {
                TrialOutcome::Held => {}
                TrialOutcome::HypothesisUnmet => report.hypothesis_unmet += 1,
                TrialOutcome::Counterexample(c) => {
                    if report.counterexample.is_none() {
                        report.counterexample = Some(c);
                    }
                }
            }
        }
        report
    }
}

/// Deterministic per-trial generator derived from `(seed, trial)`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix64(seed ^ mix64(trial.wrapping_add(0x5851_f42d_4c95_7f2d))))
}

fn set_text(set: &ProductSet) -> String {
    let items: Vec<String> = set.iter().map(|g| format!("{g}")).collect();
    format!("{{{}}}", items.join(","))
}

/// Single Cauchy–Davenport instance inside `G' ≅ C_q`. `a` and `b` are residues mod `q`.
pub fn check_cauchy_davenport(ctx: &GroupCtx, a: &BTreeSet<u32>, b: &BTreeSet<u32>) -> Option<Counterexample> {
    let q = ctx.q();
    let to_set = |s: &BTreeSet<u32>| ProductSet::from_elements(ctx, s.iter().map(|&r| (r % q) as ElemIdx));
    let (sa, sb) = (to_set(a), to_set(b));
    let ab = sa.product(ctx, &sb).len();
    let bound = (q as usize).min(sa.len() + sb.len() - 1);
    (ab < bound).then(|| Counterexample {
        trial: 0,
        inputs: vec![("A".into(), set_text(&sa)), ("B".into(), set_text(&sb))],
        measured: vec![("|AB|".into(), ab as i64), ("bound".into(), bound as i64)],
    })
}

fn random_nonempty_subset(rng: &mut ChaCha8Rng, n: u32) -> BTreeSet<u32> {
    loop {
        let set: BTreeSet<u32> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        if !set.is_empty() {
            return set;
        }
    }
}

fn random_from(rng: &mut ChaCha8Rng, pool: &[ElemIdx], len: usize) -> Sequence {
    Sequence::from_terms((0..len).map(|_| pool[rng.gen_range(0..pool.len())]))
}

fn pi_len(ctx: &GroupCtx, seq: &Sequence) -> Result<usize, EngineError> {
    Ok(pi_set(ctx, seq)?.len())
}

fn held_or(trial: u64, violated: bool, inputs: Vec<(String, String)>, measured: Vec<(String, i64)>) -> TrialOutcome {
    if violated {
        TrialOutcome::Counterexample(Counterexample {
            trial,
            inputs,
            measured,
        })
    } else {
        TrialOutcome::Held
    }
}

/// Least-length nonempty product-one sub-multiset, if any.
pub fn shortest_product_one(ctx: &GroupCtx, seq: &Sequence) -> Result<Option<Sequence>, EngineError> {
    let table = SubproductTable::build(ctx, seq, DEFAULT_STATE_CAP)?;
    let mut best: Option<(usize, usize)> = None;
    for idx in 1..table.states() {
        if table.product_one(idx) {
            let len = table.digits(idx).iter().map(|&d| d as usize).sum();
            if best.is_none_or(|(l, _)| len < l) {
                best = Some((len, idx));
            }
        }
    }
    Ok(best.map(|(_, idx)| table.sequence_at(idx)))
}

/// Runs one randomized trial. Identical `(seed, trial)` always gives the same outcome.
pub fn run_trial(ctx: &GroupCtx, lemma: LemmaId, seed: u64, trial: u64) -> Result<TrialOutcome, EngineError> {
    let mut rng = trial_rng(seed, trial);
    let (p, q) = (ctx.p() as usize, ctx.q() as usize);
    let nonidentity: Vec<ElemIdx> = ctx.elements().skip(1).collect();
    let commutator: Vec<ElemIdx> = (1..q as ElemIdx).collect();
    let outside: Vec<ElemIdx> = ctx.elements().filter(|&g| !ctx.in_commutator(g)).collect();
    let everything: Vec<ElemIdx> = ctx.elements().collect();
    let fmt_seq = |s: &Sequence| s.format(ctx);

    Ok(match lemma {
        LemmaId::CauchyDavenport => {
            let a = random_nonempty_subset(&mut rng, q as u32);
            let b = random_nonempty_subset(&mut rng, q as u32);
            match check_cauchy_davenport(ctx, &a, &b) {
                None => TrialOutcome::Held,
                Some(mut c) => {
                    c.trial = trial;
                    TrialOutcome::Counterexample(c)
                }
            }
        }
        LemmaId::CyclicExtremal => {
            return Err(EngineError::Precondition(
                "cyclic-extremal is exhaustive; use check_cyclic_extremal",
            ))
        }
        LemmaId::PiWithOutsideTerm => {
            let len = rng.gen_range(0..=q + 2);
            let s = random_from(&mut rng, &commutator, len);
            let g = outside[rng.gen_range(0..outside.len())];
            let gs = s.concat(&Sequence::power(g, 1));
            let size = pi_len(ctx, &gs)?;
            let bound = q.min(gs.len());
            held_or(
                trial,
                size < bound,
                vec![("g".into(), format!("{}", ctx.element(g))), ("S".into(), fmt_seq(&s))],
                vec![("|pi(g.S)|".into(), size as i64), ("bound".into(), bound as i64)],
            )
        }
        LemmaId::PiWithTwoOutsideTerms => {
            let mut pair = None;
            for _ in 0..HYPOTHESIS_RETRIES {
                let g1 = outside[rng.gen_range(0..outside.len())];
                let g2 = outside[rng.gen_range(0..outside.len())];
                if !ctx.in_commutator(ctx.mul(g1, g2)) {
                    pair = Some((g1, g2));
                    break;
                }
            }
            let Some((g1, g2)) = pair else {
                return Ok(TrialOutcome::HypothesisUnmet);
            };
            let len = rng.gen_range(0..=q);
            let s = random_from(&mut rng, &commutator, len);
            let full = s.concat(&Sequence::from_terms([g1, g2]));
            let size = pi_len(ctx, &full)?;
            let bound = q.min(2 * s.len() + 1);
            held_or(
                trial,
                size < bound,
                vec![
                    ("g1".into(), format!("{}", ctx.element(g1))),
                    ("g2".into(), format!("{}", ctx.element(g2))),
                    ("S".into(), fmt_seq(&s)),
                ],
                vec![("|pi(g1.g2.S)|".into(), size as i64), ("bound".into(), bound as i64)],
            )
        }
        LemmaId::PiOfGeneratingSequence => {
            let mut found = None;
            for _ in 0..HYPOTHESIS_RETRIES {
                let len = rng.gen_range(1..=q + 1);
                let s = random_from(&mut rng, &nonidentity, len);
                let gens: Vec<ElemIdx> = s.support().collect();
                if ctx.subgroup_generated(&gens).len() == ctx.order() {
                    found = Some(s);
                    break;
                }
            }
            let Some(s) = found else {
                return Ok(TrialOutcome::HypothesisUnmet);
            };
            let size = pi_len(ctx, &s)?;
            let bound = p.min(s.len());
            held_or(
                trial,
                size < bound,
                vec![("S".into(), fmt_seq(&s))],
                vec![("|pi(S)|".into(), size as i64), ("bound".into(), bound as i64)],
            )
        }
        LemmaId::ShortProductOneSubsequence => {
            let min_len = q + 2 * p - 3;
            let len = rng.gen_range(min_len..=min_len + 2);
            let s = random_from(&mut rng, &everything, len);
            let found = shortest_product_one(ctx, &s)?;
            let verified = found
                .as_ref()
                .map(|t| {
                    t.divides(&s)
                        && !t.is_empty()
                        && t.len() <= q
                        && pi_set(ctx, t).is_ok_and(|pi| pi.contains(IDENTITY))
                })
                .unwrap_or(false);
            held_or(
                trial,
                !verified,
                vec![("S".into(), fmt_seq(&s))],
                vec![(
                    "shortest product-one length".into(),
                    found.map_or(-1, |t| t.len() as i64),
                )],
            )
        }
        LemmaId::ProductOfProductSets => product_of_product_sets_trial(ctx, &mut rng, trial, &nonidentity)?,
        LemmaId::CommutatorCosetProductOne => {
            let len = rng.gen_range(q..=q + 3);
            let mut terms: Vec<ElemIdx> = (0..len - 1)
                .map(|_| everything[rng.gen_range(0..everything.len())])
                .collect();
            // choose the last term so the τ-degrees sum to 0 mod p, i.e. π(T) ⊆ G'
            let deg: u32 = terms.iter().map(|&g| ctx.degree(g)).sum::<u32>() % p as u32;
            let last_deg = (p as u32 - deg) % p as u32;
            let b = rng.gen_range(0..q as u32);
            terms.push(ctx.index(crate::group::Element::new(last_deg, b)));
            let t = Sequence::from_terms(terms);
            let found = shortest_product_one(ctx, &t)?;
            let verified = found
                .as_ref()
                .map(|u| u.divides(&t) && pi_set(ctx, u).is_ok_and(|pi| pi.contains(IDENTITY)))
                .unwrap_or(false);
            held_or(
                trial,
                !verified,
                vec![("T".into(), fmt_seq(&t))],
                vec![("found".into(), verified as i64)],
            )
        }
    })
}

fn product_of_product_sets_trial(
    ctx: &GroupCtx,
    rng: &mut ChaCha8Rng,
    trial: u64,
    nonidentity: &[ElemIdx],
) -> Result<TrialOutcome, EngineError> {
    let q = ctx.q() as usize;
    let r = rng.gen_range(1..=3usize);
    let mut factors: Vec<(Sequence, ProductSet)> = Vec::with_capacity(r);
    for i in 0..r {
        let must_be_closed = i + 1 < r;
        let mut chosen = None;
        for _ in 0..HYPOTHESIS_RETRIES {
            let len = rng.gen_range(2..=6usize);
            let t = random_from(rng, nonidentity, len);
            let pi = pi_set(ctx, &t)?;
            // Z(G) = {1}, so "meets G∖Z(G)" means π(T) ≠ {1}
            let meets_noncentral = pi.iter().any(|g| g != IDENTITY);
            if !meets_noncentral || pi.len() < t.len() {
                continue;
            }
            if must_be_closed && pi.conjugation_closure(ctx) != pi {
                continue;
            }
            chosen = Some((t, pi));
            break;
        }
        match chosen {
            Some(f) => factors.push(f),
            None => return Ok(TrialOutcome::HypothesisUnmet),
        }
    }
    let mut product = factors[0].1.clone();
    for (_, pi) in &factors[1..] {
        product = product.product(ctx, pi);
    }
    let size = product.len();
    let sum_pi: usize = factors.iter().map(|(_, pi)| pi.len()).sum();
    let sum_len: usize = factors.iter().map(|(t, _)| t.len()).sum();
    let first_bound = (q - 1).min(sum_pi);
    let violated = size < first_bound || (sum_len > q && size != q);
    let inputs = factors
        .iter()
        .enumerate()
        .map(|(i, (t, _))| (format!("T{}", i + 1), t.format(ctx)))
        .collect();
    Ok(held_or(
        trial,
        violated,
        inputs,
        vec![
            ("|product|".into(), size as i64),
            ("min(q-1, sum |pi(T_i)|)".into(), first_bound as i64),
            ("sum |T_i|".into(), sum_len as i64),
        ],
    ))
}

/// Sequential randomized run; see [`run_trial`].
pub fn check_lemma(ctx: &GroupCtx, lemma: LemmaId, trials: u64, seed: u64) -> Result<LemmaReport, EngineError> {
    let mut outcomes = Vec::with_capacity(trials as usize);
    for trial in 0..trials {
        outcomes.push(run_trial(ctx, lemma, seed, trial)?);
    }
    Ok(LemmaReport::from_outcomes(lemma, seed, outcomes))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CyclicMode {
    /// The multiplicity bound and the shape at length `n−1`.
    Multiplicity,
    /// Additionally `D(C_n) = n`: `g^{[n]}` is minimal and no zero-sum free sequence of length `n` exists.
    Extremal,
}

/// Exhaustive check over `C_n` (odd `3 ≤ n ≤ 63`) of every zero-sum free sequence.
pub fn check_cyclic_extremal(n: u32, mode: CyclicMode) -> Result<LemmaReport, EngineError> {
    if n < 3 || n.is_multiple_of(2) || n > 63 {
        return Err(EngineError::Precondition("n must be odd with 3 <= n <= 63"));
    }
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let rotate = |set: u64, g: u32| -> u64 { ((set << g) | (set >> (n - g))) & full };
    let mut visited = 0u64;
    let mut counterexample: Option<Counterexample> = None;
    let mut longest = 0usize;
    // DFS over nondecreasing sequences of nonzero residues; `sums` holds the
    // subset sums including the empty one.
    let mut stack: Vec<(Vec<u32>, u64)> = vec![(Vec::new(), 1)];
    while let Some((seq, sums)) = stack.pop() {
        visited += 1;
        let len = seq.len();
        longest = longest.max(len);
        if 2 * len > n as usize && counterexample.is_none() {
            let mut counts = vec![0usize; n as usize];
            for &g in &seq {
                counts[g as usize] += 1;
            }
            let max_mult = *counts.iter().max().unwrap();
            let bound = 2 * len as i64 - n as i64 + 1;
            let single_support = counts.iter().filter(|&&c| c > 0).count() == 1;
            if (max_mult as i64) < bound || (len == n as usize - 1 && !single_support) {
                counterexample = Some(Counterexample {
                    trial: visited,
                    inputs: vec![("n".into(), format!("{n}")), ("S".into(), format!("{seq:?}"))],
                    measured: vec![("max multiplicity".into(), max_mult as i64), ("bound".into(), bound)],
                });
            }
        }
        let start = seq.last().copied().unwrap_or(1);
        for g in start..n {
            let shifted = rotate(sums, g);
            // zero-sum free after adding g iff -g is not already a subset sum
            if sums & (1 << ((n - g) % n)) != 0 {
                continue;
            }
            let mut next = seq.clone();
            next.push(g);
            stack.push((next, sums | shifted));
        }
    }
    if mode == CyclicMode::Extremal && counterexample.is_none() {
        // longest zero-sum free length is n-1, so every atom has length <= n
        let g1_min = naive_cyclic_minimal(n, 1, n as usize);
        if longest != n as usize - 1 || !g1_min {
            counterexample = Some(Counterexample {
                trial: visited,
                inputs: vec![("n".into(), format!("{n}"))],
                measured: vec![
                    ("longest zero-sum free".into(), longest as i64),
                    ("1^[n] minimal".into(), g1_min as i64),
                ],
            });
        }
    }
    Ok(LemmaReport {
        lemma: LemmaId::CyclicExtremal,
        seed: 0,
        trials: visited,
        hypothesis_unmet: 0,
        counterexample,
    })
}

/// Whether `g^{[k]}` over `C_n` is a minimal zero-sum sequence.
fn naive_cyclic_minimal(n: u32, g: u32, k: usize) -> bool {
    (g as usize * k).is_multiple_of(n as usize) && (1..k).all(|j| !(g as usize * j).is_multiple_of(n as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{is_atom, pi_set};
    use crate::group::GroupParams;

    fn g372() -> GroupCtx {
        GroupCtx::new(GroupParams::new(3, 7, 2)).unwrap()
    }

    #[test]
    fn cayley_oracle_agrees() {
        for params in [
            GroupParams::new(3, 7, 2),
            GroupParams::new(3, 13, 3),
            GroupParams::new(5, 11, 3),
        ] {
            let ctx = GroupCtx::new(params).unwrap();
            let table = cayley_oracle(&ctx);
            let n = ctx.order();
            for g in ctx.elements() {
                for h in ctx.elements() {
                    assert_eq!(table[g as usize * n + h as usize], ctx.mul(g, h));
                }
            }
        }
    }

    #[test]
    fn naive_pi_examples() {
        let ctx = g372();
        let xy = Sequence::parse(&ctx, "(1,0),(0,1)").unwrap();
        assert_eq!(naive_pi_set(&ctx, &xy).unwrap(), pi_set(&ctx, &xy).unwrap());
        let abelian = Sequence::parse(&ctx, "(0,1),(0,2),(0,4)").unwrap();
        assert_eq!(
            naive_pi_set(&ctx, &abelian).unwrap().iter().collect::<Vec<_>>(),
            vec![IDENTITY]
        );
        let long = Sequence::from_terms([1; 9]);
        assert!(matches!(
            naive_pi_set(&ctx, &long),
            Err(EngineError::OracleTooLong { .. })
        ));
    }

    #[test]
    fn outside_term_bound_needs_commutator_support() {
        let ctx = g372();
        let tt = Sequence::parse(&ctx, "(1,0),(1,0)").unwrap();
        assert_eq!(pi_set(&ctx, &tt).unwrap().len(), 1);
        let ok = Sequence::parse(&ctx, "(1,0),(0,1),(0,1)").unwrap();
        assert!(pi_set(&ctx, &ok).unwrap().len() >= 3);
    }

    #[test]
    fn naive_atom_examples() {
        let ctx = g372();
        let pair = Sequence::parse(&ctx, "(1,0),(2,0)").unwrap();
        assert!(naive_is_atom(&ctx, &pair).unwrap().atom);
        let doubled = pair.concat(&pair);
        let v = naive_is_atom(&ctx, &doubled).unwrap();
        assert!(v.product_one && !v.atom);
        assert_eq!(v, is_atom(&ctx, &doubled).unwrap());
    }

    #[test]
    fn cauchy_davenport_examples() {
        let ctx = g372();
        let s = |v: &[u32]| v.iter().copied().collect::<BTreeSet<u32>>();
        assert!(check_cauchy_davenport(&ctx, &s(&[0]), &s(&[0])).is_none());
        let a = s(&[0, 1]);
        let pa = ProductSet::from_elements(&ctx, [0, 1]);
        assert_eq!(pa.product(&ctx, &pa).len(), 3);
        assert!(check_cauchy_davenport(&ctx, &a, &a).is_none());
        let all = s(&[0, 1, 2, 3, 4, 5, 6]);
        assert!(check_cauchy_davenport(&ctx, &all, &all).is_none());
    }

    #[test]
    fn product_set_lemma_examples() {
        let ctx = g372();
        // |π(g)| = 1 for S empty and g = (1,0)
        assert_eq!(pi_set(&ctx, &Sequence::parse(&ctx, "(1,0)").unwrap()).unwrap().len(), 1);
        let five = Sequence::parse(&ctx, "(0,1)^3,(1,0)^2").unwrap();
        assert_eq!(pi_set(&ctx, &five).unwrap().len(), 7);
        let xy = Sequence::parse(&ctx, "(1,0),(0,1)").unwrap();
        assert_eq!(pi_set(&ctx, &xy).unwrap().len(), 2);
    }

    #[test]
    fn cyclic_examples() {
        let r = check_cyclic_extremal(5, CyclicMode::Extremal).unwrap();
        assert!(r.holds(), "{r:?}");
        let r = check_cyclic_extremal(7, CyclicMode::Multiplicity).unwrap();
        assert!(r.holds());
        assert!(naive_cyclic_minimal(5, 1, 5));
        assert!(!naive_cyclic_minimal(5, 1, 4));
        assert!(check_cyclic_extremal(8, CyclicMode::Extremal).is_err());
    }

    #[test]
    fn subsequence_lemma_examples() {
        let ctx = g372();
        let y7 = Sequence::parse(&ctx, "(0,1)^7").unwrap();
        assert_eq!(shortest_product_one(&ctx, &y7).unwrap(), Some(y7.clone()));
        let r = check_lemma(&ctx, LemmaId::ShortProductOneSubsequence, 20, 1).unwrap();
        assert!(r.holds());
        let r = check_lemma(&ctx, LemmaId::CommutatorCosetProductOne, 20, 1).unwrap();
        assert!(r.holds());
    }

    #[test]
    fn trials_are_reproducible() {
        let ctx = g372();
        for lemma in [LemmaId::PiWithTwoOutsideTerms, LemmaId::ProductOfProductSets] {
            let a = check_lemma(&ctx, lemma, 30, 99).unwrap();
            let b = check_lemma(&ctx, lemma, 30, 99).unwrap();
            assert_eq!(a, b);
            assert!(a.holds(), "{a:?}");
        }
    }

    #[test]
    fn lemma_names_round_trip() {
        for lemma in LemmaId::ALL {
            assert_eq!(lemma.name().parse::<LemmaId>(), Ok(lemma));
        }
    }
}
