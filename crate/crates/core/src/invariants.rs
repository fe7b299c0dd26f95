//! Davenport constants, the length-`2q` atoms, and elasticity witnesses.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::engine::{classify, is_atom, length_set_bounded};
use crate::enumeration::{atom_search, orbit_minima, SearchMode, SearchOutcome, Stratum};
use crate::error::{EngineError, GroupError};
use crate::group::{ElemIdx, Element, GeneratorPair, GroupCtx, IDENTITY};
use crate::product_set::{shift_into, words_for};
use crate::sequence::Sequence;

/// Outcome of the exhaustive product-one free search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallDavenport {
    /// `d(G)`, the maximal length of a product-one free sequence.
    pub value: usize,
    /// The first product-one free sequence of maximal length found.
    pub extremal: Sequence,
    /// Product-one free sequences visited, indexed by length.
    pub by_length: Vec<u64>,
    /// Whether the search was restricted to orbit-minimal least terms.
    pub up_to_aut: bool,
}

impl SmallDavenport {
    pub fn nodes(&self) -> u64 {
        self.by_length.iter().sum()
    }
}

/// DP over sub-multisets with the newest term as the most significant digit,
/// so extending the sequence appends a layer and backtracking truncates it.
struct Layered<'a> {
    ctx: &'a GroupCtx,
    words: usize,
    data: Vec<u64>,
    /// `(element, multiplicity, stride)` per support element, oldest first.
    digits: Vec<(ElemIdx, u32, usize)>,
    /// `Π₀(S)`: union of `π(T)` over all `T | S`, including `T` empty.
    unions: Vec<Vec<u64>>,
}

impl<'a> Layered<'a> {
    fn new(ctx: &'a GroupCtx) -> Self {
        let words = words_for(ctx.order());
        let mut data = vec![0u64; words];
        data[0] = 1 << IDENTITY;
        Self {
            ctx,
            words,
            data: data.clone(),
            digits: Vec::new(),
            unions: vec![data],
        }
    }

    fn states(&self) -> usize {
        self.data.len() / self.words
    }

    fn union(&self) -> &[u64] {
        self.unions.last().expect("root union")
    }

    fn union_contains(&self, g: ElemIdx) -> bool {
        self.union()[g as usize / 64] >> (g % 64) & 1 == 1
    }

    /// Appends one copy of `g`, which must be `≥` every current term.
    fn push(&mut self, g: ElemIdx) -> Result<(), EngineError> {
        let old = self.states();
        let stride = match self.digits.last_mut() {
            Some((h, m, stride)) if *h == g => {
                *m += 1;
                *stride
            }
            _ => {
                self.digits.push((g, 1, old));
                old
            }
        };
        let layer = stride;
        if (old + layer) as u64 > crate::engine::DEFAULT_STATE_CAP {
            return Err(EngineError::TooWide {
                states: (old + layer) as u128,
                cap: crate::engine::DEFAULT_STATE_CAP,
            });
        }
        let w = self.words;
        self.data.resize((old + layer) * w, 0);
        let mut union = self.union().to_vec();
        for offset in 0..layer {
            let idx = old + offset;
            let (done, rest) = self.data.split_at_mut(idx * w);
            let dst = &mut rest[..w];
            // the new digit is positive for every state in the layer
            let src = (idx - stride) * w;
            shift_into(self.ctx, &done[src..src + w], g, dst);
            let mut rem = offset;
            for &(h, _, s) in self.digits[..self.digits.len() - 1].iter().rev() {
                let d = rem / s;
                rem %= s;
                if d > 0 {
                    let src = (idx - s) * w;
                    shift_into(self.ctx, &done[src..src + w], h, dst);
                }
            }
            for (u, &x) in union.iter_mut().zip(dst.iter()) {
                *u |= x;
            }
        }
        self.unions.push(union);
        Ok(())
    }

    fn pop(&mut self) {
        let last = self.digits.len() - 1;
        let (_, m, stride) = self.digits[last];
        let new_states = self.states() - stride;
        if m == 1 {
            self.digits.pop();
        } else {
            self.digits[last].1 -= 1;
        }
        self.data.truncate(new_states * self.words);
        self.unions.pop();
    }
}

/// `d(G)` by depth-first search over nondecreasing sequences of non-identity
/// terms. `S·g` is product-one free iff `S` is and `g⁻¹ ∉ Π₀(S)`, so subtrees
/// below a product-one prefix are never entered. With `up_to_aut` the least
/// term is restricted to orbit minima of `Aut(G)`.
pub fn small_davenport(ctx: &GroupCtx, up_to_aut: bool) -> Result<SmallDavenport, EngineError> {
    let minima = if up_to_aut {
        orbit_minima(ctx, &ctx.automorphisms())
    } else {
        ctx.elements().collect()
    };
    let n = ctx.order() as ElemIdx;
    let mut table = Layered::new(ctx);
    let mut terms: Vec<ElemIdx> = Vec::new();
    let mut by_length: Vec<u64> = vec![1];
    let mut best = Sequence::empty();
    // frames hold the next candidate term to try at each depth
    let mut next: Vec<ElemIdx> = vec![1];
    while let Some(&candidate) = next.last() {
        if candidate >= n {
            next.pop();
            if terms.pop().is_some() {
                table.pop();
            }
            continue;
        }
        *next.last_mut().unwrap() += 1;
        if terms.is_empty() && !minima.contains(&candidate) {
            continue;
        }
        if table.union_contains(ctx.inv(candidate)) {
            continue;
        }
        table.push(candidate)?;
        terms.push(candidate);
        if by_length.len() <= terms.len() {
            by_length.push(0);
            best = Sequence::from_terms(terms.iter().copied());
        }
        by_length[terms.len()] += 1;
        next.push(candidate);
    }
    Ok(SmallDavenport {
        value: best.len(),
        extremal: best,
        by_length,
        up_to_aut,
    })
}

/// The length-`2q` atom `y^{[2q−2]}·x·x^{p−1}y^{s^{p−1}+1}` for a generator pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormaS {
    pub pair: GeneratorPair,
    pub sequence: Sequence,
}

impl FormaS {
    /// `x^{p−1}y^{s^{p−1}+1}`.
    pub fn closing_term(ctx: &GroupCtx, pair: &GeneratorPair) -> ElemIdx {
        let (p, q) = (ctx.p(), ctx.q());
        let exponent = (crate::group::modpow(pair.s_eff, p - 1, q) + 1) as i64;
        ctx.mul(ctx.power(pair.x, p as i64 - 1), ctx.power(pair.y, exponent))
    }
}

pub fn forma_s_construct(ctx: &GroupCtx, x: ElemIdx, y: ElemIdx) -> Result<FormaS, GroupError> {
    let pair = ctx.generator_pair(x, y)?;
    let q = ctx.q();
    let sequence = Sequence::from_counts([(pair.y, 2 * q - 2), (pair.x, 1), (FormaS::closing_term(ctx, &pair), 1)]);
    Ok(FormaS { pair, sequence })
}

/// Distinct multisets over all generator pairs, sorted.
pub fn forma_s_enumerate(ctx: &GroupCtx) -> Vec<Sequence> {
    let set: BTreeSet<Sequence> = ctx
        .generator_pairs()
        .iter()
        .map(|pair| {
            forma_s_construct(ctx, pair.x, pair.y)
                .expect("pairs are valid")
                .sequence
        })
        .collect();
    set.into_iter().collect()
}

/// The pair `(τ, α)`.
pub fn standard_pair(ctx: &GroupCtx) -> GeneratorPair {
    ctx.generator_pair(ctx.index(Element::new(1, 0)), ctx.index(Element::new(0, 1)))
        .expect("τ and α generate")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LargeMode {
    LowerWitness,
    ExhaustiveAt2q,
    ExhaustiveFull,
}

/// Strata searched by a mode: `(length, k)` for every `k`.
pub fn large_davenport_strata(ctx: &GroupCtx, mode: LargeMode) -> Vec<Stratum> {
    let two_q = 2 * ctx.q();
    let lengths: &[u32] = match mode {
        LargeMode::LowerWitness => &[],
        LargeMode::ExhaustiveAt2q => &[two_q],
        LargeMode::ExhaustiveFull => &[two_q, two_q + 1],
    };
    lengths
        .iter()
        .flat_map(|&len| (0..=len).map(move |k| Stratum::atoms(len, Some(k))))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LargeDavenport {
    pub mode: LargeMode,
    /// A verified atom of length `2q`.
    pub witness: Sequence,
    pub outcomes: Vec<SearchOutcome>,
}

impl LargeDavenport {
    /// `2q` when the witness is an atom and nothing longer was found.
    pub fn lower_bound(&self) -> usize {
        self.witness.len()
    }

    pub fn longest_atom_found(&self) -> Option<usize> {
        self.outcomes
            .iter()
            .flat_map(|o| o.atoms.iter().map(|(a, _)| a.len()))
            .max()
    }

    pub fn unverified(&self) -> u64 {
        self.outcomes.iter().map(|o| o.counters.unverified).sum()
    }
}

/// Single-worker large Davenport run; the `prodone` crate shards the same strata.
pub fn large_davenport(ctx: &GroupCtx, mode: LargeMode) -> Result<LargeDavenport, EngineError> {
    let pair = standard_pair(ctx);
    let witness = forma_s_construct(ctx, pair.x, pair.y)
        .map_err(|_| EngineError::Precondition("no generator pair"))?
        .sequence;
    if !is_atom(ctx, &witness)?.atom {
        return Err(EngineError::Precondition("constructed sequence is not an atom"));
    }
    let outcomes = large_davenport_strata(ctx, mode)
        .into_iter()
        .map(|stratum| atom_search(ctx, stratum, inverse_mode(ctx, &stratum)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LargeDavenport {
        mode,
        witness,
        outcomes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InverseScope {
    /// `v_{G∖G'}(S) ≤ 2`.
    KLe2,
    Full,
}

impl InverseScope {
    pub fn strata(&self, ctx: &GroupCtx) -> Vec<Stratum> {
        let two_q = 2 * ctx.q();
        let top = match self {
            InverseScope::KLe2 => 2,
            InverseScope::Full => two_q,
        };
        (0..=top).map(|k| Stratum::atoms(two_q, Some(k))).collect()
    }
}

/// Search mode for a stratum of the inverse check. Length-`2q` strata with
/// `k ≤ 2` hold the expected atoms and are walked raw so every one is counted;
/// the rest only need to be empty, which the orbit-pruned walk decides exactly.
pub fn inverse_mode(ctx: &GroupCtx, stratum: &Stratum) -> SearchMode {
    if stratum.length == 2 * ctx.q() && stratum.k.is_some_and(|k| k <= 2) {
        SearchMode::Raw
    } else {
        SearchMode::UpToAut
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumLine {
    pub k: u32,
    pub mode: SearchMode,
    pub candidates: u64,
    pub filtered: u64,
    pub checked: u64,
    pub atoms: u64,
    pub matched: u64,
    pub unverified: u64,
}

/// Per-atom consistency failures and atoms outside the expected family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseReport {
    pub scope: InverseScope,
    /// Number of distinct length-`2q` multisets of the expected form.
    pub n_f: usize,
    pub strata: Vec<StratumLine>,
    pub atoms: Vec<Sequence>,
    /// Atoms not of the expected form.
    pub exceptions: Vec<Sequence>,
    /// Atoms violating `v_H(A) ≤ q−1` for some subgroup `H` of order `p`.
    pub subgroup_violations: Vec<Sequence>,
    pub unverified: Vec<Sequence>,
}

impl InverseReport {
    pub fn atom_count(&self) -> u64 {
        self.strata.iter().map(|s| s.atoms).sum()
    }

    /// No exceptions, no unverified candidates, and the atom count equals `N_f`.
    pub fn verified(&self) -> bool {
        self.exceptions.is_empty()
            && self.subgroup_violations.is_empty()
            && self.unverified.is_empty()
            && self.atom_count() as usize == self.n_f
    }

    /// Builds the report from finished raw searches, one per stratum of `scope`.
    pub fn from_outcomes(ctx: &GroupCtx, scope: InverseScope, outcomes: &[SearchOutcome]) -> Self {
        let forma: BTreeSet<Sequence> = forma_s_enumerate(ctx).into_iter().collect();
        let subgroups = order_p_subgroups(ctx);
        let q = ctx.q() as usize;
        let mut report = InverseReport {
            scope,
            n_f: forma.len(),
            strata: Vec::new(),
            atoms: Vec::new(),
            exceptions: Vec::new(),
            subgroup_violations: Vec::new(),
            unverified: Vec::new(),
        };
        for o in outcomes {
            let mut matched = 0;
            for (a, _) in &o.atoms {
                if forma.contains(a) {
                    matched += 1;
                } else {
                    report.exceptions.push(a.clone());
                }
                if subgroups.iter().any(|h| a.count_where(|g| h.contains(&g)) > q - 1) {
                    report.subgroup_violations.push(a.clone());
                }
                report.atoms.push(a.clone());
            }
            report.unverified.extend(o.unverified.iter().cloned());
            let c = &o.counters;
            report.strata.push(StratumLine {
                k: o.stratum.k.unwrap_or(0),
                mode: o.mode,
                candidates: o.candidates,
                filtered: c.filtered_residue + c.filtered_orbit,
                checked: c.checked,
                atoms: c.atoms,
                matched,
                unverified: c.unverified,
            });
        }
        report
    }
}

/// The `q` subgroups of order `p`, as element sets.
pub fn order_p_subgroups(ctx: &GroupCtx) -> Vec<BTreeSet<ElemIdx>> {
    let set: BTreeSet<BTreeSet<ElemIdx>> = ctx
        .elements()
        .filter(|&g| !ctx.in_commutator(g))
        .map(|g| ctx.subgroup_generated(&[g]))
        .collect();
    set.into_iter().collect()
}

pub fn verify_inverse_theorem(ctx: &GroupCtx, scope: InverseScope) -> Result<InverseReport, EngineError> {
    let outcomes = scope
        .strata(ctx)
        .into_iter()
        .map(|s| atom_search(ctx, s, inverse_mode(ctx, &s)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(InverseReport::from_outcomes(ctx, scope, &outcomes))
}

/// Two factorizations of the same multiset into atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElasticityWitness {
    pub left: Vec<Sequence>,
    pub right: Vec<Sequence>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessError {
    NotAtom(Sequence),
    ProductsDiffer,
    Engine(EngineError),
}

impl ElasticityWitness {
    pub fn lengths(&self) -> (usize, usize) {
        (self.left.len(), self.right.len())
    }

    pub fn product(&self) -> Sequence {
        self.left.iter().fold(Sequence::empty(), |acc, s| acc.concat(s))
    }

    /// Re-sums both sides and re-checks every factor from scratch.
    pub fn verify(&self, ctx: &GroupCtx) -> Result<(), WitnessError> {
        let right = self.right.iter().fold(Sequence::empty(), |acc, s| acc.concat(s));
        if self.product() != right {
            return Err(WitnessError::ProductsDiffer);
        }
        for factor in self.left.iter().chain(&self.right) {
            if factor.is_empty() || !is_atom(ctx, factor).map_err(WitnessError::Engine)?.atom {
                return Err(WitnessError::NotAtom(factor.clone()));
            }
        }
        Ok(())
    }

    /// Side-by-side concatenation.
    pub fn join(&self, other: &ElasticityWitness) -> ElasticityWitness {
        ElasticityWitness {
            left: self.left.iter().chain(&other.left).cloned().collect(),
            right: self.right.iter().chain(&other.right).cloned().collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhoKind {
    /// `S·S^{(−1)}` against `2q` inverse pairs.
    Rho2,
    /// Three atoms against `2q+2`.
    Rho3,
}

pub fn build_rho_witness(ctx: &GroupCtx, pair: &GeneratorPair, kind: RhoKind) -> ElasticityWitness {
    let (p, q) = (ctx.p(), ctx.q());
    let x = pair.x;
    let y = pair.y;
    let s = pair.s_eff as i64;
    let xi = ctx.power(x, p as i64 - 1);
    let yi = ctx.inv(y);
    let xy = |a: ElemIdx, e: i64| ctx.mul(a, ctx.power(y, e));
    let s1 = Sequence::from_counts([(y, 2 * q - 2), (x, 1), (FormaS::closing_term(ctx, pair), 1)]);
    match kind {
        RhoKind::Rho2 => {
            let inverse = s1.inverse(ctx);
            let pairs = s1.terms().map(|g| Sequence::from_terms([g, ctx.inv(g)])).collect();
            ElasticityWitness {
                left: vec![s1, inverse],
                right: pairs,
            }
        }
        RhoKind::Rho3 => {
            let sp = crate::group::modpow(pair.s_eff, p - 1, q) as i64;
            let s2 = Sequence::from_counts([(yi, 2 * q - 2), (xy(xi, -1), 1), (xy(x, -1), 1)]);
            let s3 = Sequence::from_terms([xi, xy(x, -s - 1), xy(x, s), xy(xi, sp)]);
            let mut right = vec![
                Sequence::from_terms([x, xi]),
                Sequence::from_terms([xy(xi, sp + 1), xy(x, -s - 1)]),
                Sequence::from_terms([xy(xi, -1), xy(x, s)]),
                Sequence::from_terms([xy(xi, sp), xy(x, -1)]),
            ];
            right.extend((0..2 * q - 2).map(|_| Sequence::from_terms([y, yi])));
            ElasticityWitness {
                left: vec![s1, s2, s3],
                right,
            }
        }
    }
}

/// A witness for `U_k`: lengths `(k, kq)` for even `k`, `(k, (k−1)q+2)` for odd `k ≥ 3`.
pub fn elasticity_witness_for(ctx: &GroupCtx, pair: &GeneratorPair, k: u32) -> Result<ElasticityWitness, EngineError> {
    if k == 0 {
        return Err(EngineError::Precondition("k must be positive"));
    }
    if k == 1 {
        let s = build_rho_witness(ctx, pair, RhoKind::Rho2).left.swap_remove(0);
        return Ok(ElasticityWitness {
            left: vec![s.clone()],
            right: vec![s],
        });
    }
    let rho2 = build_rho_witness(ctx, pair, RhoKind::Rho2);
    let (mut acc, pairs_left) = if k.is_multiple_of(2) {
        (rho2.clone(), k / 2 - 1)
    } else {
        (build_rho_witness(ctx, pair, RhoKind::Rho3), (k - 3) / 2)
    };
    for _ in 0..pairs_left {
        acc = acc.join(&rho2);
    }
    Ok(acc)
}

/// Either a known value or a closed interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Exact(u64),
    Range(u64, u64),
}

impl Bound {
    pub fn min(&self) -> u64 {
        match *self {
            Bound::Exact(v) | Bound::Range(v, _) => v,
        }
    }

    pub fn max(&self) -> u64 {
        match *self {
            Bound::Exact(v) | Bound::Range(_, v) => v,
        }
    }

    fn from_range(lo: u64, hi: u64) -> Self {
        if lo == hi {
            Bound::Exact(lo)
        } else {
            Bound::Range(lo, hi)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElasticityTable {
    pub d: u64,
    pub k: u64,
    /// `ρ_{2k} = kD`.
    pub rho_even: u64,
    /// Bounds on `ρ_{2k+1}` valid for every finite group with this `D`.
    pub rho_odd_general: Bound,
    /// Sharper bounds for `C_q ⋊ C_p`.
    pub rho_odd: Bound,
    /// `ρ(G) = D/2` as a fraction `(numerator, denominator)` in lowest terms.
    pub rho_limit: (u64, u64),
    /// `λ_n` for `n = 1..=(k+1)·D`.
    pub lambda: Vec<Bound>,
}

/// Bounds on `ρ_{2ℓ+1}` for `C_q ⋊ C_p` with `D = 2q`.
pub fn rho_odd_bounds(d: u64, l: u64) -> Bound {
    if l == 0 {
        return Bound::Exact(1);
    }
    Bound::from_range(l * d + 2, l * d + d / 2 - 1)
}

/// `λ_n` from the case split on `n = ℓD + j`, given bounds on `ρ_{2ℓ+1}`.
pub fn lambda_bound(d: u64, n: u64) -> Bound {
    let (l, j) = (n / d, n % d);
    if j == 0 {
        return Bound::Exact(2 * l);
    }
    let rho = rho_odd_bounds(d, l);
    // j ≤ ρ_{2ℓ+1} − ℓD gives 2ℓ+1, otherwise 2ℓ+2
    let surely_odd = j + l * d <= rho.min();
    let surely_even = j + l * d > rho.max();
    match (surely_odd, surely_even) {
        (true, _) => Bound::Exact(2 * l + 1),
        (_, true) => Bound::Exact(2 * l + 2),
        _ => Bound::Range(2 * l + 1, 2 * l + 2),
    }
}

pub fn elasticity_calculator(d: u64, k: u64) -> Result<ElasticityTable, EngineError> {
    if d < 4 || d % 2 == 1 {
        return Err(EngineError::Precondition("D must be even and at least 4"));
    }
    let lambda = (1..=(k + 1) * d).map(|n| lambda_bound(d, n)).collect();
    Ok(ElasticityTable {
        d,
        k,
        rho_even: k * d,
        rho_odd_general: Bound::from_range(k * d + 1, k * d + d / 2),
        rho_odd: rho_odd_bounds(d, k),
        rho_limit: (d / 2, 1),
        lambda,
    })
}

/// Lower approximation of `U_k(G)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UkReport {
    pub k: u32,
    /// Each length with a witness whose left side has `k` atoms.
    pub witnesses: BTreeMap<usize, ElasticityWitness>,
    pub products_examined: u64,
    /// Whether every `k`-product of the pool was examined with exact length sets.
    pub exhaustive: bool,
}

impl UkReport {
    pub fn lengths(&self) -> BTreeSet<usize> {
        self.witnesses.keys().copied().collect()
    }
}

/// Atoms of length at most `max_len` over `G`.
pub fn atom_pool(ctx: &GroupCtx, max_len: u32) -> Result<Vec<Sequence>, EngineError> {
    let mut pool = Vec::new();
    for len in 1..=max_len {
        for k in 0..=len {
            let out = atom_search(ctx, Stratum::atoms(len, Some(k)), SearchMode::Raw)?;
            pool.extend(out.atoms.into_iter().map(|(a, _)| a));
        }
    }
    Ok(pool)
}

/// Examines `seeds` and then `k`-multisets of `pool` atoms (up to
/// `max_products`), collecting every length of every product's factorizations.
pub fn uk_bounded(
    ctx: &GroupCtx,
    k: u32,
    seeds: &[ElasticityWitness],
    pool: &[Sequence],
    max_products: u64,
    length_steps: u64,
) -> Result<UkReport, EngineError> {
    if k == 0 {
        return Err(EngineError::Precondition("k must be positive"));
    }
    let mut report = UkReport {
        k,
        witnesses: BTreeMap::new(),
        products_examined: 0,
        exhaustive: true,
    };
    let record = |report: &mut UkReport, left: &[Sequence], right: Vec<Sequence>| {
        report
            .witnesses
            .entry(right.len())
            .or_insert_with(|| ElasticityWitness {
                left: left.to_vec(),
                right,
            });
    };
    let examine = |report: &mut UkReport, left: &[Sequence]| -> Result<(), EngineError> {
        report.products_examined += 1;
        record(report, left, left.to_vec());
        let product = left.iter().fold(Sequence::empty(), |acc, s| acc.concat(s));
        match length_set_bounded(ctx, &product, length_steps) {
            Ok(ls) => {
                report.exhaustive &= ls.exact;
                for (_, factors) in ls.factorizations {
                    record(report, left, factors);
                }
            }
            Err(EngineError::TooWide { .. }) => report.exhaustive = false,
            Err(e) => return Err(e),
        }
        Ok(())
    };
    for seed in seeds {
        if seed.left.len() != k as usize {
            return Err(EngineError::Precondition("seed witness has the wrong number of atoms"));
        }
        record(&mut report, &seed.left, seed.right.clone());
        examine(&mut report, &seed.left)?;
    }
    if pool.is_empty() {
        return Ok(report);
    }
    let mut idx = vec![0u32; k as usize];
    loop {
        if report.products_examined >= max_products + seeds.len() as u64 {
            report.exhaustive = false;
            break;
        }
        let left: Vec<Sequence> = idx.iter().map(|&i| pool[i as usize].clone()).collect();
        examine(&mut report, &left)?;
        let Some(i) = idx.iter().rposition(|&c| (c as usize) + 1 < pool.len()) else {
            break;
        };
        let v = idx[i] + 1;
        idx[i..].iter_mut().for_each(|c| *c = v);
    }
    Ok(report)
}

/// `true` when the sequence is product-one free, via the engine.
pub fn is_product_one_free(ctx: &GroupCtx, seq: &Sequence) -> Result<bool, EngineError> {
    Ok(classify(ctx, seq)?.product_one_free)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::pi_set;
    use crate::enumeration::enumerate_stratum;
    use crate::group::GroupParams;

    fn g372() -> GroupCtx {
        GroupCtx::new(GroupParams::new(3, 7, 2)).unwrap()
    }

    #[test]
    fn small_davenport_at_21() {
        let ctx = g372();
        let full = small_davenport(&ctx, false).unwrap();
        assert_eq!(full.value, 8);
        assert!(is_product_one_free(&ctx, &full.extremal).unwrap());
        let reduced = small_davenport(&ctx, true).unwrap();
        assert_eq!(reduced.value, 8);
        assert!(reduced.nodes() < full.nodes());
        let example = Sequence::parse(&ctx, "(0,1)^6,(1,0)^2").unwrap();
        assert!(is_product_one_free(&ctx, &example).unwrap());
    }

    #[test]
    fn dfs_prune_matches_unpruned_counts() {
        let ctx = g372();
        let dfs = small_davenport(&ctx, false).unwrap();
        for len in 1..=5u32 {
            let mut free = 0u64;
            let stratum = Stratum {
                exclude_identity: true,
                ..Stratum::unfiltered(len, None)
            };
            enumerate_stratum(&ctx, &stratum, |s| {
                if is_product_one_free(&ctx, s).unwrap() {
                    free += 1;
                }
            })
            .unwrap();
            assert_eq!(dfs.by_length[len as usize], free, "length {len}");
        }
    }

    #[test]
    fn forma_s_instance() {
        let ctx = g372();
        let f = forma_s_construct(&ctx, 7, 1).unwrap();
        assert_eq!(f.sequence.format(&ctx), "(0,1)^12,(1,0),(2,5)");
        // y⁶xy⁶x²y⁵ multiplies out to the identity
        let word = [(1u32, 6u32), (7, 1), (1, 6), (14 + 5, 1)];
        let prod = word
            .iter()
            .flat_map(|&(g, m)| core::iter::repeat_n(g as ElemIdx, m as usize))
            .fold(IDENTITY, |acc, g| ctx.mul(acc, g));
        assert_eq!(prod, IDENTITY);
        assert!(is_atom(&ctx, &f.sequence).unwrap().atom);
        assert!(forma_s_construct(&ctx, 1, 7).is_err());
    }

    #[test]
    fn forma_s_family() {
        let ctx = g372();
        let all = forma_s_enumerate(&ctx);
        assert_eq!(all.len(), 42);
        for s in &all {
            assert_eq!(s.len(), 14);
            assert_eq!(s.count_where(|g| !ctx.in_commutator(g)), 2);
            assert!(is_atom(&ctx, s).unwrap().atom);
        }
    }

    #[test]
    fn rho_witnesses() {
        let ctx = g372();
        let pair = standard_pair(&ctx);
        let rho2 = build_rho_witness(&ctx, &pair, RhoKind::Rho2);
        assert_eq!(rho2.lengths(), (2, 14));
        rho2.verify(&ctx).unwrap();
        let rho3 = build_rho_witness(&ctx, &pair, RhoKind::Rho3);
        assert_eq!(rho3.lengths(), (3, 16));
        rho3.verify(&ctx).unwrap();
        assert_eq!(rho3.left[2].format(&ctx), "(1,2),(1,4),(2,0),(2,4)");
        assert_eq!(rho3.left[1].format(&ctx), "(0,6)^12,(1,6),(2,6)");
        let u2 = &rho3.right[1];
        assert_eq!(u2.format(&ctx), "(1,4),(2,5)");
        let t: Vec<ElemIdx> = u2.terms().collect();
        assert_eq!(ctx.mul(t[0], t[1]), IDENTITY);
        assert_eq!(ctx.mul(t[1], t[0]), IDENTITY);
        for other in ctx.generator_pairs().iter().take(10) {
            build_rho_witness(&ctx, other, RhoKind::Rho3).verify(&ctx).unwrap();
        }
        let w5 = elasticity_witness_for(&ctx, &pair, 5).unwrap();
        assert_eq!(w5.lengths(), (5, 30));
        w5.verify(&ctx).unwrap();
        assert_eq!(elasticity_witness_for(&ctx, &pair, 4).unwrap().lengths(), (4, 28));
    }

    #[test]
    fn broken_witness_is_rejected() {
        let ctx = g372();
        let mut w = build_rho_witness(&ctx, &standard_pair(&ctx), RhoKind::Rho3);
        w.right.pop();
        assert_eq!(w.verify(&ctx), Err(WitnessError::ProductsDiffer));
    }

    #[test]
    fn calculator_values() {
        let t = elasticity_calculator(14, 1).unwrap();
        assert_eq!(t.rho_even, 14);
        assert_eq!(t.rho_odd, Bound::Range(16, 20));
        assert_eq!(t.rho_odd_general, Bound::Range(15, 21));
        assert_eq!(t.rho_limit, (7, 1));
        assert_eq!(t.lambda[0], Bound::Exact(1));
        assert_eq!(t.lambda[13], Bound::Exact(2));
        assert_eq!(t.lambda[1], Bound::Exact(2));
        assert_eq!(lambda_bound(14, 16), Bound::Exact(3));
        assert_eq!(lambda_bound(14, 17), Bound::Range(3, 4));
        assert_eq!(lambda_bound(14, 27), Bound::Exact(4));
        assert!(elasticity_calculator(7, 1).is_err());
    }

    #[test]
    fn uk_small_cases() {
        let ctx = g372();
        let pool = atom_pool(&ctx, 2).unwrap();
        assert_eq!(pool.len(), 11);
        let u1 = uk_bounded(&ctx, 1, &[], &pool, 1000, 10_000).unwrap();
        assert_eq!(u1.lengths(), [1].into_iter().collect());
        let pair = standard_pair(&ctx);
        let seed = build_rho_witness(&ctx, &pair, RhoKind::Rho3);
        let u3 = uk_bounded(&ctx, 3, &[seed], &[], 0, 10_000).unwrap();
        assert!(u3.lengths().contains(&16));
        for w in u3.witnesses.values() {
            w.verify(&ctx).unwrap();
        }
    }

    #[test]
    fn subgroup_census() {
        let ctx = g372();
        let subs = order_p_subgroups(&ctx);
        assert_eq!(subs.len(), 7);
        assert!(subs.iter().all(|h| h.len() == 3));
        let y7 = Sequence::power(1, 7);
        assert_eq!(pi_set(&ctx, &y7).unwrap().iter().collect::<Vec<_>>(), vec![IDENTITY]);
    }
}
