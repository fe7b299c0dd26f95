//! Stratified enumeration of multisets with ranking, sharding and resumable state.
//!
//! A stratum fixes the total length and optionally `k`, the number of terms
//! outside `G'`. Candidates are nondecreasing term lists over the stratum's
//! pools, ordered lexicographically. Since every index in `G'` is smaller than
//! every index outside it, a candidate with fixed `k` is an `A`-block over
//! `G'` followed by a `B`-block over `G∖G'`, and its rank is
//! `rank_A · |B-blocks| + rank_B`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::digest::FindingsDigest;
use crate::engine::{atom_flag, AtomVerdict, DEFAULT_STATE_CAP};
use crate::error::EngineError;
use crate::group::{Automorphism, ElemIdx, GroupCtx, IDENTITY};
use crate::sequence::Sequence;

/// `C(n, k)` with overflow reported as `None`.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Number of multisets of size `m` over `n` values.
pub fn multiset_count(n: u64, m: u64) -> Option<u64> {
    if n == 0 {
        return Some((m == 0) as u64);
    }
    binomial(n + m - 1, m)
}

/// Lexicographic rank of a nondecreasing list over `0..n`.
pub fn rank_multiset(n: u64, values: &[u32]) -> Option<u64> {
    let m = values.len() as u64;
    let mut rank = 0u64;
    let mut prev = 0u32;
    for (i, &c) in values.iter().enumerate() {
        let rest = m - i as u64 - 1;
        for v in prev..c {
            rank = rank.checked_add(multiset_count(n - v as u64, rest)?)?;
        }
        prev = c;
    }
    Some(rank)
}

/// Inverse of [`rank_multiset`].
pub fn unrank_multiset(n: u64, m: usize, mut rank: u64) -> Option<Vec<u32>> {
    let mut out = Vec::with_capacity(m);
    let mut v = 0u32;
    for i in 0..m {
        let rest = (m - i - 1) as u64;
        loop {
            if v as u64 >= n {
                return None;
            }
            let block = multiset_count(n - v as u64, rest)?;
            if rank < block {
                break;
            }
            rank -= block;
            v += 1;
        }
        out.push(v);
    }
    (rank == 0).then_some(out)
}

/// Advances a nondecreasing list over `0..n` to its lexicographic successor.
fn next_multiset(values: &mut [u32], n: u32) -> bool {
    let Some(i) = values.iter().rposition(|&c| c + 1 < n) else {
        return false;
    };
    let v = values[i] + 1;
    for c in &mut values[i..] {
        *c = v;
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Stratum {
    pub length: u32,
    /// `v_{G∖G'}(S)`; `None` mixes all terms in one pool.
    pub k: Option<u32>,
    pub exclude_identity: bool,
    /// Keep only sequences whose τ-degree sum is `0 mod p`, i.e. `π(S) ⊆ G'`.
    pub residue_filter: bool,
}

impl Stratum {
    /// The stratum with both hard filters, as used when hunting atoms.
    pub fn atoms(length: u32, k: Option<u32>) -> Self {
        Self {
            length,
            k,
            exclude_identity: length >= 2,
            residue_filter: true,
        }
    }

    pub fn unfiltered(length: u32, k: Option<u32>) -> Self {
        Self {
            length,
            k,
            exclude_identity: false,
            residue_filter: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    Raw,
    /// One representative per `Aut(G)` orbit.
    UpToAut,
}

/// Pools and block sizes of a stratum over a concrete group.
#[derive(Clone, Debug)]
pub struct Layout {
    blocks: Vec<(Vec<ElemIdx>, u32)>,
    counts: Vec<u64>,
    total: u64,
}

impl Layout {
    pub fn new(ctx: &GroupCtx, stratum: &Stratum) -> Result<Self, EngineError> {
        let keep = |g: ElemIdx| !(stratum.exclude_identity && g == IDENTITY);
        let blocks: Vec<(Vec<ElemIdx>, u32)> = match stratum.k {
            None => vec![(ctx.elements().filter(|&g| keep(g)).collect(), stratum.length)],
            Some(k) if k > stratum.length => vec![(Vec::new(), 1)],
            Some(k) => vec![
                (
                    ctx.elements().filter(|&g| ctx.in_commutator(g) && keep(g)).collect(),
                    stratum.length - k,
                ),
                (ctx.elements().filter(|&g| !ctx.in_commutator(g)).collect(), k),
            ],
        };
        let too_large = EngineError::Precondition("stratum size overflows 64 bits");
        let counts = blocks
            .iter()
            .map(|(pool, m)| multiset_count(pool.len() as u64, *m as u64))
            .collect::<Option<Vec<u64>>>()
            .ok_or(too_large.clone())?;
        let total = counts
            .iter()
            .try_fold(1u64, |acc, &c| acc.checked_mul(c))
            .ok_or(too_large)?;
        Ok(Self { blocks, counts, total })
    }

    /// Number of candidates before the residue and orbit filters.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn blocks(&self) -> &[(Vec<ElemIdx>, u32)] {
        &self.blocks
    }

    pub fn unrank(&self, mut rank: u64) -> Option<Vec<Vec<u32>>> {
        if rank >= self.total {
            return None;
        }
        let mut out = vec![Vec::new(); self.blocks.len()];
        for i in (0..self.blocks.len()).rev() {
            let (pool, m) = &self.blocks[i];
            out[i] = unrank_multiset(pool.len() as u64, *m as usize, rank % self.counts[i])?;
            rank /= self.counts[i];
        }
        Some(out)
    }

    pub fn rank(&self, positions: &[Vec<u32>]) -> Option<u64> {
        let mut rank = 0u64;
        for ((pool, _), (pos, &count)) in self.blocks.iter().zip(positions.iter().zip(&self.counts)) {
            rank = rank
                .checked_mul(count)?
                .checked_add(rank_multiset(pool.len() as u64, pos)?)?;
        }
        Some(rank)
    }

    /// Rank of a concrete sequence, or `None` if it is outside the stratum.
    pub fn rank_of(&self, seq: &Sequence) -> Option<u64> {
        let mut terms = seq.terms().peekable();
        let mut positions = Vec::with_capacity(self.blocks.len());
        for (pool, m) in &self.blocks {
            let mut pos = Vec::with_capacity(*m as usize);
            for _ in 0..*m {
                let g = terms.next()?;
                pos.push(pool.iter().position(|&h| h == g)? as u32);
            }
            positions.push(pos);
        }
        if terms.peek().is_some() {
            return None;
        }
        self.rank(&positions)
    }

    fn sequence(&self, positions: &[Vec<u32>]) -> Sequence {
        Sequence::from_terms(
            self.blocks
                .iter()
                .zip(positions)
                .flat_map(|((pool, _), pos)| pos.iter().map(|&i| pool[i as usize])),
        )
    }

    /// Lexicographic successor, carrying from the last block into earlier ones.
    fn advance(&self, positions: &mut [Vec<u32>]) -> bool {
        for i in (0..self.blocks.len()).rev() {
            let n = self.blocks[i].0.len() as u32;
            if next_multiset(&mut positions[i], n) {
                return true;
            }
            positions[i].iter_mut().for_each(|c| *c = 0);
        }
        false
    }
}

/// Visits every candidate with rank in `[start, end)` in order.
/// The visitor returns `false` to stop early; the function returns the number visited.
pub fn for_each_in_range<F>(layout: &Layout, start: u64, end: u64, mut visit: F) -> u64
where
    F: FnMut(u64, &Sequence) -> bool,
{
    let end = end.min(layout.total);
    if start >= end {
        return 0;
    }
    let mut positions = layout.unrank(start).expect("start is in range");
    let mut rank = start;
    loop {
        let seq = layout.sequence(&positions);
        let keep_going = visit(rank, &seq);
        rank += 1;
        if !keep_going || rank == end {
            return rank - start;
        }
        let advanced = layout.advance(&mut positions);
        debug_assert!(advanced);
    }
}

/// Result of a plain walk over a stratum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WalkSummary {
    pub candidates: u64,
    pub passed: u64,
}

/// Visits every multiset of the stratum that survives the residue filter.
pub fn enumerate_stratum<F>(ctx: &GroupCtx, stratum: &Stratum, mut visitor: F) -> Result<WalkSummary, EngineError>
where
    F: FnMut(&Sequence),
{
    let layout = Layout::new(ctx, stratum)?;
    let mut summary = WalkSummary::default();
    summary.candidates = for_each_in_range(&layout, 0, layout.total(), |_, seq| {
        if !stratum.residue_filter || seq.degree_sum(ctx) == 0 {
            summary.passed += 1;
            visitor(seq);
        }
        true
    });
    Ok(summary)
}

/// Least element of the orbit `{φ(S) : φ ∈ auts}`.
pub fn canonical_form(seq: &Sequence, auts: &[Automorphism]) -> Sequence {
    auts.iter()
        .map(|phi| seq.map(phi))
        .min_by(|a, b| a.terms().cmp(b.terms()))
        .unwrap_or_else(|| seq.clone())
}

/// The least element of each `Aut(G)` orbit on `G`.
pub fn orbit_minima(ctx: &GroupCtx, auts: &[Automorphism]) -> BTreeSet<ElemIdx> {
    ctx.elements()
        .filter(|&g| auts.iter().all(|phi| phi.apply(g) >= g))
        .collect()
}

/// Contiguous rank range of a stratum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Shard {
    pub index: u32,
    pub start: u64,
    pub end: u64,
}

impl Shard {
    pub fn len(&self) -> u64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// Splits `0..total` into `n` contiguous ranges whose sizes differ by at most one.
pub fn make_shards(total: u64, n: u32) -> Vec<Shard> {
    let n = n.max(1) as u64;
    (0..n)
        .map(|i| Shard {
            index: i as u32,
            start: (total as u128 * i as u128 / n as u128) as u64,
            end: (total as u128 * (i + 1) as u128 / n as u128) as u64,
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    /// Ranks walked.
    pub visited: u64,
    /// Rejected by the residue filter.
    pub filtered_residue: u64,
    /// Rejected by orbit breaking in up-to-Aut mode.
    pub filtered_orbit: u64,
    /// Candidates sent through the atom test.
    pub checked: u64,
    /// Atom hits (before orbit deduplication).
    pub atoms: u64,
    pub unverified: u64,
}

impl Counters {
    pub fn merge(&mut self, other: &Counters) {
        self.visited += other.visited;
        self.filtered_residue += other.filtered_residue;
        self.filtered_orbit += other.filtered_orbit;
        self.checked += other.checked;
        self.atoms += other.atoms;
        self.unverified += other.unverified;
    }

    /// Every visited rank is accounted for exactly once.
    pub fn reconciles(&self) -> bool {
        self.visited == self.filtered_residue + self.filtered_orbit + self.checked
            && self.checked >= self.atoms + self.unverified
    }
}

/// Progress of one shard; serializable as a checkpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShardState {
    pub shard: Shard,
    /// First rank not yet processed.
    pub next_rank: u64,
    pub counters: Counters,
    pub digest: FindingsDigest,
    /// Atom hits (canonical forms in up-to-Aut mode) with hit counts.
    pub atoms: BTreeMap<Sequence, u64>,
    pub unverified: Vec<Sequence>,
}

impl ShardState {
    pub fn fresh(shard: Shard) -> Self {
        Self {
            shard,
            next_rank: shard.start,
            counters: Counters::default(),
            digest: FindingsDigest::new(),
            atoms: BTreeMap::new(),
            unverified: Vec::new(),
        }
    }

    /// Digest recomputed from the recorded hits.
    pub fn recomputed_digest(&self) -> FindingsDigest {
        let mut d = FindingsDigest::new();
        for (a, &n) in &self.atoms {
            for _ in 0..n {
                d.add(a);
            }
        }
        d
    }

    pub fn done(&self) -> bool {
        self.next_rank >= self.shard.end
    }
}

/// Everything the atom hunt needs besides the shard.
pub struct Search<'a> {
    ctx: &'a GroupCtx,
    stratum: Stratum,
    mode: SearchMode,
    layout: Layout,
    auts: Vec<Automorphism>,
    minima: BTreeSet<ElemIdx>,
    pub state_cap: u64,
}

impl<'a> Search<'a> {
    pub fn new(ctx: &'a GroupCtx, stratum: Stratum, mode: SearchMode) -> Result<Self, EngineError> {
        let layout = Layout::new(ctx, &stratum)?;
        let (auts, minima) = match mode {
            SearchMode::Raw => (Vec::new(), BTreeSet::new()),
            SearchMode::UpToAut => {
                let auts = ctx.automorphisms();
                let minima = orbit_minima(ctx, &auts);
                (auts, minima)
            }
        };
        Ok(Self {
            ctx,
            stratum,
            mode,
            layout,
            auts,
            minima,
            state_cap: DEFAULT_STATE_CAP,
        })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn stratum(&self) -> &Stratum {
        &self.stratum
    }

    pub fn mode(&self) -> SearchMode {
        self.mode
    }

    fn lead_ok(&self, seq: &Sequence) -> bool {
        let lead = match self.stratum.k {
            Some(k) if k > 0 => seq.support().find(|&g| !self.ctx.in_commutator(g)),
            _ => seq.support().next(),
        };
        lead.is_none_or(|g| self.minima.contains(&g))
    }

    /// Orbit breaking: the least term of the last nonempty block must be an
    /// orbit minimum, and among the images of `S` that satisfy this, `S` must
    /// be lexicographically least. Every orbit contains an image with an
    /// orbit minimum as that least term (automorphisms preserve `G'` and each
    /// block's pool is `Aut(G)`-invariant), so exactly one member per orbit
    /// survives.
    fn orbit_ok(&self, seq: &Sequence) -> bool {
        if self.mode == SearchMode::Raw {
            return true;
        }
        if !self.lead_ok(seq) {
            return false;
        }
        self.auts.iter().all(|phi| {
            let image = seq.map(phi);
            image.terms().cmp(seq.terms()) != core::cmp::Ordering::Less || !self.lead_ok(&image)
        })
    }

    /// Processes ranks from `state.next_rank`, stopping after at most
    /// `budget` ranks (used for interruption and progress reporting).
    pub fn run(&self, state: &mut ShardState, budget: Option<u64>) {
        let end = match budget {
            Some(b) => state.shard.end.min(state.next_rank.saturating_add(b)),
            None => state.shard.end,
        };
        let walked = for_each_in_range(&self.layout, state.next_rank, end, |_, seq| {
            let c = &mut state.counters;
            if self.stratum.residue_filter && seq.degree_sum(self.ctx) != 0 {
                c.filtered_residue += 1;
                return true;
            }
            if !self.orbit_ok(seq) {
                c.filtered_orbit += 1;
                return true;
            }
            c.checked += 1;
            match atom_flag(self.ctx, seq, self.state_cap) {
                Ok(true) => {
                    c.atoms += 1;
                    let found = match self.mode {
                        SearchMode::Raw => seq.clone(),
                        SearchMode::UpToAut => canonical_form(seq, &self.auts),
                    };
                    state.digest.add(&found);
                    *state.atoms.entry(found).or_insert(0) += 1;
                }
                Ok(false) => {}
                Err(_) => {
                    c.unverified += 1;
                    state.unverified.push(seq.clone());
                }
            }
            true
        });
        state.counters.visited += walked;
        state.next_rank += walked;
    }
}

/// Aggregate of a complete atom hunt over one stratum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub stratum: Stratum,
    pub mode: SearchMode,
    pub candidates: u64,
    pub counters: Counters,
    pub digest: FindingsDigest,
    pub atoms: Vec<(Sequence, AtomVerdict)>,
    pub unverified: Vec<Sequence>,
}

/// Merges finished shard states into one outcome.
pub fn merge_states(search: &Search<'_>, states: &[ShardState]) -> SearchOutcome {
    let mut counters = Counters::default();
    let mut digest = FindingsDigest::new();
    let mut atoms = BTreeSet::new();
    let mut unverified = Vec::new();
    for s in states {
        counters.merge(&s.counters);
        digest.merge(&s.digest);
        atoms.extend(s.atoms.keys().cloned());
        unverified.extend(s.unverified.iter().cloned());
    }
    SearchOutcome {
        stratum: search.stratum,
        mode: search.mode,
        candidates: search.layout.total(),
        counters,
        digest,
        atoms: atoms
            .into_iter()
            .map(|a| {
                (
                    a,
                    AtomVerdict {
                        product_one: true,
                        atom: true,
                        witness: None,
                    },
                )
            })
            .collect(),
        unverified,
    }
}

/// Single-worker atom hunt over a whole stratum.
pub fn atom_search(ctx: &GroupCtx, stratum: Stratum, mode: SearchMode) -> Result<SearchOutcome, EngineError> {
    let search = Search::new(ctx, stratum, mode)?;
    let mut state = ShardState::fresh(Shard {
        index: 0,
        start: 0,
        end: search.layout().total(),
    });
    search.run(&mut state, None);
    Ok(merge_states(&search, &[state]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::is_atom;
    use crate::group::GroupParams;
    use crate::oracles::naive_is_atom;

    fn g372() -> GroupCtx {
        GroupCtx::new(GroupParams::new(3, 7, 2)).unwrap()
    }

    #[test]
    fn ranking_round_trips() {
        for (n, m) in [(1u64, 0usize), (1, 3), (4, 3), (6, 5), (20, 2)] {
            let total = multiset_count(n, m as u64).unwrap();
            let mut values = vec![0u32; m];
            for r in 0..total {
                assert_eq!(rank_multiset(n, &values), Some(r));
                assert_eq!(unrank_multiset(n, m, r).as_deref(), Some(values.as_slice()));
                let more = next_multiset(&mut values, n as u32);
                assert_eq!(more, r + 1 < total);
            }
        }
        assert_eq!(binomial(33, 14), Some(818_809_200));
        assert_eq!(multiset_count(0, 0), Some(1));
        assert_eq!(multiset_count(0, 2), Some(0));
    }

    #[test]
    fn stratum_sizes() {
        let ctx = g372();
        let pairs = Stratum::atoms(2, None);
        assert_eq!(Layout::new(&ctx, &pairs).unwrap().total(), 210);
        let mut seen = BTreeSet::new();
        let walk = enumerate_stratum(
            &ctx,
            &Stratum {
                residue_filter: false,
                ..pairs
            },
            |s| {
                assert!(seen.insert(s.clone()));
            },
        )
        .unwrap();
        assert_eq!(walk.passed, 210);

        let k2 = Stratum::atoms(14, Some(2));
        let layout = Layout::new(&ctx, &k2).unwrap();
        assert_eq!(layout.total(), 649_740);
        let mut count = 0u64;
        let walk = enumerate_stratum(&ctx, &k2, |_| count += 1).unwrap();
        assert_eq!(walk.candidates, 649_740);
        assert_eq!(walk.passed, 49 * 6188);
        assert_eq!(count, walk.passed);

        let empty = Stratum::atoms(3, Some(4));
        let walk = enumerate_stratum(&ctx, &empty, |_| panic!("no candidates")).unwrap();
        assert_eq!(walk, WalkSummary::default());
    }

    #[test]
    fn walk_is_lexicographic_and_ranked() {
        let ctx = g372();
        let stratum = Stratum::unfiltered(4, Some(2));
        let layout = Layout::new(&ctx, &stratum).unwrap();
        let mut prev: Option<Vec<ElemIdx>> = None;
        for_each_in_range(&layout, 0, layout.total(), |rank, seq| {
            assert_eq!(layout.rank_of(seq), Some(rank));
            let terms: Vec<ElemIdx> = seq.terms().collect();
            if let Some(p) = &prev {
                assert!(*p < terms);
            }
            prev = Some(terms);
            true
        });
        // resuming mid-way sees the same sequences
        let mut tail = Vec::new();
        for_each_in_range(&layout, 100, 110, |_, s| {
            tail.push(s.clone());
            true
        });
        assert_eq!(tail.len(), 10);
        assert_eq!(layout.rank_of(&tail[0]), Some(100));
    }

    #[test]
    fn length_two_atoms_are_inverse_pairs() {
        let ctx = g372();
        let out = atom_search(&ctx, Stratum::atoms(2, None), SearchMode::Raw).unwrap();
        assert_eq!(out.atoms.len(), 10);
        for (a, verdict) in &out.atoms {
            let t: Vec<ElemIdx> = a.terms().collect();
            assert_eq!(ctx.inv(t[0]), t[1]);
            assert!(verdict.atom);
        }
        assert!(out.counters.reconciles());
    }

    #[test]
    fn length_seven_commutator_atoms() {
        let ctx = g372();
        let raw = atom_search(&ctx, Stratum::atoms(7, Some(0)), SearchMode::Raw).unwrap();
        let expect: Vec<Sequence> = (1..7).map(|g| Sequence::power(g, 7)).collect();
        assert_eq!(raw.atoms.iter().map(|(a, _)| a.clone()).collect::<Vec<_>>(), expect);
        let up = atom_search(&ctx, Stratum::atoms(7, Some(0)), SearchMode::UpToAut).unwrap();
        assert_eq!(up.atoms.len(), 1);
    }

    #[test]
    fn up_to_aut_keeps_one_member_per_orbit() {
        let ctx = g372();
        let auts = ctx.automorphisms();
        for (length, k) in [(10, 2), (9, 3), (8, 4)] {
            let raw = atom_search(&ctx, Stratum::atoms(length, Some(k)), SearchMode::Raw).unwrap();
            let orbits: BTreeSet<Sequence> = raw.atoms.iter().map(|(a, _)| canonical_form(a, &auts)).collect();
            let up = atom_search(&ctx, Stratum::atoms(length, Some(k)), SearchMode::UpToAut).unwrap();
            assert_eq!(up.counters.atoms, orbits.len() as u64, "({length}, {k})");
            assert_eq!(up.atoms.iter().map(|(a, _)| a.clone()).collect::<BTreeSet<_>>(), orbits);
        }
    }

    #[test]
    fn canonical_form_is_an_orbit_invariant() {
        let ctx = g372();
        let auts = ctx.automorphisms();
        let forma = Sequence::parse(&ctx, "(0,1)^12,(1,0),(2,5)").unwrap();
        let c = canonical_form(&forma, &auts);
        assert_eq!(canonical_form(&c, &auts), c);
        let orbit: BTreeSet<Sequence> = auts.iter().map(|phi| forma.map(phi)).collect();
        assert_eq!(auts.len() % orbit.len(), 0);
        for phi in &auts {
            assert_eq!(canonical_form(&forma.map(phi), &auts), c);
        }
        let minima = orbit_minima(&ctx, &auts);
        // G∖G' splits into the two cosets τG' and τ²G'
        assert_eq!(minima.into_iter().collect::<Vec<_>>(), vec![0, 1, 7, 14]);
    }

    #[test]
    fn filters_are_sound_up_to_length_six() {
        let ctx = g372();
        for length in 1..=6 {
            let mut plain = BTreeSet::new();
            enumerate_stratum(&ctx, &Stratum::unfiltered(length, None), |s| {
                if is_atom(&ctx, s).unwrap().atom {
                    plain.insert(s.clone());
                }
            })
            .unwrap();
            let mut filtered = BTreeSet::new();
            for k in 0..=length {
                let out = atom_search(&ctx, Stratum::atoms(length, Some(k)), SearchMode::Raw).unwrap();
                filtered.extend(out.atoms.into_iter().map(|(a, _)| a));
            }
            assert_eq!(plain, filtered, "length {length}");
            if length <= 3 {
                for a in &plain {
                    assert!(naive_is_atom(&ctx, a).unwrap().atom);
                }
            }
        }
    }

    #[test]
    fn shards_cover_and_agree() {
        let ctx = g372();
        let k2 = Layout::new(&ctx, &Stratum::atoms(14, Some(2))).unwrap();
        let shards = make_shards(k2.total(), 8);
        assert_eq!(shards.iter().map(Shard::len).sum::<u64>(), k2.total());
        let (min, max) = shards
            .iter()
            .fold((u64::MAX, 0), |(a, b), s| (a.min(s.len()), b.max(s.len())));
        assert!(max <= 2 * min);
        assert_eq!(
            make_shards(10, 1),
            vec![Shard {
                index: 0,
                start: 0,
                end: 10
            }]
        );

        let stratum = Stratum::atoms(6, Some(2));
        let search = Search::new(&ctx, stratum, SearchMode::Raw).unwrap();
        let whole = atom_search(&ctx, stratum, SearchMode::Raw).unwrap();
        for n in [2, 3, 7] {
            let states: Vec<ShardState> = make_shards(search.layout().total(), n)
                .into_iter()
                .map(|shard| {
                    let mut st = ShardState::fresh(shard);
                    search.run(&mut st, None);
                    st
                })
                .collect();
            let merged = merge_states(&search, &states);
            assert_eq!(merged.digest, whole.digest);
            assert_eq!(merged.counters, whole.counters);
            assert_eq!(merged.atoms, whole.atoms);
        }
    }

    #[test]
    fn interrupted_runs_resume_exactly() {
        let ctx = g372();
        let stratum = Stratum::atoms(6, Some(2));
        let whole = atom_search(&ctx, stratum, SearchMode::UpToAut).unwrap();
        let search = Search::new(&ctx, stratum, SearchMode::UpToAut).unwrap();
        let total = search.layout().total();
        let mut state = ShardState::fresh(Shard {
            index: 0,
            start: 0,
            end: total,
        });
        for step in [1, 17, 250, 3] {
            search.run(&mut state, Some(step));
        }
        while !state.done() {
            search.run(&mut state, Some(1000));
        }
        assert_eq!(state.recomputed_digest(), state.digest);
        let resumed = merge_states(&search, &[state]);
        assert_eq!(resumed.digest, whole.digest);
        assert_eq!(resumed.counters, whole.counters);
        assert_eq!(resumed.counters.visited, total);
    }
}
