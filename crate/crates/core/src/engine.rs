//! Subproduct dynamic programming over sub-multisets.
//!
//! For a sequence with support `g_1 < … < g_k` and multiplicities `v_i`, every
//! sub-multiset `T` is a digit vector `(t_1, …, t_k)` with `0 ≤ t_i ≤ v_i`,
//! stored at the mixed-radix index `Σ t_i · stride_i`. The table holds
//! `reach(T) = π(T)` computed as `reach(∅) = {1}` and
//! `reach(T) = ∪_{t_i > 0} reach(T − g_i) · g_i`. The complement of `T`
//! sits at `last − index(T)`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::EngineError;
use crate::group::{ElemIdx, GroupCtx, IDENTITY};
use crate::product_set::{shift_into, words_for, ProductSet};
use crate::sequence::Sequence;

/// Default cap on DP states.
pub const DEFAULT_STATE_CAP: u64 = 1 << 26;

/// Number of sub-multisets `Π (v_g + 1)`.
pub fn state_count(seq: &Sequence) -> u128 {
    seq.entries()
        .iter()
        .fold(1u128, |acc, &(_, m)| acc.saturating_mul(m as u128 + 1))
}

/// The filled DP table for one sequence.
pub struct SubproductTable<'a> {
    ctx: &'a GroupCtx,
    support: Vec<ElemIdx>,
    radix: Vec<u32>,
    strides: Vec<usize>,
    states: usize,
    words: usize,
    data: Vec<u64>,
}

impl<'a> SubproductTable<'a> {
    pub fn build(ctx: &'a GroupCtx, seq: &Sequence, cap: u64) -> Result<Self, EngineError> {
        let states = state_count(seq);
        if states > cap as u128 {
            return Err(EngineError::TooWide { states, cap });
        }
        let states = states as usize;
        let support: Vec<ElemIdx> = seq.support().collect();
        let radix: Vec<u32> = seq.entries().iter().map(|&(_, m)| m + 1).collect();
        let mut strides = Vec::with_capacity(radix.len());
        let mut acc = 1usize;
        for &r in &radix {
            strides.push(acc);
            acc *= r as usize;
        }
        let words = words_for(ctx.order());
        let mut data = vec![0u64; states * words];
        data[0] = 1 << IDENTITY;
        let k = support.len();
        let mut digits = vec![0u32; k];
        if words == 1 {
            for idx in 1..states {
                bump(&mut digits, &radix);
                let mut acc = 0u64;
                for i in 0..k {
                    if digits[i] > 0 {
                        acc |= ctx.shift_word(data[idx - strides[i]], support[i]);
                    }
                }
                data[idx] = acc;
            }
        } else {
            for idx in 1..states {
                bump(&mut digits, &radix);
                let (done, rest) = data.split_at_mut(idx * words);
                let dst = &mut rest[..words];
                for i in 0..k {
                    if digits[i] > 0 {
                        let src = (idx - strides[i]) * words;
                        shift_into(ctx, &done[src..src + words], support[i], dst);
                    }
                }
            }
        }
        Ok(Self {
            ctx,
            support,
            radix,
            strides,
            states,
            words,
            data,
        })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    /// Index of the full sequence.
    pub fn full(&self) -> usize {
        self.states - 1
    }

    #[inline]
    pub fn product_one(&self, idx: usize) -> bool {
        self.data[idx * self.words] & 1 == 1
    }

    pub fn reach(&self, idx: usize) -> ProductSet {
        ProductSet::from_words(self.data[idx * self.words..(idx + 1) * self.words].to_vec())
    }

    pub fn digits(&self, mut idx: usize) -> Vec<u32> {
        self.radix
            .iter()
            .map(|&r| {
                let d = idx % r as usize;
                idx /= r as usize;
                d as u32
            })
            .collect()
    }

    pub fn index_of(&self, digits: &[u32]) -> usize {
        digits.iter().zip(&self.strides).map(|(&d, &s)| d as usize * s).sum()
    }

    pub fn sequence_at(&self, idx: usize) -> Sequence {
        Sequence::from_counts(self.support.iter().copied().zip(self.digits(idx)))
    }

    pub fn support(&self) -> &[ElemIdx] {
        &self.support
    }

    /// `Π(S)`: union over all nonempty sub-multisets.
    pub fn subproducts(&self) -> ProductSet {
        let mut out = vec![0u64; self.words];
        for idx in 1..self.states {
            for (o, w) in out.iter_mut().zip(&self.data[idx * self.words..(idx + 1) * self.words]) {
                *o |= w;
            }
        }
        ProductSet::from_words(out)
    }

    /// Some proper nonempty `T` with both `T` and its complement product-one.
    pub fn has_split(&self) -> bool {
        let full = self.full();
        (1..full).any(|idx| idx <= full - idx && self.product_one(idx) && self.product_one(full - idx))
    }

    /// The least splitting sub-multiset by (length, sorted content).
    pub fn least_split(&self) -> Option<Sequence> {
        let full = self.full();
        let mut best: Option<(usize, Vec<ElemIdx>)> = None;
        for idx in 1..full {
            if !(self.product_one(idx) && self.product_one(full - idx)) {
                continue;
            }
            let digits = self.digits(idx);
            let len: usize = digits.iter().map(|&d| d as usize).sum();
            if best.as_ref().is_some_and(|(l, _)| len > *l) {
                continue;
            }
            let content: Vec<ElemIdx> = self
                .support
                .iter()
                .zip(&digits)
                .flat_map(|(&g, &d)| core::iter::repeat_n(g, d as usize))
                .collect();
            let better = match &best {
                None => true,
                Some((l, c)) => len < *l || content < *c,
            };
            if better {
                best = Some((len, content));
            }
        }
        best.map(|(_, content)| Sequence::from_terms(content))
    }

    pub fn group(&self) -> &GroupCtx {
        self.ctx
    }
}

/// Odometer increment over mixed-radix digits.
#[inline]
fn bump(digits: &mut [u32], radix: &[u32]) {
    for (d, &r) in digits.iter_mut().zip(radix) {
        *d += 1;
        if *d < r {
            return;
        }
        *d = 0;
    }
}

/// `π(S)`; `π(∅) = {1}`.
pub fn pi_set(ctx: &GroupCtx, seq: &Sequence) -> Result<ProductSet, EngineError> {
    pi_set_capped(ctx, seq, DEFAULT_STATE_CAP)
}

pub fn pi_set_capped(ctx: &GroupCtx, seq: &Sequence, cap: u64) -> Result<ProductSet, EngineError> {
    let table = SubproductTable::build(ctx, seq, cap)?;
    Ok(table.reach(table.full()))
}

/// `Π(S)`, the union of `π(T)` over nonempty `T | S`.
pub fn subproducts_set(ctx: &GroupCtx, seq: &Sequence) -> Result<ProductSet, EngineError> {
    if seq.is_empty() {
        return Err(EngineError::Empty);
    }
    Ok(SubproductTable::build(ctx, seq, DEFAULT_STATE_CAP)?.subproducts())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub product_one: bool,
    pub product_one_free: bool,
}

pub fn classify(ctx: &GroupCtx, seq: &Sequence) -> Result<Classification, EngineError> {
    if seq.is_empty() {
        return Err(EngineError::Empty);
    }
    let table = SubproductTable::build(ctx, seq, DEFAULT_STATE_CAP)?;
    Ok(Classification {
        product_one: table.product_one(table.full()),
        product_one_free: !table.subproducts().contains(IDENTITY),
    })
}

/// Atom classification with a decomposition witness for decomposable product-one sequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomVerdict {
    pub product_one: bool,
    pub atom: bool,
    pub witness: Option<(Sequence, Sequence)>,
}

pub fn is_atom(ctx: &GroupCtx, seq: &Sequence) -> Result<AtomVerdict, EngineError> {
    is_atom_capped(ctx, seq, DEFAULT_STATE_CAP)
}

pub fn is_atom_capped(ctx: &GroupCtx, seq: &Sequence, cap: u64) -> Result<AtomVerdict, EngineError> {
    if seq.is_empty() {
        return Err(EngineError::Empty);
    }
    let table = SubproductTable::build(ctx, seq, cap)?;
    if !table.product_one(table.full()) {
        return Ok(AtomVerdict {
            product_one: false,
            atom: false,
            witness: None,
        });
    }
    Ok(match table.least_split() {
        None => AtomVerdict {
            product_one: true,
            atom: true,
            witness: None,
        },
        Some(t1) => {
            let t2 = seq.remove(&t1).expect("split is a sub-multiset");
            AtomVerdict {
                product_one: true,
                atom: false,
                witness: Some((t1, t2)),
            }
        }
    })
}

/// Atom test without a witness; the hot path of exhaustive searches.
pub fn atom_flag(ctx: &GroupCtx, seq: &Sequence, cap: u64) -> Result<bool, EngineError> {
    if seq.is_empty() {
        return Err(EngineError::Empty);
    }
    let table = SubproductTable::build(ctx, seq, cap)?;
    Ok(table.product_one(table.full()) && !table.has_split())
}

/// `v_K(S)` for an explicit set `K`.
pub fn stat_counts(seq: &Sequence, k: &BTreeSet<ElemIdx>) -> usize {
    seq.count_where(|g| k.contains(&g))
}

/// Result of a bounded factorization-length computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthSet {
    /// Each length maps to one factorization into atoms of that length.
    pub factorizations: BTreeMap<usize, Vec<Sequence>>,
    /// `false` when the step budget ran out; the lengths are then a subset of `L(S)`.
    pub exact: bool,
}

impl LengthSet {
    pub fn lengths(&self) -> BTreeSet<usize> {
        self.factorizations.keys().copied().collect()
    }
}

struct Factorizer<'t, 'c> {
    table: &'t SubproductTable<'c>,
    atom_memo: Vec<u8>,
    lengths: BTreeMap<usize, BTreeMap<usize, usize>>,
    steps: u64,
    budget: u64,
    exhausted: bool,
}

impl Factorizer<'_, '_> {
    /// Visits every `sub ≤ of` digitwise, calling `f(sub_index, sub_digits)`.
    /// Stops early when `f` returns `false`.
    fn for_each_sub<F: FnMut(usize, &[u32]) -> bool>(&self, of: &[u32], mut f: F) {
        let k = of.len();
        let mut digits = vec![0u32; k];
        loop {
            let idx = self.table.index_of(&digits);
            if !f(idx, &digits) {
                return;
            }
            let mut i = 0;
            loop {
                if i == k {
                    return;
                }
                if digits[i] < of[i] {
                    digits[i] += 1;
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
    }

    fn is_atom(&mut self, idx: usize) -> bool {
        match self.atom_memo[idx] {
            1 => return true,
            2 => return false,
            _ => {}
        }
        let mut atom = idx != 0 && self.table.product_one(idx);
        if atom {
            let digits = self.table.digits(idx);
            let table = self.table;
            self.for_each_sub(&digits, |sub, _| {
                if sub != 0 && sub != idx && table.product_one(sub) && table.product_one(idx - sub) {
                    atom = false;
                }
                atom
            });
        }
        self.atom_memo[idx] = if atom { 1 } else { 2 };
        atom
    }

    /// Lengths of factorizations of the product-one sub-multiset `idx`, each
    /// mapped to the atom peeled first.
    fn lengths_of(&mut self, idx: usize) -> BTreeMap<usize, usize> {
        if idx == 0 {
            let mut base = BTreeMap::new();
            base.insert(0, 0);
            return base;
        }
        if let Some(found) = self.lengths.get(&idx) {
            return found.clone();
        }
        let digits = self.table.digits(idx);
        let lead = digits.iter().position(|&d| d > 0).expect("nonempty");
        let mut candidates = Vec::new();
        self.for_each_sub(&digits, |sub, sub_digits| {
            if sub_digits[lead] > 0 {
                candidates.push(sub);
            }
            true
        });
        let mut out = BTreeMap::new();
        for atom in candidates {
            if self.steps >= self.budget {
                self.exhausted = true;
                break;
            }
            self.steps += 1;
            let rest = idx - atom;
            if !self.table.product_one(rest) || !self.is_atom(atom) {
                continue;
            }
            for len in self.lengths_of(rest).into_keys() {
                out.entry(len + 1).or_insert(atom);
            }
        }
        self.lengths.insert(idx, out.clone());
        out
    }

    fn factorization(&mut self, mut idx: usize, len: usize) -> Vec<Sequence> {
        let mut atoms = Vec::with_capacity(len);
        let mut remaining = len;
        while idx != 0 {
            let atom = self.lengths_of(idx)[&remaining];
            atoms.push(self.table.sequence_at(atom));
            idx -= atom;
            remaining -= 1;
        }
        atoms
    }
}

/// Sets of factorization lengths `L(S)` by peeling atoms that contain the least
/// remaining element, memoized on the remaining sub-multiset. `max_steps`
/// bounds the number of atom peels examined.
pub fn length_set_bounded(ctx: &GroupCtx, seq: &Sequence, max_steps: u64) -> Result<LengthSet, EngineError> {
    let table = SubproductTable::build(ctx, seq, DEFAULT_STATE_CAP)?;
    if !table.product_one(table.full()) {
        return Err(EngineError::Precondition("sequence is not product-one"));
    }
    let mut fact = Factorizer {
        table: &table,
        atom_memo: vec![0; table.states()],
        lengths: BTreeMap::new(),
        steps: 0,
        budget: max_steps,
        exhausted: false,
    };
    let full = table.full();
    let lengths = fact.lengths_of(full);
    let mut factorizations = BTreeMap::new();
    for len in lengths.into_keys() {
        factorizations.insert(len, fact.factorization(full, len));
    }
    Ok(LengthSet {
        factorizations,
        exact: !fact.exhausted,
    })
}
