use alloc::vec;
use alloc::vec::Vec;

use crate::group::{ElemIdx, GroupCtx};

/// A subset of `G` as a dense bitset over element indices. Groups of order
/// at most 64 use a single word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProductSet {
    words: Vec<u64>,
}

pub(crate) fn words_for(order: usize) -> usize {
    order.div_ceil(64)
}

impl ProductSet {
    pub fn empty(ctx: &GroupCtx) -> Self {
        Self {
            words: vec![0; words_for(ctx.order())],
        }
    }

    pub fn from_words(words: Vec<u64>) -> Self {
        Self { words }
    }

    pub fn from_elements<I: IntoIterator<Item = ElemIdx>>(ctx: &GroupCtx, elems: I) -> Self {
        let mut set = Self::empty(ctx);
        for g in elems {
            set.insert(g);
        }
        set
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, g: ElemIdx) -> bool {
        let g = g as usize;
        self.words[g / 64] >> (g % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, g: ElemIdx) {
        let g = g as usize;
        self.words[g / 64] |= 1 << (g % 64);
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union_with(&mut self, other: &ProductSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn is_subset(&self, other: &ProductSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = ElemIdx> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            core::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some((i * 64 + bit) as ElemIdx)
            })
        })
    }

    /// The product-set `AB = {ab : a ∈ A, b ∈ B}`.
    pub fn product(&self, ctx: &GroupCtx, other: &ProductSet) -> ProductSet {
        let mut out = ProductSet::empty(ctx);
        for b in other.iter() {
            shift_into(ctx, &self.words, b, &mut out.words);
        }
        out
    }

    /// `A^G`, the union of conjugates of every element.
    pub fn conjugation_closure(&self, ctx: &GroupCtx) -> ProductSet {
        let mut out = ProductSet::empty(ctx);
        for a in self.iter() {
            for h in ctx.elements() {
                out.insert(ctx.conjugate(a, h));
            }
        }
        out
    }
}

/// `dst |= src · g` on raw bitset words.
#[inline]
pub(crate) fn shift_into(ctx: &GroupCtx, src: &[u64], g: ElemIdx, dst: &mut [u64]) {
    if ctx.single_word() {
        dst[0] |= ctx.shift_word(src[0], g);
        return;
    }
    for (i, &w) in src.iter().enumerate() {
        let mut rest = w;
        while rest != 0 {
            let h = (i * 64 + rest.trailing_zeros() as usize) as ElemIdx;
            rest &= rest - 1;
            let prod = ctx.mul(h, g) as usize;
            dst[prod / 64] |= 1 << (prod % 64);
        }
    }
}
