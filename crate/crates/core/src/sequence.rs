//! Sequences over `G`: finite multisets stored as sorted `(element, multiplicity)` runs.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt::Write;

use crate::error::ParseError;
use crate::group::{Automorphism, ElemIdx, Element, GroupCtx};

/// A multiset of group elements. Entries are sorted by element index with
/// positive multiplicities, so derived equality is multiset equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Sequence {
    entries: Vec<(ElemIdx, u32)>,
    len: usize,
}

impl Ord for Sequence {
    /// Lexicographic on the sorted `(element index, multiplicity)` runs.
    fn cmp(&self, other: &Self) -> Ordering {
        self.entries.cmp(&other.entries)
    }
}

impl PartialOrd for Sequence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Sequence {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds from arbitrary `(element, multiplicity)` pairs; zero multiplicities are dropped
    /// and repeated elements merged.
    pub fn from_counts<I: IntoIterator<Item = (ElemIdx, u32)>>(counts: I) -> Self {
        let mut entries: Vec<(ElemIdx, u32)> = counts.into_iter().filter(|&(_, m)| m > 0).collect();
        entries.sort_unstable();
        let mut merged: Vec<(ElemIdx, u32)> = Vec::with_capacity(entries.len());
        for (g, m) in entries {
            match merged.last_mut() {
                Some((h, n)) if *h == g => *n += m,
                _ => merged.push((g, m)),
            }
        }
        let len = merged.iter().map(|&(_, m)| m as usize).sum();
        Self { entries: merged, len }
    }

    pub fn from_terms<I: IntoIterator<Item = ElemIdx>>(terms: I) -> Self {
        Self::from_counts(terms.into_iter().map(|g| (g, 1)))
    }

    /// `g^{[k]}`.
    pub fn power(g: ElemIdx, k: u32) -> Self {
        Self::from_counts([(g, k)])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn entries(&self) -> &[(ElemIdx, u32)] {
        &self.entries
    }

    pub fn support(&self) -> impl Iterator<Item = ElemIdx> + '_ {
        self.entries.iter().map(|&(g, _)| g)
    }

    /// `v_g(S)`.
    pub fn multiplicity(&self, g: ElemIdx) -> u32 {
        self.entries
            .binary_search_by_key(&g, |&(h, _)| h)
            .map_or(0, |i| self.entries[i].1)
    }

    /// Terms in nondecreasing order, repeated by multiplicity.
    pub fn terms(&self) -> impl Iterator<Item = ElemIdx> + '_ {
        self.entries
            .iter()
            .flat_map(|&(g, m)| core::iter::repeat_n(g, m as usize))
    }

    /// `v_K(S)` for `K` given as a predicate.
    pub fn count_where<F: Fn(ElemIdx) -> bool>(&self, in_k: F) -> usize {
        self.entries
            .iter()
            .filter(|&&(g, _)| in_k(g))
            .map(|&(_, m)| m as usize)
            .sum()
    }

    /// `S·T`.
    pub fn concat(&self, other: &Sequence) -> Sequence {
        Sequence::from_counts(self.entries.iter().chain(other.entries.iter()).copied())
    }

    /// `T | S`.
    pub fn divides(&self, other: &Sequence) -> bool {
        self.entries.iter().all(|&(g, m)| other.multiplicity(g) >= m)
    }

    /// `S·T^{[-1]}`, defined only when `T | S`.
    pub fn remove(&self, sub: &Sequence) -> Option<Sequence> {
        if !sub.divides(self) {
            return None;
        }
        Some(Sequence::from_counts(
            self.entries.iter().map(|&(g, m)| (g, m - sub.multiplicity(g))),
        ))
    }

    /// Image under an automorphism.
    pub fn map(&self, phi: &Automorphism) -> Sequence {
        Sequence::from_counts(self.entries.iter().map(|&(g, m)| (phi.apply(g), m)))
    }

    /// The sequence of inverses `S^{(-1)}`.
    pub fn inverse(&self, ctx: &GroupCtx) -> Sequence {
        Sequence::from_counts(self.entries.iter().map(|&(g, m)| (ctx.inv(g), m)))
    }

    /// Sum of τ-degrees mod p; `π(S)` lies in the `G'`-coset of this degree.
    pub fn degree_sum(&self, ctx: &GroupCtx) -> u32 {
        let p = ctx.p() as u64;
        (self
            .entries
            .iter()
            .map(|&(g, m)| ctx.degree(g) as u64 * m as u64)
            .sum::<u64>()
            % p) as u32
    }

    /// Parses `"(0,1)^12,(1,0),(2,5)"`; terms may also use `t^a*a^b`.
    pub fn parse(ctx: &GroupCtx, text: &str) -> Result<Sequence, ParseError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Sequence::empty());
        }
        let mut counts = Vec::new();
        for term in split_terms(text)? {
            let term = term.trim();
            let (elem_text, mult) = match term.strip_prefix('(') {
                Some(_) => {
                    let close = term.find(')').ok_or(ParseError::Term)?;
                    let rest = &term[close + 1..];
                    let mult = match rest.trim() {
                        "" => 1,
                        r => r
                            .strip_prefix('^')
                            .ok_or(ParseError::Term)?
                            .trim()
                            .parse::<u32>()
                            .map_err(|_| ParseError::Term)?,
                    };
                    (&term[..=close], mult)
                }
                None => {
                    // t^a*a^b or t^a*a^b^m
                    let (head, tail) = term.split_once('*').ok_or(ParseError::Term)?;
                    let mut pieces = tail.split('^');
                    let _ = pieces.next();
                    let _ = pieces.next();
                    match pieces.next() {
                        None => (term, 1),
                        Some(m) => {
                            let cut = head.len() + 1 + tail.rfind('^').ok_or(ParseError::Term)?;
                            (&term[..cut], m.trim().parse().map_err(|_| ParseError::Term)?)
                        }
                    }
                }
            };
            if mult == 0 {
                return Err(ParseError::ZeroMultiplicity);
            }
            let elem: Element = elem_text.parse()?;
            counts.push((ctx.checked_index(elem)?, mult));
        }
        Ok(Sequence::from_counts(counts))
    }

    /// Canonical tuple-form text, sorted by element index.
    pub fn format(&self, ctx: &GroupCtx) -> String {
        let mut out = String::new();
        for (i, &(g, m)) in self.entries.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", ctx.element(g));
            if m > 1 {
                let _ = write!(out, "^{m}");
            }
        }
        out
    }
}

/// Splits on commas that are not inside parentheses.
fn split_terms(text: &str) -> Result<Vec<&str>, ParseError> {
    let mut depth = 0i32;
    let mut start = 0;
    let mut out = Vec::new();
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(ParseError::Term);
                }
            }
            ',' if depth == 0 => {
                out.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(ParseError::Term);
    }
    out.push(&text[start..]);
    if out.iter().any(|t| t.trim().is_empty()) {
        return Err(ParseError::Term);
    }
    Ok(out)
}
