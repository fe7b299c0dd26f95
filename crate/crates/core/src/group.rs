//! The non-abelian group `C_q ⋊ C_p = <α, τ | α^q = τ^p = 1, ατ = τα^s>`.
//!
//! Elements are stored as exponent pairs `(a, b)` standing for `τ^a α^b`, and
//! indexed densely as `a·q + b`. Every index below `q` lies in the commutator
//! subgroup `G' = <α>`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{GroupError, ParseError};

/// Largest supported group order.
pub const MAX_ORDER: u32 = 4096;

/// Index of an element in the dense `a·q + b` encoding.
pub type ElemIdx = u16;

/// The identity always sits at index zero.
pub const IDENTITY: ElemIdx = 0;

/// Raw parameters `(p, q, s)`. Validation happens in [`GroupCtx::new`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupParams {
    pub p: u32,
    pub q: u32,
    pub s: u32,
}

impl GroupParams {
    pub const fn new(p: u32, q: u32, s: u32) -> Self {
        Self { p, q, s }
    }
}

impl fmt::Display for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.p, self.q, self.s)
    }
}

impl FromStr for GroupParams {
    type Err = ParseError;

    /// Parses the descriptor `"p,q,s"`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut parts = text.split(',').map(|t| t.trim());
        let mut next = |name: &'static str| -> Result<u32, ParseError> {
            let part = parts.next().ok_or(ParseError::GroupDescriptor)?;
            part.parse::<u32>().map_err(|_| ParseError::Integer { field: name })
        };
        let params = GroupParams::new(next("p")?, next("q")?, next("s")?);
        if parts.next().is_some() {
            return Err(ParseError::GroupDescriptor);
        }
        Ok(params)
    }
}

/// The element `τ^a α^b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub a: u32,
    pub b: u32,
}

impl Element {
    pub const IDENTITY: Element = Element { a: 0, b: 0 };

    pub const fn new(a: u32, b: u32) -> Self {
        Self { a, b }
    }

    /// Text form `t^a*a^b`.
    pub fn text(&self) -> alloc::string::String {
        alloc::format!("t^{}*a^{}", self.a, self.b)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

impl FromStr for Element {
    type Err = ParseError;

    /// Accepts the tuple form `(a,b)` and the text form `t^a*a^b`.
    /// Ranges are checked later against a concrete group.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let text = text.trim();
        if let Some(inner) = text.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
            let (a, b) = inner.split_once(',').ok_or(ParseError::Element)?;
            let a = a.trim().parse().map_err(|_| ParseError::Element)?;
            let b = b.trim().parse().map_err(|_| ParseError::Element)?;
            return Ok(Element::new(a, b));
        }
        let (t_part, a_part) = text.split_once('*').ok_or(ParseError::Element)?;
        let a = t_part
            .trim()
            .strip_prefix("t^")
            .ok_or(ParseError::Element)?
            .parse()
            .map_err(|_| ParseError::Element)?;
        let b = a_part
            .trim()
            .strip_prefix("a^")
            .ok_or(ParseError::Element)?
            .parse()
            .map_err(|_| ParseError::Element)?;
        Ok(Element::new(a, b))
    }
}

/// An automorphism stored as the full image permutation of element indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Automorphism {
    image: Vec<ElemIdx>,
}

impl Automorphism {
    pub fn identity(order: usize) -> Self {
        Self {
            image: (0..order as ElemIdx).collect(),
        }
    }

    #[inline]
    pub fn apply(&self, g: ElemIdx) -> ElemIdx {
        self.image[g as usize]
    }

    pub fn image(&self) -> &[ElemIdx] {
        &self.image
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        Automorphism {
            image: other.image.iter().map(|&g| self.apply(g)).collect(),
        }
    }
}

/// A generating pair `(x, y)` with `ord(x) = p`, `ord(y) = q` and `yx = x·y^s_eff`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GeneratorPair {
    pub x: ElemIdx,
    pub y: ElemIdx,
    pub s_eff: u32,
}

/// Validated group with cached tables. Immutable after construction.
#[derive(Clone, Debug)]
pub struct GroupCtx {
    params: GroupParams,
    order: usize,
    /// `s^i mod q` for `i in 0..p`.
    spow: Vec<u32>,
    inverse: Vec<ElemIdx>,
    orders: Vec<u32>,
    /// Full Cayley table for small groups (`order² ≤ CAYLEY_LIMIT`).
    cayley: Option<Vec<ElemIdx>>,
    /// Byte-chunk images for one-word right multiplication: entry
    /// `[g][chunk][byte]` is the mask `{h·g : h in byte << 8·chunk}`.
    shift: Vec<[u64; 256]>,
    chunks: usize,
}

const CAYLEY_LIMIT: usize = 1 << 16;

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Multiplicative order of `s` modulo `q`, or `None` when `s` is not a unit.
pub fn multiplicative_order(s: u32, q: u32) -> Option<u32> {
    let s = s % q;
    if s == 0 {
        return None;
    }
    let mut acc = s as u64;
    for k in 1..=q {
        if acc == 1 {
            return Some(k);
        }
        acc = acc * s as u64 % q as u64;
    }
    None
}

impl GroupCtx {
    pub fn new(params: GroupParams) -> Result<Self, GroupError> {
        let GroupParams { p, q, s } = params;
        if p % 2 == 0 || q % 2 == 0 {
            return Err(GroupError::EvenParameter { p, q });
        }
        if !is_prime(p) {
            return Err(GroupError::NotPrime { name: "p", value: p });
        }
        if !is_prime(q) {
            return Err(GroupError::NotPrime { name: "q", value: q });
        }
        if (q - 1) % p != 0 {
            return Err(GroupError::NotDividing { p, q });
        }
        match multiplicative_order(s, q) {
            Some(ord) if ord == p => {}
            found => return Err(GroupError::WrongResidueOrder { s, q, p, found }),
        }
        if p.checked_mul(q).is_none_or(|n| n > MAX_ORDER) {
            return Err(GroupError::TooLarge {
                order: p as u64 * q as u64,
            });
        }
        assert!(q > 2 * p, "odd primes with p | q-1 force q >= 2p+1");

        let order = (p * q) as usize;
        let mut spow = Vec::with_capacity(p as usize);
        let mut acc = 1u32;
        for _ in 0..p {
            spow.push(acc);
            acc = acc * (s % q) % q;
        }
        let mut ctx = GroupCtx {
            params: GroupParams::new(p, q, s % q),
            order,
            spow,
            inverse: Vec::new(),
            orders: Vec::new(),
            cayley: None,
            shift: Vec::new(),
            chunks: 0,
        };
        ctx.inverse = (0..order).map(|g| ctx.compute_inv(g as ElemIdx)).collect();
        ctx.orders = (0..order).map(|g| ctx.compute_order(g as ElemIdx)).collect();
        if order * order <= CAYLEY_LIMIT {
            let mut table = vec![0; order * order];
            for g in 0..order {
                for h in 0..order {
                    table[g * order + h] = ctx.mul_direct(g as ElemIdx, h as ElemIdx);
                }
            }
            ctx.cayley = Some(table);
        }
        if order <= 64 {
            ctx.chunks = order.div_ceil(8);
            ctx.shift = vec![[0u64; 256]; order * ctx.chunks];
            for g in 0..order {
                for chunk in 0..ctx.chunks {
                    let entry = &mut ctx.shift[g * ctx.chunks + chunk];
                    for byte in 1..256usize {
                        let low = byte.trailing_zeros() as usize;
                        let h = chunk * 8 + low;
                        let single = if h < order {
                            let prod = GroupCtx::mul_raw(&ctx.params, &ctx.spow, h as ElemIdx, g as ElemIdx);
                            1u64 << prod
                        } else {
                            0
                        };
                        entry[byte] = entry[byte & (byte - 1)] | single;
                    }
                }
            }
        }
        Ok(ctx)
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    pub fn p(&self) -> u32 {
        self.params.p
    }

    pub fn q(&self) -> u32 {
        self.params.q
    }

    pub fn s(&self) -> u32 {
        self.params.s
    }

    /// `|G| = pq`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// `s^e mod q` for any exponent.
    #[inline]
    pub fn s_pow(&self, e: u32) -> u32 {
        self.spow[(e % self.params.p) as usize]
    }

    #[inline]
    pub fn index(&self, g: Element) -> ElemIdx {
        (g.a * self.params.q + g.b) as ElemIdx
    }

    #[inline]
    pub fn element(&self, g: ElemIdx) -> Element {
        let q = self.params.q;
        Element::new(g as u32 / q, g as u32 % q)
    }

    /// Checks the exponent ranges and returns the index.
    pub fn checked_index(&self, g: Element) -> Result<ElemIdx, ParseError> {
        if g.a >= self.params.p || g.b >= self.params.q {
            return Err(ParseError::OutOfRange {
                a: g.a,
                b: g.b,
                p: self.params.p,
                q: self.params.q,
            });
        }
        Ok(self.index(g))
    }

    /// Membership in `G' = {(0, b)}`.
    #[inline]
    pub fn in_commutator(&self, g: ElemIdx) -> bool {
        (g as u32) < self.params.q
    }

    /// τ-degree `a` of `τ^a α^b`.
    #[inline]
    pub fn degree(&self, g: ElemIdx) -> u32 {
        g as u32 / self.params.q
    }

    #[inline]
    fn mul_raw(params: &GroupParams, spow: &[u32], g: ElemIdx, h: ElemIdx) -> ElemIdx {
        let q = params.q;
        let (a1, b1) = (g as u32 / q, g as u32 % q);
        let (a2, b2) = (h as u32 / q, h as u32 % q);
        let a = (a1 + a2) % params.p;
        let b = (b1 * spow[a2 as usize] + b2) % q;
        (a * q + b) as ElemIdx
    }

    #[inline]
    fn mul_direct(&self, g: ElemIdx, h: ElemIdx) -> ElemIdx {
        Self::mul_raw(&self.params, &self.spow, g, h)
    }

    /// `(a₁,b₁)·(a₂,b₂) = (a₁+a₂, b₁·s^{a₂} + b₂)`.
    #[inline]
    pub fn mul(&self, g: ElemIdx, h: ElemIdx) -> ElemIdx {
        match &self.cayley {
            Some(table) => table[g as usize * self.order + h as usize],
            None => self.mul_direct(g, h),
        }
    }

    pub fn mul_elements(&self, g: Element, h: Element) -> Element {
        self.element(self.mul(self.index(g), self.index(h)))
    }

    fn compute_inv(&self, g: ElemIdx) -> ElemIdx {
        let Element { a, b } = self.element(g);
        let (p, q) = (self.params.p, self.params.q);
        let a_inv = (p - a) % p;
        // (a,b)(a',b') = (0, b·s^{a'} + b') = identity  =>  b' = -b·s^{a'}
        let b_inv = (q - b * self.s_pow(a_inv) % q) % q;
        self.index(Element::new(a_inv, b_inv))
    }

    fn compute_order(&self, g: ElemIdx) -> u32 {
        let mut acc = g;
        let mut k = 1;
        while acc != IDENTITY {
            acc = self.mul_direct(acc, g);
            k += 1;
        }
        k
    }

    #[inline]
    pub fn inv(&self, g: ElemIdx) -> ElemIdx {
        self.inverse[g as usize]
    }

    #[inline]
    pub fn element_order(&self, g: ElemIdx) -> u32 {
        self.orders[g as usize]
    }

    /// `g^n` by square-and-multiply; negative exponents invert first.
    pub fn power(&self, g: ElemIdx, n: i64) -> ElemIdx {
        let (mut base, mut e) = if n < 0 {
            (self.inv(g), n.unsigned_abs())
        } else {
            (g, n as u64)
        };
        let mut acc = IDENTITY;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Closed form `(a·n, b·(s^{an} − 1)/(s^a − 1))` for `a ≠ 0`, else `(0, n·b)`.
    pub fn power_closed_form(&self, g: ElemIdx, n: i64) -> ElemIdx {
        let Element { a, b } = self.element(g);
        let (p, q) = (self.params.p as i64, self.params.q as i64);
        let n_p = n.rem_euclid(p * q);
        if a == 0 {
            return self.index(Element::new(0, (b as i64 * n_p % q) as u32));
        }
        // geometric sum 1 + s^a + ... + s^{a(n-1)} with n reduced mod p (the sum over
        // a full period vanishes mod q)
        let m = n.rem_euclid(p) as u32;
        let ratio = self.s_pow(a) as u64;
        let mut sum = 0u64;
        let mut term = 1u64;
        for _ in 0..m {
            sum = (sum + term) % q as u64;
            term = term * ratio % q as u64;
        }
        let new_a = (a as i64 * n).rem_euclid(p) as u32;
        self.index(Element::new(new_a, (b as u64 * sum % q as u64) as u32))
    }

    pub fn elements(&self) -> impl Iterator<Item = ElemIdx> + '_ {
        (0..self.order).map(|g| g as ElemIdx)
    }

    pub fn commutes(&self, g: ElemIdx, h: ElemIdx) -> bool {
        self.mul(g, h) == self.mul(h, g)
    }

    /// `h^{-1} g h`.
    pub fn conjugate(&self, g: ElemIdx, h: ElemIdx) -> ElemIdx {
        self.mul(self.mul(self.inv(h), g), h)
    }

    /// Closure of `gens` under multiplication (finite group, so inverses follow).
    pub fn subgroup_generated(&self, gens: &[ElemIdx]) -> BTreeSet<ElemIdx> {
        let mut members = BTreeSet::new();
        members.insert(IDENTITY);
        let mut frontier: Vec<ElemIdx> = vec![IDENTITY];
        while let Some(h) = frontier.pop() {
            for &g in gens {
                let prod = self.mul(h, g);
                if members.insert(prod) {
                    frontier.push(prod);
                }
            }
        }
        members
    }

    /// All automorphisms, found by trying every image pair `τ ↦ t`, `α ↦ u`
    /// with `ord(t) = p`, `ord(u) = q` and keeping those that respect the relations.
    pub fn automorphisms(&self) -> Vec<Automorphism> {
        let (p, q) = (self.params.p, self.params.q);
        let mut out = Vec::new();
        for t in self.elements().filter(|&g| self.element_order(g) == p) {
            for u in self.elements().filter(|&g| self.element_order(g) == q) {
                // α τ = τ α^s  ↦  u t = t u^s
                if self.mul(u, t) != self.mul(t, self.power(u, self.params.s as i64)) {
                    continue;
                }
                let mut image = vec![0 as ElemIdx; self.order];
                let t_pows: Vec<ElemIdx> = (0..p).map(|k| self.power(t, k as i64)).collect();
                let u_pows: Vec<ElemIdx> = (0..q).map(|k| self.power(u, k as i64)).collect();
                for g in self.elements() {
                    let Element { a, b } = self.element(g);
                    image[g as usize] = self.mul(t_pows[a as usize], u_pows[b as usize]);
                }
                let mut seen = vec![false; self.order];
                let bijective = image.iter().all(|&h| !core::mem::replace(&mut seen[h as usize], true));
                if bijective {
                    out.push(Automorphism { image });
                }
            }
        }
        out.sort();
        out
    }

    /// Whether `image` is a multiplicative bijection, checked on all pairs.
    pub fn is_automorphism(&self, phi: &Automorphism) -> bool {
        if phi.image.len() != self.order {
            return false;
        }
        let mut seen = vec![false; self.order];
        if phi
            .image
            .iter()
            .any(|&h| core::mem::replace(&mut seen[h as usize], true))
        {
            return false;
        }
        self.elements().all(|g| {
            self.elements()
                .all(|h| phi.apply(self.mul(g, h)) == self.mul(phi.apply(g), phi.apply(h)))
        })
    }

    /// The residue `s_eff` with `x^{-1} y x = y^{s_eff}`, when `y ∈ G'∖{1}`.
    pub fn effective_residue(&self, x: ElemIdx, y: ElemIdx) -> Option<u32> {
        if y == IDENTITY || !self.in_commutator(y) {
            return None;
        }
        let conj = self.conjugate(y, x);
        if !self.in_commutator(conj) {
            return None;
        }
        let q = self.params.q;
        let (b_y, b_c) = (self.element(y).b, self.element(conj).b);
        // b_c = s_eff · b_y (mod q)
        let inv_b = modpow(b_y, q - 2, q);
        Some((b_c as u64 * inv_b as u64 % q as u64) as u32)
    }

    /// Every pair `(x, y)` with `ord(x) = p`, `ord(y) = q`, with its residue.
    pub fn generator_pairs(&self) -> Vec<GeneratorPair> {
        let (p, q) = (self.params.p, self.params.q);
        let mut out = Vec::new();
        for x in self.elements().filter(|&g| self.element_order(g) == p) {
            for y in self.elements().filter(|&g| self.element_order(g) == q) {
                if let Some(s_eff) = self.effective_residue(x, y) {
                    out.push(GeneratorPair { x, y, s_eff });
                }
            }
        }
        out
    }

    /// Validates a generator pair and returns its residue.
    pub fn generator_pair(&self, x: ElemIdx, y: ElemIdx) -> Result<GeneratorPair, GroupError> {
        let (p, q) = (self.params.p, self.params.q);
        if (x as usize) >= self.order || (y as usize) >= self.order {
            return Err(GroupError::InvalidGeneratorPair);
        }
        if self.element_order(x) != p || self.element_order(y) != q {
            return Err(GroupError::InvalidGeneratorPair);
        }
        let s_eff = self.effective_residue(x, y).ok_or(GroupError::InvalidGeneratorPair)?;
        if multiplicative_order(s_eff, q) != Some(p) {
            return Err(GroupError::InvalidGeneratorPair);
        }
        Ok(GeneratorPair { x, y, s_eff })
    }

    /// Right multiplication of a one-word element set by `g`.
    #[inline]
    pub(crate) fn shift_word(&self, mut set: u64, g: ElemIdx) -> u64 {
        let base = g as usize * self.chunks;
        let mut out = 0u64;
        let mut chunk = 0;
        while set != 0 {
            out |= self.shift[base + chunk][(set & 0xff) as usize];
            set >>= 8;
            chunk += 1;
        }
        out
    }

    pub(crate) fn single_word(&self) -> bool {
        self.order <= 64
    }
}

pub(crate) fn modpow(base: u32, mut exp: u32, modulus: u32) -> u32 {
    let m = modulus as u64;
    let mut b = base as u64 % m;
    let mut acc = 1u64 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u32
}
