//! Order-independent multiset digest of findings.
//!
//! Each item is hashed to 128 bits and the hashes are summed with wrapping
//! arithmetic, so merging partial digests from any shard split yields the
//! same value as a single pass.

use alloc::format;
use alloc::string::String;

use crate::sequence::Sequence;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct FindingsDigest {
    pub lanes: [u64; 2],
    pub count: u64,
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(seed: u64, bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET ^ seed;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// splitmix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn encode(seq: &Sequence, out: &mut alloc::vec::Vec<u8>) {
    out.clear();
    for &(g, m) in seq.entries() {
        out.extend_from_slice(&g.to_le_bytes());
        out.extend_from_slice(&m.to_le_bytes());
    }
}

impl FindingsDigest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_bytes(&mut self, bytes: &[u8]) {
        self.lanes[0] = self.lanes[0].wrapping_add(mix64(fnv1a(0, bytes)));
        self.lanes[1] = self.lanes[1].wrapping_add(mix64(fnv1a(0x9e37_79b9_7f4a_7c15, bytes)));
        self.count += 1;
    }

    pub fn add(&mut self, seq: &Sequence) {
        let mut buf = alloc::vec::Vec::with_capacity(seq.entries().len() * 6);
        encode(seq, &mut buf);
        self.add_bytes(&buf);
    }

    pub fn merge(&mut self, other: &FindingsDigest) {
        self.lanes[0] = self.lanes[0].wrapping_add(other.lanes[0]);
        self.lanes[1] = self.lanes[1].wrapping_add(other.lanes[1]);
        self.count += other.count;
    }

    pub fn hex(&self) -> String {
        format!("{:016x}{:016x}", self.lanes[0], self.lanes[1])
    }

    pub fn from_hex(text: &str, count: u64) -> Option<Self> {
        if text.len() != 32 || !text.is_ascii() {
            return None;
        }
        let hi = u64::from_str_radix(&text[..16], 16).ok()?;
        let lo = u64::from_str_radix(&text[16..], 16).ok()?;
        Some(Self { lanes: [hi, lo], count })
    }
}
