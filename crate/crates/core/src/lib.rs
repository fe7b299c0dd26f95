//! Exact combinatorics of product-one sequences over the non-abelian groups
//! `C_q ⋊ C_p` of order `pq`.
//!
//! The crate is `no_std` (it needs `alloc`). IO, certificates and the
//! command-line front end live in the `prodone` crate.

#![no_std]

extern crate alloc;

pub mod digest;
pub mod engine;
pub mod enumeration;
pub mod error;
pub mod group;
pub mod invariants;
pub mod oracles;
pub mod product_set;
pub mod sequence;

pub use engine::{AtomVerdict, Classification, LengthSet};
pub use error::{EngineError, GroupError, ParseError};
pub use group::{Automorphism, ElemIdx, Element, GeneratorPair, GroupCtx, GroupParams};
pub use product_set::ProductSet;
pub use sequence::Sequence;
