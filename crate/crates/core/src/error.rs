use core::fmt;

/// Rejected group parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupError {
    EvenParameter {
        p: u32,
        q: u32,
    },
    NotPrime {
        name: &'static str,
        value: u32,
    },
    NotDividing {
        p: u32,
        q: u32,
    },
    /// `found` is the actual order of `s` mod `q` (`None` if `s` is not a unit).
    WrongResidueOrder {
        s: u32,
        q: u32,
        p: u32,
        found: Option<u32>,
    },
    TooLarge {
        order: u64,
    },
    InvalidGeneratorPair,
}

impl fmt::Display for GroupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupError::EvenParameter { p, q } => {
                write!(f, "p and q must be odd primes (got p={p}, q={q})")
            }
            GroupError::NotPrime { name, value } => write!(f, "{name}={value} is not prime"),
            GroupError::NotDividing { p, q } => write!(f, "p={p} does not divide q-1={}", q - 1),
            GroupError::WrongResidueOrder {
                s,
                q,
                p,
                found: Some(ord),
            } => {
                write!(f, "ord_{q}({s}) = {ord}, expected {p}")
            }
            GroupError::WrongResidueOrder { s, q, .. } => write!(f, "s={s} is not a unit mod {q}"),
            GroupError::TooLarge { order } => {
                write!(
                    f,
                    "group order {order} exceeds the supported maximum {}",
                    crate::group::MAX_ORDER
                )
            }
            GroupError::InvalidGeneratorPair => {
                write!(f, "(x, y) is not a generator pair with ord(x)=p, ord(y)=q")
            }
        }
    }
}

/// Malformed text input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseError {
    GroupDescriptor,
    Integer { field: &'static str },
    Element,
    OutOfRange { a: u32, b: u32, p: u32, q: u32 },
    Term,
    ZeroMultiplicity,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::GroupDescriptor => write!(f, "group descriptor must look like \"p,q,s\""),
            ParseError::Integer { field } => write!(f, "{field} is not a non-negative integer"),
            ParseError::Element => write!(f, "element must look like \"(a,b)\" or \"t^a*a^b\""),
            ParseError::OutOfRange { a, b, p, q } => {
                write!(f, "element ({a},{b}) out of range for p={p}, q={q}")
            }
            ParseError::Term => write!(f, "malformed sequence term"),
            ParseError::ZeroMultiplicity => write!(f, "multiplicity must be positive"),
        }
    }
}

/// Failures of the subproduct engine and the searches built on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EngineError {
    /// The DP over sub-multisets would need more states than the cap allows.
    TooWide { states: u128, cap: u64 },
    /// The operation needs a nonempty sequence.
    Empty,
    /// The brute-force oracle was asked for a sequence longer than it supports.
    OracleTooLong { len: usize, max: usize },
    /// The sequence does not satisfy a stated precondition.
    Precondition(&'static str),
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::TooWide { states, cap } => {
                write!(f, "sequence too wide: {states} DP states exceed the cap of {cap}")
            }
            EngineError::Empty => write!(f, "sequence must be nonempty"),
            EngineError::OracleTooLong { len, max } => {
                write!(f, "oracle supports length <= {max}, got {len}")
            }
            EngineError::Precondition(what) => write!(f, "precondition failed: {what}"),
        }
    }
}

impl core::error::Error for GroupError {}
impl core::error::Error for ParseError {}
impl core::error::Error for EngineError {}
