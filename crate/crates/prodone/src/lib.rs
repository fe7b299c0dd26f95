//! Certificates, checkpoint files, the multi-threaded shard runner and the
//! `prodone` command line, on top of `prodone-core`.

pub mod cert;
pub mod check;
pub mod checkpoint;
pub mod cli;
pub mod error;
pub mod payload;
pub mod runner;

pub use cert::{Certificate, Kind};
pub use check::{check_certificate, Verdict};
pub use error::{Error, Result};
