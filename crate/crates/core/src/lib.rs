//! Streaming detection of periodic structure in symbol streams that contain
//! wildcard characters.
//!
//! A stream `S` of `n` symbols may contain up to `k` wildcards, each of which
//! can stand for any single alphabet symbol (one value per position). `S` has
//! wildcard-period `p` when some assignment to the wildcards makes the length
//! `n - p` prefix equal the length `n - p` suffix. This crate provides:
//!
//! * a two-pass engine that reports every wildcard-period in `[1, n-1]`
//!   ([`find_wildcard_periods`]), compressing first-pass candidates into
//!   per-interval arithmetic progressions and verifying them in the second
//!   pass with run-length compressed block fingerprints and deferred
//!   wildcard assignments;
//! * a one-pass engine for periods up to `n/2` under the promise that no
//!   wildcard falls in the last `p` symbols ([`onepass_periods`]);
//! * exact and streaming estimators for the distance to `p`-periodicity
//!   ([`distance`]);
//! * quadratic-time ground-truth oracles and an adversarial instance
//!   generator used by the test suites ([`oracle`]).
//!
//! All randomness flows from an explicit seed, so runs are reproducible.

pub mod assignments;
pub mod candidates;
pub mod distance;
pub mod engine;
pub mod error;
pub mod fingerprint;
pub mod mismatch;
pub mod oracle;
pub mod rng;
pub mod stats;
pub mod stream;
pub mod symbols;

pub use engine::onepass::{check_promise, onepass_periods, OnePassEngine};
pub use engine::report::PeriodReport;
pub use engine::twopass::{find_wildcard_periods, TwoPassEngine};
pub use error::{Error, Result};
pub use fingerprint::{Fingerprint, FingerprintContext, HoleyFingerprint};
pub use mismatch::SubroutineKind;
pub use stats::SpaceStats;
pub use symbols::{Symbol, WildcardString};

/// Default seed used by the command-line tool and the Python bindings when
/// none is supplied.
pub const DEFAULT_SEED: u64 = 42;
