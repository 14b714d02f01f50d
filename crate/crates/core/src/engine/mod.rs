//! The streaming period-detection engines.

pub mod onepass;
pub mod report;
pub mod twopass;
