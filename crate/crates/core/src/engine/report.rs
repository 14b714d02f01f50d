//! The result record shared by both engines.

use serde::Serialize;

use crate::stats::SpaceStats;

/// Verified wildcard-periods plus instrumentation.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodReport {
    pub n: usize,
    pub k_declared: usize,
    pub k_found: usize,
    /// Verified wildcard-periods, sorted ascending.
    pub periods: Vec<usize>,
    pub smallest_period: Option<usize>,
    /// One-pass engine only: set when the verified set includes `n/2`
    /// exactly (the value also appears in `periods`).
    pub boundary_period: Option<usize>,
    /// One-pass engine only: reported periods `p` for which a wildcard sits
    /// in the last `p` symbols, voiding the engine's guarantee.
    pub promise_violations: Vec<usize>,
    pub stats: SpaceStats,
}

impl PeriodReport {
    pub fn new(n: usize, k_declared: usize, k_found: usize, mut periods: Vec<usize>) -> Self {
        periods.sort_unstable();
        periods.dedup();
        let smallest_period = periods.first().copied();
        Self {
            n,
            k_declared,
            k_found,
            periods,
            smallest_period,
            boundary_period: None,
            promise_violations: Vec::new(),
            stats: SpaceStats::default(),
        }
    }
}
