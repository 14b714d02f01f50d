//! Space-usage instrumentation.
//!
//! The engines count what they retain so tests can assert growth curves from
//! run reports alone: engine-layer fingerprints and assignment entries are
//! tracked separately from the candidate finder's own working memory.

use serde::Serialize;

#[derive(Debug, Clone, Default, Serialize, PartialEq, Eq)]
pub struct SpaceStats {
    /// Fingerprints retained by the verification layer: position snapshots,
    /// block-run fingerprints and their cumulative forms, and per-candidate
    /// live fingerprints.
    pub fingerprints_stored: u64,
    /// Run-length entries recorded in wildcard assignment chains.
    pub assignment_entries: u64,
    /// Non-empty candidate buckets across all levels.
    pub buckets_nonempty: u64,
    /// Peak working-set words across all candidate-finder instances.
    pub kmismatch_space_words: u64,
    /// Buckets whose block-run chain outgrew the recording cap (their
    /// candidates are rejected rather than verified).
    pub cap_overflows: u64,
    /// Buckets whose assignment chains outgrew the expected distinct-entry
    /// bound. Counted, not fatal.
    pub assignment_bound_overflows: u64,
}

impl SpaceStats {
    pub fn add_fingerprints(&mut self, count: u64) {
        self.fingerprints_stored += count;
    }

    pub fn add_assignment_entries(&mut self, count: u64) {
        self.assignment_entries += count;
    }

    pub fn merge(&mut self, other: &SpaceStats) {
        self.fingerprints_stored += other.fingerprints_stored;
        self.assignment_entries += other.assignment_entries;
        self.buckets_nonempty += other.buckets_nonempty;
        self.kmismatch_space_words = self.kmismatch_space_words.max(other.kmismatch_space_words);
        self.cap_overflows += other.cap_overflows;
        self.assignment_bound_overflows += other.assignment_bound_overflows;
    }
}
