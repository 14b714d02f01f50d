//! Recorded wildcard context chains and assignment resolution.
//!
//! A candidate period `T` forces every wildcard `w` to take the value of
//! some non-wildcard symbol at a position congruent to `w` modulo `T`. For a
//! bucket with anchor `t`, gap gcd `step` and largest recoverable candidate
//! `t + max_c * step`, the positions `w ± (t + c * step)` cover `w ± T` for
//! every candidate `T` in the bucket, so one streaming scan can capture
//! everything resolution will ever need. Values are stored run-length
//! compressed: repetitive streams produce long runs of identical chain
//! values, and the distinct-entry count per bucket stays small even when the
//! chains themselves are long.
//!
//! Resolution first looks at the directly recorded `w - T` and `w + T`
//! values. When both are wildcards, the neighbouring wildcard's own chain
//! carries the continuation (`w - 2T` is `w' - T` for the wildcard `w'` at
//! `w - T`), so a scan across the bucket's recorded positions finds the
//! nearest non-wildcard in the residue class if one was ever reachable.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::symbols::{Symbol, WildcardString};

/// Resolution result for one wildcard against one candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assignment {
    /// The wildcard must take this symbol.
    Resolved(Symbol),
    /// Every recorded position in the residue class is a wildcard; any
    /// alphabet symbol satisfies the constraint.
    Free,
}

/// Identifies a bucket across levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BucketRef {
    pub level: u32,
    pub j: u64,
}

#[derive(Debug, Clone, Copy)]
struct ChainSpec {
    /// The wildcard position this chain belongs to.
    w: usize,
    /// +1 records positions after `w`, -1 positions before it.
    sign: i8,
    /// Bucket anchor.
    base: usize,
    /// Gap gcd, or 0 for single-candidate buckets.
    step: usize,
    /// Chain index runs c = 0..=max_c.
    max_c: usize,
}

impl ChainSpec {
    fn position(&self, c: usize) -> Option<usize> {
        let offset = self.base + c * self.step;
        if self.sign > 0 {
            Some(self.w + offset)
        } else {
            self.w.checked_sub(offset)
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Run {
    c_lo: usize,
    c_hi: usize,
    value: Symbol,
}

#[derive(Debug)]
struct Chain {
    spec: ChainSpec,
    runs: Vec<Run>,
}

impl Chain {
    fn push(&mut self, c: usize, value: Symbol) -> bool {
        if let Some(last) = self.runs.last_mut() {
            if last.value == value {
                if c == last.c_hi + 1 {
                    last.c_hi = c;
                    return false;
                }
                if c + 1 == last.c_lo {
                    last.c_lo = c;
                    return false;
                }
            }
        }
        self.runs.push(Run {
            c_lo: c,
            c_hi: c,
            value,
        });
        true
    }

    fn value_at(&self, c: usize) -> Option<Symbol> {
        self.runs
            .iter()
            .find(|r| r.c_lo <= c && c <= r.c_hi)
            .map(|r| r.value)
    }
}

#[derive(Debug, Default)]
struct BucketChains {
    chains: Vec<Chain>,
    entries: usize,
}

#[derive(Debug, Clone, Copy)]
struct SamplePoint {
    pos: usize,
    bucket_idx: usize,
    chain_idx: usize,
    c: usize,
}

/// Context chains for every (bucket, wildcard) pair, filled by one
/// left-to-right scan.
pub struct AssignmentTable {
    n: usize,
    wildcards: Vec<usize>,
    bucket_index: HashMap<BucketRef, usize>,
    buckets: Vec<BucketChains>,
    plan: Vec<SamplePoint>,
    cursor: usize,
    planned: bool,
    total_entries: u64,
    /// Per-bucket distinct-entry bound; exceeding it is counted, not fatal.
    per_bucket_bound: usize,
    bound_overflows: u64,
}

impl AssignmentTable {
    pub fn new(n: usize, k: usize, wildcards: Vec<usize>) -> Self {
        let log_n = crate::candidates::ceil_log2(n) as usize;
        Self {
            n,
            wildcards,
            bucket_index: HashMap::new(),
            buckets: Vec::new(),
            plan: Vec::new(),
            cursor: 0,
            planned: false,
            total_entries: 0,
            per_bucket_bound: 256 * k * k * log_n + k,
            bound_overflows: 0,
        }
    }

    /// Register a frozen bucket before the scan: chains for every wildcard
    /// in both directions, spanning every recoverable candidate.
    pub fn add_bucket(&mut self, bucket: BucketRef, anchor: usize, pi: i64, max_c: usize) {
        assert!(
            !self.planned,
            "buckets must be added before the scan plan is built"
        );
        let step = if pi > 0 { pi as usize } else { 0 };
        let mut chains = Vec::with_capacity(2 * self.wildcards.len());
        for &w in &self.wildcards {
            for sign in [-1i8, 1] {
                chains.push(Chain {
                    spec: ChainSpec {
                        w,
                        sign,
                        base: anchor,
                        step,
                        max_c,
                    },
                    runs: Vec::new(),
                });
            }
        }
        let bucket_idx = self.buckets.len();
        self.bucket_index.insert(bucket, bucket_idx);
        self.buckets.push(BucketChains { chains, entries: 0 });
    }

    /// Sorted positions the scan must sample. Call once, after all buckets
    /// are registered.
    pub fn build_plan(&mut self) {
        assert!(!self.planned);
        for (bucket_idx, bucket) in self.buckets.iter().enumerate() {
            for (chain_idx, chain) in bucket.chains.iter().enumerate() {
                let spec = chain.spec;
                for c in 0..=spec.max_c {
                    if let Some(pos) = spec.position(c) {
                        if pos >= 1 && pos <= self.n {
                            self.plan.push(SamplePoint {
                                pos,
                                bucket_idx,
                                chain_idx,
                                c,
                            });
                        }
                    }
                    if spec.step == 0 {
                        break;
                    }
                }
            }
        }
        self.plan.sort_by_key(|p| p.pos);
        self.planned = true;
    }

    /// Absorb the symbol at 1-based position `pos`. Positions must arrive in
    /// increasing order; positions with no scheduled sample are cheap.
    pub fn absorb(&mut self, pos: usize, sym: Symbol) {
        debug_assert!(self.planned, "build_plan must run before the scan");
        while self.cursor < self.plan.len() && self.plan[self.cursor].pos == pos {
            let point = self.plan[self.cursor];
            self.cursor += 1;
            let bucket = &mut self.buckets[point.bucket_idx];
            if bucket.chains[point.chain_idx].push(point.c, sym) {
                bucket.entries += 1;
                self.total_entries += 1;
                if bucket.entries == self.per_bucket_bound + 1 {
                    self.bound_overflows += 1;
                }
            }
        }
    }

    /// Resolve the assignment of wildcard `w` with respect to candidate
    /// `candidate` recoverable from `bucket`.
    pub fn resolve(&self, bucket: BucketRef, w: usize, candidate: usize) -> Result<Assignment> {
        if !self.wildcards.contains(&w) {
            return Err(Error::NotAWildcard { pos: w });
        }
        let bucket = &self.buckets[*self
            .bucket_index
            .get(&bucket)
            .unwrap_or_else(|| panic!("unregistered bucket {bucket:?}"))];

        // Fast path: the chain entries of w itself at the candidate's own
        // chain index are w -+ candidate, the nearest possible sources. Ties
        // break toward the left.
        let mut nearest: Option<(usize, usize, Symbol)> = None; // (dist, tiebreak, value)
        for chain in bucket.chains.iter().filter(|ch| ch.spec.w == w) {
            let b = chain_index_for(chain.spec, candidate);
            if let Some(c) = b {
                if let Some(value) = chain.value_at(c) {
                    if !value.is_wildcard() {
                        let tiebreak = if chain.spec.sign < 0 { 0 } else { 1 };
                        let entry = (candidate, tiebreak, value);
                        if nearest.is_none_or(|cur| (entry.0, entry.1) < (cur.0, cur.1)) {
                            nearest = Some(entry);
                        }
                    }
                }
            }
        }
        if let Some((_, _, value)) = nearest {
            return Ok(Assignment::Resolved(value));
        }

        // Slow path: any recorded non-wildcard at a position congruent to w
        // modulo the candidate, nearest first.
        let mut best: Option<(usize, usize, Symbol)> = None;
        for chain in &bucket.chains {
            for run in &chain.runs {
                if run.value.is_wildcard() {
                    continue;
                }
                for c in run.c_lo..=run.c_hi {
                    let Some(pos) = chain.spec.position(c) else {
                        continue;
                    };
                    if pos < 1 || pos > self.n || pos == w {
                        continue;
                    }
                    let dist = pos.abs_diff(w);
                    if dist % candidate != 0 {
                        continue;
                    }
                    let tiebreak = if pos < w { 0 } else { 1 };
                    let entry = (dist, tiebreak, run.value);
                    if best.is_none_or(|cur| (entry.0, entry.1) < (cur.0, cur.1)) {
                        best = Some(entry);
                    }
                }
            }
        }
        Ok(match best {
            Some((_, _, value)) => Assignment::Resolved(value),
            None => Assignment::Free,
        })
    }

    pub fn total_entries(&self) -> u64 {
        self.total_entries
    }

    pub fn bound_overflows(&self) -> u64 {
        self.bound_overflows
    }

    pub fn wildcards(&self) -> &[usize] {
        &self.wildcards
    }
}

/// The chain index c with base + c * step == candidate, if any.
fn chain_index_for(spec: ChainSpec, candidate: usize) -> Option<usize> {
    if candidate < spec.base {
        return None;
    }
    let delta = candidate - spec.base;
    if delta == 0 {
        return Some(0);
    }
    if spec.step == 0 || !delta.is_multiple_of(spec.step) {
        return None;
    }
    let c = delta / spec.step;
    (c <= spec.max_c).then_some(c)
}

/// Convenience builder for tests and the verification pass: register the
/// buckets, build the plan, and fill the table from an in-memory stream.
pub fn record_context(
    s: &WildcardString,
    k: usize,
    buckets: &[(BucketRef, usize, i64, usize)],
) -> AssignmentTable {
    let mut table = AssignmentTable::new(s.n(), k, s.wildcard_positions().to_vec());
    for &(bucket, anchor, pi, max_c) in buckets {
        table.add_bucket(bucket, anchor, pi, max_c);
    }
    table.build_plan();
    for (idx, &sym) in s.symbols().iter().enumerate() {
        table.absorb(idx + 1, sym);
    }
    table
}
