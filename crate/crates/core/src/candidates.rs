//! Compressed candidate sets.
//!
//! The first pass can report a linear number of candidate shifts, but within
//! each fixed interval the true periods sit on an arithmetic progression, so
//! a bucket only stores its first candidate (the anchor) and the gcd of all
//! gaps to later candidates. Expanding `anchor + a * gcd` over the interval
//! recovers a superset of everything inserted; the verification pass filters
//! out the false entries.
//!
//! Candidates are grouped by level. Level 0 covers shifts up to about `n/2`
//! and filters with pattern length `floor(n/2)`; each deeper level halves
//! the pattern length and covers the next interval of shifts, so every shift
//! in `[1, n-1]` is covered by exactly one level with the largest pattern
//! that still fits in the stream.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub fn ceil_log2(n: usize) -> u32 {
    n.max(2).next_power_of_two().trailing_zeros()
}

/// Shift range, pattern length, and bucket width for one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelGeometry {
    pub n: usize,
    pub k: usize,
    /// 0 for the small-period level, increasing for shorter patterns.
    pub level: u32,
    /// Pattern length used by the mismatch filter at this level.
    pub x: usize,
    /// First shift covered, inclusive.
    pub lo: usize,
    /// Last shift covered, inclusive (never exceeds `n - 1`).
    pub hi: usize,
    /// Bucket width in shifts.
    pub width: usize,
}

impl LevelGeometry {
    /// Geometry of `level` for a stream of length `n`, or `None` once the
    /// pattern length would fall below 1.
    pub fn new(n: usize, k: usize, level: u32) -> Option<Self> {
        if n < 2 {
            return None;
        }
        let c_l = n >> level;
        let c_next = n >> (level + 1);
        if c_next < 1 || c_l == c_next {
            return None;
        }
        let lo = (n - c_l + 1).max(1);
        let hi = (n - c_next).min(n - 1);
        if lo > hi {
            return None;
        }
        // Split the level range into at most 4 k log n + 2 buckets; the
        // width lands at the intended n / (2^(level+2) (2 k log n + 1))
        // scale while keeping the bucket-count bound exact under rounding.
        let log_n = ceil_log2(n) as usize;
        let bucket_budget = 4 * k * log_n + 2;
        let width = (hi - lo + 1).div_ceil(bucket_budget).max(1);
        Some(Self {
            n,
            k,
            level,
            x: c_next,
            lo,
            hi,
            width,
        })
    }

    /// All levels for a stream of length `n`, in order.
    pub fn all_levels(n: usize, k: usize) -> Vec<LevelGeometry> {
        let mut out = Vec::new();
        let mut level = 0;
        while let Some(g) = LevelGeometry::new(n, k, level) {
            out.push(g);
            level += 1;
        }
        out
    }

    pub fn contains(&self, i: usize) -> bool {
        i >= self.lo && i <= self.hi
    }

    pub fn bucket_of(&self, i: usize) -> u64 {
        debug_assert!(self.contains(i));
        ((i - self.lo) / self.width) as u64
    }

    /// Inclusive interval of bucket `j`, clamped to the level range.
    pub fn bucket_interval(&self, j: u64) -> (usize, usize) {
        let lo = self.lo + (j as usize) * self.width;
        let hi = (lo + self.width - 1).min(self.hi);
        (lo, hi)
    }
}

/// Per-bucket compressed state: anchor plus gap gcd.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bucket {
    /// Smallest candidate inserted into the bucket.
    pub anchor: usize,
    /// -1 while the bucket holds a single candidate, afterwards the gcd of
    /// all gaps from the anchor. Always positive once set.
    pub pi: i64,
    /// Number of insertions, kept for instrumentation.
    pub count: usize,
}

/// Candidates inserted at `anchor + a * pi` up to `bucket_hi`, inclusive.
pub fn expansion(anchor: usize, pi: i64, bucket_hi: usize) -> impl Iterator<Item = usize> {
    let step = if pi > 0 { pi as usize } else { usize::MAX };
    std::iter::successors(Some(anchor), move |&prev| {
        prev.checked_add(step).filter(|&next| next <= bucket_hi)
    })
}

/// One level's compressed candidate set.
#[derive(Debug, Clone)]
pub struct CandidateBuckets {
    geometry: LevelGeometry,
    buckets: BTreeMap<u64, Bucket>,
}

impl CandidateBuckets {
    pub fn new(geometry: LevelGeometry) -> Self {
        Self {
            geometry,
            buckets: BTreeMap::new(),
        }
    }

    pub fn geometry(&self) -> &LevelGeometry {
        &self.geometry
    }

    /// Record candidate shift `i`. The first insertion into a bucket sets
    /// the anchor; later insertions fold their gap into the gcd.
    pub fn insert_candidate(&mut self, i: usize) -> Result<()> {
        if !self.geometry.contains(i) {
            return Err(Error::OutOfRange {
                index: i,
                lo: self.geometry.lo,
                hi: self.geometry.hi,
            });
        }
        let j = self.geometry.bucket_of(i);
        match self.buckets.get_mut(&j) {
            None => {
                self.buckets.insert(
                    j,
                    Bucket {
                        anchor: i,
                        pi: -1,
                        count: 1,
                    },
                );
            }
            Some(bucket) => {
                debug_assert!(i >= bucket.anchor, "candidates arrive in shift order");
                let gap = (i - bucket.anchor) as u64;
                if gap == 0 {
                    return Ok(());
                }
                bucket.pi = if bucket.pi <= 0 {
                    gap as i64
                } else {
                    gcd(bucket.pi as u64, gap) as i64
                };
                bucket.count += 1;
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    pub fn nonempty_buckets(&self) -> usize {
        self.buckets.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Bucket)> {
        self.buckets.iter().map(|(j, b)| (*j, b))
    }

    pub fn bucket(&self, j: u64) -> Option<&Bucket> {
        self.buckets.get(&j)
    }

    /// Lazily enumerate the candidates recoverable from bucket `j`.
    pub fn expand_bucket(&self, j: u64) -> Result<impl Iterator<Item = usize> + '_> {
        let bucket = self.buckets.get(&j).ok_or(Error::EmptyBucket { j })?;
        let (_, hi) = self.geometry.bucket_interval(j);
        Ok(expansion(bucket.anchor, bucket.pi, hi))
    }

    /// Largest candidate recoverable from bucket `j`.
    pub fn expansion_max(&self, j: u64) -> Result<usize> {
        Ok(self
            .expand_bucket(j)?
            .last()
            .expect("expansion never empty"))
    }

    pub fn snapshot(&self) -> BucketsSnapshot {
        BucketsSnapshot {
            n: self.geometry.n as u64,
            k: self.geometry.k as u64,
            r: self.geometry.level,
            buckets: self
                .buckets
                .iter()
                .map(|(j, b)| BucketEntry {
                    j: *j,
                    anchor: b.anchor as u64,
                    pi: b.pi,
                })
                .collect(),
        }
    }

    pub fn from_snapshot(snapshot: &BucketsSnapshot) -> Result<Self> {
        let geometry = LevelGeometry::new(snapshot.n as usize, snapshot.k as usize, snapshot.r)
            .ok_or_else(|| {
                Error::InvalidParams(format!(
                    "no level {} for n = {}, k = {}",
                    snapshot.r, snapshot.n, snapshot.k
                ))
            })?;
        let mut buckets = BTreeMap::new();
        for entry in &snapshot.buckets {
            let anchor = entry.anchor as usize;
            if !geometry.contains(anchor) || geometry.bucket_of(anchor) != entry.j {
                return Err(Error::InvalidParams(format!(
                    "anchor {} does not belong to bucket {} of level {}",
                    entry.anchor, entry.j, snapshot.r
                )));
            }
            buckets.insert(
                entry.j,
                Bucket {
                    anchor,
                    pi: entry.pi,
                    count: if entry.pi > 0 { 2 } else { 1 },
                },
            );
        }
        Ok(Self { geometry, buckets })
    }
}

/// Flat serializable form of one level's candidate set.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct BucketsSnapshot {
    pub n: u64,
    pub k: u64,
    pub r: u32,
    pub buckets: Vec<BucketEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct BucketEntry {
    pub j: u64,
    pub anchor: u64,
    pub pi: i64,
}

impl BucketsSnapshot {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("snapshot serialization cannot fail")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json)
            .map_err(|e| Error::InvalidParams(format!("malformed snapshot: {e}")))
    }
}
