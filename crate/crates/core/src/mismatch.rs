//! Hamming-distance utilities and the streaming candidate finder.
//!
//! The candidate finder watches a stream of `n` symbols and reports every
//! shift `i` whose window `S[i+1, i+x]` is within `threshold` mismatches of
//! the stream's own length-`x` prefix. The report for shift `i` is produced
//! exactly upon reading position `i + x`, which lets callers start building
//! suffix fingerprints in time. Each emission carries the prefix fingerprint
//! `fp(S[1, i])` captured at the shift's birth, so a caller can later derive
//! `fp(S[i+1, j])` by splitting.
//!
//! Two implementations sit behind [`KMismatch`]:
//!
//! * [`ReferenceKMismatch`]: buffers the pattern prefix and keeps an exact
//!   incremental mismatch count per live shift. Linear space, exact output;
//!   the correctness baseline.
//! * [`SketchKMismatch`]: stores the pattern as `O(threshold * log n)` block
//!   fingerprints at power-of-two block granularity and charges each live
//!   shift one mismatch per differing block. Block counts never exceed the
//!   true Hamming distance, so no true candidate is ever dropped; shifts
//!   whose count passes the threshold die immediately, which keeps the live
//!   set small on streams without long self-alignments. Reported counts are
//!   lower bounds (exact when the block length is 1).
//!
//! Wildcards pass through as one extra alphabet symbol; assignment logic
//! lives upstream in the engines.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::fingerprint::{Fingerprint, FingerprintContext};
use crate::symbols::Symbol;

/// Prefix length and mismatch budget for a candidate-finder run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MismatchQuery {
    /// Pattern prefix length, `1 <= x <= n`.
    pub x: usize,
    /// Maximum allowed mismatches.
    pub threshold: usize,
}

/// A shift that passed the mismatch filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CandidateEmission {
    /// The shift `i`; the matched window is `S[i+1, i+x]`.
    pub index: usize,
    /// Observed mismatch count (exact for the reference finder, a lower
    /// bound for the sketch finder).
    pub mismatch_count: usize,
    /// `fp(S[1, i])`, captured when the window opened.
    pub start_fp: Fingerprint,
}

/// Which candidate-finder implementation to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubroutineKind {
    Reference,
    Sketch,
}

impl SubroutineKind {
    pub fn build(
        self,
        n: usize,
        query: MismatchQuery,
        ctx: FingerprintContext,
    ) -> Result<Box<dyn KMismatch>> {
        Ok(match self {
            SubroutineKind::Reference => Box::new(ReferenceKMismatch::new(n, query, ctx)?),
            SubroutineKind::Sketch => Box::new(SketchKMismatch::new(n, query, ctx)?),
        })
    }
}

impl std::str::FromStr for SubroutineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reference" => Ok(SubroutineKind::Reference),
            "sketch" => Ok(SubroutineKind::Sketch),
            other => Err(Error::InvalidParams(format!(
                "unknown subroutine '{other}' (expected 'reference' or 'sketch')"
            ))),
        }
    }
}

/// Single-owner streaming state machine; feed symbols one at a time.
/// Instances are transferable between threads (the engines may run the
/// per-level instances concurrently over a broadcast of the stream), but
/// not shareable.
pub trait KMismatch: Send {
    /// Consume the next symbol. Returns the emission completed at this
    /// position, if any (at most one window closes per position).
    fn feed(&mut self, sym: Symbol) -> Option<CandidateEmission>;

    /// Current number of machine words held.
    fn space_words(&self) -> usize;

    /// Peak number of machine words held so far.
    fn peak_space_words(&self) -> usize;
}

/// Number of positions where the two sequences differ.
pub fn hamming(a: &[Symbol], b: &[Symbol]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x != y).count())
}

fn validate_query(n: usize, query: MismatchQuery) -> Result<()> {
    if query.x == 0 {
        return Err(Error::InvalidParams("pattern length x must be >= 1".into()));
    }
    if query.x > n {
        return Err(Error::StreamTooShort {
            expected: query.x,
            got: n,
        });
    }
    Ok(())
}

pub fn ceil_log2(n: usize) -> u32 {
    n.max(2).next_power_of_two().trailing_zeros()
}

/// Exact finder: pattern buffer plus one incremental counter per shift.
pub struct ReferenceKMismatch {
    ctx: FingerprintContext,
    n: usize,
    x: usize,
    threshold: usize,
    pos: usize,
    /// Coefficients of the length-x pattern prefix.
    pattern: Vec<u16>,
    /// counts[i] = mismatches seen so far for shift i, i in [0, n-x].
    counts: Vec<u32>,
    start_fps: Vec<Fingerprint>,
    prefix_fp: Fingerprint,
}

impl ReferenceKMismatch {
    pub fn new(n: usize, query: MismatchQuery, ctx: FingerprintContext) -> Result<Self> {
        validate_query(n, query)?;
        let shifts = n - query.x + 1;
        let mut start_fps = vec![Fingerprint::EMPTY; shifts];
        start_fps[0] = Fingerprint::EMPTY;
        Ok(Self {
            ctx,
            n,
            x: query.x,
            threshold: query.threshold,
            pos: 0,
            pattern: Vec::with_capacity(query.x),
            counts: vec![0; shifts],
            start_fps,
            prefix_fp: Fingerprint::EMPTY,
        })
    }
}

impl KMismatch for ReferenceKMismatch {
    fn feed(&mut self, sym: Symbol) -> Option<CandidateEmission> {
        let j = self.pos + 1;
        debug_assert!(j <= self.n, "stream longer than declared length");
        self.pos = j;
        let coeff = sym.coeff();
        let c16 = coeff as u16;

        if j <= self.x {
            self.pattern.push(c16);
        }
        self.prefix_fp = self.ctx.append_coeff(self.prefix_fp, coeff);

        let max_shift = self.n - self.x;
        if j <= max_shift {
            self.start_fps[j] = self.prefix_fp;
        }

        // Every live shift i in [j-x, j-1] compares S[j] against the
        // pattern symbol at offset j - i.
        let lo = j.saturating_sub(self.x);
        let hi = (j - 1).min(max_shift);
        for i in lo..=hi {
            if self.pattern[j - i - 1] != c16 {
                self.counts[i] += 1;
            }
        }

        if j >= self.x {
            let i = j - self.x;
            let count = self.counts[i] as usize;
            if count <= self.threshold {
                return Some(CandidateEmission {
                    index: i,
                    mismatch_count: count,
                    start_fp: self.start_fps[i],
                });
            }
        }
        None
    }

    fn space_words(&self) -> usize {
        // Pattern bytes, one counter and one fingerprint per shift.
        self.pattern.len() / 4 + self.counts.len() / 2 + 2 * self.start_fps.len() + 4
    }

    fn peak_space_words(&self) -> usize {
        self.space_words()
    }
}

struct LiveShift {
    start: usize,
    start_fp: Fingerprint,
    acc: Fingerprint,
    block_idx: usize,
    mismatched: u32,
}

/// Small-space finder: compressed pattern, block-fingerprint counting.
pub struct SketchKMismatch {
    ctx: FingerprintContext,
    n: usize,
    x: usize,
    threshold: usize,
    block_len: usize,
    pos: usize,
    pattern_blocks: Vec<Fingerprint>,
    pattern_acc: Fingerprint,
    live: VecDeque<LiveShift>,
    prefix_fp: Fingerprint,
    peak_words: usize,
}

impl SketchKMismatch {
    pub fn new(n: usize, query: MismatchQuery, ctx: FingerprintContext) -> Result<Self> {
        validate_query(n, query)?;
        let target_blocks = 4 * (query.threshold + 1) * ceil_log2(n) as usize;
        let raw = query.x.div_ceil(target_blocks.max(1));
        let block_len = raw.next_power_of_two().min(query.x).max(1);
        let mut finder = Self {
            ctx,
            n,
            x: query.x,
            threshold: query.threshold,
            block_len,
            pos: 0,
            pattern_blocks: Vec::with_capacity(query.x.div_ceil(block_len)),
            pattern_acc: Fingerprint::EMPTY,
            live: VecDeque::new(),
            prefix_fp: Fingerprint::EMPTY,
            peak_words: 0,
        };
        finder.live.push_back(LiveShift {
            start: 0,
            start_fp: Fingerprint::EMPTY,
            acc: Fingerprint::EMPTY,
            block_idx: 0,
            mismatched: 0,
        });
        Ok(finder)
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }
}

impl KMismatch for SketchKMismatch {
    fn feed(&mut self, sym: Symbol) -> Option<CandidateEmission> {
        let j = self.pos + 1;
        debug_assert!(j <= self.n, "stream longer than declared length");
        self.pos = j;
        let coeff = sym.coeff();
        self.prefix_fp = self.ctx.append_coeff(self.prefix_fp, coeff);

        if j <= self.x {
            self.pattern_acc = self.ctx.append_coeff(self.pattern_acc, coeff);
            if j.is_multiple_of(self.block_len) || j == self.x {
                self.pattern_blocks.push(self.pattern_acc);
                self.pattern_acc = Fingerprint::EMPTY;
            }
        }

        let ctx = self.ctx;
        let (x, block_len, threshold) = (self.x, self.block_len, self.threshold);
        let pattern_blocks = &self.pattern_blocks;
        let mut emission = None;
        self.live.retain_mut(|shift| {
            shift.acc = ctx.append_coeff(shift.acc, coeff);
            let off = j - shift.start;
            if off.is_multiple_of(block_len) || off == x {
                if shift.acc != pattern_blocks[shift.block_idx] {
                    shift.mismatched += 1;
                }
                shift.block_idx += 1;
                shift.acc = Fingerprint::EMPTY;
                if shift.mismatched as usize > threshold {
                    return false;
                }
            }
            if off == x {
                emission = Some(CandidateEmission {
                    index: shift.start,
                    mismatch_count: shift.mismatched as usize,
                    start_fp: shift.start_fp,
                });
                return false;
            }
            true
        });

        if j <= self.n - self.x {
            self.live.push_back(LiveShift {
                start: j,
                start_fp: self.prefix_fp,
                acc: Fingerprint::EMPTY,
                block_idx: 0,
                mismatched: 0,
            });
        }
        self.peak_words = self.peak_words.max(self.space_words());
        emission
    }

    fn space_words(&self) -> usize {
        2 * self.pattern_blocks.len() + 7 * self.live.len() + 8
    }

    fn peak_space_words(&self) -> usize {
        self.peak_words
    }
}

/// Brute-force emission set: every shift whose window is within `threshold`
/// mismatches of the prefix. Test oracle for the streaming finders.
pub fn emissions_bruteforce(symbols: &[Symbol], x: usize, threshold: usize) -> Vec<(usize, usize)> {
    let n = symbols.len();
    let mut out = Vec::new();
    for i in 0..=n.saturating_sub(x) {
        let count = hamming(&symbols[..x], &symbols[i..i + x]).unwrap();
        if count <= threshold {
            out.push((i, count));
        }
    }
    out
}
