//! One-pass detection of wildcard-periods up to `n/2`.
//!
//! The guarantee needs a promise: no wildcard may sit in the last `p`
//! symbols for a reported period `p`. Under it, every wildcard's residue
//! class modulo `p` still has a non-wildcard member ahead of the candidate's
//! discovery point (the final cycle of each class lands in the wildcard-free
//! tail), so assignments can be resolved by forward watches only and no
//! state from before the discovery is needed.
//!
//! Three candidate regimes share the single scan:
//!
//! * shifts `p <= n/4`, filtered against the length-`n/2` prefix — the
//!   filter reports `p` at position `p + n/2`, early enough to snapshot
//!   `fp(S[1, n-p])` downstream;
//! * shifts `n/4 < p < n/2`, covered by levels with pattern length `2^m`
//!   whose intervals shrink toward `n/2`; the shorter patterns report
//!   early enough for the same snapshot argument;
//! * the boundary shift `floor(n/2)`, tracked proactively from the start
//!   because its filter verdict would arrive too late.
//!
//! Every candidate keeps two fingerprints (its birth prefix and the
//! scheduled `fp(S[1, n-p])`) plus one forward watch per wildcard. At the
//! end of the scan each candidate is decided exactly, like the two-pass
//! verifier. Reported periods whose promise fails are flagged, not dropped.

use std::collections::BTreeMap;

use crate::engine::report::PeriodReport;
use crate::error::{Error, Result};
use crate::fingerprint::{Fingerprint, FingerprintContext, HoleyFingerprint};
use crate::mismatch::{KMismatch, MismatchQuery, SubroutineKind};
use crate::stats::SpaceStats;
use crate::symbols::{Symbol, WildcardString};

/// True when no wildcard occupies the last `p` symbols.
pub fn check_promise(s: &WildcardString, p: usize) -> bool {
    debug_assert!(p >= 1 && p < s.n());
    s.wildcard_positions()
        .last()
        .is_none_or(|&w| w <= s.n() - p)
}

struct Candidate {
    p: usize,
    start_fp: Option<Fingerprint>,
    lhs_fp: Option<Fingerprint>,
    sigma: Vec<(usize, Symbol)>,
}

#[derive(Clone, Copy)]
enum Snapshot {
    /// Fill the candidate's `fp(S[1, n-p])`.
    Lhs(usize),
    /// Fill the candidate's birth prefix fingerprint (boundary shift only).
    Start(usize),
}

enum Regime {
    /// Accept shifts `1..=q`.
    Small { q: usize },
    /// Accept shifts `lo..=hi`.
    Mid { lo: usize, hi: usize },
}

/// One-pass engine configuration.
pub struct OnePassEngine {
    k: usize,
    subroutine: SubroutineKind,
    ctx: FingerprintContext,
}

impl OnePassEngine {
    pub fn new(k: usize, subroutine: SubroutineKind, seed: u64) -> Self {
        Self {
            k,
            subroutine,
            ctx: FingerprintContext::from_seed(seed),
        }
    }

    /// Run over a single forward scan of exactly `n` symbols.
    pub fn run<I>(&self, n: usize, stream: I) -> Result<PeriodReport>
    where
        I: IntoIterator<Item = Symbol>,
    {
        if n == 0 {
            return Err(Error::EmptyStream);
        }
        if n == 1 {
            let Some(sym) = stream.into_iter().next() else {
                return Err(Error::StreamTooShort {
                    expected: 1,
                    got: 0,
                });
            };
            let k_found = usize::from(sym.is_wildcard());
            return Ok(PeriodReport::new(1, self.k, k_found, Vec::new()));
        }

        let half = n / 2;
        let quarter = n / 4;
        // Wildcards can break a pattern position and a window position each,
        // so the filter threshold is twice the wildcard budget.
        let threshold = 2 * self.k;

        let mut finders: Vec<(Regime, Box<dyn KMismatch>)> = Vec::new();
        finders.push((
            Regime::Small { q: quarter },
            self.subroutine
                .build(n, MismatchQuery { x: half, threshold }, self.ctx)?,
        ));
        let mut m = 1u32;
        loop {
            let span = 1usize << m;
            let lo = (half + 1).saturating_sub(span).max(quarter + 1);
            let hi = (half - (span >> 1)).min(half.saturating_sub(1));
            if half < span || lo > hi {
                if span >= half {
                    break;
                }
                m += 1;
                continue;
            }
            finders.push((
                Regime::Mid { lo, hi },
                self.subroutine
                    .build(n, MismatchQuery { x: span, threshold }, self.ctx)?,
            ));
            m += 1;
        }

        let mut candidates: Vec<Candidate> = Vec::new();
        let mut snapshots: BTreeMap<usize, Vec<Snapshot>> = BTreeMap::new();
        let mut watches: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        let mut wildcards: Vec<usize> = Vec::new();

        // The boundary shift floor(n/2) is registered before the scan: its
        // filter verdict would only arrive at position 2 * floor(n/2), too
        // late to snapshot either fingerprint.
        candidates.push(Candidate {
            p: half,
            start_fp: None,
            lhs_fp: None,
            sigma: Vec::new(),
        });
        snapshots.entry(half).or_default().push(Snapshot::Start(0));
        snapshots
            .entry(n - half)
            .or_default()
            .push(Snapshot::Lhs(0));

        let mut prefix_fp = Fingerprint::EMPTY;
        let mut pos = 0usize;
        let mut min_symbol: Option<u8> = None;
        for sym in stream {
            pos += 1;
            if pos > n {
                return Err(Error::LengthMismatch {
                    left: pos,
                    right: n,
                });
            }
            prefix_fp = self.ctx.append_coeff(prefix_fp, sym.coeff());
            if let Symbol::Ch(b) = sym {
                min_symbol = Some(min_symbol.map_or(b, |m| m.min(b)));
            }

            if let Some(slots) = snapshots.remove(&pos) {
                for slot in slots {
                    match slot {
                        Snapshot::Lhs(ci) => candidates[ci].lhs_fp = Some(prefix_fp),
                        Snapshot::Start(ci) => candidates[ci].start_fp = Some(prefix_fp),
                    }
                }
            }

            if let Some(due) = watches.remove(&pos) {
                for (ci, w) in due {
                    if sym.is_wildcard() {
                        let next = pos + candidates[ci].p;
                        if next <= n {
                            watches.entry(next).or_default().push((ci, w));
                        }
                    } else if !candidates[ci].sigma.iter().any(|&(pw, _)| pw == w) {
                        candidates[ci].sigma.push((w, sym));
                    }
                }
            }

            if sym.is_wildcard() {
                wildcards.push(pos);
                if wildcards.len() > self.k {
                    return Err(Error::TooManyWildcards {
                        found: wildcards.len(),
                        declared: self.k,
                    });
                }
                let periods: Vec<(usize, usize)> = candidates
                    .iter()
                    .enumerate()
                    .map(|(ci, c)| (ci, c.p))
                    .collect();
                for (ci, p) in periods {
                    register_watch(&mut watches, n, pos, ci, p, pos);
                }
            }

            for (regime, finder) in &mut finders {
                let Some(emission) = finder.feed(sym) else {
                    continue;
                };
                let p = emission.index;
                let accept = match regime {
                    Regime::Small { q } => p >= 1 && p <= *q,
                    Regime::Mid { lo, hi } => p >= *lo && p <= *hi,
                };
                if !accept {
                    continue;
                }
                let ci = candidates.len();
                candidates.push(Candidate {
                    p,
                    start_fp: Some(emission.start_fp),
                    lhs_fp: None,
                    sigma: Vec::new(),
                });
                let lhs_at = n - p;
                debug_assert!(lhs_at >= pos, "snapshot for p = {p} already passed");
                if lhs_at == pos {
                    candidates[ci].lhs_fp = Some(prefix_fp);
                } else {
                    snapshots.entry(lhs_at).or_default().push(Snapshot::Lhs(ci));
                }
                for &w in &wildcards {
                    register_watch(&mut watches, n, pos, ci, p, w);
                }
            }
        }
        if pos < n {
            return Err(Error::StreamTooShort {
                expected: n,
                got: pos,
            });
        }
        let fp_full = prefix_fp;
        let free_symbol = min_symbol.map_or(Symbol::Ch(0), Symbol::Ch);

        let mut stats = SpaceStats {
            kmismatch_space_words: finders
                .iter()
                .map(|(_, f)| f.peak_space_words() as u64)
                .sum(),
            ..SpaceStats::default()
        };
        stats.add_fingerprints(1 + 2 * candidates.len() as u64);
        stats.add_assignment_entries(candidates.iter().map(|c| c.sigma.len() as u64).sum::<u64>());

        let mut verified: Vec<usize> = Vec::new();
        for cand in &candidates {
            let (Some(start_fp), Some(lhs_base)) = (cand.start_fp, cand.lhs_fp) else {
                continue;
            };
            let p = cand.p;
            let rhs_base = self.ctx.split(fp_full, start_fp)?;
            debug_assert_eq!(lhs_base.len(), (n - p) as u64);
            debug_assert_eq!(rhs_base.len(), (n - p) as u64);

            let lookup = |w: usize| -> Symbol {
                cand.sigma
                    .iter()
                    .find_map(|&(pw, sym)| (pw == w).then_some(sym))
                    .unwrap_or(free_symbol)
            };
            let lhs_holes: Vec<u64> = wildcards
                .iter()
                .filter(|&&w| w <= n - p)
                .map(|&w| w as u64)
                .collect();
            let rhs_holes: Vec<u64> = wildcards
                .iter()
                .filter(|&&w| w > p)
                .map(|&w| (w - p) as u64)
                .collect();
            let lhs = self
                .ctx
                .holey_finalize(&HoleyFingerprint::from_parts(lhs_base, lhs_holes), |off| {
                    Some(lookup(off as usize))
                })?;
            let rhs = self
                .ctx
                .holey_finalize(&HoleyFingerprint::from_parts(rhs_base, rhs_holes), |off| {
                    Some(lookup(off as usize + p))
                })?;
            if lhs == rhs {
                verified.push(p);
            }
        }

        let mut report = PeriodReport::new(n, self.k, wildcards.len(), verified);
        if 2 * half == n && report.periods.contains(&half) {
            report.boundary_period = Some(half);
        }
        report.promise_violations = report
            .periods
            .iter()
            .copied()
            .filter(|&p| wildcards.last().is_some_and(|&w| w > n - p))
            .collect();
        report.stats = stats;
        Ok(report)
    }
}

/// Schedule the first forward watch for `(candidate, wildcard)`: the
/// smallest position past `now` congruent to `w` modulo the period.
fn register_watch(
    watches: &mut BTreeMap<usize, Vec<(usize, usize)>>,
    n: usize,
    now: usize,
    ci: usize,
    p: usize,
    w: usize,
) {
    let r = w % p;
    let mut pos = now + 1;
    let m = pos % p;
    pos += (r + p - m) % p;
    if pos <= n {
        watches.entry(pos).or_default().push((ci, w));
    }
}

/// One-pass wildcard-period detection over an in-memory stream. Reports
/// every verified period up to `n/2` (the `n/2` boundary is additionally
/// flagged in the report); results are reliable for periods satisfying the
/// wildcard-free-tail promise, and reported periods violating it are listed
/// in `promise_violations`.
///
/// ```
/// use wcperiod::{onepass_periods, SubroutineKind, WildcardString};
///
/// let s = WildcardString::parse_default(b"ab?babab")?;
/// let report = onepass_periods(&s, 1, SubroutineKind::Reference, 42)?;
/// assert!(report.periods.contains(&2));
/// # Ok::<(), wcperiod::Error>(())
/// ```
pub fn onepass_periods(
    input: &WildcardString,
    k: usize,
    subroutine: SubroutineKind,
    seed: u64,
) -> Result<PeriodReport> {
    input.ensure_wildcard_bound(k)?;
    OnePassEngine::new(k, subroutine, seed).run(input.n(), input.symbols().iter().copied())
}
