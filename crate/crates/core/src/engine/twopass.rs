//! Two-pass detection of every wildcard-period.
//!
//! Pass one treats wildcards as one extra symbol and runs the mismatch
//! filter at every level: a true wildcard-period `p` causes at most `2k`
//! mismatches between the prefix and the window at shift `p` (each wildcard
//! can break both a pattern position and a window position), so filtering at
//! threshold `2k` never loses a period. Surviving shifts are folded into
//! per-bucket anchor + gap-gcd form, and the wildcard positions are
//! recorded.
//!
//! Pass two replays the stream once and, per bucket, captures
//!
//! * prefix fingerprints at the anchor, at `n - z` (for the largest
//!   recoverable candidate `z`), and at the stream end;
//! * run-length compressed fingerprints of the length-`step` blocks
//!   covering `[t+1, z]` and `[n-z+1, n-t]`, capped at
//!   `128 k^2 ceil(log2 n) + 1` distinct runs per chain;
//! * the wildcard context chains needed to resolve assignments.
//!
//! Every candidate `T` recoverable from a bucket is then decided exactly:
//! both `fp(S[1, n-T])` and `fp(S[T+1, n])` are assembled from the recorded
//! material as holey fingerprints and finalized under the resolved
//! assignments, and `T` is reported when they agree. A chain that outgrows
//! its run cap marks the bucket overflowed; its candidates are rejected and
//! the event is counted in the stats.

use crate::assignments::{Assignment, AssignmentTable, BucketRef};
use crate::candidates::{BucketsSnapshot, CandidateBuckets, LevelGeometry};
use crate::engine::report::PeriodReport;
use crate::error::{Error, Result};
use crate::fingerprint::{Fingerprint, FingerprintContext, HoleyFingerprint};
use crate::mismatch::{ceil_log2, MismatchQuery, SubroutineKind};
use crate::stats::SpaceStats;
use crate::stream::SymbolSource;
use crate::symbols::{Symbol, WildcardString};

/// Everything pass one hands to pass two.
#[derive(Debug)]
pub struct PassOneState {
    n: usize,
    k: usize,
    levels: Vec<CandidateBuckets>,
    wildcards: Vec<usize>,
    kmismatch_peak_words: usize,
}

impl PassOneState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn levels(&self) -> &[CandidateBuckets] {
        &self.levels
    }

    /// The level filtering with the longest pattern (shifts up to about
    /// `n/2`).
    pub fn small(&self) -> Option<&CandidateBuckets> {
        self.levels.iter().find(|b| b.geometry().level == 0)
    }

    /// The shorter-pattern levels covering shifts beyond `n/2`.
    pub fn large(&self) -> impl Iterator<Item = &CandidateBuckets> {
        self.levels.iter().filter(|b| b.geometry().level > 0)
    }

    /// Wildcard positions recorded during the scan.
    pub fn wildcards(&self) -> &[usize] {
        &self.wildcards
    }

    pub fn kmismatch_peak_words(&self) -> usize {
        self.kmismatch_peak_words
    }

    /// Serializable form of the compressed candidate sets.
    pub fn snapshots(&self) -> Vec<BucketsSnapshot> {
        self.levels.iter().map(|b| b.snapshot()).collect()
    }

    pub fn snapshots_json(&self) -> String {
        serde_json::to_string(&self.snapshots()).expect("snapshot serialization cannot fail")
    }
}

/// Two-pass engine configuration.
pub struct TwoPassEngine {
    k: usize,
    subroutine: SubroutineKind,
    ctx: FingerprintContext,
}

impl TwoPassEngine {
    pub fn new(k: usize, subroutine: SubroutineKind, seed: u64) -> Self {
        Self {
            k,
            subroutine,
            ctx: FingerprintContext::from_seed(seed),
        }
    }

    pub fn context(&self) -> FingerprintContext {
        self.ctx
    }

    /// First pass over all levels at once.
    pub fn pass_one(&self, source: &dyn SymbolSource) -> Result<PassOneState> {
        self.pass_one_filtered(source, |_| true)
    }

    /// First pass restricted to the long-pattern level (shifts <= ~n/2).
    pub fn pass_one_small(&self, source: &dyn SymbolSource) -> Result<PassOneState> {
        self.pass_one_filtered(source, |level| level == 0)
    }

    /// First pass restricted to the shorter-pattern levels (shifts > ~n/2).
    pub fn pass_one_large(&self, source: &dyn SymbolSource) -> Result<PassOneState> {
        self.pass_one_filtered(source, |level| level > 0)
    }

    fn pass_one_filtered(
        &self,
        source: &dyn SymbolSource,
        keep: impl Fn(u32) -> bool,
    ) -> Result<PassOneState> {
        let n = source.len();
        if n == 0 {
            return Err(Error::EmptyStream);
        }
        let threshold = 2 * self.k;
        let mut levels: Vec<CandidateBuckets> = LevelGeometry::all_levels(n, self.k)
            .into_iter()
            .filter(|g| keep(g.level))
            .map(CandidateBuckets::new)
            .collect();
        let mut finders = levels
            .iter()
            .map(|b| {
                self.subroutine.build(
                    n,
                    MismatchQuery {
                        x: b.geometry().x,
                        threshold,
                    },
                    self.ctx,
                )
            })
            .collect::<Result<Vec<_>>>()?;

        let mut wildcards = Vec::new();
        let mut seen = 0usize;
        for sym in source.open()? {
            seen += 1;
            if seen > n {
                break;
            }
            if sym.is_wildcard() {
                wildcards.push(seen);
                if wildcards.len() > self.k {
                    return Err(Error::TooManyWildcards {
                        found: wildcards.len(),
                        declared: self.k,
                    });
                }
            }
            for (buckets, finder) in levels.iter_mut().zip(&mut finders) {
                if let Some(emission) = finder.feed(sym) {
                    if emission.index >= 1 && buckets.geometry().contains(emission.index) {
                        buckets.insert_candidate(emission.index)?;
                    }
                }
            }
        }
        if seen < n {
            return Err(Error::StreamTooShort {
                expected: n,
                got: seen,
            });
        }

        let kmismatch_peak_words = finders.iter().map(|f| f.peak_space_words()).sum();
        Ok(PassOneState {
            n,
            k: self.k,
            levels,
            wildcards,
            kmismatch_peak_words,
        })
    }

    /// Second pass: verify every candidate recoverable from the state.
    pub fn pass_two(
        &self,
        source: &dyn SymbolSource,
        state: &PassOneState,
        stats: &mut SpaceStats,
    ) -> Result<Vec<usize>> {
        let n = state.n;
        if source.len() != n {
            return Err(Error::LengthMismatch {
                left: source.len(),
                right: n,
            });
        }
        stats.kmismatch_space_words = stats
            .kmismatch_space_words
            .max(state.kmismatch_peak_words as u64);

        let cap = 128 * state.k * state.k * ceil_log2(n) as usize + 1;
        let mut plans = Vec::new();
        let mut table = AssignmentTable::new(n, state.k, state.wildcards.clone());
        let mut events: Vec<(usize, usize, EventKind)> = Vec::new();

        for (level_idx, buckets) in state.levels.iter().enumerate() {
            let level = buckets.geometry().level;
            for (j, bucket) in buckets.iter() {
                let bucket_ref = BucketRef { level, j };
                let anchor = bucket.anchor;
                let z = buckets.expansion_max(j)?;
                let step = if bucket.pi > 0 { bucket.pi as usize } else { 0 };
                let max_c = (z - anchor).checked_div(step).unwrap_or(0);
                let plan_idx = plans.len();

                events.push((anchor, plan_idx, EventKind::SnapAnchor));
                events.push((n - z, plan_idx, EventKind::SnapTail));
                for c in 1..=max_c {
                    events.push((anchor + c * step, plan_idx, EventKind::SuffixBoundary));
                    events.push((n - z + c * step, plan_idx, EventKind::PrefixBoundary));
                }

                table.add_bucket(bucket_ref, anchor, bucket.pi, max_c);
                plans.push(BucketPlan {
                    level_idx,
                    bucket: bucket_ref,
                    j,
                    anchor,
                    step,
                    z,
                    fp_anchor: None,
                    fp_tail: None,
                    suffix_chain: ChainRec::new(cap),
                    prefix_chain: ChainRec::new(cap),
                });
            }
        }
        table.build_plan();
        events.sort_by_key(|e| e.0);

        // The single verification scan: snapshots, block boundaries, and
        // assignment chains all sample the same running prefix fingerprint.
        let mut prefix_fp = Fingerprint::EMPTY;
        let mut cursor = 0usize;
        let mut pos = 0usize;
        let mut min_symbol: Option<u8> = None;
        for sym in source.open()? {
            pos += 1;
            if pos > n {
                break;
            }
            prefix_fp = self.ctx.append_coeff(prefix_fp, sym.coeff());
            if let Symbol::Ch(b) = sym {
                min_symbol = Some(min_symbol.map_or(b, |m| m.min(b)));
            }
            table.absorb(pos, sym);
            while cursor < events.len() && events[cursor].0 == pos {
                let (_, plan_idx, kind) = events[cursor];
                cursor += 1;
                let plan = &mut plans[plan_idx];
                match kind {
                    EventKind::SnapAnchor => {
                        plan.fp_anchor = Some(prefix_fp);
                        plan.suffix_chain.seed(prefix_fp);
                    }
                    EventKind::SnapTail => {
                        plan.fp_tail = Some(prefix_fp);
                        plan.prefix_chain.seed(prefix_fp);
                    }
                    EventKind::SuffixBoundary => {
                        plan.suffix_chain.on_boundary(&self.ctx, prefix_fp);
                    }
                    EventKind::PrefixBoundary => {
                        plan.prefix_chain.on_boundary(&self.ctx, prefix_fp);
                    }
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

        stats.add_fingerprints(1); // fp of the whole stream
        stats.add_assignment_entries(table.total_entries());
        stats.assignment_bound_overflows += table.bound_overflows();
        stats.buckets_nonempty += plans.len() as u64;

        let mut verified = Vec::new();
        for plan in &plans {
            stats.add_fingerprints(
                2 + 2 * (plan.suffix_chain.runs.len() + plan.prefix_chain.runs.len()) as u64,
            );
            if plan.suffix_chain.overflow || plan.prefix_chain.overflow {
                stats.cap_overflows += 1;
                continue;
            }
            let fp_anchor = plan.fp_anchor.expect("anchor snapshot taken");
            let fp_tail = plan.fp_tail.expect("tail snapshot taken");
            let suffix_all = self.ctx.split(fp_full, fp_anchor)?;
            let suffix_chain = plan.suffix_chain.freeze(&self.ctx);
            let prefix_chain = plan.prefix_chain.freeze(&self.ctx);
            let buckets = &state.levels[plan.level_idx];

            for candidate in buckets.expand_bucket(plan.j)? {
                let b = (candidate - plan.anchor)
                    .checked_div(plan.step)
                    .unwrap_or(0);
                let prefix_blocks = (plan.z - candidate).checked_div(plan.step).unwrap_or(0) as u64;
                let lhs_base = self
                    .ctx
                    .concat(fp_tail, prefix_chain.prefix_fp(&self.ctx, prefix_blocks));
                let rhs_base = self
                    .ctx
                    .split(suffix_all, suffix_chain.prefix_fp(&self.ctx, b as u64))?;
                debug_assert_eq!(lhs_base.len(), (n - candidate) as u64);
                debug_assert_eq!(rhs_base.len(), (n - candidate) as u64);

                if self.verify_candidate(
                    &table,
                    plan.bucket,
                    candidate,
                    n,
                    &state.wildcards,
                    free_symbol,
                    lhs_base,
                    rhs_base,
                )? {
                    verified.push(candidate);
                }
            }
        }
        verified.sort_unstable();
        verified.dedup();
        Ok(verified)
    }

    /// Decide `S[1, n-T] = S[T+1, n]` under resolved assignments.
    #[allow(clippy::too_many_arguments)]
    fn verify_candidate(
        &self,
        table: &AssignmentTable,
        bucket: BucketRef,
        candidate: usize,
        n: usize,
        wildcards: &[usize],
        free_symbol: Symbol,
        lhs_base: Fingerprint,
        rhs_base: Fingerprint,
    ) -> Result<bool> {
        let mut assigned: Vec<(usize, Symbol)> = Vec::new();
        for &w in wildcards {
            if w <= n - candidate || w > candidate {
                let sym = match table.resolve(bucket, w, candidate)? {
                    Assignment::Resolved(sym) => sym,
                    Assignment::Free => free_symbol,
                };
                assigned.push((w, sym));
            }
        }
        let lookup = |w: usize| -> Option<Symbol> {
            assigned
                .iter()
                .find_map(|&(pos, sym)| (pos == w).then_some(sym))
        };

        let lhs_holes: Vec<u64> = wildcards
            .iter()
            .filter(|&&w| w <= n - candidate)
            .map(|&w| w as u64)
            .collect();
        let rhs_holes: Vec<u64> = wildcards
            .iter()
            .filter(|&&w| w > candidate)
            .map(|&w| (w - candidate) as u64)
            .collect();

        let lhs = self
            .ctx
            .holey_finalize(&HoleyFingerprint::from_parts(lhs_base, lhs_holes), |off| {
                lookup(off as usize)
            })?;
        let rhs = self
            .ctx
            .holey_finalize(&HoleyFingerprint::from_parts(rhs_base, rhs_holes), |off| {
                lookup(off as usize + candidate)
            })?;
        Ok(lhs == rhs)
    }

    /// Both passes end to end.
    pub fn run(&self, source: &dyn SymbolSource) -> Result<PeriodReport> {
        let state = self.pass_one(source)?;
        let mut stats = SpaceStats::default();
        let verified = self.pass_two(source, &state, &mut stats)?;
        let mut report = PeriodReport::new(source.len(), self.k, state.wildcards.len(), verified);
        report.stats = stats;
        Ok(report)
    }
}

#[derive(Debug, Clone, Copy)]
enum EventKind {
    SnapAnchor,
    SnapTail,
    SuffixBoundary,
    PrefixBoundary,
}

struct BucketPlan {
    level_idx: usize,
    bucket: BucketRef,
    j: u64,
    anchor: usize,
    step: usize,
    z: usize,
    fp_anchor: Option<Fingerprint>,
    fp_tail: Option<Fingerprint>,
    suffix_chain: ChainRec,
    prefix_chain: ChainRec,
}

/// Run-length compressed block fingerprints, recorded during the scan.
struct ChainRec {
    last_fp: Option<Fingerprint>,
    runs: Vec<(Fingerprint, u64)>,
    cap: usize,
    overflow: bool,
}

impl ChainRec {
    fn new(cap: usize) -> Self {
        Self {
            last_fp: None,
            runs: Vec::new(),
            cap,
            overflow: false,
        }
    }

    fn seed(&mut self, fp: Fingerprint) {
        self.last_fp = Some(fp);
    }

    fn on_boundary(&mut self, ctx: &FingerprintContext, fp_now: Fingerprint) {
        if self.overflow {
            return;
        }
        let prev = self.last_fp.expect("chain seeded before first boundary");
        let block = ctx
            .split(fp_now, prev)
            .expect("boundary fingerprints arrive in order");
        self.last_fp = Some(fp_now);
        if let Some(last) = self.runs.last_mut() {
            if last.0 == block {
                last.1 += 1;
                return;
            }
        }
        if self.runs.len() >= self.cap {
            self.overflow = true;
            return;
        }
        self.runs.push((block, 1));
    }

    fn freeze(&self, ctx: &FingerprintContext) -> FrozenChain {
        let mut starts = Vec::with_capacity(self.runs.len());
        let mut cums = Vec::with_capacity(self.runs.len());
        let mut blocks_before = 0u64;
        let mut acc = Fingerprint::EMPTY;
        for &(fp, count) in &self.runs {
            starts.push(blocks_before);
            acc = ctx.concat(acc, ctx.repeat(fp, count));
            cums.push(acc);
            blocks_before += count;
        }
        FrozenChain {
            runs: self.runs.clone(),
            starts,
            cums,
        }
    }
}

/// Queryable form of a recorded chain: fingerprint of the first `m` blocks
/// in O(log) time.
struct FrozenChain {
    runs: Vec<(Fingerprint, u64)>,
    starts: Vec<u64>,
    cums: Vec<Fingerprint>,
}

impl FrozenChain {
    fn prefix_fp(&self, ctx: &FingerprintContext, blocks: u64) -> Fingerprint {
        if blocks == 0 {
            return Fingerprint::EMPTY;
        }
        let run = self.starts.partition_point(|&s| s < blocks) - 1;
        let whole = if run == 0 {
            Fingerprint::EMPTY
        } else {
            self.cums[run - 1]
        };
        let within = blocks - self.starts[run];
        debug_assert!(within <= self.runs[run].1);
        if within == self.runs[run].1 {
            self.cums[run]
        } else {
            ctx.concat(whole, ctx.repeat(self.runs[run].0, within))
        }
    }
}

/// All wildcard-periods of `input` in `[1, n-1]`, via the two-pass engine.
///
/// ```
/// use wcperiod::{find_wildcard_periods, SubroutineKind, WildcardString};
///
/// let s = WildcardString::parse_default(b"abcab?a?c?bc")?;
/// let report = find_wildcard_periods(&s, 3, SubroutineKind::Reference, 42)?;
/// assert_eq!(report.periods, vec![3, 6, 9]);
/// assert_eq!(report.smallest_period, Some(3));
/// # Ok::<(), wcperiod::Error>(())
/// ```
pub fn find_wildcard_periods(
    input: &WildcardString,
    k: usize,
    subroutine: SubroutineKind,
    seed: u64,
) -> Result<PeriodReport> {
    input.ensure_wildcard_bound(k)?;
    if input.n() == 1 {
        return Ok(PeriodReport::new(1, k, input.wildcard_count(), Vec::new()));
    }
    TwoPassEngine::new(k, subroutine, seed).run(input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mismatch::emissions_bruteforce;
    use crate::oracle::oracle_all_periods;
    use crate::rng::SplitMix64;

    fn parse(s: &str) -> WildcardString {
        WildcardString::parse_default(s.as_bytes()).unwrap()
    }

    fn periods_of(s: &str, k: usize, sub: SubroutineKind) -> Vec<usize> {
        find_wildcard_periods(&parse(s), k, sub, 1).unwrap().periods
    }

    #[test]
    fn worked_example_reports_all_periods() {
        assert_eq!(
            periods_of("abcab?a?c?bc", 3, SubroutineKind::Reference),
            vec![3, 6, 9]
        );
    }

    #[test]
    fn unary_string_has_every_period() {
        assert_eq!(
            periods_of("aaaa", 0, SubroutineKind::Reference),
            vec![1, 2, 3]
        );
    }

    #[test]
    fn single_wildcard_between_blocks_has_no_period() {
        assert_eq!(
            periods_of("aaa?bbb", 1, SubroutineKind::Reference),
            Vec::<usize>::new()
        );
    }

    #[test]
    fn rejects_k_period_that_is_not_wildcard_period() {
        // 1 is a k-period for k = 1 but not a wildcard-period.
        let report =
            find_wildcard_periods(&parse("aaaaabbbbb"), 1, SubroutineKind::Reference, 1).unwrap();
        assert!(!report.periods.contains(&1));
        assert!(crate::oracle::oracle_k_period(
            parse("aaaaabbbbb").symbols(),
            1,
            1
        ));
    }

    #[test]
    fn assignment_example_verifies_period_two() {
        let report =
            find_wildcard_periods(&parse("ababa?ab"), 1, SubroutineKind::Reference, 1).unwrap();
        assert!(report.periods.contains(&2));
        assert_eq!(report.smallest_period, Some(2));
    }

    #[test]
    fn exact_periodic_string_including_large_period() {
        assert_eq!(
            periods_of("abcabcab", 0, SubroutineKind::Reference),
            vec![3, 6]
        );
    }

    #[test]
    fn last_shift_is_period_iff_ends_compatible() {
        assert!(periods_of("ab?babab", 1, SubroutineKind::Reference).contains(&6));
        // n-1 = 7: S[1] = 'a' vs S[8] = 'b' clash.
        assert!(!periods_of("ab?babab", 1, SubroutineKind::Reference).contains(&7));
        // With a wildcard at the end, n-1 is compatible.
        assert!(periods_of("ab?baba?", 2, SubroutineKind::Reference).contains(&7));
    }

    #[test]
    fn pass_one_candidates_cover_bruteforce_filter() {
        for (text, k) in [("abababab", 0usize), ("abcab?a?c?bc", 3), ("????????", 8)] {
            let s = parse(text);
            let engine = TwoPassEngine::new(k, SubroutineKind::Reference, 1);
            let state = engine.pass_one(&s).unwrap();
            for buckets in state.levels() {
                let g = *buckets.geometry();
                let want: Vec<usize> = emissions_bruteforce(s.symbols(), g.x, 2 * k)
                    .into_iter()
                    .map(|(i, _)| i)
                    .filter(|&i| i >= 1 && g.contains(i))
                    .collect();
                for i in want {
                    let j = g.bucket_of(i);
                    let expanded: Vec<usize> = buckets.expand_bucket(j).unwrap().collect();
                    assert!(
                        expanded.contains(&i),
                        "{text}: level {} lost candidate {i}",
                        g.level
                    );
                }
            }
        }
    }

    #[test]
    fn unary_stream_fills_every_level() {
        // On an all-'a' stream every shift passes the filter, so each
        // level's expansion covers its whole range.
        let s = parse(&"a".repeat(32));
        let engine = TwoPassEngine::new(0, SubroutineKind::Reference, 1);
        let state = engine.pass_one(&s).unwrap();
        for buckets in state.levels() {
            let g = *buckets.geometry();
            let mut covered: Vec<usize> = Vec::new();
            for (j, _) in buckets.iter() {
                covered.extend(buckets.expand_bucket(j).unwrap());
            }
            covered.sort_unstable();
            let want: Vec<usize> = (g.lo..=g.hi).collect();
            assert_eq!(covered, want, "level {} not fully covered", g.level);
        }
    }

    #[test]
    fn pass_one_small_and_large_split_the_domain() {
        let s = parse("abcabcab");
        let engine = TwoPassEngine::new(0, SubroutineKind::Reference, 1);
        let small = engine.pass_one_small(&s).unwrap();
        assert!(small.large().next().is_none());
        assert!(small.small().is_some());
        let large = engine.pass_one_large(&s).unwrap();
        assert!(large.small().is_none());
        // p = 6 lives in a large level; p = 3 in the small one.
        let mut stats = SpaceStats::default();
        assert_eq!(engine.pass_two(&s, &small, &mut stats).unwrap(), vec![3]);
        assert_eq!(engine.pass_two(&s, &large, &mut stats).unwrap(), vec![6]);
    }

    #[test]
    fn snapshot_json_roundtrips() {
        let s = parse("abcab?a?c?bc");
        let engine = TwoPassEngine::new(3, SubroutineKind::Reference, 1);
        let state = engine.pass_one(&s).unwrap();
        let json = state.snapshots_json();
        let parsed: Vec<BucketsSnapshot> = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, state.snapshots());
        for snap in &parsed {
            let restored = CandidateBuckets::from_snapshot(snap).unwrap();
            assert_eq!(&restored.snapshot(), snap);
        }
    }

    #[test]
    fn too_many_wildcards_rejected() {
        let err = find_wildcard_periods(&parse("a??a"), 1, SubroutineKind::Reference, 1);
        assert!(matches!(
            err,
            Err(Error::TooManyWildcards {
                found: 2,
                declared: 1
            })
        ));
    }

    #[test]
    fn single_symbol_stream_has_no_periods() {
        let report = find_wildcard_periods(&parse("a"), 0, SubroutineKind::Reference, 1).unwrap();
        assert!(report.periods.is_empty());
    }

    #[test]
    fn matches_oracle_on_small_random_instances() {
        let mut rng = SplitMix64::new(0xabcd);
        for trial in 0..400 {
            let n = rng.range(2, 96) as usize;
            let sigma = rng.range(2, 4);
            let k = rng.below(5) as usize;
            let mut bytes: Vec<u8> = (0..n).map(|_| b'a' + rng.below(sigma) as u8).collect();
            for _ in 0..k.min(n) {
                bytes[rng.below(n as u64) as usize] = b'?';
            }
            let s = WildcardString::parse_default(&bytes).unwrap();
            let k_eff = s.wildcard_count().max(k);
            let got = find_wildcard_periods(&s, k_eff, SubroutineKind::Reference, trial)
                .unwrap()
                .periods;
            let want = oracle_all_periods(&s);
            assert_eq!(
                got,
                want,
                "trial {trial}: {:?}",
                String::from_utf8_lossy(&bytes)
            );
        }
    }

    #[test]
    fn sketch_matches_oracle_on_random_instances() {
        let mut rng = SplitMix64::new(0x5ca1e);
        let mut agree = 0u32;
        let trials = 200u32;
        for trial in 0..trials {
            let n = rng.range(8, 160) as usize;
            let k = rng.below(4) as usize;
            let mut bytes: Vec<u8> = (0..n).map(|_| b'a' + rng.below(2) as u8).collect();
            for _ in 0..k.min(n) {
                bytes[rng.below(n as u64) as usize] = b'?';
            }
            let s = WildcardString::parse_default(&bytes).unwrap();
            let k_eff = s.wildcard_count().max(k);
            let got = find_wildcard_periods(&s, k_eff, SubroutineKind::Sketch, u64::from(trial))
                .unwrap()
                .periods;
            if got == oracle_all_periods(&s) {
                agree += 1;
            }
        }
        assert!(
            agree >= trials - 1,
            "sketch agreed in only {agree}/{trials}"
        );
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            /// The engine and the brute-force oracle agree on arbitrary
            /// short streams.
            #[test]
            fn engine_equals_oracle(
                bytes in proptest::collection::vec(
                    proptest::sample::select(vec![b'a', b'b', b'c', b'?']), 2..48),
                seed in 0u64..1000,
            ) {
                let s = WildcardString::parse_default(&bytes).unwrap();
                let k = s.wildcard_count();
                let got = find_wildcard_periods(&s, k, SubroutineKind::Reference, seed)
                    .unwrap()
                    .periods;
                prop_assert_eq!(got, oracle_all_periods(&s));
            }
        }
    }

    #[test]
    fn matches_oracle_on_adversarial_instances() {
        for n in [256usize, 1024] {
            for gap in [2usize, 3] {
                for seed in 0..5u64 {
                    let instance = crate::oracle::gen_hard_instance(n, 4, gap, seed).unwrap();
                    let want = oracle_all_periods(&instance.stream);
                    assert_eq!(gap == 2, want.contains(&(n / 4)));
                    for sub in [SubroutineKind::Reference, SubroutineKind::Sketch] {
                        let got = find_wildcard_periods(&instance.stream, 4, sub, seed)
                            .unwrap()
                            .periods;
                        assert_eq!(got, want, "n={n} gap={gap} seed={seed} sub={sub:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn extending_both_ends_preserves_period() {
        // Metamorphic checks on exact period-p strings: appending one full
        // block always keeps p, and wrapping both ends in one character
        // keeps p whenever that character agrees with both end residues
        // (block first symbol = block last symbol = c).
        let mut rng = SplitMix64::new(77);
        for _ in 0..50 {
            let p = rng.range(1, 5) as usize;
            let reps = rng.range(2, 5) as usize;
            let c = b'a' + rng.below(2) as u8;
            let mut block: Vec<u8> = (0..p).map(|_| b'a' + rng.below(2) as u8).collect();
            block[0] = c;
            block[p - 1] = c;
            let base: Vec<u8> = block.iter().cycle().take(p * reps).copied().collect();
            assert!(periods_of(
                std::str::from_utf8(&base).unwrap(),
                0,
                SubroutineKind::Reference
            )
            .contains(&p));

            let mut longer = base.clone();
            longer.extend_from_slice(&block);
            let got = find_wildcard_periods(
                &WildcardString::parse_default(&longer).unwrap(),
                0,
                SubroutineKind::Reference,
                3,
            )
            .unwrap()
            .periods;
            assert!(
                got.contains(&p),
                "{longer:?} lost period {p} after block append"
            );

            let mut wrapped = vec![c];
            wrapped.extend_from_slice(&base);
            wrapped.push(c);
            let got = find_wildcard_periods(
                &WildcardString::parse_default(&wrapped).unwrap(),
                0,
                SubroutineKind::Reference,
                3,
            )
            .unwrap()
            .periods;
            assert!(
                got.contains(&p),
                "{wrapped:?} lost period {p} after wrapping"
            );
        }
    }
}
