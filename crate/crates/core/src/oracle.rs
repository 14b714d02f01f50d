//! Ground-truth validators and adversarial fixtures.
//!
//! The validators here are deliberately brute force: linear time per period,
//! quadratic overall, with no space budget. They exist to adjudicate the
//! streaming engines, so their only job is to be obviously correct.
//!
//! A period `p` of an assigned stream forces every residue class modulo `p`
//! to hold a single symbol, so `p` is a wildcard-period exactly when no
//! residue chain contains two distinct non-wildcard symbols. That
//! chain-compatibility check is the primary oracle; an independent
//! all-assignments enumeration backs it up for tiny inputs.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::symbols::{Symbol, WildcardString};

/// Does `s` have wildcard-period `p`? Single-valued assignment semantics: a
/// wildcard receives one symbol that must serve both comparison sides.
pub fn oracle_wildcard_period(s: &WildcardString, p: usize) -> bool {
    let n = s.n();
    debug_assert!(p >= 1 && p <= n.saturating_sub(1));
    let syms = s.symbols();
    for start in 0..p.min(n) {
        let mut seen: Option<Symbol> = None;
        let mut pos = start;
        while pos < n {
            match syms[pos] {
                Symbol::Wildcard => {}
                ch => match seen {
                    None => seen = Some(ch),
                    Some(prev) if prev != ch => return false,
                    Some(_) => {}
                },
            }
            pos += p;
        }
    }
    true
}

/// Does the plain symbol sequence have `k`-period `p`, i.e. do the length
/// `n - p` prefix and suffix differ in at most `k` positions? Wildcards are
/// ordinary symbols here.
pub fn oracle_k_period(symbols: &[Symbol], p: usize, k: usize) -> bool {
    let n = symbols.len();
    debug_assert!(p >= 1 && p < n);
    let mut mismatches = 0usize;
    for x in 0..n - p {
        if symbols[x] != symbols[x + p] {
            mismatches += 1;
            if mismatches > k {
                return false;
            }
        }
    }
    true
}

/// All wildcard-periods of `s` in `[1, n-1]`, sorted.
pub fn oracle_all_periods(s: &WildcardString) -> Vec<usize> {
    (1..s.n())
        .filter(|&p| oracle_wildcard_period(s, p))
        .collect()
}

/// Secondary oracle: enumerate every assignment of the wildcards over the
/// alphabet and test exact periodicity. Exponential in the wildcard count;
/// only suitable for tiny inputs.
pub fn oracle_wildcard_period_enumerated(s: &WildcardString, p: usize) -> bool {
    let alphabet: Vec<u8> = s.alphabet().iter().copied().collect();
    let wildcards = s.wildcard_positions();
    if alphabet.is_empty() {
        // Empty alphabet means every symbol is a wildcard; nothing
        // constrains the assignment.
        return true;
    }
    let mut assigned: Vec<Symbol> = s.symbols().to_vec();
    let w = wildcards.len();
    let mut counters = vec![0usize; w];
    loop {
        for (slot, &pos) in counters.iter().zip(wildcards) {
            assigned[pos - 1] = Symbol::Ch(alphabet[*slot]);
        }
        if exact_period(&assigned, p) {
            return true;
        }
        // Next assignment in mixed-radix order.
        let mut idx = 0;
        loop {
            if idx == w {
                return false;
            }
            counters[idx] += 1;
            if counters[idx] < alphabet.len() {
                break;
            }
            counters[idx] = 0;
            idx += 1;
        }
    }
}

fn exact_period(symbols: &[Symbol], p: usize) -> bool {
    let n = symbols.len();
    (0..n - p).all(|x| symbols[x] == symbols[x + p])
}

/// An adversarial instance `y' . x . x . x` built from a highly aperiodic
/// prefix, where `y'` is `y` with its first `k/2` mismatches against `x`
/// turned into wildcards.
#[derive(Debug, Clone)]
pub struct HardInstance {
    pub n: usize,
    pub k: usize,
    /// Hamming distance between `x` and `y`: `k/2` or `k/2 + 1`.
    pub gap: usize,
    pub nu: Vec<u8>,
    pub x: Vec<u8>,
    pub y: Vec<u8>,
    pub stream: WildcardString,
}

/// First `len` symbols of the run sequence `1 0 11 00 111 000 ...` over the
/// bytes `b'1'` / `b'0'`.
pub fn aperiodic_prefix(len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len);
    let mut run = 1usize;
    'outer: loop {
        for &bit in b"10" {
            for _ in 0..run {
                if out.len() == len {
                    break 'outer;
                }
                out.push(bit);
            }
        }
        run += 1;
    }
    out
}

fn flip(b: u8) -> u8 {
    if b == b'0' {
        b'1'
    } else {
        b'0'
    }
}

/// Generate a hard instance. Requires `4 | n`, even `k`, `k/2 <= n/4`, and
/// `gap` in `{k/2, k/2 + 1}`.
///
/// When `gap = k/2` the wildcarded head is compatible with `x` and the
/// stream has wildcard-period `n/4`; when `gap = k/2 + 1` one mismatch
/// survives the wildcarding and `n/4` is not a period.
pub fn gen_hard_instance(n: usize, k: usize, gap: usize, seed: u64) -> Result<HardInstance> {
    if !n.is_multiple_of(4) || n == 0 {
        return Err(Error::InvalidParams(format!(
            "n = {n} must be a positive multiple of 4"
        )));
    }
    if !k.is_multiple_of(2) || k == 0 {
        return Err(Error::InvalidParams(format!(
            "k = {k} must be a positive even number"
        )));
    }
    let quarter = n / 4;
    let half_k = k / 2;
    if half_k > quarter {
        return Err(Error::InvalidParams(format!(
            "k/2 = {half_k} exceeds n/4 = {quarter}"
        )));
    }
    if gap != half_k && gap != half_k + 1 {
        return Err(Error::InvalidParams(format!(
            "gap = {gap} must be k/2 = {half_k} or k/2 + 1"
        )));
    }
    if gap > quarter {
        return Err(Error::InvalidParams(format!(
            "gap = {gap} exceeds n/4 = {quarter}"
        )));
    }

    let mut rng = SplitMix64::new(seed);
    let nu = aperiodic_prefix(quarter);

    let mut x = nu.clone();
    for pos in rng.distinct_sorted(half_k, quarter as u64) {
        x[pos as usize] = flip(x[pos as usize]);
    }

    let mut y = x.clone();
    let flipped = rng.distinct_sorted(gap, quarter as u64);
    for &pos in &flipped {
        y[pos as usize] = flip(y[pos as usize]);
    }

    // Wildcard the first k/2 positions where y differs from x.
    let marker = b'?';
    let mut head = y.clone();
    for &pos in flipped.iter().take(half_k) {
        head[pos as usize] = marker;
    }

    let mut bytes = head;
    for _ in 0..3 {
        bytes.extend_from_slice(&x);
    }
    let stream = WildcardString::parse(&bytes, marker)?;
    debug_assert_eq!(stream.wildcard_count(), half_k);

    Ok(HardInstance {
        n,
        k,
        gap,
        nu,
        x,
        y,
        stream,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> WildcardString {
        WildcardString::parse_default(s.as_bytes()).unwrap()
    }

    #[test]
    fn worked_examples() {
        assert!(oracle_wildcard_period(&parse("abcab?a?c?bc"), 3));
        assert!(!oracle_wildcard_period(&parse("aaa?bbb"), 1));
        assert!(oracle_wildcard_period(&parse("ababa?ab"), 2));
    }

    #[test]
    fn k_period_examples() {
        let s = parse("aaaaabbbbb");
        assert!(oracle_k_period(s.symbols(), 1, 1));
        assert!(!oracle_k_period(s.symbols(), 1, 0));
        let t = parse("abababab");
        assert!(oracle_k_period(t.symbols(), 2, 0));
        // k = n is always enough.
        assert!(oracle_k_period(s.symbols(), 3, s.n()));
    }

    #[test]
    fn all_periods_examples() {
        assert_eq!(oracle_all_periods(&parse("abcab?a?c?bc")), vec![3, 6, 9]);
        assert_eq!(oracle_all_periods(&parse("aaaa")), vec![1, 2, 3]);
        assert_eq!(oracle_all_periods(&parse("????")), vec![1, 2, 3]);
        // The lone wildcard sits outside both comparison windows for every
        // p >= 4, and the a/b halves clash for every p: no periods at all.
        assert_eq!(oracle_all_periods(&parse("aaa?bbb")), Vec::<usize>::new());
    }

    #[test]
    fn chain_oracle_matches_enumeration_exhaustively() {
        // Every binary string of length <= 10 with <= 2 wildcards.
        for n in 1usize..=10 {
            for mask in 0u32..(1 << n) {
                for w1 in 0..=n {
                    for w2 in w1..=n {
                        let mut bytes: Vec<u8> = (0..n)
                            .map(|i| if mask >> i & 1 == 1 { b'b' } else { b'a' })
                            .collect();
                        if w1 > 0 {
                            bytes[w1 - 1] = b'?';
                        }
                        if w2 > 0 && w2 != w1 {
                            bytes[w2 - 1] = b'?';
                        }
                        let s = WildcardString::parse_default(&bytes).unwrap();
                        for p in 1..n {
                            assert_eq!(
                                oracle_wildcard_period(&s, p),
                                oracle_wildcard_period_enumerated(&s, p),
                                "disagreement on {:?} p={}",
                                String::from_utf8_lossy(&bytes),
                                p
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn wildcard_free_strings_match_zero_mismatch_periods() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..200 {
            let n = rng.range(2, 40) as usize;
            let bytes: Vec<u8> = (0..n).map(|_| b'a' + rng.below(3) as u8).collect();
            let s = WildcardString::parse_default(&bytes).unwrap();
            for p in 1..n {
                assert_eq!(
                    oracle_wildcard_period(&s, p),
                    oracle_k_period(s.symbols(), p, 0)
                );
            }
        }
    }

    #[test]
    fn multiples_stay_periods_on_exact_periodic_strings() {
        // On exact periodic strings, block-aligned multiples of the base
        // period remain periods.
        let mut rng = SplitMix64::new(17);
        for _ in 0..100 {
            let p = rng.range(1, 6) as usize;
            let reps = rng.range(2, 6) as usize;
            let block: Vec<u8> = (0..p).map(|_| b'a' + rng.below(3) as u8).collect();
            let bytes: Vec<u8> = block.iter().cycle().take(p * reps).copied().collect();
            let s = WildcardString::parse_default(&bytes).unwrap();
            assert!(oracle_wildcard_period(&s, p));
            let mut mult = 2 * p;
            while mult < s.n() {
                assert!(oracle_wildcard_period(&s, mult));
                mult += p;
            }
        }
    }

    #[test]
    fn aperiodic_prefix_matches_run_construction() {
        let nu = aperiodic_prefix(16);
        assert_eq!(nu, b"1011001110001111".to_vec());
    }

    #[test]
    fn hard_instance_period_property() {
        for seed in 0..20 {
            let tight = gen_hard_instance(64, 4, 2, seed).unwrap();
            assert!(oracle_wildcard_period(&tight.stream, 16));
            let loose = gen_hard_instance(64, 4, 3, seed).unwrap();
            assert!(!oracle_wildcard_period(&loose.stream, 16));
        }
    }

    #[test]
    fn hard_instance_parameter_validation() {
        assert!(gen_hard_instance(63, 4, 2, 0).is_err());
        assert!(gen_hard_instance(64, 3, 2, 0).is_err());
        assert!(gen_hard_instance(64, 4, 4, 0).is_err());
        assert!(gen_hard_instance(16, 10, 5, 0).is_err());
    }
}
