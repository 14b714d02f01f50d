//! Polynomial string fingerprints over a Mersenne prime field.
//!
//! A fingerprint of a symbol sequence `X[1..L]` is
//! `hash(X) = sum X[i].coeff() * r^(L-i) mod q`, together with the length
//! `L`. Carrying the length makes concatenation and its inverse pure
//! algebra:
//!
//! * `concat(fp(X), fp(Y)) = fp(X . Y)` holds exactly, not just with high
//!   probability;
//! * `split(fp(X . Y), fp(X)) = fp(Y)` whenever `X` really is a prefix.
//!
//! Distinct equal-length sequences collide with probability at most `L/q`
//! over the random choice of base, and `q` is close to `2^61`, so collisions
//! are effectively absent at the stream lengths this crate targets.
//!
//! The holey variant defers wildcard contributions: wildcards enter the base
//! hash with coefficient 0 and their offsets are kept aside, so finalizing
//! with a concrete assignment is an O(holes) correction.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::symbols::Symbol;

/// Field modulus, the Mersenne prime `2^61 - 1`.
pub const MODULUS: u64 = (1u64 << 61) - 1;

#[inline]
fn reduce128(x: u128) -> u64 {
    // x mod 2^61-1 via two folds of the high bits.
    let folded = (x & u128::from(MODULUS)) + (x >> 61);
    let folded = (folded & u128::from(MODULUS)) + (folded >> 61);
    let v = folded as u64;
    if v >= MODULUS {
        v - MODULUS
    } else {
        v
    }
}

#[inline]
fn mul_mod(a: u64, b: u64) -> u64 {
    reduce128(u128::from(a) * u128::from(b))
}

#[inline]
fn add_mod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= MODULUS {
        s - MODULUS
    } else {
        s
    }
}

#[inline]
fn sub_mod(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + MODULUS - b
    }
}

fn pow_mod(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        exp >>= 1;
    }
    acc
}

/// Fingerprint of a symbol sequence: hash residue plus length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    hash: u64,
    len: u64,
}

impl Fingerprint {
    /// Canonical empty-sequence fingerprint.
    pub const EMPTY: Fingerprint = Fingerprint { hash: 0, len: 0 };

    pub fn hash(&self) -> u64 {
        self.hash
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// The shared hashing context: a base drawn once from the seed.
///
/// Every fingerprint combined through one context must have been produced by
/// that same context.
#[derive(Debug, Clone, Copy)]
pub struct FingerprintContext {
    base: u64,
}

impl FingerprintContext {
    /// Draw the base uniformly from `[2, q-2]` using the given seed.
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed ^ 0xf1a9_e3b5_17c6_d204);
        let base = rng.range(2, MODULUS - 2);
        Self { base }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    /// `r^exp mod q`.
    pub fn pow_base(&self, exp: u64) -> u64 {
        pow_mod(self.base, exp)
    }

    pub fn empty(&self) -> Fingerprint {
        Fingerprint::EMPTY
    }

    /// Extend by one non-wildcard symbol.
    pub fn append(&self, f: Fingerprint, sym: Symbol) -> Result<Fingerprint> {
        if sym.is_wildcard() {
            return Err(Error::WildcardInExactFingerprint);
        }
        Ok(self.append_coeff(f, sym.coeff()))
    }

    /// Extend by one raw coefficient (wildcards enter as 0 here).
    pub fn append_coeff(&self, f: Fingerprint, coeff: u64) -> Fingerprint {
        Fingerprint {
            hash: add_mod(mul_mod(f.hash, self.base), coeff % MODULUS),
            len: f.len + 1,
        }
    }

    /// Fingerprint of `X . Y` from the fingerprints of `X` and `Y`.
    pub fn concat(&self, a: Fingerprint, b: Fingerprint) -> Fingerprint {
        Fingerprint {
            hash: add_mod(mul_mod(a.hash, self.pow_base(b.len)), b.hash),
            len: a.len + b.len,
        }
    }

    /// Inverse of [`concat`](Self::concat): recover `fp(Y)` from `fp(X . Y)`
    /// and `fp(X)`.
    pub fn split(&self, whole: Fingerprint, prefix: Fingerprint) -> Result<Fingerprint> {
        if prefix.len > whole.len {
            return Err(Error::LengthUnderflow {
                whole: whole.len,
                prefix: prefix.len,
            });
        }
        let rest = whole.len - prefix.len;
        Ok(Fingerprint {
            hash: sub_mod(whole.hash, mul_mod(prefix.hash, self.pow_base(rest))),
            len: rest,
        })
    }

    /// Fingerprint of `X` repeated `times` times, by power-doubling concat.
    pub fn repeat(&self, f: Fingerprint, times: u64) -> Fingerprint {
        let mut acc = Fingerprint::EMPTY;
        let mut cur = f;
        let mut t = times;
        while t > 0 {
            if t & 1 == 1 {
                acc = self.concat(acc, cur);
            }
            cur = self.concat(cur, cur);
            t >>= 1;
        }
        acc
    }

    /// Fingerprint of a whole symbol slice; wildcards are rejected.
    pub fn of_symbols(&self, symbols: &[Symbol]) -> Result<Fingerprint> {
        let mut f = Fingerprint::EMPTY;
        for &s in symbols {
            f = self.append(f, s)?;
        }
        Ok(f)
    }

    /// Fingerprint of a byte slice via the alphabet coefficient map.
    pub fn of_bytes(&self, bytes: &[u8]) -> Fingerprint {
        let mut f = Fingerprint::EMPTY;
        for &b in bytes {
            f = self.append_coeff(f, Symbol::Ch(b).coeff());
        }
        f
    }

    /// Extend a holey fingerprint by one symbol; wildcards open a hole.
    pub fn holey_append(&self, h: &HoleyFingerprint, sym: Symbol) -> HoleyFingerprint {
        let mut holes = h.holes.clone();
        if sym.is_wildcard() {
            holes.push(h.base.len + 1);
        }
        HoleyFingerprint {
            base: self.append_coeff(h.base, sym.coeff()),
            holes,
        }
    }

    /// Concatenate two holey fingerprints; the right operand's holes shift
    /// past the left operand's length.
    pub fn holey_concat(&self, a: &HoleyFingerprint, b: &HoleyFingerprint) -> HoleyFingerprint {
        let mut holes = a.holes.clone();
        holes.extend(b.holes.iter().map(|off| off + a.base.len));
        HoleyFingerprint {
            base: self.concat(a.base, b.base),
            holes,
        }
    }

    /// Fill every hole from `assign` and return the exact fingerprint of the
    /// assigned sequence.
    pub fn holey_finalize<F>(&self, h: &HoleyFingerprint, mut assign: F) -> Result<Fingerprint>
    where
        F: FnMut(u64) -> Option<Symbol>,
    {
        let mut hash = h.base.hash;
        for &off in &h.holes {
            let sym = assign(off).ok_or(Error::IncompleteAssignment { offset: off })?;
            if sym.is_wildcard() {
                return Err(Error::IncompleteAssignment { offset: off });
            }
            hash = add_mod(hash, mul_mod(sym.coeff(), self.pow_base(h.base.len - off)));
        }
        Ok(Fingerprint {
            hash,
            len: h.base.len,
        })
    }
}

/// Fingerprint with up to `k` deferred wildcard positions.
///
/// The base hash carries coefficient 0 at each hole; `holes` lists the
/// 1-based offsets within the fingerprinted range, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoleyFingerprint {
    base: Fingerprint,
    holes: Vec<u64>,
}

impl HoleyFingerprint {
    pub const EMPTY: HoleyFingerprint = HoleyFingerprint {
        base: Fingerprint::EMPTY,
        holes: Vec::new(),
    };

    /// Wrap an already-computed zero-coefficient base with explicit hole
    /// offsets (1-based, strictly increasing, within the base length).
    pub fn from_parts(base: Fingerprint, holes: Vec<u64>) -> Self {
        debug_assert!(holes.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(holes.iter().all(|&off| off >= 1 && off <= base.len));
        Self { base, holes }
    }

    pub fn base(&self) -> Fingerprint {
        self.base
    }

    pub fn holes(&self) -> &[u64] {
        &self.holes
    }

    pub fn len(&self) -> u64 {
        self.base.len
    }

    pub fn is_empty(&self) -> bool {
        self.base.len == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::WildcardString;
    use proptest::prelude::*;

    fn ctx() -> FingerprintContext {
        FingerprintContext::from_seed(0x5eed)
    }

    #[test]
    fn append_from_empty() {
        let c = ctx();
        let f = c.append(Fingerprint::EMPTY, Symbol::Ch(b'a')).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f, c.of_bytes(b"a"));
    }

    #[test]
    fn append_matches_direct_hash() {
        let c = ctx();
        let ab = c.of_bytes(b"ab");
        let abc = c.append(ab, Symbol::Ch(b'c')).unwrap();
        assert_eq!(abc, c.of_bytes(b"abc"));
    }

    #[test]
    fn append_wildcard_rejected() {
        let c = ctx();
        assert_eq!(
            c.append(Fingerprint::EMPTY, Symbol::Wildcard),
            Err(Error::WildcardInExactFingerprint)
        );
    }

    #[test]
    fn concat_identity_and_definition() {
        let c = ctx();
        let abc = c.of_bytes(b"abc");
        assert_eq!(c.concat(abc, Fingerprint::EMPTY), abc);
        assert_eq!(c.concat(Fingerprint::EMPTY, abc), abc);
        assert_eq!(c.concat(c.of_bytes(b"ab"), c.of_bytes(b"c")), abc);
    }

    #[test]
    fn concat_random_lengths() {
        let c = ctx();
        let mut rng = SplitMix64::new(99);
        let x: Vec<u8> = (0..100).map(|_| rng.below(256) as u8).collect();
        let y: Vec<u8> = (0..57).map(|_| rng.below(256) as u8).collect();
        let mut xy = x.clone();
        xy.extend_from_slice(&y);
        let joined = c.concat(c.of_bytes(&x), c.of_bytes(&y));
        assert_eq!(joined.len(), 157);
        assert_eq!(joined, c.of_bytes(&xy));
    }

    #[test]
    fn split_full_prefix_gives_empty() {
        let c = ctx();
        let abc = c.of_bytes(b"abc");
        let rest = c.split(abc, abc).unwrap();
        assert_eq!(rest, Fingerprint::EMPTY);
    }

    #[test]
    fn split_recovers_suffix() {
        let c = ctx();
        let rest = c.split(c.of_bytes(b"abcd"), c.of_bytes(b"ab")).unwrap();
        assert_eq!(rest, c.of_bytes(b"cd"));
    }

    #[test]
    fn split_underflow() {
        let c = ctx();
        assert_eq!(
            c.split(c.of_bytes(b"a"), c.of_bytes(b"ab")),
            Err(Error::LengthUnderflow {
                whole: 1,
                prefix: 2
            })
        );
    }

    #[test]
    fn repeat_matches_naive() {
        let c = ctx();
        let block = c.of_bytes(b"xyz");
        let mut naive = Fingerprint::EMPTY;
        for _ in 0..13 {
            naive = c.concat(naive, block);
        }
        assert_eq!(c.repeat(block, 13), naive);
        assert_eq!(c.repeat(block, 0), Fingerprint::EMPTY);
    }

    #[test]
    fn holey_finalize_fills_holes() {
        // "a?c" with the hole assigned 'b' equals fp("abc").
        let c = ctx();
        let s = WildcardString::parse_default(b"a?c").unwrap();
        let mut h = HoleyFingerprint::EMPTY;
        for &sym in s.symbols() {
            h = c.holey_append(&h, sym);
        }
        assert_eq!(h.holes(), &[2]);
        let done = c
            .holey_finalize(&h, |off| (off == 2).then_some(Symbol::Ch(b'b')))
            .unwrap();
        assert_eq!(done, c.of_bytes(b"abc"));
    }

    #[test]
    fn holey_finalize_without_holes_is_identity() {
        let c = ctx();
        let base = c.of_bytes(b"abba");
        let h = HoleyFingerprint::from_parts(base, vec![]);
        assert_eq!(c.holey_finalize(&h, |_| None).unwrap(), base);
    }

    #[test]
    fn holey_missing_assignment_rejected() {
        let c = ctx();
        let s = WildcardString::parse_default(b"a?").unwrap();
        let mut h = HoleyFingerprint::EMPTY;
        for &sym in s.symbols() {
            h = c.holey_append(&h, sym);
        }
        assert_eq!(
            c.holey_finalize(&h, |_| None),
            Err(Error::IncompleteAssignment { offset: 2 })
        );
    }

    #[test]
    fn holey_assignment_example() {
        // "ababa?ab" with position 6 assigned 'b' equals fp("abababab").
        let c = ctx();
        let s = WildcardString::parse_default(b"ababa?ab").unwrap();
        let mut h = HoleyFingerprint::EMPTY;
        for &sym in s.symbols() {
            h = c.holey_append(&h, sym);
        }
        let done = c
            .holey_finalize(&h, |off| (off == 6).then_some(Symbol::Ch(b'b')))
            .unwrap();
        assert_eq!(done, c.of_bytes(b"abababab"));
    }

    #[test]
    fn holey_concat_commutes_with_finalize() {
        let c = ctx();
        let left = WildcardString::parse_default(b"a?b").unwrap();
        let right = WildcardString::parse_default(b"?cc").unwrap();
        let mut hl = HoleyFingerprint::EMPTY;
        for &sym in left.symbols() {
            hl = c.holey_append(&hl, sym);
        }
        let mut hr = HoleyFingerprint::EMPTY;
        for &sym in right.symbols() {
            hr = c.holey_append(&hr, sym);
        }
        let joined = c.holey_concat(&hl, &hr);
        assert_eq!(joined.holes(), &[2, 4]);
        let assign = |off: u64| match off {
            2 => Some(Symbol::Ch(b'x')),
            4 => Some(Symbol::Ch(b'y')),
            _ => None,
        };
        let direct = c.holey_finalize(&joined, assign).unwrap();
        // Finalizing the halves separately then concatenating agrees.
        let fl = c
            .holey_finalize(&hl, |off| (off == 2).then_some(Symbol::Ch(b'x')))
            .unwrap();
        let fr = c
            .holey_finalize(&hr, |off| (off == 1).then_some(Symbol::Ch(b'y')))
            .unwrap();
        assert_eq!(direct, c.concat(fl, fr));
        assert_eq!(direct, c.of_bytes(b"axbycc"));
    }

    proptest! {
        #[test]
        fn homomorphism(x in proptest::collection::vec(any::<u8>(), 0..60),
                        y in proptest::collection::vec(any::<u8>(), 0..60)) {
            let c = ctx();
            let mut xy = x.clone();
            xy.extend_from_slice(&y);
            prop_assert_eq!(c.concat(c.of_bytes(&x), c.of_bytes(&y)), c.of_bytes(&xy));
        }

        #[test]
        fn split_inverts_concat(x in proptest::collection::vec(any::<u8>(), 0..60),
                                y in proptest::collection::vec(any::<u8>(), 0..60)) {
            let c = ctx();
            let a = c.of_bytes(&x);
            let b = c.of_bytes(&y);
            prop_assert_eq!(c.split(c.concat(a, b), a).unwrap(), b);
        }
    }
}
