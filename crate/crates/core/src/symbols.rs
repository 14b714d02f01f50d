//! Input model: byte-alphabet symbol streams with a designated wildcard
//! marker.
//!
//! Positions are 1-based in every documented contract of this crate, matching
//! the `S[1, n]` convention used throughout; storage is 0-based internally.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// One stream symbol: an alphabet byte or the wildcard.
///
/// The wildcard compares unequal to every alphabet symbol and equal to
/// itself, which is exactly the "treat wildcards as one extra character"
/// convention the first-pass candidate filter relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Wildcard,
    Ch(u8),
}

impl Symbol {
    pub fn is_wildcard(self) -> bool {
        matches!(self, Symbol::Wildcard)
    }

    /// Polynomial-hash coefficient: wildcards contribute 0, byte `b`
    /// contributes `b + 1` so no alphabet symbol collides with the sentinel.
    pub fn coeff(self) -> u64 {
        match self {
            Symbol::Wildcard => 0,
            Symbol::Ch(b) => u64::from(b) + 1,
        }
    }
}

impl std::fmt::Display for Symbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Symbol::Wildcard => write!(f, "?"),
            Symbol::Ch(b) => write!(f, "{}", *b as char),
        }
    }
}

/// An immutable symbol stream with known wildcard positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WildcardString {
    data: Vec<Symbol>,
    alphabet: BTreeSet<u8>,
    /// 1-based wildcard positions, strictly increasing.
    wildcards: Vec<usize>,
    marker: u8,
}

impl WildcardString {
    /// Parse raw bytes, one symbol per byte. Every occurrence of `marker`
    /// becomes a wildcard; the remaining distinct bytes form the alphabet.
    pub fn parse(bytes: &[u8], marker: u8) -> Result<Self> {
        if bytes.is_empty() {
            return Err(Error::EmptyStream);
        }
        let mut data = Vec::with_capacity(bytes.len());
        let mut alphabet = BTreeSet::new();
        let mut wildcards = Vec::new();
        for (idx, &b) in bytes.iter().enumerate() {
            if b == marker {
                wildcards.push(idx + 1);
                data.push(Symbol::Wildcard);
            } else {
                alphabet.insert(b);
                data.push(Symbol::Ch(b));
            }
        }
        Ok(Self {
            data,
            alphabet,
            wildcards,
            marker,
        })
    }

    /// Parse with the default `?` marker.
    pub fn parse_default(bytes: &[u8]) -> Result<Self> {
        Self::parse(bytes, b'?')
    }

    /// Build directly from symbols (used by generators).
    pub fn from_symbols(data: Vec<Symbol>, marker: u8) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyStream);
        }
        let mut alphabet = BTreeSet::new();
        let mut wildcards = Vec::new();
        for (idx, sym) in data.iter().enumerate() {
            match sym {
                Symbol::Wildcard => wildcards.push(idx + 1),
                Symbol::Ch(b) => {
                    alphabet.insert(*b);
                }
            }
        }
        Ok(Self {
            data,
            alphabet,
            wildcards,
            marker,
        })
    }

    pub fn n(&self) -> usize {
        self.data.len()
    }

    /// Symbol at 1-based position `pos`.
    pub fn at(&self, pos: usize) -> Symbol {
        self.data[pos - 1]
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.data
    }

    pub fn wildcard_count(&self) -> usize {
        self.wildcards.len()
    }

    /// 1-based wildcard positions, strictly increasing.
    pub fn wildcard_positions(&self) -> &[usize] {
        &self.wildcards
    }

    pub fn alphabet(&self) -> &BTreeSet<u8> {
        &self.alphabet
    }

    /// Smallest alphabet symbol, used to finalize free wildcards.
    pub fn smallest_symbol(&self) -> Symbol {
        match self.alphabet.iter().next() {
            Some(&b) => Symbol::Ch(b),
            // Degenerate all-wildcard stream: any fixed choice works as long
            // as both comparison sides use the same one.
            None => Symbol::Ch(0),
        }
    }

    /// Enforce the caller-declared wildcard bound `k`.
    pub fn ensure_wildcard_bound(&self, k: usize) -> Result<()> {
        if self.wildcard_count() > k {
            return Err(Error::TooManyWildcards {
                found: self.wildcard_count(),
                declared: k,
            });
        }
        Ok(())
    }

    /// Re-serialize to the original byte form.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.data
            .iter()
            .map(|s| match s {
                Symbol::Wildcard => self.marker,
                Symbol::Ch(b) => *b,
            })
            .collect()
    }

    pub fn marker(&self) -> u8 {
        self.marker
    }
}
