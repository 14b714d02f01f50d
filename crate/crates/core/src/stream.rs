//! Replayable symbol sources.
//!
//! The two-pass engine needs to read its input twice; it takes a factory it
//! can reopen rather than a single iterator, so callers decide whether the
//! replay comes from memory, a file, or anything else. A guard wrapper
//! asserts the single-scan discipline for the one-pass engine.

use crate::error::Result;
use crate::symbols::{Symbol, WildcardString};

/// A source of a fixed-length symbol stream that can be opened repeatedly.
pub trait SymbolSource {
    /// Total number of symbols, known before the first scan.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Open a fresh scan from the first symbol.
    fn open(&self) -> Result<Box<dyn Iterator<Item = Symbol> + '_>>;
}

impl SymbolSource for WildcardString {
    fn len(&self) -> usize {
        self.n()
    }

    fn open(&self) -> Result<Box<dyn Iterator<Item = Symbol> + '_>> {
        Ok(Box::new(self.symbols().iter().copied()))
    }
}

/// Wraps an iterator and panics if a consumer tries to read the stream more
/// than once or out of order; used by the one-pass engine's tests.
pub struct SinglePassGuard<I> {
    inner: I,
    read: usize,
}

impl<I: Iterator<Item = Symbol>> SinglePassGuard<I> {
    pub fn new(inner: I) -> Self {
        Self { inner, read: 0 }
    }

    pub fn positions_read(&self) -> usize {
        self.read
    }
}

impl<I: Iterator<Item = Symbol>> Iterator for SinglePassGuard<I> {
    type Item = Symbol;

    fn next(&mut self) -> Option<Symbol> {
        let item = self.inner.next();
        if item.is_some() {
            self.read += 1;
        }
        item
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wildcard_string_replays() {
        let s = WildcardString::parse_default(b"ab?b").unwrap();
        let first: Vec<Symbol> = s.open().unwrap().collect();
        let second: Vec<Symbol> = s.open().unwrap().collect();
        assert_eq!(first, second);
        assert_eq!(first.len(), s.len());
    }

    #[test]
    fn guard_counts_reads() {
        let s = WildcardString::parse_default(b"abc").unwrap();
        let mut guard = SinglePassGuard::new(s.symbols().iter().copied());
        while guard.next().is_some() {}
        assert_eq!(guard.positions_read(), 3);
    }
}
