//! Canonical full assignments over a fluent universe.

use std::fmt;

/// Index of a fluent in a grounded task's universe.
pub type FluentId = usize;

/// A total boolean assignment over a fixed fluent order, stored as packed words.
///
/// Equality, hashing and ordering are all defined on the packed words, so two
/// states compare equal exactly when they assign every fluent the same value.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    len: usize,
    words: Vec<u64>,
}

impl State {
    /// All-false assignment over `len` fluents.
    pub fn empty(len: usize) -> Self {
        State {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, fluent: FluentId) -> bool {
        debug_assert!(fluent < self.len);
        self.words[fluent / 64] >> (fluent % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, fluent: FluentId, value: bool) {
        debug_assert!(fluent < self.len);
        let mask = 1u64 << (fluent % 64);
        if value {
            self.words[fluent / 64] |= mask;
        } else {
            self.words[fluent / 64] &= !mask;
        }
    }

    pub fn true_fluents(&self) -> impl Iterator<Item = FluentId> + '_ {
        (0..self.len).filter(move |&f| self.get(f))
    }

    /// One character per fluent in universe order, `1` for true.
    pub fn to_bitstring(&self) -> String {
        (0..self.len)
            .map(|f| if self.get(f) { '1' } else { '0' })
            .collect()
    }

    pub fn from_bitstring(bits: &str) -> Option<Self> {
        let mut state = State::empty(bits.len());
        for (i, c) in bits.chars().enumerate() {
            match c {
                '1' => state.set(i, true),
                '0' => {}
                _ => return None,
            }
        }
        Some(state)
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "State({})", self.to_bitstring())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn set_and_get_across_word_boundary() {
        let mut s = State::empty(130);
        s.set(0, true);
        s.set(63, true);
        s.set(64, true);
        s.set(129, true);
        assert_eq!(s.true_fluents().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        s.set(63, false);
        assert!(!s.get(63));
    }

    proptest! {
        #[test]
        fn bitstring_roundtrip(bits in proptest::collection::vec(any::<bool>(), 0..200)) {
            let text: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
            let state = State::from_bitstring(&text).unwrap();
            prop_assert_eq!(state.to_bitstring(), text);
        }
    }
}
