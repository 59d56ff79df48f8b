//! Growable bitset used for reachability closures.
//!
//! Dense block indices index the bits. A hand-rolled bitset keeps the inner
//! loops of `accept` allocation-light and branch-predictable; the operations
//! needed here (union, membership, iteration over set bits) are few enough
//! that a dependency would not pull its weight.

/// Growable bitset over `usize` indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bits {
    words: Vec<u64>,
}

impl Bits {
    pub fn new() -> Self {
        Bits { words: Vec::new() }
    }

    pub fn with_capacity(nbits: usize) -> Self {
        Bits {
            words: Vec::with_capacity(nbits / 64 + 1),
        }
    }

    pub fn set(&mut self, idx: usize) {
        let word = idx / 64;
        if word >= self.words.len() {
            self.words.resize(word + 1, 0);
        }
        self.words[word] |= 1u64 << (idx % 64);
    }

    pub fn get(&self, idx: usize) -> bool {
        let word = idx / 64;
        self.words.get(word).is_some_and(|w| w & (1u64 << (idx % 64)) != 0)
    }

    /// `self |= other`.
    pub fn union_with(&mut self, other: &Bits) {
        if other.words.len() > self.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (dst, src) in self.words.iter_mut().zip(other.words.iter()) {
            *dst |= *src;
        }
    }

    /// True if any index is set in both.
    pub fn intersects(&self, other: &Bits) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .any(|(a, b)| a & b != 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Iterate set indices in ascending order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let bit = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * 64 + bit)
                }
            })
        })
    }
}
