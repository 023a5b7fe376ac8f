//! Fixed-universe bit sets, tagged by the kind of index they hold.
//!
//! A `BitSet<K>` always belongs to a universe of a fixed size (the number of
//! objects or attributes of some context), so set operations never have to
//! reconcile lengths. The kind tag keeps object sets and attribute sets from
//! being mixed up at compile time.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::marker::PhantomData;

/// Marker for sets of object indices.
pub enum ObjKind {}
/// Marker for sets of attribute indices.
pub enum AttrKind {}
/// Marker for sets of concept indices (used by lattice algorithms).
pub enum ConceptKind {}

pub type ObjectSet = BitSet<ObjKind>;
pub type AttributeSet = BitSet<AttrKind>;
pub type ConceptSet = BitSet<ConceptKind>;

const WORD_BITS: usize = 64;

pub struct BitSet<K> {
    words: Vec<u64>,
    universe: usize,
    _kind: PhantomData<K>,
}

impl<K> BitSet<K> {
    /// Empty set over a universe of `universe` indices.
    pub fn empty(universe: usize) -> Self {
        BitSet {
            words: vec![0; universe.div_ceil(WORD_BITS)],
            universe,
            _kind: PhantomData,
        }
    }

    /// Set containing every index of the universe.
    pub fn full(universe: usize) -> Self {
        let mut set = Self::empty(universe);
        for word in &mut set.words {
            *word = !0;
        }
        set.trim();
        set
    }

    pub fn from_indices<I>(universe: usize, indices: I) -> Self
    where
        I: IntoIterator<Item = usize>,
    {
        let mut set = Self::empty(universe);
        for i in indices {
            set.insert(i);
        }
        set
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, index: usize) -> bool {
        index < self.universe && self.words[index / WORD_BITS] >> (index % WORD_BITS) & 1 == 1
    }

    pub fn insert(&mut self, index: usize) {
        assert!(index < self.universe, "bit index out of universe");
        self.words[index / WORD_BITS] |= 1 << (index % WORD_BITS);
    }

    pub fn remove(&mut self, index: usize) {
        assert!(index < self.universe, "bit index out of universe");
        self.words[index / WORD_BITS] &= !(1 << (index % WORD_BITS));
    }

    pub fn intersect_with(&mut self, other: &Self) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &Self) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn difference_with(&mut self, other: &Self) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        debug_assert_eq!(self.universe, other.universe);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_strict_subset(&self, other: &Self) -> bool {
        self.is_subset(other) && self.words != other.words
    }

    pub fn intersects(&self, other: &Self) -> bool {
        debug_assert_eq!(self.universe, other.universe);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Keep only the indices strictly below `bound`.
    pub fn truncate_at(&mut self, bound: usize) {
        for (w, word) in self.words.iter_mut().enumerate() {
            let start = w * WORD_BITS;
            if start >= bound {
                *word = 0;
            } else if start + WORD_BITS > bound {
                *word &= (1u64 << (bound - start)) - 1;
            }
        }
    }

    /// True when `self \ other` contains an index strictly below `bound`.
    /// This is the lectic-order acceptance test of NextClosure.
    pub fn differs_below(&self, other: &Self, bound: usize) -> bool {
        debug_assert_eq!(self.universe, other.universe);
        let full_words = bound / WORD_BITS;
        for w in 0..full_words {
            if self.words[w] & !other.words[w] != 0 {
                return true;
            }
        }
        let rem = bound % WORD_BITS;
        if rem > 0 && full_words < self.words.len() {
            let mask = (1u64 << rem) - 1;
            if self.words[full_words] & !other.words[full_words] & mask != 0 {
                return true;
            }
        }
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let base = w * WORD_BITS;
            BitIter { word }.map(move |b| base + b)
        })
    }

    pub fn to_indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Lectic comparison: the set whose smallest differing index is present
    /// comes later. Equal sets compare equal.
    pub fn lectic_cmp(&self, other: &Self) -> std::cmp::Ordering {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let bit = diff.trailing_zeros();
                return if a >> bit & 1 == 1 {
                    std::cmp::Ordering::Greater
                } else {
                    std::cmp::Ordering::Less
                };
            }
        }
        std::cmp::Ordering::Equal
    }

    fn trim(&mut self) {
        let rem = self.universe % WORD_BITS;
        if rem > 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

struct BitIter {
    word: u64,
}

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.word == 0 {
            return None;
        }
        let bit = self.word.trailing_zeros() as usize;
        self.word &= self.word - 1;
        Some(bit)
    }
}

impl<K> Clone for BitSet<K> {
    fn clone(&self) -> Self {
        BitSet {
            words: self.words.clone(),
            universe: self.universe,
            _kind: PhantomData,
        }
    }
}

impl<K> PartialEq for BitSet<K> {
    fn eq(&self, other: &Self) -> bool {
        self.universe == other.universe && self.words == other.words
    }
}

impl<K> Eq for BitSet<K> {}

impl<K> Hash for BitSet<K> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.universe.hash(state);
        self.words.hash(state);
    }
}

impl<K> fmt::Debug for BitSet<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
