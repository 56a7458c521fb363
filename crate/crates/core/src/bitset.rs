//! Fixed-length bit vector over `[0, bound]` with the shifted-or used by the
//! sumset fold.

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    bound: u64,
    words: Vec<u64>,
}

impl std::fmt::Debug for BitSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BitSet")
            .field("bound", &self.bound)
            .field("ones", &self.count_ones())
            .finish()
    }
}

pub(crate) fn word_count(bound: u64) -> usize {
    (bound / 64 + 1) as usize
}

impl BitSet {
    pub fn new(bound: u64) -> Self {
        BitSet {
            bound,
            words: vec![0; word_count(bound)],
        }
    }

    pub fn from_words(bound: u64, mut words: Vec<u64>) -> Option<Self> {
        if words.len() != word_count(bound) {
            return None;
        }
        let tail = (bound % 64 + 1) as u32;
        if tail < 64 {
            *words.last_mut().unwrap() &= (1u64 << tail) - 1;
        }
        Some(BitSet { bound, words })
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, n: u64) -> bool {
        n <= self.bound && (self.words[(n / 64) as usize] >> (n % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, n: u64) {
        assert!(n <= self.bound, "bit {n} outside [0, {}]", self.bound);
        self.words[(n / 64) as usize] |= 1 << (n % 64);
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// `self |= src << shift`, discarding bits beyond the bound.
    pub fn or_shifted(&mut self, src: &BitSet, shift: u64) {
        debug_assert_eq!(self.bound, src.bound);
        if shift > self.bound {
            return;
        }
        let ws = (shift / 64) as usize;
        let bs = (shift % 64) as u32;
        let n = self.words.len();
        if bs == 0 {
            for i in ws..n {
                self.words[i] |= src.words[i - ws];
            }
        } else {
            self.words[ws] |= src.words[0] << bs;
            for i in ws + 1..n {
                let j = i - ws;
                self.words[i] |= (src.words[j] << bs) | (src.words[j - 1] >> (64 - bs));
            }
        }
        self.mask_tail();
    }

    /// Least `n` in `[from, bound]` whose bit is clear.
    pub fn first_zero_from(&self, from: u64) -> Option<u64> {
        if from > self.bound {
            return None;
        }
        let mut i = (from / 64) as usize;
        let mut w = !self.words[i] & (u64::MAX << (from % 64));
        loop {
            if w != 0 {
                let n = i as u64 * 64 + w.trailing_zeros() as u64;
                return (n <= self.bound).then_some(n);
            }
            i += 1;
            if i == self.words.len() {
                return None;
            }
            w = !self.words[i];
        }
    }

    pub fn is_superset_of(&self, other: &BitSet) -> bool {
        self.bound == other.bound
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & b == *b)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = u64> + '_ {
        (0..=self.bound).filter(|&n| self.get(n))
    }

    fn mask_tail(&mut self) {
        let tail = (self.bound % 64 + 1) as u32;
        if tail < 64 {
            *self.words.last_mut().unwrap() &= (1u64 << tail) - 1;
        }
    }
}
