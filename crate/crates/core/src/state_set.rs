use std::fmt;

const WORD: usize = 64;

/// A subset of the state space `0..n_states`, stored as a bit vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StateSet {
    len: usize,
    words: Vec<u64>,
}

impl StateSet {
    pub fn empty(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut set = Self::empty(len);
        for z in 0..len {
            set.insert(z);
        }
        set
    }

    /// Builds a set from state indices; indices `>= len` are rejected.
    pub fn from_states<I: IntoIterator<Item = usize>>(len: usize, states: I) -> Option<Self> {
        let mut set = Self::empty(len);
        for z in states {
            if z >= len {
                return None;
            }
            set.insert(z);
        }
        Some(set)
    }

    pub fn from_predicate(len: usize, mut keep: impl FnMut(usize) -> bool) -> Self {
        let mut set = Self::empty(len);
        for z in 0..len {
            if keep(z) {
                set.insert(z);
            }
        }
        set
    }

    /// Size of the underlying state space.
    pub fn universe(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn contains(&self, z: usize) -> bool {
        z < self.len && self.words[z / WORD] & (1 << (z % WORD)) != 0
    }

    #[inline]
    pub fn insert(&mut self, z: usize) {
        assert!(z < self.len, "state {z} outside universe of {}", self.len);
        self.words[z / WORD] |= 1 << (z % WORD);
    }

    #[inline]
    pub fn remove(&mut self, z: usize) {
        if z < self.len {
            self.words[z / WORD] &= !(1 << (z % WORD));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.len
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.len == other.len && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_superset(&self, other: &StateSet) -> bool {
        other.is_subset(self)
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        StateSet {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect(),
        }
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        StateSet {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn complement(&self) -> StateSet {
        StateSet::from_predicate(self.len, |z| !self.contains(z))
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&z| self.contains(z))
    }

    /// Indicator vector with 1.0 on members.
    pub fn indicator(&self) -> Vec<f64> {
        (0..self.len).map(|z| if self.contains(z) { 1.0 } else { 0.0 }).collect()
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
