use std::fmt;

use fixedbitset::FixedBitSet;

/// A subset of a model's states `0..universe`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StateSet(FixedBitSet);

impl StateSet {
    pub fn empty(universe: usize) -> StateSet {
        StateSet(FixedBitSet::with_capacity(universe))
    }

    pub fn full(universe: usize) -> StateSet {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        StateSet(bits)
    }

    pub fn from_states(universe: usize, states: impl IntoIterator<Item = usize>) -> StateSet {
        let mut set = StateSet::empty(universe);
        for q in states {
            set.insert(q);
        }
        set
    }

    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, q: usize) -> bool {
        !self.0.put(q)
    }

    pub fn remove(&mut self, q: usize) {
        self.0.set(q, false);
    }

    pub fn contains(&self, q: usize) -> bool {
        self.0.contains(q)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union_with(&mut self, other: &StateSet) {
        self.0.union_with(&other.0);
    }

    pub fn intersect_with(&mut self, other: &StateSet) {
        self.0.intersect_with(&other.0);
    }

    pub fn difference_with(&mut self, other: &StateSet) {
        self.0.difference_with(&other.0);
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn complement(&self) -> StateSet {
        let mut bits = self.0.clone();
        bits.toggle_range(..);
        StateSet(bits)
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn as_bits(&self) -> &FixedBitSet {
        &self.0
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
