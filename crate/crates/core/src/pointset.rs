//! Dense point sets over a fixed universe `0..capacity`.

use std::fmt;

use fixedbitset::FixedBitSet;

/// A set of point indices, stored as a bitset sized to the owning structure.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet(FixedBitSet);

impl PointSet {
    pub fn empty(capacity: usize) -> Self {
        PointSet(FixedBitSet::with_capacity(capacity))
    }

    pub fn full(capacity: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(capacity);
        bits.insert_range(..);
        PointSet(bits)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(capacity: usize, indices: I) -> Self {
        let mut set = Self::empty(capacity);
        for i in indices {
            set.insert(i);
        }
        set
    }

    pub fn capacity(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, i: usize) -> bool {
        !self.0.put(i)
    }

    pub fn remove(&mut self, i: usize) {
        self.0.set(i, false);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(i)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.capacity()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn intersection_len(&self, other: &PointSet) -> usize {
        self.0.intersection_count(&other.0)
    }

    pub fn union_with(&mut self, other: &PointSet) {
        self.0.union_with(&other.0);
    }

    pub fn intersect_with(&mut self, other: &PointSet) {
        self.0.intersect_with(&other.0);
    }

    pub fn difference_with(&mut self, other: &PointSet) {
        self.0.difference_with(&other.0);
    }

    pub fn complement(&self) -> PointSet {
        let mut out = PointSet::full(self.capacity());
        out.difference_with(self);
        out
    }

    /// Number of members among `points` (typically the points of a line).
    pub fn count_in(&self, points: &[usize]) -> usize {
        points.iter().filter(|&&p| self.contains(p)).count()
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
