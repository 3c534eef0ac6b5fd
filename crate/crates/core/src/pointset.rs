use std::fmt;

use fixedbitset::FixedBitSet;

/// A subset of the points of a finite space, as a fixed-width bit-set.
///
/// The width is the number of points of the ambient space; sets of different
/// widths never compare equal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PointSet(FixedBitSet);

impl PointSet {
    pub fn empty(width: usize) -> Self {
        PointSet(FixedBitSet::with_capacity(width))
    }

    pub fn full(width: usize) -> Self {
        let mut s = FixedBitSet::with_capacity(width);
        s.insert_range(..);
        PointSet(s)
    }

    pub fn singleton(width: usize, point: usize) -> Self {
        let mut s = Self::empty(width);
        s.insert(point);
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(width: usize, indices: I) -> Self {
        let mut s = Self::empty(width);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// Bit `i` of `mask` becomes point `i`. Only meaningful for `width <= 64`.
    pub fn from_mask(width: usize, mask: u64) -> Self {
        debug_assert!(width <= 64);
        Self::from_indices(width, (0..width).filter(|i| mask >> i & 1 == 1))
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn contains(&self, point: usize) -> bool {
        self.0.contains(point)
    }

    pub fn insert(&mut self, point: usize) {
        self.0.insert(point);
    }

    pub fn remove(&mut self, point: usize) {
        self.0.set(point, false);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersects(&self, other: &PointSet) -> bool {
        !self.0.is_disjoint(&other.0)
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut s = self.0.clone();
        s.union_with(&other.0);
        PointSet(s)
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        let mut s = self.0.clone();
        s.intersect_with(&other.0);
        PointSet(s)
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        let mut s = self.0.clone();
        s.difference_with(&other.0);
        PointSet(s)
    }

    pub fn complement(&self) -> PointSet {
        let mut s = self.0.clone();
        s.toggle_range(..);
        PointSet(s)
    }

    pub fn union_with(&mut self, other: &PointSet) {
        self.0.union_with(&other.0);
    }

    pub fn intersect_with(&mut self, other: &PointSet) {
        self.0.intersect_with(&other.0);
    }

    pub fn first(&self) -> Option<usize> {
        self.0.minimum()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
