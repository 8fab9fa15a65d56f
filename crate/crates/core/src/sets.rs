//! Bitmask sets over fixed finite carriers.
//!
//! `ElemSet` covers semigroup elements (carrier order is capped at 64, so a
//! single word suffices). `PointSet` covers groupoid elements, topology points
//! and bundle points, whose carriers routinely exceed 64.

use std::fmt;

/// Subset of a semigroup carrier with at most 64 elements.
///
/// Equality and hashing include the carrier order: sets over different
/// carriers never compare equal.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElemSet {
    bits: u64,
    order: u8,
}

impl ElemSet {
    pub const MAX_ORDER: usize = 64;

    pub fn empty(order: usize) -> Self {
        assert!(order <= Self::MAX_ORDER);
        ElemSet { bits: 0, order: order as u8 }
    }

    pub fn full(order: usize) -> Self {
        assert!(order <= Self::MAX_ORDER);
        let bits = if order == 64 { !0 } else { (1u64 << order) - 1 };
        ElemSet { bits, order: order as u8 }
    }

    pub fn singleton(order: usize, i: usize) -> Self {
        let mut s = Self::empty(order);
        s.insert(i);
        s
    }

    /// Builds a set from a raw mask; bits at or above `order` must be clear.
    pub fn from_bits(order: usize, bits: u64) -> Self {
        let full = Self::full(order);
        assert_eq!(bits & !full.bits, 0, "mask has bits outside the carrier");
        ElemSet { bits, order: order as u8 }
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(order: usize, it: I) -> Self {
        let mut s = Self::empty(order);
        for i in it {
            s.insert(i);
        }
        s
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.order as usize);
        self.bits |= 1u64 << i;
    }

    pub fn remove(&mut self, i: usize) {
        assert!(i < self.order as usize);
        self.bits &= !(1u64 << i);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.order as usize && self.bits >> i & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn union(&self, other: &Self) -> Self {
        debug_assert_eq!(self.order, other.order);
        ElemSet { bits: self.bits | other.bits, order: self.order }
    }

    pub fn inter(&self, other: &Self) -> Self {
        debug_assert_eq!(self.order, other.order);
        ElemSet { bits: self.bits & other.bits, order: self.order }
    }

    pub fn minus(&self, other: &Self) -> Self {
        debug_assert_eq!(self.order, other.order);
        ElemSet { bits: self.bits & !other.bits, order: self.order }
    }

    pub fn complement(&self) -> Self {
        ElemSet { bits: Self::full(self.order()).bits & !self.bits, order: self.order }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        debug_assert_eq!(self.order, other.order);
        self.bits & !other.bits == 0
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.bits & other.bits != 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let order = self.order as usize;
        (0..order).filter(move |i| self.bits >> i & 1 == 1)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Subset of an arbitrary finite carrier, as a multi-word bitmask.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet {
    len: usize,
    words: Vec<u64>,
}

impl PointSet {
    pub fn empty(len: usize) -> Self {
        PointSet { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::empty(len);
        for i in 0..len {
            s.insert(i);
        }
        s
    }

    pub fn singleton(len: usize, i: usize) -> Self {
        let mut s = Self::empty(len);
        s.insert(i);
        s
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(len: usize, it: I) -> Self {
        let mut s = Self::empty(len);
        for i in it {
            s.insert(i);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union_with(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn inter_with(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn inter(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.inter_with(other);
        s
    }

    pub fn minus(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len, other.len);
        let mut s = self.clone();
        for (a, b) in s.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
        s
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |i| self.contains(*i))
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elemset_basic_algebra() {
        let a = ElemSet::from_iter(5, [0, 2, 4]);
        let b = ElemSet::from_iter(5, [1, 2]);
        assert_eq!(a.union(&b), ElemSet::from_iter(5, [0, 1, 2, 4]));
        assert_eq!(a.inter(&b), ElemSet::singleton(5, 2));
        assert_eq!(a.minus(&b), ElemSet::from_iter(5, [0, 4]));
        assert!(a.inter(&b).is_subset(&a));
        assert_eq!(a.complement(), ElemSet::from_iter(5, [1, 3]));
        assert_eq!(a.len(), 3);
    }

    #[test]
    fn elemset_full_at_word_boundary() {
        let f = ElemSet::full(64);
        assert_eq!(f.len(), 64);
        assert!(f.contains(63));
    }

    #[test]
    fn pointset_spans_multiple_words() {
        let mut s = PointSet::empty(130);
        s.insert(0);
        s.insert(64);
        s.insert(129);
        assert_eq!(s.count(), 3);
        assert!(s.contains(64));
        assert!(!s.contains(63));
        let t = PointSet::from_iter(130, [64, 100]);
        assert_eq!(s.inter(&t), PointSet::singleton(130, 64));
        assert!(PointSet::singleton(130, 64).is_subset(&s));
        assert_eq!(PointSet::full(130).count(), 130);
    }
}
