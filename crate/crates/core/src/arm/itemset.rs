use std::cmp::Ordering;
use std::fmt;

use crate::symptom::Symptom;

/// A set of up to 32 items stored as a bitmask; bit `i` is item `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ItemSet(u32);

pub const MAX_ITEMS: usize = 32;

impl ItemSet {
    pub const EMPTY: ItemSet = ItemSet(0);

    pub fn from_bits(bits: u32) -> ItemSet {
        ItemSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn from_items(items: impl IntoIterator<Item = usize>) -> ItemSet {
        ItemSet(items.into_iter().fold(0, |acc, i| {
            assert!(i < MAX_ITEMS, "item index {i} out of range");
            acc | (1 << i)
        }))
    }

    pub fn from_symptoms(symptoms: impl IntoIterator<Item = Symptom>) -> ItemSet {
        ItemSet::from_items(symptoms.into_iter().map(Symptom::index))
    }

    pub fn singleton(item: usize) -> ItemSet {
        ItemSet::from_items([item])
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, item: usize) -> bool {
        item < MAX_ITEMS && self.0 & (1 << item) != 0
    }

    pub fn is_subset_of(self, other: ItemSet) -> bool {
        self.0 & other.0 == self.0
    }

    pub fn is_disjoint(self, other: ItemSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: ItemSet) -> ItemSet {
        ItemSet(self.0 | other.0)
    }

    pub fn difference(self, other: ItemSet) -> ItemSet {
        ItemSet(self.0 & !other.0)
    }

    pub fn with(self, item: usize) -> ItemSet {
        self.union(ItemSet::singleton(item))
    }

    pub fn without(self, item: usize) -> ItemSet {
        ItemSet(self.0 & !(1 << item))
    }

    /// Items in ascending order.
    pub fn items(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }

    pub fn symptoms(self) -> impl Iterator<Item = Symptom> {
        self.items().filter_map(Symptom::from_index)
    }

    pub fn max_item(self) -> Option<usize> {
        (self.0 != 0).then(|| 31 - self.0.leading_zeros() as usize)
    }

    /// Nonempty proper subsets, in increasing bitmask order.
    pub fn proper_subsets(self) -> impl Iterator<Item = ItemSet> {
        let full = self.0;
        let mut sub = 0u32;
        std::iter::from_fn(move || {
            sub = sub.wrapping_sub(full) & full;
            (sub != full && sub != 0).then_some(ItemSet(sub))
        })
    }
}

/// Lexicographic order on the ascending item lists.
impl Ord for ItemSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.items().cmp(other.items())
    }
}

impl PartialOrd for ItemSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.items()).finish()
    }
}
