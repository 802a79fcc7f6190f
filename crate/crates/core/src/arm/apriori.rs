//! Level-wise frequent itemset mining.

use std::collections::{BTreeMap, HashSet};

use super::itemset::{ItemSet, MAX_ITEMS};
use super::measure::{min_count, validate_min_support, Support};
use super::transactions::TransactionSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ItemsetSupport {
    pub items: ItemSet,
    pub support: Support,
}

/// Every itemset with support at least `min_support`, with no size bound.
pub fn apriori_frequent_itemsets(ts: &TransactionSet, min_support: f64) -> Result<Vec<ItemsetSupport>> {
    apriori_bounded(ts, min_support, None)
}

/// Frequent itemsets of at most `max_size` items (all sizes when `None`).
///
/// Output is ordered by size, then lexicographically by items.
pub fn apriori_bounded(
    ts: &TransactionSet,
    min_support: f64,
    max_size: Option<usize>,
) -> Result<Vec<ItemsetSupport>> {
    let threshold = validate_min_support(min_support)?;
    if ts.is_empty() {
        return Err(Error::EmptyTransactionSet);
    }
    let total = ts.len() as u64;
    let needed = min_count(&threshold, total).max(1);
    let max_size = max_size.unwrap_or(MAX_ITEMS);
    let transactions: Vec<u32> = ts.itemsets().map(ItemSet::bits).collect();

    let mut counts = [0u64; MAX_ITEMS];
    for &t in &transactions {
        let mut bits = t;
        while bits != 0 {
            counts[bits.trailing_zeros() as usize] += 1;
            bits &= bits - 1;
        }
    }
    let mut level: Vec<(ItemSet, u64)> = (0..MAX_ITEMS)
        .filter(|&i| counts[i] >= needed)
        .map(|i| (ItemSet::singleton(i), counts[i]))
        .collect();

    let mut out = Vec::new();
    let mut size = 1;
    while !level.is_empty() && size <= max_size {
        out.extend(level.iter().map(|&(items, count)| ItemsetSupport {
            items,
            support: Support { count, total },
        }));
        if size == max_size {
            break;
        }
        let candidates = next_candidates(&level);
        level = candidates
            .into_iter()
            .filter_map(|c| {
                let count = transactions.iter().filter(|&&t| t & c.bits() == c.bits()).count() as u64;
                (count >= needed).then_some((c, count))
            })
            .collect();
        size += 1;
    }
    Ok(out)
}

/// Joins frequent k-sets that differ only in their largest item, then prunes
/// candidates having an infrequent k-subset.
fn next_candidates(level: &[(ItemSet, u64)]) -> Vec<ItemSet> {
    let frequent: HashSet<u32> = level.iter().map(|(s, _)| s.bits()).collect();
    let mut by_prefix: BTreeMap<u32, Vec<ItemSet>> = BTreeMap::new();
    for &(s, _) in level {
        let top = s.max_item().expect("nonempty itemset");
        by_prefix.entry(s.without(top).bits()).or_default().push(s);
    }
    let mut candidates = Vec::new();
    for group in by_prefix.values() {
        for (i, a) in group.iter().enumerate() {
            for b in &group[i + 1..] {
                let c = a.union(*b);
                if c.items().all(|item| frequent.contains(&c.without(item).bits())) {
                    candidates.push(c);
                }
            }
        }
    }
    candidates.sort();
    candidates
}
