use std::cmp::Ordering;
use std::collections::HashMap;

use num_rational::BigRational;

use super::apriori::ItemsetSupport;
use super::itemset::ItemSet;
use super::measure::{support, validate_min_lift, Lift, Support};
use super::transactions::TransactionSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssociationRule {
    /// 1-based rank in the returned list.
    pub rule_id: usize,
    pub antecedent: ItemSet,
    pub consequent: ItemSet,
    /// Support of `antecedent ∪ consequent`.
    pub support: Support,
    pub lift: Lift,
}

impl AssociationRule {
    pub fn items(&self) -> ItemSet {
        self.antecedent.union(self.consequent)
    }
}

/// Descending support, then descending lift, then lexicographic
/// `(antecedent, consequent)`.
pub fn rank_order(a: &AssociationRule, b: &AssociationRule) -> Ordering {
    b.support
        .cmp(&a.support)
        .then_with(|| b.lift.cmp(&a.lift))
        .then_with(|| a.antecedent.cmp(&b.antecedent))
        .then_with(|| a.consequent.cmp(&b.consequent))
}

/// Every nonempty bipartition `X → Y` of every frequent itemset with two or
/// more items, filtered by `min_lift`, ranked, truncated to `top_k`.
pub fn generate_rules(
    frequent: &[ItemsetSupport],
    ts: &TransactionSet,
    min_lift: f64,
    top_k: usize,
) -> Result<Vec<AssociationRule>> {
    if top_k == 0 {
        return Err(Error::InvalidParameter("top_k must be at least 1".into()));
    }
    let min_lift = validate_min_lift(min_lift)?;
    let mut lookup: HashMap<ItemSet, Support> = frequent.iter().map(|f| (f.items, f.support)).collect();
    let mut support_of = |s: ItemSet| -> Result<Support> {
        if let Some(&v) = lookup.get(&s) {
            return Ok(v);
        }
        let v = support(s, ts)?;
        lookup.insert(s, v);
        Ok(v)
    };

    let mut candidates = Vec::new();
    for f in frequent.iter().filter(|f| f.items.len() >= 2) {
        for antecedent in f.items.proper_subsets() {
            let consequent = f.items.difference(antecedent);
            let lift = Lift::new(f.support, support_of(antecedent)?, support_of(consequent)?)?;
            if passes(lift, &min_lift) {
                candidates.push(AssociationRule {
                    rule_id: 0,
                    antecedent,
                    consequent,
                    support: f.support,
                    lift,
                });
            }
        }
    }
    candidates.sort_by(rank_order);
    candidates.truncate(top_k);
    for (rank, rule) in candidates.iter_mut().enumerate() {
        rule.rule_id = rank + 1;
    }
    Ok(candidates)
}

fn passes(lift: Lift, min_lift: &BigRational) -> bool {
    lift.at_least(min_lift)
}
