//! Association rule mining over per-questionnaire symptom transactions.

mod apriori;
mod itemset;
mod measure;
mod rules;
mod transactions;

pub use apriori::{apriori_bounded, apriori_frequent_itemsets, ItemsetSupport};
pub use itemset::{ItemSet, MAX_ITEMS};
pub use measure::{lift, support, Lift, Support};
pub use rules::{generate_rules, rank_order, AssociationRule};
pub use transactions::{build_transactions, Transaction, TransactionOptions, TransactionSet};

use crate::error::Result;
use crate::model::CohortDataset;
use crate::timegrid::Phase;

/// Tunable thresholds. The defaults are working values, not clinically
/// validated ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiningParams {
    pub min_support: f64,
    pub min_lift: f64,
    pub top_k: usize,
    pub max_itemset_size: usize,
    pub transactions: TransactionOptions,
}

impl Default for MiningParams {
    fn default() -> Self {
        MiningParams {
            min_support: 0.30,
            min_lift: 1.2,
            top_k: 20,
            max_itemset_size: 4,
            transactions: TransactionOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleSet {
    pub phase: Phase,
    pub params: MiningParams,
    pub transaction_count: usize,
    pub rules: Vec<AssociationRule>,
}

/// Transactions → Apriori → ranked rules for one phase.
///
/// A phase without any transaction yields an empty rule list.
pub fn mine_rules(dataset: &CohortDataset, phase: Phase, params: MiningParams) -> Result<RuleSet> {
    let ts = build_transactions(dataset, phase, params.transactions)?;
    // Validate thresholds even when there is nothing to mine.
    measure::validate_min_support(params.min_support)?;
    measure::validate_min_lift(params.min_lift)?;
    if params.top_k == 0 {
        return Err(crate::error::Error::InvalidParameter("top_k must be at least 1".into()));
    }
    let rules = if ts.is_empty() {
        Vec::new()
    } else {
        let frequent = apriori_bounded(&ts, params.min_support, Some(params.max_itemset_size))?;
        generate_rules(&frequent, &ts, params.min_lift, params.top_k)?
    };
    Ok(RuleSet {
        phase,
        params,
        transaction_count: ts.len(),
        rules,
    })
}


#[cfg(test)]
mod tests {
    use super::worked_example::*;
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn worked_example_supports() {
        let ts = transactions();
        let s = support(ItemSet::from_items([FATIGUE, DROWSINESS]), &ts).unwrap();
        assert_eq!(s, Support { count: 1, total: 3 });
        assert_eq!(support(ItemSet::singleton(FATIGUE), &ts).unwrap(), Support { count: 2, total: 3 });
    }

    #[test]
    fn worked_example_lifts() {
        let ts = transactions();
        let l = lift(ItemSet::singleton(FATIGUE), ItemSet::singleton(DROWSINESS), &ts).unwrap();
        assert_eq!(l.to_ratio(), BigRational::new(3.into(), 4.into()));
        let l = lift(ItemSet::from_items([FATIGUE, PAIN]), ItemSet::singleton(SWALLOW), &ts).unwrap();
        assert_eq!(l.to_ratio(), BigRational::from_integer(3.into()));
    }

    #[test]
    fn universal_item_has_full_support() {
        let ts = TransactionSet::from_itemsets([ItemSet::from_items([1, 2]), ItemSet::from_items([1])]);
        assert_eq!(support(ItemSet::singleton(1), &ts).unwrap().value(), 1.0);
    }

    #[test]
    fn independent_sets_have_unit_lift() {
        // x and y each in half the transactions, jointly in a quarter.
        let ts = TransactionSet::from_itemsets([
            ItemSet::from_items([0, 1]),
            ItemSet::from_items([0, 2]),
            ItemSet::from_items([1, 2]),
            ItemSet::from_items([2]),
        ]);
        let l = lift(ItemSet::singleton(0), ItemSet::singleton(1), &ts).unwrap();
        assert_eq!(l.to_ratio(), BigRational::from_integer(1.into()));
    }

    #[test]
    fn lift_errors() {
        let ts = transactions();
        assert!(matches!(
            lift(ItemSet::singleton(FATIGUE), ItemSet::singleton(20), &ts),
            Err(crate::error::Error::ZeroMarginalSupport)
        ));
        assert!(lift(ItemSet::singleton(FATIGUE), ItemSet::from_items([FATIGUE, PAIN]), &ts).is_err());
        assert!(matches!(
            support(ItemSet::singleton(0), &TransactionSet::default()),
            Err(crate::error::Error::EmptyTransactionSet)
        ));
    }
}
