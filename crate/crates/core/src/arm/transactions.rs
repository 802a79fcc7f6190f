use super::itemset::ItemSet;
use crate::error::{Error, Result};
use crate::model::{CohortDataset, MAX_RATING};
use crate::symptom::Symptom;
use crate::timegrid::{Phase, TimePoint};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub patient_id: String,
    pub timepoint: usize,
    pub items: ItemSet,
}

/// The multiset of transactions one mining run sees.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransactionSet {
    transactions: Vec<Transaction>,
}

impl TransactionSet {
    /// Builds a set from bare itemsets; tids are synthesized from positions.
    /// Empty itemsets are dropped.
    pub fn from_itemsets(itemsets: impl IntoIterator<Item = ItemSet>) -> TransactionSet {
        TransactionSet {
            transactions: itemsets
                .into_iter()
                .filter(|s| !s.is_empty())
                .enumerate()
                .map(|(i, items)| Transaction {
                    patient_id: format!("t{:03}", i + 1),
                    timepoint: 0,
                    items,
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transaction> {
        self.transactions.iter()
    }

    pub fn itemsets(&self) -> impl Iterator<Item = ItemSet> + '_ {
        self.transactions.iter().map(|t| t.items)
    }

    pub fn count_containing(&self, items: ItemSet) -> u64 {
        self.itemsets().filter(|t| items.is_subset_of(*t)).count() as u64
    }

    /// Union of all items seen.
    pub fn universe(&self) -> ItemSet {
        self.itemsets().fold(ItemSet::EMPTY, ItemSet::union)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransactionOptions {
    /// A symptom is present when its reported rating is at least this.
    pub presence_threshold: u8,
    /// Count baseline questionnaires as part of the acute phase.
    pub merge_baseline_into_acute: bool,
}

impl Default for TransactionOptions {
    fn default() -> Self {
        TransactionOptions {
            presence_threshold: 1,
            merge_baseline_into_acute: false,
        }
    }
}

/// One transaction per reported questionnaire inside `phase`, holding the
/// symptoms rated at or above the presence threshold. Missing items are
/// absent, missing questionnaires yield nothing, empty sets are dropped.
pub fn build_transactions(
    dataset: &CohortDataset,
    phase: Phase,
    options: TransactionOptions,
) -> Result<TransactionSet> {
    if dataset.is_imputed() {
        return Err(Error::ImputedInputRejected);
    }
    if !(1..=MAX_RATING).contains(&options.presence_threshold) {
        return Err(Error::InvalidParameter(format!(
            "presence threshold {} outside 1..={MAX_RATING}",
            options.presence_threshold
        )));
    }
    let mut timepoints: Vec<TimePoint> = phase.timepoints().collect();
    if phase == Phase::Acute && options.merge_baseline_into_acute {
        timepoints.insert(0, TimePoint::new(0).expect("baseline slot"));
    }

    let mut transactions = Vec::new();
    for patient in dataset.patients() {
        let series = dataset
            .patient_series(&patient.patient_id)
            .expect("series for every patient");
        for &tp in &timepoints {
            let items = ItemSet::from_symptoms(Symptom::all().filter(|s| {
                series[s.index()]
                    .reported_value(tp)
                    .is_some_and(|v| v >= options.presence_threshold)
            }));
            if !items.is_empty() {
                transactions.push(Transaction {
                    patient_id: patient.patient_id.clone(),
                    timepoint: tp.index(),
                    items,
                });
            }
        }
    }
    Ok(TransactionSet { transactions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::impute::impute;
    use crate::model::fixtures::*;
    use crate::model::Therapy;

    fn sym(id: &str) -> Symptom {
        Symptom::from_id(id).unwrap()
    }

    #[test]
    fn present_symptoms_form_the_transaction() {
        let (fatigue, pain) = (sym("fatigue"), sym("pain"));
        let series = series_at(&[0, 3], |t, s| match (t, s) {
            (3, s) if s == fatigue => 2,
            (3, s) if s == pain => 0,
            _ => 0,
        });
        let ds = CohortDataset::new(vec![patient("p1", Therapy::Radiation)], [("p1".into(), series)].into());
        let ts = build_transactions(&ds, Phase::Acute, TransactionOptions::default()).unwrap();
        assert_eq!(ts.len(), 1);
        let t = ts.iter().next().unwrap();
        assert_eq!(t.items, ItemSet::from_symptoms([fatigue]));
        assert_eq!(t.timepoint, 3);
    }

    #[test]
    fn all_zero_questionnaire_emits_nothing() {
        let series = series_at(&[0, 2], |_, _| 0);
        let ds = CohortDataset::new(vec![patient("p1", Therapy::Radiation)], [("p1".into(), series)].into());
        let ts = build_transactions(&ds, Phase::Acute, TransactionOptions::default()).unwrap();
        assert!(ts.is_empty());
    }

    #[test]
    fn one_transaction_per_reported_questionnaire() {
        let series = series_at(&[0, 1, 4, 6, 9], |_, _| 5);
        let ds = CohortDataset::new(vec![patient("p1", Therapy::Radiation)], [("p1".into(), series)].into());
        let acute = build_transactions(&ds, Phase::Acute, TransactionOptions::default()).unwrap();
        assert_eq!(acute.len(), 3);
        let late = build_transactions(&ds, Phase::Late, TransactionOptions::default()).unwrap();
        assert_eq!(late.len(), 1);
        let merged = build_transactions(
            &ds,
            Phase::Acute,
            TransactionOptions { merge_baseline_into_acute: true, ..Default::default() },
        )
        .unwrap();
        assert_eq!(merged.len(), 4);
    }

    #[test]
    fn imputed_input_rejected() {
        let series = series_at(&[0, 1], |_, _| 5);
        let ds = CohortDataset::new(vec![patient("p1", Therapy::Radiation)], [("p1".into(), series)].into());
        let imputed = impute(&ds).unwrap();
        assert!(matches!(
            build_transactions(&imputed, Phase::Acute, TransactionOptions::default()),
            Err(Error::ImputedInputRejected)
        ));
    }

    #[test]
    fn threshold_out_of_range_rejected() {
        let ds = CohortDataset::empty();
        for presence_threshold in [0, 11] {
            let opts = TransactionOptions { presence_threshold, ..Default::default() };
            assert!(build_transactions(&ds, Phase::Acute, opts).is_err());
        }
    }
}
