//! Carry-forward imputation.

use crate::error::{Error, Result};
use crate::model::{CohortDataset, RatingSeries};

/// Fills missing slots: a missing baseline becomes 0, any later gap takes the
/// value of the nearest earlier slot. `reported` flags are left untouched.
pub fn impute(dataset: &CohortDataset) -> Result<CohortDataset> {
    if dataset.is_imputed() {
        return Err(Error::AlreadyImputed);
    }
    let series = dataset
        .all_series()
        .iter()
        .map(|(id, s)| (id.clone(), s.map(|r| impute_series(&r))))
        .collect();
    Ok(dataset.with_series(series))
}

pub fn impute_series(series: &RatingSeries) -> RatingSeries {
    let mut out = *series;
    let mut carry = 0;
    for slot in out.values.iter_mut() {
        match slot {
            Some(v) => carry = *v,
            None => *slot = Some(carry),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::Therapy;
    use crate::timegrid::TIMEPOINT_COUNT;
    use proptest::prelude::*;

    fn raw(values: &[Option<u8>]) -> RatingSeries {
        let mut v = [None; TIMEPOINT_COUNT];
        v[..values.len()].copy_from_slice(values);
        RatingSeries::from_raw(v)
    }

    #[test]
    fn carries_forward_and_zeroes_baseline() {
        let s = raw(&[None, Some(3), None, Some(5)]);
        let out = impute_series(&s);
        assert_eq!(&out.values[..4], &[Some(0), Some(3), Some(3), Some(5)]);
        assert!(out.values[4..].iter().all(|&v| v == Some(5)));
        assert_eq!(out.reported, s.reported);
    }

    #[test]
    fn complete_series_unchanged() {
        let s = RatingSeries::from_raw([Some(4); TIMEPOINT_COUNT]);
        assert_eq!(impute_series(&s), s);
    }

    #[test]
    fn all_missing_becomes_zero() {
        let out = impute_series(&RatingSeries::default());
        assert_eq!(out.values, [Some(0); TIMEPOINT_COUNT]);
    }

    #[test]
    fn dataset_flag_and_double_impute() {
        let ds = CohortDataset::new(
            vec![patient("p1", Therapy::Radiation)],
            [("p1".to_string(), series_at(&[0, 4], |t, _| t as u8))].into(),
        );
        let imputed = impute(&ds).unwrap();
        assert!(imputed.is_imputed());
        assert!(matches!(impute(&imputed), Err(Error::AlreadyImputed)));
        let s = &imputed.patient_series("p1").unwrap()[0];
        assert!(s.is_complete());
        assert_eq!(s.values[3], Some(0));
        assert_eq!(s.values[11], Some(4));
    }

    proptest! {
        #[test]
        fn imputation_is_idempotent(values in proptest::array::uniform12(proptest::option::of(0u8..=10))) {
            let once = impute_series(&RatingSeries::from_raw(values));
            prop_assert!(once.is_complete());
            prop_assert_eq!(impute_series(&once), once);
        }
    }
}
