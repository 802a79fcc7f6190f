//! Patients, rating series and the cohort container.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::symptom::{Symptom, SYMPTOM_COUNT};
use crate::timegrid::{Phase, TimePoint, TIMEPOINT_COUNT};

pub const MAX_RATING: u8 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gender {
    M,
    F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TCategory {
    T0,
    T1,
    T2,
    T3,
    T4,
}

impl TCategory {
    pub const ALL: [TCategory; 5] =
        [TCategory::T0, TCategory::T1, TCategory::T2, TCategory::T3, TCategory::T4];

    pub fn ordinal(self) -> u8 {
        self as u8
    }
}

/// Treatment combination. IC = induction chemotherapy, CC = concurrent chemotherapy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Therapy {
    Radiation,
    CcRadiation,
    IcRadiation,
    IcRadiationCc,
}

impl Therapy {
    pub const ALL: [Therapy; 4] = [
        Therapy::Radiation,
        Therapy::CcRadiation,
        Therapy::IcRadiation,
        Therapy::IcRadiationCc,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Therapy::Radiation => "Radiation",
            Therapy::CcRadiation => "CC+Radiation",
            Therapy::IcRadiation => "IC+Radiation",
            Therapy::IcRadiationCc => "IC+Radiation+CC",
        }
    }
}

impl fmt::Display for Therapy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Therapy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, '+' | '_' | ' ' | '-'))
            .flat_map(char::to_lowercase)
            .collect();
        match norm.as_str() {
            "radiation" => Ok(Therapy::Radiation),
            "ccradiation" => Ok(Therapy::CcRadiation),
            "icradiation" => Ok(Therapy::IcRadiation),
            "icradiationcc" => Ok(Therapy::IcRadiationCc),
            _ => Err(format!("unknown therapy `{s}`")),
        }
    }
}

impl Serialize for Therapy {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for Therapy {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatientRecord {
    pub patient_id: String,
    pub age: u32,
    pub gender: Gender,
    pub t_category: TCategory,
    pub therapy: Therapy,
    /// Gray.
    pub total_dose: Option<f64>,
}

/// Twelve grid slots for one (patient, symptom). `None` is a missing rating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct RatingSeries {
    pub values: [Option<u8>; TIMEPOINT_COUNT],
    /// Slots where the questionnaire actually carried a value, fixed at ingestion.
    pub reported: [bool; TIMEPOINT_COUNT],
}

impl RatingSeries {
    pub fn from_raw(values: [Option<u8>; TIMEPOINT_COUNT]) -> RatingSeries {
        RatingSeries {
            values,
            reported: values.map(|v| v.is_some()),
        }
    }

    pub fn get(&self, tp: TimePoint) -> Option<u8> {
        self.values[tp.index()]
    }

    /// Rating at `tp` only if it was present on the questionnaire.
    pub fn reported_value(&self, tp: TimePoint) -> Option<u8> {
        if self.reported[tp.index()] {
            self.values[tp.index()]
        } else {
            None
        }
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    pub fn last_reported(&self) -> Option<usize> {
        self.reported.iter().rposition(|&r| r)
    }
}

/// All 28 series of one patient, in manifest order.
pub type PatientSeries = [RatingSeries; SYMPTOM_COUNT];

/// An immutable cohort snapshot.
///
/// Patients are kept sorted by id; every patient has an entry in `series`.
#[derive(Debug, Clone, PartialEq)]
pub struct CohortDataset {
    patients: Vec<PatientRecord>,
    series: BTreeMap<String, PatientSeries>,
    imputed: bool,
    partial_questionnaires: usize,
}

impl CohortDataset {
    /// Assembles a dataset, dropping patients with fewer than two reported
    /// questionnaires and patients without ratings.
    pub fn new(
        patients: Vec<PatientRecord>,
        mut series: BTreeMap<String, PatientSeries>,
    ) -> CohortDataset {
        let mut patients: Vec<_> = patients
            .into_iter()
            .filter(|p| {
                series
                    .get(&p.patient_id)
                    .is_some_and(|s| reported_questionnaires(s).len() >= 2)
            })
            .collect();
        patients.sort_by(|a, b| a.patient_id.cmp(&b.patient_id));
        let keep: BTreeSet<&str> = patients.iter().map(|p| p.patient_id.as_str()).collect();
        series.retain(|id, _| keep.contains(id.as_str()));
        let partial_questionnaires = series
            .values()
            .map(|s| {
                reported_questionnaires(s)
                    .into_iter()
                    .filter(|&t| s.iter().any(|r| !r.reported[t]))
                    .count()
            })
            .sum();
        CohortDataset {
            patients,
            series,
            imputed: false,
            partial_questionnaires,
        }
    }

    pub fn empty() -> CohortDataset {
        CohortDataset::new(Vec::new(), BTreeMap::new())
    }

    pub fn patients(&self) -> &[PatientRecord] {
        &self.patients
    }

    pub fn patient(&self, patient_id: &str) -> Option<&PatientRecord> {
        self.patients
            .binary_search_by(|p| p.patient_id.as_str().cmp(patient_id))
            .ok()
            .map(|i| &self.patients[i])
    }

    pub fn patient_series(&self, patient_id: &str) -> Option<&PatientSeries> {
        self.series.get(patient_id)
    }

    pub fn series(&self, patient_id: &str, symptom: Symptom) -> Option<&RatingSeries> {
        self.series.get(patient_id).map(|s| &s[symptom.index()])
    }

    pub fn len(&self) -> usize {
        self.patients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patients.is_empty()
    }

    pub fn is_imputed(&self) -> bool {
        self.imputed
    }

    /// Reported questionnaires that lack one or more of the 28 items.
    pub fn partial_questionnaires(&self) -> usize {
        self.partial_questionnaires
    }

    /// Whether the patient filled in a questionnaire (any item) at `tp`.
    pub fn reported_at(&self, patient_id: &str, tp: TimePoint) -> bool {
        self.series
            .get(patient_id)
            .is_some_and(|s| s.iter().any(|r| r.reported[tp.index()]))
    }

    pub fn reported_timepoints(&self, patient_id: &str) -> Vec<TimePoint> {
        self.series
            .get(patient_id)
            .map(|s| {
                reported_questionnaires(s)
                    .into_iter()
                    .filter_map(TimePoint::new)
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Patients with at least one reported questionnaire inside `phase`.
    pub fn eligible_patients(&self, phase: Phase) -> BTreeSet<String> {
        self.patients
            .iter()
            .filter(|p| {
                phase
                    .timepoints()
                    .any(|tp| self.reported_at(&p.patient_id, tp))
            })
            .map(|p| p.patient_id.clone())
            .collect()
    }

    pub(crate) fn with_series(&self, series: BTreeMap<String, PatientSeries>) -> CohortDataset {
        CohortDataset {
            patients: self.patients.clone(),
            series,
            imputed: true,
            partial_questionnaires: self.partial_questionnaires,
        }
    }

    pub(crate) fn all_series(&self) -> &BTreeMap<String, PatientSeries> {
        &self.series
    }
}

pub fn eligible_patients(dataset: &CohortDataset, phase: Phase) -> BTreeSet<String> {
    dataset.eligible_patients(phase)
}

fn reported_questionnaires(series: &PatientSeries) -> Vec<usize> {
    (0..TIMEPOINT_COUNT)
        .filter(|&t| series.iter().any(|r| r.reported[t]))
        .collect()
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn patient(id: &str, therapy: Therapy) -> PatientRecord {
        PatientRecord {
            patient_id: id.to_string(),
            age: 60,
            gender: Gender::M,
            t_category: TCategory::T2,
            therapy,
            total_dose: Some(70.0),
        }
    }

    /// A patient whose every symptom is reported with `rating(t, symptom)` at
    /// the given timepoints and missing elsewhere.
    pub fn series_at(
        timepoints: &[usize],
        rating: impl Fn(usize, Symptom) -> u8,
    ) -> PatientSeries {
        let mut out = [RatingSeries::default(); SYMPTOM_COUNT];
        for s in Symptom::all() {
            let mut values = [None; TIMEPOINT_COUNT];
            for &t in timepoints {
                values[t] = Some(rating(t, s));
            }
            out[s.index()] = RatingSeries::from_raw(values);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn dataset(entries: &[(&str, &[usize])]) -> CohortDataset {
        let patients = entries
            .iter()
            .map(|(id, _)| patient(id, Therapy::Radiation))
            .collect();
        let series = entries
            .iter()
            .map(|(id, tps)| (id.to_string(), series_at(tps, |_, _| 1)))
            .collect();
        CohortDataset::new(patients, series)
    }

    #[test]
    fn single_questionnaire_patients_are_excluded() {
        let ds = dataset(&[("p1", &[0]), ("p2", &[0, 3])]);
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.patients()[0].patient_id, "p2");
        assert!(ds.patient_series("p1").is_none());
    }

    #[test]
    fn late_eligibility_requires_late_report() {
        let ds = dataset(&[("p1", &[0, 1]), ("p2", &(0..12).collect::<Vec<_>>())]);
        let late = ds.eligible_patients(Phase::Late);
        assert!(!late.contains("p1"));
        assert!(late.contains("p2"));
        let acute = ds.eligible_patients(Phase::Acute);
        assert!(acute.contains("p1") && acute.contains("p2"));
    }

    #[test]
    fn empty_dataset_has_no_eligible_patients() {
        let ds = CohortDataset::empty();
        for phase in Phase::ALL {
            assert!(ds.eligible_patients(phase).is_empty());
        }
    }

    #[test]
    fn partial_questionnaire_counted() {
        let mut s = series_at(&[0, 1], |_, _| 2);
        s[Symptom::from_id("pain").unwrap().index()].values[1] = None;
        s[Symptom::from_id("pain").unwrap().index()].reported[1] = false;
        let ds = CohortDataset::new(vec![patient("p1", Therapy::Radiation)], [("p1".into(), s)].into());
        assert_eq!(ds.partial_questionnaires(), 1);
    }

    #[test]
    fn therapy_labels_parse_in_both_spellings() {
        for t in Therapy::ALL {
            assert_eq!(t.label().parse::<Therapy>().unwrap(), t);
        }
        assert_eq!("CC_Radiation".parse::<Therapy>().unwrap(), Therapy::CcRadiation);
        assert_eq!("IC_Radiation_CC".parse::<Therapy>().unwrap(), Therapy::IcRadiationCc);
    }
}
