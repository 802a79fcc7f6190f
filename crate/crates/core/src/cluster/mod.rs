//! Per-timepoint patient grouping and scatterplot coordinates.

mod pca;
mod ward;

pub use pca::{pca_project, Projection};
pub use ward::{within_cluster_ss, ward_cluster, ward_linkage, Assignments, Dendrogram, Merge};

use crate::error::{Error, Result};
use crate::model::{CohortDataset, Gender, TCategory, Therapy};
use crate::symptom::Symptom;
use crate::timegrid::TimePoint;

/// Ratings of the selected symptoms at one timepoint, one row per patient
/// eligible for that timepoint's phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PatientSymptomMatrix {
    pub timepoint: TimePoint,
    /// Sorted patient ids.
    pub rows: Vec<String>,
    /// Selected symptoms in manifest order, deduplicated.
    pub cols: Vec<Symptom>,
    pub values: Vec<Vec<f64>>,
}

pub fn build_matrix(dataset: &CohortDataset, tp: TimePoint, symptoms: &[Symptom]) -> Result<PatientSymptomMatrix> {
    if !dataset.is_imputed() {
        return Err(Error::NotImputed);
    }
    let mut cols = symptoms.to_vec();
    cols.sort();
    cols.dedup();
    if cols.is_empty() {
        return Err(Error::EmptySymptomSubset);
    }
    let rows: Vec<String> = dataset.eligible_patients(tp.phase()).into_iter().collect();
    if rows.is_empty() {
        return Err(Error::NoEligiblePatients(tp.label().to_string()));
    }
    let values = rows
        .iter()
        .map(|pid| {
            let series = dataset.patient_series(pid).expect("eligible patient has series");
            cols.iter()
                .map(|s| f64::from(series[s.index()].get(tp).expect("imputed series is complete")))
                .collect()
        })
        .collect();
    Ok(PatientSymptomMatrix {
        timepoint: tp,
        rows,
        cols,
        values,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterPoint {
    pub patient_id: String,
    pub pc1: f64,
    pub pc2: f64,
    /// 0 is the highest-burden group.
    pub group: usize,
    pub therapy: Therapy,
    pub gender: Gender,
    pub t_category: TCategory,
}

impl ClusterPoint {
    pub fn burden_label(&self, k: usize) -> String {
        match (k, self.group) {
            (2, 0) => "high".to_string(),
            (2, _) => "low".to_string(),
            (_, g) => format!("group{}", g + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterView {
    pub timepoint: TimePoint,
    pub symptoms: Vec<Symptom>,
    pub k: usize,
    pub points: Vec<ClusterPoint>,
    /// Ward merge costs in agglomeration order.
    pub merge_costs: Vec<f64>,
    pub explained_variance: Vec<f64>,
    /// Set when every patient had identical ratings (all coordinates at the origin).
    pub degenerate: bool,
}

/// build_matrix → Ward cut at `k` → PCA → marker attributes.
pub fn recluster(dataset: &CohortDataset, tp: TimePoint, symptoms: &[Symptom], k: usize) -> Result<ClusterView> {
    let m = build_matrix(dataset, tp, symptoms)?;
    let groups = ward_cluster(&m.values, k)?;
    let projection = pca_project(&m.values)?;
    let points = m
        .rows
        .iter()
        .zip(&groups.ranks)
        .zip(&projection.coords)
        .map(|((pid, &group), &(pc1, pc2))| {
            let p = dataset.patient(pid).expect("row is a dataset patient");
            ClusterPoint {
                patient_id: pid.clone(),
                pc1,
                pc2,
                group,
                therapy: p.therapy,
                gender: p.gender,
                t_category: p.t_category,
            }
        })
        .collect();
    Ok(ClusterView {
        timepoint: tp,
        symptoms: m.cols,
        k,
        points,
        merge_costs: groups.dendrogram.merges.iter().map(|m| m.cost).collect(),
        explained_variance: projection.variances,
        degenerate: projection.degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::impute::impute;
    use crate::model::fixtures::*;

    fn sym(id: &str) -> Symptom {
        Symptom::from_id(id).unwrap()
    }

    fn cohort() -> CohortDataset {
        let entries = [
            ("p1", vec![0, 1, 2], 1u8),
            ("p2", vec![0, 3], 2),
            ("p3", (0..12).collect::<Vec<_>>(), 8),
        ];
        let patients = entries.iter().map(|(id, _, _)| patient(id, Therapy::Radiation)).collect();
        let series = entries
            .iter()
            .map(|(id, tps, base)| (id.to_string(), series_at(tps, |t, s| (*base + (s.index() % 3) as u8 + t as u8 % 2).min(10))))
            .collect();
        impute(&CohortDataset::new(patients, series)).unwrap()
    }

    #[test]
    fn full_matrix_shape() {
        let m = build_matrix(&cohort(), TimePoint::new(0).unwrap(), &Symptom::all().collect::<Vec<_>>()).unwrap();
        assert_eq!(m.rows, vec!["p1", "p2", "p3"]);
        assert_eq!(m.cols.len(), 28);
        assert!(m.values.iter().all(|r| r.len() == 28));
    }

    #[test]
    fn subset_selects_columns() {
        let m = build_matrix(&cohort(), TimePoint::new(0).unwrap(), &[sym("work"), sym("mood"), sym("enjoyment"), sym("mood")]).unwrap();
        assert_eq!(m.cols, vec![sym("work"), sym("enjoyment"), sym("mood")]);
        assert_eq!(m.values[0].len(), 3);
    }

    #[test]
    fn late_matrix_skips_ineligible() {
        let m = build_matrix(&cohort(), TimePoint::parse("post6m").unwrap(), &[sym("pain")]).unwrap();
        assert_eq!(m.rows, vec!["p3"]);
    }

    #[test]
    fn errors() {
        let ds = cohort();
        let tp = TimePoint::new(0).unwrap();
        assert!(matches!(build_matrix(&ds, tp, &[]), Err(Error::EmptySymptomSubset)));
        assert!(matches!(
            build_matrix(&CohortDataset::empty(), tp, &[sym("pain")]),
            Err(Error::NotImputed)
        ));
        assert!(matches!(
            build_matrix(&impute(&CohortDataset::empty()).unwrap(), tp, &[sym("pain")]),
            Err(Error::NoEligiblePatients(_))
        ));
        let late = TimePoint::parse("post6m").unwrap();
        assert!(matches!(recluster(&ds, late, &[sym("pain")], 2), Err(Error::TooFewPatients { .. })));
    }

    #[test]
    fn recluster_labels_high_burden() {
        let ds = cohort();
        let view = recluster(&ds, TimePoint::new(0).unwrap(), &Symptom::all().collect::<Vec<_>>(), 2).unwrap();
        let high: Vec<_> = view.points.iter().filter(|p| p.group == 0).map(|p| p.patient_id.as_str()).collect();
        assert_eq!(high, vec!["p3"]);
        assert_eq!(view.points[0].burden_label(2), "low");
        assert_eq!(view.merge_costs.len(), 2);
        let again = recluster(&ds, TimePoint::new(0).unwrap(), &Symptom::all().collect::<Vec<_>>(), 2).unwrap();
        assert_eq!(view, again);
    }
}
