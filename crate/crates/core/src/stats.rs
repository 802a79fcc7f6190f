//! Cohort context summaries. Everything here reads reported values only, so
//! carry-forward fills never count as observations.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::CohortDataset;
use crate::symptom::{Symptom, SYMPTOM_COUNT};
use crate::timegrid::TimePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Bin {
    Zero,
    OneToFive,
    SixToNine,
    Ten,
}

impl Bin {
    pub const ALL: [Bin; 4] = [Bin::Zero, Bin::OneToFive, Bin::SixToNine, Bin::Ten];

    pub fn of(rating: u8) -> Bin {
        match rating {
            0 => Bin::Zero,
            1..=5 => Bin::OneToFive,
            6..=9 => Bin::SixToNine,
            _ => Bin::Ten,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Bin::Zero => "0",
            Bin::OneToFive => "1-5",
            Bin::SixToNine => "6-9",
            Bin::Ten => "10",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapCell {
    pub symptom: Symptom,
    pub timepoint: TimePoint,
    /// Fractions of reporters per [`Bin`], in `Bin::ALL` order.
    pub bin_fractions: [f64; 4],
    pub reporters: usize,
    /// Reporters over the whole cohort.
    pub reporting_fraction: f64,
}

/// 28 × 12 cells, symptom-major in manifest order.
pub fn heatmap(dataset: &CohortDataset) -> Vec<HeatmapCell> {
    let cohort = dataset.len();
    let mut cells = Vec::with_capacity(SYMPTOM_COUNT * TimePoint::all().len());
    for symptom in Symptom::all() {
        for tp in TimePoint::all() {
            let mut counts = [0usize; 4];
            for p in dataset.patients() {
                if let Some(v) = dataset.series(&p.patient_id, symptom).and_then(|s| s.reported_value(tp)) {
                    counts[Bin::of(v) as usize] += 1;
                }
            }
            let reporters: usize = counts.iter().sum();
            let bin_fractions = if reporters == 0 {
                [0.0; 4]
            } else {
                counts.map(|c| c as f64 / reporters as f64)
            };
            cells.push(HeatmapCell {
                symptom,
                timepoint: tp,
                bin_fractions,
                reporters,
                reporting_fraction: if cohort == 0 { 0.0 } else { reporters as f64 / cohort as f64 },
            });
        }
    }
    cells
}

/// Ranks starting at 1; tied values share the mean of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman's ρ with average ranks for ties; `None` when either side is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    pearson(&average_ranks(x), &average_ranks(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationEntry {
    pub symptom_a: Symptom,
    pub symptom_b: Symptom,
    pub rho: Option<f64>,
    /// Patients who reported both symptoms.
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub timepoint: TimePoint,
    pub reporters: usize,
    /// Row-major 28 × 28.
    pub entries: Vec<CorrelationEntry>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: Symptom, b: Symptom) -> &CorrelationEntry {
        &self.entries[a.index() * SYMPTOM_COUNT + b.index()]
    }

    pub fn row(&self, a: Symptom) -> &[CorrelationEntry] {
        &self.entries[a.index() * SYMPTOM_COUNT..(a.index() + 1) * SYMPTOM_COUNT]
    }

    /// Entries with `symptom_a <= symptom_b`.
    pub fn upper_triangle(&self) -> impl Iterator<Item = &CorrelationEntry> {
        self.entries.iter().filter(|e| e.symptom_a <= e.symptom_b)
    }
}

/// Pairwise Spearman correlations among patients who filled in a
/// questionnaire at `tp`, each pair using the patients who reported both items.
pub fn spearman_matrix(dataset: &CohortDataset, tp: TimePoint) -> Result<CorrelationMatrix> {
    let reporters: Vec<&str> = dataset
        .patients()
        .iter()
        .map(|p| p.patient_id.as_str())
        .filter(|id| dataset.reported_at(id, tp))
        .collect();
    if reporters.len() < 2 {
        return Err(Error::TooFewReporters(reporters.len()));
    }
    let columns: Vec<Vec<Option<f64>>> = Symptom::all()
        .map(|s| {
            reporters
                .iter()
                .map(|id| dataset.series(id, s).and_then(|r| r.reported_value(tp)).map(f64::from))
                .collect()
        })
        .collect();

    let mut entries = Vec::with_capacity(SYMPTOM_COUNT * SYMPTOM_COUNT);
    for a in Symptom::all() {
        for b in Symptom::all() {
            let (x, y): (Vec<f64>, Vec<f64>) = columns[a.index()]
                .iter()
                .zip(&columns[b.index()])
                .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
                .unzip();
            entries.push(CorrelationEntry {
                symptom_a: a,
                symptom_b: b,
                rho: spearman(&x, &y),
                n: x.len(),
            });
        }
    }
    // Pearson is symmetric in exact arithmetic; make it symmetric in floating point too.
    for a in 0..SYMPTOM_COUNT {
        for b in a + 1..SYMPTOM_COUNT {
            entries[b * SYMPTOM_COUNT + a].rho = entries[a * SYMPTOM_COUNT + b].rho;
        }
    }
    Ok(CorrelationMatrix {
        timepoint: tp,
        reporters: reporters.len(),
        entries,
    })
}

/// Share of patients reporting `symptom` at `tp` with a rating of at least
/// `presence_threshold`.
pub fn prevalence(dataset: &CohortDataset, symptom: Symptom, tp: TimePoint, presence_threshold: u8) -> Result<f64> {
    let ratings: Vec<u8> = dataset
        .patients()
        .iter()
        .filter_map(|p| dataset.series(&p.patient_id, symptom)?.reported_value(tp))
        .collect();
    if ratings.is_empty() {
        return Err(Error::NoReporters);
    }
    let present = ratings.iter().filter(|&&r| r >= presence_threshold).count();
    Ok(present as f64 / ratings.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::Therapy;
    use proptest::prelude::*;

    fn cohort(ratings: &[u8], tps: &[usize]) -> CohortDataset {
        let patients = (0..ratings.len()).map(|i| patient(&format!("p{i}"), Therapy::Radiation)).collect();
        let series = ratings
            .iter()
            .enumerate()
            .map(|(i, &r)| (format!("p{i}"), series_at(tps, move |_, s| if s.index() == 0 { r } else { (r + s.index() as u8) % 11 })))
            .collect();
        CohortDataset::new(patients, series)
    }

    #[test]
    fn bins_partition_scale() {
        assert_eq!(Bin::of(0), Bin::Zero);
        assert_eq!(Bin::of(1), Bin::OneToFive);
        assert_eq!(Bin::of(5), Bin::OneToFive);
        assert_eq!(Bin::of(6), Bin::SixToNine);
        assert_eq!(Bin::of(9), Bin::SixToNine);
        assert_eq!(Bin::of(10), Bin::Ten);
    }

    #[test]
    fn heatmap_quarters() {
        let ds = cohort(&[0, 3, 7, 10], &[0, 2]);
        let cells = heatmap(&ds);
        assert_eq!(cells.len(), 336);
        let cell = &cells[0];
        assert_eq!(cell.bin_fractions, [0.25; 4]);
        assert_eq!(cell.reporting_fraction, 1.0);
        let silent = &cells[1];
        assert_eq!(silent.timepoint.index(), 1);
        assert_eq!(silent.bin_fractions, [0.0; 4]);
        assert_eq!(silent.reporting_fraction, 0.0);
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(average_ranks(&[1.0, 2.0, 2.0, 4.0]), vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(average_ranks(&[3.0, 3.0, 3.0]), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn spearman_examples() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        let rho = spearman(&[1.0, 2.0, 2.0, 4.0], &[1.0, 3.0, 3.0, 5.0]).unwrap();
        assert!((rho - 1.0).abs() < 1e-12);
        assert_eq!(spearman(&[1.0, 1.0], &[1.0, 2.0]), None);
    }

    #[test]
    fn matrix_shape_and_diagonal() {
        let ds = cohort(&[0, 3, 7, 10, 4], &[0, 5]);
        let m = spearman_matrix(&ds, TimePoint::new(5).unwrap()).unwrap();
        assert_eq!(m.entries.len(), 784);
        assert_eq!(m.upper_triangle().count(), 28 * 29 / 2);
        for s in Symptom::all() {
            let d = m.get(s, s);
            assert!(d.rho.is_none() || (d.rho.unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(matches!(spearman_matrix(&ds, TimePoint::new(1).unwrap()), Err(Error::TooFewReporters(0))));
    }

    #[test]
    fn prevalence_examples() {
        let ds = cohort(&[0, 0, 5, 7], &[0, 1]);
        let fatigue = Symptom::from_index(0).unwrap();
        let tp = TimePoint::new(0).unwrap();
        assert_eq!(prevalence(&ds, fatigue, tp, 1).unwrap(), 0.5);
        assert_eq!(prevalence(&ds, fatigue, tp, 10).unwrap(), 0.0);
        let all = cohort(&[1, 2, 9], &[0, 1]);
        assert_eq!(prevalence(&all, fatigue, tp, 1).unwrap(), 1.0);
        assert!(matches!(prevalence(&ds, fatigue, TimePoint::new(4).unwrap(), 1), Err(Error::NoReporters)));
    }

    proptest! {
        #[test]
        fn spearman_ignores_monotone_transforms(x in prop::collection::vec(0u8..=10, 3..20), seed in any::<u64>()) {
            let n = x.len();
            let xs: Vec<f64> = x.iter().map(|&v| f64::from(v)).collect();
            let ys: Vec<f64> = (0..n).map(|i| ((seed >> (i % 60)) & 7) as f64).collect();
            let transformed: Vec<f64> = xs.iter().map(|v| (v * 0.7).exp() + 3.0).collect();
            let a = spearman(&xs, &ys);
            let b = spearman(&transformed, &ys);
            match (a, b) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-12),
                (None, None) => {}
                other => prop_assert!(false, "{:?}", other),
            }
        }

        #[test]
        fn prevalence_non_increasing(ratings in prop::collection::vec(0u8..=10, 1..30)) {
            let ds = cohort(&ratings, &[0, 1]);
            let tp = TimePoint::new(0).unwrap();
            let fatigue = Symptom::from_index(0).unwrap();
            let mut prev = 1.0;
            for t in 0..=10 {
                let p = prevalence(&ds, fatigue, tp, t).unwrap();
                prop_assert!(p <= prev);
                prev = p;
            }
        }
    }
}
