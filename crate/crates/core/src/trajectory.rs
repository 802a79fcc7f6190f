//! Filament-plot geometry.
//!
//! A filament starts at a root and advances one segment per grid step. Each
//! segment is a horizontal stub of length `l` (elapsed time) rotated about its
//! start by `θ = θ_max · Δr / (2 · Δr_max)`, so a rating increase bends the
//! segment upward. Angles are relative to the horizontal at every vertex,
//! not cumulative.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CohortDataset, RatingSeries, Therapy, MAX_RATING};
use crate::symptom::Symptom;
use crate::timegrid::{Phase, TimePoint, TIMEPOINT_COUNT};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleParams {
    pub theta_max: f64,
    pub delta_r_max: f64,
}

impl Default for AngleParams {
    fn default() -> Self {
        AngleParams {
            theta_max: 3.0 * PI / 4.0,
            delta_r_max: f64::from(MAX_RATING),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilamentParams {
    pub angle: AngleParams,
    /// Length of a one-week step, in layout units.
    pub unit_length: f64,
    /// Vertical root offset per baseline rating point for therapy means.
    pub spread_scale: f64,
}

impl Default for FilamentParams {
    fn default() -> Self {
        FilamentParams {
            angle: AngleParams::default(),
            unit_length: 1.0,
            spread_scale: 0.8,
        }
    }
}

pub fn segment_angle(delta_r: f64, p: &AngleParams) -> Result<f64> {
    if !delta_r.is_finite() || delta_r.abs() > p.delta_r_max {
        return Err(Error::DeltaOutOfRange(delta_r));
    }
    Ok(p.theta_max * delta_r / (2.0 * p.delta_r_max))
}

/// `L0 · log2(1 + days / 7)`: one week maps to exactly `L0`.
pub fn length_for_days(days: f64, unit_length: f64) -> f64 {
    unit_length * (1.0 + days / 7.0).log2()
}

pub fn segment_length(from: TimePoint, to: TimePoint, unit_length: f64) -> Result<f64> {
    if to.index() != from.index() + 1 {
        return Err(Error::NonAdjacentTimepoints(from.index(), to.index()));
    }
    Ok(length_for_days(f64::from(to.day_offset() - from.day_offset()), unit_length))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Vertex {
    pub x: f64,
    pub y: f64,
    pub timepoint_index: usize,
    pub reported: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilamentPolyline {
    /// Patient id or therapy label.
    pub owner: String,
    pub symptom: Symptom,
    pub vertices: Vec<Vertex>,
    pub highlight: bool,
}

/// Traces a polyline over real-valued ratings.
///
/// Vertices run from slot 0 through `last` inclusive. A step into a slot with
/// `reported == false` is drawn flat regardless of the values.
pub fn trace(
    values: &[f64],
    reported: &[bool],
    last: usize,
    root: (f64, f64),
    params: &FilamentParams,
) -> Result<Vec<Vertex>> {
    assert!(last < values.len() && values.len() == reported.len());
    let mut vertices = Vec::with_capacity(last + 1);
    let (mut x, mut y) = root;
    vertices.push(Vertex {
        x,
        y,
        timepoint_index: 0,
        reported: reported[0],
    });
    for t in 0..last {
        let from = TimePoint::new(t).expect("grid slot");
        let to = TimePoint::new(t + 1).expect("grid slot");
        let theta = if reported[t + 1] {
            segment_angle(values[t + 1] - values[t], &params.angle)?
        } else {
            0.0
        };
        let l = segment_length(from, to, params.unit_length)?;
        x += l * theta.cos();
        y += l * theta.sin();
        vertices.push(Vertex {
            x,
            y,
            timepoint_index: t + 1,
            reported: reported[t + 1],
        });
    }
    Ok(vertices)
}

/// Filament of one imputed series, rooted at the origin and ending at the
/// last reported slot.
pub fn build_filament(owner: &str, symptom: Symptom, series: &RatingSeries, params: &FilamentParams) -> Result<FilamentPolyline> {
    if !series.is_complete() {
        return Err(Error::NotImputed);
    }
    let values: Vec<f64> = series.values.iter().map(|v| f64::from(v.expect("complete"))).collect();
    let last = series.last_reported().unwrap_or(0);
    Ok(FilamentPolyline {
        owner: owner.to_string(),
        symptom,
        vertices: trace(&values, &series.reported, last, (0.0, 0.0), params)?,
        highlight: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FilamentMode {
    Individual,
    TherapyMean,
}

impl std::str::FromStr for FilamentMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "individual" => Ok(FilamentMode::Individual),
            "therapy_mean" => Ok(FilamentMode::TherapyMean),
            other => Err(format!("unknown filament mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilamentSet {
    pub symptom: Symptom,
    pub mode: FilamentMode,
    /// Phase whose segments the UI should emphasise.
    pub phase_highlight: Option<Phase>,
    pub filaments: Vec<FilamentPolyline>,
}

/// One filament per selected patient (all patients when `patients` is `None`),
/// all sharing the origin as root. A filament is highlighted when its owner
/// is `highlight`, or when exactly one patient was selected.
pub fn individual_filaments(
    dataset: &CohortDataset,
    symptom: Symptom,
    patients: Option<&[String]>,
    highlight: Option<&str>,
    params: &FilamentParams,
) -> Result<FilamentSet> {
    if !dataset.is_imputed() {
        return Err(Error::NotImputed);
    }
    let ids: Vec<String> = match patients {
        Some(list) => {
            let unique: BTreeSet<&String> = list.iter().collect();
            unique.into_iter().cloned().collect()
        }
        None => dataset.patients().iter().map(|p| p.patient_id.clone()).collect(),
    };
    for id in ids.iter().map(String::as_str).chain(highlight) {
        if dataset.patient(id).is_none() {
            return Err(Error::UnknownPatient(id.to_string()));
        }
    }
    let single = ids.len() == 1;
    let filaments = ids
        .iter()
        .map(|id| {
            let series = dataset.series(id, symptom).expect("known patient");
            let mut f = build_filament(id, symptom, series, params)?;
            f.highlight = single || highlight == Some(id.as_str());
            Ok(f)
        })
        .collect::<Result<_>>()?;
    Ok(FilamentSet {
        symptom,
        mode: FilamentMode::Individual,
        phase_highlight: None,
        filaments,
    })
}

/// Per-therapy mean trajectories.
///
/// At each slot the mean is taken over the therapy's patients eligible for
/// that slot's phase. Slots with no contributor are treated as unreported
/// (flat, carrying the previous mean) and the filament stops at the last slot
/// that had one. Roots sit at `(0, spread_scale · baseline mean)`.
pub fn therapy_mean_filaments(
    dataset: &CohortDataset,
    symptom: Symptom,
    phase_highlight: Option<Phase>,
    params: &FilamentParams,
) -> Result<FilamentSet> {
    if !dataset.is_imputed() {
        return Err(Error::NotImputed);
    }
    let eligible: Vec<BTreeSet<String>> = Phase::ALL.iter().map(|&p| dataset.eligible_patients(p)).collect();
    let mut filaments = Vec::new();
    for therapy in Therapy::ALL {
        let members: Vec<&str> = dataset
            .patients()
            .iter()
            .filter(|p| p.therapy == therapy)
            .map(|p| p.patient_id.as_str())
            .collect();
        if members.is_empty() {
            continue;
        }
        let mut values = [0.0; TIMEPOINT_COUNT];
        let mut reported = [false; TIMEPOINT_COUNT];
        for tp in TimePoint::all() {
            let pool = &eligible[tp.phase() as usize];
            let ratings: Vec<f64> = members
                .iter()
                .filter(|id| pool.contains(**id))
                .map(|id| f64::from(dataset.series(id, symptom).and_then(|s| s.get(tp)).expect("imputed")))
                .collect();
            let t = tp.index();
            if ratings.is_empty() {
                values[t] = if t == 0 { 0.0 } else { values[t - 1] };
            } else {
                values[t] = ratings.iter().sum::<f64>() / ratings.len() as f64;
                reported[t] = true;
            }
        }
        let last = reported.iter().rposition(|&r| r).unwrap_or(0);
        let root = (0.0, params.spread_scale * values[0]);
        filaments.push(FilamentPolyline {
            owner: therapy.label().to_string(),
            symptom,
            vertices: trace(&values, &reported, last, root, params)?,
            highlight: false,
        });
    }
    Ok(FilamentSet {
        symptom,
        mode: FilamentMode::TherapyMean,
        phase_highlight,
        filaments,
    })
}
