//! Synthetic cohort generator.
//!
//! Stands in for a real questionnaire dataset. The planted structure is fixed
//! and documented here so tests can measure how well the engine recovers it:
//!
//! * Each patient belongs to a planted burden group: `High` with probability
//!   [`SynthConfig::high_fraction`], otherwise `Low`. The truth is written to
//!   `planted.csv`.
//! * Symptoms belong to five modules (fatigue, mucositis, mood,
//!   gastrointestinal, neurological; see [`module_of`]). For each patient,
//!   phase and module a Bernoulli draw decides whether the module is active;
//!   the probabilities are in [`activation`] and the mucositis and
//!   gastrointestinal ones scale with therapy intensity. High-burden patients
//!   have every module active. Within an active module each item is active
//!   with probability 0.85. Inactive items are rated exactly 0.
//! * The expected rating of an active item `s` at slot `t` is
//!   `base[s] + trajectory(s, t, therapy) + gap·[group = High]`, where
//!   `trajectory` rises through the acute weeks (scaled by therapy intensity,
//!   with head-and-neck items rising most) and decays over the late visits.
//!   `gap` is [`SynthConfig::burden_gap`] and is added at every slot.
//! * Observed ratings of active items are that mean plus Gaussian noise with
//!   standard deviation [`SynthConfig::noise_sd`], rounded and clamped to
//!   0..=10.
//! * Baseline is reported with probability 0.95 and each acute week with
//!   probability 0.85. Surveillance stops early for a share of patients
//!   (see [`SynthConfig::full_followup`]); late visits inside the
//!   surveillance window are reported with probability 0.8. Every patient
//!   ends up with at least two questionnaires. Reported questionnaires always
//!   carry all 28 items.
//!
//! The generator shares only the data model (symptom ids, grid labels,
//! therapy labels) with the analytics engine.

use std::fs;
use std::io;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use symcohort_core::ingest::{PATIENTS_FILE, RATINGS_FILE};
use symcohort_core::symptom::{Category, Symptom, SYMPTOM_COUNT};
use symcohort_core::timegrid::{Phase, TimePoint, TIMEPOINT_COUNT};
use symcohort_core::Therapy;

pub const PLANTED_FILE: &str = "planted.csv";

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("need at least 2 patients, got {0}")]
    TooFewPatients(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub patients: usize,
    pub seed: u64,
    pub high_fraction: f64,
    /// Mean rating difference between the planted groups, every symptom and slot.
    pub burden_gap: f64,
    pub noise_sd: f64,
    /// Share of patients followed through the last late visit.
    pub full_followup: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            patients: 699,
            seed: 42,
            high_fraction: 0.3,
            burden_gap: 4.5,
            noise_sd: 1.0,
            full_followup: 0.4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlantedGroup {
    High,
    Low,
}

impl PlantedGroup {
    pub fn as_str(self) -> &'static str {
        match self {
            PlantedGroup::High => "high",
            PlantedGroup::Low => "low",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCohort {
    pub patients_csv: String,
    pub ratings_csv: String,
    pub planted_csv: String,
    pub planted: Vec<(String, PlantedGroup)>,
}

impl SynthCohort {
    pub fn write_to(&self, dir: &Path) -> Result<(), SynthError> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(PATIENTS_FILE), &self.patients_csv)?;
        fs::write(dir.join(RATINGS_FILE), &self.ratings_csv)?;
        fs::write(dir.join(PLANTED_FILE), &self.planted_csv)?;
        Ok(())
    }
}

// Baseline mean per symptom, manifest order.
const BASE: [f64; SYMPTOM_COUNT] = [
    2.5, 2.0, 1.5, 1.8, 1.8, 1.0, 0.8, 0.6, 1.5, 1.0, 0.8, 0.5, 0.2, // core
    1.5, 1.0, 1.2, 1.2, 0.8, 0.8, 1.0, 0.6, 0.5, // head and neck
    1.5, 1.2, 1.5, 1.0, 0.8, 0.6, // interference
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Module {
    Fatigue,
    Mucositis,
    Mood,
    Gastrointestinal,
    Neurological,
}

impl Module {
    pub const ALL: [Module; 5] =
        [Module::Fatigue, Module::Mucositis, Module::Mood, Module::Gastrointestinal, Module::Neurological];
}

pub fn module_of(symptom: Symptom) -> Module {
    match symptom.id() {
        "fatigue" | "sleep" | "drowsiness" | "work" | "activity" => Module::Fatigue,
        "pain" | "dry_mouth" | "swallow" | "mucus" | "taste" | "sores" | "choking" | "skin" => Module::Mucositis,
        "distress" | "sadness" | "enjoyment" | "mood" | "relations" => Module::Mood,
        "appetite" | "nausea" | "vomit" | "constipation" => Module::Gastrointestinal,
        _ => Module::Neurological,
    }
}

/// Probability that a low-burden patient has `module` active during `phase`.
pub fn activation(module: Module, phase: Phase, therapy: Therapy) -> f64 {
    let k = therapy_intensity(therapy);
    let p = match (module, phase) {
        (Module::Fatigue, Phase::Baseline) => 0.35,
        (Module::Fatigue, Phase::Acute) => 0.65,
        (Module::Fatigue, Phase::Late) => 0.4,
        (Module::Mucositis, Phase::Baseline) => 0.15,
        (Module::Mucositis, Phase::Acute) => 0.7 * k,
        (Module::Mucositis, Phase::Late) => 0.35,
        (Module::Mood, Phase::Baseline) => 0.3,
        (Module::Mood, Phase::Acute) => 0.4,
        (Module::Mood, Phase::Late) => 0.3,
        (Module::Gastrointestinal, Phase::Baseline) => 0.1,
        (Module::Gastrointestinal, Phase::Acute) => 0.35 * k,
        (Module::Gastrointestinal, Phase::Late) => 0.1,
        (Module::Neurological, Phase::Baseline) => 0.15,
        (Module::Neurological, Phase::Acute) => 0.25,
        (Module::Neurological, Phase::Late) => 0.3,
    };
    p.min(0.95)
}

const ITEM_ACTIVATION: f64 = 0.85;

fn therapy_intensity(t: Therapy) -> f64 {
    match t {
        Therapy::Radiation => 0.7,
        Therapy::CcRadiation => 1.0,
        Therapy::IcRadiation => 0.9,
        Therapy::IcRadiationCc => 1.2,
    }
}

/// Mean shift over baseline at grid slot `t`.
fn trajectory(symptom: Symptom, t: usize, therapy: Therapy) -> f64 {
    let amplitude = match symptom.category() {
        Category::HncSpecific => 2.5,
        Category::Core => 1.2,
        Category::Interference => 1.5,
    } * therapy_intensity(therapy);
    let shape = match t {
        0 => 0.0,
        1..=7 => t as f64 / 7.0,
        8 => 0.7,
        9 => 0.4,
        10 => 0.25,
        _ => 0.15,
    };
    // Late-onset items (numbness, memory, breath) do not recover.
    let persistent = matches!(symptom.id(), "numbness" | "memory" | "breath");
    if persistent && t >= 8 {
        amplitude * 0.8
    } else {
        amplitude * shape
    }
}

pub fn generate(config: &SynthConfig) -> Result<SynthCohort, SynthError> {
    if config.patients < 2 {
        return Err(SynthError::TooFewPatients(config.patients));
    }
    for (name, v) in [("high_fraction", config.high_fraction), ("full_followup", config.full_followup)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(SynthError::InvalidConfig(format!("{name} = {v} outside [0, 1]")));
        }
    }
    let noise = Normal::new(0.0, config.noise_sd)
        .map_err(|e| SynthError::InvalidConfig(format!("noise_sd: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let width = config.patients.to_string().len().max(4);
    let mut patients = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut ratings = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut planted_w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    patients.write_record(["patient_id", "age", "gender", "t_category", "therapy", "total_dose"])?;
    ratings.write_record(["patient_id", "timepoint", "symptom", "rating"])?;
    planted_w.write_record(["patient_id", "group"])?;
    let mut planted = Vec::with_capacity(config.patients);

    for i in 1..=config.patients {
        let id = format!("p{i:0width$}");
        let group = if rng.random_bool(config.high_fraction) { PlantedGroup::High } else { PlantedGroup::Low };
        let therapy = Therapy::ALL[rng.random_range(0..Therapy::ALL.len())];
        let gender = if rng.random_bool(0.75) { "M" } else { "F" };
        let age = rng.random_range(35..=85u32);
        let t_max = if group == PlantedGroup::High { 5 } else { 4 };
        let t_category = format!("T{}", rng.random_range(0..t_max));
        let dose = if rng.random_bool(0.8) { "70" } else { "66" };
        patients.write_record([id.as_str(), &age.to_string(), gender, &t_category, therapy.label(), dose])?;
        planted_w.write_record([id.as_str(), group.as_str()])?;

        let reported = questionnaire_mask(&mut rng, config.full_followup);
        let gap = if group == PlantedGroup::High { config.burden_gap } else { 0.0 };
        // Individual offset so patients in a group are not identical.
        let offset: Vec<f64> = (0..SYMPTOM_COUNT).map(|_| rng.random_range(-0.5..0.5)).collect();
        let mut active = [[false; SYMPTOM_COUNT]; 3];
        for (pi, phase) in Phase::ALL.into_iter().enumerate() {
            let modules: Vec<bool> = Module::ALL
                .iter()
                .map(|&m| rng.random_bool(activation(m, phase, therapy)))
                .collect();
            for s in Symptom::all() {
                let item = rng.random_bool(ITEM_ACTIVATION);
                let module = Module::ALL.iter().position(|&m| m == module_of(s)).expect("module listed");
                active[pi][s.index()] = group == PlantedGroup::High || (modules[module] && item);
            }
        }
        for tp in TimePoint::all() {
            let t = tp.index();
            // Draw noise for every slot so reporting patterns do not shift later draws.
            let draws: Vec<f64> = (0..SYMPTOM_COUNT).map(|_| noise.sample(&mut rng)).collect();
            if !reported[t] {
                continue;
            }
            for s in Symptom::all() {
                if !active[tp.phase() as usize][s.index()] {
                    ratings.write_record([id.as_str(), tp.label(), s.id(), "0"])?;
                    continue;
                }
                let mean = BASE[s.index()] + offset[s.index()] + trajectory(s, t, therapy) + gap;
                let rating = (mean + draws[s.index()]).round().clamp(0.0, 10.0) as u8;
                ratings.write_record([id.as_str(), tp.label(), s.id(), &rating.to_string()])?;
            }
        }
        planted.push((id, group));
    }

    let text = |w: csv::Writer<Vec<u8>>| -> Result<String, SynthError> {
        let bytes = w.into_inner().map_err(|e| SynthError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("ascii output"))
    };
    Ok(SynthCohort {
        patients_csv: text(patients)?,
        ratings_csv: text(ratings)?,
        planted_csv: text(planted_w)?,
        planted,
    })
}

fn questionnaire_mask(rng: &mut ChaCha8Rng, full_followup: f64) -> [bool; TIMEPOINT_COUNT] {
    let mut mask = [false; TIMEPOINT_COUNT];
    let last = if rng.random_bool(full_followup) {
        TIMEPOINT_COUNT - 1
    } else {
        rng.random_range(3..TIMEPOINT_COUNT - 1)
    };
    mask[0] = rng.random_bool(0.95);
    for (t, slot) in mask.iter_mut().enumerate().take(last + 1).skip(1) {
        let p = if t <= 7 { 0.85 } else { 0.8 };
        *slot = rng.random_bool(p);
    }
    mask[last] = true;
    if mask.iter().filter(|&&m| m).count() < 2 {
        mask[0] = true;
        mask[1] = true;
    }
    mask
}

impl From<csv::Error> for SynthError {
    fn from(e: csv::Error) -> Self {
        SynthError::Io(e.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_bytes() {
        let cfg = SynthConfig { patients: 50, ..Default::default() };
        assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
        let other = SynthConfig { seed: 43, ..cfg };
        assert_ne!(generate(&cfg).unwrap().ratings_csv, generate(&other).unwrap().ratings_csv);
    }

    #[test]
    fn rejects_single_patient() {
        assert!(matches!(generate(&SynthConfig { patients: 1, ..Default::default() }), Err(SynthError::TooFewPatients(1))));
    }

    #[test]
    fn two_patient_cohort_parses_with_both_kept() {
        let c = generate(&SynthConfig { patients: 2, ..Default::default() }).unwrap();
        let ds = symcohort_core::parse_dataset(&c.patients_csv, &c.ratings_csv).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.partial_questionnaires(), 0);
    }

    #[test]
    fn every_patient_has_two_questionnaires() {
        let c = generate(&SynthConfig { patients: 300, seed: 9, ..Default::default() }).unwrap();
        let ds = symcohort_core::parse_dataset(&c.patients_csv, &c.ratings_csv).unwrap();
        assert_eq!(ds.len(), 300);
        let high = c.planted.iter().filter(|(_, g)| *g == PlantedGroup::High).count();
        assert!((60..=120).contains(&high), "{high}");
        // Some patients drop out before the late phase ends.
        let last: Vec<usize> = ds.patients().iter().map(|p| ds.reported_timepoints(&p.patient_id).last().unwrap().index()).collect();
        assert!(last.iter().any(|&l| l < 11) && last.contains(&11));
    }
}
