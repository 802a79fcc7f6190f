//! CSV ingestion and canonical serialization.
//!
//! Two inputs: a wide patients table
//! (`patient_id,age,gender,t_category,therapy[,total_dose]`) and a long
//! ratings table (`patient_id,timepoint,symptom,rating`). Parsing collects
//! every violation it finds instead of stopping at the first one.

use std::collections::{BTreeMap, HashMap};

use csv::{ReaderBuilder, StringRecord, Trim};

use crate::error::{Error, Result, Violation, ViolationKind};
use crate::model::{
    CohortDataset, Gender, PatientRecord, PatientSeries, RatingSeries, TCategory, MAX_RATING,
};
use crate::symptom::{Symptom, SYMPTOM_COUNT};
use crate::timegrid::{TimePoint, TIMEPOINT_COUNT};

pub const PATIENTS_FILE: &str = "patients.csv";
pub const RATINGS_FILE: &str = "ratings.csv";

const PATIENTS_HEADER: [&str; 6] = ["patient_id", "age", "gender", "t_category", "therapy", "total_dose"];
const RATINGS_HEADER: [&str; 4] = ["patient_id", "timepoint", "symptom", "rating"];

// Keeps pathological uploads from building unbounded violation lists.
const MAX_VIOLATIONS: usize = 1000;

struct Violations(Vec<Violation>);

impl Violations {
    fn push(
        &mut self,
        kind: ViolationKind,
        file: &'static str,
        line: Option<u64>,
        column: Option<&'static str>,
        detail: impl Into<String>,
    ) {
        if self.0.len() < MAX_VIOLATIONS {
            self.0.push(Violation {
                kind,
                file,
                line,
                column,
                detail: detail.into(),
            });
        }
    }
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(Trim::All)
        .from_reader(text.as_bytes())
}

fn line_of(record: &StringRecord) -> Option<u64> {
    record.position().map(|p| p.line())
}

/// Parses both tables into an un-imputed dataset.
///
/// Patients with fewer than two reported questionnaires are dropped.
/// Questionnaires missing some of the 28 items are accepted, the absent items
/// stay missing and are counted in [`CohortDataset::partial_questionnaires`].
pub fn parse_dataset(patients_csv: &str, ratings_csv: &str) -> Result<CohortDataset> {
    let mut violations = Violations(Vec::new());
    let patients = parse_patients(patients_csv, &mut violations);
    let series = parse_ratings(ratings_csv, &patients, &mut violations);
    if !violations.0.is_empty() {
        return Err(Error::Invalid(violations.0));
    }
    Ok(CohortDataset::new(patients.into_values().collect(), series))
}

fn parse_patients(text: &str, out: &mut Violations) -> BTreeMap<String, PatientRecord> {
    const FILE: &str = PATIENTS_FILE;
    let mut rdr = reader(text);
    let mut patients = BTreeMap::new();

    let header = match rdr.headers() {
        Ok(h) => h.clone(),
        Err(e) => {
            out.push(ViolationKind::MalformedCsv, FILE, Some(1), None, e.to_string());
            return patients;
        }
    };
    let arity = header.len();
    let names: Vec<&str> = header.iter().collect();
    if !(names == PATIENTS_HEADER[..5] || names == PATIENTS_HEADER[..]) {
        out.push(
            ViolationKind::MalformedCsv,
            FILE,
            Some(1),
            None,
            format!("expected header `{}[,total_dose]`", PATIENTS_HEADER[..5].join(",")),
        );
        return patients;
    }

    for record in rdr.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                out.push(ViolationKind::MalformedCsv, FILE, e.position().map(|p| p.line()), None, e.to_string());
                continue;
            }
        };
        let line = line_of(&record);
        if record.len() != arity {
            out.push(
                ViolationKind::MalformedCsv,
                FILE,
                line,
                None,
                format!("expected {arity} fields, found {}", record.len()),
            );
            continue;
        }
        let mut bad = |column: &'static str, detail: String| {
            out.push(ViolationKind::MalformedCsv, FILE, line, Some(column), detail);
        };
        let id = record[0].to_string();
        if id.is_empty() {
            bad("patient_id", "empty patient_id".into());
            continue;
        }
        let age = record[1].parse::<u32>().map_err(|_| bad("age", format!("invalid age `{}`", &record[1])));
        let gender = match record[2].to_ascii_uppercase().as_str() {
            "M" => Ok(Gender::M),
            "F" => Ok(Gender::F),
            other => {
                bad("gender", format!("invalid gender `{other}`"));
                Err(())
            }
        };
        let t_category = parse_t_category(&record[3]).ok_or_else(|| bad("t_category", format!("invalid t_category `{}`", &record[3])));
        let therapy = record[4].parse().map_err(|e: String| bad("therapy", e));
        let total_dose = match record.get(5) {
            None | Some("") => Ok(None),
            Some(s) => s
                .parse::<f64>()
                .ok()
                .filter(|d| d.is_finite() && *d >= 0.0)
                .map(Some)
                .ok_or_else(|| bad("total_dose", format!("invalid total_dose `{s}`"))),
        };
        let (Ok(age), Ok(gender), Ok(t_category), Ok(therapy), Ok(total_dose)) =
            (age, gender, t_category, therapy, total_dose)
        else {
            continue;
        };
        if patients.contains_key(&id) {
            out.push(ViolationKind::DuplicatePatient, FILE, line, Some("patient_id"), format!("patient `{id}` listed twice"));
            continue;
        }
        patients.insert(
            id.clone(),
            PatientRecord {
                patient_id: id,
                age,
                gender,
                t_category,
                therapy,
                total_dose,
            },
        );
    }
    patients
}

fn parse_t_category(s: &str) -> Option<TCategory> {
    let s = s.trim();
    let digits = s.strip_prefix(['T', 't']).unwrap_or(s);
    match digits {
        "0" => Some(TCategory::T0),
        "1" => Some(TCategory::T1),
        "2" => Some(TCategory::T2),
        "3" => Some(TCategory::T3),
        "4" => Some(TCategory::T4),
        _ => None,
    }
}

fn parse_ratings(
    text: &str,
    patients: &BTreeMap<String, PatientRecord>,
    out: &mut Violations,
) -> BTreeMap<String, PatientSeries> {
    const FILE: &str = RATINGS_FILE;
    let mut rdr = reader(text);
    let mut series: BTreeMap<String, PatientSeries> = BTreeMap::new();
    let mut seen: HashMap<(String, usize, usize), u64> = HashMap::new();

    match rdr.headers() {
        Ok(h) if h.iter().eq(RATINGS_HEADER) => {}
        Ok(_) => {
            out.push(ViolationKind::MalformedCsv, FILE, Some(1), None, format!("expected header `{}`", RATINGS_HEADER.join(",")));
            return series;
        }
        Err(e) => {
            out.push(ViolationKind::MalformedCsv, FILE, Some(1), None, e.to_string());
            return series;
        }
    }

    for record in rdr.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                out.push(ViolationKind::MalformedCsv, FILE, e.position().map(|p| p.line()), None, e.to_string());
                continue;
            }
        };
        let line = line_of(&record);
        if record.len() != RATINGS_HEADER.len() {
            out.push(
                ViolationKind::MalformedCsv,
                FILE,
                line,
                None,
                format!("expected 4 fields, found {}", record.len()),
            );
            continue;
        }
        let pid = &record[0];
        let tp = TimePoint::parse(&record[1]);
        if tp.is_none() {
            out.push(ViolationKind::UnknownTimepointLabel, FILE, line, Some("timepoint"), format!("unknown timepoint `{}`", &record[1]));
        }
        let symptom = Symptom::from_id(&record[2]);
        if symptom.is_none() {
            out.push(ViolationKind::UnknownSymptom, FILE, line, Some("symptom"), format!("unknown symptom `{}`", &record[2]));
        }
        let rating = parse_rating(&record[3]);
        if let Err((kind, detail)) = &rating {
            out.push(*kind, FILE, line, Some("rating"), detail.clone());
        }
        if !patients.contains_key(pid) {
            out.push(ViolationKind::UnknownPatient, FILE, line, Some("patient_id"), format!("patient `{pid}` not in {PATIENTS_FILE}"));
            continue;
        }
        let (Some(tp), Some(symptom), Ok(rating)) = (tp, symptom, rating) else {
            continue;
        };
        let key = (pid.to_string(), tp.index(), symptom.index());
        if let Some(first) = seen.get(&key) {
            out.push(
                ViolationKind::DuplicateCell,
                FILE,
                line,
                None,
                format!("{pid}/{tp}/{symptom} already given on line {first}"),
            );
            continue;
        }
        seen.insert(key, line.unwrap_or(0));
        let entry = series
            .entry(pid.to_string())
            .or_insert_with(|| [RatingSeries::default(); SYMPTOM_COUNT]);
        let slot = &mut entry[symptom.index()];
        slot.values[tp.index()] = rating;
        slot.reported[tp.index()] = rating.is_some();
    }
    series
}

fn parse_rating(s: &str) -> std::result::Result<Option<u8>, (ViolationKind, String)> {
    if s.is_empty() {
        return Ok(None);
    }
    if let Ok(v) = s.parse::<i64>() {
        return if (0..=MAX_RATING as i64).contains(&v) {
            Ok(Some(v as u8))
        } else {
            Err((ViolationKind::RatingOutOfRange, format!("rating {v} outside 0..={MAX_RATING}")))
        };
    }
    if s.parse::<f64>().is_ok() {
        return Err((ViolationKind::RatingOutOfRange, format!("rating `{s}` is not an integer")));
    }
    Err((ViolationKind::MalformedCsv, format!("rating `{s}` is not a number")))
}

/// Canonical `(patients.csv, ratings.csv)` text for a dataset.
///
/// Only reported values are written, so imputed fills never leak into the
/// canonical form. Rows are ordered by patient id, timepoint, then manifest
/// order; timepoints use their labels; line endings are `\n`.
pub fn to_canonical_csv(dataset: &CohortDataset) -> (String, String) {
    let mut patients = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    patients.write_record(PATIENTS_HEADER).expect("in-memory write");
    for p in dataset.patients() {
        let dose = p.total_dose.map(format_dose).unwrap_or_default();
        patients
            .write_record([
                p.patient_id.as_str(),
                &p.age.to_string(),
                &format!("{:?}", p.gender),
                &format!("{:?}", p.t_category),
                p.therapy.label(),
                &dose,
            ])
            .expect("in-memory write");
    }

    let mut ratings = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    ratings.write_record(RATINGS_HEADER).expect("in-memory write");
    for p in dataset.patients() {
        let series = dataset.patient_series(&p.patient_id).expect("series for every patient");
        for t in 0..TIMEPOINT_COUNT {
            let tp = TimePoint::new(t).expect("grid index");
            for s in Symptom::all() {
                if let Some(v) = series[s.index()].reported_value(tp) {
                    ratings
                        .write_record([p.patient_id.as_str(), tp.label(), s.id(), &v.to_string()])
                        .expect("in-memory write");
                }
            }
        }
    }

    let into_string = |w: csv::Writer<Vec<u8>>| String::from_utf8(w.into_inner().expect("flush")).expect("utf-8");
    (into_string(patients), into_string(ratings))
}

fn format_dose(d: f64) -> String {
    // Shortest representation that parses back to the same f64.
    format!("{d}")
}
