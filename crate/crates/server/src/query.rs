//! Typed analytics queries shared by the HTTP handlers and the CLI.
//!
//! A query is parsed once from request parameters (or built from CLI flags),
//! renders to a canonical cache key, and runs against a [`Cohort`] to produce
//! the response body.

use std::collections::BTreeMap;

use symcohort_core::arm::{mine_rules, MiningParams, TransactionOptions};
use symcohort_core::cluster::recluster;
use symcohort_core::export::{
    cluster_payload, correlation_payload, filament_payload, heatmap_payload, patient_payload, rules_csv, rules_payload,
    to_json,
};
use symcohort_core::graph::{build_graph, layout, LayoutParams};
use symcohort_core::stats::{heatmap, spearman_matrix};
use symcohort_core::trajectory::{individual_filaments, therapy_mean_filaments, FilamentMode, FilamentParams};
use symcohort_core::{impute, parse_dataset, CohortDataset, Phase, Symptom, TimePoint};

use crate::error::ApiError;

/// A validated dataset in both raw and imputed form.
///
/// Rule mining and the descriptive statistics read the raw ratings; clustering,
/// filaments and patient series read the imputed ones.
#[derive(Debug, Clone)]
pub struct Cohort {
    pub raw: CohortDataset,
    pub imputed: CohortDataset,
}

impl Cohort {
    pub fn from_raw(raw: CohortDataset) -> Result<Cohort, ApiError> {
        let imputed = impute(&raw)?;
        Ok(Cohort { raw, imputed })
    }

    pub fn from_csv(patients_csv: &str, ratings_csv: &str) -> Result<Cohort, ApiError> {
        Cohort::from_raw(parse_dataset(patients_csv, ratings_csv)?)
    }
}

pub type Params = BTreeMap<String, String>;

fn param<'a>(params: &'a Params, name: &str) -> Option<&'a str> {
    params.get(name).map(|s| s.trim()).filter(|s| !s.is_empty())
}

fn required<'a>(params: &'a Params, name: &str) -> Result<&'a str, ApiError> {
    param(params, name).ok_or_else(|| ApiError::MissingParameter(name.to_string()))
}

fn number<T: std::str::FromStr>(params: &Params, name: &str) -> Result<Option<T>, ApiError> {
    param(params, name)
        .map(|s| s.parse().map_err(|_| ApiError::BadParameter { name: name.to_string(), value: s.to_string() }))
        .transpose()
}

fn flag(params: &Params, name: &str) -> Result<Option<bool>, ApiError> {
    param(params, name)
        .map(|s| match s {
            "true" | "1" => Ok(true),
            "false" | "0" => Ok(false),
            other => Err(ApiError::BadParameter { name: name.to_string(), value: other.to_string() }),
        })
        .transpose()
}

pub fn parse_timepoint(s: &str) -> Result<TimePoint, ApiError> {
    TimePoint::parse(s).ok_or_else(|| ApiError::UnknownTimepoint(s.to_string()))
}

pub fn parse_symptom(s: &str) -> Result<Symptom, ApiError> {
    Symptom::from_id(s).ok_or_else(|| ApiError::UnknownSymptom(s.to_string()))
}

pub fn parse_phase(s: &str) -> Result<Phase, ApiError> {
    s.parse().map_err(|_| ApiError::BadParameter { name: "phase".into(), value: s.to_string() })
}

fn list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty())
}

fn join<T>(items: &[T], f: impl Fn(&T) -> &str) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClustersQuery {
    pub timepoint: TimePoint,
    /// Empty means all symptoms.
    pub symptoms: Vec<Symptom>,
    pub k: usize,
}

impl ClustersQuery {
    pub fn parse(params: &Params) -> Result<Self, ApiError> {
        let timepoint = parse_timepoint(required(params, "timepoint")?)?;
        let symptoms = match params.get("symptoms") {
            None => Vec::new(),
            Some(s) => {
                let parsed = list(s).map(parse_symptom).collect::<Result<Vec<_>, _>>()?;
                if parsed.is_empty() {
                    return Err(symcohort_core::Error::EmptySymptomSubset.into());
                }
                parsed
            }
        };
        Ok(ClustersQuery { timepoint, symptoms, k: number(params, "k")?.unwrap_or(2) })
    }

    fn resolved_symptoms(&self) -> Vec<Symptom> {
        if self.symptoms.is_empty() {
            Symptom::all().collect()
        } else {
            let mut s = self.symptoms.clone();
            s.sort();
            s.dedup();
            s
        }
    }

    pub fn run(&self, cohort: &Cohort) -> Result<String, ApiError> {
        let view = recluster(&cohort.imputed, self.timepoint, &self.resolved_symptoms(), self.k)?;
        Ok(to_json(&cluster_payload(&view)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RulesQuery {
    pub phase: Phase,
    pub params: MiningParams,
    pub seed: u64,
}

impl RulesQuery {
    pub fn new(phase: Phase) -> Self {
        RulesQuery { phase, params: MiningParams::default(), seed: 0 }
    }

    pub fn parse(params: &Params) -> Result<Self, ApiError> {
        let mut q = RulesQuery::new(parse_phase(required(params, "phase")?)?);
        let d = MiningParams::default();
        q.params = MiningParams {
            min_support: number(params, "min_support")?.unwrap_or(d.min_support),
            min_lift: number(params, "min_lift")?.unwrap_or(d.min_lift),
            top_k: number(params, "top_k")?.unwrap_or(d.top_k),
            max_itemset_size: number(params, "max_size")?.unwrap_or(d.max_itemset_size),
            transactions: TransactionOptions {
                presence_threshold: number(params, "presence_threshold")?.unwrap_or(d.transactions.presence_threshold),
                merge_baseline_into_acute: flag(params, "merge_baseline")?
                    .unwrap_or(d.transactions.merge_baseline_into_acute),
            },
        };
        q.seed = number(params, "seed")?.unwrap_or(0);
        Ok(q)
    }

    pub fn mine(&self, cohort: &Cohort) -> Result<symcohort_core::arm::RuleSet, ApiError> {
        Ok(mine_rules(&cohort.raw, self.phase, self.params)?)
    }

    pub fn run(&self, cohort: &Cohort) -> Result<String, ApiError> {
        let set = self.mine(cohort)?;
        let payload = if set.rules.is_empty() {
            rules_payload(&set, None, self.seed)
        } else {
            let graph = build_graph(&set.rules)?;
            let positions = layout(&graph, self.seed, &LayoutParams::default());
            rules_payload(&set, Some((&graph, &positions)), self.seed)
        };
        Ok(to_json(&payload))
    }

    pub fn run_csv(&self, cohort: &Cohort) -> Result<String, ApiError> {
        Ok(rules_csv(&self.mine(cohort)?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilamentsQuery {
    pub symptom: Symptom,
    pub mode: FilamentMode,
    /// `None` selects every patient.
    pub patients: Option<Vec<String>>,
    pub highlight: Option<String>,
    pub phase_highlight: Option<Phase>,
}

impl FilamentsQuery {
    pub fn parse(params: &Params) -> Result<Self, ApiError> {
        let symptom = parse_symptom(required(params, "symptom")?)?;
        let mode = match param(params, "mode") {
            None => FilamentMode::Individual,
            Some(m) => m.parse().map_err(|_| ApiError::BadParameter { name: "mode".into(), value: m.to_string() })?,
        };
        let patients = param(params, "patients").map(|s| list(s).map(str::to_string).collect());
        Ok(FilamentsQuery {
            symptom,
            mode,
            patients,
            highlight: param(params, "highlight").map(str::to_string),
            phase_highlight: param(params, "phase_highlight").map(parse_phase).transpose()?,
        })
    }

    pub fn run(&self, cohort: &Cohort) -> Result<String, ApiError> {
        let params = FilamentParams::default();
        let mut set = match self.mode {
            FilamentMode::Individual => individual_filaments(
                &cohort.imputed,
                self.symptom,
                self.patients.as_deref(),
                self.highlight.as_deref(),
                &params,
            )?,
            FilamentMode::TherapyMean => therapy_mean_filaments(&cohort.imputed, self.symptom, self.phase_highlight, &params)?,
        };
        set.phase_highlight = self.phase_highlight;
        Ok(to_json(&filament_payload(&set)))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HeatmapQuery {
    pub patient_id: Option<String>,
}

impl HeatmapQuery {
    pub fn parse(params: &Params) -> Result<Self, ApiError> {
        Ok(HeatmapQuery { patient_id: param(params, "patient_id").map(str::to_string) })
    }

    pub fn run(&self, cohort: &Cohort) -> Result<String, ApiError> {
        if let Some(id) = &self.patient_id {
            if cohort.raw.patient(id).is_none() {
                return Err(symcohort_core::Error::UnknownPatient(id.clone()).into());
            }
        }
        let cells = heatmap(&cohort.raw);
        Ok(to_json(&heatmap_payload(&cohort.raw, &cells, self.patient_id.as_deref())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationsQuery {
    pub timepoint: TimePoint,
    pub symptom: Option<Symptom>,
}

impl CorrelationsQuery {
    pub fn parse(params: &Params) -> Result<Self, ApiError> {
        Ok(CorrelationsQuery {
            timepoint: parse_timepoint(required(params, "timepoint")?)?,
            symptom: param(params, "symptom").map(parse_symptom).transpose()?,
        })
    }

    pub fn run(&self, cohort: &Cohort) -> Result<String, ApiError> {
        let m = spearman_matrix(&cohort.raw, self.timepoint)?;
        Ok(to_json(&correlation_payload(&m, self.symptom)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatientQuery {
    pub patient_id: String,
}

impl PatientQuery {
    pub fn run(&self, cohort: &Cohort) -> Result<String, ApiError> {
        let record = cohort
            .imputed
            .patient(&self.patient_id)
            .ok_or_else(|| symcohort_core::Error::UnknownPatient(self.patient_id.clone()))?;
        Ok(to_json(&patient_payload(&cohort.imputed, record)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Query {
    Clusters(ClustersQuery),
    Rules(RulesQuery),
    Filaments(FilamentsQuery),
    Heatmap(HeatmapQuery),
    Correlations(CorrelationsQuery),
    Patient(PatientQuery),
}

impl Query {
    pub fn endpoint(&self) -> &'static str {
        match self {
            Query::Clusters(_) => "clusters",
            Query::Rules(_) => "rules",
            Query::Filaments(_) => "filaments",
            Query::Heatmap(_) => "heatmap",
            Query::Correlations(_) => "correlations",
            Query::Patient(_) => "patient",
        }
    }

    /// Canonical form of the resolved parameters. Equal keys always produce
    /// equal bodies.
    pub fn cache_key(&self) -> String {
        let body = match self {
            Query::Clusters(q) => format!(
                "tp={};symptoms={};k={}",
                q.timepoint.label(),
                join(&q.resolved_symptoms(), |s| s.id()),
                q.k
            ),
            Query::Rules(q) => format!(
                "phase={};ms={:e};ml={:e};k={};max={};pt={};merge={};seed={}",
                q.phase.as_str(),
                q.params.min_support,
                q.params.min_lift,
                q.params.top_k,
                q.params.max_itemset_size,
                q.params.transactions.presence_threshold,
                q.params.transactions.merge_baseline_into_acute,
                q.seed
            ),
            Query::Filaments(q) => format!(
                "symptom={};mode={:?};patients={};hl={};phl={}",
                q.symptom.id(),
                q.mode,
                q.patients.as_ref().map_or("*".to_string(), |p| {
                    let mut p = p.clone();
                    p.sort();
                    p.dedup();
                    serde_json::to_string(&p).expect("strings serialize")
                }),
                serde_json::to_string(&q.highlight).expect("strings serialize"),
                q.phase_highlight.map_or("", Phase::as_str)
            ),
            Query::Heatmap(q) => format!("patient={}", serde_json::to_string(&q.patient_id).expect("strings serialize")),
            Query::Correlations(q) => {
                format!("tp={};symptom={}", q.timepoint.label(), q.symptom.map_or("", Symptom::id))
            }
            Query::Patient(q) => format!("id={}", serde_json::to_string(&q.patient_id).expect("strings serialize")),
        };
        format!("{}?{}", self.endpoint(), body)
    }

    pub fn run(&self, cohort: &Cohort) -> Result<String, ApiError> {
        match self {
            Query::Clusters(q) => q.run(cohort),
            Query::Rules(q) => q.run(cohort),
            Query::Filaments(q) => q.run(cohort),
            Query::Heatmap(q) => q.run(cohort),
            Query::Correlations(q) => q.run(cohort),
            Query::Patient(q) => q.run(cohort),
        }
    }
}
