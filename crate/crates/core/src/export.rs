//! JSON payloads served to the UI.
//!
//! The HTTP service and the CLI both go through these functions, so the same
//! query yields the same bytes from either. Reals are rounded to six
//! fractional digits; output is compact JSON with fields in declaration order.

use serde::Serialize;

use crate::arm::{ItemSet, RuleSet};
use crate::cluster::ClusterView;
use crate::graph::{node_visuals, LayoutResult, NodeId, Range, RuleGraph, VisualScale};
use crate::model::{CohortDataset, PatientRecord};
use crate::stats::{Bin, CorrelationMatrix, HeatmapCell};
use crate::symptom::{Category, Symptom};
use crate::timegrid::{Phase, TimePoint};
use crate::trajectory::{FilamentMode, FilamentSet};

/// Rounds to six fractional digits and folds `-0.0` into `0.0`.
pub fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6 + 0.0
}

fn round_opt(x: Option<f64>) -> Option<f64> {
    x.map(round6)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("payload types always serialize")
}

fn names(set: ItemSet) -> Vec<&'static str> {
    set.symptoms().map(Symptom::id).collect()
}

#[derive(Debug, Serialize)]
pub struct RuleJson {
    pub id: usize,
    pub antecedent: Vec<&'static str>,
    pub consequent: Vec<&'static str>,
    pub support: f64,
    pub lift: f64,
}

#[derive(Debug, Serialize)]
pub struct NodeJson {
    pub id: String,
    pub kind: &'static str,
    pub x: f64,
    pub y: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shade: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lift: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct EdgeJson {
    pub from: String,
    pub to: String,
}

#[derive(Debug, Serialize)]
pub struct GraphJson {
    pub seed: u64,
    pub nodes: Vec<NodeJson>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Debug, Serialize)]
pub struct RulesPayload {
    pub phase: Phase,
    pub min_support: f64,
    pub min_lift: f64,
    pub top_k: usize,
    pub presence_threshold: u8,
    pub transactions: usize,
    pub rules: Vec<RuleJson>,
    pub graph: GraphJson,
}

pub fn rule_list(set: &RuleSet) -> Vec<RuleJson> {
    set.rules
        .iter()
        .map(|r| RuleJson {
            id: r.rule_id,
            antecedent: names(r.antecedent),
            consequent: names(r.consequent),
            support: round6(r.support.value()),
            lift: round6(r.lift.value()),
        })
        .collect()
}

pub fn graph_json(graph: Option<(&RuleGraph, &LayoutResult)>, seed: u64, scale: &VisualScale) -> GraphJson {
    let Some((g, layout)) = graph else {
        return GraphJson {
            seed,
            nodes: Vec::new(),
            edges: Vec::new(),
        };
    };
    let support = Range::of(g.rule_nodes.iter().map(|r| r.support));
    let lift = Range::of(g.rule_nodes.iter().map(|r| r.lift));
    let s = g.symptom_nodes.len();
    let nodes = (0..g.node_count())
        .map(|i| {
            let (x, y) = layout.positions[i];
            let base = NodeJson {
                id: g.node_id(i).to_string(),
                kind: "symptom",
                x: round6(x),
                y: round6(y),
                radius: None,
                shade: None,
                support: None,
                lift: None,
            };
            match g.node_id(i) {
                NodeId::Symptom(_) => base,
                NodeId::Rule(_) => {
                    let node = &g.rule_nodes[i - s];
                    let v = node_visuals(node, support.expect("rules present"), lift.expect("rules present"), scale);
                    NodeJson {
                        kind: "rule",
                        radius: Some(round6(v.radius)),
                        shade: Some(round6(v.shade)),
                        support: Some(round6(node.support)),
                        lift: Some(round6(node.lift)),
                        ..base
                    }
                }
            }
        })
        .collect();
    let edges = g
        .edges
        .iter()
        .map(|e| EdgeJson {
            from: g.node_id(e.from).to_string(),
            to: g.node_id(e.to).to_string(),
        })
        .collect();
    GraphJson { seed, nodes, edges }
}

pub fn rules_payload(set: &RuleSet, graph: Option<(&RuleGraph, &LayoutResult)>, seed: u64) -> RulesPayload {
    RulesPayload {
        phase: set.phase,
        min_support: round6(set.params.min_support),
        min_lift: round6(set.params.min_lift),
        top_k: set.params.top_k,
        presence_threshold: set.params.transactions.presence_threshold,
        transactions: set.transaction_count,
        rules: rule_list(set),
        graph: graph_json(graph, seed, &VisualScale::default()),
    }
}

/// `id,antecedent,consequent,support,lift`, items joined with `;`.
pub fn rules_csv(set: &RuleSet) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(["id", "antecedent", "consequent", "support", "lift"]).expect("in-memory write");
    for r in rule_list(set) {
        w.write_record([
            r.id.to_string(),
            r.antecedent.join(";"),
            r.consequent.join(";"),
            format!("{:.6}", r.support),
            format!("{:.6}", r.lift),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[derive(Debug, Serialize)]
pub struct ClusterPointJson<'a> {
    pub patient_id: &'a str,
    pub pc1: f64,
    pub pc2: f64,
    pub burden: String,
    pub therapy: &'static str,
    pub gender: crate::model::Gender,
    pub t_category: crate::model::TCategory,
}

#[derive(Debug, Serialize)]
pub struct ClusterPayload<'a> {
    pub timepoint: TimePoint,
    pub phase: Phase,
    pub k: usize,
    pub symptoms: &'a [Symptom],
    pub degenerate: bool,
    pub explained_variance: Vec<f64>,
    pub points: Vec<ClusterPointJson<'a>>,
}

pub fn cluster_payload(view: &ClusterView) -> ClusterPayload<'_> {
    ClusterPayload {
        timepoint: view.timepoint,
        phase: view.timepoint.phase(),
        k: view.k,
        symptoms: &view.symptoms,
        degenerate: view.degenerate,
        explained_variance: view.explained_variance.iter().copied().map(round6).collect(),
        points: view
            .points
            .iter()
            .map(|p| ClusterPointJson {
                patient_id: &p.patient_id,
                pc1: round6(p.pc1),
                pc2: round6(p.pc2),
                burden: p.burden_label(view.k),
                therapy: p.therapy.label(),
                gender: p.gender,
                t_category: p.t_category,
            })
            .collect(),
    }
}

#[derive(Debug, Serialize)]
pub struct VertexJson {
    pub x: f64,
    pub y: f64,
    pub tp: usize,
    pub reported: bool,
}

#[derive(Debug, Serialize)]
pub struct FilamentJson<'a> {
    pub owner: &'a str,
    pub highlight: bool,
    pub vertices: Vec<VertexJson>,
}

#[derive(Debug, Serialize)]
pub struct FilamentPayload<'a> {
    pub symptom: Symptom,
    pub mode: FilamentMode,
    pub phase_highlight: Option<Phase>,
    pub filaments: Vec<FilamentJson<'a>>,
}

pub fn filament_payload(set: &FilamentSet) -> FilamentPayload<'_> {
    FilamentPayload {
        symptom: set.symptom,
        mode: set.mode,
        phase_highlight: set.phase_highlight,
        filaments: set
            .filaments
            .iter()
            .map(|f| FilamentJson {
                owner: &f.owner,
                highlight: f.highlight,
                vertices: f
                    .vertices
                    .iter()
                    .map(|v| VertexJson {
                        x: round6(v.x),
                        y: round6(v.y),
                        tp: v.timepoint_index,
                        reported: v.reported,
                    })
                    .collect(),
            })
            .collect(),
    }
}

#[derive(Debug, Serialize)]
pub struct HeatmapCellJson {
    pub tp: TimePoint,
    pub bins: [f64; 4],
    pub reporters: usize,
    pub reporting_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub patient_rating: Option<Option<u8>>,
}

#[derive(Debug, Serialize)]
pub struct HeatmapRowJson {
    pub symptom: Symptom,
    pub cells: Vec<HeatmapCellJson>,
}

#[derive(Debug, Serialize)]
pub struct HeatmapGroupJson {
    pub category: Category,
    pub rows: Vec<HeatmapRowJson>,
}

#[derive(Debug, Serialize)]
pub struct HeatmapPayload<'a> {
    pub bins: [&'static str; 4],
    pub cohort_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub patient_id: Option<&'a str>,
    pub groups: Vec<HeatmapGroupJson>,
}

/// Heatmap rows grouped by category. With `patient`, every cell also carries
/// that patient's reported rating (`null` where none was reported).
pub fn heatmap_payload<'a>(dataset: &CohortDataset, cells: &[HeatmapCell], patient: Option<&'a str>) -> HeatmapPayload<'a> {
    let patient_series = patient.and_then(|id| dataset.patient_series(id));
    let groups = Category::ALL
        .iter()
        .map(|&category| HeatmapGroupJson {
            category,
            rows: Symptom::in_category(category)
                .map(|symptom| HeatmapRowJson {
                    symptom,
                    cells: cells
                        .iter()
                        .filter(|c| c.symptom == symptom)
                        .map(|c| HeatmapCellJson {
                            tp: c.timepoint,
                            bins: c.bin_fractions.map(round6),
                            reporters: c.reporters,
                            reporting_fraction: round6(c.reporting_fraction),
                            patient_rating: patient_series.map(|s| s[symptom.index()].reported_value(c.timepoint)),
                        })
                        .collect(),
                })
                .collect(),
        })
        .collect();
    HeatmapPayload {
        bins: Bin::ALL.map(Bin::label),
        cohort_size: dataset.len(),
        patient_id: patient,
        groups,
    }
}

#[derive(Debug, Serialize)]
pub struct CorrelationJson {
    pub a: Symptom,
    pub b: Symptom,
    pub rho: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Serialize)]
pub struct CorrelationPayload {
    pub timepoint: TimePoint,
    pub reporters: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symptom: Option<Symptom>,
    pub entries: Vec<CorrelationJson>,
}

/// Upper triangle of the matrix, or one symptom's full row when `symptom` is given.
pub fn correlation_payload(m: &CorrelationMatrix, symptom: Option<Symptom>) -> CorrelationPayload {
    let convert = |e: &crate::stats::CorrelationEntry| CorrelationJson {
        a: e.symptom_a,
        b: e.symptom_b,
        rho: round_opt(e.rho),
        n: e.n,
    };
    let entries = match symptom {
        Some(s) => m.row(s).iter().map(convert).collect(),
        None => m.upper_triangle().map(convert).collect(),
    };
    CorrelationPayload {
        timepoint: m.timepoint,
        reporters: m.reporters,
        symptom,
        entries,
    }
}

#[derive(Debug, Serialize)]
pub struct SeriesJson {
    pub symptom: Symptom,
    pub category: Category,
    /// Imputed values when the dataset is imputed, raw otherwise.
    pub values: Vec<Option<u8>>,
    pub reported: Vec<bool>,
}

#[derive(Debug, Serialize)]
pub struct PatientPayload<'a> {
    #[serde(flatten)]
    pub record: &'a PatientRecord,
    pub reported_timepoints: Vec<TimePoint>,
    pub series: Vec<SeriesJson>,
}

pub fn patient_payload<'a>(dataset: &CohortDataset, record: &'a PatientRecord) -> PatientPayload<'a> {
    let series = dataset.patient_series(&record.patient_id).expect("patient in dataset");
    PatientPayload {
        record,
        reported_timepoints: dataset.reported_timepoints(&record.patient_id),
        series: Symptom::all()
            .map(|s| {
                let r = &series[s.index()];
                SeriesJson {
                    symptom: s,
                    category: s.category(),
                    values: r.values.to_vec(),
                    reported: r.reported.to_vec(),
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round6(1.0 / 3.0), 0.333333);
        assert_eq!(round6(2.0 / 3.0), 0.666667);
        assert_eq!(round6(-1e-9).to_string(), "0");
        assert_eq!(to_json(&round6(0.1 + 0.2)), "0.3");
    }
}
