//! Rule/symptom node-link diagram.
//!
//! Symptoms and rules are both nodes. An edge runs from every antecedent
//! symptom into its rule, and from the rule out to every consequent symptom.

mod layout;
mod visuals;

pub use layout::{classical_mds, graph_distances, kruskal_stress, layout, LayoutParams, LayoutResult};
pub use visuals::{node_visuals, NodeVisuals, Range, VisualScale};

use crate::arm::{AssociationRule, ItemSet};
use crate::error::{Error, Result};
use crate::symptom::Symptom;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleNode {
    pub rule_id: usize,
    pub support: f64,
    pub lift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeId {
    Symptom(Symptom),
    Rule(usize),
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NodeId::Symptom(s) => f.write_str(s.id()),
            NodeId::Rule(id) => write!(f, "rule_{id}"),
        }
    }
}

/// Directed edge between node indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleGraph {
    /// Symptoms used by at least one rule, in manifest order.
    pub symptom_nodes: Vec<Symptom>,
    /// In rule-id order.
    pub rule_nodes: Vec<RuleNode>,
    /// Over node indices: symptoms first, then rules.
    pub edges: Vec<Edge>,
}

impl RuleGraph {
    pub fn node_count(&self) -> usize {
        self.symptom_nodes.len() + self.rule_nodes.len()
    }

    pub fn node_id(&self, index: usize) -> NodeId {
        let s = self.symptom_nodes.len();
        if index < s {
            NodeId::Symptom(self.symptom_nodes[index])
        } else {
            NodeId::Rule(self.rule_nodes[index - s].rule_id)
        }
    }

    pub fn symptom_index(&self, symptom: Symptom) -> Option<usize> {
        self.symptom_nodes.iter().position(|&s| s == symptom)
    }

    /// Undirected degree of every node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count()];
        for e in &self.edges {
            deg[e.from] += 1;
            deg[e.to] += 1;
        }
        deg
    }

    /// Reads the `(rule_id, antecedent, consequent)` triples back off the edges.
    pub fn rules_from_edges(&self) -> Vec<(usize, ItemSet, ItemSet)> {
        let s = self.symptom_nodes.len();
        let mut out: Vec<(usize, ItemSet, ItemSet)> =
            self.rule_nodes.iter().map(|r| (r.rule_id, ItemSet::EMPTY, ItemSet::EMPTY)).collect();
        for e in &self.edges {
            if e.to >= s {
                let r = &mut out[e.to - s];
                r.1 = r.1.with(self.symptom_nodes[e.from].index());
            } else {
                let r = &mut out[e.from - s];
                r.2 = r.2.with(self.symptom_nodes[e.to].index());
            }
        }
        out
    }
}

pub fn build_graph(rules: &[AssociationRule]) -> Result<RuleGraph> {
    if rules.is_empty() {
        return Err(Error::EmptyRuleList);
    }
    let used = rules.iter().fold(ItemSet::EMPTY, |acc, r| acc.union(r.items()));
    let symptom_nodes: Vec<Symptom> = used.symptoms().collect();
    let mut sorted: Vec<&AssociationRule> = rules.iter().collect();
    sorted.sort_by_key(|r| r.rule_id);

    let s = symptom_nodes.len();
    let index_of = |sym: Symptom| symptom_nodes.iter().position(|&x| x == sym).expect("used symptom");
    let mut edges = Vec::new();
    let mut rule_nodes = Vec::with_capacity(sorted.len());
    for (k, rule) in sorted.iter().enumerate() {
        let node = s + k;
        edges.extend(rule.antecedent.symptoms().map(|sym| Edge { from: index_of(sym), to: node }));
        edges.extend(rule.consequent.symptoms().map(|sym| Edge { from: node, to: index_of(sym) }));
        rule_nodes.push(RuleNode {
            rule_id: rule.rule_id,
            support: rule.support.value(),
            lift: rule.lift.value(),
        });
    }
    Ok(RuleGraph {
        symptom_nodes,
        rule_nodes,
        edges,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::arm::{Lift, Support};

    pub fn rule(id: usize, a: &[&str], c: &[&str]) -> AssociationRule {
        let set = |ids: &[&str]| ItemSet::from_symptoms(ids.iter().map(|i| Symptom::from_id(i).unwrap()));
        let support = Support { count: id as u64, total: 10 };
        AssociationRule {
            rule_id: id,
            antecedent: set(a),
            consequent: set(c),
            support,
            lift: Lift { numer: 3, denom: 2 },
        }
    }

    #[test]
    fn minimal_graph() {
        let g = build_graph(&[rule(1, &["fatigue"], &["drowsiness"])]).unwrap();
        assert_eq!(g.symptom_nodes.len(), 2);
        assert_eq!(g.rule_nodes.len(), 1);
        assert_eq!(g.edges, vec![Edge { from: 0, to: 2 }, Edge { from: 2, to: 1 }]);
    }

    #[test]
    fn reversed_rules_are_separate_nodes() {
        let g = build_graph(&[rule(1, &["fatigue"], &["drowsiness"]), rule(2, &["drowsiness"], &["fatigue"])]).unwrap();
        assert_eq!(g.symptom_nodes.len(), 2);
        assert_eq!(g.rule_nodes.len(), 2);
        assert_eq!(g.edges.len(), 4);
    }

    #[test]
    fn two_antecedents_one_consequent() {
        let g = build_graph(&[rule(14, &["fatigue", "pain"], &["swallow"])]).unwrap();
        assert_eq!(g.symptom_nodes.len(), 3);
        let rule_node = 3;
        assert_eq!(g.edges.iter().filter(|e| e.to == rule_node).count(), 2);
        assert_eq!(g.edges.iter().filter(|e| e.from == rule_node).count(), 1);
        assert_eq!(g.node_id(rule_node).to_string(), "rule_14");
    }

    #[test]
    fn edges_round_trip_to_rules() {
        let rules = [
            rule(1, &["fatigue", "pain"], &["swallow"]),
            rule(2, &["taste"], &["dry_mouth", "sores"]),
            rule(3, &["swallow"], &["fatigue"]),
        ];
        let g = build_graph(&rules).unwrap();
        let back = g.rules_from_edges();
        for (r, (id, a, c)) in rules.iter().zip(back) {
            assert_eq!((r.rule_id, r.antecedent, r.consequent), (id, a, c));
        }
    }

    #[test]
    fn empty_rule_list_rejected() {
        assert!(matches!(build_graph(&[]), Err(Error::EmptyRuleList)));
    }
}
