//! Engine results against naive reference implementations.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use symcohort_core::arm::{apriori_frequent_itemsets, generate_rules, lift, support, ItemSet, TransactionSet};
use symcohort_core::cluster::{ward_cluster, ward_linkage};

fn transactions() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..256, 1..30)
}

fn brute_force_frequent(kept: &[ItemSet], min_support: f64) -> BTreeMap<ItemSet, u64> {
    let threshold = num_rational::BigRational::from_float(min_support).unwrap();
    let universe = kept.iter().fold(0, |acc, t| acc | t.bits());
    (1..=universe)
        .filter(|m| m & !universe == 0)
        .map(ItemSet::from_bits)
        .filter_map(|s| {
            let hits = kept.iter().filter(|t| s.is_subset_of(**t)).count() as u64;
            let ratio = num_rational::BigRational::new(hits.into(), (kept.len() as u64).into());
            (hits > 0 && ratio >= threshold).then_some((s, hits))
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn apriori_matches_enumeration(raw in transactions(), min_support in 0.01f64..=1.0) {
        let ts = TransactionSet::from_itemsets(raw.iter().map(|&b| ItemSet::from_bits(b)));
        let kept: Vec<ItemSet> = ts.itemsets().collect();
        prop_assume!(!kept.is_empty());
        let got: BTreeMap<ItemSet, u64> = apriori_frequent_itemsets(&ts, min_support)
            .unwrap()
            .into_iter()
            .map(|f| (f.items, f.support.count))
            .collect();
        prop_assert_eq!(got, brute_force_frequent(&kept, min_support));
    }

    #[test]
    fn rules_are_every_qualifying_bipartition(raw in transactions(), min_support in 0.05f64..=1.0, min_lift in 0.5f64..2.0) {
        let ts = TransactionSet::from_itemsets(raw.iter().map(|&b| ItemSet::from_bits(b)));
        prop_assume!(!ts.is_empty());
        let frequent = apriori_frequent_itemsets(&ts, min_support).unwrap();
        let rules = generate_rules(&frequent, &ts, min_lift, usize::MAX).unwrap();
        let threshold = num_rational::BigRational::from_float(min_lift).unwrap();
        let mut expected = BTreeSet::new();
        for f in frequent.iter().filter(|f| f.items.len() >= 2) {
            let bits = f.items.bits();
            // Every non-empty proper subset as antecedent.
            let mut a = (bits - 1) & bits;
            while a > 0 {
                let x = ItemSet::from_bits(a);
                let y = f.items.difference(x);
                if lift(x, y, &ts).unwrap().to_ratio() >= threshold {
                    expected.insert((x, y));
                }
                a = (a - 1) & bits;
            }
        }
        let got: BTreeSet<(ItemSet, ItemSet)> = rules.iter().map(|r| (r.antecedent, r.consequent)).collect();
        prop_assert_eq!(got, expected);
        for w in rules.windows(2) {
            prop_assert!(w[0].support >= w[1].support);
            prop_assert!(w[0].support > w[1].support || w[0].lift >= w[1].lift);
        }
        for r in &rules {
            prop_assert_eq!(r.support, support(r.antecedent.union(r.consequent), &ts).unwrap());
        }
    }
}

/// Textbook Ward: recompute the merge cost of every cluster pair from the
/// centroids at every step.
fn naive_ward(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<usize>>) {
    let mut clusters: Vec<Vec<usize>> = (0..rows.len()).map(|i| vec![i]).collect();
    let centroid = |members: &[usize]| -> Vec<f64> {
        let d = rows[0].len();
        let mut c = vec![0.0; d];
        for &m in members {
            for (acc, v) in c.iter_mut().zip(&rows[m]) {
                *acc += v;
            }
        }
        c.iter().map(|v| v / members.len() as f64).collect()
    };
    let mut costs = Vec::new();
    let mut at_two = Vec::new();
    while clusters.len() > 1 {
        if clusters.len() == 2 {
            at_two = clusters.clone();
        }
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let (a, b) = (&clusters[i], &clusters[j]);
                let (ca, cb) = (centroid(a), centroid(b));
                let d2: f64 = ca.iter().zip(&cb).map(|(x, y)| (x - y).powi(2)).sum();
                let cost = (a.len() * b.len()) as f64 / (a.len() + b.len()) as f64 * d2;
                if cost < best.0 {
                    best = (cost, i, j);
                }
            }
        }
        let (cost, i, j) = best;
        costs.push(cost);
        let merged = [clusters[i].clone(), clusters[j].clone()].concat();
        clusters.remove(j);
        clusters[i] = merged;
    }
    (costs, at_two)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn ward_matches_naive_reference(
        rows in (2usize..5).prop_flat_map(|d| prop::collection::vec(prop::collection::vec(-10.0f64..10.0, d), 3..25))
    ) {
        let (want_costs, want_two) = naive_ward(&rows);
        let dendrogram = ward_linkage(&rows);
        let got: Vec<f64> = dendrogram.merges.iter().map(|m| m.cost).collect();
        prop_assert_eq!(got.len(), want_costs.len());
        for (g, w) in got.iter().zip(&want_costs) {
            prop_assert!((g - w).abs() <= 1e-9 * w.max(1.0), "{} vs {}", g, w);
        }
        let assigned = ward_cluster(&rows, 2).unwrap();
        let partition: BTreeSet<BTreeSet<usize>> =
            (0..2).map(|r| assigned.members(r).collect()).collect();
        let reference: BTreeSet<BTreeSet<usize>> =
            want_two.iter().map(|c| c.iter().copied().collect()).collect();
        prop_assert_eq!(partition, reference);
    }
}
