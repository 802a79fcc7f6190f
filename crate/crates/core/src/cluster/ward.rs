//! Agglomerative clustering with Ward's criterion.
//!
//! Dissimilarities are kept as the increase in within-cluster sum of squares
//! a merge would cause, initialised to `‖xᵢ − xⱼ‖² / 2` for singletons and
//! updated with the Lance–Williams recurrence. Each row caches its nearest
//! neighbour; Ward is reducible, so only rows whose neighbour was consumed by
//! a merge need a full rescan.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};

/// One agglomeration step. Clusters are named by their smallest row index;
/// the merged cluster keeps the name `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    /// Increase in within-cluster sum of squares.
    pub cost: f64,
    /// Size of the merged cluster.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub observations: usize,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    /// Cluster name (smallest member row) of every row after keeping the first
    /// `observations - k` merges.
    pub fn cut(&self, k: usize) -> Vec<usize> {
        let n = self.observations;
        assert!(k >= 1 && k <= n.max(1), "cannot cut {n} observations into {k} clusters");
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for m in &self.merges[..n - k] {
            let (ra, rb) = (find(&mut parent, m.a), find(&mut parent, m.b));
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            parent[hi] = lo;
        }
        (0..n).map(|i| find(&mut parent, i)).collect()
    }
}

/// Full Ward dendrogram over `rows` (all of equal length).
///
/// Equal merge costs are resolved toward the lexicographically smallest
/// `(a, b)` pair of cluster names.
pub fn ward_linkage(rows: &[Vec<f64>]) -> Dendrogram {
    let n = rows.len();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d: f64 = rows[i].iter().zip(&rows[j]).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / 2.0;
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    let mut size = vec![1usize; n];
    let mut active = vec![true; n];
    let mut nn: Vec<(f64, usize)> = vec![(f64::INFINITY, usize::MAX); n];

    let nearest = |i: usize, dist: &[f64], active: &[bool]| -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        for j in (0..n).filter(|&j| j != i && active[j]) {
            if dist[i * n + j] < best.0 {
                best = (dist[i * n + j], j);
            }
        }
        best
    };
    for (i, slot) in nn.iter_mut().enumerate() {
        *slot = nearest(i, &dist, &active);
    }

    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    for _ in 1..n {
        let (a, b, cost) = (0..n)
            .filter(|&i| active[i])
            .map(|i| {
                let (d, j) = nn[i];
                (d, i.min(j), i.max(j))
            })
            .min_by(|x, y| {
                x.0.partial_cmp(&y.0)
                    .unwrap_or(Ordering::Equal)
                    .then(x.1.cmp(&y.1))
                    .then(x.2.cmp(&y.2))
            })
            .map(|(d, a, b)| (a, b, d))
            .expect("at least two active clusters");

        let (na, nb) = (size[a] as f64, size[b] as f64);
        for k in (0..n).filter(|&k| active[k] && k != a && k != b) {
            let nk = size[k] as f64;
            let d = ((nk + na) * dist[k * n + a] + (nk + nb) * dist[k * n + b] - nk * cost) / (na + nb + nk);
            dist[k * n + a] = d;
            dist[a * n + k] = d;
        }
        size[a] += size[b];
        active[b] = false;
        merges.push(Merge {
            a,
            b,
            cost,
            size: size[a],
        });

        nn[a] = nearest(a, &dist, &active);
        for k in (0..n).filter(|&k| active[k] && k != a) {
            let (d, j) = nn[k];
            if j == a || j == b {
                nn[k] = nearest(k, &dist, &active);
            } else {
                let cand = dist[k * n + a];
                if cand < d || (cand == d && a < j) {
                    nn[k] = (cand, a);
                }
            }
        }
    }
    Dendrogram {
        observations: n,
        merges,
    }
}

/// Result of cutting the Ward tree into `k` groups.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignments {
    /// Per row: group rank, 0 being the group with the largest mean row sum.
    pub ranks: Vec<usize>,
    pub k: usize,
    pub dendrogram: Dendrogram,
}

impl Assignments {
    pub fn members(&self, rank: usize) -> impl Iterator<Item = usize> + '_ {
        self.ranks.iter().enumerate().filter(move |(_, &r)| r == rank).map(|(i, _)| i)
    }
}

/// Ward clustering cut at `k` groups, ranked by descending mean row sum.
pub fn ward_cluster(rows: &[Vec<f64>], k: usize) -> Result<Assignments> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if rows.len() < k {
        return Err(Error::TooFewPatients {
            needed: k,
            got: rows.len(),
        });
    }
    let dendrogram = ward_linkage(rows);
    let names = dendrogram.cut(k);

    let mut groups: Vec<(usize, f64, usize)> = Vec::new(); // (name, score sum, count)
    for (row, &name) in rows.iter().zip(&names) {
        let total: f64 = row.iter().sum();
        match groups.iter_mut().find(|g| g.0 == name) {
            Some(g) => {
                g.1 += total;
                g.2 += 1;
            }
            None => groups.push((name, total, 1)),
        }
    }
    groups.sort_by(|x, y| {
        let (mx, my) = (x.1 / x.2 as f64, y.1 / y.2 as f64);
        my.partial_cmp(&mx).unwrap_or(Ordering::Equal).then(x.0.cmp(&y.0))
    });
    let ranks = names
        .iter()
        .map(|name| groups.iter().position(|g| g.0 == *name).expect("known group"))
        .collect();
    Ok(Assignments { ranks, k, dendrogram })
}

/// Sum over groups of squared distances to the group centroid.
pub fn within_cluster_ss(rows: &[Vec<f64>], labels: &[usize]) -> f64 {
    let mut total = 0.0;
    let mut seen: Vec<usize> = labels.to_vec();
    seen.sort_unstable();
    seen.dedup();
    for label in seen {
        let members: Vec<&Vec<f64>> = rows.iter().zip(labels).filter(|(_, &l)| l == label).map(|(r, _)| r).collect();
        let dim = members[0].len();
        let centroid: Vec<f64> = (0..dim)
            .map(|j| members.iter().map(|r| r[j]).sum::<f64>() / members.len() as f64)
            .collect();
        total += members
            .iter()
            .map(|r| r.iter().zip(&centroid).map(|(x, c)| (x - c) * (x - c)).sum::<f64>())
            .sum::<f64>();
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rows(points: &[&[f64]]) -> Vec<Vec<f64>> {
        points.iter().map(|p| p.to_vec()).collect()
    }

    /// All 2-partitions, minimum within-cluster SS.
    fn best_two_partition(rows: &[Vec<f64>]) -> (f64, Vec<usize>) {
        let n = rows.len();
        let mut best = (f64::INFINITY, vec![]);
        for mask in 1u32..(1 << (n - 1)) {
            let labels: Vec<usize> = (0..n).map(|i| ((mask >> i) & 1) as usize).collect();
            let ss = within_cluster_ss(rows, &labels);
            if ss < best.0 {
                best = (ss, labels);
            }
        }
        best
    }

    #[test]
    fn separated_pairs_split_with_high_group_second() {
        let r = rows(&[&[0.0, 0.0], &[0.0, 1.0], &[10.0, 10.0], &[10.0, 11.0]]);
        let a = ward_cluster(&r, 2).unwrap();
        assert_eq!(a.ranks, vec![1, 1, 0, 0]);
        let (best, labels) = best_two_partition(&r);
        assert!((within_cluster_ss(&r, &a.ranks) - best).abs() < 1e-12);
        assert_eq!(labels[0], labels[1]);
        assert_ne!(labels[1], labels[2]);
    }

    #[test]
    fn k_equal_rows_gives_singletons() {
        let r = rows(&[&[1.0], &[2.0], &[4.0]]);
        let a = ward_cluster(&r, 3).unwrap();
        let mut ranks = a.ranks.clone();
        ranks.sort();
        assert_eq!(ranks, vec![0, 1, 2]);
        assert_eq!(a.ranks, vec![2, 1, 0]);
    }

    #[test]
    fn identical_rows_merge_first() {
        let r = rows(&[&[0.0, 0.0], &[5.0, 5.0], &[9.0, 0.0], &[5.0, 5.0], &[0.0, 9.0]]);
        let d = ward_linkage(&r);
        assert_eq!((d.merges[0].a, d.merges[0].b), (1, 3));
        assert_eq!(d.merges[0].cost, 0.0);
        for k in 1..=4 {
            let names = d.cut(k);
            assert_eq!(names[1], names[3]);
        }
    }

    #[test]
    fn too_few_rows() {
        assert!(matches!(
            ward_cluster(&rows(&[&[1.0]]), 2),
            Err(Error::TooFewPatients { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn equal_costs_break_toward_smallest_pair() {
        // Four corners of a unit square: every side ties.
        let r = rows(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        let d = ward_linkage(&r);
        assert_eq!((d.merges[0].a, d.merges[0].b), (0, 1));
        assert_eq!((d.merges[1].a, d.merges[1].b), (2, 3));
    }

    proptest! {
        #[test]
        fn merge_costs_non_decreasing(points in prop::collection::vec(prop::collection::vec(0u8..=10, 3), 2..25)) {
            let r: Vec<Vec<f64>> = points.iter().map(|p| p.iter().map(|&v| v as f64).collect()).collect();
            let d = ward_linkage(&r);
            prop_assert_eq!(d.merges.len(), r.len() - 1);
            for w in d.merges.windows(2) {
                prop_assert!(w[1].cost >= w[0].cost - 1e-9 * w[0].cost.max(1.0));
            }
            let total_ss = within_cluster_ss(&r, &vec![0; r.len()]);
            let sum: f64 = d.merges.iter().map(|m| m.cost).sum();
            prop_assert!((sum - total_ss).abs() < 1e-8 * total_ss.max(1.0));
        }
    }
}
