//! Fixed, seeded layout: classical MDS on shortest-path distances followed by
//! a bounded stress-descent refinement. Components are laid out separately
//! and tiled left to right.

use std::collections::VecDeque;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::RuleGraph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutParams {
    pub iterations: usize,
    /// Initial step size; decays linearly to `final_step`.
    pub initial_step: f64,
    pub final_step: f64,
    /// Minimum distance between any two nodes.
    pub min_separation: f64,
    /// Horizontal gap between tiled components.
    pub component_gap: f64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        LayoutParams {
            iterations: 300,
            initial_step: 0.1,
            final_step: 0.005,
            min_separation: 1e-3,
            component_gap: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutResult {
    /// Indexed like the graph's nodes.
    pub positions: Vec<(f64, f64)>,
    pub seed: u64,
    /// `(min_x, min_y, max_x, max_y)`.
    pub bbox: (f64, f64, f64, f64),
    /// Kruskal stress-1 of the MDS start, averaged over components.
    pub mds_stress: f64,
    /// Kruskal stress-1 after refinement.
    pub final_stress: f64,
}

/// All-pairs hop counts, edge direction ignored; `None` across components.
pub fn graph_distances(g: &RuleGraph) -> Vec<Vec<Option<usize>>> {
    let n = g.node_count();
    let mut adj = vec![Vec::new(); n];
    for e in &g.edges {
        adj[e.from].push(e.to);
        adj[e.to].push(e.from);
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    (0..n)
        .map(|src| {
            let mut dist = vec![None; n];
            dist[src] = Some(0);
            let mut queue = VecDeque::from([src]);
            while let Some(u) = queue.pop_front() {
                let du = dist[u].expect("visited");
                for &v in &adj[u] {
                    if dist[v].is_none() {
                        dist[v] = Some(du + 1);
                        queue.push_back(v);
                    }
                }
            }
            dist
        })
        .collect()
}

/// Classical (Torgerson) MDS of a full distance matrix into two dimensions.
///
/// Each axis is signed so its largest-magnitude coordinate is positive.
pub fn classical_mds(dist: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let n = dist.len();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![(0.0, 0.0)];
    }
    let sq = DMatrix::from_fn(n, n, |i, j| dist[i][j] * dist[i][j]);
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand));
    let eigen = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &c| eigen.eigenvalues[c].total_cmp(&eigen.eigenvalues[a]).then(a.cmp(&c)));

    let axis = |k: usize| -> Vec<f64> {
        let Some(&col) = order.get(k) else {
            return vec![0.0; n];
        };
        let scale = eigen.eigenvalues[col].max(0.0).sqrt();
        let mut v: Vec<f64> = eigen.eigenvectors.column(col).iter().map(|x| x * scale).collect();
        let mut best = 0;
        for (i, x) in v.iter().enumerate() {
            if x.abs() > v[best].abs() * (1.0 + 1e-9) {
                best = i;
            }
        }
        if v[best] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        v
    };
    let (xs, ys) = (axis(0), axis(1));
    xs.into_iter().zip(ys).map(|(x, y)| (x + 0.0, y + 0.0)).collect()
}

/// Kruskal stress-1 between embedded and target distances over all pairs.
pub fn kruskal_stress(positions: &[(f64, f64)], dist: &[Vec<f64>]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            let d = euclid(positions[i], positions[j]);
            num += (d - dist[i][j]).powi(2);
            den += dist[i][j].powi(2);
        }
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

fn euclid(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Connected components as sorted node lists, ordered by smallest member.
fn components(dist: &[Vec<Option<usize>>]) -> Vec<Vec<usize>> {
    let n = dist.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let comp: Vec<usize> = (0..n).filter(|&j| dist[i][j].is_some()).collect();
        for &j in &comp {
            seen[j] = true;
        }
        out.push(comp);
    }
    out
}

pub fn layout(g: &RuleGraph, seed: u64, params: &LayoutParams) -> LayoutResult {
    let n = g.node_count();
    let hops = graph_distances(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // One fixed direction per node, used whenever two nodes coincide.
    let directions: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();

    let mut positions = vec![(0.0, 0.0); n];
    let mut mds_stress = 0.0;
    let mut final_stress = 0.0;
    let comps = components(&hops);
    let mut cursor_x = 0.0;
    for comp in &comps {
        let dist: Vec<Vec<f64>> = comp
            .iter()
            .map(|&i| comp.iter().map(|&j| hops[i][j].expect("same component") as f64).collect())
            .collect();
        let mut local = classical_mds(&dist);
        mds_stress += kruskal_stress(&local, &dist);
        refine(&mut local, &dist, comp, &directions, params);
        final_stress += kruskal_stress(&local, &dist);

        let (min_x, max_x) = local.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
        let (min_y, max_y) = local.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
        let (dx, dy) = (cursor_x - min_x, -(min_y + max_y) / 2.0);
        for (&node, p) in comp.iter().zip(&local) {
            positions[node] = (p.0 + dx, p.1 + dy);
        }
        cursor_x += (max_x - min_x) + params.component_gap;
    }
    if !comps.is_empty() {
        mds_stress /= comps.len() as f64;
        final_stress /= comps.len() as f64;
    }
    separate(&mut positions, &directions, params.min_separation);

    let bbox = positions.iter().fold(
        (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        |b, p| (b.0.min(p.0), b.1.min(p.1), b.2.max(p.0), b.3.max(p.1)),
    );
    let bbox = if n == 0 { (0.0, 0.0, 0.0, 0.0) } else { bbox };
    LayoutResult {
        positions,
        seed,
        bbox,
        mds_stress,
        final_stress,
    }
}

/// Gradient descent on weighted stress `Σ d⁻² (‖xᵢ − xⱼ‖ − d)²`, all nodes
/// moved simultaneously, step shrinking linearly over the iterations.
fn refine(pos: &mut [(f64, f64)], dist: &[Vec<f64>], nodes: &[usize], directions: &[f64], params: &LayoutParams) {
    let m = pos.len();
    if m < 2 || params.iterations == 0 {
        return;
    }
    let mut grad = vec![(0.0, 0.0); m];
    for it in 0..params.iterations {
        let frac = it as f64 / params.iterations as f64;
        let step = params.initial_step + (params.final_step - params.initial_step) * frac;
        grad.iter_mut().for_each(|g| *g = (0.0, 0.0));
        for i in 0..m {
            for j in i + 1..m {
                let target = dist[i][j];
                let (mut dx, mut dy) = (pos[i].0 - pos[j].0, pos[i].1 - pos[j].1);
                let mut d = dx.hypot(dy);
                if d < 1e-12 {
                    let a = directions[nodes[j]];
                    (dx, dy, d) = (a.cos() * 1e-6, a.sin() * 1e-6, 1e-6);
                }
                let w = 1.0 / (target * target);
                let coef = 2.0 * w * (d - target) / d;
                grad[i].0 += coef * dx;
                grad[i].1 += coef * dy;
                grad[j].0 -= coef * dx;
                grad[j].1 -= coef * dy;
            }
        }
        for (p, g) in pos.iter_mut().zip(&grad) {
            p.0 -= step * g.0;
            p.1 -= step * g.1;
        }
    }
}

/// Pushes later nodes off earlier ones until every pair is at least `eps` apart.
fn separate(pos: &mut [(f64, f64)], directions: &[f64], eps: f64) {
    for _ in 0..64 {
        let mut moved = false;
        for j in 1..pos.len() {
            for i in 0..j {
                if euclid(pos[i], pos[j]) < eps {
                    let a = directions[j];
                    pos[j].0 += eps * a.cos();
                    pos[j].1 += eps * a.sin();
                    moved = true;
                }
            }
        }
        if !moved {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::rule;
    use super::super::{build_graph, RuleGraph};
    use super::*;

    #[test]
    fn single_node_at_origin() {
        assert_eq!(classical_mds(&[vec![0.0]]), vec![(0.0, 0.0)]);
        let g = RuleGraph {
            symptom_nodes: vec![crate::symptom::Symptom::from_index(0).unwrap()],
            rule_nodes: vec![],
            edges: vec![],
        };
        let l = layout(&g, 7, &LayoutParams::default());
        assert_eq!(l.positions, vec![(0.0, 0.0)]);
    }

    #[test]
    fn path_places_middle_between_ends() {
        let dist = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]];
        let p = classical_mds(&dist);
        let (a, r, b) = (p[0].0, p[1].0, p[2].0);
        assert!((a.min(b) < r) && (r < a.max(b)));
        assert!((a - b).abs() - 2.0 < 1e-9);
        assert!(kruskal_stress(&p, &dist) < 1e-9);
    }

    #[test]
    fn rule_graph_layout_is_deterministic() {
        let g = build_graph(&[
            rule(1, &["fatigue", "pain"], &["swallow"]),
            rule(2, &["pain"], &["swallow"]),
            rule(3, &["taste"], &["dry_mouth"]),
        ])
        .unwrap();
        let params = LayoutParams::default();
        let a = layout(&g, 42, &params);
        let b = layout(&g, 42, &params);
        assert_eq!(a, b);
        assert!(a.positions.iter().all(|p| p.0.is_finite() && p.1.is_finite()));
        for i in 0..a.positions.len() {
            for j in 0..i {
                assert!(euclid(a.positions[i], a.positions[j]) >= params.min_separation);
            }
        }
        // Two components: {fatigue,pain,swallow,r1,r2} and {dry_mouth,taste,r3}, tiled left to right.
        let hops = graph_distances(&g);
        assert_eq!(components(&hops).len(), 2);
        assert!(a.final_stress <= a.mds_stress + 1e-9);
    }

    #[test]
    fn coincident_mds_points_get_separated() {
        // Two rules over the same pair collapse onto each other in MDS.
        let g = build_graph(&[rule(1, &["fatigue"], &["pain"]), rule(2, &["fatigue"], &["pain"])]).unwrap();
        let l = layout(&g, 3, &LayoutParams::default());
        assert!(euclid(l.positions[2], l.positions[3]) >= 1e-3);
    }
}
