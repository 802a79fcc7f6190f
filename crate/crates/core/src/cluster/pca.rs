//! Two-component PCA through the eigendecomposition of the covariance matrix.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    /// `(pc1, pc2)` per row.
    pub coords: Vec<(f64, f64)>,
    /// Unit loading vectors, one per component (at most two).
    pub components: Vec<Vec<f64>>,
    /// Covariance eigenvalues matching `components`.
    pub variances: Vec<f64>,
    /// All rows were identical; every coordinate is the origin.
    pub degenerate: bool,
}

/// Centers the columns, eigendecomposes the sample covariance and projects
/// onto the two leading eigenvectors. Each component is signed so that its
/// largest-magnitude loading is positive. With one column, pc2 is zero.
pub fn pca_project(rows: &[Vec<f64>]) -> Result<Projection> {
    let n = rows.len();
    if n < 2 {
        return Err(Error::TooFewPatients { needed: 2, got: n });
    }
    let d = rows[0].len();
    if d == 0 {
        return Err(Error::EmptySymptomSubset);
    }
    let means: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let centered = DMatrix::from_fn(n, d, |i, j| rows[i][j] - means[j]);

    if centered.iter().all(|&v| v == 0.0) {
        return Ok(Projection {
            coords: vec![(0.0, 0.0); n],
            components: Vec::new(),
            variances: Vec::new(),
            degenerate: true,
        });
    }

    let cov = (centered.transpose() * &centered) / (n as f64 - 1.0);
    let eigen = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]).then(a.cmp(&b)));

    let take = d.min(2);
    let mut components = Vec::with_capacity(take);
    let mut variances = Vec::with_capacity(take);
    for &c in &order[..take] {
        let mut v: Vec<f64> = eigen.eigenvectors.column(c).iter().copied().collect();
        orient(&mut v);
        components.push(v);
        variances.push(eigen.eigenvalues[c].max(0.0));
    }

    let project = |row: usize, comp: &[f64]| -> f64 {
        let p: f64 = comp.iter().enumerate().map(|(j, w)| centered[(row, j)] * w).sum();
        // Fold -0.0 into 0.0 so serialized output is stable.
        p + 0.0
    };
    let coords = (0..n)
        .map(|i| {
            let pc1 = project(i, &components[0]);
            let pc2 = components.get(1).map_or(0.0, |c| project(i, c));
            (pc1, pc2)
        })
        .collect();
    Ok(Projection {
        coords,
        components,
        variances,
        degenerate: false,
    })
}

fn orient(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        // Loadings within rounding noise of each other count as tied; the first wins.
        if x.abs() > v[best].abs() * (1.0 + 1e-12) {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn collinear_rows() {
        let rows = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        let p = pca_project(&rows).unwrap();
        let s = 2f64.sqrt();
        let expected = [(-s, 0.0), (0.0, 0.0), (s, 0.0)];
        for (got, want) in p.coords.iter().zip(expected) {
            assert!((got.0 - want.0).abs() < 1e-12, "{got:?}");
            assert!((got.1 - want.1).abs() < 1e-12, "{got:?}");
        }
        assert!((p.variances[0] - 2.0).abs() < 1e-12);
        assert!(p.variances[1].abs() < 1e-12);
    }

    #[test]
    fn identical_rows_are_degenerate() {
        let p = pca_project(&vec![vec![3.0, 4.0]; 5]).unwrap();
        assert!(p.degenerate);
        assert!(p.coords.iter().all(|&c| c == (0.0, 0.0)));
    }

    #[test]
    fn single_column_has_zero_pc2() {
        let p = pca_project(&[vec![1.0], vec![5.0], vec![3.0]]).unwrap();
        assert_eq!(p.components.len(), 1);
        assert!(p.coords.iter().all(|c| c.1 == 0.0));
        assert_eq!(p.coords[1].0, 2.0);
    }

    #[test]
    fn too_few_rows() {
        assert!(pca_project(&[vec![1.0, 2.0]]).is_err());
    }

    fn matrix() -> impl Strategy<Value = Vec<Vec<f64>>> {
        (1usize..6).prop_flat_map(|d| {
            prop::collection::vec(prop::collection::vec((0u8..=10).prop_map(f64::from), d), 2..15)
        })
    }

    proptest! {
        #[test]
        fn components_orthonormal_and_ordered(rows in matrix()) {
            let p = pca_project(&rows).unwrap();
            prop_assume!(!p.degenerate);
            for c in &p.components {
                let norm: f64 = c.iter().map(|x| x * x).sum();
                prop_assert!((norm - 1.0).abs() < 1e-9);
            }
            if p.components.len() == 2 {
                let dot: f64 = p.components[0].iter().zip(&p.components[1]).map(|(a, b)| a * b).sum();
                prop_assert!(dot.abs() < 1e-9);
                prop_assert!(p.variances[0] >= p.variances[1]);
            }
            let var = |f: fn(&(f64, f64)) -> f64| p.coords.iter().map(|c| f(c).powi(2)).sum::<f64>();
            prop_assert!(var(|c| c.0) >= var(|c| c.1) - 1e-9);
        }

        #[test]
        fn row_order_does_not_matter(rows in matrix(), rot in 0usize..15) {
            let p = pca_project(&rows).unwrap();
            let mut shuffled = rows.clone();
            let r = rot % rows.len();
            shuffled.rotate_left(r);
            let q = pca_project(&shuffled).unwrap();
            for i in 0..rows.len() {
                let a = p.coords[(i + r) % rows.len()];
                let b = q.coords[i];
                // Components with (near-)equal variance can rotate freely; compare norms then.
                let tied = p.variances.len() == 2 && (p.variances[0] - p.variances[1]).abs() < 1e-9;
                if tied {
                    prop_assert!(((a.0.hypot(a.1)) - b.0.hypot(b.1)).abs() < 1e-7);
                } else {
                    prop_assert!((a.0 - b.0).abs() < 1e-7, "{:?} vs {:?}", a, b);
                }
            }
        }
    }
}
