use nalgebra::{DMatrix, SymmetricEigen};

use super::{Embedding2D, EmbeddingMethod};
use crate::error::{Error, Result};
use crate::mlharness::FeatureMatrix;

/// Projection of the centred rows onto the two leading eigenvectors of the
/// sample covariance. Each axis is oriented so that its largest-magnitude
/// loading is positive.
pub fn pca_2d(x: &FeatureMatrix) -> Result<Embedding2D> {
    let (n, d) = (x.n_rows(), x.n_cols());
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    if d < 2 {
        return Err(Error::InsufficientData { needed: 2, got: d });
    }
    let mut m = DMatrix::from_fn(n, d, |i, j| x.row(i)[j]);
    for j in 0..d {
        let mu = m.column(j).mean();
        m.column_mut(j).add_scalar_mut(-mu);
    }
    let cov = (m.transpose() * &m) / (n as f64 - 1.0);
    let eig = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let top = eig.eigenvalues[order[0]];
    if !top.is_finite() || top <= 1e-12 {
        return Err(Error::DegenerateCovariance);
    }

    let mut axes = Vec::with_capacity(2);
    for &k in &order[..2] {
        let mut v = eig.eigenvectors.column(k).into_owned();
        let lead = (0..d).fold(0, |best, i| if v[i].abs() > v[best].abs() { i } else { best });
        if v[lead] < 0.0 {
            v.neg_mut();
        }
        axes.push(v);
    }
    let points = (0..n)
        .map(|i| {
            let row = m.row(i);
            [row.dot(&axes[0].transpose()), row.dot(&axes[1].transpose())]
        })
        .collect();
    let explained_variance = [top, eig.eigenvalues[order[1]].max(0.0)];
    Ok(Embedding2D {
        method: EmbeddingMethod::Pca { explained_variance },
        subject_ids: x.subject_ids().to_vec(),
        points,
        labels: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
    }

    #[test]
    fn line_in_five_dimensions() {
        let dir = [1.0, -2.0, 0.5, 3.0, 1.5];
        let rows = (0..12).map(|t| dir.iter().map(|d| d * t as f64 + 0.3).collect()).collect();
        let e = pca_2d(&FeatureMatrix::from_rows(rows).unwrap()).unwrap();
        let EmbeddingMethod::Pca { explained_variance: [v1, v2] } = e.method else { panic!() };
        assert!(v2 < 1e-9 * v1);
        let second: Vec<f64> = e.points.iter().map(|p| p[1]).collect();
        let var = second.iter().map(|v| v * v).sum::<f64>() / 11.0;
        assert!(var < 1e-9 * v1);
    }

    #[test]
    fn planar_data_keeps_distances() {
        let rows: Vec<Vec<f64>> = (0..15)
            .map(|i| {
                let t = i as f64;
                vec![(t * 0.7).sin() * 3.0 + t * 0.2, (t * 1.3).cos() - t * 0.1]
            })
            .collect();
        let e = pca_2d(&FeatureMatrix::from_rows(rows.clone()).unwrap()).unwrap();
        for i in 0..15 {
            for j in 0..15 {
                let orig = dist([rows[i][0], rows[i][1]], [rows[j][0], rows[j][1]]);
                assert!((orig - dist(e.points[i], e.points[j])).abs() < 1e-9);
            }
        }
        let EmbeddingMethod::Pca { explained_variance: [v1, v2] } = e.method else { panic!() };
        assert!(v1 >= v2);
        assert_eq!(pca_2d(&FeatureMatrix::from_rows(rows).unwrap()).unwrap(), e);
    }

    #[test]
    fn guards() {
        let same = FeatureMatrix::from_rows(vec![vec![1.0, 2.0]; 4]).unwrap();
        assert!(matches!(pca_2d(&same), Err(Error::DegenerateCovariance)));
        let few = FeatureMatrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 1.0]]).unwrap();
        assert!(pca_2d(&few).is_err());
    }
}
