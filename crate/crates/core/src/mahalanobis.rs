//! Per-identity Gaussian baseline: shrinkage covariance and Mahalanobis distance.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::vector::{check_dims, mean_vector, FeatureVector};

pub const DEFAULT_SHRINKAGE: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct MahalanobisModel {
    pub mu: FeatureVector,
    pub sigma_inverse: DMatrix<f64>,
    pub shrinkage: f64,
}

/// Unbiased (n - 1) sample covariance.
pub fn sample_covariance(vectors: &[FeatureVector]) -> Result<DMatrix<f64>> {
    if vectors.len() < 2 {
        return Err(Error::InvalidParameter("covariance needs at least two vectors".into()));
    }
    let mu = mean_vector(vectors)?;
    let d = mu.dim();
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for v in vectors {
        check_dims(d, v.dim())?;
        let c = DVector::from_iterator(d, v.iter().zip(mu.iter()).map(|(x, m)| x - m));
        cov += &c * c.transpose();
    }
    Ok(cov / (vectors.len() - 1) as f64)
}

/// Fits mean and inverse of `Σ + shrinkage·I` through a Cholesky factorization.
pub fn fit_mahalanobis(vectors: &[FeatureVector], shrinkage: f64) -> Result<MahalanobisModel> {
    if !(shrinkage >= 0.0 && shrinkage.is_finite()) {
        return Err(Error::InvalidParameter(format!("shrinkage must be >= 0, got {shrinkage}")));
    }
    let cov = sample_covariance(vectors)?;
    let d = cov.nrows();
    let regularized = cov + DMatrix::<f64>::identity(d, d) * shrinkage;
    let chol = match regularized.clone().cholesky() {
        Some(c) => c,
        None => {
            let min_eigenvalue = SymmetricEigen::new(regularized).eigenvalues.min();
            return Err(Error::NotPositiveDefinite { min_eigenvalue });
        }
    };
    let inv = chol.inverse();
    // Symmetrize away round-off from the triangular solves.
    let sigma_inverse = (&inv + inv.transpose()) * 0.5;
    Ok(MahalanobisModel { mu: mean_vector(vectors)?, sigma_inverse, shrinkage })
}

pub fn dist_mahalanobis(query: &FeatureVector, model: &MahalanobisModel) -> Result<f64> {
    check_dims(model.mu.dim(), query.dim())?;
    let diff = DVector::from_iterator(query.dim(), query.iter().zip(model.mu.iter()).map(|(q, m)| q - m));
    let q = diff.dot(&(&model.sigma_inverse * &diff));
    Ok(q.max(0.0).sqrt())
}
