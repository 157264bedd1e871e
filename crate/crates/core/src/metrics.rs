//! Accuracy measures on the raw effort scale.
//!
//! RE is the ratio of sample variances (n-1 denominators) of the residuals
//! and of the measured efforts. It and MSE are absent rather than NaN when
//! they cannot be computed, which mirrors the "-" cells of per-year tables.

use crate::error::{Error, Result};
use crate::statkit::descriptive::sample_variance;

/// Paired actual and estimated efforts.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    actual: Vec<f64>,
    estimate: Vec<f64>,
}

impl PredictionSet {
    pub fn new(actual: Vec<f64>, estimate: Vec<f64>) -> Result<Self> {
        if actual.len() != estimate.len() {
            return Err(Error::Internal(format!(
                "{} actual values for {} estimates",
                actual.len(),
                estimate.len()
            )));
        }
        if actual.is_empty() {
            return Err(Error::InsufficientData { required: 1, available: 0 });
        }
        if actual.iter().chain(&estimate).any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::DegenerateSample("efforts must be finite and positive".into()));
        }
        Ok(PredictionSet { actual, estimate })
    }

    pub fn len(&self) -> usize {
        self.actual.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actual.is_empty()
    }

    pub fn actual(&self) -> &[f64] {
        &self.actual
    }

    pub fn estimate(&self) -> &[f64] {
        &self.estimate
    }

    /// actual - estimate, pairwise.
    pub fn residuals(&self) -> Vec<f64> {
        self.actual.iter().zip(&self.estimate).map(|(a, e)| a - e).collect()
    }
}

/// var(residuals) / var(actual); absent when n < 2 or var(actual) = 0.
pub fn relative_error(p: &PredictionSet) -> Option<f64> {
    let denom = sample_variance(&p.actual)?;
    if denom == 0.0 {
        return None;
    }
    sample_variance(&p.residuals()).map(|num| num / denom)
}

/// (1/n) sum (actual - estimate)^2; absent for a single project.
pub fn mean_squared_error(p: &PredictionSet) -> Option<f64> {
    if p.len() < 2 {
        return None;
    }
    Some(p.residuals().iter().map(|r| r * r).sum::<f64>() / p.len() as f64)
}

/// sum |actual - estimate|; for one project this is its absolute error.
pub fn total_absolute_error(p: &PredictionSet) -> f64 {
    p.residuals().iter().map(|r| r.abs()).sum()
}
