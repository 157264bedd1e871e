//! Cook's distance and one-round influential-observation removal.

use super::design::DesignMatrix;
use super::ols::{fit_ols, ModelFit};
use crate::error::{Error, Result};

/// Cook's distance of every row of a fit:
/// D_i = e_i^2 h_i / (p s^2 (1 - h_i)^2), with p the number of columns
/// including the intercept. Rows with leverage 1 get NaN; an exact fit
/// (residual variance at rounding level) gives all zeros.
pub fn cooks_distances(fit: &ModelFit) -> Vec<f64> {
    let p = fit.coefficients.len() as f64;
    let scale = fit.fitted.iter().map(|v| v * v).sum::<f64>() / fit.fitted.len().max(1) as f64;
    let exact = fit.sigma2 <= 1e-24 * scale;
    fit.residuals
        .iter()
        .zip(&fit.leverage)
        .map(|(&e, &h)| {
            if exact || fit.sigma2 == 0.0 {
                0.0
            } else if h >= 1.0 - 1e-12 {
                f64::NAN
            } else {
                e * e * h / (p * fit.sigma2 * (1.0 - h) * (1.0 - h))
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceOutcome {
    /// The refit after removal, or the original fit if nothing was removed.
    pub fit: ModelFit,
    /// Distances on the initial fit, in row order.
    pub distances: Vec<f64>,
    pub threshold: f64,
    /// Why removal was skipped although rows exceeded the threshold.
    pub skipped: Option<String>,
}

impl InfluenceOutcome {
    pub fn removed(&self) -> &[String] {
        &self.fit.removed_influential
    }
}

/// Fits, removes every row with Cook's distance above `threshold`
/// (4/n when `None`) and refits once. Removal is skipped when the remainder
/// would have fewer than (explanatory columns + 2) rows or would no longer
/// have full column rank.
pub fn cooks_filter(design: &DesignMatrix, threshold: Option<f64>) -> Result<InfluenceOutcome> {
    let initial = fit_ols(design)?;
    let n = design.n_rows();
    let threshold = threshold.unwrap_or(4.0 / n as f64);
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Error::Config(format!("Cook's distance threshold must be positive, got {threshold}")));
    }
    let distances = cooks_distances(&initial);
    let keep: Vec<bool> = distances.iter().map(|d| d.is_nan() || *d <= threshold).collect();
    let n_removed = keep.iter().filter(|k| !**k).count();
    let unchanged = |skipped: Option<String>, initial: ModelFit, distances: Vec<f64>| InfluenceOutcome {
        fit: initial,
        distances,
        threshold,
        skipped,
    };
    if n_removed == 0 {
        return Ok(unchanged(None, initial, distances));
    }

    let required = design.n_explanatory() + 2;
    if n - n_removed < required {
        let why = format!(
            "influence filter skipped: removing {n_removed} of {n} rows would leave fewer than {required}"
        );
        log::warn!("{why}");
        return Ok(unchanged(Some(why), initial, distances));
    }
    let reduced = design.select_rows(&keep);
    match fit_ols(&reduced) {
        Ok(mut refit) => {
            refit.removed_influential = design
                .row_ids()
                .iter()
                .zip(&keep)
                .filter(|(_, k)| !**k)
                .map(|(id, _)| id.clone())
                .collect();
            refit.selection_trace = initial.selection_trace.clone();
            refit.exempted = initial.exempted.clone();
            Ok(InfluenceOutcome { fit: refit, distances, threshold, skipped: None })
        }
        Err(Error::SingularDesign { columns }) => {
            let why = format!(
                "influence filter skipped: removing {n_removed} rows makes column(s) {} dependent",
                columns.join(", ")
            );
            log::warn!("{why}");
            Ok(unchanged(Some(why), initial, distances))
        }
        Err(e) => Err(e),
    }
}
