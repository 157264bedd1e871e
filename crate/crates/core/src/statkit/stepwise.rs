//! Backward elimination on coefficient t-test p-values.

use super::design::DesignMatrix;
use super::ols::{fit_ols, ModelFit};
use crate::error::{Error, Result};

/// Default significance level above which a column is removed.
pub const DEFAULT_ALPHA_REMOVE: f64 = 0.05;

/// Repeatedly drops the non-intercept, non-mandatory column with the largest
/// p-value while that p-value exceeds `alpha_remove`.
///
/// Requires n >= (explanatory columns) + 2 on the full candidate set. Ties on
/// the largest p-value go to the column that comes first in the design.
pub fn backward_stepwise(design: &DesignMatrix, alpha_remove: f64, mandatory: &[&str]) -> Result<ModelFit> {
    if !(alpha_remove > 0.0 && alpha_remove < 1.0) {
        return Err(Error::Config(format!("alpha_remove must lie in (0, 1), got {alpha_remove}")));
    }
    let required = design.n_explanatory() + 2;
    if design.n_rows() < required {
        return Err(Error::InsufficientData { required, available: design.n_rows() });
    }

    let mut current = design.clone();
    let mut trace = Vec::new();
    loop {
        let fit = fit_ols(&current)?;
        let worst = fit
            .coefficients
            .iter()
            .skip(1)
            .filter(|c| !mandatory.contains(&c.name.as_str()))
            .fold(None::<&super::ols::Coefficient>, |best, c| match best {
                Some(b) if b.p_value >= c.p_value => Some(b),
                _ => Some(c),
            });
        match worst {
            Some(c) if c.p_value > alpha_remove => {
                let name = c.name.clone();
                current = current.without_column(&name)?;
                trace.push(name);
            }
            _ => {
                let exempted = fit
                    .coefficients
                    .iter()
                    .filter(|c| mandatory.contains(&c.name.as_str()) && c.p_value > alpha_remove)
                    .map(|c| c.name.clone())
                    .collect();
                return Ok(ModelFit { selection_trace: trace, exempted, ..fit });
            }
        }
    }
}
