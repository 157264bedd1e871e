//! Per-fold modelling procedure and evaluation rows.

use std::collections::HashMap;

use super::fold::{schedule, Fold};
use super::spec::{Approach, ModelForm, ModelSpec, Selection};
use crate::error::{Error, Result};
use crate::ingest::{Dataset, ProjectRecord};
use crate::metrics::{mean_squared_error, relative_error, total_absolute_error, PredictionSet};
use crate::statkit::descriptive::{mean, median};
use crate::statkit::{
    backward_stepwise, cooks_filter, dependent_columns, fit_ols, shapiro_wilk, DesignMatrix, ModelFit, INTERCEPT,
};

/// Marker appended to columns removed before selection because they were
/// linearly dependent on earlier columns in the training data.
pub const ALIASED_SUFFIX: &str = "[aliased]";

/// Fitted-model details carried by an evaluation row.
#[derive(Debug, Clone, PartialEq)]
pub struct FitSummary {
    /// (column, estimate) in design order, intercept first.
    pub coefficients: Vec<(String, f64)>,
    pub adjusted_r2: f64,
    /// Training records removed as influential.
    pub removed_ids: Vec<String>,
    /// Columns dropped by aliasing checks and backward selection, in order.
    pub dropped_vars: Vec<String>,
}

impl FitSummary {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.coefficients.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// Accuracy of one fold.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationRow {
    pub dataset: String,
    pub partition: String,
    pub approach: Approach,
    pub window_start_year: i32,
    pub test_year: i32,
    pub n_train: usize,
    pub n_test: usize,
    pub re: Option<f64>,
    pub mse: Option<f64>,
    /// Total absolute error; the single absolute error for one-project years.
    /// `None` only on failed folds.
    pub tae: Option<f64>,
    pub normality_warning: bool,
    pub fit: Option<FitSummary>,
    /// Why the fold produced no metrics.
    pub failure: Option<String>,
}

impl EvaluationRow {
    pub fn key(&self) -> (&str, i32, i32) {
        (&self.partition, self.test_year, self.window_start_year)
    }

    pub fn is_failed(&self) -> bool {
        self.failure.is_some()
    }
}

fn feature(record: &ProjectRecord, column: &str) -> Result<f64> {
    Ok(match column {
        INTERCEPT => 1.0,
        "ln_kloc" | "ln_size" => record.size.ln(),
        _ => {
            if let Some(level) = column.strip_prefix("lang") {
                let level: u8 = level.parse().map_err(|_| Error::Internal(format!("bad column `{column}`")))?;
                f64::from(u8::from(record.language == Some(level)))
            } else if let Some(em) = column.strip_prefix("ln_") {
                record
                    .effort_multipliers
                    .and_then(|m| m.get(em))
                    .ok_or_else(|| Error::Internal(format!("record `{}` lacks multiplier {em}", record.id)))?
                    .ln()
            } else {
                return Err(Error::Internal(format!("unknown design column `{column}`")));
            }
        }
    })
}

/// Log-form design for `records` under `spec`.
pub fn build_design(records: &[&ProjectRecord], spec: &ModelSpec) -> Result<DesignMatrix> {
    let mut covariates = Vec::new();
    for col in spec.candidate_columns() {
        let values = records.iter().map(|r| feature(r, &col)).collect::<Result<Vec<_>>>()?;
        covariates.push((col, values));
    }
    DesignMatrix::with_intercept(
        covariates,
        records.iter().map(|r| r.effort.ln()).collect(),
        records.iter().map(|r| r.id.clone()).collect(),
    )
}

/// Shapiro-Wilk gate on training effort: the raw values are tested first,
/// then their logarithms. Returns true when neither passes at `alpha`.
fn normality_warning(efforts: &[f64], alpha: f64) -> bool {
    let passes = |v: &[f64]| shapiro_wilk(v).map(|t| t.p_value > alpha).unwrap_or(false);
    if passes(efforts) {
        return false;
    }
    let logs: Vec<f64> = efforts.iter().map(|e| e.ln()).collect();
    !passes(&logs)
}

/// Fits the log-form model on the training records: aliased columns are
/// dropped, then selection per `spec`, then one round of Cook's filtering.
pub fn fit_training(records: &[&ProjectRecord], spec: &ModelSpec) -> Result<ModelFit> {
    let size_col = spec.form.size_column();
    let mut design = build_design(records, spec)?;
    let mut dropped = Vec::new();
    let aliased = dependent_columns(&design);
    if aliased.iter().any(|c| c == INTERCEPT || c == size_col) {
        return Err(Error::SingularDesign { columns: aliased });
    }
    for col in aliased {
        design = design.without_column(&col)?;
        dropped.push(format!("{col}{ALIASED_SUFFIX}"));
    }

    let selected = match spec.selection {
        Selection::BackwardStepwise => backward_stepwise(&design, spec.alpha_remove, &[size_col])?,
        Selection::Fixed => fit_ols(&design)?,
    };
    for col in &selected.selection_trace {
        design = design.without_column(col)?;
    }
    dropped.extend(selected.selection_trace.iter().cloned());

    let mut fit = if spec.influence_filter {
        cooks_filter(&design, spec.cooks_threshold)?.fit
    } else {
        selected.clone()
    };
    fit.selection_trace = dropped;
    fit.exempted = selected.exempted;
    Ok(fit)
}

/// Runs one fold: normality gate, model fit and prediction for model-based
/// approaches, constant estimates for mean and median, then the accuracy
/// measures on the raw scale. Singular designs yield a failed row.
pub fn run_fold(fold: &Fold, data: &Dataset, partition: &str, spec: &ModelSpec) -> Result<EvaluationRow> {
    let by_id: HashMap<&str, &ProjectRecord> = data.records().iter().map(|r| (r.id.as_str(), r)).collect();
    let lookup = |ids: &[String]| -> Result<Vec<&ProjectRecord>> {
        ids.iter()
            .map(|id| {
                by_id
                    .get(id.as_str())
                    .copied()
                    .ok_or_else(|| Error::Internal(format!("fold references unknown record `{id}`")))
            })
            .collect()
    };
    if fold.test_ids.is_empty() {
        return Err(Error::Internal(format!("test year {} has no projects in `{partition}`", fold.test_year)));
    }
    let train = lookup(&fold.training_ids)?;
    let test = lookup(&fold.test_ids)?;

    let mut row = EvaluationRow {
        dataset: data.name.clone(),
        partition: partition.to_string(),
        approach: fold.approach,
        window_start_year: fold.window_start_year,
        test_year: fold.test_year,
        n_train: train.len(),
        n_test: test.len(),
        re: None,
        mse: None,
        tae: None,
        normality_warning: false,
        fit: None,
        failure: None,
    };
    let train_effort: Vec<f64> = train.iter().map(|r| r.effort).collect();

    let estimates: Vec<f64> = match fold.approach {
        Approach::Mean => vec![mean(&train_effort); test.len()],
        Approach::Median => vec![median(&train_effort); test.len()],
        Approach::Tasa | Approach::Tamw | Approach::Loo => {
            row.normality_warning = normality_warning(&train_effort, spec.normality_alpha);
            let fit = match fit_training(&train, spec) {
                Ok(fit) => fit,
                Err(e @ (Error::SingularDesign { .. } | Error::InsufficientData { .. })) => {
                    row.failure = Some(e.to_string());
                    return Ok(row);
                }
                Err(e) => return Err(e),
            };
            let estimates = test
                .iter()
                .map(|r| {
                    let mut err = None;
                    let lp = fit.linear_predictor(|c| {
                        feature(r, c).unwrap_or_else(|e| {
                            err = Some(e);
                            f64::NAN
                        })
                    });
                    err.map_or(Ok(lp.exp()), Err)
                })
                .collect::<Result<Vec<_>>>()?;
            row.fit = Some(FitSummary {
                coefficients: fit.coefficients.iter().map(|c| (c.name.clone(), c.estimate)).collect(),
                adjusted_r2: fit.adjusted_r2,
                removed_ids: fit.removed_influential.clone(),
                dropped_vars: fit.selection_trace.clone(),
            });
            estimates
        }
    };

    let actual: Vec<f64> = test.iter().map(|r| r.effort).collect();
    match PredictionSet::new(actual, estimates) {
        Ok(p) => {
            row.re = relative_error(&p);
            row.mse = row.re.and(mean_squared_error(&p));
            row.tae = Some(total_absolute_error(&p));
        }
        Err(e) => row.failure = Some(format!("predictions unusable: {e}")),
    }
    Ok(row)
}

/// Schedules and runs every fold of `approach`, in schedule order.
pub fn run_approach(
    data: &Dataset,
    partition: &str,
    approach: Approach,
    spec: &ModelSpec,
    tamw_first_window: usize,
) -> Result<Vec<EvaluationRow>> {
    spec.validate()?;
    if spec.form.schema() != data.schema {
        return Err(Error::Config(format!(
            "model form {} does not apply to {} data",
            spec.form.as_str(),
            data.schema
        )));
    }
    schedule(data, approach, spec, tamw_first_window)?
        .iter()
        .map(|fold| run_fold(fold, data, partition, spec))
        .collect()
}

/// Default model form for a schema and partition: COCOMO for cocomo81 data;
/// for function-point data, language dummies unless the partition keeps a
/// single language.
pub fn default_form(data: &Dataset) -> ModelForm {
    match data.schema {
        crate::ingest::Schema::Cocomo81 => ModelForm::Cocomo,
        crate::ingest::Schema::FpLanguage => {
            let first = data.records()[0].language;
            if data.records().iter().all(|r| r.language == first) {
                ModelForm::FpSizeOnly
            } else {
                ModelForm::FpDummy
            }
        }
    }
}
