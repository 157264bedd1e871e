//! Chronological fold schedules and the per-fold modelling procedure.

mod fold;
mod run;
mod spec;
mod summary;

pub use fold::{baseline_schedule, schedule, tamw_schedule, tamw_schedule_from, tasa_schedule, Fold};
pub use run::{
    build_design, default_form, fit_training, run_approach, run_fold, EvaluationRow, FitSummary, ALIASED_SUFFIX,
};
pub use spec::{Approach, ModelForm, ModelSpec, Selection};
pub use summary::{fit_summary_series, CoefficientRow, CoefficientTable};
