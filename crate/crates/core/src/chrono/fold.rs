//! Train/test fold generation by completion year.

use super::spec::{Approach, ModelSpec};
use crate::error::{Error, Result};
use crate::ingest::Dataset;

/// One train/test split defined by whole years.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub approach: Approach,
    /// First training year.
    pub window_start_year: i32,
    /// Distinct training years, ascending.
    pub training_years: Vec<i32>,
    pub training_ids: Vec<String>,
    pub test_year: i32,
    pub test_ids: Vec<String>,
}

impl Fold {
    pub fn n_train(&self) -> usize {
        self.training_ids.len()
    }

    pub fn n_test(&self) -> usize {
        self.test_ids.len()
    }
}

struct YearIndex<'a> {
    data: &'a Dataset,
    years: Vec<(i32, usize)>,
}

impl<'a> YearIndex<'a> {
    fn new(data: &'a Dataset) -> Result<Self> {
        let years = data.year_counts();
        if years.len() < 2 {
            return Err(Error::NoFolds(format!(
                "`{}` spans {} distinct completion year(s); at least 2 are needed",
                data.name,
                years.len()
            )));
        }
        Ok(YearIndex { data, years })
    }

    fn ids_in(&self, years: &[i32]) -> Vec<String> {
        self.data
            .records()
            .iter()
            .filter(|r| years.contains(&r.completion_year))
            .map(|r| r.id.clone())
            .collect()
    }

    fn fold(&self, approach: Approach, training_idx: &[usize], test_idx: usize) -> Fold {
        let training_years: Vec<i32> = training_idx.iter().map(|&i| self.years[i].0).collect();
        let test_year = self.years[test_idx].0;
        Fold {
            approach,
            window_start_year: training_years[0],
            training_ids: self.ids_in(&training_years),
            training_years,
            test_year,
            test_ids: self.ids_in(&[test_year]),
        }
    }

    /// Sequential accumulation starting at year index `start`: the first
    /// training block grows by whole years until it holds `min` projects,
    /// then every later year is tested on all years from `start` before it.
    fn accumulate(&self, approach: Approach, start: usize, min: usize) -> Vec<Fold> {
        let mut count = 0;
        let mut first_test = None;
        for k in start..self.years.len() {
            count += self.years[k].1;
            if count >= min {
                first_test = Some(k + 1);
                break;
            }
        }
        let Some(first_test) = first_test else {
            return Vec::new();
        };
        (first_test..self.years.len())
            .map(|t| {
                let training: Vec<usize> = (start..t).collect();
                self.fold(approach, &training, t)
            })
            .collect()
    }
}

/// Time-aware sequential accumulation: a growing portfolio of all projects
/// completed before each test year.
pub fn tasa_schedule(data: &Dataset, spec: &ModelSpec) -> Result<Vec<Fold>> {
    accumulating_schedule(data, spec, Approach::Tasa)
}

fn accumulating_schedule(data: &Dataset, spec: &ModelSpec, approach: Approach) -> Result<Vec<Fold>> {
    let index = YearIndex::new(data)?;
    let folds = index.accumulate(approach, 0, spec.min_training());
    if folds.is_empty() {
        return Err(no_folds(data, spec));
    }
    Ok(folds)
}

fn no_folds(data: &Dataset, spec: &ModelSpec) -> Error {
    Error::NoFolds(format!(
        "`{}` has no training block of at least {} projects before its last year",
        data.name,
        spec.min_training()
    ))
}

/// Time-aware moving window: sequential accumulation rerun with the window
/// start advanced one data year at a time, from the first year onwards.
/// Several folds may share a test year with different window starts.
pub fn tamw_schedule(data: &Dataset, spec: &ModelSpec) -> Result<Vec<Fold>> {
    tamw_schedule_from(data, spec, 0)
}

/// Moving window whose first window starts at the `first_window`-th data
/// year. `first_window = 1` drops the oldest year before the first window,
/// so no window coincides with sequential accumulation.
pub fn tamw_schedule_from(data: &Dataset, spec: &ModelSpec, first_window: usize) -> Result<Vec<Fold>> {
    let index = YearIndex::new(data)?;
    let mut folds = Vec::new();
    for start in first_window..index.years.len() - 1 {
        let window = index.accumulate(Approach::Tamw, start, spec.min_training());
        if window.is_empty() {
            // later windows are subsets of this one
            break;
        }
        folds.extend(window);
    }
    if folds.is_empty() {
        return Err(no_folds(data, spec));
    }
    Ok(folds)
}

/// Baseline folds. `Loo` holds out one whole year and trains on every other
/// year, earlier and later; years whose remaining data is too small are
/// skipped with a warning. `Mean` and `Median` share the sequential
/// accumulation geometry.
pub fn baseline_schedule(data: &Dataset, kind: Approach, spec: &ModelSpec) -> Result<Vec<Fold>> {
    match kind {
        Approach::Mean | Approach::Median => accumulating_schedule(data, spec, kind),
        Approach::Loo => {
            let index = YearIndex::new(data)?;
            let total = data.len();
            let mut folds = Vec::new();
            for (t, &(year, count)) in index.years.iter().enumerate() {
                if total - count < spec.min_training() {
                    log::warn!(
                        "leave-one-year-out: skipping {year} for `{}`, only {} training projects",
                        data.name,
                        total - count
                    );
                    continue;
                }
                let training: Vec<usize> = (0..index.years.len()).filter(|&i| i != t).collect();
                folds.push(index.fold(Approach::Loo, &training, t));
            }
            if folds.is_empty() {
                return Err(no_folds(data, spec));
            }
            Ok(folds)
        }
        other => Err(Error::Usage(format!("`{other}` is not a baseline approach"))),
    }
}

/// Folds for any approach; `tamw_first_window` is passed to
/// [`tamw_schedule_from`].
pub fn schedule(data: &Dataset, approach: Approach, spec: &ModelSpec, tamw_first_window: usize) -> Result<Vec<Fold>> {
    match approach {
        Approach::Tasa => tasa_schedule(data, spec),
        Approach::Tamw => tamw_schedule_from(data, spec, tamw_first_window),
        _ => baseline_schedule(data, approach, spec),
    }
}
