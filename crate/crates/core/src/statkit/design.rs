use std::collections::HashSet;

use crate::error::{Error, Result};

pub const INTERCEPT: &str = "intercept";

/// Regression design: named columns (the first is the intercept), a
/// response and the record id of every row.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    column_names: Vec<String>,
    // column-major, each of length n
    columns: Vec<Vec<f64>>,
    response: Vec<f64>,
    row_ids: Vec<String>,
}

impl DesignMatrix {
    pub fn new(
        column_names: Vec<String>,
        columns: Vec<Vec<f64>>,
        response: Vec<f64>,
        row_ids: Vec<String>,
    ) -> Result<Self> {
        let n = response.len();
        if column_names.len() != columns.len() {
            return Err(Error::Internal(format!(
                "{} column names for {} columns",
                column_names.len(),
                columns.len()
            )));
        }
        if column_names.first().map(String::as_str) != Some(INTERCEPT) {
            return Err(Error::Internal("first design column must be the intercept".into()));
        }
        if row_ids.len() != n || columns.iter().any(|c| c.len() != n) {
            return Err(Error::Internal("design columns, response and ids differ in length".into()));
        }
        let mut seen = HashSet::new();
        for name in &column_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::Internal(format!("duplicate design column `{name}`")));
            }
        }
        for i in 0..n {
            if !response[i].is_finite() || columns.iter().any(|c| !c[i].is_finite()) {
                return Err(Error::Validation {
                    id: row_ids[i].clone(),
                    message: "non-finite value in design row".into(),
                });
            }
        }
        Ok(DesignMatrix { column_names, columns, response, row_ids })
    }

    /// Prepends an intercept column to the given covariates.
    pub fn with_intercept(covariates: Vec<(String, Vec<f64>)>, response: Vec<f64>, row_ids: Vec<String>) -> Result<Self> {
        let n = response.len();
        let mut names = vec![INTERCEPT.to_string()];
        let mut columns = vec![vec![1.0; n]];
        for (name, col) in covariates {
            names.push(name);
            columns.push(col);
        }
        Self::new(names, columns, response, row_ids)
    }

    pub fn n_rows(&self) -> usize {
        self.response.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    /// Columns other than the intercept.
    pub fn n_explanatory(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn column_by_name(&self, name: &str) -> Option<&[f64]> {
        self.position(name).map(|j| self.columns[j].as_slice())
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    /// Same rows with column `name` removed. The intercept cannot be removed.
    pub fn without_column(&self, name: &str) -> Result<Self> {
        let j = self
            .position(name)
            .ok_or_else(|| Error::Internal(format!("no design column `{name}`")))?;
        if j == 0 {
            return Err(Error::Internal("the intercept cannot be removed".into()));
        }
        let mut out = self.clone();
        out.column_names.remove(j);
        out.columns.remove(j);
        Ok(out)
    }

    /// Rows for which `keep` is true, in order.
    pub fn select_rows(&self, keep: &[bool]) -> Self {
        let pick = |v: &[f64]| v.iter().zip(keep).filter(|(_, k)| **k).map(|(x, _)| *x).collect::<Vec<_>>();
        DesignMatrix {
            column_names: self.column_names.clone(),
            columns: self.columns.iter().map(|c| pick(c)).collect(),
            response: pick(&self.response),
            row_ids: self
                .row_ids
                .iter()
                .zip(keep)
                .filter(|(_, k)| **k)
                .map(|(id, _)| id.clone())
                .collect(),
        }
    }

    /// The same design with the response multiplied by `factor`.
    pub fn scale_response(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.response.iter_mut().for_each(|y| *y *= factor);
        out
    }
}
