//! Coefficient series across the folds of one run.

use super::run::EvaluationRow;
use super::spec::Approach;
use crate::error::{Error, Result};
use crate::statkit::INTERCEPT;

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientRow {
    pub test_year: i32,
    pub window_start_year: i32,
    /// Aligned with [`CoefficientTable::columns`]; `None` where the variable
    /// was not in the model.
    pub values: Vec<Option<f64>>,
    pub adjusted_r2: f64,
}

/// One row per fitted fold, one column per variable that appears in any fit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoefficientTable {
    pub approach: Option<Approach>,
    /// Intercept first, then variables in order of first appearance.
    pub columns: Vec<String>,
    pub rows: Vec<CoefficientRow>,
}

impl CoefficientTable {
    pub fn value(&self, test_year: i32, window_start_year: i32, column: &str) -> Option<f64> {
        let c = self.columns.iter().position(|n| n == column)?;
        self.rows
            .iter()
            .find(|r| r.test_year == test_year && r.window_start_year == window_start_year)
            .and_then(|r| r.values[c])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("test_year,window_start_year");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push_str(",adj_r2\n");
        for r in &self.rows {
            out.push_str(&format!("{},{}", r.test_year, r.window_start_year));
            for v in &r.values {
                out.push(',');
                if let Some(v) = v {
                    out.push_str(&v.to_string());
                }
            }
            out.push_str(&format!(",{}\n", r.adjusted_r2));
        }
        out
    }
}

/// Tabulates the fitted coefficients of `rows`, which must come from a
/// single approach. Rows without a fit (baselines, failed folds) are skipped.
pub fn fit_summary_series(rows: &[EvaluationRow]) -> Result<CoefficientTable> {
    let Some(first) = rows.first() else {
        return Ok(CoefficientTable::default());
    };
    if let Some(other) = rows.iter().find(|r| {
        r.approach != first.approach || r.partition != first.partition || r.dataset != first.dataset
    }) {
        return Err(Error::Usage(format!(
            "coefficient series needs rows from one run, got {}/{} and {}/{}",
            first.partition, first.approach, other.partition, other.approach
        )));
    }
    let mut columns = vec![INTERCEPT.to_string()];
    for fit in rows.iter().filter_map(|r| r.fit.as_ref()) {
        for (name, _) in &fit.coefficients {
            if !columns.contains(name) {
                columns.push(name.clone());
            }
        }
    }
    let table_rows = rows
        .iter()
        .filter_map(|r| {
            let fit = r.fit.as_ref()?;
            Some(CoefficientRow {
                test_year: r.test_year,
                window_start_year: r.window_start_year,
                values: columns.iter().map(|c| fit.coefficient(c)).collect(),
                adjusted_r2: fit.adjusted_r2,
            })
        })
        .collect();
    Ok(CoefficientTable { approach: Some(first.approach), columns, rows: table_rows })
}
