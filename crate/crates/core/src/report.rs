//! Results files and the paired comparison of two approaches.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::chrono::{EvaluationRow, FitSummary};
use crate::error::{Error, Result};
use crate::statkit::{wilcoxon_signed_rank, TestResult};

pub const RESULT_COLUMNS: [&str; 15] = [
    "dataset",
    "partition",
    "approach",
    "window_start_year",
    "test_year",
    "n_train",
    "n_test",
    "re",
    "mse",
    "tae",
    "normality_warning",
    "adj_r2",
    "coefficients",
    "removed_ids",
    "dropped_vars",
];

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse { line, message: e.to_string() }
}

/// Serialises rows in the results-file layout. Reals use the shortest
/// representation that reads back to the same value; absent values are
/// empty fields.
pub fn write_results(rows: &[EvaluationRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(RESULT_COLUMNS).map_err(csv_error)?;
    for r in rows {
        let (adj, coefs, removed, dropped) = match &r.fit {
            Some(f) => (
                f.adjusted_r2.to_string(),
                f.coefficients.iter().map(|(n, v)| format!("{n}={v}")).collect::<Vec<_>>().join(";"),
                f.removed_ids.join(";"),
                f.dropped_vars.join(";"),
            ),
            None => Default::default(),
        };
        w.write_record([
            r.dataset.clone(),
            r.partition.clone(),
            r.approach.to_string(),
            r.window_start_year.to_string(),
            r.test_year.to_string(),
            r.n_train.to_string(),
            r.n_test.to_string(),
            opt(r.re),
            opt(r.mse),
            opt(r.tae),
            r.normality_warning.to_string(),
            adj,
            coefs,
            removed,
            dropped,
        ])
        .map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

fn split_list(s: &str) -> Vec<String> {
    if s.is_empty() {
        Vec::new()
    } else {
        s.split(';').map(str::to_string).collect()
    }
}

/// Reads a results file written by [`write_results`].
pub fn parse_results(text: &str) -> Result<Vec<EvaluationRow>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_error)?.clone();
    if header.iter().ne(RESULT_COLUMNS) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`", RESULT_COLUMNS.join(",")),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(csv_error)?;
        let field = |k: usize| rec.get(k).unwrap_or("");
        let bad = |k: usize| Error::Parse { line, message: format!("invalid {} `{}`", RESULT_COLUMNS[k], field(k)) };
        fn num<T: FromStr>(s: &str) -> Option<T> {
            s.parse().ok()
        }
        let real = |k: usize| -> Result<Option<f64>> {
            if field(k).is_empty() {
                Ok(None)
            } else {
                num(field(k)).map(Some).ok_or_else(|| bad(k))
            }
        };
        let fit = match real(11)? {
            None => None,
            Some(adjusted_r2) => {
                let coefficients = split_list(field(12))
                    .iter()
                    .map(|pair| {
                        let (n, v) = pair.split_once('=').ok_or_else(|| bad(12))?;
                        Ok((n.to_string(), num(v).ok_or_else(|| bad(12))?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(FitSummary {
                    coefficients,
                    adjusted_r2,
                    removed_ids: split_list(field(13)),
                    dropped_vars: split_list(field(14)),
                })
            }
        };
        rows.push(EvaluationRow {
            dataset: field(0).to_string(),
            partition: field(1).to_string(),
            approach: field(2).parse().map_err(|_| bad(2))?,
            window_start_year: num(field(3)).ok_or_else(|| bad(3))?,
            test_year: num(field(4)).ok_or_else(|| bad(4))?,
            n_train: num(field(5)).ok_or_else(|| bad(5))?,
            n_test: num(field(6)).ok_or_else(|| bad(6))?,
            re: real(7)?,
            mse: real(8)?,
            tae: real(9)?,
            normality_warning: num(field(10)).ok_or_else(|| bad(10))?,
            fit,
            failure: None,
        });
    }
    Ok(rows)
}

/// Failed folds, kept out of the results file.
pub fn write_failures(rows: &[EvaluationRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(["dataset", "partition", "approach", "window_start_year", "test_year", "n_train", "reason"])
        .map_err(csv_error)?;
    for r in rows.iter().filter(|r| r.is_failed()) {
        w.write_record([
            r.dataset.clone(),
            r.partition.clone(),
            r.approach.to_string(),
            r.window_start_year.to_string(),
            r.test_year.to_string(),
            r.n_train.to_string(),
            r.failure.clone().unwrap_or_default(),
        ])
        .map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

/// How rows of two results files are matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairBy {
    /// (partition, test_year, window_start_year)
    #[default]
    Window,
    /// (partition, test_year); every combination of rows sharing the key is a pair.
    Year,
}

impl FromStr for PairBy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "window" => Ok(PairBy::Window),
            "year" => Ok(PairBy::Year),
            other => Err(Error::Config(format!("unknown pairing `{other}` (expected window or year)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Re,
    Mse,
    Tae,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Re, Metric::Mse, Metric::Tae];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Re => "RE",
            Metric::Mse => "MSE",
            Metric::Tae => "TAE",
        }
    }

    pub fn of(self, row: &EvaluationRow) -> Option<f64> {
        match self {
            Metric::Re => row.re,
            Metric::Mse => row.mse,
            Metric::Tae => row.tae,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricComparison {
    pub metric: Metric,
    /// Pairs where both rows carry the metric.
    pub n_pairs: usize,
    /// `None` when no pair carries the metric.
    pub test: Option<TestResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PairingEntry {
    Matched { partition: String, test_year: i32, window_a: i32, window_b: i32 },
    UnmatchedA { partition: String, test_year: i32, window_start_year: i32 },
    UnmatchedB { partition: String, test_year: i32, window_start_year: i32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub pair_by: PairBy,
    pub metrics: Vec<MetricComparison>,
    pub log: Vec<PairingEntry>,
}

impl ComparisonReport {
    pub fn metric(&self, m: Metric) -> &MetricComparison {
        self.metrics.iter().find(|c| c.metric == m).expect("all metrics present")
    }

    pub fn n_matched(&self) -> usize {
        self.log.iter().filter(|e| matches!(e, PairingEntry::Matched { .. })).count()
    }

    /// Plain-text summary: one line per metric with four significant digits,
    /// followed by the pairing log.
    pub fn render(&self) -> String {
        let mut out = String::from("metric,n_pairs,statistic,p_value,exact\n");
        for c in &self.metrics {
            match &c.test {
                Some(t) => {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        c.metric.as_str(),
                        c.n_pairs,
                        sig4(t.statistic),
                        sig4(t.p_value),
                        t.exact
                    );
                }
                None => {
                    let _ = writeln!(out, "{},0,,,", c.metric.as_str());
                }
            }
        }
        out.push_str("\npairing,partition,test_year,window_a,window_b\n");
        for e in &self.log {
            let _ = match e {
                PairingEntry::Matched { partition, test_year, window_a, window_b } => {
                    writeln!(out, "matched,{partition},{test_year},{window_a},{window_b}")
                }
                PairingEntry::UnmatchedA { partition, test_year, window_start_year } => {
                    writeln!(out, "only_a,{partition},{test_year},{window_start_year},")
                }
                PairingEntry::UnmatchedB { partition, test_year, window_start_year } => {
                    writeln!(out, "only_b,{partition},{test_year},,{window_start_year}")
                }
            };
        }
        out
    }
}

/// Formats with four significant digits.
pub fn sig4(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return v.to_string();
    }
    let magnitude = v.abs().log10().floor() as i32;
    if !(-4..4).contains(&magnitude) {
        return format!("{v:.3e}");
    }
    let decimals = (3 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

/// Pairs rows of `a` and `b` and runs a two-sided Wilcoxon signed-rank test
/// per metric. A pair enters a metric's test only if both rows carry it.
pub fn compare(a: &[EvaluationRow], b: &[EvaluationRow], pair_by: PairBy) -> Result<ComparisonReport> {
    type Key = (String, i32, Option<i32>);
    let key = |r: &EvaluationRow| -> Key {
        let window = match pair_by {
            PairBy::Window => Some(r.window_start_year),
            PairBy::Year => None,
        };
        (r.partition.clone(), r.test_year, window)
    };
    let mut groups: BTreeMap<Key, (Vec<&EvaluationRow>, Vec<&EvaluationRow>)> = BTreeMap::new();
    for r in a {
        groups.entry(key(r)).or_default().0.push(r);
    }
    for r in b {
        groups.entry(key(r)).or_default().1.push(r);
    }

    let mut log = Vec::new();
    let mut pairs = Vec::new();
    for (ga, gb) in groups.values() {
        if gb.is_empty() || ga.is_empty() {
            for r in ga {
                log.push(PairingEntry::UnmatchedA {
                    partition: r.partition.clone(),
                    test_year: r.test_year,
                    window_start_year: r.window_start_year,
                });
            }
            for r in gb {
                log.push(PairingEntry::UnmatchedB {
                    partition: r.partition.clone(),
                    test_year: r.test_year,
                    window_start_year: r.window_start_year,
                });
            }
            continue;
        }
        for ra in ga {
            for rb in gb {
                log.push(PairingEntry::Matched {
                    partition: ra.partition.clone(),
                    test_year: ra.test_year,
                    window_a: ra.window_start_year,
                    window_b: rb.window_start_year,
                });
                pairs.push((*ra, *rb));
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::Usage("the two results files have no matching rows".into()));
    }
    let metrics = Metric::ALL
        .iter()
        .map(|&m| {
            let values: Vec<(f64, f64)> =
                pairs.iter().filter_map(|(ra, rb)| Some((m.of(ra)?, m.of(rb)?))).collect();
            let test = if values.is_empty() { None } else { Some(wilcoxon_signed_rank(&values)?) };
            Ok(MetricComparison { metric: m, n_pairs: values.len(), test })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonReport { pair_by, metrics, log })
}
