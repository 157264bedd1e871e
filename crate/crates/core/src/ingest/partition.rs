use std::collections::HashSet;
use std::fmt::Write as _;

use super::record::{CategoricalField, Dataset, Mode, NumericField, ProjectRecord, Schema};
use crate::error::{Error, Result};
use crate::statkit::descriptive::{mean, quantile_sorted, sorted};
use crate::statkit::{mann_whitney_u, TestResult};

/// Significance level for deciding that two groups share a distribution.
pub const GROUPING_ALPHA: f64 = 0.05;

/// Declarative description of a data subset and its cleaning steps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PartitionSpec {
    pub name: String,
    pub year_min: Option<i32>,
    pub categorical_filters: Vec<(CategoricalField, String)>,
    pub apply_iqr_filter: bool,
    pub iqr_field: NumericField,
    pub apply_atypical_filter: bool,
}

impl PartitionSpec {
    /// The whole dataset, no filters and no cleaning.
    pub fn full(name: impl Into<String>) -> Self {
        PartitionSpec { name: name.into(), ..Default::default() }
    }

    pub fn is_full_dataset(&self) -> bool {
        self.year_min.is_none() && self.categorical_filters.is_empty()
    }

    /// The required value of a categorical filter, if the spec has one.
    pub fn filter_value(&self, field: CategoricalField) -> Option<&str> {
        self.categorical_filters
            .iter()
            .find(|(f, _)| *f == field)
            .map(|(_, v)| v.as_str())
    }

    fn check_against(&self, schema: Schema) -> Result<()> {
        for (field, value) in &self.categorical_filters {
            if !schema.has_field(*field) {
                return Err(Error::Config(format!(
                    "partition `{}` filters on `{}`, which schema {schema} does not have",
                    self.name,
                    field.as_str()
                )));
            }
            match field {
                CategoricalField::Mode => {
                    value.parse::<Mode>().map_err(Error::Config)?;
                }
                CategoricalField::Language => {
                    if !matches!(value.as_str(), "1" | "2" | "3") {
                        return Err(Error::Config(format!("language filter must be 1, 2 or 3, got `{value}`")));
                    }
                }
                CategoricalField::Center => {}
            }
        }
        Ok(())
    }
}

/// Parses partition specs: one `key = value` per line, `#` starts a comment,
/// and every `name` line opens a new spec.
pub fn parse_partition_specs(text: &str) -> Result<Vec<PartitionSpec>> {
    let mut specs: Vec<PartitionSpec> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("partition spec line {}: expected `key = value`", lineno + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key == "name" {
            if value.is_empty() {
                return Err(Error::Config(format!("partition spec line {}: empty name", lineno + 1)));
            }
            specs.push(PartitionSpec::full(value));
            continue;
        }
        let spec = specs.last_mut().ok_or_else(|| {
            Error::Config(format!("partition spec line {}: `{key}` before any `name`", lineno + 1))
        })?;
        let bad = |what: &str| Error::Config(format!("partition spec line {}: {what}", lineno + 1));
        match key {
            "year_min" => {
                spec.year_min = Some(value.parse().map_err(|_| bad("year_min must be an integer"))?)
            }
            "center" => spec.categorical_filters.push((CategoricalField::Center, value.to_string())),
            "mode" => spec.categorical_filters.push((CategoricalField::Mode, value.to_string())),
            "language" => spec.categorical_filters.push((CategoricalField::Language, value.to_string())),
            "iqr_filter" => spec.apply_iqr_filter = on_off(value).ok_or_else(|| bad("iqr_filter must be on or off"))?,
            "iqr_field" => spec.iqr_field = value.parse()?,
            "atypical_filter" => {
                spec.apply_atypical_filter = on_off(value).ok_or_else(|| bad("atypical_filter must be on or off"))?
            }
            other => return Err(bad(&format!("unknown key `{other}`"))),
        }
    }
    let mut seen = HashSet::new();
    for s in &specs {
        if !seen.insert(s.name.as_str()) {
            return Err(Error::Config(format!("duplicate partition name `{}`", s.name)));
        }
    }
    Ok(specs)
}

fn on_off(v: &str) -> Option<bool> {
    match v {
        "on" => Some(true),
        "off" => Some(false),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exclusion {
    pub id: String,
    pub rule: String,
    pub reason: String,
}

/// Audit trail of removed records.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExclusionLog {
    pub entries: Vec<Exclusion>,
}

impl ExclusionLog {
    pub fn push(&mut self, id: &str, rule: &str, reason: String) {
        self.entries.push(Exclusion { id: id.to_string(), rule: rule.to_string(), reason });
    }

    pub fn extend(&mut self, other: ExclusionLog) {
        self.entries.extend(other.entries);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.entries.iter().any(|e| e.id == id)
    }

    /// Comma-delimited `id,rule,reason` with a header row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "rule", "reason"]).expect("in-memory write");
        for e in &self.entries {
            w.write_record([&e.id, &e.rule, &e.reason]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }
}

/// Keeps the records matching every filter of `spec` (year and categorical
/// only; cleaning steps are separate).
pub fn apply_partition(dataset: &Dataset, spec: &PartitionSpec) -> Result<(Dataset, ExclusionLog)> {
    spec.check_against(dataset.schema)?;
    let mut log = ExclusionLog::default();
    let (kept, _) = dataset.split_by(|r| match failed_filter(r, spec) {
        Some((rule, reason)) => {
            log.push(&r.id, &rule, reason);
            false
        }
        None => true,
    });
    if kept.is_empty() {
        return Err(Error::EmptyPartition(spec.name.clone()));
    }
    Ok((dataset.subset(kept)?.with_name(dataset.name.clone()), log))
}

fn failed_filter(r: &ProjectRecord, spec: &PartitionSpec) -> Option<(String, String)> {
    if let Some(min) = spec.year_min {
        if r.completion_year < min {
            return Some(("year_min".into(), format!("completed {} before {min}", r.completion_year)));
        }
    }
    for (field, want) in &spec.categorical_filters {
        let have = r.categorical(*field);
        let matches = match (field, have.as_deref()) {
            (CategoricalField::Mode, Some(h)) => want.parse::<Mode>().map(|m| m.as_str() == h).unwrap_or(false),
            (_, Some(h)) => h == want,
            (_, None) => false,
        };
        if !matches {
            return Some((
                field.as_str().into(),
                format!("{} is {} (required {want})", field.as_str(), have.as_deref().unwrap_or("missing")),
            ));
        }
    }
    None
}

/// Five-number summary plus Tukey fences at 1.5 IQR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub lower_fence: f64,
    pub upper_fence: f64,
}

pub const MIN_SUMMARY_RECORDS: usize = 5;

pub fn summarize_values(values: &[f64]) -> Result<DistributionSummary> {
    if values.len() < MIN_SUMMARY_RECORDS {
        return Err(Error::InsufficientData { required: MIN_SUMMARY_RECORDS, available: values.len() });
    }
    let s = sorted(values);
    let q1 = quantile_sorted(&s, 0.25);
    let q3 = quantile_sorted(&s, 0.75);
    let iqr = q3 - q1;
    Ok(DistributionSummary {
        min: s[0],
        q1,
        median: quantile_sorted(&s, 0.5),
        q3,
        max: s[s.len() - 1],
        lower_fence: q1 - 1.5 * iqr,
        upper_fence: q3 + 1.5 * iqr,
    })
}

pub fn summarize_distribution(dataset: &Dataset, field: NumericField) -> Result<DistributionSummary> {
    summarize_values(&dataset.values(field))
}

/// Removes records outside the boxplot whiskers of `field`. The fences are
/// computed once on the input; a second call would recompute them on the
/// reduced data, which the pipeline never does.
pub fn filter_iqr_outliers(dataset: &Dataset, field: NumericField) -> Result<(Dataset, ExclusionLog)> {
    let summary = summarize_distribution(dataset, field)?;
    let mut log = ExclusionLog::default();
    let (kept, _) = dataset.split_by(|r| {
        let v = r.value(field);
        let inside = v >= summary.lower_fence && v <= summary.upper_fence;
        if !inside {
            log.push(
                &r.id,
                "iqr_outlier",
                format!(
                    "{} {v} outside whiskers [{}, {}]",
                    field.as_str(),
                    summary.lower_fence,
                    summary.upper_fence
                ),
            );
        }
        inside
    });
    Ok((dataset.subset(kept)?, log))
}

/// Removes COCOMO81 projects with atypical characteristics:
/// (a) size (KLOC) larger than effort (person-months);
/// (b) productivity (effort / size) above twice the next-highest productivity
///     and above ten times the mean productivity.
///
/// Both rules are evaluated against the input set.
pub fn filter_atypical(dataset: &Dataset) -> Result<(Dataset, ExclusionLog)> {
    if dataset.schema != Schema::Cocomo81 {
        return Err(Error::Config(format!(
            "atypical-project filter is defined for cocomo81 data, not {}",
            dataset.schema
        )));
    }
    let productivity: Vec<f64> = dataset.records().iter().map(ProjectRecord::productivity).collect();
    let extreme = productivity_outlier(&productivity);
    let mut log = ExclusionLog::default();
    let mut i = 0;
    let (kept, _) = dataset.split_by(|r| {
        let idx = i;
        i += 1;
        if r.size > r.effort {
            log.push(&r.id, "size_exceeds_effort", format!("size {} exceeds effort {}", r.size, r.effort));
            return false;
        }
        match extreme {
            Some((j, next, m)) if j == idx => {
                log.push(
                    &r.id,
                    "productivity_outlier",
                    format!(
                        "productivity {} exceeds twice the next highest ({next}) and ten times the mean ({m})",
                        productivity[idx]
                    ),
                );
                false
            }
            _ => true,
        }
    });
    Ok((dataset.subset(kept)?, log))
}

/// Index of the record firing rule (b), with the next-highest and mean
/// productivities. At most one record can fire.
fn productivity_outlier(productivity: &[f64]) -> Option<(usize, f64, f64)> {
    if productivity.len() < 2 {
        return None;
    }
    let (top, &max) = productivity
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    let next = productivity
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != top)
        .map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    let m = mean(productivity);
    (max > 2.0 * next && max > 10.0 * m).then_some((top, next, m))
}

/// Partition plus the cleaning steps its spec enables, in the order
/// categorical/year filters, atypical-project rules, boxplot fences.
pub fn prepare_partition(dataset: &Dataset, spec: &PartitionSpec) -> Result<(Dataset, ExclusionLog)> {
    let (mut current, mut log) = apply_partition(dataset, spec)?;
    if spec.apply_atypical_filter {
        let (next, more) = filter_atypical(&current).map_err(|e| rename_empty(e, spec))?;
        current = next;
        log.extend(more);
    }
    if spec.apply_iqr_filter {
        let (next, more) = filter_iqr_outliers(&current, spec.iqr_field).map_err(|e| rename_empty(e, spec))?;
        current = next;
        log.extend(more);
    }
    Ok((current, log))
}

fn rename_empty(e: Error, spec: &PartitionSpec) -> Error {
    match e {
        Error::EmptyPartition(_) => Error::EmptyPartition(spec.name.clone()),
        other => other,
    }
}

/// Two-sided Mann-Whitney comparison of a partition against the records of
/// `dataset` outside it. `None` when the complement is empty.
pub fn compare_with_rest(dataset: &Dataset, part: &Dataset, field: NumericField) -> Result<Option<TestResult>> {
    let ids: HashSet<&str> = part.records().iter().map(|r| r.id.as_str()).collect();
    let rest: Vec<f64> = dataset
        .records()
        .iter()
        .filter(|r| !ids.contains(r.id.as_str()))
        .map(|r| r.value(field))
        .collect();
    if rest.is_empty() {
        return Ok(None);
    }
    mann_whitney_u(&part.values(field), &rest).map(Some)
}

/// Human-readable grouping report: five-number summaries of effort and size
/// and the Mann-Whitney comparison against the rest of the dataset.
pub fn grouping_report(dataset: &Dataset, part: &Dataset, partition: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "field,min,q1,median,q3,max,lower_fence,upper_fence,mw_statistic,mw_p_value,same_distribution");
    for field in [NumericField::Effort, NumericField::Size] {
        let summary = summarize_distribution(part, field);
        let test = compare_with_rest(dataset, part, field).ok().flatten();
        let cells = match summary {
            Ok(s) => format!("{},{},{},{},{},{},{}", s.min, s.q1, s.median, s.q3, s.max, s.lower_fence, s.upper_fence),
            Err(_) => ",,,,,,".to_string(),
        };
        let test_cells = match test {
            Some(t) => format!("{},{},{}", t.statistic, t.p_value, t.p_value > GROUPING_ALPHA),
            None => ",,".to_string(),
        };
        let _ = writeln!(out, "{},{cells},{test_cells}", field.as_str());
    }
    log::debug!("grouping report for partition {partition} computed");
    out
}
