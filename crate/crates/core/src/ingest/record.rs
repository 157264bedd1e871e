use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Names of the fifteen COCOMO81 effort multipliers, in file column order.
pub const EFFORT_MULTIPLIERS: [&str; 15] = [
    "rely", "data", "cplx", "time", "stor", "virt", "turn", "acap", "aexp", "pcap", "vexp", "lexp",
    "modp", "tool", "sced",
];

pub const MIN_YEAR: i32 = 1960;
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Schema {
    Cocomo81,
    FpLanguage,
}

impl Schema {
    pub fn as_str(self) -> &'static str {
        match self {
            Schema::Cocomo81 => "cocomo81",
            Schema::FpLanguage => "fp_language",
        }
    }

    pub fn size_unit(self) -> &'static str {
        match self {
            Schema::Cocomo81 => "KLOC",
            Schema::FpLanguage => "adjusted function points",
        }
    }

    pub fn effort_unit(self) -> &'static str {
        match self {
            Schema::Cocomo81 => "person-months",
            Schema::FpLanguage => "person-hours",
        }
    }

    /// Whether a categorical field can be filtered on under this schema.
    pub fn has_field(self, field: CategoricalField) -> bool {
        matches!(
            (self, field),
            (Schema::Cocomo81, CategoricalField::Center)
                | (Schema::Cocomo81, CategoricalField::Mode)
                | (Schema::FpLanguage, CategoricalField::Language)
        )
    }
}

impl FromStr for Schema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "cocomo81" => Ok(Schema::Cocomo81),
            "fp_language" => Ok(Schema::FpLanguage),
            other => Err(Error::Config(format!(
                "unknown schema `{other}` (expected cocomo81 or fp_language)"
            ))),
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// COCOMO81 development mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Organic,
    Semidetached,
    Embedded,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Organic => "organic",
            Mode::Semidetached => "semidetached",
            Mode::Embedded => "embedded",
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "organic" => Ok(Mode::Organic),
            "semidetached" | "semi-detached" => Ok(Mode::Semidetached),
            "embedded" => Ok(Mode::Embedded),
            other => Err(format!("unknown development mode `{other}`")),
        }
    }
}

/// Categorical attributes a partition may filter on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CategoricalField {
    Center,
    Mode,
    Language,
}

impl CategoricalField {
    pub fn as_str(self) -> &'static str {
        match self {
            CategoricalField::Center => "center",
            CategoricalField::Mode => "mode",
            CategoricalField::Language => "language",
        }
    }
}

/// Numeric field used for distribution summaries and boxplot fences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum NumericField {
    #[default]
    Effort,
    Size,
}

impl NumericField {
    pub fn as_str(self) -> &'static str {
        match self {
            NumericField::Effort => "effort",
            NumericField::Size => "size",
        }
    }
}

impl FromStr for NumericField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "effort" => Ok(NumericField::Effort),
            "size" => Ok(NumericField::Size),
            other => Err(Error::Config(format!(
                "unknown numeric field `{other}` (expected effort or size)"
            ))),
        }
    }
}

/// The fifteen COCOMO81 effort multipliers of one project, in
/// [`EFFORT_MULTIPLIERS`] order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffortMultipliers(pub [f64; 15]);

impl EffortMultipliers {
    pub fn get(&self, name: &str) -> Option<f64> {
        EFFORT_MULTIPLIERS
            .iter()
            .position(|n| *n == name)
            .map(|i| self.0[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        EFFORT_MULTIPLIERS.iter().copied().zip(self.0.iter().copied())
    }
}

/// One completed project.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectRecord {
    pub id: String,
    pub completion_year: i32,
    /// KLOC (cocomo81) or adjusted function points (fp_language).
    pub size: f64,
    /// Person-months (cocomo81) or person-hours (fp_language).
    pub effort: f64,
    pub mode: Option<Mode>,
    pub center: Option<String>,
    pub language: Option<u8>,
    pub app_type: Option<String>,
    pub effort_multipliers: Option<EffortMultipliers>,
}

impl ProjectRecord {
    pub fn value(&self, field: NumericField) -> f64 {
        match field {
            NumericField::Effort => self.effort,
            NumericField::Size => self.size,
        }
    }

    /// Effort per unit of size.
    pub fn productivity(&self) -> f64 {
        self.effort / self.size
    }

    /// String form of a categorical attribute, if the record carries it.
    pub fn categorical(&self, field: CategoricalField) -> Option<String> {
        match field {
            CategoricalField::Center => self.center.clone(),
            CategoricalField::Mode => self.mode.map(|m| m.as_str().to_string()),
            CategoricalField::Language => self.language.map(|l| l.to_string()),
        }
    }

    fn validate(&self, schema: Schema) -> Result<()> {
        let fail = |message: String| Error::Validation { id: self.id.clone(), message };
        if self.id.is_empty() {
            return Err(fail("empty id".into()));
        }
        if self.id.contains(';') {
            return Err(fail("id must not contain `;`".into()));
        }
        if !(self.size.is_finite() && self.size > 0.0) {
            return Err(fail(format!("size must be positive, got {}", self.size)));
        }
        if !(self.effort.is_finite() && self.effort > 0.0) {
            return Err(fail(format!("effort must be positive, got {}", self.effort)));
        }
        if !(MIN_YEAR..=MAX_YEAR).contains(&self.completion_year) {
            return Err(fail(format!(
                "completion year {} outside [{MIN_YEAR}, {MAX_YEAR}]",
                self.completion_year
            )));
        }
        match (schema, &self.effort_multipliers) {
            (Schema::Cocomo81, None) => {
                return Err(fail("cocomo81 records require all 15 effort multipliers".into()))
            }
            (Schema::FpLanguage, Some(_)) => {
                return Err(fail("fp_language records carry no effort multipliers".into()))
            }
            (Schema::Cocomo81, Some(em)) => {
                if let Some((name, v)) = em.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
                    return Err(fail(format!("effort multiplier {name} must be positive, got {v}")));
                }
            }
            (Schema::FpLanguage, None) => {}
        }
        if let Some(lang) = self.language {
            if !(1..=3).contains(&lang) {
                return Err(fail(format!("language level {lang} outside {{1,2,3}}")));
            }
        }
        Ok(())
    }
}

/// Numeric-aware id ordering: ids that parse as integers sort numerically
/// and before non-numeric ids, which sort lexicographically.
pub fn compare_ids(a: &str, b: &str) -> Ordering {
    match (a.parse::<i64>(), b.parse::<i64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

fn record_order(a: &ProjectRecord, b: &ProjectRecord) -> Ordering {
    a.completion_year
        .cmp(&b.completion_year)
        .then_with(|| compare_ids(&a.id, &b.id))
}

/// A schema-tagged collection of projects, ordered by (completion year, id).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub schema: Schema,
    pub size_unit: String,
    pub effort_unit: String,
    records: Vec<ProjectRecord>,
}

impl Dataset {
    /// Validates every record against the schema, rejects duplicate ids and
    /// sorts by (completion year, id).
    pub fn new(name: impl Into<String>, schema: Schema, mut records: Vec<ProjectRecord>) -> Result<Self> {
        let name = name.into();
        if records.is_empty() {
            return Err(Error::EmptyPartition(name));
        }
        for r in &records {
            r.validate(schema)?;
        }
        records.sort_by(record_order);
        for pair in records.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::Validation {
                    id: pair[0].id.clone(),
                    message: "duplicate id".into(),
                });
            }
        }
        // Ids may repeat across years; the sort above only catches neighbours.
        let mut ids: Vec<&str> = records.iter().map(|r| r.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(dup) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Validation {
                id: dup[0].to_string(),
                message: "duplicate id".into(),
            });
        }
        Ok(Dataset {
            name,
            schema,
            size_unit: schema.size_unit().to_string(),
            effort_unit: schema.effort_unit().to_string(),
            records,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn records(&self) -> &[ProjectRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&ProjectRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    /// Distinct completion years with their project counts, ascending.
    pub fn year_counts(&self) -> Vec<(i32, usize)> {
        let mut out: Vec<(i32, usize)> = Vec::new();
        for r in &self.records {
            match out.last_mut() {
                Some((y, c)) if *y == r.completion_year => *c += 1,
                _ => out.push((r.completion_year, 1)),
            }
        }
        out
    }

    pub fn values(&self, field: NumericField) -> Vec<f64> {
        self.records.iter().map(|r| r.value(field)).collect()
    }

    /// Keeps the records matching `keep`, preserving order. The result may be
    /// empty, so it is returned as a bare record list.
    pub(crate) fn split_by(&self, mut keep: impl FnMut(&ProjectRecord) -> bool) -> (Vec<ProjectRecord>, Vec<ProjectRecord>) {
        self.records.iter().cloned().partition(|r| keep(r))
    }

    /// Rebuilds a dataset of the same name and schema from an already
    /// validated, already ordered subset.
    pub(crate) fn subset(&self, records: Vec<ProjectRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyPartition(self.name.clone()));
        }
        Ok(Dataset {
            name: self.name.clone(),
            schema: self.schema,
            size_unit: self.size_unit.clone(),
            effort_unit: self.effort_unit.clone(),
            records,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(id: &str, year: i32, size: f64, effort: f64, lang: u8) -> ProjectRecord {
        ProjectRecord {
            id: id.into(),
            completion_year: year,
            size,
            effort,
            mode: None,
            center: None,
            language: Some(lang),
            app_type: None,
            effort_multipliers: None,
        }
    }

    #[test]
    fn sorts_by_year_then_numeric_id() {
        let ds = Dataset::new(
            "d",
            Schema::FpLanguage,
            vec![fp("10", 1986, 1.0, 2.0, 1), fp("2", 1986, 1.0, 2.0, 1), fp("7", 1985, 1.0, 2.0, 1)],
        )
        .unwrap();
        let ids: Vec<_> = ds.records().iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["7", "2", "10"]);
        assert_eq!(ds.year_counts(), vec![(1985, 1), (1986, 2)]);
    }

    #[test]
    fn rejects_duplicate_ids_across_years() {
        let err = Dataset::new(
            "d",
            Schema::FpLanguage,
            vec![fp("1", 1985, 1.0, 2.0, 1), fp("2", 1986, 1.0, 2.0, 1), fp("1", 1987, 1.0, 2.0, 1)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation { ref id, .. } if id == "1"));
    }

    #[test]
    fn rejects_em_on_fp_schema_and_missing_em_on_cocomo() {
        let mut r = fp("1", 1985, 1.0, 2.0, 1);
        r.effort_multipliers = Some(EffortMultipliers([1.0; 15]));
        assert!(Dataset::new("d", Schema::FpLanguage, vec![r.clone()]).is_err());
        r.effort_multipliers = None;
        r.language = None;
        assert!(Dataset::new("d", Schema::Cocomo81, vec![r]).is_err());
    }

    #[test]
    fn year_bounds() {
        assert!(Dataset::new("d", Schema::FpLanguage, vec![fp("1", 1959, 1.0, 2.0, 1)]).is_err());
        assert!(Dataset::new("d", Schema::FpLanguage, vec![fp("1", 2100, 1.0, 2.0, 1)]).is_ok());
    }

    #[test]
    fn unknown_schema_is_config_error() {
        assert!(matches!("arff".parse::<Schema>(), Err(Error::Config(_))));
    }
}
