use std::collections::HashMap;

use csv::{ReaderBuilder, StringRecord, Trim};

use super::record::{Dataset, EffortMultipliers, ProjectRecord, Schema, EFFORT_MULTIPLIERS};
use crate::error::{Error, Result};

const COCOMO_BASE_COLUMNS: [&str; 6] = ["id", "year", "center", "mode", "kloc", "effort_pm"];
const FP_COLUMNS: [&str; 5] = ["id", "year_end", "effort_hours", "points_adjust", "language"];

/// Column names the schema requires, in canonical order.
pub fn required_columns(schema: Schema) -> Vec<&'static str> {
    match schema {
        Schema::Cocomo81 => COCOMO_BASE_COLUMNS
            .iter()
            .chain(EFFORT_MULTIPLIERS.iter())
            .copied()
            .collect(),
        Schema::FpLanguage => FP_COLUMNS.to_vec(),
    }
}

/// Parses a header-bearing comma-separated file into a [`Dataset`].
///
/// Columns are matched by exact header name; unknown extra columns are
/// ignored with a warning. Rows with empty fields are rejected. Two-digit
/// years (as in the Desharnais `YearEnd` attribute) are read as 19xx.
pub fn load_dataset(text: &str, schema: Schema) -> Result<Dataset> {
    let mut reader = ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| Error::Parse { line: 1, message: e.to_string() })?
        .clone();
    let index = column_index(&headers, schema)?;

    let mut records = Vec::new();
    let mut row = StringRecord::new();
    loop {
        let more = reader.read_record(&mut row).map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        if !more {
            break;
        }
        let line = row.position().map_or(0, |p| p.line() as usize);
        if row.len() == 1 && row[0].is_empty() {
            continue;
        }
        if row.len() != headers.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} columns, found {}", headers.len(), row.len()),
            });
        }
        let fields = RowFields { row: &row, index: &index, line };
        records.push(match schema {
            Schema::Cocomo81 => parse_cocomo(&fields)?,
            Schema::FpLanguage => parse_fp(&fields)?,
        });
    }
    Dataset::new("dataset", schema, records)
}

fn column_index(headers: &StringRecord, schema: Schema) -> Result<HashMap<&'static str, usize>> {
    let required = required_columns(schema);
    let mut index = HashMap::new();
    for (i, h) in headers.iter().enumerate() {
        match required.iter().find(|r| **r == h) {
            Some(name) => {
                if index.insert(*name, i).is_some() {
                    return Err(Error::Parse { line: 1, message: format!("duplicate column `{h}`") });
                }
            }
            None => log::warn!("ignoring extra column `{h}` for schema {schema}"),
        }
    }
    let missing: Vec<_> = required.iter().filter(|c| !index.contains_key(*c)).copied().collect();
    if !missing.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: format!("missing required column(s): {}", missing.join(", ")),
        });
    }
    Ok(index)
}

struct RowFields<'a> {
    row: &'a StringRecord,
    index: &'a HashMap<&'static str, usize>,
    line: usize,
}

impl RowFields<'_> {
    fn text(&self, column: &str) -> Result<&str> {
        let value = &self.row[self.index[column]];
        if value.is_empty() {
            return Err(Error::Parse { line: self.line, message: format!("empty field `{column}`") });
        }
        Ok(value)
    }

    fn number(&self, column: &str) -> Result<f64> {
        let raw = self.text(column)?;
        raw.parse::<f64>().map_err(|_| Error::Parse {
            line: self.line,
            message: format!("field `{column}` is not numeric: `{raw}`"),
        })
    }

    fn year(&self, column: &str) -> Result<i32> {
        let raw = self.text(column)?;
        let year = raw
            .parse::<i32>()
            .ok()
            .or_else(|| raw.parse::<f64>().ok().filter(|v| v.fract() == 0.0).map(|v| v as i32))
            .ok_or_else(|| Error::Parse {
                line: self.line,
                message: format!("field `{column}` is not an integer year: `{raw}`"),
            })?;
        Ok(if (0..100).contains(&year) { 1900 + year } else { year })
    }
}

fn parse_cocomo(f: &RowFields<'_>) -> Result<ProjectRecord> {
    let id = f.text("id")?.to_string();
    let mode = f.text("mode")?.parse().map_err(|message| Error::Parse { line: f.line, message })?;
    let mut em = [0.0; 15];
    for (slot, name) in em.iter_mut().zip(EFFORT_MULTIPLIERS) {
        *slot = f.number(name)?;
    }
    Ok(ProjectRecord {
        id,
        completion_year: f.year("year")?,
        size: f.number("kloc")?,
        effort: f.number("effort_pm")?,
        mode: Some(mode),
        center: Some(f.text("center")?.to_string()),
        language: None,
        app_type: None,
        effort_multipliers: Some(EffortMultipliers(em)),
    })
}

fn parse_fp(f: &RowFields<'_>) -> Result<ProjectRecord> {
    let id = f.text("id")?.to_string();
    let language = f.number("language")?;
    if language.fract() != 0.0 || !(1.0..=3.0).contains(&language) {
        return Err(Error::Validation {
            id,
            message: format!("language must be 1, 2 or 3, got {language}"),
        });
    }
    Ok(ProjectRecord {
        id,
        completion_year: f.year("year_end")?,
        size: f.number("points_adjust")?,
        effort: f.number("effort_hours")?,
        mode: None,
        center: None,
        language: Some(language as u8),
        app_type: None,
        effort_multipliers: None,
    })
}
