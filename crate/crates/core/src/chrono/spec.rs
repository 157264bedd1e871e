use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ingest::{Schema, EFFORT_MULTIPLIERS};
use crate::statkit::DEFAULT_ALPHA_REMOVE;

/// Regression form, always fitted on ln(effort).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelForm {
    /// ln(effort) ~ ln(KLOC) + ln(EM_1) + ... + ln(EM_15)
    Cocomo,
    /// ln(effort) ~ ln(size) + language dummies
    FpDummy,
    /// ln(effort) ~ ln(size)
    FpSizeOnly,
}

impl ModelForm {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelForm::Cocomo => "cocomo",
            ModelForm::FpDummy => "fp_dummy",
            ModelForm::FpSizeOnly => "fp_size_only",
        }
    }

    pub fn schema(self) -> Schema {
        match self {
            ModelForm::Cocomo => Schema::Cocomo81,
            ModelForm::FpDummy | ModelForm::FpSizeOnly => Schema::FpLanguage,
        }
    }

    /// Name of the mandatory size column.
    pub fn size_column(self) -> &'static str {
        match self {
            ModelForm::Cocomo => "ln_kloc",
            ModelForm::FpDummy | ModelForm::FpSizeOnly => "ln_size",
        }
    }
}

impl FromStr for ModelForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "cocomo" => Ok(ModelForm::Cocomo),
            "fp_dummy" => Ok(ModelForm::FpDummy),
            "fp_size_only" => Ok(ModelForm::FpSizeOnly),
            other => Err(Error::Config(format!(
                "unknown model form `{other}` (expected cocomo, fp_dummy or fp_size_only)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Selection {
    BackwardStepwise,
    Fixed,
}

/// How a fold's regression model is specified and fitted.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub form: ModelForm,
    pub selection: Selection,
    /// Language level absorbed into the intercept for `FpDummy`.
    pub dummy_reference: u8,
    pub influence_filter: bool,
    pub alpha_remove: f64,
    /// Cook's distance cutoff; `None` means 4/n.
    pub cooks_threshold: Option<f64>,
    /// Significance level of the Shapiro-Wilk gate on training effort.
    pub normality_alpha: f64,
}

impl ModelSpec {
    pub fn new(form: ModelForm) -> Self {
        ModelSpec {
            form,
            selection: match form {
                ModelForm::Cocomo => Selection::BackwardStepwise,
                ModelForm::FpDummy | ModelForm::FpSizeOnly => Selection::Fixed,
            },
            dummy_reference: 1,
            influence_filter: true,
            alpha_remove: DEFAULT_ALPHA_REMOVE,
            cooks_threshold: None,
            normality_alpha: 0.05,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let expected = ModelSpec::new(self.form).selection;
        if self.selection != expected {
            return Err(Error::Config(format!(
                "model form {} requires {:?} selection",
                self.form.as_str(),
                expected
            )));
        }
        if !(1..=3).contains(&self.dummy_reference) {
            return Err(Error::Config(format!("dummy reference level must be 1, 2 or 3, got {}", self.dummy_reference)));
        }
        if !(self.alpha_remove > 0.0 && self.alpha_remove < 1.0) {
            return Err(Error::Config(format!("alpha_remove must lie in (0, 1), got {}", self.alpha_remove)));
        }
        if let Some(t) = self.cooks_threshold {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Config(format!("Cook's distance threshold must be positive, got {t}")));
            }
        }
        Ok(())
    }

    /// Candidate explanatory columns, in design order (intercept excluded).
    pub fn candidate_columns(&self) -> Vec<String> {
        let mut cols = vec![self.form.size_column().to_string()];
        match self.form {
            ModelForm::Cocomo => cols.extend(EFFORT_MULTIPLIERS.iter().map(|m| format!("ln_{m}"))),
            ModelForm::FpDummy => cols.extend(self.dummy_levels().map(|l| format!("lang{l}"))),
            ModelForm::FpSizeOnly => {}
        }
        cols
    }

    pub(crate) fn dummy_levels(&self) -> impl Iterator<Item = u8> + '_ {
        (1..=3u8).filter(move |l| *l != self.dummy_reference)
    }

    pub fn n_explanatory(&self) -> usize {
        self.candidate_columns().len()
    }

    /// Smallest training set for a well-formed model: explanatory columns + 2.
    pub fn min_training(&self) -> usize {
        self.n_explanatory() + 2
    }
}

/// Model-building approach.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Approach {
    Tasa,
    Tamw,
    Loo,
    Mean,
    Median,
}

impl Approach {
    pub const ALL: [Approach; 5] = [Approach::Tasa, Approach::Tamw, Approach::Loo, Approach::Mean, Approach::Median];

    pub fn as_str(self) -> &'static str {
        match self {
            Approach::Tasa => "tasa",
            Approach::Tamw => "tamw",
            Approach::Loo => "loo",
            Approach::Mean => "mean",
            Approach::Median => "median",
        }
    }

    /// Whether folds of this approach fit a regression model.
    pub fn fits_model(self) -> bool {
        matches!(self, Approach::Tasa | Approach::Tamw | Approach::Loo)
    }

    /// Whether training data must predate the test year.
    pub fn is_past_only(self) -> bool {
        self != Approach::Loo
    }
}

impl FromStr for Approach {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "tasa" => Ok(Approach::Tasa),
            "tamw" => Ok(Approach::Tamw),
            "loo" => Ok(Approach::Loo),
            "mean" => Ok(Approach::Mean),
            "median" => Ok(Approach::Median),
            other => Err(Error::Config(format!(
                "unknown approach `{other}` (expected tasa, tamw, loo, mean or median)"
            ))),
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
