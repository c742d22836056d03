//! Column stratum/subtype inference.
//!
//! Rules are applied in order to the trimmed non-missing values of a column:
//!
//! 1. an override for the column name wins;
//! 2. exactly two distinct values forming a true/false pair from
//!    `{t,f,true,false,T,F,TRUE,FALSE,0,1}` → nominal boolean;
//! 3. at least 95% ISO-8601 or `MM/DD/YYYY` dates → ordinal date;
//! 4. at least 95% numeric:
//!    - any non-integer → continuous number,
//!    - all integers in `[1500, 2500]` with at most 30 distinct → ordinal date (years),
//!    - at most 20 distinct with a range of at most 1000 → discrete number,
//!    - otherwise ordinal number (identifiers, sequences);
//! 5. anything else → nominal string.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stratum {
    Ordinal,
    Nominal,
    Continuous,
    Discrete,
}

impl Stratum {
    pub fn is_numeric(self) -> bool {
        matches!(self, Stratum::Continuous | Stratum::Discrete)
    }

    pub fn is_categorical(self) -> bool {
        !self.is_numeric()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stratum::Ordinal => "ordinal",
            Stratum::Nominal => "nominal",
            Stratum::Continuous => "continuous",
            Stratum::Discrete => "discrete",
        }
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subtype {
    Number,
    String,
    Date,
    Boolean,
}

impl Subtype {
    pub fn as_str(self) -> &'static str {
        match self {
            Subtype::Number => "number",
            Subtype::String => "string",
            Subtype::Date => "date",
            Subtype::Boolean => "boolean",
        }
    }
}

impl fmt::Display for Subtype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    #[default]
    Inferred,
    Override,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawKind")]
pub struct ColumnKind {
    pub stratum: Stratum,
    pub subtype: Subtype,
    pub origin: Origin,
}

#[derive(Deserialize)]
struct RawKind {
    stratum: Stratum,
    subtype: Subtype,
    #[serde(default)]
    origin: Origin,
}

impl TryFrom<RawKind> for ColumnKind {
    type Error = Error;

    fn try_from(raw: RawKind) -> Result<Self> {
        ColumnKind::new(raw.stratum, raw.subtype, raw.origin)
    }
}

impl ColumnKind {
    pub fn new(stratum: Stratum, subtype: Subtype, origin: Origin) -> Result<Self> {
        if stratum.is_numeric() && subtype != Subtype::Number {
            return Err(Error::InvalidKind(format!(
                "{stratum} requires subtype number, got {subtype}"
            )));
        }
        if subtype == Subtype::Boolean && stratum != Stratum::Nominal {
            return Err(Error::InvalidKind(format!(
                "boolean requires stratum nominal, got {stratum}"
            )));
        }
        Ok(Self {
            stratum,
            subtype,
            origin,
        })
    }

    const fn inferred(stratum: Stratum, subtype: Subtype) -> Self {
        Self {
            stratum,
            subtype,
            origin: Origin::Inferred,
        }
    }
}

impl fmt::Display for ColumnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.stratum, self.subtype)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inference {
    pub kind: ColumnKind,
    pub warning: Option<String>,
}

const TRUE_TOKENS: [&str; 5] = ["t", "true", "T", "TRUE", "1"];
const FALSE_TOKENS: [&str; 5] = ["f", "false", "F", "FALSE", "0"];

/// Parses a trimmed cell as a finite number.
pub fn parse_number(raw: &str) -> Option<f64> {
    raw.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

fn is_integer(raw: &str) -> bool {
    raw.trim().parse::<i64>().is_ok()
}

fn is_date(s: &str) -> bool {
    const DATE_FORMATS: [&str; 2] = ["%Y-%m-%d", "%m/%d/%Y"];
    const DATETIME_FORMATS: [&str; 2] = ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"];
    DATE_FORMATS
        .iter()
        .any(|f| NaiveDate::parse_from_str(s, f).is_ok())
        || DATETIME_FORMATS
            .iter()
            .any(|f| NaiveDateTime::parse_from_str(s, f).is_ok())
        || DateTime::parse_from_rfc3339(s).is_ok()
}

fn at_least_95pct(hits: usize, total: usize) -> bool {
    hits * 100 >= total * 95
}

/// Classifies one column. Pure in its inputs.
pub fn infer_column_kind<'a, I>(
    column: I,
    name: &str,
    overrides: &BTreeMap<String, ColumnKind>,
) -> Inference
where
    I: IntoIterator<Item = (&'a str, bool)>,
{
    if let Some(kind) = overrides.get(name) {
        return Inference {
            kind: ColumnKind {
                origin: Origin::Override,
                ..*kind
            },
            warning: None,
        };
    }

    let values: Vec<&str> = column
        .into_iter()
        .filter(|(_, missing)| !missing)
        .map(|(raw, _)| raw.trim())
        .collect();
    if values.is_empty() {
        return Inference {
            kind: ColumnKind::inferred(Stratum::Nominal, Subtype::String),
            warning: Some(format!(
                "column {name:?} has no non-missing values; classified as nominal(string)"
            )),
        };
    }
    Inference {
        kind: classify(&values),
        warning: None,
    }
}

/// Infers every column of `table`, returning kinds in column order plus any
/// warnings. Overrides naming columns absent from the table are rejected.
pub fn infer_kinds(
    table: &crate::DataTable,
    overrides: &BTreeMap<String, ColumnKind>,
) -> Result<(Vec<ColumnKind>, Vec<String>)> {
    if let Some(unknown) = overrides.keys().find(|k| table.column_index(k).is_none()) {
        return Err(Error::UnknownColumn(unknown.clone()));
    }
    let mut kinds = Vec::with_capacity(table.column_count());
    let mut warnings = Vec::new();
    for (i, name) in table.columns().iter().enumerate() {
        let inf = infer_column_kind(table.column(i), name, overrides);
        warnings.extend(inf.warning);
        kinds.push(inf.kind);
    }
    Ok((kinds, warnings))
}

fn classify(values: &[&str]) -> ColumnKind {
    let distinct: BTreeSet<&str> = values.iter().copied().collect();

    if distinct.len() == 2 {
        let mut it = distinct.iter();
        let (a, b) = (it.next().unwrap(), it.next().unwrap());
        let truthy = |s: &&str| TRUE_TOKENS.contains(s);
        let falsy = |s: &&str| FALSE_TOKENS.contains(s);
        if (truthy(a) && falsy(b)) || (falsy(a) && truthy(b)) {
            return ColumnKind::inferred(Stratum::Nominal, Subtype::Boolean);
        }
    }

    let n = values.len();
    if at_least_95pct(values.iter().filter(|v| is_date(v)).count(), n) {
        return ColumnKind::inferred(Stratum::Ordinal, Subtype::Date);
    }

    let numeric: Vec<(&str, f64)> = values
        .iter()
        .filter_map(|v| parse_number(v).map(|x| (*v, x)))
        .collect();
    if at_least_95pct(numeric.len(), n) {
        if !numeric.iter().all(|(raw, _)| is_integer(raw)) {
            return ColumnKind::inferred(Stratum::Continuous, Subtype::Number);
        }
        let unique: BTreeSet<i64> = numeric.iter().map(|(raw, _)| raw.parse().unwrap()).collect();
        let (min, max) = (*unique.first().unwrap(), *unique.last().unwrap());
        if min >= 1500 && max <= 2500 && unique.len() <= 30 {
            return ColumnKind::inferred(Stratum::Ordinal, Subtype::Date);
        }
        if unique.len() <= 20 && (max as i128 - min as i128) <= 1000 {
            return ColumnKind::inferred(Stratum::Discrete, Subtype::Number);
        }
        return ColumnKind::inferred(Stratum::Ordinal, Subtype::Number);
    }

    ColumnKind::inferred(Stratum::Nominal, Subtype::String)
}
