//! Per-column summaries grouped by stratum.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::percent;
use crate::kind::{parse_number, ColumnKind, Stratum, Subtype};
use crate::table::DataTable;

pub const MISSING_DISPLAY: &str = "missing value";
pub const TIE_DISPLAY: &str = "multiple detected";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyKind {
    Value,
    MissingPseudo,
    Tie,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyCell {
    pub kind: FrequencyKind,
    pub display: String,
    pub value: Option<String>,
    pub frequency: Option<u64>,
}

impl FrequencyCell {
    fn value(raw: &str, frequency: u64) -> Self {
        Self {
            kind: FrequencyKind::Value,
            display: format!("{raw} ({frequency})"),
            value: Some(raw.to_string()),
            frequency: Some(frequency),
        }
    }

    fn missing(frequency: u64) -> Self {
        Self {
            kind: FrequencyKind::MissingPseudo,
            display: format!("{MISSING_DISPLAY} ({frequency})"),
            value: None,
            frequency: Some(frequency),
        }
    }

    fn tie() -> Self {
        Self {
            kind: FrequencyKind::Tie,
            display: TIE_DISPLAY.to_string(),
            value: None,
            frequency: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoricalProfile {
    pub name: String,
    pub subtype: Subtype,
    pub count: u64,
    pub unique_entries: u64,
    pub unique_includes_missing: bool,
    pub most_frequent: FrequencyCell,
    pub least_frequent: FrequencyCell,
    pub missing_count: u64,
    pub missing_pct: String,
    pub missing_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericProfile {
    pub name: String,
    pub subtype: Subtype,
    pub count: u64,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator); absent below two values.
    pub standard_deviation: Option<f64>,
    pub missing_count: u64,
    pub missing_pct: String,
    pub missing_fraction: f64,
    pub zeros_count: u64,
    pub zeros_pct: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatisticsPayload {
    pub ordinal: Vec<CategoricalProfile>,
    pub nominal: Vec<CategoricalProfile>,
    pub continuous: Vec<NumericProfile>,
    pub discrete: Vec<NumericProfile>,
}

impl StatisticsPayload {
    pub fn len(&self) -> usize {
        self.ordinal.len() + self.nominal.len() + self.continuous.len() + self.discrete.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetMissing {
    pub missing_cells: u64,
    pub total_cells: u64,
}

impl DatasetMissing {
    pub fn fraction(&self) -> f64 {
        if self.total_cells == 0 {
            0.0
        } else {
            self.missing_cells as f64 / self.total_cells as f64
        }
    }

    /// One-decimal display, e.g. `5.2%`.
    pub fn pct(&self) -> String {
        percent(self.missing_cells, self.total_cells, 1)
    }
}

fn missing_fraction(missing: u64, count: u64) -> f64 {
    missing as f64 / count as f64
}

/// Picks the extreme entry by `better`. Several values sharing the extreme
/// frequency yield a tie cell. The missing pseudo-entry is chosen only when
/// it is strictly more extreme than every value.
fn extreme(values: &[(&str, u64)], missing: u64, better: impl Fn(u64, u64) -> bool) -> FrequencyCell {
    let mut best: Option<(&str, u64)> = None;
    let mut tied = false;
    for &(v, n) in values {
        match best {
            Some((_, b)) if n == b => tied = true,
            Some((_, b)) if !better(n, b) => {}
            _ => {
                best = Some((v, n));
                tied = false;
            }
        }
    }
    match best {
        Some((_, b)) if missing > 0 && better(missing, b) => FrequencyCell::missing(missing),
        None => FrequencyCell::missing(missing),
        Some(_) if tied => FrequencyCell::tie(),
        Some((v, n)) => FrequencyCell::value(v, n),
    }
}

pub fn profile_categorical<'a, I>(name: &str, column: I, kind: ColumnKind) -> Result<CategoricalProfile>
where
    I: IntoIterator<Item = (&'a str, bool)>,
{
    if kind.stratum.is_numeric() {
        return Err(Error::WrongStratum {
            column: name.to_string(),
            stratum: kind.stratum.to_string(),
            expected: "ordinal or nominal",
        });
    }
    let mut freq: HashMap<&str, u64> = HashMap::new();
    let mut count = 0u64;
    let mut missing = 0u64;
    for (raw, is_missing) in column {
        count += 1;
        if is_missing {
            missing += 1;
        } else {
            *freq.entry(raw).or_default() += 1;
        }
    }
    if count == 0 {
        return Err(Error::EmptyColumn(name.to_string()));
    }

    let mut values: Vec<(&str, u64)> = freq.into_iter().collect();
    values.sort_unstable();
    let unique = values.len() as u64 + u64::from(missing > 0);

    Ok(CategoricalProfile {
        name: name.to_string(),
        subtype: kind.subtype,
        count,
        unique_entries: unique,
        unique_includes_missing: missing > 0,
        most_frequent: extreme(&values, missing, |a, b| a > b),
        least_frequent: extreme(&values, missing, |a, b| a < b),
        missing_count: missing,
        missing_pct: percent(missing, count, 2),
        missing_fraction: missing_fraction(missing, count),
    })
}

/// `row` in errors is the 1-based record number with the header as record 1.
pub fn numeric_values<'a, I>(name: &str, column: I) -> Result<(Vec<f64>, u64)>
where
    I: IntoIterator<Item = (&'a str, bool)>,
{
    let mut values = Vec::new();
    let mut missing = 0;
    for (i, (raw, is_missing)) in column.into_iter().enumerate() {
        if is_missing {
            missing += 1;
            continue;
        }
        match parse_number(raw) {
            Some(v) => values.push(v),
            None => {
                return Err(Error::NotNumeric {
                    column: name.to_string(),
                    row: i + 2,
                    value: raw.to_string(),
                })
            }
        }
    }
    Ok((values, missing))
}

pub fn median_of_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn sample_std(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|x| (x - m) * (x - m)).sum();
    Some((ss / (values.len() - 1) as f64).sqrt())
}

pub fn profile_numeric<'a, I>(name: &str, column: I, kind: ColumnKind) -> Result<NumericProfile>
where
    I: IntoIterator<Item = (&'a str, bool)>,
{
    if !kind.stratum.is_numeric() {
        return Err(Error::WrongStratum {
            column: name.to_string(),
            stratum: kind.stratum.to_string(),
            expected: "continuous or discrete",
        });
    }
    let (mut values, missing) = numeric_values(name, column)?;
    if values.is_empty() {
        return Err(Error::AllMissing(name.to_string()));
    }
    values.sort_by(f64::total_cmp);
    let count = values.len() as u64 + missing;
    let zeros = values.iter().filter(|v| **v == 0.0).count() as u64;

    Ok(NumericProfile {
        name: name.to_string(),
        subtype: kind.subtype,
        count,
        min: values[0],
        median: median_of_sorted(&values),
        max: values[values.len() - 1],
        mean: mean(&values),
        standard_deviation: sample_std(&values),
        missing_count: missing,
        missing_pct: percent(missing, count, 2),
        missing_fraction: missing_fraction(missing, count),
        zeros_count: zeros,
        zeros_pct: percent(zeros, values.len() as u64, 2),
    })
}

enum Profile {
    Categorical(CategoricalProfile),
    Numeric(NumericProfile),
}

/// Profiles every column in parallel and routes each to its stratum list,
/// preserving column order within each list.
pub fn profile_dataset(
    table: &DataTable,
    kinds: &[ColumnKind],
) -> Result<(StatisticsPayload, DatasetMissing)> {
    if kinds.len() != table.column_count() {
        return Err(Error::InvalidOption(format!(
            "{} column kinds supplied for {} columns",
            kinds.len(),
            table.column_count()
        )));
    }
    let profiles: Vec<(Stratum, Profile)> = (0..table.column_count())
        .into_par_iter()
        .map(|i| {
            let name = &table.columns()[i];
            let kind = kinds[i];
            let p = if kind.stratum.is_numeric() {
                Profile::Numeric(profile_numeric(name, table.column(i), kind)?)
            } else {
                Profile::Categorical(profile_categorical(name, table.column(i), kind)?)
            };
            Ok((kind.stratum, p))
        })
        .collect::<Result<_>>()?;

    let mut payload = StatisticsPayload::default();
    for (stratum, profile) in profiles {
        match (stratum, profile) {
            (Stratum::Ordinal, Profile::Categorical(p)) => payload.ordinal.push(p),
            (Stratum::Nominal, Profile::Categorical(p)) => payload.nominal.push(p),
            (Stratum::Continuous, Profile::Numeric(p)) => payload.continuous.push(p),
            (Stratum::Discrete, Profile::Numeric(p)) => payload.discrete.push(p),
            _ => unreachable!("profile routed by stratum"),
        }
    }
    let missing = DatasetMissing {
        missing_cells: table.missing_count() as u64,
        total_cells: (table.row_count() * table.column_count()) as u64,
    };
    Ok((payload, missing))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kind::Origin;

    fn nominal() -> ColumnKind {
        ColumnKind::new(Stratum::Nominal, Subtype::String, Origin::Inferred).unwrap()
    }

    fn continuous() -> ColumnKind {
        ColumnKind::new(Stratum::Continuous, Subtype::Number, Origin::Inferred).unwrap()
    }

    fn cells<'a>(v: &'a [&'a str]) -> impl Iterator<Item = (&'a str, bool)> + 'a {
        v.iter().map(|s| (*s, *s == "NA"))
    }

    #[test]
    fn categorical_hand_tally() {
        let p = profile_categorical("c", cells(&["x", "x", "y", "NA"]), nominal()).unwrap();
        assert_eq!(p.count, 4);
        assert_eq!(p.unique_entries, 3);
        assert!(p.unique_includes_missing);
        assert_eq!(p.most_frequent.display, "x (2)");
        assert_eq!(p.least_frequent.display, "y (1)");
        assert_eq!(p.missing_pct, "25.00%");
        assert_eq!(p.missing_count, 1);
    }

    #[test]
    fn categorical_ties() {
        let p = profile_categorical("c", cells(&["a", "a", "b", "b"]), nominal()).unwrap();
        assert_eq!(p.most_frequent.kind, FrequencyKind::Tie);
        assert_eq!(p.most_frequent.display, "multiple detected");
        assert_eq!(p.most_frequent.frequency, None);
        assert_eq!(p.least_frequent.display, "multiple detected");
    }

    #[test]
    fn missing_pseudo_entry_can_win() {
        let p = profile_categorical("c", cells(&["NA", "NA", "a", "b"]), nominal()).unwrap();
        assert_eq!(p.most_frequent.kind, FrequencyKind::MissingPseudo);
        assert_eq!(p.most_frequent.display, "missing value (2)");
        assert_eq!(p.least_frequent.kind, FrequencyKind::Tie);
        // strictly rarer than every value
        let p = profile_categorical("c", cells(&["t", "t", "NA"]), nominal()).unwrap();
        assert_eq!(p.most_frequent.display, "t (2)");
        assert_eq!(p.least_frequent.display, "missing value (1)");
        // equal to the rarest value: the value wins
        let p = profile_categorical("c", cells(&["a", "a", "b", "NA"]), nominal()).unwrap();
        assert_eq!(p.least_frequent.display, "b (1)");
        let p = profile_categorical("c", cells(&["NA", "NA"]), nominal()).unwrap();
        assert_eq!(p.most_frequent.display, "missing value (2)");
        assert_eq!(p.unique_entries, 1);
    }

    #[test]
    fn categorical_empty_and_wrong_stratum() {
        assert!(matches!(
            profile_categorical("c", cells(&[]), nominal()),
            Err(Error::EmptyColumn(_))
        ));
        assert!(profile_categorical("c", cells(&["1"]), continuous()).is_err());
    }

    #[test]
    fn numeric_four_values() {
        let p = profile_numeric("n", cells(&["1", "2", "3", "4"]), continuous()).unwrap();
        assert_eq!((p.min, p.median, p.max, p.mean), (1.0, 2.5, 4.0, 2.5));
        let sd = p.standard_deviation.unwrap();
        assert!((sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((sd - 1.290994).abs() < 1e-6);
    }

    #[test]
    fn numeric_constant_and_singleton() {
        let ones = vec!["1"; 500];
        let p = profile_numeric("n", cells(&ones), continuous()).unwrap();
        assert_eq!((p.min, p.median, p.max, p.mean), (1.0, 1.0, 1.0, 1.0));
        assert_eq!(p.standard_deviation, Some(0.0));
        let p = profile_numeric("n", cells(&["5"]), continuous()).unwrap();
        assert_eq!(p.standard_deviation, None);
        assert_eq!((p.min, p.median, p.max, p.mean), (5.0, 5.0, 5.0, 5.0));
    }

    #[test]
    fn numeric_zeros_and_errors() {
        let p = profile_numeric("n", cells(&["0", "0", "3", "NA"]), continuous()).unwrap();
        assert_eq!(p.zeros_pct, "66.67%");
        assert_eq!(p.missing_pct, "25.00%");
        assert!(matches!(
            profile_numeric("n", cells(&["NA"]), continuous()),
            Err(Error::AllMissing(_))
        ));
        match profile_numeric("n", cells(&["1", "abc"]), continuous()) {
            Err(Error::NotNumeric { row, value, .. }) => assert_eq!((row, value.as_str()), (3, "abc")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dataset_missing_display() {
        let m = DatasetMissing {
            missing_cells: 468,
            total_cells: 9000,
        };
        assert_eq!(m.pct(), "5.2%");
        assert!((m.fraction() - 0.052).abs() < 1e-15);
    }
}
