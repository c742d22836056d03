//! Correlation of per-key dataset aggregates against a reference table of
//! demographics (for example census figures keyed by zip code).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kind::parse_number;
use crate::pairs::pearson;
use crate::table::DataTable;

pub const POPULATION_COLUMN: &str = "population";
pub const MIN_JOIN: usize = 3;

/// Trims, and left-pads all-digit keys shorter than five characters with
/// zeros so that zip codes stored as numbers still join.
pub fn normalize_key(raw: &str) -> String {
    let k = raw.trim();
    if !k.is_empty() && k.len() < 5 && k.bytes().all(|b| b.is_ascii_digit()) {
        format!("{k:0>5}")
    } else {
        k.to_string()
    }
}

#[derive(Debug, Clone)]
pub struct GroundTruthTable {
    key_column: String,
    demographic_columns: Vec<String>,
    population_column: Option<String>,
    keys: Vec<String>,
    /// `values[d][i]`: demographic `d` for key `i`.
    values: Vec<Vec<f64>>,
    population: Option<Vec<f64>>,
    index: HashMap<String, usize>,
}

#[derive(Debug, Clone, Default)]
pub struct GroundTruthColumns {
    /// Defaults to the first column.
    pub key: Option<String>,
    /// Defaults to a column named `population`, when present.
    pub population: Option<String>,
    /// Defaults to every other column whose cells are all numeric.
    pub demographics: Option<Vec<String>>,
}

fn numeric_column(table: &DataTable, col: usize) -> Option<Vec<f64>> {
    table
        .column(col)
        .map(|(raw, missing)| if missing { None } else { parse_number(raw) })
        .collect()
}

impl GroundTruthTable {
    pub fn from_table(table: &DataTable, columns: &GroundTruthColumns) -> Result<Self> {
        let key_column = match &columns.key {
            Some(k) => k.clone(),
            None => table.columns()[0].clone(),
        };
        let ik = table.require_column(&key_column)?;
        let population_column = match &columns.population {
            Some(p) => Some(p.clone()),
            None => table.column_index(POPULATION_COLUMN).map(|_| POPULATION_COLUMN.to_string()),
        };

        let mut keys = Vec::with_capacity(table.row_count());
        let mut index = HashMap::new();
        for (r, (raw, missing)) in table.column(ik).enumerate() {
            if missing {
                return Err(Error::GroundTruth(format!("record {} has a missing key", r + 2)));
            }
            let key = normalize_key(raw);
            if index.insert(key.clone(), r).is_some() {
                return Err(Error::GroundTruth(format!("duplicate key {key:?}")));
            }
            keys.push(key);
        }

        let population = match &population_column {
            Some(name) => {
                let ip = table.require_column(name)?;
                let pop = numeric_column(table, ip)
                    .filter(|v| v.iter().all(|p| *p > 0.0))
                    .ok_or_else(|| {
                        Error::GroundTruth(format!("population column {name:?} must hold positive numbers"))
                    })?;
                Some(pop)
            }
            None => None,
        };

        let (demographic_columns, values) = match &columns.demographics {
            Some(names) => {
                let mut values = Vec::new();
                for name in names {
                    let i = table.require_column(name)?;
                    values.push(numeric_column(table, i).ok_or_else(|| {
                        Error::GroundTruth(format!("demographic column {name:?} must be fully numeric"))
                    })?);
                }
                (names.clone(), values)
            }
            None => {
                let mut names = Vec::new();
                let mut values = Vec::new();
                for (i, name) in table.columns().iter().enumerate() {
                    if i == ik || Some(name) == population_column.as_ref() {
                        continue;
                    }
                    if let Some(v) = numeric_column(table, i) {
                        names.push(name.clone());
                        values.push(v);
                    }
                }
                (names, values)
            }
        };
        if demographic_columns.is_empty() {
            return Err(Error::GroundTruth("no numeric demographic columns".into()));
        }

        Ok(Self {
            key_column,
            demographic_columns,
            population_column,
            keys,
            values,
            population,
            index,
        })
    }

    pub fn key_column(&self) -> &str {
        &self.key_column
    }

    pub fn demographic_columns(&self) -> &[String] {
        &self.demographic_columns
    }

    pub fn population_column(&self) -> Option<&str> {
        self.population_column.as_deref()
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn contains(&self, key: &str) -> bool {
        self.index.contains_key(key)
    }

    pub fn population(&self, key: &str) -> Option<f64> {
        let pop = self.population.as_ref()?;
        self.index.get(key).map(|&i| pop[i])
    }

    pub fn value(&self, demographic: &str, key: &str) -> Option<f64> {
        let d = self.demographic_columns.iter().position(|c| c == demographic)?;
        self.index.get(key).map(|&i| self.values[d][i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregate {
    Sum,
    Mean,
    Count,
    PerCapita,
}

impl Aggregate {
    pub fn as_str(self) -> &'static str {
        match self {
            Aggregate::Sum => "sum",
            Aggregate::Mean => "mean",
            Aggregate::Count => "count",
            Aggregate::PerCapita => "per_capita",
        }
    }
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Aggregate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(Aggregate::Sum),
            "mean" => Ok(Aggregate::Mean),
            "count" => Ok(Aggregate::Count),
            "per_capita" => Ok(Aggregate::PerCapita),
            other => Err(Error::InvalidOption(format!(
                "unknown aggregate {other:?}; expected sum, mean, count or per_capita"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyAggregates {
    pub aggregate: Aggregate,
    pub key_column: String,
    pub value_column: String,
    pub values: BTreeMap<String, f64>,
    /// Rows with a missing key or value.
    pub excluded_rows: u64,
    /// Keys that could not be aggregated (per-capita keys with no population).
    pub dropped_keys: u64,
}

pub fn aggregate_by_key(
    table: &DataTable,
    key_column: &str,
    value_column: &str,
    aggregate: Aggregate,
    ground_truth: Option<&GroundTruthTable>,
) -> Result<KeyAggregates> {
    let ik = table.require_column(key_column)?;
    let iv = table.require_column(value_column)?;
    let population = match aggregate {
        Aggregate::PerCapita => match ground_truth {
            Some(gt) if gt.population.is_some() => Some(gt),
            _ => return Err(Error::MissingPopulation),
        },
        _ => None,
    };

    let mut acc: BTreeMap<String, (u64, f64)> = BTreeMap::new();
    let mut excluded = 0;
    for r in 0..table.row_count() {
        if table.is_missing(r, ik) || table.is_missing(r, iv) {
            excluded += 1;
            continue;
        }
        let value = if aggregate == Aggregate::Count {
            0.0
        } else {
            let raw = table.cell(r, iv);
            parse_number(raw).ok_or_else(|| Error::NotNumeric {
                column: value_column.to_string(),
                row: r + 2,
                value: raw.to_string(),
            })?
        };
        let slot = acc.entry(normalize_key(table.cell(r, ik))).or_default();
        slot.0 += 1;
        slot.1 += value;
    }

    let mut values = BTreeMap::new();
    let mut dropped = 0;
    for (key, (n, sum)) in acc {
        let v = match aggregate {
            Aggregate::Sum => sum,
            Aggregate::Mean => sum / n as f64,
            Aggregate::Count => n as f64,
            Aggregate::PerCapita => match population.and_then(|gt| gt.population(&key)) {
                Some(p) => sum / p,
                None => {
                    dropped += 1;
                    continue;
                }
            },
        };
        values.insert(key, v);
    }
    Ok(KeyAggregates {
        aggregate,
        key_column: key_column.to_string(),
        value_column: value_column.to_string(),
        values,
        excluded_rows: excluded,
        dropped_keys: dropped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationEntry {
    pub demographic: String,
    /// `None` when the demographic has zero variance over the joined keys.
    pub r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationReport {
    pub aggregate: Aggregate,
    pub value_column: String,
    pub key_column: String,
    pub joined_keys: u64,
    pub unmatched_dataset_keys: u64,
    pub unmatched_ground_truth_keys: u64,
    pub excluded_rows: u64,
    pub entries: Vec<CorrelationEntry>,
    /// `r > 0`, strongest first.
    pub positive: Vec<CorrelationEntry>,
    /// `r < 0`, strongest first.
    pub negative: Vec<CorrelationEntry>,
}

impl CorrelationReport {
    pub fn zero_or_undefined(&self) -> impl Iterator<Item = &CorrelationEntry> {
        self.entries.iter().filter(|e| e.r.is_none_or(|r| r == 0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruthSource {
    pub name: String,
    pub url: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruthPayload {
    pub ground_truth: GroundTruthSource,
    pub reports: Vec<CorrelationReport>,
}

/// Inner-joins aggregates with the ground truth and correlates each
/// demographic column. Keys are visited in sorted order, so the result does
/// not depend on row order in either input.
pub fn correlate(
    aggregates: &KeyAggregates,
    ground_truth: &GroundTruthTable,
    demographic_columns: &[String],
) -> Result<CorrelationReport> {
    let joined: Vec<(&String, f64)> = aggregates
        .values
        .iter()
        .filter(|(k, _)| ground_truth.contains(k))
        .map(|(k, v)| (k, *v))
        .collect();
    if joined.len() < MIN_JOIN {
        return Err(Error::JoinTooSmall { joined: joined.len() });
    }
    let xs: Vec<f64> = joined.iter().map(|(_, v)| *v).collect();

    let mut entries = Vec::with_capacity(demographic_columns.len());
    for d in demographic_columns {
        let ys = joined
            .iter()
            .map(|(k, _)| ground_truth.value(d, k).ok_or_else(|| Error::UnknownColumn(d.clone())))
            .collect::<Result<Vec<f64>>>()?;
        entries.push(CorrelationEntry {
            demographic: d.clone(),
            r: pearson(&xs, &ys),
        });
    }

    let mut positive: Vec<CorrelationEntry> = entries.iter().filter(|e| e.r.is_some_and(|r| r > 0.0)).cloned().collect();
    positive.sort_by(|a, b| b.r.unwrap().total_cmp(&a.r.unwrap()).then(a.demographic.cmp(&b.demographic)));
    let mut negative: Vec<CorrelationEntry> = entries.iter().filter(|e| e.r.is_some_and(|r| r < 0.0)).cloned().collect();
    negative.sort_by(|a, b| a.r.unwrap().total_cmp(&b.r.unwrap()).then(a.demographic.cmp(&b.demographic)));

    let matched = joined.len() as u64;
    Ok(CorrelationReport {
        aggregate: aggregates.aggregate,
        value_column: aggregates.value_column.clone(),
        key_column: aggregates.key_column.clone(),
        joined_keys: matched,
        unmatched_dataset_keys: aggregates.values.len() as u64 - matched + aggregates.dropped_keys,
        unmatched_ground_truth_keys: ground_truth.keys().len() as u64 - matched,
        excluded_rows: aggregates.excluded_rows,
        entries,
        positive,
        negative,
    })
}
