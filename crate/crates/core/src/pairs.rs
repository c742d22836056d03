//! Histograms, pairwise joint distributions and Pearson correlation.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kind::{parse_number, ColumnKind};
use crate::stats::numeric_values;
use crate::table::DataTable;

pub const DEFAULT_MAX_BINS: usize = 20;
pub const MAX_CATEGORIES: usize = 20;
pub const DEFAULT_PAIR_LIMIT: usize = 25;

fn corrected_mean(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    m + v.iter().map(|x| x - m).sum::<f64>() / n
}

/// Exact collinearity test relative to the first point. Returns the sign of
/// the slope when every point lies on the line, as judged by comparing
/// cross products.
fn collinear_sign(x: &[f64], y: &[f64]) -> Option<f64> {
    let j = x.iter().position(|&v| v != x[0])?;
    let (dxj, dyj) = (x[j] - x[0], y[j] - y[0]);
    if dyj == 0.0 {
        return None;
    }
    x.iter()
        .zip(y)
        .all(|(a, b)| (b - y[0]) * dxj == dyj * (a - x[0]))
        .then(|| (dxj * dyj).signum())
}

/// Pearson product-moment correlation. `None` when either input has zero
/// variance or fewer than two observations; otherwise clamped to `[-1, 1]`.
/// Collinear inputs give exactly `1.0` or `-1.0`.
///
/// # Panics
/// If `x` and `y` differ in length.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "pearson inputs must have equal length");
    if x.len() < 2 {
        return None;
    }
    let (mx, my) = (corrected_mean(x), corrected_mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    if let Some(sign) = collinear_sign(x, y) {
        return Some(sign);
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HistogramKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Histogram {
    pub column: String,
    pub kind: HistogramKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bin_edges: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub categories: Option<Vec<String>>,
    pub counts: Vec<u64>,
    pub other_count: u64,
    pub missing_count: u64,
    pub non_missing_count: u64,
}

/// Equal-width binning over `[min, max]` with `min(max_bins, distinct)` bins.
/// Bins are half-open except the last, which is closed on the right. A
/// constant input yields the single degenerate bin `[v, v]`.
pub fn equal_width_edges(values: &[f64], max_bins: usize) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    if lo == hi {
        return vec![lo, hi];
    }
    let mut bins = max_bins.max(1).min(sorted.len());
    loop {
        let width = (hi - lo) / bins as f64;
        let mut edges: Vec<f64> = (0..bins).map(|i| lo + i as f64 * width).collect();
        edges.push(hi);
        if bins == 1 || edges.windows(2).all(|w| w[0] < w[1]) {
            return edges;
        }
        bins -= 1;
    }
}

pub fn bin_index(edges: &[f64], x: f64) -> usize {
    let bins = edges.len() - 1;
    edges.partition_point(|e| *e <= x).saturating_sub(1).min(bins - 1)
}

pub fn bin_counts(values: &[f64], edges: &[f64]) -> Vec<u64> {
    let mut counts = vec![0u64; edges.len() - 1];
    for &v in values {
        counts[bin_index(edges, v)] += 1;
    }
    counts
}

pub fn numeric_histogram(column: &str, values: &[f64], missing: u64, max_bins: usize) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::AllMissing(column.to_string()));
    }
    let edges = equal_width_edges(values, max_bins);
    Ok(Histogram {
        column: column.to_string(),
        kind: HistogramKind::Numeric,
        counts: bin_counts(values, &edges),
        bin_edges: Some(edges),
        categories: None,
        other_count: 0,
        missing_count: missing,
        non_missing_count: values.len() as u64,
    })
}

/// Categories by descending count, ties broken lexicographically.
fn ranked_categories<'a>(values: impl IntoIterator<Item = &'a str>) -> Vec<(&'a str, u64)> {
    let mut freq: HashMap<&str, u64> = HashMap::new();
    for v in values {
        *freq.entry(v).or_default() += 1;
    }
    let mut ranked: Vec<(&str, u64)> = freq.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    ranked
}

pub fn categorical_histogram<'a, I>(column: &str, cells: I) -> Result<Histogram>
where
    I: IntoIterator<Item = (&'a str, bool)>,
{
    let mut missing = 0;
    let mut present = Vec::new();
    for (raw, is_missing) in cells {
        if is_missing {
            missing += 1;
        } else {
            present.push(raw);
        }
    }
    if present.is_empty() {
        return Err(Error::AllMissing(column.to_string()));
    }
    let ranked = ranked_categories(present.iter().copied());
    let (top, rest) = ranked.split_at(ranked.len().min(MAX_CATEGORIES));
    Ok(Histogram {
        column: column.to_string(),
        kind: HistogramKind::Categorical,
        bin_edges: None,
        categories: Some(top.iter().map(|(c, _)| c.to_string()).collect()),
        counts: top.iter().map(|(_, n)| *n).collect(),
        other_count: rest.iter().map(|(_, n)| n).sum(),
        missing_count: missing,
        non_missing_count: present.len() as u64,
    })
}

pub fn histogram(table: &DataTable, col: usize, kind: ColumnKind, max_bins: usize) -> Result<Histogram> {
    let name = &table.columns()[col];
    if kind.stratum.is_numeric() {
        let (values, missing) = numeric_values(name, table.column(col))?;
        numeric_histogram(name, &values, missing, max_bins)
    } else {
        categorical_histogram(name, table.column(col))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    ContCont,
    CatCat,
    CatCont,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointBins {
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    /// `counts[i][j]`: rows in x bin `i` and y bin `j`.
    pub counts: Vec<Vec<u64>>,
    pub pearson_r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Contingency {
    pub row_categories: Vec<String>,
    pub column_categories: Vec<String>,
    /// One row per row category plus a trailing "other" row; likewise for
    /// columns.
    pub counts: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupStat {
    pub category: String,
    pub count: u64,
    pub sum: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupTotals {
    pub count: u64,
    pub sum: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupedSummary {
    pub category_column: String,
    pub value_column: String,
    pub groups: Vec<GroupStat>,
    pub other: Option<GroupTotals>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairPayload {
    ContCont(JointBins),
    CatCat(Contingency),
    CatCont(GroupedSummary),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairPlotCell {
    pub column_a: String,
    pub column_b: String,
    pub kind: PairKind,
    pub complete_rows: u64,
    pub excluded_rows: u64,
    pub payload: PairPayload,
}

impl PairPlotCell {
    pub fn joint_total(&self) -> u64 {
        match &self.payload {
            PairPayload::ContCont(j) => j.counts.iter().flatten().sum(),
            PairPayload::CatCat(c) => c.counts.iter().flatten().sum(),
            PairPayload::CatCont(g) => {
                g.groups.iter().map(|s| s.count).sum::<u64>()
                    + g.other.as_ref().map_or(0, |o| o.count)
            }
        }
    }

    pub fn pearson_r(&self) -> Option<f64> {
        match &self.payload {
            PairPayload::ContCont(j) => j.pearson_r,
            _ => None,
        }
    }

    pub fn matches(&self, a: &str, b: &str) -> bool {
        (self.column_a == a && self.column_b == b) || (self.column_a == b && self.column_b == a)
    }
}

fn numeric_cell(table: &DataTable, col: usize, row: usize) -> Result<f64> {
    let raw = table.cell(row, col);
    parse_number(raw).ok_or_else(|| Error::NotNumeric {
        column: table.columns()[col].clone(),
        row: row + 2,
        value: raw.to_string(),
    })
}

fn index_of(categories: &[&str], v: &str) -> usize {
    categories.iter().position(|c| *c == v).unwrap_or(categories.len())
}

/// Joint payload for one column pair. Rows missing either cell are
/// excluded and counted.
pub fn pair_payload(
    table: &DataTable,
    a: &str,
    b: &str,
    kinds: &[ColumnKind],
    max_bins: usize,
) -> Result<PairPlotCell> {
    if a == b {
        return Err(Error::SelfPair(a.to_string(), b.to_string()));
    }
    let (ia, ib) = (table.require_column(a)?, table.require_column(b)?);
    let rows: Vec<usize> = (0..table.row_count())
        .filter(|&r| !table.is_missing(r, ia) && !table.is_missing(r, ib))
        .collect();
    if rows.len() < 2 {
        return Err(Error::TooFewCompleteRows {
            a: a.to_string(),
            b: b.to_string(),
            complete: rows.len(),
        });
    }
    let (ka, kb) = (kinds[ia].stratum, kinds[ib].stratum);

    let (kind, payload) = if ka.is_numeric() && kb.is_numeric() {
        let xs = rows.iter().map(|&r| numeric_cell(table, ia, r)).collect::<Result<Vec<_>>>()?;
        let ys = rows.iter().map(|&r| numeric_cell(table, ib, r)).collect::<Result<Vec<_>>>()?;
        let x_edges = equal_width_edges(&xs, max_bins);
        let y_edges = equal_width_edges(&ys, max_bins);
        let mut counts = vec![vec![0u64; y_edges.len() - 1]; x_edges.len() - 1];
        for (x, y) in xs.iter().zip(&ys) {
            counts[bin_index(&x_edges, *x)][bin_index(&y_edges, *y)] += 1;
        }
        let joint = JointBins {
            pearson_r: pearson(&xs, &ys),
            x_edges,
            y_edges,
            counts,
        };
        (PairKind::ContCont, PairPayload::ContCont(joint))
    } else if ka.is_categorical() && kb.is_categorical() {
        let top = |col: usize| -> Vec<&str> {
            ranked_categories(rows.iter().map(|&r| table.cell(r, col)))
                .into_iter()
                .take(MAX_CATEGORIES)
                .map(|(c, _)| c)
                .collect()
        };
        let (row_cats, col_cats) = (top(ia), top(ib));
        let mut counts = vec![vec![0u64; col_cats.len() + 1]; row_cats.len() + 1];
        for &r in &rows {
            counts[index_of(&row_cats, table.cell(r, ia))][index_of(&col_cats, table.cell(r, ib))] += 1;
        }
        let table = Contingency {
            row_categories: row_cats.iter().map(|s| s.to_string()).collect(),
            column_categories: col_cats.iter().map(|s| s.to_string()).collect(),
            counts,
        };
        (PairKind::CatCat, PairPayload::CatCat(table))
    } else {
        let (ic, iv) = if ka.is_categorical() { (ia, ib) } else { (ib, ia) };
        let values = rows.iter().map(|&r| numeric_cell(table, iv, r)).collect::<Result<Vec<_>>>()?;
        let ranked = ranked_categories(rows.iter().map(|&r| table.cell(r, ic)));
        let top: Vec<&str> = ranked.iter().take(MAX_CATEGORIES).map(|(c, _)| *c).collect();
        let mut sums = vec![(0u64, 0.0f64); top.len() + 1];
        for (&r, v) in rows.iter().zip(&values) {
            let slot = &mut sums[index_of(&top, table.cell(r, ic))];
            slot.0 += 1;
            slot.1 += v;
        }
        let groups = top
            .iter()
            .zip(&sums)
            .map(|(c, (n, s))| GroupStat {
                category: c.to_string(),
                count: *n,
                sum: *s,
                mean: s / *n as f64,
            })
            .collect();
        let (on, os) = sums[top.len()];
        let summary = GroupedSummary {
            category_column: table.columns()[ic].clone(),
            value_column: table.columns()[iv].clone(),
            groups,
            other: (on > 0).then(|| GroupTotals {
                count: on,
                sum: os,
                mean: os / on as f64,
            }),
        };
        (PairKind::CatCont, PairPayload::CatCont(summary))
    };

    Ok(PairPlotCell {
        column_a: a.to_string(),
        column_b: b.to_string(),
        kind,
        complete_rows: rows.len() as u64,
        excluded_rows: (table.row_count() - rows.len()) as u64,
        payload,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkippedPair {
    pub column_a: String,
    pub column_b: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairPlotsPayload {
    pub max_bins: u64,
    pub histograms: Vec<Histogram>,
    pub cells: Vec<PairPlotCell>,
    /// Columns with no non-missing value get no histogram.
    pub skipped_columns: Vec<String>,
    /// Pairs with fewer than two complete rows.
    pub skipped_pairs: Vec<SkippedPair>,
}

#[derive(Debug, Clone, Copy)]
pub struct PairOptions {
    pub max_bins: usize,
    pub column_limit: usize,
}

impl Default for PairOptions {
    fn default() -> Self {
        Self {
            max_bins: DEFAULT_MAX_BINS,
            column_limit: DEFAULT_PAIR_LIMIT,
        }
    }
}

/// Builds the payload for an explicit list of pairs, plus histograms for
/// every column.
pub fn selected_pairs(
    table: &DataTable,
    kinds: &[ColumnKind],
    pairs: &[(String, String)],
    max_bins: usize,
) -> Result<PairPlotsPayload> {
    let hist: Vec<Result<Histogram>> = (0..table.column_count())
        .into_par_iter()
        .map(|i| histogram(table, i, kinds[i], max_bins))
        .collect();
    let mut histograms = Vec::new();
    let mut skipped_columns = Vec::new();
    for (i, h) in hist.into_iter().enumerate() {
        match h {
            Ok(h) => histograms.push(h),
            Err(Error::AllMissing(_)) => skipped_columns.push(table.columns()[i].clone()),
            Err(e) => return Err(e),
        }
    }

    let results: Vec<Result<PairPlotCell>> = pairs
        .par_iter()
        .map(|(a, b)| pair_payload(table, a, b, kinds, max_bins))
        .collect();
    let mut cells = Vec::new();
    let mut skipped_pairs = Vec::new();
    for r in results {
        match r {
            Ok(c) => cells.push(c),
            Err(e @ Error::TooFewCompleteRows { .. }) => {
                let Error::TooFewCompleteRows { a, b, .. } = &e else { unreachable!() };
                skipped_pairs.push(SkippedPair {
                    column_a: a.clone(),
                    column_b: b.clone(),
                    reason: e.to_string(),
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(PairPlotsPayload {
        max_bins: max_bins as u64,
        histograms,
        cells,
        skipped_columns,
        skipped_pairs,
    })
}

/// All unordered pairs `(i, j)`, `i < j`, in column-index order.
pub fn all_pairs(table: &DataTable, kinds: &[ColumnKind], options: PairOptions) -> Result<PairPlotsPayload> {
    let n = table.column_count();
    if n > options.column_limit {
        return Err(Error::TooManyColumns {
            columns: n,
            limit: options.column_limit,
        });
    }
    let cols = table.columns();
    let pairs: Vec<(String, String)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (cols[i].clone(), cols[j].clone())))
        .collect();
    selected_pairs(table, kinds, &pairs, options.max_bins)
}
