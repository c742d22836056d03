#![allow(dead_code)]

use std::collections::BTreeMap;

use dnl_core::{infer_kinds, parse_csv, ColumnKind, DataTable, IngestOptions};
use proptest::prelude::*;

pub const MISSING: [&str; 4] = ["", "NA", "null", "NaN"];

/// One column of raw cells, already rendered as text.
pub fn column(rows: usize) -> impl Strategy<Value = Vec<String>> {
    let missing = prop::sample::select(MISSING.to_vec()).prop_map(str::to_string);
    let cell = prop_oneof![
        // nominal
        4 => prop::sample::select(vec!["ca", "ny", "tx", "nj", "wa"]).prop_map(str::to_string),
        // continuous
        4 => (-5000i64..5000).prop_map(|q| format!("{}.{}", q / 10, (q % 10).abs())),
        // discrete
        4 => (0i64..6).prop_map(|v| v.to_string()),
        1 => missing,
    ];
    // mixing the generators per column keeps every stratum reachable
    prop_oneof![
        prop::collection::vec(cell, rows),
        prop::collection::vec(prop::sample::select(vec!["t", "f", "NA"]).prop_map(str::to_string), rows),
        prop::collection::vec(
            prop_oneof![
                4 => (-300i64..300).prop_map(|q| format!("{}.5", q)),
                1 => Just("NA".to_string()),
            ],
            rows
        ),
        prop::collection::vec(
            prop_oneof![
                4 => prop::sample::select(vec!["a", "b", "c", "d"]).prop_map(str::to_string),
                1 => Just(String::new()),
            ],
            rows
        ),
    ]
}

/// Column-major cells for a table with 2..=5 columns and 3..=40 rows.
pub fn table_cells() -> impl Strategy<Value = Vec<Vec<String>>> {
    (2usize..=5, 3usize..=40)
        .prop_flat_map(|(cols, rows)| prop::collection::vec(column(rows), cols))
}

pub fn to_csv(cols: &[Vec<String>], order: &[usize]) -> String {
    let mut s = (0..cols.len()).map(|c| format!("col{c}")).collect::<Vec<_>>().join(",");
    s.push('\n');
    for &r in order {
        s.push_str(&cols.iter().map(|c| c[r].as_str()).collect::<Vec<_>>().join(","));
        s.push('\n');
    }
    s
}

pub fn build(cols: &[Vec<String>], order: &[usize]) -> (DataTable, Vec<ColumnKind>) {
    let table = parse_csv("t.csv", to_csv(cols, order).as_bytes(), &IngestOptions::default()).unwrap();
    let (kinds, _) = infer_kinds(&table, &BTreeMap::new()).unwrap();
    (table, kinds)
}

/// A table plus a permutation of its rows.
pub fn table_and_permutation() -> impl Strategy<Value = (Vec<Vec<String>>, Vec<usize>)> {
    table_cells().prop_flat_map(|cols| {
        let rows = cols[0].len();
        (Just(cols), Just((0..rows).collect::<Vec<_>>()).prop_shuffle())
    })
}

/// Columns typed numeric whose non-missing cells do not all parse. Inference
/// only needs 95% of values to parse, so these can occur.
pub fn dirty_numeric_columns(table: &DataTable, kinds: &[ColumnKind]) -> Vec<usize> {
    (0..table.column_count())
        .filter(|&c| kinds[c].stratum.is_numeric())
        .filter(|&c| {
            (0..table.row_count()).any(|r| {
                !table.is_missing(r, c) && !table.cell(r, c).trim().parse::<f64>().is_ok_and(f64::is_finite)
            })
        })
        .collect()
}
