//! Synthetic tables for the profiling benchmarks.

use std::collections::BTreeMap;

use dnl_core::{infer_kinds, parse_csv, ColumnKind, DataTable, IngestOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STATES: [&str; 8] = ["CA", "NY", "TX", "FL", "NJ", "WA", "IL", "OH"];
const DRUGS: [&str; 5] = ["Xarelto", "Eliquis", "Aciphex", "Humira", "Lipitor"];

/// A payments-like table: two nominal, one ordinal, two continuous and one
/// discrete column, about 5% missing.
pub fn payments_csv(rows: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = String::from("recipient_state,product_name,program_year,amount,fee,payments\n");
    for _ in 0..rows {
        let state = STATES[rng.random_range(0..STATES.len())].to_string();
        let drug = DRUGS[rng.random_range(0..DRUGS.len())].to_string();
        let year = rng.random_range(2013..2018).to_string();
        let amount = format!("{:.2}", rng.random_range(1.0..5000.0));
        let fee = format!("{:.2}", rng.random_range(0.0..300.0));
        let payments = rng.random_range(1..9).to_string();
        let [state, drug, year, amount, fee, payments] =
            [state, drug, year, amount, fee, payments].map(|v| if rng.random_bool(0.05) { String::new() } else { v });
        s += &format!("{state},{drug},{year},{amount},{fee},{payments}\n");
    }
    s
}

pub fn payments_table(rows: usize, seed: u64) -> (DataTable, Vec<ColumnKind>) {
    let csv = payments_csv(rows, seed);
    let table = parse_csv("bench.csv", csv.as_bytes(), &IngestOptions::default()).expect("synthetic csv parses");
    let (kinds, _) = infer_kinds(&table, &BTreeMap::new()).expect("synthetic kinds");
    (table, kinds)
}
