mod common;

use dnl_core::pairs::{numeric_histogram, PairPayload, DEFAULT_MAX_BINS};
use dnl_core::stats::FrequencyKind;
use dnl_core::{all_pairs, Error, histogram, pair_payload, pearson, profile_dataset, PairOptions};
use proptest::prelude::*;

fn finite_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, n)
}

proptest! {
    #[test]
    fn profiles_ignore_row_order((cols, order) in common::table_and_permutation()) {
        let identity: Vec<usize> = (0..cols[0].len()).collect();
        let (t1, k1) = common::build(&cols, &identity);
        let (t2, k2) = common::build(&cols, &order);
        prop_assert_eq!(&k1, &k2);
        prop_assume!(common::dirty_numeric_columns(&t1, &k1).is_empty());
        let (p1, m1) = profile_dataset(&t1, &k1).unwrap();
        let (p2, m2) = profile_dataset(&t2, &k2).unwrap();
        prop_assert_eq!(m1, m2);
        // numeric fields computed from a different summation order may differ
        // in the last ulp; compare the serialized six-digit form
        prop_assert_eq!(
            dnl_core::format::to_canonical_json(&p1).unwrap(),
            dnl_core::format::to_canonical_json(&p2).unwrap()
        );
    }

    #[test]
    fn frequency_fields_are_consistent((cols, order) in common::table_and_permutation()) {
        let (t, k) = common::build(&cols, &order);
        prop_assume!(common::dirty_numeric_columns(&t, &k).is_empty());
        let (p, _) = profile_dataset(&t, &k).unwrap();
        for c in p.ordinal.iter().chain(&p.nominal) {
            prop_assert_eq!(c.count, t.row_count() as u64);
            let (most, least) = (&c.most_frequent, &c.least_frequent);
            if most.kind != FrequencyKind::Tie && least.kind != FrequencyKind::Tie {
                prop_assert!(most.frequency >= least.frequency);
            }
            prop_assert!(c.unique_entries >= 1);
            prop_assert_eq!(c.unique_includes_missing, c.missing_count > 0);
        }
    }

    #[test]
    fn histograms_sum_to_non_missing((cols, order) in common::table_and_permutation()) {
        let (t, k) = common::build(&cols, &order);
        let identity: Vec<usize> = (0..cols[0].len()).collect();
        let (tid, kid) = common::build(&cols, &identity);
        let dirty = common::dirty_numeric_columns(&t, &k);
        for c in 0..t.column_count() {
            let non_missing = (t.row_count() - t.column_missing_count(c)) as u64;
            match histogram(&t, c, k[c], DEFAULT_MAX_BINS) {
                Ok(h) => {
                    prop_assert_eq!(h.counts.iter().sum::<u64>() + h.other_count, non_missing);
                    prop_assert_eq!(h.non_missing_count, non_missing);
                    prop_assert_eq!(&h, &histogram(&tid, c, kid[c], DEFAULT_MAX_BINS).unwrap());
                }
                Err(Error::AllMissing(_)) => prop_assert_eq!(non_missing, 0),
                Err(Error::NotNumeric { .. }) => prop_assert!(dirty.contains(&c)),
                Err(e) => prop_assert!(false, "unexpected {}", e),
            }
        }
    }

    #[test]
    fn pair_cells_respect_totals_and_marginals((cols, order) in common::table_and_permutation()) {
        let (t, k) = common::build(&cols, &order);
        prop_assume!(common::dirty_numeric_columns(&t, &k).is_empty());
        let payload = all_pairs(&t, &k, PairOptions::default()).unwrap();
        for cell in &payload.cells {
            prop_assert_eq!(cell.joint_total(), cell.complete_rows);
            prop_assert_eq!(cell.complete_rows + cell.excluded_rows, t.row_count() as u64);
            let (ia, ib) = (t.column_index(&cell.column_a).unwrap(), t.column_index(&cell.column_b).unwrap());
            let complete: Vec<usize> =
                (0..t.row_count()).filter(|&r| !t.is_missing(r, ia) && !t.is_missing(r, ib)).collect();
            let num = |c: usize| complete.iter().map(|&r| t.cell(r, c).trim().parse::<f64>().unwrap()).collect::<Vec<_>>();
            match &cell.payload {
                PairPayload::ContCont(j) => {
                    let hx = numeric_histogram("x", &num(ia), 0, DEFAULT_MAX_BINS).unwrap();
                    let hy = numeric_histogram("y", &num(ib), 0, DEFAULT_MAX_BINS).unwrap();
                    let rows: Vec<u64> = j.counts.iter().map(|r| r.iter().sum()).collect();
                    let cols: Vec<u64> = (0..j.y_edges.len() - 1).map(|y| j.counts.iter().map(|r| r[y]).sum()).collect();
                    prop_assert_eq!(&rows, &hx.counts);
                    prop_assert_eq!(&cols, &hy.counts);
                    prop_assert_eq!(j.x_edges.clone(), hx.bin_edges.unwrap());
                }
                PairPayload::CatCont(g) => {
                    let iv = t.column_index(&g.value_column).unwrap();
                    let total: f64 = num(iv).iter().sum();
                    let grouped: f64 = g.groups.iter().map(|s| s.sum).sum::<f64>() + g.other.as_ref().map_or(0.0, |o| o.sum);
                    prop_assert!((total - grouped).abs() <= 1e-9 * total.abs().max(1.0));
                }
                PairPayload::CatCat(_) => {}
            }
        }
    }

    #[test]
    fn dirty_numeric_cells_are_reported((cols, order) in common::table_and_permutation()) {
        let (t, k) = common::build(&cols, &order);
        let dirty = common::dirty_numeric_columns(&t, &k);
        match profile_dataset(&t, &k) {
            Ok(_) => prop_assert!(dirty.is_empty()),
            Err(Error::NotNumeric { column, row, value }) => {
                let c = t.column_index(&column).unwrap();
                prop_assert!(dirty.contains(&c));
                // row is the 1-based record number, header included
                prop_assert_eq!(t.cell(row - 2, c), value.as_str());
            }
            Err(e) => prop_assert!(false, "unexpected {}", e),
        }
    }

    #[test]
    fn pearson_is_symmetric_and_affine(
        (x, y) in (2usize..60).prop_flat_map(|n| (finite_vec(n), finite_vec(n))),
        a in prop_oneof![0.01f64..100.0, -100.0f64..-0.01],
        b in -1e3f64..1e3,
    ) {
        let r = pearson(&x, &y);
        prop_assert_eq!(r, pearson(&y, &x));
        let ax: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        match (r, pearson(&ax, &y)) {
            (Some(r), Some(r2)) => prop_assert!((r2 - a.signum() * r).abs() <= 1e-12, "{} vs {}", r2, r),
            (None, None) => {}
            (r, r2) => prop_assert!(false, "defined-ness changed: {:?} vs {:?}", r, r2),
        }
        if let Some(r) = r {
            prop_assert!((-1.0..=1.0).contains(&r));
        }
    }

    #[test]
    fn pair_order_only_swaps_labels((cols, order) in common::table_and_permutation()) {
        let (t, k) = common::build(&cols, &order);
        let (a, b) = (&t.columns()[0], &t.columns()[1]);
        match (pair_payload(&t, a, b, &k, 20), pair_payload(&t, b, a, &k, 20)) {
            (Ok(ab), Ok(ba)) => {
                prop_assert_eq!(ab.kind, ba.kind);
                prop_assert_eq!(ab.complete_rows, ba.complete_rows);
                prop_assert_eq!(ab.pearson_r(), ba.pearson_r());
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "pair order changed success"),
        }
    }
}
