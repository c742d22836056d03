use std::io::Write;

use anyhow::{bail, Context, Result};

use dnl_core::ground_truth::{CorrelationEntry, GroundTruthPayload};
use dnl_core::label::{MetadataPayload, ProvenancePayload, VariablesPayload};
use dnl_core::pairs::{PairPayload, PairPlotCell, PairPlotsPayload};
use dnl_core::posterior::ProbabilisticPayload;
use dnl_core::stats::{CategoricalProfile, NumericProfile, StatisticsPayload};
use dnl_core::{LabelDocument, ModuleName};

use crate::text::{num, opt, or_dash, Table};
use crate::{InspectArgs, EXIT_OK};

fn names(ms: &[ModuleName]) -> String {
    ms.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(", ")
}

pub(crate) fn run(args: &InspectArgs, out: &mut dyn Write) -> Result<i32> {
    let text = std::fs::read_to_string(&args.label).with_context(|| format!("cannot read {}", args.label.display()))?;
    let doc = LabelDocument::from_json(&text).with_context(|| format!("{} is not a valid label", args.label.display()))?;
    let present = doc.modules.present();

    let Some(raw) = &args.module else {
        for m in &present {
            writeln!(out, "{m}")?;
        }
        return Ok(EXIT_OK);
    };
    let module: ModuleName = raw.parse().map_err(|_| anyhow::anyhow!("unknown module {raw:?}"))?;
    if !present.contains(&module) {
        bail!("module {module} is not in this label; available: {}", names(&present));
    }
    if args.pair.is_some() && module != ModuleName::PairPlots {
        bail!("--pair only applies to --module pair_plots");
    }

    let m = &doc.modules;
    let rendered = match module {
        ModuleName::Metadata => metadata(&m.metadata),
        ModuleName::Provenance => provenance(m.provenance.as_ref().unwrap()),
        ModuleName::Variables => variables(m.variables.as_ref().unwrap()),
        ModuleName::Statistics => statistics(m.statistics.as_ref().unwrap()),
        ModuleName::PairPlots => pair_plots(m.pair_plots.as_ref().unwrap(), args.pair.as_deref())?,
        ModuleName::ProbabilisticModel => probabilistic(m.probabilistic_model.as_ref().unwrap()),
        ModuleName::GroundTruthCorrelations => ground_truth(m.ground_truth_correlations.as_ref().unwrap()),
    };
    out.write_all(rendered.as_bytes())?;
    Ok(EXIT_OK)
}

fn metadata(m: &MetadataPayload) -> String {
    let mut t = Table::new(&["field", "value"]);
    let range = match (&m.range.from, &m.range.to) {
        (None, None) => "-".to_string(),
        (from, to) => format!("{} to {}", or_dash(from), or_dash(to)),
    };
    let rows = [
        ("filename", m.filename.clone()),
        ("format", m.format.clone()),
        ("url", or_dash(&m.url)),
        ("domain", or_dash(&m.domain)),
        ("keywords", if m.keywords.is_empty() { "-".into() } else { m.keywords.join(", ") }),
        ("type", m.data_type.clone()),
        ("rows", m.rows.to_string()),
        ("columns", m.columns.to_string()),
        ("missing", m.missing_pct.clone()),
        ("license", or_dash(&m.license)),
        ("released", or_dash(&m.released)),
        ("range", range),
        ("description", or_dash(&m.description)),
    ];
    for (k, v) in rows {
        t.row(vec![k.to_string(), v]);
    }
    t.render()
}

fn provenance(p: &ProvenancePayload) -> String {
    let mut t = Table::new(&["role", "name", "url", "email"]);
    for (role, c) in [("source", &p.source), ("author", &p.author)] {
        if let Some(c) = c {
            t.row(vec![role.into(), c.name.clone(), or_dash(&c.url), or_dash(&c.email)]);
        }
    }
    t.render()
}

fn variables(v: &VariablesPayload) -> String {
    let mut t = Table::new(&["name", "description"]);
    for e in &v.entries {
        t.row(vec![e.name.clone(), e.description.clone()]);
    }
    t.render()
}

fn categorical_table(title: &str, profiles: &[CategoricalProfile]) -> String {
    let mut t = Table::new(&[
        "name", "type", "count", "unique entries", "most frequent", "least frequent", "missing",
    ])
    .numeric(&[2, 3, 6]);
    for p in profiles {
        t.row(vec![
            p.name.clone(),
            p.subtype.to_string(),
            p.count.to_string(),
            if p.unique_includes_missing {
                format!("{} including missing", p.unique_entries)
            } else {
                p.unique_entries.to_string()
            },
            p.most_frequent.display.clone(),
            p.least_frequent.display.clone(),
            p.missing_pct.clone(),
        ]);
    }
    format!("{title}\n{}", t.render())
}

fn numeric_table(title: &str, profiles: &[NumericProfile]) -> String {
    let mut t = Table::new(&[
        "name", "type", "count", "min", "median", "max", "mean", "std dev", "missing", "zeros",
    ])
    .numeric(&[2, 3, 4, 5, 6, 7, 8, 9]);
    for p in profiles {
        t.row(vec![
            p.name.clone(),
            p.subtype.to_string(),
            p.count.to_string(),
            num(p.min),
            num(p.median),
            num(p.max),
            num(p.mean),
            opt(p.standard_deviation),
            p.missing_pct.clone(),
            p.zeros_pct.clone(),
        ]);
    }
    format!("{title}\n{}", t.render())
}

fn statistics(s: &StatisticsPayload) -> String {
    [
        categorical_table("ordinal", &s.ordinal),
        categorical_table("nominal", &s.nominal),
        numeric_table("continuous", &s.continuous),
        numeric_table("discrete", &s.discrete),
    ]
    .join("\n")
}

fn bin_labels(edges: &[f64]) -> Vec<String> {
    edges
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let close = if i + 2 == edges.len() { ']' } else { ')' };
            format!("[{}, {}{close}", num(w[0]), num(w[1]))
        })
        .collect()
}

fn matrix(corner: &str, rows: &[String], cols: &[String], counts: &[Vec<u64>]) -> String {
    let mut header = vec![corner.to_string()];
    header.extend(cols.iter().cloned());
    let mut t = Table::new(&header).numeric(&(1..header.len()).collect::<Vec<_>>());
    for (label, counts) in rows.iter().zip(counts) {
        let mut cells = vec![label.clone()];
        cells.extend(counts.iter().map(u64::to_string));
        t.row(cells);
    }
    t.render()
}

fn kind_name(c: &PairPlotCell) -> String {
    serde_json::to_value(c.kind).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

fn pair_cell(c: &PairPlotCell) -> String {
    let head = format!(
        "{} x {} ({}): {} complete rows, {} excluded\n",
        c.column_a,
        c.column_b,
        kind_name(c),
        c.complete_rows,
        c.excluded_rows
    );
    let body = match &c.payload {
        PairPayload::ContCont(j) => format!(
            "pearson r: {}\n{}",
            opt(j.pearson_r),
            matrix(
                &format!("{} \\ {}", c.column_a, c.column_b),
                &bin_labels(&j.x_edges),
                &bin_labels(&j.y_edges),
                &j.counts
            )
        ),
        PairPayload::CatCat(k) => {
            let with_other = |v: &[String]| v.iter().cloned().chain(["other".to_string()]).collect::<Vec<_>>();
            matrix(
                &format!("{} \\ {}", c.column_a, c.column_b),
                &with_other(&k.row_categories),
                &with_other(&k.column_categories),
                &k.counts,
            )
        }
        PairPayload::CatCont(g) => {
            let mut t = Table::new(&[g.category_column.as_str(), "count", "sum", "mean"]).numeric(&[1, 2, 3]);
            for s in &g.groups {
                t.row(vec![s.category.clone(), s.count.to_string(), num(s.sum), num(s.mean)]);
            }
            if let Some(o) = &g.other {
                t.row(vec!["other".into(), o.count.to_string(), num(o.sum), num(o.mean)]);
            }
            format!("value: {}\n{}", g.value_column, t.render())
        }
    };
    head + &body
}

fn pair_plots(p: &PairPlotsPayload, pair: Option<&str>) -> Result<String> {
    if let Some(raw) = pair {
        let Some((a, b)) = raw.split_once(',') else {
            bail!("--pair {raw:?} must look like column_a,column_b");
        };
        let (a, b) = (a.trim(), b.trim());
        return match p.cells.iter().find(|c| c.matches(a, b)) {
            Some(c) => Ok(pair_cell(c)),
            None => bail!("no pair-plot cell for ({a}, {b})"),
        };
    }
    let mut t = Table::new(&["column a", "column b", "kind", "complete", "excluded", "pearson r"]).numeric(&[3, 4, 5]);
    for c in &p.cells {
        t.row(vec![
            c.column_a.clone(),
            c.column_b.clone(),
            kind_name(c),
            c.complete_rows.to_string(),
            c.excluded_rows.to_string(),
            opt(c.pearson_r()),
        ]);
    }
    let mut s = format!("{} histograms, {} cells (max {} bins)\n{}", p.histograms.len(), p.cells.len(), p.max_bins, t.render());
    for sp in &p.skipped_pairs {
        s += &format!("skipped {} x {}: {}\n", sp.column_a, sp.column_b, sp.reason);
    }
    for col in &p.skipped_columns {
        s += &format!("skipped histogram {col}: no values\n");
    }
    Ok(s)
}

fn probabilistic(p: &ProbabilisticPayload) -> String {
    let mut sections = Vec::new();
    for e in &p.entries {
        let pct = (e.level * 100.0).round();
        let mut t = Table::new(&[
            e.condition_column.clone(),
            "count".into(),
            "estimate".into(),
            format!("{pct}% low"),
            format!("{pct}% high"),
        ])
        .numeric(&[1, 2, 3, 4]);
        let estimates = dnl_core::format::round_simplex(&e.point_estimates);
        for (k, cat) in e.support.iter().enumerate() {
            t.row(vec![
                cat.clone(),
                e.counts[k].to_string(),
                num(estimates[k]),
                num(e.intervals[k][0]),
                num(e.intervals[k][1]),
            ]);
        }
        sections.push(format!(
            "P({} | {} = {}), {} backend, alpha {}, seed {}\n{}",
            e.condition_column,
            e.target_column,
            e.target_value,
            p.backend,
            num(e.alpha),
            e.seed,
            t.render()
        ));
    }
    sections.join("\n")
}

fn signed_list(title: &str, entries: &[CorrelationEntry]) -> String {
    let mut t = Table::new(&["demographic", "r"]).numeric(&[1]);
    for e in entries {
        t.row(vec![e.demographic.clone(), opt(e.r)]);
    }
    format!("{title}\n{}", t.render())
}

fn ground_truth(g: &GroundTruthPayload) -> String {
    let mut s = format!("ground truth: {}", g.ground_truth.name);
    if let Some(url) = &g.ground_truth.url {
        s += &format!(" <{url}>");
    }
    s.push('\n');
    for r in &g.reports {
        s += &format!(
            "\n{} ({}) by {}: {} joined keys, {} unmatched in dataset, {} unmatched in ground truth\n",
            r.value_column,
            r.aggregate,
            r.key_column,
            r.joined_keys,
            r.unmatched_dataset_keys,
            r.unmatched_ground_truth_keys
        );
        s += &signed_list("Negative", &r.negative);
        s += &signed_list("Positive", &r.positive);
        let flat: Vec<&str> = r.zero_or_undefined().map(|e| e.demographic.as_str()).collect();
        if !flat.is_empty() {
            s += &format!("zero or undefined: {}\n", flat.join(", "));
        }
    }
    s
}
