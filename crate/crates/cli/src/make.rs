use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use chrono::{DateTime, SecondsFormat, Utc};

use dnl_core::ground_truth::GroundTruthTable;
use dnl_core::label::{AutoMetadata, AutoPayloads, Generator, ManualInput};
use dnl_core::pairs::{selected_pairs, PairOptions};
use dnl_core::posterior::{ProbabilisticPayload, BACKEND_NAME};
use dnl_core::stats::DatasetMissing;
use dnl_core::{
    aggregate_by_key, all_pairs, build_label, correlate, infer_kinds, parse_csv, profile_dataset, Aggregate,
    BuildOutcome, ColumnKind, DataTable, DirichletBackend, FitRequest, GroundTruthColumns, IngestOptions,
    InferenceBackend, ModuleName, Origin,
};

use crate::{MakeArgs, EXIT_ACTION, EXIT_OK};

fn parse_modules(names: &[String]) -> Result<BTreeSet<ModuleName>> {
    let mut set = BTreeSet::from([ModuleName::Metadata]);
    for raw in names {
        let name = raw.trim();
        if name.is_empty() {
            continue;
        }
        let m = match name {
            "ground_truth" => ModuleName::GroundTruthCorrelations,
            other => other.parse().map_err(|_| {
                let known: Vec<&str> = ModuleName::ALL.iter().map(|m| m.as_str()).collect();
                anyhow::anyhow!("unknown module {other:?}; expected one of {}", known.join(", "))
            })?,
        };
        set.insert(m);
    }
    Ok(set)
}

fn split_pair(raw: &str) -> Result<(String, String)> {
    match raw.split_once(',') {
        Some((a, b)) if !a.trim().is_empty() && !b.trim().is_empty() => {
            Ok((a.trim().to_string(), b.trim().to_string()))
        }
        _ => bail!("pair {raw:?} must look like column_a,column_b"),
    }
}

fn check_config(args: &MakeArgs, modules: &BTreeSet<ModuleName>) -> Result<()> {
    if modules.contains(&ModuleName::GroundTruthCorrelations) {
        let mut missing = Vec::new();
        if args.gt.is_none() {
            missing.push("--gt");
        }
        if args.dataset_key.is_none() {
            missing.push("--dataset-key");
        }
        if args.value_column.is_empty() {
            missing.push("--value-column");
        }
        if !missing.is_empty() {
            bail!("config error: ground_truth_correlations requires {}", missing.join(", "));
        }
    }
    if modules.contains(&ModuleName::ProbabilisticModel) {
        let mut missing = Vec::new();
        if args.target.is_none() {
            missing.push("--target");
        }
        if args.target_values.is_empty() {
            missing.push("--target-values");
        }
        if args.condition.is_none() {
            missing.push("--condition");
        }
        if !missing.is_empty() {
            bail!("config error: probabilistic_model requires {}", missing.join(", "));
        }
    }
    if let Some(ts) = &args.timestamp {
        DateTime::parse_from_rfc3339(ts).with_context(|| format!("--timestamp {ts:?} is not RFC 3339"))?;
    }
    Ok(())
}

fn ingest_options(args: &MakeArgs) -> Result<IngestOptions> {
    let mut opts = IngestOptions {
        delimiter: args.delimiter,
        max_rows: (args.max_rows > 0).then_some(args.max_rows),
        ..IngestOptions::default()
    };
    if let Some(tokens) = &args.missing_tokens {
        opts.missing_tokens = tokens.split(',').map(|t| t.trim().to_string()).collect();
    }
    if let Some(path) = &args.overrides {
        let text = read_text(path)?;
        let raw: BTreeMap<String, ColumnKind> =
            serde_json::from_str(&text).with_context(|| format!("overrides {}", path.display()))?;
        opts.type_overrides = raw
            .into_iter()
            .map(|(k, v)| (k, ColumnKind { origin: Origin::Override, ..v }))
            .collect();
    }
    Ok(opts)
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_dataset(arg: &str) -> Result<(String, Vec<u8>)> {
    if arg == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf).context("cannot read stdin")?;
        return Ok(("stdin".to_string(), buf));
    }
    let path = Path::new(arg);
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let name = path.file_name().map_or_else(|| arg.to_string(), |n| n.to_string_lossy().into_owned());
    Ok((name, bytes))
}

fn probabilistic(args: &MakeArgs, table: &DataTable, kinds: &[ColumnKind]) -> Result<ProbabilisticPayload> {
    let backend = DirichletBackend;
    let target = args.target.as_deref().unwrap();
    let condition = args.condition.as_deref().unwrap();
    let mut entries = Vec::with_capacity(args.target_values.len());
    for value in &args.target_values {
        let req = FitRequest {
            alpha: args.alpha,
            level: args.level,
            seed: args.seed,
            mc_samples: args.mc_samples,
            synthetic_draws: args.synthetic_draws,
            ..FitRequest::new(target, value, condition)
        };
        entries.push(backend.fit(table, kinds, &req)?);
    }
    Ok(ProbabilisticPayload {
        backend: BACKEND_NAME.to_string(),
        entries,
    })
}

fn ground_truth(
    args: &MakeArgs,
    opts: &IngestOptions,
    table: &DataTable,
) -> Result<Vec<dnl_core::CorrelationReport>> {
    let path = args.gt.as_deref().unwrap();
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let gt_opts = IngestOptions {
        type_overrides: BTreeMap::new(),
        ..opts.clone()
    };
    let name = path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
    let gt_table = parse_csv(&name, &bytes, &gt_opts).with_context(|| format!("ground truth {}", path.display()))?;
    let gt = GroundTruthTable::from_table(
        &gt_table,
        &GroundTruthColumns {
            key: args.gt_key.clone(),
            population: None,
            demographics: args.gt_columns.clone(),
        },
    )?;
    let key = args.dataset_key.as_deref().unwrap();
    let aggregates = args
        .aggregates
        .iter()
        .map(|a| a.trim().parse::<Aggregate>())
        .collect::<dnl_core::Result<Vec<_>>>()?;

    let mut reports = Vec::new();
    for value in &args.value_column {
        for &agg in &aggregates {
            let per_key = aggregate_by_key(table, key, value, agg, Some(&gt))?;
            let report = correlate(&per_key, &gt, gt.demographic_columns())
                .with_context(|| format!("{value} ({agg})"))?;
            reports.push(report);
        }
    }
    Ok(reports)
}

pub(crate) fn run(args: &MakeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let modules = parse_modules(&args.modules)?;
    check_config(args, &modules)?;
    let opts = ingest_options(args)?;

    let (source_name, bytes) = read_dataset(&args.dataset)?;
    let table = parse_csv(&source_name, &bytes, &opts).with_context(|| format!("dataset {source_name}"))?;
    let (kinds, warnings) = infer_kinds(&table, &opts.type_overrides)?;
    for w in &warnings {
        writeln!(err, "warning: {w}")?;
    }

    let manual = match &args.meta {
        Some(path) => ManualInput::from_json(&read_text(path)?).with_context(|| format!("meta {}", path.display()))?,
        None => ManualInput::default(),
    };

    let statistics = if modules.contains(&ModuleName::Statistics) {
        Some(profile_dataset(&table, &kinds)?.0)
    } else {
        None
    };
    let pair_plots = if modules.contains(&ModuleName::PairPlots) {
        Some(if args.pairs.is_empty() {
            all_pairs(
                &table,
                &kinds,
                PairOptions {
                    max_bins: args.max_bins,
                    column_limit: args.pair_limit,
                },
            )?
        } else {
            let pairs = args.pairs.iter().map(|p| split_pair(p)).collect::<Result<Vec<_>>>()?;
            selected_pairs(&table, &kinds, &pairs, args.max_bins)?
        })
    } else {
        None
    };
    let probabilistic_model = if modules.contains(&ModuleName::ProbabilisticModel) {
        Some(probabilistic(args, &table, &kinds)?)
    } else {
        None
    };
    let ground_truth_reports = if modules.contains(&ModuleName::GroundTruthCorrelations) {
        Some(ground_truth(args, &opts, &table)?)
    } else {
        None
    };

    let auto = AutoPayloads {
        metadata: AutoMetadata {
            filename: source_name,
            format: "csv".to_string(),
            rows: table.row_count() as u64,
            columns: table.column_count() as u64,
            missing: DatasetMissing {
                missing_cells: table.missing_count() as u64,
                total_cells: (table.row_count() * table.column_count()) as u64,
            },
        },
        columns: table.columns().to_vec(),
        statistics,
        pair_plots,
        probabilistic_model,
        ground_truth_reports,
    };
    let generated_at = match &args.timestamp {
        Some(ts) => ts.clone(),
        None => Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
    };

    match build_label(auto, &manual, &modules, Generator::default(), &generated_at)? {
        BuildOutcome::Actions(actions) => {
            for a in &actions {
                writeln!(out, "ACTION: {}", a.path)?;
            }
            writeln!(err, "{} manual field(s) required; supply them via --meta", actions.len())?;
            Ok(EXIT_ACTION)
        }
        BuildOutcome::Label(doc) => {
            let json = doc.to_json();
            match &args.out {
                Some(path) => {
                    std::fs::write(path, json).with_context(|| format!("cannot write {}", path.display()))?
                }
                None => out.write_all(json.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
    }
}
