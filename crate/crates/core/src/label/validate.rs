//! Structural and numeric checks over label JSON. Every failure becomes a
//! report entry; nothing here returns an error.
//!
//! Rule ids:
//!
//! | id                   | checks                                                  |
//! |----------------------|---------------------------------------------------------|
//! | `json.malformed`     | input parses as JSON                                    |
//! | `envelope.type`      | top level is an object                                  |
//! | `envelope.field`     | envelope fields present and typed; no extras            |
//! | `schema.version`     | `schema_version` is `MAJOR.MINOR.PATCH`, supported major |
//! | `module.unknown`     | module name is one of the seven known names             |
//! | `module.required`    | metadata present                                        |
//! | `module.shape`       | module payload matches its schema                       |
//! | `metadata.field`     | every metadata field present with the right type        |
//! | `percent.format`     | `12.3%` (dataset) or `12.34%` (per column)              |
//! | `percent.mismatch`   | displayed percent agrees with the raw fraction          |
//! | `histogram.sum`      | bin counts + other = non-missing count                  |
//! | `histogram.shape`    | one count per bin or category                           |
//! | `pair.total`         | joint counts total the complete rows                    |
//! | `pearson.range`      | correlation coefficients lie in `[-1, 1]`               |
//! | `probability.sum`    | point estimates sum to 1 within 1e-6                    |
//! | `probability.shape`  | support, counts, estimates, intervals align             |
//! | `variables.duplicate`| variable names unique                                   |

use std::collections::HashSet;
use std::fmt;

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use super::{schema_major, Generator, ModuleName, ProvenancePayload, VariablesPayload, SUPPORTED_MAJOR};
use crate::ground_truth::GroundTruthPayload;
use crate::pairs::{HistogramKind, PairPlotsPayload};
use crate::posterior::ProbabilisticPayload;
use crate::stats::StatisticsPayload;

pub const PROBABILITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub rule: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}", self.path, self.rule, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, path: impl Into<String>, rule: &'static str, message: impl Into<String>) {
        self.violations.push(Violation {
            path: path.into(),
            rule,
            message: message.into(),
        });
    }
}

pub fn validate(document: &[u8]) -> ValidationReport {
    let mut report = ValidationReport::default();
    let root: Value = match serde_json::from_slice(document) {
        Ok(v) => v,
        Err(e) => {
            report.push("$", "json.malformed", e.to_string());
            return report;
        }
    };
    let Some(root) = root.as_object() else {
        report.push("$", "envelope.type", "top level must be an object");
        return report;
    };

    check_envelope(root, &mut report);
    if let Some(modules) = root.get("modules").and_then(Value::as_object) {
        check_modules(modules, &mut report);
    }
    report
}

fn check_envelope(root: &Map<String, Value>, report: &mut ValidationReport) {
    const FIELDS: [&str; 4] = ["schema_version", "generated_at", "generator", "modules"];
    for key in root.keys().filter(|k| !FIELDS.contains(&k.as_str())) {
        report.push(key.clone(), "envelope.field", "unexpected field");
    }

    match root.get("schema_version").and_then(Value::as_str) {
        None => report.push("schema_version", "envelope.field", "required string"),
        Some(v) => match schema_major(v) {
            Some(SUPPORTED_MAJOR) => {}
            Some(m) => report.push(
                "schema_version",
                "schema.version",
                format!("major version {m} unsupported; expected {SUPPORTED_MAJOR}"),
            ),
            None => report.push("schema_version", "schema.version", format!("{v:?} is not MAJOR.MINOR.PATCH")),
        },
    }
    match root.get("generated_at").and_then(Value::as_str) {
        None => report.push("generated_at", "envelope.field", "required string"),
        Some(ts) => {
            if chrono::DateTime::parse_from_rfc3339(ts).is_err() {
                report.push("generated_at", "envelope.field", format!("{ts:?} is not an ISO-8601 timestamp"));
            }
        }
    }
    match root.get("generator") {
        None => report.push("generator", "envelope.field", "required object"),
        Some(g) => {
            if let Err(e) = serde_json::from_value::<Generator>(g.clone()) {
                report.push("generator", "envelope.field", e.to_string());
            }
        }
    }
    if !root.get("modules").is_some_and(Value::is_object) {
        report.push("modules", "envelope.field", "required object");
    }
}

fn typed<T: DeserializeOwned>(path: &str, v: &Value, report: &mut ValidationReport) -> Option<T> {
    match serde_json::from_value(v.clone()) {
        Ok(t) => Some(t),
        Err(e) => {
            report.push(path, "module.shape", e.to_string());
            None
        }
    }
}

fn check_modules(modules: &Map<String, Value>, report: &mut ValidationReport) {
    for key in modules.keys() {
        if key.parse::<ModuleName>().is_err() {
            report.push(format!("modules.{key}"), "module.unknown", format!("{key:?} is not a known module"));
        }
    }
    match modules.get("metadata") {
        None => report.push("modules.metadata", "module.required", "required"),
        Some(m) => check_metadata(m, report),
    }
    if let Some(v) = modules.get("provenance") {
        let path = "modules.provenance";
        if let Some(p) = typed::<ProvenancePayload>(path, v, report) {
            for (role, c) in [("source", &p.source), ("author", &p.author)] {
                if c.as_ref().is_some_and(|c| c.name.trim().is_empty()) {
                    report.push(format!("{path}.{role}.name"), "module.shape", "name must be non-empty");
                }
            }
        }
    }
    if let Some(v) = modules.get("variables") {
        if let Some(p) = typed::<VariablesPayload>("modules.variables", v, report) {
            let mut seen = HashSet::new();
            for (i, e) in p.entries.iter().enumerate() {
                if !seen.insert(&e.name) {
                    report.push(
                        format!("modules.variables.entries[{i}].name"),
                        "variables.duplicate",
                        format!("{:?} appears more than once", e.name),
                    );
                }
            }
        }
    }
    if let Some(v) = modules.get("statistics") {
        if let Some(p) = typed::<StatisticsPayload>("modules.statistics", v, report) {
            check_statistics(&p, report);
        }
    }
    if let Some(v) = modules.get("pair_plots") {
        if let Some(p) = typed::<PairPlotsPayload>("modules.pair_plots", v, report) {
            check_pair_plots(&p, report);
        }
    }
    if let Some(v) = modules.get("probabilistic_model") {
        if let Some(p) = typed::<ProbabilisticPayload>("modules.probabilistic_model", v, report) {
            check_probabilistic(&p, report);
        }
    }
    if let Some(v) = modules.get("ground_truth_correlations") {
        if let Some(p) = typed::<GroundTruthPayload>("modules.ground_truth_correlations", v, report) {
            check_ground_truth(&p, report);
        }
    }
}

fn is_percent(s: &str, decimals: usize) -> bool {
    let Some(body) = s.strip_suffix('%') else { return false };
    let Some((int, frac)) = body.split_once('.') else { return false };
    !int.is_empty() && int.bytes().all(|b| b.is_ascii_digit()) && frac.len() == decimals && frac.bytes().all(|b| b.is_ascii_digit())
}

fn check_percent(path: String, s: &str, decimals: usize, fraction: Option<f64>, report: &mut ValidationReport) {
    if !is_percent(s, decimals) {
        report.push(path, "percent.format", format!("{s:?} is not a {decimals}-decimal percent"));
        return;
    }
    if let Some(f) = fraction {
        let shown: f64 = s.trim_end_matches('%').parse().unwrap();
        let half_step = 0.5 * 10f64.powi(-(decimals as i32));
        if (shown - 100.0 * f).abs() > half_step + 1e-9 {
            report.push(path, "percent.mismatch", format!("{s} disagrees with fraction {f}"));
        }
    }
}

fn check_metadata(v: &Value, report: &mut ValidationReport) {
    let Some(m) = v.as_object() else {
        report.push("modules.metadata", "module.shape", "metadata must be an object");
        return;
    };
    type Check = fn(&Value) -> bool;
    let string: Check = Value::is_string;
    let opt_string: Check = |v| v.is_string() || v.is_null();
    let count: Check = Value::is_u64;
    let fraction: Check = |v| v.as_f64().is_some_and(|f| (0.0..=1.0).contains(&f));
    let keywords: Check = |v| v.as_array().is_some_and(|a| a.iter().all(Value::is_string));
    let range: Check = |v| {
        v.as_object().is_some_and(|r| {
            r.len() == 2 && ["from", "to"].iter().all(|k| r.get(*k).is_some_and(|x| x.is_string() || x.is_null()))
        })
    };
    let fields: [(&str, Check, &str); 14] = [
        ("filename", string, "string"),
        ("format", string, "string"),
        ("url", opt_string, "string or null"),
        ("domain", opt_string, "string or null"),
        ("keywords", keywords, "list of strings"),
        ("type", string, "string"),
        ("rows", count, "non-negative integer"),
        ("columns", count, "non-negative integer"),
        ("missing_pct", string, "string"),
        ("missing_fraction", fraction, "number in [0, 1]"),
        ("license", opt_string, "string or null"),
        ("released", opt_string, "string or null"),
        ("range", range, "object with from/to"),
        ("description", opt_string, "string or null"),
    ];
    let known: HashSet<&str> = fields.iter().map(|f| f.0).collect();
    for key in m.keys().filter(|k| !known.contains(k.as_str())) {
        report.push(format!("modules.metadata.{key}"), "metadata.field", "unexpected field");
    }
    let mut shape_ok = true;
    for (key, check, expected) in fields {
        match m.get(key) {
            None => {
                shape_ok = false;
                report.push(format!("modules.metadata.{key}"), "metadata.field", "required");
            }
            Some(v) if !check(v) => {
                shape_ok = false;
                report.push(format!("modules.metadata.{key}"), "metadata.field", format!("expected {expected}"));
            }
            Some(_) => {}
        }
    }
    if shape_ok {
        let pct = m["missing_pct"].as_str().unwrap();
        check_percent("modules.metadata.missing_pct".into(), pct, 1, m["missing_fraction"].as_f64(), report);
    }
}

fn check_statistics(p: &StatisticsPayload, report: &mut ValidationReport) {
    for (stratum, list) in [("ordinal", &p.ordinal), ("nominal", &p.nominal)] {
        for (i, c) in list.iter().enumerate() {
            let path = format!("modules.statistics.{stratum}[{i}].missing_pct");
            check_percent(path, &c.missing_pct, 2, Some(c.missing_fraction), report);
        }
    }
    for (stratum, list) in [("continuous", &p.continuous), ("discrete", &p.discrete)] {
        for (i, n) in list.iter().enumerate() {
            let path = format!("modules.statistics.{stratum}[{i}]");
            check_percent(format!("{path}.missing_pct"), &n.missing_pct, 2, Some(n.missing_fraction), report);
            check_percent(format!("{path}.zeros_pct"), &n.zeros_pct, 2, None, report);
        }
    }
}

fn check_r(path: String, r: Option<f64>, report: &mut ValidationReport) {
    if let Some(r) = r {
        if !(-1.0..=1.0).contains(&r) {
            report.push(path, "pearson.range", format!("{r} is outside [-1, 1]"));
        }
    }
}

fn check_pair_plots(p: &PairPlotsPayload, report: &mut ValidationReport) {
    for (i, h) in p.histograms.iter().enumerate() {
        let path = format!("modules.pair_plots.histograms[{i}]");
        let bins = match h.kind {
            HistogramKind::Numeric => h.bin_edges.as_ref().map(|e| e.len().saturating_sub(1)),
            HistogramKind::Categorical => h.categories.as_ref().map(Vec::len),
        };
        if bins != Some(h.counts.len()) {
            report.push(format!("{path}.counts"), "histogram.shape", "one count per bin or category expected");
        }
        let total = h.counts.iter().sum::<u64>() + h.other_count;
        if total != h.non_missing_count {
            report.push(
                format!("{path}.counts"),
                "histogram.sum",
                format!("bins total {total}, non-missing count is {}", h.non_missing_count),
            );
        }
    }
    for (i, c) in p.cells.iter().enumerate() {
        let path = format!("modules.pair_plots.cells[{i}]");
        if c.joint_total() != c.complete_rows {
            report.push(
                format!("{path}.payload"),
                "pair.total",
                format!("joint counts total {}, complete rows {}", c.joint_total(), c.complete_rows),
            );
        }
        check_r(format!("{path}.payload.pearson_r"), c.pearson_r(), report);
    }
}

fn check_probabilistic(p: &ProbabilisticPayload, report: &mut ValidationReport) {
    for (i, e) in p.entries.iter().enumerate() {
        let path = format!("modules.probabilistic_model.entries[{i}]");
        let k = e.support.len();
        if e.counts.len() != k || e.point_estimates.len() != k || e.intervals.len() != k {
            report.push(path.clone(), "probability.shape", "support, counts, point_estimates and intervals must align");
        }
        let sum: f64 = e.point_estimates.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
            report.push(format!("{path}.point_estimates"), "probability.sum", format!("sums to {sum}"));
        }
    }
}

fn check_ground_truth(p: &GroundTruthPayload, report: &mut ValidationReport) {
    for (i, rep) in p.reports.iter().enumerate() {
        for (list, entries) in [("entries", &rep.entries), ("positive", &rep.positive), ("negative", &rep.negative)] {
            for (j, e) in entries.iter().enumerate() {
                let path = format!("modules.ground_truth_correlations.reports[{i}].{list}[{j}].r");
                check_r(path, e.r, report);
            }
        }
    }
}
