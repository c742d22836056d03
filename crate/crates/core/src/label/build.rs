use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::{
    Contact, DateRange, Generator, LabelDocument, MetadataPayload, ModuleName, Modules, ProvenancePayload,
    VariableEntry, VariablesPayload, SCHEMA_VERSION,
};
use crate::error::{Error, Result};
use crate::ground_truth::{CorrelationReport, GroundTruthPayload, GroundTruthSource};
use crate::pairs::PairPlotsPayload;
use crate::posterior::ProbabilisticPayload;
use crate::stats::{DatasetMissing, StatisticsPayload};

/// Fields the maker can fill in from the data alone.
#[derive(Debug, Clone)]
pub struct AutoMetadata {
    pub filename: String,
    pub format: String,
    pub rows: u64,
    pub columns: u64,
    pub missing: DatasetMissing,
}

#[derive(Debug, Clone)]
pub struct AutoPayloads {
    pub metadata: AutoMetadata,
    pub columns: Vec<String>,
    pub statistics: Option<StatisticsPayload>,
    pub pair_plots: Option<PairPlotsPayload>,
    pub probabilistic_model: Option<ProbabilisticPayload>,
    pub ground_truth_reports: Option<Vec<CorrelationReport>>,
}

// Manual input mirrors the label's module shapes, with every field
// optional so that gaps can be reported rather than rejected.

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
pub struct ManualMetadata {
    pub filename: Option<String>,
    pub format: Option<String>,
    pub url: Option<String>,
    pub domain: Option<String>,
    #[serde(default)]
    pub keywords: Vec<String>,
    #[serde(rename = "type")]
    pub data_type: Option<String>,
    pub license: Option<String>,
    pub released: Option<String>,
    #[serde(default)]
    pub range: DateRange,
    pub description: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
pub struct ManualContact {
    pub name: Option<String>,
    pub url: Option<String>,
    pub email: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
pub struct ManualProvenance {
    pub source: Option<ManualContact>,
    pub author: Option<ManualContact>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
pub struct ManualVariableEntry {
    pub name: String,
    pub description: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
pub struct ManualVariables {
    #[serde(default)]
    pub entries: Vec<ManualVariableEntry>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
pub struct ManualGroundTruthSource {
    pub name: Option<String>,
    pub url: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
pub struct ManualGroundTruth {
    pub ground_truth: Option<ManualGroundTruthSource>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
pub struct ManualModules {
    pub metadata: Option<ManualMetadata>,
    pub provenance: Option<ManualProvenance>,
    pub variables: Option<ManualVariables>,
    pub ground_truth_correlations: Option<ManualGroundTruth>,
}

/// Human-supplied fields, shaped like a label: `{"modules": {...}}`.
/// Unknown keys (for example the computed fields of an existing label) are
/// ignored.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
pub struct ManualInput {
    #[serde(default)]
    pub modules: ManualModules,
}

impl ManualInput {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionItem {
    /// JSON path of the field to supply in the manual input.
    pub path: String,
    pub hint: String,
}

pub type ActionList = Vec<ActionItem>;

#[derive(Debug, Clone, PartialEq)]
pub enum BuildOutcome {
    Label(Box<LabelDocument>),
    Actions(ActionList),
}

fn filled(s: &Option<String>) -> Option<String> {
    s.as_ref().map(|v| v.trim()).filter(|v| !v.is_empty()).map(str::to_string)
}

fn contact(
    path: &str,
    c: &Option<ManualContact>,
    required: bool,
    actions: &mut ActionList,
) -> Option<Contact> {
    match (c, required) {
        (None, false) => None,
        (c, _) => {
            let c = c.clone().unwrap_or_default();
            match filled(&c.name) {
                Some(name) => Some(Contact {
                    name,
                    url: c.url,
                    email: c.email,
                }),
                None => {
                    actions.push(ActionItem {
                        path: format!("{path}.name"),
                        hint: "contact name".into(),
                    });
                    None
                }
            }
        }
    }
}

fn missing_auto(module: ModuleName) -> Error {
    Error::Label(format!("module {module} requested but no computed payload was supplied"))
}

/// Merges computed payloads with manual input for the requested modules.
/// Metadata is always included. Returns the list of manual fields still
/// needed instead of a label when any are absent.
pub fn build_label(
    auto: AutoPayloads,
    manual: &ManualInput,
    requested: &BTreeSet<ModuleName>,
    generator: Generator,
    generated_at: &str,
) -> Result<BuildOutcome> {
    let wants = |m: ModuleName| requested.contains(&m);
    let mm = &manual.modules;

    if let Some(vars) = &mm.variables {
        let known: HashSet<&str> = auto.columns.iter().map(String::as_str).collect();
        let unknown: Vec<String> = vars
            .entries
            .iter()
            .filter(|e| !known.contains(e.name.as_str()))
            .map(|e| e.name.clone())
            .collect();
        if !unknown.is_empty() {
            return Err(Error::UnknownVariables(unknown));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = vars.entries.iter().find(|e| !seen.insert(e.name.as_str())) {
            return Err(Error::Label(format!("variable {:?} described twice", dup.name)));
        }
    }

    let mut actions = ActionList::new();

    let meta = mm.metadata.clone().unwrap_or_default();
    let description = filled(&meta.description);
    if description.is_none() {
        actions.push(ActionItem {
            path: "modules.metadata.description".into(),
            hint: "free-text description of the dataset".into(),
        });
    }
    let a = &auto.metadata;
    let metadata = MetadataPayload {
        filename: filled(&meta.filename).unwrap_or_else(|| a.filename.clone()),
        format: filled(&meta.format).unwrap_or_else(|| a.format.clone()),
        url: meta.url,
        domain: meta.domain,
        keywords: meta.keywords,
        data_type: filled(&meta.data_type).unwrap_or_else(|| "tabular".to_string()),
        rows: a.rows,
        columns: a.columns,
        missing_pct: a.missing.pct(),
        missing_fraction: a.missing.fraction(),
        license: meta.license,
        released: meta.released,
        range: meta.range,
        description,
    };

    let provenance = if wants(ModuleName::Provenance) {
        let p = mm.provenance.clone().unwrap_or_default();
        let source = contact("modules.provenance.source", &p.source, true, &mut actions);
        let author = contact("modules.provenance.author", &p.author, false, &mut actions);
        Some(ProvenancePayload { source, author })
    } else {
        None
    };

    let variables = if wants(ModuleName::Variables) {
        let given = mm.variables.clone().unwrap_or_default();
        let mut entries = Vec::new();
        for (i, col) in auto.columns.iter().enumerate() {
            let desc = given.entries.iter().find(|e| &e.name == col).and_then(|e| filled(&e.description));
            match desc {
                Some(description) => entries.push(VariableEntry {
                    name: col.clone(),
                    description,
                }),
                None => actions.push(ActionItem {
                    path: format!("modules.variables.entries[{i}].description"),
                    hint: format!("description of column {col:?}"),
                }),
            }
        }
        Some(VariablesPayload { entries })
    } else {
        None
    };

    let statistics = wants(ModuleName::Statistics)
        .then(|| auto.statistics.ok_or_else(|| missing_auto(ModuleName::Statistics)))
        .transpose()?;
    let pair_plots = wants(ModuleName::PairPlots)
        .then(|| auto.pair_plots.ok_or_else(|| missing_auto(ModuleName::PairPlots)))
        .transpose()?;
    let probabilistic_model = wants(ModuleName::ProbabilisticModel)
        .then(|| auto.probabilistic_model.ok_or_else(|| missing_auto(ModuleName::ProbabilisticModel)))
        .transpose()?;

    let ground_truth_correlations = if wants(ModuleName::GroundTruthCorrelations) {
        let reports = auto
            .ground_truth_reports
            .ok_or_else(|| missing_auto(ModuleName::GroundTruthCorrelations))?;
        let src = mm
            .ground_truth_correlations
            .as_ref()
            .and_then(|g| g.ground_truth.clone())
            .unwrap_or_default();
        match filled(&src.name) {
            Some(name) => Some(GroundTruthPayload {
                ground_truth: GroundTruthSource { name, url: src.url },
                reports,
            }),
            None => {
                actions.push(ActionItem {
                    path: "modules.ground_truth_correlations.ground_truth.name".into(),
                    hint: "name of the reference dataset".into(),
                });
                None
            }
        }
    } else {
        None
    };

    if !actions.is_empty() {
        return Ok(BuildOutcome::Actions(actions));
    }
    Ok(BuildOutcome::Label(Box::new(LabelDocument {
        schema_version: SCHEMA_VERSION.to_string(),
        generated_at: generated_at.to_string(),
        generator,
        modules: Modules {
            metadata,
            provenance,
            variables,
            statistics,
            pair_plots,
            probabilistic_model,
            ground_truth_correlations,
        },
    })))
}
