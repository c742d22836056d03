//! The label document, its canonical JSON form, and the human-authored
//! modules (metadata, provenance, variables).
//!
//! Wire layout:
//!
//! ```text
//! {
//!   "schema_version": "1.0.0",
//!   "generated_at": "2024-01-01T00:00:00Z",
//!   "generator": { "name": ..., "version": ... },
//!   "modules": {
//!     "metadata": {...},            // always present
//!     "provenance": {...},
//!     "variables": {...},
//!     "statistics": {...},
//!     "pair_plots": {...},
//!     "probabilistic_model": {...},
//!     "ground_truth_correlations": {...}
//!   }
//! }
//! ```
//!
//! Modules appear in the order above; absent modules are omitted.

mod build;
mod validate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::to_canonical_json;
use crate::ground_truth::GroundTruthPayload;
use crate::pairs::PairPlotsPayload;
use crate::posterior::ProbabilisticPayload;
use crate::stats::StatisticsPayload;

pub use build::{build_label, ActionItem, ActionList, AutoMetadata, AutoPayloads, BuildOutcome, ManualInput};
pub use validate::{validate, ValidationReport, Violation};

pub const SCHEMA_VERSION: &str = "1.0.0";
pub const SUPPORTED_MAJOR: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModuleName {
    Metadata,
    Provenance,
    Variables,
    Statistics,
    PairPlots,
    ProbabilisticModel,
    GroundTruthCorrelations,
}

impl ModuleName {
    pub const ALL: [ModuleName; 7] = [
        ModuleName::Metadata,
        ModuleName::Provenance,
        ModuleName::Variables,
        ModuleName::Statistics,
        ModuleName::PairPlots,
        ModuleName::ProbabilisticModel,
        ModuleName::GroundTruthCorrelations,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModuleName::Metadata => "metadata",
            ModuleName::Provenance => "provenance",
            ModuleName::Variables => "variables",
            ModuleName::Statistics => "statistics",
            ModuleName::PairPlots => "pair_plots",
            ModuleName::ProbabilisticModel => "probabilistic_model",
            ModuleName::GroundTruthCorrelations => "ground_truth_correlations",
        }
    }
}

impl fmt::Display for ModuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModuleName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModuleName::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Label(format!("unknown module {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub name: String,
    pub version: String,
}

impl Default for Generator {
    fn default() -> Self {
        Self {
            name: "dnl".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DateRange {
    pub from: Option<String>,
    pub to: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetadataPayload {
    pub filename: String,
    pub format: String,
    pub url: Option<String>,
    pub domain: Option<String>,
    pub keywords: Vec<String>,
    #[serde(rename = "type")]
    pub data_type: String,
    pub rows: u64,
    pub columns: u64,
    /// One decimal, e.g. `5.2%`.
    pub missing_pct: String,
    pub missing_fraction: f64,
    pub license: Option<String>,
    /// Free-form, e.g. `JAN 2017`.
    pub released: Option<String>,
    pub range: DateRange,
    pub description: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Contact {
    pub name: String,
    pub url: Option<String>,
    pub email: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvenancePayload {
    pub source: Option<Contact>,
    pub author: Option<Contact>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableEntry {
    pub name: String,
    pub description: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariablesPayload {
    pub entries: Vec<VariableEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Modules {
    pub metadata: MetadataPayload,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<ProvenancePayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<VariablesPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statistics: Option<StatisticsPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_plots: Option<PairPlotsPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilistic_model: Option<ProbabilisticPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth_correlations: Option<GroundTruthPayload>,
}

impl Modules {
    pub fn present(&self) -> Vec<ModuleName> {
        let flags = [
            true,
            self.provenance.is_some(),
            self.variables.is_some(),
            self.statistics.is_some(),
            self.pair_plots.is_some(),
            self.probabilistic_model.is_some(),
            self.ground_truth_correlations.is_some(),
        ];
        ModuleName::ALL
            .into_iter()
            .zip(flags)
            .filter_map(|(m, on)| on.then_some(m))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelDocument {
    pub schema_version: String,
    pub generated_at: String,
    pub generator: Generator,
    pub modules: Modules,
}

pub(crate) fn schema_major(version: &str) -> Option<u64> {
    let parts: Vec<&str> = version.split('.').collect();
    if parts.len() != 3 || parts.iter().any(|p| p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit())) {
        return None;
    }
    parts[0].parse().ok()
}

impl LabelDocument {
    /// Canonical bytes; see [`crate::format::to_canonical_json`].
    pub fn to_json(&self) -> String {
        to_canonical_json(self).expect("label payloads hold only finite numbers")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: LabelDocument = serde_json::from_str(text)?;
        match schema_major(&doc.schema_version) {
            Some(SUPPORTED_MAJOR) => Ok(doc),
            _ => Err(Error::Label(format!(
                "unsupported schema_version {:?}; expected {SUPPORTED_MAJOR}.x.y",
                doc.schema_version
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn metadata_only() -> LabelDocument {
        LabelDocument {
            schema_version: SCHEMA_VERSION.into(),
            generated_at: "2024-01-01T00:00:00Z".into(),
            generator: Generator::default(),
            modules: Modules {
                metadata: MetadataPayload {
                    filename: "data.csv".into(),
                    format: "csv".into(),
                    url: None,
                    domain: None,
                    keywords: vec![],
                    data_type: "tabular".into(),
                    rows: 500,
                    columns: 18,
                    missing_pct: "5.2%".into(),
                    missing_fraction: 0.052,
                    license: Some("cc".into()),
                    released: Some("JAN 2017".into()),
                    range: DateRange {
                        from: Some("AUG 2013".into()),
                        to: Some("DEC 2015".into()),
                    },
                    description: Some("payments".into()),
                },
                provenance: None,
                variables: None,
                statistics: None,
                pair_plots: None,
                probabilistic_model: None,
                ground_truth_correlations: None,
            },
        }
    }

    #[test]
    fn minimum_label_has_one_module() {
        let doc = metadata_only();
        let v: serde_json::Value = serde_json::from_str(&doc.to_json()).unwrap();
        assert_eq!(v["modules"].as_object().unwrap().len(), 1);
        assert_eq!(doc.modules.present(), vec![ModuleName::Metadata]);
    }

    #[test]
    fn canonical_fixpoint() {
        let a = metadata_only().to_json();
        let b = LabelDocument::from_json(&a).unwrap().to_json();
        assert_eq!(a, b);
        assert!(a.starts_with("{\n  \"schema_version\": \"1.0.0\",\n  \"generated_at\""));
        assert!(!a.contains('\r'));
        assert!(a.lines().all(|l| l == l.trim_end()));
    }

    #[test]
    fn rejects_other_major_version() {
        let mut doc = metadata_only();
        doc.schema_version = "2.0.0".into();
        assert!(LabelDocument::from_json(&doc.to_json()).is_err());
        assert_eq!(schema_major("1.2.3"), Some(1));
        assert_eq!(schema_major("1.2"), None);
    }

    #[test]
    fn module_names_round_trip() {
        for m in ModuleName::ALL {
            assert_eq!(m.as_str().parse::<ModuleName>().unwrap(), m);
        }
        assert!("comments".parse::<ModuleName>().is_err());
    }
}
