use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: expected a header row")]
    EmptyInput,

    #[error("input is not valid UTF-8: {0}")]
    Encoding(#[from] std::str::Utf8Error),

    #[error("row {row}: expected {expected} cells, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("duplicate column name {0:?}")]
    DuplicateColumn(String),

    #[error("dataset has more than {limit} rows; sample it down before labeling")]
    TooManyRows { limit: usize },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("invalid option: {0}")]
    InvalidOption(String),

    #[error("invalid column kind: {0}")]
    InvalidKind(String),

    #[error("unknown column {0:?}")]
    UnknownColumn(String),

    #[error("column {0:?} is empty")]
    EmptyColumn(String),

    #[error("column {0:?} has no non-missing values")]
    AllMissing(String),

    #[error("column {column:?}, row {row}: {value:?} is not a number")]
    NotNumeric {
        column: String,
        row: usize,
        value: String,
    },

    #[error("column {column:?} has stratum {stratum}, expected {expected}")]
    WrongStratum {
        column: String,
        stratum: String,
        expected: &'static str,
    },

    #[error("pair ({0:?}, {1:?}) refers to the same column twice")]
    SelfPair(String, String),

    #[error("pair ({a:?}, {b:?}) has {complete} complete rows; at least 2 are required")]
    TooFewCompleteRows { a: String, b: String, complete: usize },

    #[error(
        "table has {columns} columns, above the all-pairs limit of {limit}; pass an explicit pair list instead"
    )]
    TooManyColumns { columns: usize, limit: usize },

    #[error("value {value:?} not found in column {column:?}; nearest matches: {}", nearest.join(", "))]
    TargetNotFound {
        column: String,
        value: String,
        nearest: Vec<String>,
    },

    #[error("condition column {column:?} has {categories} categories; at least 2 are required")]
    TooFewCategories { column: String, categories: usize },

    #[error("per_capita aggregation requires a population column in the ground truth table")]
    MissingPopulation,

    #[error("ground truth: {0}")]
    GroundTruth(String),

    #[error("join produced {joined} matching keys; at least 3 are required")]
    JoinTooSmall { joined: usize },

    #[error("variables reference unknown columns: {}", .0.join(", "))]
    UnknownVariables(Vec<String>),

    #[error("label: {0}")]
    Label(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
