//! CSV ingest into an immutable, row-major [`DataTable`].
//!
//! Cells are stored verbatim. Missing cells are flagged in a mask that has
//! the same shape as the grid; the raw text is kept so that frequency tables
//! can report exactly what the file contained.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::kind::ColumnKind;

pub const DEFAULT_MISSING_TOKENS: [&str; 6] = ["", "NA", "N/A", "null", "NULL", "NaN"];
pub const DEFAULT_MAX_ROWS: usize = 100_000;

#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub missing_tokens: BTreeSet<String>,
    pub delimiter: char,
    pub type_overrides: BTreeMap<String, ColumnKind>,
    /// `None` disables the row bound.
    pub max_rows: Option<usize>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            missing_tokens: DEFAULT_MISSING_TOKENS.iter().map(|s| s.to_string()).collect(),
            delimiter: ',',
            type_overrides: BTreeMap::new(),
            max_rows: Some(DEFAULT_MAX_ROWS),
        }
    }
}

impl IngestOptions {
    fn delimiter_byte(&self) -> Result<u8> {
        let d = self.delimiter;
        if !d.is_ascii() || matches!(d, '"' | '\n' | '\r') {
            return Err(Error::InvalidOption(format!(
                "delimiter {d:?} must be an ASCII character other than a quote or newline"
            )));
        }
        Ok(d as u8)
    }

    pub fn is_missing_token(&self, raw: &str) -> bool {
        self.missing_tokens.contains(raw.trim_matches(|c: char| c.is_ascii_whitespace()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataTable {
    source_name: String,
    columns: Vec<String>,
    cells: Vec<String>,
    missing: Vec<bool>,
    row_count: usize,
}

impl DataTable {
    /// Builds a table from already-split rows. Header names are trimmed and
    /// must be unique; every row must match the header width.
    pub fn from_rows<S: Into<String>>(
        source_name: impl Into<String>,
        header: Vec<S>,
        rows: Vec<Vec<S>>,
        options: &IngestOptions,
    ) -> Result<Self> {
        let columns: Vec<String> = header
            .into_iter()
            .map(|h| h.into().trim().to_string())
            .collect();
        if columns.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut seen = HashSet::new();
        for name in &columns {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateColumn(name.clone()));
            }
        }
        if let Some(limit) = options.max_rows {
            if rows.len() > limit {
                return Err(Error::TooManyRows { limit });
            }
        }

        let width = columns.len();
        let mut cells = Vec::with_capacity(rows.len() * width);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != width {
                return Err(Error::RaggedRow {
                    row: i + 2,
                    expected: width,
                    found: row.len(),
                });
            }
            cells.extend(row.into_iter().map(Into::into));
        }
        let missing = cells.iter().map(|c| options.is_missing_token(c)).collect();
        let row_count = cells.len() / width;
        Ok(Self {
            source_name: source_name.into(),
            columns,
            cells,
            missing,
            row_count,
        })
    }

    pub fn source_name(&self) -> &str {
        &self.source_name
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn require_column(&self, name: &str) -> Result<usize> {
        self.column_index(name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn cell(&self, row: usize, col: usize) -> &str {
        &self.cells[row * self.columns.len() + col]
    }

    pub fn is_missing(&self, row: usize, col: usize) -> bool {
        self.missing[row * self.columns.len() + col]
    }

    pub fn row(&self, row: usize) -> &[String] {
        let w = self.columns.len();
        &self.cells[row * w..(row + 1) * w]
    }

    /// `(raw, is_missing)` for every row of one column, in row order.
    pub fn column(&self, col: usize) -> impl ExactSizeIterator<Item = (&str, bool)> + '_ {
        (0..self.row_count).map(move |r| (self.cell(r, col), self.is_missing(r, col)))
    }

    pub fn missing_count(&self) -> usize {
        self.missing.iter().filter(|m| **m).count()
    }

    pub fn column_missing_count(&self, col: usize) -> usize {
        self.column(col).filter(|(_, m)| *m).count()
    }

    /// Writes the table back out as CSV, quoting only where needed.
    pub fn to_csv(&self, delimiter: char) -> Result<String> {
        let opts = IngestOptions {
            delimiter,
            ..IngestOptions::default()
        };
        let mut writer = csv::WriterBuilder::new()
            .delimiter(opts.delimiter_byte()?)
            .quote_style(csv::QuoteStyle::Necessary)
            .from_writer(Vec::new());
        writer.write_record(&self.columns)?;
        for r in 0..self.row_count {
            writer.write_record(self.row(r))?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| Error::InvalidOption(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv writer emits the UTF-8 it was given"))
    }
}

/// Parses UTF-8 CSV bytes. The first record is the header; a leading BOM is
/// dropped. Ragged rows are reported by 1-based record number, counting the
/// header as record 1.
pub fn parse_csv(source_name: &str, bytes: &[u8], options: &IngestOptions) -> Result<DataTable> {
    let delimiter = options.delimiter_byte()?;
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    std::str::from_utf8(bytes)?;
    if bytes.is_empty() {
        return Err(Error::EmptyInput);
    }

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(delimiter)
        .from_reader(bytes);
    let mut records = reader.records();
    let header: Vec<String> = match records.next() {
        Some(rec) => rec?.iter().map(str::to_string).collect(),
        None => return Err(Error::EmptyInput),
    };

    let mut rows = Vec::new();
    for (i, rec) in records.enumerate() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(Error::RaggedRow {
                row: i + 2,
                expected: header.len(),
                found: rec.len(),
            });
        }
        if let Some(limit) = options.max_rows {
            if rows.len() == limit {
                return Err(Error::TooManyRows { limit });
            }
        }
        rows.push(rec.iter().map(str::to_string).collect::<Vec<_>>());
    }
    DataTable::from_rows(source_name, header, rows, options)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<DataTable> {
        parse_csv("t.csv", s.as_bytes(), &IngestOptions::default())
    }

    #[test]
    fn minimal_table() {
        let t = parse("a,b\n1,x\n2,y\n").unwrap();
        assert_eq!(t.row_count(), 2);
        assert_eq!(t.column_count(), 2);
        assert_eq!(t.cell(1, 1), "y");
    }

    #[test]
    fn quoted_delimiter_newline_and_escaped_quote() {
        let t = parse("a,b\n\"x,y\",\"line1\nline2\"\n\"say \"\"hi\"\"\",z\n").unwrap();
        assert_eq!(t.cell(0, 0), "x,y");
        assert_eq!(t.cell(0, 1), "line1\nline2");
        assert_eq!(t.cell(1, 0), "say \"hi\"");
    }

    #[test]
    fn default_missing_tokens() {
        let t = parse("a,b\nNA,1\n  null ,2\nna,3\n,4\n").unwrap();
        assert!(t.is_missing(0, 0));
        assert_eq!(t.cell(0, 0), "NA");
        assert!(t.is_missing(1, 0));
        assert_eq!(t.cell(1, 0), "  null ");
        // case-sensitive
        assert!(!t.is_missing(2, 0));
        assert!(t.is_missing(3, 0));
        assert_eq!(t.missing_count(), 3);
    }

    #[test]
    fn ragged_row_reports_record_number() {
        match parse("a,b\n1,2\n3\n") {
            Err(Error::RaggedRow { row, expected, found }) => {
                assert_eq!((row, expected, found), (3, 2, 1));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_and_duplicate_header() {
        assert!(matches!(parse(""), Err(Error::EmptyInput)));
        assert!(matches!(parse("\u{feff}"), Err(Error::EmptyInput)));
        assert!(matches!(parse("a, a\n1,2\n"), Err(Error::DuplicateColumn(c)) if c == "a"));
    }

    #[test]
    fn bom_is_stripped() {
        let t = parse("\u{feff}a,b\n1,2\n").unwrap();
        assert_eq!(t.columns()[0], "a");
    }

    #[test]
    fn invalid_utf8_rejected() {
        let r = parse_csv("t", b"a\n\xff\n", &IngestOptions::default());
        assert!(matches!(r, Err(Error::Encoding(_))));
    }

    #[test]
    fn row_limit_enforced() {
        let opts = IngestOptions {
            max_rows: Some(2),
            ..IngestOptions::default()
        };
        assert!(parse_csv("t", b"a\n1\n2\n", &opts).is_ok());
        assert!(matches!(
            parse_csv("t", b"a\n1\n2\n3\n", &opts),
            Err(Error::TooManyRows { limit: 2 })
        ));
    }

    #[test]
    fn bad_delimiter() {
        let opts = IngestOptions {
            delimiter: '"',
            ..IngestOptions::default()
        };
        assert!(matches!(parse_csv("t", b"a\n1\n", &opts), Err(Error::InvalidOption(_))));
    }

    #[test]
    fn semicolon_delimiter_round_trip() {
        let opts = IngestOptions {
            delimiter: ';',
            ..IngestOptions::default()
        };
        let t = parse_csv("t", b"a;b\n\"1;2\";x\n", &opts).unwrap();
        assert_eq!(t.cell(0, 0), "1;2");
        let again = parse_csv("t", t.to_csv(';').unwrap().as_bytes(), &opts).unwrap();
        assert_eq!(again, t);
    }
}
