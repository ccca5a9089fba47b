//! Numeric CSV tables with a versioned schema line.

use std::path::Path;

use crate::error::{FilamentError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    /// Schema name; the first line reads `# schema: <name>/<version>`.
    pub schema: String,
    pub version: u32,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(schema: &str, version: u32, columns: &[&str]) -> CsvTable {
        CsvTable { schema: schema.into(), version, columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width for schema {}", self.schema);
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| FilamentError::InvalidArgument(format!("no column '{name}' in {}", self.schema)))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Shortest round-trip formatting, so reading back gives identical values.
    pub fn to_text(&self) -> String {
        let mut w = csv::Writer::from_writer(format!("# schema: {}/{}\n", self.schema, self.version).into_bytes());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:e}"))).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }

    pub fn parse(text: &str) -> Result<CsvTable> {
        let bad = |m: String| FilamentError::InvalidArgument(m);
        let (head, body) = text.split_once('\n').ok_or_else(|| bad("missing schema line".into()))?;
        let tag = head.strip_prefix("# schema: ").ok_or_else(|| bad(format!("missing schema line: '{head}'")))?;
        let (schema, version) = tag.rsplit_once('/').ok_or_else(|| bad(format!("malformed schema tag '{tag}'")))?;
        let version = version.trim().parse().map_err(|_| bad(format!("malformed schema version '{version}'")))?;
        let mut reader = csv::Reader::from_reader(body.as_bytes());
        let columns: Vec<String> = reader.headers().map_err(|e| bad(e.to_string()))?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for (k, record) in reader.records().enumerate() {
            let record = record.map_err(|e| bad(format!("row {k}: {e}")))?;
            let row = record
                .iter()
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| bad(format!("row {k}: {e}")))?;
            rows.push(row);
        }
        Ok(CsvTable { schema: schema.into(), version, columns, rows })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| FilamentError::IoFailure(format!("{}: {e}", path.display())))
    }

    pub fn read(path: &Path) -> Result<CsvTable> {
        let text = std::fs::read_to_string(path).map_err(|e| FilamentError::IoFailure(format!("{}: {e}", path.display())))?;
        CsvTable::parse(&text)
    }
}
