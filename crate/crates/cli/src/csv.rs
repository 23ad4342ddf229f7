//! Minimal CSV layer. Files are plain comma-separated UTF-8 with Unix line
//! endings, no quoting (fields are sanitized on write instead), and a
//! leading `# manifest_hash=<hex>` comment tying the table to its run.

use thiserror::Error;

pub const MANIFEST_KEY: &str = "manifest_hash";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CsvError {
    #[error("csv line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Commas, newlines, and carriage returns inside a field would corrupt the
/// table; they become semicolons/spaces instead of being quoted.
fn clean(field: &str) -> String {
    if field.contains([',', '\n', '\r']) {
        field
            .replace(',', ";")
            .replace('\n', " ")
            .replace('\r', " ")
    } else {
        field.to_string()
    }
}

pub fn render(manifest_hash: &str, columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&format!("# {MANIFEST_KEY}={manifest_hash}\n"));
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        let cleaned: Vec<String> = row.iter().map(|f| clean(f)).collect();
        out.push_str(&cleaned.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub manifest_hash: Option<String>,
    /// 1-based line number of the header in the source text
    pub header_line: usize,
    pub columns: Vec<String>,
    /// 1-based line number of each data row in the source text
    pub row_lines: Vec<usize>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header_line: usize, columns: Vec<String>) -> Self {
        Table {
            manifest_hash: None,
            header_line,
            columns,
            row_lines: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn col(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn require(&self, name: &str) -> Result<usize, CsvError> {
        self.col(name).ok_or_else(|| CsvError::Parse {
            line: self.header_line,
            msg: format!("missing required column `{name}`"),
        })
    }
}

pub fn parse(text: &str) -> Result<Table, CsvError> {
    let mut manifest_hash = None;
    let mut table: Option<Table> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim_end_matches('\r');
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(value) = comment.strip_prefix(&format!("{MANIFEST_KEY}=")) {
                manifest_hash = Some(value.to_string());
            }
            continue;
        }
        match table.as_mut() {
            None => {
                let columns: Vec<String> = trimmed.split(',').map(|c| c.to_string()).collect();
                if columns.iter().any(|c| c.is_empty()) {
                    return Err(CsvError::Parse {
                        line,
                        msg: "empty column name in header".to_string(),
                    });
                }
                table = Some(Table::new(line, columns));
            }
            Some(t) => {
                let fields: Vec<String> = trimmed.split(',').map(|c| c.to_string()).collect();
                if fields.len() != t.columns.len() {
                    return Err(CsvError::Parse {
                        line,
                        msg: format!(
                            "expected {} fields, got {}",
                            t.columns.len(),
                            fields.len()
                        ),
                    });
                }
                t.row_lines.push(line);
                t.rows.push(fields);
            }
        }
    }
    let mut t = table.ok_or(CsvError::Parse {
        line: text.lines().count() + 1,
        msg: "no header line".to_string(),
    })?;
    t.manifest_hash = manifest_hash;
    Ok(t)
}

pub fn parse_f64(table: &Table, row: usize, col: usize) -> Result<f64, CsvError> {
    let field = &table.rows[row][col];
    field.parse::<f64>().map_err(|_| CsvError::Parse {
        line: table.row_lines[row],
        msg: format!(
            "column `{}`: `{field}` is not a number",
            table.columns[col]
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = render(
            "abc123",
            &["m", "risk"],
            &[
                vec!["1".into(), "0.5".into()],
                vec!["2".into(), "0.25".into()],
            ],
        );
        let t = parse(&text).unwrap();
        assert_eq!(t.manifest_hash.as_deref(), Some("abc123"));
        assert_eq!(t.columns, vec!["m", "risk"]);
        assert_eq!(t.rows.len(), 2);
        assert_eq!(parse_f64(&t, 1, 1).unwrap(), 0.25);
    }

    #[test]
    fn field_count_mismatch_reports_line() {
        let err = parse("# manifest_hash=x\na,b\n1,2\n1,2,3\n").unwrap_err();
        assert_eq!(
            err,
            CsvError::Parse {
                line: 4,
                msg: "expected 2 fields, got 3".into()
            }
        );
    }

    #[test]
    fn bad_number_reports_line_and_column() {
        let t = parse("a,b\n1,zap\n").unwrap();
        let err = parse_f64(&t, 0, 1).unwrap_err();
        match err {
            CsvError::Parse { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("zap"));
            }
        }
    }

    #[test]
    fn commas_in_fields_are_sanitized_not_quoted() {
        let text = render("h", &["id"], &[vec!["a,b".into()]]);
        let t = parse(&text).unwrap();
        assert_eq!(t.rows[0][0], "a;b");
    }

    #[test]
    fn missing_header_is_an_error() {
        assert!(matches!(parse("# only a comment\n"), Err(CsvError::Parse { .. })));
    }
}
