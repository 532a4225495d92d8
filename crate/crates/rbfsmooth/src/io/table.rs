use std::fs;
use std::path::Path;

use rbfsmooth_core::Points;

use super::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Delimiter {
    /// Comma if the first data line has one, else tab, else whitespace.
    #[default]
    Auto,
    Comma,
    Tab,
    Whitespace,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReadOptions {
    pub delimiter: Delimiter,
    /// Zero-based field ids to read, in order. `None` reads every field.
    pub columns: Option<Vec<usize>>,
}

/// Scattered data `(X, y)`; the last selected column holds `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    pub x: Points,
    pub y: Vec<f64>,
    pub source: String,
}

impl DataTable {
    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

fn split_fields(line: &str, delimiter: Delimiter) -> Vec<&str> {
    match delimiter {
        Delimiter::Comma => line.split(',').map(str::trim).collect(),
        Delimiter::Tab => line.split('\t').map(str::trim).collect(),
        Delimiter::Whitespace | Delimiter::Auto => line.split_whitespace().collect(),
    }
}

/// Numeric rows of a delimited text, after header detection and column
/// selection.
fn parse_rows(text: &str, source: &str, options: &ReadOptions) -> Result<Vec<Vec<f64>>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .peekable();
    let delimiter = match (options.delimiter, lines.peek()) {
        (Delimiter::Auto, Some((_, l))) if l.contains(',') => Delimiter::Comma,
        (Delimiter::Auto, Some((_, l))) if l.contains('\t') => Delimiter::Tab,
        (Delimiter::Auto, _) => Delimiter::Whitespace,
        (d, _) => d,
    };
    let parse_err = |line: usize, message: String| Error::Parse {
        source_name: source.to_string(),
        line,
        message,
    };

    let mut rows = Vec::new();
    let mut width = None;
    let mut first = true;
    for (line_no, line) in lines {
        let fields = split_fields(line, delimiter);
        let selected: Vec<usize> = match &options.columns {
            Some(cols) => cols.clone(),
            None => (0..fields.len()).collect(),
        };
        if let Some(&bad) = selected.iter().find(|&&c| c >= fields.len()) {
            return Err(parse_err(
                line_no,
                format!("column {bad} requested but the row has {} fields", fields.len()),
            ));
        }
        let values: std::result::Result<Vec<f64>, usize> = selected
            .iter()
            .map(|&c| fields[c].parse::<f64>().map_err(|_| c))
            .collect();
        let header = first && values.is_err();
        first = false;
        if header {
            width = Some(fields.len());
            continue;
        }
        match width {
            Some(w) if w != fields.len() => {
                return Err(parse_err(
                    line_no,
                    format!("expected {w} fields, found {}", fields.len()),
                ))
            }
            _ => width = Some(fields.len()),
        }
        let values = values.map_err(|c| {
            parse_err(line_no, format!("field {} `{}` is not a number", c + 1, fields[c]))
        })?;
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(parse_err(line_no, format!("non-finite value {v}")));
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(Error::Format(format!("{source}: no data rows")));
    }
    Ok(rows)
}

/// Parses a data table from text; `source` names it in error messages.
pub fn parse_table(text: &str, source: &str, options: &ReadOptions) -> Result<DataTable> {
    let rows = parse_rows(text, source, options)?;
    let width = rows[0].len();
    if width < 2 {
        return Err(Error::Format(format!(
            "{source}: a data table needs at least one coordinate column and one value column"
        )));
    }
    let d = width - 1;
    let mut coords = Vec::with_capacity(rows.len() * d);
    let mut y = Vec::with_capacity(rows.len());
    for row in &rows {
        coords.extend_from_slice(&row[..d]);
        y.push(row[d]);
    }
    Ok(DataTable {
        x: Points::new(d, coords)?,
        y,
        source: source.to_string(),
    })
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_csv(path: &Path, options: &ReadOptions) -> Result<DataTable> {
    parse_table(&read_text(path)?, &path.display().to_string(), options)
}

/// Reads a point file whose rows all have `dim` coordinates.
pub fn read_points(path: &Path, dim: usize, options: &ReadOptions) -> Result<Points> {
    let source = path.display().to_string();
    let rows = parse_rows(&read_text(path)?, &source, options)?;
    if rows[0].len() != dim {
        return Err(Error::Format(format!(
            "{source}: expected {dim} coordinates per row, found {}",
            rows[0].len()
        )));
    }
    Ok(Points::new(dim, rows.concat())?)
}
