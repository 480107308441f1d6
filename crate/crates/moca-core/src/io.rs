//! CSV dataset reading and assignment writing.
//!
//! The feature files this handles are plain comma-separated numeric text
//! with an optional label column and optional header row; errors carry
//! 1-based line numbers.

use std::fs;
use std::path::Path;

use crate::data_model::Dataset;
use crate::error::{MocaError, Result};

/// How to locate the label column, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    None,
    Index(usize),
    Name(String),
}

pub fn parse_csv(path: &Path, label_column: &LabelColumn, has_header: bool) -> Result<Dataset> {
    let text = fs::read_to_string(path).map_err(|e| MocaError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_csv_text(&text, label_column, has_header)
}

pub fn parse_csv_text(text: &str, label_column: &LabelColumn, has_header: bool) -> Result<Dataset> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let mut label_idx: Option<usize> = match label_column {
        LabelColumn::Index(i) => Some(*i),
        _ => None,
    };
    let mut width: Option<usize> = None;

    if has_header {
        let (line_no, header) = lines
            .next()
            .ok_or_else(|| MocaError::Csv { line: 1, reason: "file is empty".into() })?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        width = Some(cols.len());
        if let LabelColumn::Name(name) = label_column {
            label_idx = Some(cols.iter().position(|c| c == name).ok_or_else(|| MocaError::Csv {
                line: line_no,
                reason: format!("header has no column named {name:?}"),
            })?);
        }
    } else if let LabelColumn::Name(name) = label_column {
        return Err(MocaError::Csv {
            line: 1,
            reason: format!("label column {name:?} given by name but file has no header"),
        });
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    for (line_no, line) in lines {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        match width {
            None => width = Some(cells.len()),
            Some(w) if cells.len() != w => {
                return Err(MocaError::Csv {
                    line: line_no,
                    reason: format!("ragged row: {} cells, expected {w}", cells.len()),
                })
            }
            _ => {}
        }
        if let Some(li) = label_idx {
            if li >= cells.len() {
                return Err(MocaError::Csv {
                    line: line_no,
                    reason: format!("label column {li} out of range for {} cells", cells.len()),
                });
            }
        }
        let mut row = Vec::with_capacity(cells.len());
        for (ci, cell) in cells.iter().enumerate() {
            if label_idx == Some(ci) {
                labels.push(cell.to_string());
            } else {
                row.push(cell.parse::<f64>().map_err(|_| MocaError::Csv {
                    line: line_no,
                    reason: format!("non-numeric feature cell {cell:?} in column {ci}"),
                })?);
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(MocaError::Csv { line: 1, reason: "no data rows".into() });
    }
    let labels = if label_idx.is_some() { Some(labels) } else { None };
    Dataset::from_rows(rows, labels).map_err(|e| MocaError::Csv {
        line: 1,
        reason: e.to_string(),
    })
}

/// Writes assignments as `object_id,cluster_id` lines with a header.
pub fn assignments_to_csv(assignment: &[usize]) -> String {
    let mut out = String::from("object_id,cluster_id\n");
    for (i, &c) in assignment.iter().enumerate() {
        out.push_str(&format!("{i},{c}\n"));
    }
    out
}

/// Reads an `object_id,cluster_id` file back into a per-object assignment.
pub fn assignments_from_csv(text: &str) -> Result<Vec<usize>> {
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (obj, cluster) = line.split_once(',').ok_or_else(|| MocaError::Csv {
            line: i + 1,
            reason: "expected object_id,cluster_id".into(),
        })?;
        let parse = |s: &str| {
            s.trim().parse::<usize>().map_err(|e| MocaError::Csv {
                line: i + 1,
                reason: format!("bad id {s:?}: {e}"),
            })
        };
        pairs.push((parse(obj)?, parse(cluster)?));
    }
    pairs.sort_unstable();
    for (pos, &(obj, _)) in pairs.iter().enumerate() {
        if obj != pos {
            return Err(MocaError::Csv {
                line: 1,
                reason: format!("object ids are not a contiguous 0..n range (missing {pos})"),
            });
        }
    }
    Ok(pairs.into_iter().map(|(_, c)| c).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_features_and_named_label() {
        let text = "x,y,class\n1.0,2.0,a\n3.0,4.0,b\n";
        let data = parse_csv_text(text, &LabelColumn::Name("class".into()), true).unwrap();
        assert_eq!(data.len(), 2);
        assert_eq!(data.dim(), 2);
        assert_eq!(data.labels().unwrap(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn parses_indexed_label_without_header() {
        let text = "1.0,a\n2.0,b\n";
        let data = parse_csv_text(text, &LabelColumn::Index(1), false).unwrap();
        assert_eq!(data.dim(), 1);
        assert_eq!(data.labels().unwrap().len(), 2);
    }

    #[test]
    fn ragged_row_names_its_line() {
        let text = "1.0,2.0\n3.0,4.0\n5.0\n6.0,7.0\n";
        let err = parse_csv_text(text, &LabelColumn::None, false).unwrap_err();
        match err {
            MocaError::Csv { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn non_numeric_cell_names_its_line() {
        let text = "1.0\nfoo\n2.0\n";
        let err = parse_csv_text(text, &LabelColumn::None, false).unwrap_err();
        match err {
            MocaError::Csv { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_file_is_an_error() {
        assert!(parse_csv_text("", &LabelColumn::None, false).is_err());
    }

    #[test]
    fn assignment_round_trip() {
        let assignment = vec![0, 2, 1, 2, 0];
        let csv = assignments_to_csv(&assignment);
        assert_eq!(assignments_from_csv(&csv).unwrap(), assignment);
    }

    #[test]
    fn real_iris_file_parses() {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../data/iris.csv");
        let data = parse_csv(&path, &LabelColumn::Name("class".into()), true).unwrap();
        assert_eq!(data.len(), 150);
        assert_eq!(data.dim(), 4);
        let ids = data.label_ids().unwrap();
        assert_eq!(ids.iter().max(), Some(&2));
    }
}
