//! Text dataset format.
//!
//! ```text
//! # comment
//! @problemName Example
//! @univariate true
//! @classLabel true a b
//! @data
//! 1.0,2.0,3.0:a
//! 4.0,5.0,6.0:b
//! ```
//!
//! Each body line holds `:`-separated dimensions of comma-separated values,
//! followed by the class label.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::data::{Cell, ColumnKind, Panel, TimeSeries};
use crate::error::{Error, Result};
use crate::estimator::Label;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub univariate: bool,
    /// Declared class labels, if the header lists them.
    pub class_labels: Option<Vec<Label>>,
    pub panel: Panel,
    pub labels: Vec<Label>,
}

fn parse_err(line: usize, column: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        reason: reason.into(),
    }
}

/// 1-based character column of `part`, which must be a subslice of `line`.
fn column_of(line: &str, part: &str) -> usize {
    let offset = part.as_ptr() as usize - line.as_ptr() as usize;
    line[..offset].chars().count() + 1
}

pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let mut name = None;
    let mut univariate = None;
    let mut class_labels: Option<Vec<Label>> = None;
    let mut in_data = false;
    let mut dims: Option<usize> = None;
    let mut columns: Vec<Vec<Cell>> = Vec::new();
    let mut labels = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.split('\n').enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let col = column_of(line, trimmed);
        if !in_data {
            let mut words = trimmed.split_whitespace();
            let key = words.next().expect("non-empty line");
            let rest: Vec<&str> = words.collect();
            match key.to_ascii_lowercase().as_str() {
                "@problemname" => match rest.as_slice() {
                    [n] => name = Some(n.to_string()),
                    _ => return Err(parse_err(line_no, col, "@problemName takes one name")),
                },
                "@univariate" => match rest.as_slice() {
                    ["true"] => univariate = Some(true),
                    ["false"] => univariate = Some(false),
                    _ => return Err(parse_err(line_no, col, "@univariate takes true or false")),
                },
                "@classlabel" => match rest.split_first() {
                    Some((&"true", ls)) if !ls.is_empty() => {
                        class_labels = Some(ls.iter().map(|s| s.to_string()).collect())
                    }
                    Some((&"false", [])) => class_labels = None,
                    _ => return Err(parse_err(line_no, col, "@classLabel takes `true <labels>` or `false`")),
                },
                "@data" if rest.is_empty() => {
                    if name.is_none() {
                        return Err(parse_err(line_no, col, "missing @problemName before @data"));
                    }
                    if univariate.is_none() {
                        return Err(parse_err(line_no, col, "missing @univariate before @data"));
                    }
                    in_data = true;
                }
                _ => return Err(parse_err(line_no, col, format!("unrecognised header `{key}`"))),
            }
            continue;
        }

        let fields: Vec<&str> = line.split(':').collect();
        if fields.len() < 2 {
            return Err(parse_err(line_no, col, "expected dimensions followed by `:label`"));
        }
        let (label_field, dim_fields) = fields.split_last().expect("at least two fields");
        let label = label_field.trim();
        if label.is_empty() {
            return Err(parse_err(line_no, column_of(line, label_field), "empty class label"));
        }
        if let Some(declared) = &class_labels {
            if !declared.iter().any(|l| l == label) {
                return Err(parse_err(
                    line_no,
                    column_of(line, label),
                    format!("label `{label}` not declared in @classLabel"),
                ));
            }
        }
        match dims {
            None => {
                if univariate == Some(true) && dim_fields.len() != 1 {
                    return Err(parse_err(line_no, col, "univariate dataset with several dimensions"));
                }
                dims = Some(dim_fields.len());
                columns = vec![Vec::new(); dim_fields.len()];
            }
            Some(d) if d != dim_fields.len() => {
                return Err(parse_err(
                    line_no,
                    col,
                    format!("ragged dimensions: expected {d}, found {}", dim_fields.len()),
                ));
            }
            Some(_) => {}
        }
        for (d, field) in dim_fields.iter().enumerate() {
            let mut values = Vec::new();
            for token in field.split(',') {
                let t = token.trim();
                let tcol = column_of(line, if t.is_empty() { token } else { t });
                let v: f64 = t
                    .parse()
                    .map_err(|_| parse_err(line_no, tcol, format!("`{t}` is not a number")))?;
                if !v.is_finite() {
                    return Err(parse_err(line_no, tcol, format!("`{t}` is not finite")));
                }
                values.push(v);
            }
            columns[d].push(Cell::Series(TimeSeries::from_values(values)?));
        }
        labels.push(label.to_string());
    }

    if !in_data {
        return Err(parse_err(last_line.max(1), 1, "missing @data section"));
    }
    if labels.is_empty() {
        return Err(parse_err(last_line.max(1), 1, "no data lines"));
    }
    let panel = Panel::new(
        columns
            .into_iter()
            .enumerate()
            .map(|(d, cells)| (format!("dim_{d}"), cells))
            .collect(),
    )?;
    Ok(Dataset {
        name: name.expect("checked at @data"),
        univariate: univariate.expect("checked at @data"),
        class_labels,
        panel,
        labels,
    })
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    parse_dataset(&text)
}

fn check_token(kind: &str, s: &str) -> Result<()> {
    if s.is_empty() || s.contains([':', ',']) || s.chars().any(char::is_whitespace) {
        return Err(Error::InvalidParameter {
            name: kind.into(),
            reason: format!("`{s}` must be non-empty without `:`, `,` or whitespace"),
        });
    }
    Ok(())
}

/// Writes a dataset in the text format. Values use the shortest
/// representation that parses back to the same number; time indices are not
/// stored.
pub fn serialize_dataset(ds: &Dataset) -> Result<String> {
    check_token("name", &ds.name)?;
    if ds.labels.len() != ds.panel.n_instances() {
        return Err(Error::LengthMismatch {
            expected: ds.panel.n_instances(),
            actual: ds.labels.len(),
        });
    }
    for l in &ds.labels {
        check_token("label", l)?;
    }
    let columns = ds
        .panel
        .column_names()
        .iter()
        .map(|c| {
            if ds.panel.column_kind(c)? != ColumnKind::Series {
                return Err(Error::NotASeriesColumn(c.clone()));
            }
            ds.panel.series_column(c)
        })
        .collect::<Result<Vec<_>>>()?;
    if ds.univariate && columns.len() != 1 {
        return Err(Error::InvalidParameter {
            name: "univariate".into(),
            reason: format!("panel has {} series columns", columns.len()),
        });
    }

    let mut out = String::new();
    writeln!(out, "@problemName {}", ds.name).expect("writing to a string");
    writeln!(out, "@univariate {}", ds.univariate).expect("writing to a string");
    let declared: Vec<&str> = match &ds.class_labels {
        Some(ls) => {
            for l in ls {
                check_token("label", l)?;
            }
            ls.iter().map(String::as_str).collect()
        }
        None => ds.labels.iter().map(String::as_str).collect::<BTreeSet<_>>().into_iter().collect(),
    };
    writeln!(out, "@classLabel true {}", declared.join(" ")).expect("writing to a string");
    out.push_str("@data\n");
    for (i, label) in ds.labels.iter().enumerate() {
        for col in &columns {
            let values: Vec<String> = col[i].values().iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&values.join(","));
            out.push(':');
        }
        out.push_str(label);
        out.push('\n');
    }
    Ok(out)
}
