use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use super::series::TimeSeries;
use crate::error::{Error, Result};

/// Scalar cell content: a real number or a categorical label.
#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    Real(f64),
    Label(Arc<str>),
}

impl Primitive {
    pub fn label(s: &str) -> Self {
        Primitive::Label(Arc::from(s))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Primitive(Primitive),
    Series(TimeSeries),
}

impl Cell {
    pub fn as_series(&self) -> Option<&TimeSeries> {
        match self {
            Cell::Series(s) => Some(s),
            Cell::Primitive(_) => None,
        }
    }
}

impl From<TimeSeries> for Cell {
    fn from(s: TimeSeries) -> Self {
        Cell::Series(s)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Primitive(Primitive::Real(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Series,
    Real,
    Label,
}

fn cell_kind(cell: &Cell) -> ColumnKind {
    match cell {
        Cell::Series(_) => ColumnKind::Series,
        Cell::Primitive(Primitive::Real(_)) => ColumnKind::Real,
        Cell::Primitive(Primitive::Label(_)) => ColumnKind::Label,
    }
}

/// Nested panel: rows are i.i.d. instances, columns are variables, and each
/// cell holds either a whole time series or a primitive.
///
/// Series in one column may differ in length and time points across rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    column_names: Vec<String>,
    columns: Vec<Vec<Cell>>,
    kinds: Vec<ColumnKind>,
    n_instances: usize,
}

impl Panel {
    /// Validates and assembles a panel from named columns.
    pub fn new(columns: Vec<(String, Vec<Cell>)>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::EmptyInput("panel needs at least one column".into()));
        }
        let mut seen = HashSet::new();
        for (name, _) in &columns {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateColumnName(name.clone()));
            }
        }
        let n_instances = columns[0].1.len();
        if let Some((name, cells)) = columns.iter().find(|(_, c)| c.len() != n_instances) {
            return Err(Error::RaggedColumns(format!(
                "column `{}` has {} cells, `{}` has {}",
                name,
                cells.len(),
                columns[0].0,
                n_instances
            )));
        }
        if n_instances == 0 {
            return Err(Error::EmptyInput("panel needs at least one instance".into()));
        }
        let mut kinds = Vec::with_capacity(columns.len());
        for (name, cells) in &columns {
            let kind = cell_kind(&cells[0]);
            if cells.iter().any(|c| cell_kind(c) != kind) {
                return Err(Error::MixedCellKinds(name.clone()));
            }
            kinds.push(kind);
        }
        let (column_names, columns) = columns.into_iter().unzip();
        Ok(Self {
            column_names,
            columns,
            kinds,
            n_instances,
        })
    }

    /// Single series column panel.
    pub fn from_series(name: &str, series: Vec<TimeSeries>) -> Result<Self> {
        Self::new(vec![(
            name.to_string(),
            series.into_iter().map(Cell::Series).collect(),
        )])
    }

    pub fn n_instances(&self) -> usize {
        self.n_instances
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn column_kind(&self, name: &str) -> Result<ColumnKind> {
        Ok(self.kinds[self.column_position(name)?])
    }

    pub fn column_position(&self, name: &str) -> Result<usize> {
        self.column_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::NoSuchColumn(name.to_string()))
    }

    pub fn column(&self, name: &str) -> Result<&[Cell]> {
        Ok(&self.columns[self.column_position(name)?])
    }

    /// Borrowed series of a series column, one per instance.
    pub fn series_column(&self, name: &str) -> Result<Vec<&TimeSeries>> {
        let pos = self.column_position(name)?;
        if self.kinds[pos] != ColumnKind::Series {
            return Err(Error::NotASeriesColumn(name.to_string()));
        }
        Ok(self.columns[pos]
            .iter()
            .filter_map(Cell::as_series)
            .collect())
    }

    /// Names of all series columns in column order.
    pub fn series_column_names(&self) -> Vec<&str> {
        self.column_names
            .iter()
            .zip(&self.kinds)
            .filter(|(_, k)| **k == ColumnKind::Series)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    pub fn cell(&self, row: usize, column: &str) -> Result<&Cell> {
        let cells = self.column(column)?;
        cells.get(row).ok_or(Error::IndexOutOfRange {
            index: row,
            len: self.n_instances,
        })
    }

    pub fn columns(&self) -> impl Iterator<Item = (&str, &[Cell])> {
        self.column_names
            .iter()
            .map(String::as_str)
            .zip(self.columns.iter().map(Vec::as_slice))
    }

    /// True iff every series in the column shares one identical time index.
    pub fn is_time_homogeneous(&self, column: &str) -> Result<bool> {
        let series = self.series_column(column)?;
        let first = series[0].index();
        Ok(series.iter().all(|s| s.index() == first))
    }

    /// Common series length of a column, if all series agree.
    pub fn common_length(&self, column: &str) -> Result<Option<usize>> {
        let series = self.series_column(column)?;
        let len = series[0].len();
        Ok(series.iter().all(|s| s.len() == len).then_some(len))
    }

    /// New panel with the given rows, in order; duplicates allowed.
    pub fn slice_instances(&self, rows: &[usize]) -> Result<Panel> {
        if rows.is_empty() {
            return Err(Error::EmptyInput("no rows selected".into()));
        }
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.n_instances) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: self.n_instances,
            });
        }
        let columns = self
            .columns
            .iter()
            .map(|cells| rows.iter().map(|&r| cells[r].clone()).collect())
            .collect();
        Ok(Panel {
            column_names: self.column_names.clone(),
            columns,
            kinds: self.kinds.clone(),
            n_instances: rows.len(),
        })
    }

    /// Subset of columns, in the given order.
    pub fn select_columns(&self, names: &[&str]) -> Result<Panel> {
        let cols = names
            .iter()
            .map(|n| Ok((n.to_string(), self.column(n)?.to_vec())))
            .collect::<Result<Vec<_>>>()?;
        Panel::new(cols)
    }

    /// Unrolls every series cell into one record per time point.
    ///
    /// Records are emitted instance-major, then in column order, then by time.
    pub fn to_long(&self) -> Result<LongTable> {
        if let Some(pos) = self.kinds.iter().position(|k| *k != ColumnKind::Series) {
            return Err(Error::PrimitiveColumnPresent(self.column_names[pos].clone()));
        }
        let mut records = Vec::new();
        for row in 0..self.n_instances {
            for (name, cells) in self.column_names.iter().zip(&self.columns) {
                let series = cells[row].as_series().expect("series column");
                for (&time, &value) in series.times().iter().zip(series.values()) {
                    records.push(LongRecord {
                        instance_id: row as u64,
                        variable: name.clone(),
                        time,
                        value,
                    });
                }
            }
        }
        Ok(LongTable { records })
    }

    /// Rebuilds a series-only panel from long records.
    ///
    /// Rows follow ascending instance id; columns follow the order in which
    /// variables first appear in the table; each series is sorted by time.
    pub fn from_long(table: &LongTable) -> Result<Panel> {
        if table.records.is_empty() {
            return Err(Error::EmptyInput("long table has no records".into()));
        }
        let mut variables: Vec<&str> = Vec::new();
        let mut var_pos: HashMap<&str, usize> = HashMap::new();
        let mut grouped: BTreeMap<u64, BTreeMap<usize, Vec<(i64, f64)>>> = BTreeMap::new();
        let mut seen = HashSet::new();
        for rec in &table.records {
            if !seen.insert((rec.instance_id, rec.variable.as_str(), rec.time)) {
                return Err(Error::DuplicateTriple {
                    instance: rec.instance_id,
                    variable: rec.variable.clone(),
                    time: rec.time,
                });
            }
            let pos = *var_pos.entry(rec.variable.as_str()).or_insert_with(|| {
                variables.push(rec.variable.as_str());
                variables.len() - 1
            });
            grouped
                .entry(rec.instance_id)
                .or_default()
                .entry(pos)
                .or_default()
                .push((rec.time, rec.value));
        }
        let mut columns: Vec<Vec<Cell>> = vec![Vec::with_capacity(grouped.len()); variables.len()];
        for (instance, mut vars) in grouped {
            for (pos, column) in columns.iter_mut().enumerate() {
                let mut points =
                    vars.remove(&pos)
                        .ok_or_else(|| Error::MissingVariableForInstance {
                            instance,
                            variable: variables[pos].to_string(),
                        })?;
                points.sort_by_key(|p| p.0);
                let (times, values) = points.into_iter().unzip();
                column.push(Cell::Series(TimeSeries::from_pairs(times, values)?));
            }
        }
        Panel::new(
            variables
                .into_iter()
                .map(str::to_string)
                .zip(columns)
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LongRecord {
    pub instance_id: u64,
    pub variable: String,
    pub time: i64,
    pub value: f64,
}

/// Long format: one record per (instance, variable, time point).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LongTable {
    pub records: Vec<LongRecord>,
}

impl LongTable {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(values: &[f64]) -> Cell {
        Cell::Series(TimeSeries::from_values(values.to_vec()).unwrap())
    }

    #[test]
    fn heterogeneous_lengths_accepted() {
        let p = Panel::new(vec![("v".into(), vec![s(&[1., 2.]), s(&[3., 4., 5.])])]).unwrap();
        assert_eq!(p.n_instances(), 2);
        assert!(!p.is_time_homogeneous("v").unwrap());
        assert_eq!(p.common_length("v").unwrap(), None);
    }

    #[test]
    fn ragged_columns_rejected() {
        let err = Panel::new(vec![
            ("a".into(), vec![s(&[1.]), s(&[2.])]),
            ("b".into(), vec![s(&[1.]), s(&[2.]), s(&[3.])]),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::RaggedColumns(_)));
    }

    #[test]
    fn mixed_kinds_rejected() {
        let err = Panel::new(vec![("a".into(), vec![Cell::from(1.0), s(&[1., 2.])])]).unwrap_err();
        assert_eq!(err, Error::MixedCellKinds("a".into()));
        let err = Panel::new(vec![(
            "a".into(),
            vec![Cell::from(1.0), Cell::Primitive(Primitive::label("x"))],
        )])
        .unwrap_err();
        assert_eq!(err, Error::MixedCellKinds("a".into()));
    }

    #[test]
    fn duplicate_and_empty() {
        let err = Panel::new(vec![
            ("a".into(), vec![s(&[1.])]),
            ("a".into(), vec![s(&[1.])]),
        ])
        .unwrap_err();
        assert_eq!(err, Error::DuplicateColumnName("a".into()));
        assert!(matches!(Panel::new(vec![]), Err(Error::EmptyInput(_))));
        assert!(matches!(
            Panel::new(vec![("a".into(), vec![])]),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn homogeneity() {
        let p = Panel::new(vec![("v".into(), vec![s(&[1., 2., 3.]), s(&[4., 5., 6.])])]).unwrap();
        assert!(p.is_time_homogeneous("v").unwrap());
        let single = Panel::new(vec![("v".into(), vec![s(&[1.])])]).unwrap();
        assert!(single.is_time_homogeneous("v").unwrap());
        let prim = Panel::new(vec![("x".into(), vec![Cell::from(1.0)])]).unwrap();
        assert_eq!(
            prim.is_time_homogeneous("x"),
            Err(Error::NotASeriesColumn("x".into()))
        );
        assert_eq!(
            prim.is_time_homogeneous("nope"),
            Err(Error::NoSuchColumn("nope".into()))
        );
    }

    #[test]
    fn to_long_unrolls() {
        let p = Panel::new(vec![("v".into(), vec![s(&[5., 7.])])]).unwrap();
        let long = p.to_long().unwrap();
        assert_eq!(
            long.records,
            vec![
                LongRecord { instance_id: 0, variable: "v".into(), time: 0, value: 5. },
                LongRecord { instance_id: 0, variable: "v".into(), time: 1, value: 7. },
            ]
        );
        assert_eq!(Panel::from_long(&long).unwrap(), p);

        let p2 = Panel::new(vec![("v".into(), vec![s(&[1., 2.]), s(&[3., 4., 5.])])]).unwrap();
        assert_eq!(p2.to_long().unwrap().len(), 5);

        let prim = Panel::new(vec![("x".into(), vec![Cell::from(1.0)])]).unwrap();
        assert!(matches!(prim.to_long(), Err(Error::PrimitiveColumnPresent(_))));
    }

    #[test]
    fn from_long_sorts_and_validates() {
        let rec = |i, v: &str, t, x| LongRecord { instance_id: i, variable: v.into(), time: t, value: x };
        let table = LongTable { records: vec![rec(0, "v", 2, 3.), rec(0, "v", 0, 1.), rec(0, "v", 1, 2.)] };
        let p = Panel::from_long(&table).unwrap();
        let series = p.series_column("v").unwrap();
        assert_eq!(series[0].times(), &[0, 1, 2]);
        assert_eq!(series[0].values(), &[1., 2., 3.]);

        assert!(matches!(Panel::from_long(&LongTable::default()), Err(Error::EmptyInput(_))));

        let dup = LongTable { records: vec![rec(0, "v", 0, 1.), rec(0, "v", 0, 2.)] };
        assert!(matches!(Panel::from_long(&dup), Err(Error::DuplicateTriple { .. })));

        let missing = LongTable { records: vec![rec(0, "a", 0, 1.), rec(0, "b", 0, 1.), rec(1, "a", 0, 1.)] };
        assert_eq!(
            Panel::from_long(&missing),
            Err(Error::MissingVariableForInstance { instance: 1, variable: "b".into() })
        );
    }

    #[test]
    fn slicing() {
        let p = Panel::new(vec![
            ("v".into(), vec![s(&[1.]), s(&[2.])]),
            ("c".into(), vec![Cell::from(10.0), Cell::from(20.0)]),
        ])
        .unwrap();
        let swapped = p.slice_instances(&[1, 0]).unwrap();
        assert_eq!(swapped.cell(0, "c").unwrap(), &Cell::from(20.0));
        assert_eq!(swapped.cell(1, "c").unwrap(), &Cell::from(10.0));
        let dup = p.slice_instances(&[0, 0]).unwrap();
        assert_eq!(dup.n_instances(), 2);
        assert_eq!(dup.cell(1, "v").unwrap(), p.cell(0, "v").unwrap());
        assert_eq!(dup.column_names(), p.column_names());
        assert_eq!(
            p.slice_instances(&[5]),
            Err(Error::IndexOutOfRange { index: 5, len: 2 })
        );
    }
}
