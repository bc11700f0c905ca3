//! Rectangular result tables and their CSV emission.
//!
//! Undefined statistics are written as an empty cell, never as a number.

use std::io::Write;

use serde::Serialize;

use crate::discovery::Strategy;
use crate::error::{Error, Result};
use crate::experiments::{EnsembleStats, GridRow, GridSpec, MeasureStats, TraceRun};
use crate::io::format_float;
use crate::measures::log10_one_plus_abs;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: impl Into<String>, unit: impl Into<String>) -> Self {
        Column {
            name: name.into(),
            unit: unit.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Undefined,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) if v.is_finite() => format_float(*v),
            Cell::Float(_) | Cell::Undefined => String::new(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Undefined, Cell::Float)
    }
}

fn int(v: usize) -> Cell {
    Cell::Int(v as i64)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    columns: Vec<Column>,
    rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(columns: Vec<Column>) -> Self {
        ResultTable {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn push_row(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidParams(format!(
                "row has {} cells, schema has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(self.columns.iter().map(|c| c.name.as_str()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 output")
    }
}

/// Per-step table for one discovery run.
pub fn trace_table(run: &TraceRun) -> ResultTable {
    let s = run.trace.symbol_count;
    let mut columns = vec![
        Column::new("step", "count"),
        Column::new("discovered", "symbol"),
        Column::new("knowable_words", "count"),
        Column::new("fraction_discovered", "fraction"),
        Column::new("mean_freq", "words"),
        Column::new("sem_freq", "words"),
        Column::new("mean_freq_change_log1p", "log10(1+|words|)"),
        Column::new("mean_plus_sem_change_log1p", "log10(1+|words|)"),
        Column::new("entropy", "bits"),
    ];
    columns.extend((0..s).map(|i| Column::new(format!("rank_s{i}"), "rank")));
    let mut table = ResultTable::new(columns);
    for (k, snap) in run.trace.snapshots.iter().enumerate() {
        let change = run.series.frequency_changes[k];
        let sem = snap.sd_freq.map(|sd| sd / (snap.known_count as f64).sqrt());
        let mut row = vec![
            int(snap.step),
            int(snap.discovered.index()),
            int(snap.knowable_count),
            Cell::Float(snap.fraction_discovered),
            snap.mean_freq.into(),
            sem.into(),
            change.delta_mean.map(log10_one_plus_abs).into(),
            change.delta_mean_plus_sem.map(log10_one_plus_abs).into(),
            snap.entropy.into(),
        ];
        let mut by_symbol = vec![Cell::Undefined; s];
        for (j, r) in run.series.averaged_ranks[k].as_slice().iter().enumerate() {
            by_symbol[run.trace.order.sequence[j].index()] = Cell::Float(*r);
        }
        row.extend(by_symbol);
        table.push_row(row).expect("row matches schema");
    }
    table
}

const MEASURES: [&str; 4] = ["delta_r", "delta_omega", "delta_chi", "unused"];

fn measures(stats: &EnsembleStats) -> [&MeasureStats; 4] {
    [
        &stats.delta_r,
        &stats.delta_omega,
        &stats.delta_chi,
        &stats.unused,
    ]
}

/// Scaling-surface table: one row per (axis1, axis2, strategy) with
/// frequency-minus-random difference columns repeated on every row of a cell.
pub fn scale_table(grid: &GridSpec, rows: &[GridRow]) -> ResultTable {
    let mut columns = vec![
        Column::new(grid.axis1.param.tag(), "value"),
        Column::new(grid.axis2.param.tag(), "value"),
        Column::new("strategy", "tag"),
        Column::new("status", "text"),
        Column::new("count", "replicates"),
        Column::new("stopped_by", "tag"),
    ];
    for m in MEASURES {
        for stat in ["mean", "sd", "sem"] {
            columns.push(Column::new(format!("{m}_{stat}"), "measure"));
        }
    }
    for m in MEASURES {
        columns.push(Column::new(format!("{m}_freq_minus_random"), "measure"));
    }
    columns.push(Column::new("master_seed", "seed"));
    columns.push(Column::new("config_sha256", "hex"));
    let mut table = ResultTable::new(columns);

    let mean_of = |v1: f64, v2: f64, strategy: Strategy| -> Option<[f64; 4]> {
        rows.iter()
            .find(|r| r.axis1 == v1 && r.axis2 == v2 && r.strategy == strategy)
            .and_then(|r| r.outcome.as_ref().ok())
            .map(|s| measures(s).map(|m| m.mean))
    };

    for row in rows {
        let mut cells = vec![
            // shortest round-trip form keeps integer axes readable
            Cell::Text(row.axis1.to_string()),
            Cell::Text(row.axis2.to_string()),
            Cell::Text(row.strategy.tag().to_string()),
        ];
        match &row.outcome {
            Ok(stats) => {
                cells.push(Cell::Text("ok".into()));
                cells.push(int(stats.count));
                cells.push(Cell::Text(
                    match stats.stopped_by {
                        crate::experiments::StopReason::RsdMet => "rsd-met",
                        crate::experiments::StopReason::MaxCount => "max-count",
                    }
                    .into(),
                ));
                for m in measures(stats) {
                    cells.extend([Cell::Float(m.mean), Cell::Float(m.sd), Cell::Float(m.sem)]);
                }
            }
            Err(e) => {
                cells.push(Cell::Text(format!("error: {e}")));
                cells.push(Cell::Undefined);
                cells.push(Cell::Undefined);
                cells.extend(std::iter::repeat_n(Cell::Undefined, 12));
            }
        }
        let diff = match (
            mean_of(row.axis1, row.axis2, Strategy::Frequency),
            mean_of(row.axis1, row.axis2, Strategy::Random),
        ) {
            (Some(f), Some(r)) => [0, 1, 2, 3].map(|i| Cell::Float(f[i] - r[i])),
            _ => [
                Cell::Undefined,
                Cell::Undefined,
                Cell::Undefined,
                Cell::Undefined,
            ],
        };
        cells.extend(diff);
        cells.push(Cell::Text(grid.base.seed.to_string()));
        cells.push(match &row.config {
            Some(c) => Cell::Text(c.digest()),
            None => Cell::Undefined,
        });
        table.push_row(cells).expect("row matches schema");
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{run_trace_experiment, EnsembleSettings};
    use crate::generators::{GeneratorParams, Model};
    use crate::model::OccurrenceMode;

    #[test]
    fn rejects_ragged_rows() {
        let mut t = ResultTable::new(vec![Column::new("a", ""), Column::new("b", "")]);
        assert!(t.push_row(vec![Cell::Int(1)]).is_err());
        t.push_row(vec![Cell::Int(1), Cell::Undefined]).unwrap();
        assert_eq!(t.to_csv_string(), "a,b\n1,\n");
    }

    #[test]
    fn fixed_trace_table() {
        let p = GeneratorParams::new(Model::Fixed { word_length: 8 }, 32, 1024, 5);
        let b = run_trace_experiment(&p, &[Strategy::Frequency], 1, OccurrenceMode::Membership)
            .unwrap();
        let t = trace_table(&b.runs[0]);
        let entropy_col = t
            .columns()
            .iter()
            .position(|c| c.name == "entropy")
            .unwrap();
        let frac_col = t
            .columns()
            .iter()
            .position(|c| c.name == "fraction_discovered")
            .unwrap();
        let first_rank = t
            .columns()
            .iter()
            .position(|c| c.name == "rank_s0")
            .unwrap();
        assert_eq!(t.rows()[0][entropy_col], Cell::Undefined);
        assert_eq!(t.rows().last().unwrap()[frac_col], Cell::Float(1.0));
        for (k, row) in t.rows().iter().enumerate() {
            let n = (k + 1) as f64;
            let sum: f64 = row[first_rank..]
                .iter()
                .filter_map(|c| match c {
                    Cell::Float(v) => Some(*v),
                    _ => None,
                })
                .sum();
            assert_eq!(sum, n * (n + 1.0) / 2.0);
        }
        let csv = t.to_csv_string();
        let line2 = csv.lines().nth(1).unwrap();
        // entropy, both change columns and sem/mean are empty at step 1 of a fixed dictionary
        assert!(line2.contains(",,,,,"), "{line2}");
    }

    #[test]
    fn scale_table_differences() {
        let mut g = GridSpec::size_grid(Model::Extensible, 4);
        g.axis1.values = vec![4.0];
        g.axis2.values = vec![45.0];
        g.settings = EnsembleSettings {
            max_count: 32,
            ..Default::default()
        };
        let rows = crate::experiments::run_grid(&g).unwrap();
        let t = scale_table(&g, &rows);
        assert_eq!(t.rows().len(), 2);
        let diff_col = t
            .columns()
            .iter()
            .position(|c| c.name == "delta_r_freq_minus_random")
            .unwrap();
        let mean_col = t
            .columns()
            .iter()
            .position(|c| c.name == "delta_r_mean")
            .unwrap();
        let (Cell::Float(f), Cell::Float(r), Cell::Float(d)) = (
            &t.rows()[0][mean_col],
            &t.rows()[1][mean_col],
            &t.rows()[0][diff_col],
        ) else {
            panic!("expected floats");
        };
        assert_eq!(*d, f - r);
        assert_eq!(t.rows()[0][diff_col], t.rows()[1][diff_col]);
    }
}
