//! CSV output of sweep results.
//!
//! One row per grid point with the columns
//! `variant,variable,analytic,mc_mean,mc_halfwidth,<components...>`.
//! Numbers are written in shortest round-trip form; simulation cells are
//! empty when no simulation was run.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::config::{ExperimentSpec, MetricKind};
use super::experiment::MetricCurve;
use crate::error::{Error, Result};

/// A row read back from a results file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub variant: String,
    pub variable: f64,
    pub analytic: f64,
    pub mc_mean: Option<f64>,
    pub mc_halfwidth: Option<f64>,
    pub components: Vec<f64>,
}

fn csv_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Csv { path: path.to_path_buf(), message: e.to_string() }
}

/// Shortest decimal that parses back to exactly `x`, in scientific notation
/// for very small or large magnitudes.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e16).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn header(curves: &[MetricCurve]) -> Vec<String> {
    let mut h: Vec<String> =
        ["variant", "variable", "analytic", "mc_mean", "mc_halfwidth"].iter().map(|s| s.to_string()).collect();
    if let Some(c) = curves.first() {
        h.extend(c.component_names.iter().cloned());
    }
    h
}

/// Writes `curves` as CSV to any writer; `origin` only labels errors.
pub fn write_csv<W: Write>(curves: &[MetricCurve], out: W, origin: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(curves)).map_err(|e| csv_error(origin, e))?;
    for c in curves {
        for (i, x) in c.values.iter().enumerate() {
            let mut rec = vec![c.label.clone(), format_number(*x), format_number(c.analytic[i])];
            for col in [&c.mc_mean, &c.mc_halfwidth] {
                rec.push(col.as_ref().map_or_else(String::new, |v| format_number(v[i])));
            }
            rec.extend(c.components[i].iter().copied().map(format_number));
            w.write_record(&rec).map_err(|e| csv_error(origin, e))?;
        }
    }
    w.flush().map_err(|source| Error::Io { path: origin.to_path_buf(), source })
}

/// Writes `curves` to the file at `path`.
pub fn emit_csv(curves: &[MetricCurve], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    write_csv(curves, file, path)
}

/// Parses rows written by [`write_csv`].
pub fn parse_csv<R: Read>(input: R, origin: &Path) -> Result<(Vec<String>, Vec<CsvRow>)> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers().map_err(|e| csv_error(origin, e))?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_error(origin, e))?;
        let num = |i: usize| -> Result<f64> {
            rec[i].parse().map_err(|_| csv_error(origin, format!("bad number `{}` in column {i}", &rec[i])))
        };
        let opt = |i: usize| -> Result<Option<f64>> { if rec[i].is_empty() { Ok(None) } else { num(i).map(Some) } };
        rows.push(CsvRow {
            variant: rec[0].to_string(),
            variable: num(1)?,
            analytic: num(2)?,
            mc_mean: opt(3)?,
            mc_halfwidth: opt(4)?,
            components: (5..rec.len()).map(num).collect::<Result<_>>()?,
        });
    }
    Ok((header, rows))
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<CsvRow>)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_csv(file, path)
}

/// A gnuplot script that plots `csv_path`, one curve per variant.
pub fn gnuplot_hints(spec: &ExperimentSpec, curves: &[MetricCurve], csv_path: &Path) -> String {
    let ylabel = match spec.metric {
        MetricKind::Outage => "outage probability",
        MetricKind::Ber => "average BER",
        MetricKind::Capacity => match spec.capacity_unit {
            super::config::CapacityUnit::Nats => "capacity (nats/s/Hz)",
            super::config::CapacityUnit::Bits => "capacity (bits/s/Hz)",
        },
    };
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str(&format!("set xlabel '{}'\n", spec.sweep.variable.name()));
    s.push_str(&format!("set ylabel '{ylabel}'\n"));
    if spec.metric != MetricKind::Capacity {
        s.push_str("set logscale y\n");
    }
    let file = csv_path.display();
    let plots: Vec<String> = curves
        .iter()
        .map(|c| {
            format!(
                "'{file}' using 2:(strcol(1) eq '{label}' ? $3 : 1/0) with lines title '{label}'",
                label = c.label.replace('\'', "")
            )
        })
        .collect();
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    s
}
