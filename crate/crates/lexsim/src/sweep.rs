//! Parameter sweeps over a base config.
//!
//! A sweep file holds a base run config, a list of axes and a replicate
//! count:
//!
//! ```json
//! { "base": { "model": "equilibrium" },
//!   "axes": [ { "path": "equilibrium.shock.delta_litigation", "values": [0, 0.25, 0.5] } ],
//!   "replicates": 1 }
//! ```
//!
//! Axis paths are dotted field paths into the base config after presets are
//! expanded and defaults filled in; numeric segments index arrays, as in
//! `composition.areas.2.unit_cost`. Each path must name a number.
//!
//! Points are the cartesian product of the axes in lexicographic order (the
//! last axis varies fastest), and replicates are the minor index. Replicate
//! `r` runs with the point's seed plus `r`. Points run in parallel but rows come
//! out in that order.

use std::path::Path;

use rayon::prelude::*;
use serde::Deserialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::{HarnessError, Result, Violation};
use crate::format::g17;
use crate::run::{execute, Table};
use crate::svg::{LineChart, Series};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub path: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: RunConfig,
    pub axes: Vec<Axis>,
    pub replicates: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    base: Value,
    #[serde(default)]
    axes: Vec<Axis>,
    #[serde(default = "one")]
    replicates: u64,
}

fn one() -> u64 {
    1
}

/// Output of a sweep: the table plus a chart of its first numeric column.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub table: Table,
    pub chart: LineChart,
}

pub fn load_sweep(path: &Path) -> Result<SweepSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_sweep(&text)
}

pub fn parse_sweep(text: &str) -> Result<SweepSpec> {
    let raw: RawSpec =
        serde_json::from_str(text).map_err(|e| HarnessError::Parse(e.to_string()))?;
    let base = RunConfig::from_value(raw.base).map_err(|e| match e {
        HarnessError::Validation(v) => HarnessError::Validation(
            v.into_iter()
                .map(|x| Violation {
                    path: format!("base.{}", x.path),
                    message: x.message,
                })
                .collect(),
        ),
        other => other,
    })?;
    let spec = SweepSpec {
        base,
        axes: raw.axes,
        replicates: raw.replicates,
    };
    spec.validate()?;
    Ok(spec)
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        let base = self.base.to_value();
        for (i, axis) in self.axes.iter().enumerate() {
            match lookup(&base, &axis.path) {
                Some(v) if v.is_number() => {}
                Some(_) => violations.push(Violation {
                    path: format!("axes.{i}.path"),
                    message: format!("{} is not a numeric field", axis.path),
                }),
                None => violations.push(Violation {
                    path: format!("axes.{i}.path"),
                    message: format!("{} does not resolve in the base config", axis.path),
                }),
            }
            if axis.values.is_empty() {
                violations.push(Violation {
                    path: format!("axes.{i}.values"),
                    message: "must list at least one value".into(),
                });
            }
            if self.axes[..i].iter().any(|a| a.path == axis.path) {
                violations.push(Violation {
                    path: format!("axes.{i}.path"),
                    message: format!("{} is swept twice", axis.path),
                });
            }
        }
        if self.replicates == 0 {
            violations.push(Violation {
                path: "replicates".into(),
                message: "must be >= 1".into(),
            });
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(HarnessError::Validation(violations))
        }
    }

    /// Number of grid points.
    pub fn points(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Number of runs, points times replicates.
    pub fn size(&self) -> usize {
        self.points() * self.replicates as usize
    }

    /// Axis values at a grid point, last axis fastest.
    pub fn coordinates(&self, point: usize) -> Vec<f64> {
        let mut rest = point;
        let mut coords = vec![0.0; self.axes.len()];
        for (i, axis) in self.axes.iter().enumerate().rev() {
            coords[i] = axis.values[rest % axis.values.len()];
            rest /= axis.values.len();
        }
        coords
    }

    /// The run config at a grid point and replicate.
    pub fn config_at(&self, point: usize, replicate: u64) -> Result<RunConfig> {
        let mut value = self.base.to_value();
        for (axis, x) in self.axes.iter().zip(self.coordinates(point)) {
            let slot = lookup_mut(&mut value, &axis.path).expect("axis paths validated");
            *slot = number_like(slot, x);
        }
        let mut config = RunConfig::from_value(value)?;
        config.seed = config.seed.wrapping_add(replicate);
        Ok(config)
    }
}

/// Writes `x` as an integer when the field it replaces is one and `x` is
/// integral, so integer fields such as `periods` still parse.
fn number_like(old: &Value, x: f64) -> Value {
    let integral = x.fract() == 0.0 && x.abs() < 2f64.powi(53);
    if old.is_u64() && integral && x >= 0.0 {
        Value::from(x as u64)
    } else if old.is_i64() && integral {
        Value::from(x as i64)
    } else {
        serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
    }
}

fn lookup<'a>(value: &'a Value, path: &str) -> Option<&'a Value> {
    path.split('.').try_fold(value, |v, seg| match v {
        Value::Object(map) => map.get(seg),
        Value::Array(items) => seg.parse::<usize>().ok().and_then(|i| items.get(i)),
        _ => None,
    })
}

fn lookup_mut<'a>(value: &'a mut Value, path: &str) -> Option<&'a mut Value> {
    path.split('.').try_fold(value, |v, seg| match v {
        Value::Object(map) => map.get_mut(seg),
        Value::Array(items) => seg.parse::<usize>().ok().and_then(|i| items.get_mut(i)),
        _ => None,
    })
}

type PointResult = (RunConfig, Vec<(String, String)>);

pub fn sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let replicates = spec.replicates as usize;
    let results: Vec<Result<PointResult>> = (0..spec.size())
        .into_par_iter()
        .map(|index| {
            let (point, replicate) = (index / replicates, (index % replicates) as u64);
            let wrap = |source: HarnessError| HarnessError::SweepPoint {
                point,
                replicate,
                coordinates: describe(spec, point),
                source: Box::new(source),
            };
            let config = spec.config_at(point, replicate).map_err(wrap)?;
            let artifacts = execute(&config).map_err(wrap)?;
            Ok((config, artifacts.summary))
        })
        .collect();

    let mut table: Option<Table> = None;
    for (index, result) in results.into_iter().enumerate() {
        let (config, summary) = result?;
        let (point, replicate) = (index / replicates, index % replicates);
        let table = table.get_or_insert_with(|| Table {
            header: ["point", "replicate", "seed"]
                .into_iter()
                .map(String::from)
                .chain(spec.axes.iter().map(|a| a.path.clone()))
                .chain(summary.iter().map(|(k, _)| k.clone()))
                .collect(),
            rows: Vec::new(),
        });
        let row: Vec<String> = [
            point.to_string(),
            replicate.to_string(),
            config.seed.to_string(),
        ]
        .into_iter()
        .chain(spec.coordinates(point).into_iter().map(g17))
        .chain(summary.into_iter().map(|(_, v)| v))
        .collect();
        table.rows.push(row);
    }
    let table = table.expect("a sweep has at least one run");
    let chart = chart(spec, &table);
    Ok(SweepResult { table, chart })
}

fn describe(spec: &SweepSpec, point: usize) -> String {
    spec.axes
        .iter()
        .zip(spec.coordinates(point))
        .map(|(a, x)| format!("{}={}", a.path, g17(x)))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Plots the first summary column that is numeric in every row against the
/// first axis (or the point index), one series per replicate.
fn chart(spec: &SweepSpec, table: &Table) -> LineChart {
    let first_summary = 3 + spec.axes.len();
    let column = (first_summary..table.header.len())
        .find(|&c| table.rows.iter().all(|r| r[c].parse::<f64>().is_ok()));
    let x_label = spec.axes.first().map_or("point", |a| a.path.as_str());
    let y_label = column.map_or("", |c| table.header[c].as_str());
    let mut chart = LineChart::new(
        format!("Sweep of {}", spec.base.model.as_str()),
        x_label,
        y_label,
    );
    if let Some(c) = column {
        for r in 0..spec.replicates as usize {
            let points = table
                .rows
                .iter()
                .skip(r)
                .step_by(spec.replicates as usize)
                .map(|row| {
                    let x = if spec.axes.is_empty() {
                        &row[0]
                    } else {
                        &row[3]
                    };
                    (
                        x.parse().unwrap_or(f64::NAN),
                        row[c].parse().unwrap_or(f64::NAN),
                    )
                })
                .collect();
            chart = chart.with_series(Series::new(format!("replicate {r}"), points));
        }
    }
    chart
}
