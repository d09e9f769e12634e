use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::config::ExperimentConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    /// One grid point.
    Point,
    /// A negative control; passes when the quantity misbehaves as intended.
    Control,
    /// An aggregate over earlier rows.
    Summary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Op {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Op::Le => "<=",
            Op::Ge => ">=",
            Op::Gt => ">",
        })
    }
}

/// `values[metric] op threshold`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub metric: String,
    pub op: Op,
    pub threshold: f64,
}

impl Check {
    pub fn new(metric: &str, op: Op, threshold: f64) -> Self {
        Check {
            metric: metric.into(),
            op,
            threshold,
        }
    }

    pub fn holds(&self, values: &BTreeMap<String, f64>) -> bool {
        let Some(&v) = values.get(&self.metric) else {
            return false;
        };
        match self.op {
            Op::Le => v <= self.threshold,
            Op::Ge => v >= self.threshold,
            Op::Gt => v > self.threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub experiment: String,
    pub kind: RowKind,
    pub label: String,
    pub params: BTreeMap<String, f64>,
    pub values: BTreeMap<String, f64>,
    pub error: f64,
    pub converged: bool,
    pub check: Option<Check>,
    pub pass: bool,
}

impl ReportRow {
    pub fn new(experiment: &str, kind: RowKind, label: &str) -> Self {
        ReportRow {
            experiment: experiment.into(),
            kind,
            label: label.into(),
            params: BTreeMap::new(),
            values: BTreeMap::new(),
            error: 0.0,
            converged: true,
            check: None,
            pass: true,
        }
    }

    pub fn param(mut self, name: &str, v: f64) -> Self {
        self.params.insert(name.into(), v);
        self
    }

    pub fn value(mut self, name: &str, v: f64) -> Self {
        self.values.insert(name.into(), v);
        self
    }

    pub fn error(mut self, err: f64, converged: bool) -> Self {
        self.error = err;
        self.converged = converged;
        self
    }

    /// Attaches the criterion and records its verdict.
    pub fn check(mut self, check: Check) -> Self {
        self.pass = check.holds(&self.values);
        self.check = Some(check);
        self
    }

    /// The verdict recomputed from the recorded numbers.
    pub fn verdict(&self) -> bool {
        self.check.as_ref().map_or(true, |c| c.holds(&self.values))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
    pub pass: bool,
}

impl Report {
    pub fn new(config: &ExperimentConfig, rows: Vec<ReportRow>) -> Self {
        let pass = rows.iter().all(|r| r.pass);
        Report {
            experiment: config.experiment.to_string(),
            config: config.clone(),
            rows,
            pass,
        }
    }

    pub fn summaries(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.kind == RowKind::Summary)
    }

    /// First row with the given label.
    pub fn row(&self, label: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    /// Flat table: fixed columns, then every parameter and value name that
    /// occurs in any row (`param:` / `value:` prefixed, sorted).
    pub fn table(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let pnames: BTreeSet<&String> = self.rows.iter().flat_map(|r| r.params.keys()).collect();
        let vnames: BTreeSet<&String> = self.rows.iter().flat_map(|r| r.values.keys()).collect();
        let mut header: Vec<String> = ["experiment", "kind", "label"].iter().map(|s| s.to_string()).collect();
        header.extend(pnames.iter().map(|n| format!("param:{n}")));
        header.extend(vnames.iter().map(|n| format!("value:{n}")));
        header.extend(
            ["error", "converged", "metric", "op", "threshold", "pass"]
                .iter()
                .map(|s| s.to_string()),
        );
        let num = |x: Option<&f64>| x.map(|&v| fmt_num(v)).unwrap_or_default();
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut out = vec![
                    r.experiment.clone(),
                    format!("{:?}", r.kind).to_lowercase(),
                    r.label.clone(),
                ];
                out.extend(pnames.iter().map(|n| num(r.params.get(*n))));
                out.extend(vnames.iter().map(|n| num(r.values.get(*n))));
                out.push(fmt_num(r.error));
                out.push(r.converged.to_string());
                match &r.check {
                    Some(c) => {
                        out.push(c.metric.clone());
                        out.push(c.op.to_string());
                        out.push(fmt_num(c.threshold));
                    }
                    None => out.extend([String::new(), String::new(), String::new()]),
                }
                out.push(r.pass.to_string());
                out
            })
            .collect();
        (header, rows)
    }
}

// Shortest round-trip form; exponent notation outside [1e-4, 1e15).
fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}
