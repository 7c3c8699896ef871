use std::fmt::Write as _;

use brouncker_core::asymptotic::rational_string;
use num::BigRational;
use serde_json::{json, Map, Number, Value};

use crate::evaluate::{Record, Residual};

/// One exact coefficient: `A_n` (kind "A") or `c_n` (kind "laurent").
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    pub kind: &'static str,
    pub index: i64,
    pub value: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Results {
    Records(Vec<Record>),
    Coefficients(Vec<Coefficient>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub inputs: Map<String, Value>,
    pub results: Results,
    pub residuals: Vec<Residual>,
}

impl Report {
    /// No failed residual and every evaluation converged.
    pub fn passed(&self) -> bool {
        let converged = match &self.results {
            Results::Records(rows) => rows.iter().all(|r| r.converged),
            Results::Coefficients(_) => true,
        };
        converged && self.residuals.iter().all(|r| r.status != crate::evaluate::CheckStatus::Fail)
    }

    pub fn status(&self) -> &'static str {
        if self.passed() {
            "ok"
        } else {
            "failed"
        }
    }
}

/// A double as a JSON number with 17 significant digits; non-finite values become null.
pub fn number(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(format!("{x:.16e}").parse::<Number>().expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

fn optional(x: Option<f64>) -> Value {
    x.map_or(Value::Null, number)
}

fn record_json(r: &Record) -> Value {
    json!({
        "s": number(r.s),
        "r": number(r.r),
        "representation": r.representation,
        "value": number(r.value),
        "err_estimate": optional(r.err_estimate),
        "iterations": r.iterations,
        "method": r.method,
        "converged": r.converged,
    })
}

fn residual_json(r: &Residual) -> Value {
    json!({
        "name": r.name,
        "s": number(r.s),
        "r": number(r.r),
        "residual": optional(r.residual),
        "tolerance": optional(r.tolerance),
        "status": r.status.as_str(),
        "note": r.note,
    })
}

pub fn json(report: &Report) -> String {
    let results: Vec<Value> = match &report.results {
        Results::Records(rows) => rows.iter().map(record_json).collect(),
        Results::Coefficients(rows) => rows
            .iter()
            .map(|c| json!({"kind": c.kind, "index": c.index, "value": rational_string(&c.value)}))
            .collect(),
    };
    let doc = json!({
        "command": report.command,
        "inputs": report.inputs,
        "results": results,
        "residuals": report.residuals.iter().map(residual_json).collect::<Vec<_>>(),
        "status": report.status(),
    });
    let mut out = serde_json::to_string_pretty(&doc).expect("report serializes");
    out.push('\n');
    out
}

fn float_field(x: f64) -> String {
    format!("{x:.16e}")
}

/// Result rows as `s,r,representation,value,err_estimate,iterations`; `check`
/// writes its residuals instead and `series` its coefficients.
pub fn csv(report: &Report) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match &report.results {
        Results::Records(rows) if !rows.is_empty() => {
            w.write_record(["s", "r", "representation", "value", "err_estimate", "iterations"])?;
            for r in rows {
                w.write_record([
                    float_field(r.s),
                    float_field(r.r),
                    r.representation.to_string(),
                    float_field(r.value),
                    r.err_estimate.map(float_field).unwrap_or_default(),
                    r.iterations.map(|n| n.to_string()).unwrap_or_default(),
                ])?;
            }
        }
        Results::Records(_) => {
            w.write_record(["name", "s", "r", "residual", "tolerance", "status"])?;
            for r in &report.residuals {
                w.write_record([
                    r.name.clone(),
                    float_field(r.s),
                    float_field(r.r),
                    r.residual.map(float_field).unwrap_or_default(),
                    r.tolerance.map(float_field).unwrap_or_default(),
                    r.status.as_str().to_string(),
                ])?;
            }
        }
        Results::Coefficients(rows) => {
            w.write_record(["kind", "index", "value"])?;
            for c in rows {
                w.write_record([c.kind.to_string(), c.index.to_string(), rational_string(&c.value)])?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn or_dash<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(|| "-".to_string(), |v| v.to_string())
}

pub fn text(report: &Report) -> String {
    let mut out = String::new();
    match &report.results {
        Results::Records(rows) => {
            for r in rows {
                let _ = writeln!(
                    out,
                    "s={} r={} {:<12} value={} err_estimate={} iterations={}{}",
                    r.s,
                    r.r,
                    r.representation,
                    r.value,
                    or_dash(r.err_estimate.map(|e| format!("{e:.3e}"))),
                    or_dash(r.iterations),
                    if r.converged { "" } else { " (not converged)" }
                );
            }
        }
        Results::Coefficients(rows) => {
            for kind in ["A", "laurent"] {
                let values: Vec<String> = rows.iter().filter(|c| c.kind == kind).map(|c| c.value.to_string()).collect();
                let _ = writeln!(out, "{kind}: [{}]", values.join(", "));
            }
        }
    }
    for r in &report.residuals {
        let _ = write!(
            out,
            "s={} r={} {:<8} {} = {}",
            r.s,
            r.r,
            r.status.as_str(),
            r.name,
            or_dash(r.residual.map(|x| format!("{x:.3e}")))
        );
        if let Some(t) = r.tolerance {
            let _ = write!(out, " (tol {t:.1e})");
        }
        if let Some(note) = &r.note {
            let _ = write!(out, " [{note}]");
        }
        out.push('\n');
    }
    if !report.residuals.is_empty() {
        let _ = writeln!(out, "status: {}", report.status());
    }
    out
}
