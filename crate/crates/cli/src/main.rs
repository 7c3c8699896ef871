// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod evaluate;
mod render;

use std::io::Write;
use std::process::ExitCode;

use brouncker_core::{DomainPoint, Error};
use clap::Parser;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use args::{Cli, Command, Format, PointArgs, SeriesArgs, StepParameter, UsageError};
use evaluate::{Record, Residual, Settings};
use render::{Coefficient, Report, Results};

enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

fn point_inputs(a: &PointArgs, r: &StepParameter, include_rep: bool) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("s".into(), json!(a.s));
    m.insert("r".into(), json!(r.text));
    if include_rep {
        m.insert("representation".into(), json!(a.representation.as_str()));
    }
    m.insert("tol".into(), render::number(a.tol));
    m.insert("order".into(), json!(a.order));
    m.insert("terms".into(), json!(a.terms));
    m
}

/// Applies `f` to every point concurrently, keeping input order.
fn per_point<T: Send>(
    points: &[f64],
    r: f64,
    f: impl Fn(DomainPoint) -> Result<T, Error> + Sync,
) -> Result<Vec<T>, Error> {
    points.par_iter().map(|&s| f(DomainPoint::new(s, r))).collect::<Vec<_>>().into_iter().collect()
}

fn run_points(command: &Command, a: &PointArgs, max_depth: Option<usize>) -> Result<Report, Failure> {
    args::validate_tol(a.tol)?;
    let r = args::parse_r(&a.r)?;
    let points = args::parse_s(&a.s)?;
    let settings = Settings {
        tol: a.tol,
        order: a.order,
        terms: a.terms,
        max_depth,
    };
    let series = match (command, a.representation) {
        (Command::Compare(_), _) | (_, args::Representation::Asymptotic) => Some(evaluate::series_for(&r.exact, a.order)),
        _ => None,
    };

    let (results, residuals): (Vec<Record>, Vec<Residual>) = match command {
        Command::Compare(_) => {
            let series = series.as_ref().expect("series built for compare");
            let rows = per_point(&points, r.value, |p| evaluate::compare(p, &settings, series))?;
            let (mut records, mut deltas) = (Vec::new(), Vec::new());
            for (rec, del) in rows {
                records.extend(rec);
                deltas.extend(del);
            }
            (records, deltas)
        }
        Command::Check(_) => {
            let rows = per_point(&points, r.value, |p| evaluate::check(p, a.tol))?;
            (Vec::new(), rows.into_iter().flatten().collect())
        }
        _ => {
            let rep = a.representation;
            let records = per_point(&points, r.value, |p| evaluate::evaluate(rep, p, &settings, series.as_ref()))?;
            (records, Vec::new())
        }
    };
    for rec in results.iter().filter(|rec| !rec.converged) {
        eprintln!(
            "warning: {} at s={} r={} did not converge within the depth cap",
            rec.representation, rec.s, rec.r
        );
    }
    Ok(Report {
        command: command.name(),
        inputs: point_inputs(a, &r, !matches!(command, Command::Compare(_) | Command::Check(_))),
        results: Results::Records(results),
        residuals,
    })
}

fn run_series(a: &SeriesArgs) -> Result<Report, Failure> {
    let r = args::parse_r(&a.r)?;
    if a.order == 0 {
        return Err(Failure::Usage("--order must be at least 1".into()));
    }
    let series = evaluate::series_for(&r.exact, a.order);
    let mut rows: Vec<Coefficient> = series.a[..a.order]
        .iter()
        .zip(1..)
        .map(|(v, n)| Coefficient {
            kind: "A",
            index: n,
            value: v.clone(),
        })
        .collect();
    rows.extend(series.laurent[..=a.order].iter().zip(0..).map(|(v, j)| Coefficient {
        kind: "laurent",
        index: 2 * j - 1,
        value: v.clone(),
    }));
    let mut inputs = Map::new();
    inputs.insert("r".into(), json!(r.text));
    inputs.insert("order".into(), json!(a.order));
    Ok(Report {
        command: "series",
        inputs,
        results: Results::Coefficients(rows),
        residuals: Vec::new(),
    })
}

fn format_of(command: &Command) -> Format {
    match command {
        Command::Series(a) => a.format,
        Command::Eval(a) | Command::Compare(a) | Command::Table(a) | Command::Check(a) => a.format,
    }
}

fn run(cli: &Cli) -> Result<(String, bool), Failure> {
    let max_depth = args::max_depth_override(std::env::var("BROUNCKER_MAX_DEPTH").ok())?;
    let report = match &cli.command {
        Command::Series(a) => run_series(a)?,
        c @ (Command::Eval(a) | Command::Compare(a) | Command::Table(a) | Command::Check(a)) => run_points(c, a, max_depth)?,
    };
    let out = match format_of(&cli.command) {
        Format::Json => render::json(&report),
        Format::Csv => render::csv(&report).map_err(|e| Failure::Numeric(format!("csv output: {e}")))?,
        Format::Text => render::text(&report),
    };
    Ok((out, report.passed()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, passed)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
