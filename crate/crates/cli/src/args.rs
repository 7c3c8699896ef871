use std::fmt;

use brouncker_core::asymptotic::parse_rational;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num::{BigRational, ToPrimitive};

#[derive(Debug, Parser)]
#[command(name = "brouncker", version, about = "Evaluate generalized Brouncker continued fractions y(s, r)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one representation.
    Eval(PointArgs),
    /// Evaluate every representation of y side by side, with pairwise differences.
    Compare(PointArgs),
    /// Print the exact coefficients A_n and the Laurent coefficients of y.
    Series(SeriesArgs),
    /// Sweep s over a range.
    Table(PointArgs),
    /// Residuals of the functional equations and finite-difference consistency.
    Check(PointArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eval(_) => "eval",
            Command::Compare(_) => "compare",
            Command::Series(_) => "series",
            Command::Table(_) => "table",
            Command::Check(_) => "check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Representation {
    Cf,
    Product,
    Gamma,
    Exponential,
    Asymptotic,
    Dlog,
    D2log,
}

impl Representation {
    pub fn as_str(self) -> &'static str {
        match self {
            Representation::Cf => "cf",
            Representation::Product => "product",
            Representation::Gamma => "gamma",
            Representation::Exponential => "exponential",
            Representation::Asymptotic => "asymptotic",
            Representation::Dlog => "dlog",
            Representation::D2log => "d2log",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// A value, or a range start:stop:step with stop included.
    #[arg(long, allow_hyphen_values = true)]
    pub s: String,
    /// Step parameter; decimals and p/q are read exactly.
    #[arg(long, allow_hyphen_values = true)]
    pub r: String,
    #[arg(long = "rep", value_enum, default_value_t = Representation::Gamma)]
    pub representation: Representation,
    /// Absolute tolerance (relative for the exponential form).
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Truncation order M of the asymptotic expansion.
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    /// Number of factors of the infinite product.
    #[arg(long, default_value_t = 100_000)]
    pub terms: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SeriesArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub r: String,
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// `r` both as an exact rational and as the nearest double.
#[derive(Debug, Clone, PartialEq)]
pub struct StepParameter {
    pub text: String,
    pub exact: BigRational,
    pub value: f64,
}

pub fn parse_r(text: &str) -> Result<StepParameter, UsageError> {
    let exact = parse_rational(text).map_err(|e| UsageError(format!("--r: {e}")))?;
    let value = exact
        .to_f64()
        .filter(|v| v.is_finite())
        .ok_or_else(|| UsageError(format!("--r: {text} is not representable as a double")))?;
    Ok(StepParameter {
        text: text.trim().to_string(),
        exact,
        value,
    })
}

fn parse_f64(text: &str, what: &str) -> Result<f64, UsageError> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| UsageError(format!("--s: {what} {text:?} is not a number")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(UsageError(format!("--s: {what} must be finite")))
    }
}

/// Points of `value` or `start:stop:step`, computed as `start + k step`.
pub fn parse_s(text: &str) -> Result<Vec<f64>, UsageError> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(vec![parse_f64(v, "value")?]),
        [start, stop, step] => {
            let (start, stop, step) = (parse_f64(start, "start")?, parse_f64(stop, "stop")?, parse_f64(step, "step")?);
            if !(step > 0.0) {
                return Err(UsageError("--s: step must be positive".into()));
            }
            if stop < start {
                return Err(UsageError("--s: stop must not be below start".into()));
            }
            let count = ((stop - start) / step * (1.0 + 1e-12)).floor() as usize + 1;
            if count > 1_000_000 {
                return Err(UsageError(format!("--s: range has {count} points, limit is 1000000")));
            }
            Ok((0..count).map(|k| start + k as f64 * step).collect())
        }
        _ => Err(UsageError(format!("--s: expected a value or start:stop:step, got {text:?}"))),
    }
}

pub fn validate_tol(tol: f64) -> Result<(), UsageError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(UsageError(format!("--tol must be positive and finite, got {tol}")))
    }
}

/// The continued-fraction depth cap from `BROUNCKER_MAX_DEPTH`, if set.
pub fn max_depth_override(var: Option<String>) -> Result<Option<usize>, UsageError> {
    match var {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(d) if d >= 2 => Ok(Some(d)),
            _ => Err(UsageError(format!("BROUNCKER_MAX_DEPTH must be an integer >= 2, got {v:?}"))),
        },
    }
}
