use brouncker_core::asymptotic::{asym_coeffs, exp_compose, y_asymptotic, AsymSeries};
use brouncker_core::brouncker::{check_functional, y_cf, y_exponential, y_gamma, y_product};
use brouncker_core::cfcore::DEFAULT_MAX_DEPTH;
use brouncker_core::logderiv::{d2log_y, dlog_y, f1_eval, f2_eval, h1_eval, h2_eval, Identity, CF_MAX_DEPTH};
use brouncker_core::{Budget, DomainPoint, Error, Evaluation};
use num::BigRational;

use crate::args::Representation;

/// Finite-difference steps and tolerances; truncation-dominated, so fixed.
pub const FIRST_FD_STEP: f64 = 1e-4;
pub const FIRST_FD_TOL: f64 = 1e-6;
pub const SECOND_FD_STEP: f64 = 1e-3;
pub const SECOND_FD_TOL: f64 = 1e-5;

/// Tolerances of individual terms inside a residual, relative to the check tolerance.
const INNER_TOL_FACTOR: f64 = 1e-2;
const INNER_TOL_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub tol: f64,
    pub order: usize,
    pub terms: usize,
    pub max_depth: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub s: f64,
    pub r: f64,
    pub representation: &'static str,
    pub value: f64,
    pub err_estimate: Option<f64>,
    pub iterations: Option<usize>,
    pub method: Option<&'static str>,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
    /// Reported without a tolerance (pairwise differences in `compare`).
    Info,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skipped => "skipped",
            CheckStatus::Info => "info",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub name: String,
    pub s: f64,
    pub r: f64,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub status: CheckStatus,
    pub note: Option<String>,
}

impl Residual {
    fn checked(name: impl Into<String>, p: DomainPoint, residual: f64, tolerance: f64) -> Self {
        Residual {
            name: name.into(),
            s: p.s,
            r: p.r,
            residual: Some(residual),
            tolerance: Some(tolerance),
            status: if residual <= tolerance { CheckStatus::Pass } else { CheckStatus::Fail },
            note: None,
        }
    }

    fn skipped(name: impl Into<String>, p: DomainPoint, why: &Error) -> Self {
        Residual {
            name: name.into(),
            s: p.s,
            r: p.r,
            residual: None,
            tolerance: None,
            status: CheckStatus::Skipped,
            note: Some(why.to_string()),
        }
    }
}

/// Asymptotic coefficients for `eval`/`table` at order `m`, one extra for the error hint.
pub fn series_for(r: &BigRational, m: usize) -> AsymSeries {
    exp_compose(&asym_coeffs(r, m + 1), m + 1)
}

fn record(p: DomainPoint, rep: Representation, ev: Evaluation) -> Record {
    Record {
        s: p.s,
        r: p.r,
        representation: rep.as_str(),
        value: ev.value,
        err_estimate: Some(ev.err_estimate),
        iterations: Some(ev.iterations),
        method: Some(ev.method.as_str()),
        converged: ev.converged,
    }
}

fn plain(p: DomainPoint, rep: Representation, value: f64, err: Option<f64>, method: &'static str) -> Record {
    Record {
        s: p.s,
        r: p.r,
        representation: rep.as_str(),
        value,
        err_estimate: err,
        iterations: None,
        method: Some(method),
        converged: true,
    }
}

/// Sum of two evaluations of the same kind, for `f1 + f2` and `h1 + h2`.
fn combined(p: DomainPoint, rep: Representation, a: Evaluation, b: Evaluation, sign: f64) -> Record {
    let method = if a.method == b.method { a.method.as_str() } else { "mixed" };
    Record {
        s: p.s,
        r: p.r,
        representation: rep.as_str(),
        value: sign * (a.value + b.value),
        err_estimate: Some(a.err_estimate + b.err_estimate),
        iterations: Some(a.iterations.max(b.iterations)),
        method: Some(method),
        converged: a.converged && b.converged,
    }
}

pub fn evaluate(
    rep: Representation,
    p: DomainPoint,
    settings: &Settings,
    series: Option<&AsymSeries>,
) -> Result<Record, Error> {
    let tol = settings.tol;
    match rep {
        Representation::Cf => {
            let budget = Budget::new(tol, settings.max_depth.unwrap_or(DEFAULT_MAX_DEPTH));
            Ok(record(p, rep, y_cf(p, budget)?))
        }
        Representation::Product => Ok(record(p, rep, y_product(p, settings.terms)?)),
        Representation::Gamma => {
            let v = y_gamma(p)?;
            Ok(plain(p, rep, v, None, "gamma"))
        }
        Representation::Exponential => {
            let v = y_exponential(p, tol)?;
            Ok(plain(p, rep, v, Some(tol * v), "quadrature"))
        }
        Representation::Asymptotic => {
            let series = series.ok_or_else(|| Error::InvalidArgument("asymptotic series missing".into()))?;
            let (v, hint) = y_asymptotic(p, series, settings.order)?;
            let mut rec = plain(p, rep, v, Some(hint), "asymptotic");
            rec.iterations = Some(settings.order);
            Ok(rec)
        }
        Representation::Dlog => {
            let budget = Budget::new(tol / 2.0, settings.max_depth.unwrap_or(CF_MAX_DEPTH));
            Ok(combined(p, rep, f1_eval(p, budget)?, f2_eval(p, budget)?, 1.0))
        }
        Representation::D2log => {
            let budget = Budget::new(tol / 2.0, settings.max_depth.unwrap_or(CF_MAX_DEPTH));
            Ok(combined(p, rep, h1_eval(p, budget)?, h2_eval(p, budget)?, -1.0))
        }
    }
}

/// Representations of `y` itself, in the order `compare` lists them.
pub const Y_REPRESENTATIONS: [Representation; 5] = [
    Representation::Cf,
    Representation::Product,
    Representation::Gamma,
    Representation::Exponential,
    Representation::Asymptotic,
];

pub fn compare(p: DomainPoint, settings: &Settings, series: &AsymSeries) -> Result<(Vec<Record>, Vec<Residual>), Error> {
    let records = Y_REPRESENTATIONS
        .iter()
        .map(|&rep| evaluate(rep, p, settings, Some(series)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut deltas = Vec::new();
    for (i, a) in records.iter().enumerate() {
        for b in &records[i + 1..] {
            deltas.push(Residual {
                name: format!("{}-{}", a.representation, b.representation),
                s: p.s,
                r: p.r,
                residual: Some(a.value - b.value),
                tolerance: None,
                status: CheckStatus::Info,
                note: None,
            });
        }
    }
    Ok((records, deltas))
}

fn ln_y(s: f64, r: f64) -> Result<f64, Error> {
    Ok(y_gamma(DomainPoint::new(s, r))?.ln())
}

/// Residuals at one point. Identities involving the second derivative are
/// skipped (not failed) where `s <= max(1, 2r - 1)`.
pub fn check(p: DomainPoint, tol: f64) -> Result<Vec<Residual>, Error> {
    p.require_positive()?;
    let inner = (tol * INNER_TOL_FACTOR).max(INNER_TOL_FLOOR);
    let mut out = vec![Residual::checked(
        "y(s)y(s+2r)=(s+1)(s+2r-1) (relative)",
        p,
        check_functional(p)?,
        tol,
    )];
    let second = p.require_second();
    for id in Identity::ALL {
        match (&second, id.is_second_order()) {
            (Err(e), true) => out.push(Residual::skipped(id.as_str(), p, e)),
            _ => out.push(Residual::checked(id.as_str(), p, id.residual(p, inner)?, tol)),
        }
    }

    let (s, r) = (p.s, p.r);
    let h = FIRST_FD_STEP;
    let name = "dlog_y vs central difference of ln y";
    if s - h > 0.0 {
        let fd = (ln_y(s + h, r)? - ln_y(s - h, r)?) / (2.0 * h);
        out.push(Residual::checked(name, p, (dlog_y(p, inner)? - fd).abs(), FIRST_FD_TOL));
    } else {
        out.push(Residual::skipped(name, p, &Error::Domain(format!("s - {h} must stay positive"))));
    }

    let names = [
        "d2log_y vs second central difference of ln y",
        "d2log_y vs central difference of dlog_y",
    ];
    let h = SECOND_FD_STEP;
    let edge = DomainPoint::new(s - h.max(FIRST_FD_STEP), r).require_second();
    match second.clone().and(edge) {
        Err(e) => {
            for name in names {
                out.push(Residual::skipped(name, p, &e));
            }
        }
        Ok(()) => {
            let d2 = d2log_y(p, inner)?;
            let fd = (ln_y(s + h, r)? - 2.0 * ln_y(s, r)? + ln_y(s - h, r)?) / (h * h);
            out.push(Residual::checked(names[0], p, (d2 - fd).abs(), SECOND_FD_TOL));
            let k = FIRST_FD_STEP;
            let fd = (dlog_y(DomainPoint::new(s + k, r), inner)? - dlog_y(DomainPoint::new(s - k, r), inner)?) / (2.0 * k);
            out.push(Residual::checked(names[1], p, (d2 - fd).abs(), FIRST_FD_TOL));
        }
    }
    Ok(out)
}
