//! The generalized Brouncker fraction
//!
//! ```text
//! y(s, r) = s + K_{n>=1}( ((2n-1)^2 r^2 - (r-1)^2) / (2s) )
//! ```
//!
//! which satisfies `y(s, r) y(s + 2r, r) = (s + 1)(s + 2r - 1)` and reduces to
//! Brouncker's `b(s)` at `r = 1`. Every representation here is an independent
//! route to the same function: continued fraction, infinite product, Gamma
//! ratio, and the exponential of the integrated logarithmic derivative.
//! [`y_gamma`] has the best numerics and is the reference the others are
//! compared against.

use std::f64::consts::{LN_2, PI};

use crate::cfcore::{eval_forward, Budget, CfSpec, Evaluation, Method};
use crate::error::{domain, Error, Result};
use crate::logderiv::laplace_sech;
use crate::quad;
use crate::specfun::{ln_gamma, ln_gamma_shift_ratio};

/// A point `(s, r)`. Validity depends on the representation; see the
/// `require_*` predicates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainPoint {
    pub s: f64,
    pub r: f64,
}

impl DomainPoint {
    pub fn new(s: f64, r: f64) -> Self {
        DomainPoint { s, r }
    }

    /// `r > 1/2`, the standing hypothesis on the step parameter.
    pub fn require_r(&self) -> Result<()> {
        if self.r > 0.5 && self.r.is_finite() {
            Ok(())
        } else {
            Err(domain(format!(
                "r = {} violates the hypothesis r > 1/2 of the generalized Brouncker fraction",
                self.r
            )))
        }
    }

    /// `s > 0, r > 1/2`: continued fraction, product and Gamma forms.
    pub fn require_positive(&self) -> Result<()> {
        self.require_r()?;
        if self.s > 0.0 && self.s.is_finite() {
            Ok(())
        } else {
            Err(domain(format!(
                "s = {} violates the hypothesis s > 0 of the generalized Brouncker fraction",
                self.s
            )))
        }
    }

    /// `s > max(1, 2r - 1), r > 1/2`: second logarithmic derivative.
    pub fn require_second(&self) -> Result<()> {
        self.require_r()?;
        let bound = 1f64.max(2.0 * self.r - 1.0);
        if self.s > bound && self.s.is_finite() {
            Ok(())
        } else {
            Err(domain(format!(
                "s = {} violates s > max(1, 2r - 1) = {bound} required by the second logarithmic derivative formula",
                self.s
            )))
        }
    }

    /// The point shifted by one period, `(s + 2r, r)`.
    pub fn next_period(&self) -> DomainPoint {
        DomainPoint::new(self.s + 2.0 * self.r, self.r)
    }
}

/// Partial numerator `(2n-1)^2 r^2 - (r-1)^2`; positive for all `n >= 1` when `r > 1/2`.
fn y_numerator(n: usize, r: f64) -> f64 {
    let odd = (2 * n - 1) as f64;
    (odd * r - (r - 1.0)) * (odd * r + (r - 1.0))
}

/// The continued fraction for `y(s, r)` as a [`CfSpec`].
pub fn y_cf_spec(p: DomainPoint) -> CfSpec<'static> {
    let DomainPoint { s, r } = p;
    CfSpec::new(s, move |n| y_numerator(n, r), move |_| 2.0 * s)
}

pub fn y_cf(p: DomainPoint, budget: impl Into<Budget>) -> Result<Evaluation> {
    p.require_positive()?;
    let budget = budget.into();
    eval_forward(&y_cf_spec(p), budget.tol, budget.max_depth)
}

/// Brouncker's fraction `b(s) = s + K((2n-1)^2 / (2s))`.
pub fn b(s: f64, budget: impl Into<Budget>) -> Result<Evaluation> {
    y_cf(DomainPoint::new(s, 1.0), budget)
}

/// Compensated (Neumaier) summation.
#[derive(Default)]
struct Summation {
    sum: f64,
    comp: f64,
}

impl Summation {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Infinite product
///
/// ```text
/// y(s, r) = (s + 1) prod_{n>=0} (s+2r-1+4nr)(s+4r+1+4nr) / ((s+2r+1+4nr)(s+4r-1+4nr))
/// ```
///
/// truncated after `n_terms` factors. With `m = 4nr + s + 3r` each factor is
/// `(m^2 - (r-1)^2) / (m^2 - (r+1)^2)` inverted, so its logarithm is
/// `-4r / m^2 + O(m^-4)`; the remaining tail is estimated from that leading
/// term by Euler–Maclaurin and the neglected `O(m^-4)` part is reported as
/// the error. Every factor is below one and `s < y < s + 1`, so with no
/// factors the value `s + 1` carries an error of 1.
pub fn y_product(p: DomainPoint, n_terms: usize) -> Result<Evaluation> {
    p.require_positive()?;
    let DomainPoint { s, r } = p;
    if n_terms == 0 {
        return Ok(Evaluation {
            value: s + 1.0,
            iterations: 0,
            err_estimate: 1.0,
            converged: false,
            method: Method::Product,
        });
    }
    let mut logs = Summation::default();
    for n in 0..n_terms {
        let shift = 4.0 * n as f64 * r;
        let lo = s + 2.0 * r - 1.0 + shift;
        let hi = s + 4.0 * r + 1.0 + shift;
        logs.add((4.0 * r / (lo * hi)).ln_1p());
    }
    let m = 4.0 * r * n_terms as f64 + s + 3.0 * r;
    // sum_{n>=N} 4r / (4rn + s + 3r)^2: integral + half first term - g'(N)/12
    let tail = 1.0 / m + 2.0 * r / (m * m) + 8.0 * r * r / (3.0 * m * m * m);
    // sum_{n>=N} 4r (r^2+1) / m^4, doubled
    let m_lo = m - 2.0 * r;
    let tail_err = 2.0 * ((r * r + 1.0) / (3.0 * m_lo * m_lo * m_lo) + 4.0 * r * (r * r + 1.0) / m.powi(4));
    let total = logs.total() + tail;
    let value = (s + 1.0) * (-total).exp();
    let round = 16.0 * f64::EPSILON * (1.0 + total);
    Ok(Evaluation {
        value,
        iterations: n_terms,
        err_estimate: value * ((tail_err + round).exp_m1()),
        converged: true,
        method: Method::Product,
    })
}

/// Gamma-ratio closed form
///
/// ```text
/// y(s, r) = 4r Γ((s+2r+1)/4r) Γ((s+4r-1)/4r) / (Γ((s+1)/4r) Γ((s+2r-1)/4r))
/// ```
///
/// The numerator arguments exceed the denominator ones by exactly 1/2, so
/// each pair goes through [`ln_gamma_shift_ratio`].
pub fn y_gamma(p: DomainPoint) -> Result<f64> {
    p.require_positive()?;
    y_gamma_unchecked(p.s, p.r)
}

fn y_gamma_unchecked(s: f64, r: f64) -> Result<f64> {
    let q = 4.0 * r;
    let first = ln_gamma_shift_ratio((s + 1.0) / q, 0.5)?;
    let second = ln_gamma_shift_ratio((s + 2.0 * r - 1.0) / q, 0.5)?;
    Ok(q * (first + second).exp())
}

/// `y(0, r) = 8 pi r 2^(1 - 1/r) Γ(1/(2r))^2 / Γ(1/(4r))^4 cot(pi/(4r))`,
/// the integration constant of the exponential form.
pub fn y_zero(r: f64) -> Result<f64> {
    DomainPoint::new(1.0, r).require_r()?;
    let ln = (8.0 * PI * r).ln() + (1.0 - 1.0 / r) * LN_2 + 2.0 * ln_gamma(0.5 / r)? - 4.0 * ln_gamma(0.25 / r)?;
    Ok(ln.exp() / (PI / (4.0 * r)).tan())
}

/// Integrand of the exponential form, `f1(t, r) + f2(t, r)`, through the
/// Laplace–sech representation (valid for every `t >= 0` once `r > 1/2`).
fn log_derivative_integral(t: f64, r: f64) -> Result<f64> {
    let first = laplace_sech((1.0 - r + t) / r)?;
    let second = laplace_sech((r - 1.0 + t) / r)?;
    Ok((first + second) / (2.0 * r))
}

/// Exponential form `y(s, r) = y(0, r) exp(int_0^s (f1 + f2)(t, r) dt)`.
///
/// The outer integral is computed by adaptive quadrature to absolute error
/// `tol` (which is therefore a relative error on the result). The identity
/// holds for every `s > 0`.
pub fn y_exponential(p: DomainPoint, tol: f64) -> Result<f64> {
    p.require_positive()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let r = p.r;
    let failed = std::cell::Cell::new(None);
    let integrand = |t: f64| match log_derivative_integral(t, r) {
        Ok(v) => v,
        Err(e) => {
            failed.set(Some(e));
            f64::NAN
        }
    };
    let integral = quad::integrate(integrand, 0.0, p.s, tol, 0.0, quad::DEFAULT_MAX_PANELS);
    if let Some(e) = failed.take() {
        return Err(e);
    }
    Ok(y_zero(r)? * integral?.value.exp())
}

/// Relative residual of `y(s, r) y(s + 2r, r) = (s + 1)(s + 2r - 1)` through [`y_gamma`].
pub fn check_functional(p: DomainPoint) -> Result<f64> {
    p.require_positive()?;
    let rhs = (p.s + 1.0) * (p.s + 2.0 * p.r - 1.0);
    let lhs = y_gamma(p)? * y_gamma(p.next_period())?;
    Ok((lhs - rhs).abs() / rhs)
}
