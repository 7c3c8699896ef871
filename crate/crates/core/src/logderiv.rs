//! First and second logarithmic derivatives of `y(s, r)`.
//!
//! `d/ds ln y = f1 + f2` and `d²/ds² ln y = -(h1 + h2)`, where each half is
//! both a continued fraction and a Laplace transform of `sech`:
//!
//! ```text
//! f(s) = 1 / (2φ + 2K(n²r²/φ))                 = (1/2r)  ∫ e^{-xφ/r} / cosh x dx
//! h(s) = 1 / (2A + 2TK(4n²r²/1, 4n²r²/A))      = (1/2r²) ∫ x e^{-xφ/r} / cosh x dx
//! ```
//!
//! with `φ = s + 1 - r` (first half) or `φ = s + r - 1` (second half) and
//! `A = φ² - r²`. The fractions converge like `n^{-φ/r}` (resp. `n^{-s}`), so
//! near the edge of their domain the integral is used instead.

use crate::brouncker::DomainPoint;
use crate::cfcore::{eval_forward, tk_to_cf, Budget, CfSpec, Evaluation, Method};
use crate::error::{domain, Error, Result};
use crate::quad;

/// Depth cap for the fractions before falling back to quadrature.
pub const CF_MAX_DEPTH: usize = 100_000;

const QUAD_TOL: f64 = 1e-13;
const TAIL_TOL: f64 = 1e-14;

/// Distance from `|r - 1|` below which `f1`/`f2` skip the continued fraction.
pub const CF_SWITCH_MARGIN: f64 = 0.1;

fn require_laplace(a: f64) -> Result<()> {
    if a > -1.0 && a.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("a = {a}: the sech Laplace transform needs a > -1")))
    }
}

/// Beyond this point `1 / cosh x = 2e^{-x}` to relative accuracy `e^{-2x} < 1e-17`.
const KERNEL_CUT: f64 = 20.0;

/// `∫_0^∞ e^{-ax} / cosh x dx` for `a > -1`.
///
/// Integrated on `[0, X]` where `2e^{-(a+1)X}/(a+1) <= 1e-14`, then that
/// bound is added back as the tail. `X` is capped at 20, past which the tail
/// term is exact to double precision.
pub fn laplace_sech(a: f64) -> Result<f64> {
    require_laplace(a)?;
    let c = a + 1.0;
    let x_max = ((2.0 / (c * TAIL_TOL)).ln() / c).clamp(f64::MIN_POSITIVE, KERNEL_CUT);
    let kernel = |x: f64| 2.0 * (-c * x).exp() / (1.0 + (-2.0 * x).exp());
    let body = quad::integrate(kernel, 0.0, x_max, QUAD_TOL, QUAD_TOL, quad::DEFAULT_MAX_PANELS)?;
    Ok(body.value + 2.0 * (-c * x_max).exp() / c)
}

/// `∫_0^∞ x e^{-ax} / cosh x dx` for `a > -1`, with the same tail treatment.
pub fn laplace_x_sech(a: f64) -> Result<f64> {
    require_laplace(a)?;
    let c = a + 1.0;
    let tail = |x: f64| 2.0 * (-c * x).exp() * (x / c + 1.0 / (c * c));
    let mut x_max = (2.0 / (c * c * TAIL_TOL)).ln().max(1.0) / c;
    for _ in 0..64 {
        let next = (2.0 * (x_max / c + 1.0 / (c * c)) / TAIL_TOL).ln() / c;
        let done = (next - x_max).abs() <= 1e-12 * x_max;
        x_max = next;
        if done {
            break;
        }
    }
    let x_max = x_max.clamp(f64::MIN_POSITIVE, KERNEL_CUT);
    let kernel = |x: f64| 2.0 * x * (-c * x).exp() / (1.0 + (-2.0 * x).exp());
    let body = quad::integrate(kernel, 0.0, x_max, QUAD_TOL, QUAD_TOL, quad::DEFAULT_MAX_PANELS)?;
    Ok(body.value + tail(x_max))
}

/// `2 ∫_0^1 x^s / (1 + x²) dx` for `s > -1`; equal to [`laplace_sech`]`(s)`.
///
/// For `s < 1` the substitution `x = u^{1/(s+1)}` removes the endpoint
/// singularity.
pub fn euler_integral(s: f64) -> Result<f64> {
    if !(s > -1.0 && s.is_finite()) {
        return Err(domain(format!("s = {s}: the integral 2∫x^s/(1+x²) over [0,1] needs s > -1")));
    }
    let r = if s < 1.0 {
        let m = 1.0 / (s + 1.0);
        quad::integrate(|u| 2.0 * m / (1.0 + u.powf(2.0 * m)), 0.0, 1.0, QUAD_TOL, QUAD_TOL, quad::DEFAULT_MAX_PANELS)?
    } else {
        quad::integrate(|x| 2.0 * x.powf(s) / (1.0 + x * x), 0.0, 1.0, QUAD_TOL, QUAD_TOL, quad::DEFAULT_MAX_PANELS)?
    };
    Ok(r.value)
}

/// `φ(s, r) = s + shift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedArgument {
    pub shift: f64,
    pub r: f64,
}

impl ShiftedArgument {
    pub fn new(shift: f64, r: f64) -> Self {
        ShiftedArgument { shift, r }
    }

    /// `φ = s + 1 - r`.
    pub fn f1(r: f64) -> Self {
        ShiftedArgument::new(1.0 - r, r)
    }

    /// `φ = s + r - 1`.
    pub fn f2(r: f64) -> Self {
        ShiftedArgument::new(r - 1.0, r)
    }

    pub fn phi(&self, s: f64) -> f64 {
        s + self.shift
    }
}

/// Half the denominator of [`cf_phi`]: `φ + K(n²r²/φ)`.
pub fn cf_phi_spec(arg: ShiftedArgument, s: f64) -> CfSpec<'static> {
    let phi = arg.phi(s);
    let r2 = arg.r * arg.r;
    CfSpec::new(phi, move |n| (n * n) as f64 * r2, move |_| phi)
}

/// `1 / (2φ + 2K(n²r²/φ))` with `budget.tol` applied to the result.
///
/// Returns an unconverged [`Evaluation`] rather than an error when the depth
/// runs out.
pub fn cf_phi(arg: ShiftedArgument, s: f64, budget: impl Into<Budget>) -> Result<Evaluation> {
    let phi = arg.phi(s);
    if !(phi > 0.0 && phi.is_finite()) {
        return Err(domain(format!("φ = {phi}: the continued fraction needs φ(s, r) > 0")));
    }
    if !(arg.r > 0.0 && arg.r.is_finite()) {
        return Err(domain(format!("r = {}: the continued fraction needs r > 0", arg.r)));
    }
    let budget = budget.into();
    // the half-denominator is at least φ, so this tolerance maps onto budget.tol
    let inner = eval_forward(&cf_phi_spec(arg, s), 2.0 * phi * phi * budget.tol, budget.max_depth)?;
    Ok(inner.reciprocal(2.0, budget.tol))
}

/// `(1/2r) ∫ e^{-xφ/r} / cosh x dx`, the integral form of [`cf_phi`].
pub fn phi_integral(arg: ShiftedArgument, s: f64) -> Result<f64> {
    Ok(laplace_sech(arg.phi(s) / arg.r)? / (2.0 * arg.r))
}

/// `(1/2r²) ∫ x e^{-xφ/r} / cosh x dx = -d/ds` [`phi_integral`].
pub fn phi_x_integral(arg: ShiftedArgument, s: f64) -> Result<f64> {
    Ok(laplace_x_sech(arg.phi(s) / arg.r)? / (2.0 * arg.r * arg.r))
}

fn quadrature_eval(value: f64, scale: f64) -> Evaluation {
    Evaluation {
        value,
        iterations: 0,
        err_estimate: 10.0 * QUAD_TOL * scale,
        converged: true,
        method: Method::Quadrature,
    }
}

fn first_half(arg: ShiftedArgument, p: DomainPoint, budget: Budget) -> Result<Evaluation> {
    p.require_r()?;
    if !(p.s.is_finite() && arg.phi(p.s) / p.r > -1.0) {
        return Err(domain(format!(
            "s = {}: the logarithmic derivative needs (s + {}) / r > -1",
            p.s, arg.shift
        )));
    }
    if p.s > (p.r - 1.0).abs() + CF_SWITCH_MARGIN {
        let ev = cf_phi(arg, p.s, budget)?;
        if ev.converged {
            return Ok(ev);
        }
    }
    Ok(quadrature_eval(phi_integral(arg, p.s)?, 1.0 / p.r))
}

fn budget_for(tol: f64) -> Result<Budget> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    Ok(Budget::new(tol, CF_MAX_DEPTH))
}

/// `f1(s, r) = 1 / (2 - 2r + 2s + 2K(n²r²/(1 - r + s)))`.
pub fn f1_eval(p: DomainPoint, budget: impl Into<Budget>) -> Result<Evaluation> {
    first_half(ShiftedArgument::f1(p.r), p, budget.into())
}

/// `f2(s, r) = 1 / (2r - 2 + 2s + 2K(n²r²/(r - 1 + s)))`.
pub fn f2_eval(p: DomainPoint, budget: impl Into<Budget>) -> Result<Evaluation> {
    first_half(ShiftedArgument::f2(p.r), p, budget.into())
}

pub fn f1(p: DomainPoint, tol: f64) -> Result<f64> {
    Ok(f1_eval(p, budget_for(tol)?)?.value)
}

pub fn f2(p: DomainPoint, tol: f64) -> Result<f64> {
    Ok(f2_eval(p, budget_for(tol)?)?.value)
}

/// `∂/∂s ln y(s, r) = f1 + f2`.
pub fn dlog_y(p: DomainPoint, tol: f64) -> Result<f64> {
    Ok(f1(p, tol / 2.0)? + f2(p, tol / 2.0)?)
}

/// Half the denominator of `h`: `A + TK(4n²r²/1, 4n²r²/A)`.
pub fn h_spec(arg: ShiftedArgument, s: f64) -> CfSpec<'static> {
    let phi = arg.phi(s);
    let a = (phi - arg.r) * (phi + arg.r);
    let r2 = arg.r * arg.r;
    tk_to_cf(a, move |n| 4.0 * (n * n) as f64 * r2, 1.0, move |_| a)
}

fn second_half(arg: ShiftedArgument, p: DomainPoint, budget: Budget) -> Result<Evaluation> {
    p.require_second()?;
    let phi = arg.phi(p.s);
    let a = (phi - p.r) * (phi + p.r);
    let inner = eval_forward(&h_spec(arg, p.s), 2.0 * a * a * budget.tol, budget.max_depth)?;
    let ev = inner.reciprocal(2.0, budget.tol);
    if ev.converged {
        return Ok(ev);
    }
    Ok(quadrature_eval(phi_x_integral(arg, p.s)?, 1.0 / (p.r * p.r)))
}

/// `h1(s, r) = 1 / (2(1-2r+s)(1+s) + 2TK(4n²r²/1, 4n²r²/((1-2r+s)(1+s))))`.
pub fn h1_eval(p: DomainPoint, budget: impl Into<Budget>) -> Result<Evaluation> {
    second_half(ShiftedArgument::f1(p.r), p, budget.into())
}

/// `h2(s, r) = 1 / (2(2r-1+s)(s-1) + 2TK(4n²r²/1, 4n²r²/((2r-1+s)(s-1))))`.
pub fn h2_eval(p: DomainPoint, budget: impl Into<Budget>) -> Result<Evaluation> {
    second_half(ShiftedArgument::f2(p.r), p, budget.into())
}

pub fn h1(p: DomainPoint, tol: f64) -> Result<f64> {
    Ok(h1_eval(p, budget_for(tol)?)?.value)
}

pub fn h2(p: DomainPoint, tol: f64) -> Result<f64> {
    Ok(h2_eval(p, budget_for(tol)?)?.value)
}

/// `∂²/∂s² ln y(s, r) = -(h1 + h2)`.
pub fn d2log_y(p: DomainPoint, tol: f64) -> Result<f64> {
    Ok(-(h1(p, tol / 2.0)? + h2(p, tol / 2.0)?))
}

/// Period-`2r` identities satisfied by the logarithmic derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    /// `f1(s) + f1(s+2r) = 1/(s+1)`
    F1,
    /// `f2(s) + f2(s+2r) = 1/(s+2r-1)`
    F2,
    /// `h1(s) + h1(s+2r) = 1/(s+1)²`
    H1,
    /// `h2(s) + h2(s+2r) = 1/(s+2r-1)²`
    H2,
    /// `(ln y)'(s) + (ln y)'(s+2r) = 1/(s+1) + 1/(s+2r-1)`
    FirstDerivative,
    /// `(ln y)''(s) + (ln y)''(s+2r) = -1/(s+1)² - 1/(s+2r-1)²`
    SecondDerivative,
}

impl Identity {
    pub const ALL: [Identity; 6] = [
        Identity::F1,
        Identity::F2,
        Identity::H1,
        Identity::H2,
        Identity::FirstDerivative,
        Identity::SecondDerivative,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Identity::F1 => "f1(s)+f1(s+2r)=1/(s+1)",
            Identity::F2 => "f2(s)+f2(s+2r)=1/(s+2r-1)",
            Identity::H1 => "h1(s)+h1(s+2r)=1/(s+1)^2",
            Identity::H2 => "h2(s)+h2(s+2r)=1/(s+2r-1)^2",
            Identity::FirstDerivative => "dlog_y(s)+dlog_y(s+2r)=1/(s+1)+1/(s+2r-1)",
            Identity::SecondDerivative => "d2log_y(s)+d2log_y(s+2r)=-1/(s+1)^2-1/(s+2r-1)^2",
        }
    }

    /// Whether the identity involves the second derivative, whose domain is
    /// `s > max(1, 2r - 1)`.
    pub fn is_second_order(self) -> bool {
        matches!(self, Identity::H1 | Identity::H2 | Identity::SecondDerivative)
    }

    /// Absolute residual `|lhs - rhs|` at `p`, each term computed to `tol`.
    pub fn residual(self, p: DomainPoint, tol: f64) -> Result<f64> {
        let q = p.next_period();
        let (u, v) = (p.s + 1.0, p.s + 2.0 * p.r - 1.0);
        let (lhs, rhs) = match self {
            Identity::F1 => (f1(p, tol)? + f1(q, tol)?, 1.0 / u),
            Identity::F2 => (f2(p, tol)? + f2(q, tol)?, 1.0 / v),
            Identity::H1 => (h1(p, tol)? + h1(q, tol)?, 1.0 / (u * u)),
            Identity::H2 => (h2(p, tol)? + h2(q, tol)?, 1.0 / (v * v)),
            Identity::FirstDerivative => (dlog_y(p, tol)? + dlog_y(q, tol)?, 1.0 / u + 1.0 / v),
            Identity::SecondDerivative => (d2log_y(p, tol)? + d2log_y(q, tol)?, -1.0 / (u * u) - 1.0 / (v * v)),
        };
        Ok((lhs - rhs).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfcore::DEFAULT_MAX_DEPTH;
    use crate::specfun::{solve_shift_equation, ShiftEquation};
    use std::f64::consts::{LN_2, PI};

    const CATALAN: f64 = 0.915_965_594_177_219;

    // Σ(-1)^n 2/(a+2n+1)^power; the bracket midpoint is accurate to about
    // the square of the final term, so a loose tolerance suffices.
    fn alternating(a: f64, power: i32) -> f64 {
        let p = ShiftEquation::new(move |t: f64| 2.0 / t.powi(power), 2.0);
        let tol = if power == 1 { 2e-7 } else { 1e-12 };
        solve_shift_equation(&p, a + 1.0, tol).unwrap()
    }

    #[test]
    fn laplace_sech_values() {
        assert!((laplace_sech(1.0).unwrap() - LN_2).abs() < 1e-12);
        assert!((laplace_sech(0.0).unwrap() - PI / 2.0).abs() < 1e-12);
        let a = 1e4;
        assert!((a * laplace_sech(a).unwrap() - 1.0).abs() < 1e-3);
        for a in [0.3, 2.5, 7.0] {
            assert!((laplace_sech(a).unwrap() - alternating(a, 1)).abs() < 1e-12, "a = {a}");
        }
    }

    #[test]
    fn laplace_sech_near_the_edge() {
        let c = 1e-3;
        let v = laplace_sech(c - 1.0).unwrap();
        assert!((v - (2.0 / c - alternating(c + 1.0, 1))).abs() < 1e-8);
    }

    #[test]
    fn euler_integral_values() {
        assert!((euler_integral(1.0).unwrap() - LN_2).abs() < 1e-12);
        assert!((euler_integral(0.0).unwrap() - PI / 2.0).abs() < 1e-12);
        assert!((euler_integral(3.7).unwrap() - laplace_sech(3.7).unwrap()).abs() < 1e-12);
        assert!((euler_integral(-0.9).unwrap() - laplace_sech(-0.9).unwrap()).abs() < 1e-11);
    }

    #[test]
    fn laplace_x_sech_values() {
        assert!((laplace_x_sech(0.0).unwrap() - 2.0 * CATALAN).abs() < 1e-12);
        assert!((laplace_x_sech(1.0).unwrap() - PI * PI / 24.0).abs() < 1e-12);
        for a in [-0.5, 0.7, 4.0, 30.0] {
            assert!((laplace_x_sech(a).unwrap() - alternating(a, 2)).abs() < 1e-10, "a = {a}");
        }
    }

    #[test]
    fn laplace_x_sech_is_minus_the_derivative() {
        let h = 1e-5;
        for a in [-0.3, 0.0, 1.0, 6.0] {
            let fd = -(laplace_sech(a + h).unwrap() - laplace_sech(a - h).unwrap()) / (2.0 * h);
            assert!((fd - laplace_x_sech(a).unwrap()).abs() < 1e-7, "a = {a}");
        }
    }

    #[test]
    fn domain_edges() {
        assert!(matches!(laplace_sech(-1.0), Err(Error::Domain(_))));
        assert!(matches!(laplace_x_sech(-2.0), Err(Error::Domain(_))));
        assert!(matches!(euler_integral(-1.0), Err(Error::Domain(_))));
        assert!(matches!(cf_phi(ShiftedArgument::new(-2.0, 1.0), 1.0, 1e-8), Err(Error::Domain(_))));
        assert!(matches!(h1(DomainPoint::new(1.0, 1.0), 1e-8), Err(Error::Domain(_))));
        assert!(matches!(h2(DomainPoint::new(2.0, 1.5), 1e-8), Err(Error::Domain(_))));
        assert!(matches!(f1(DomainPoint::new(-1.0, 2.0), 1e-8), Err(Error::Domain(_))));
        assert!(matches!(f2(DomainPoint::new(-1.5, 1.2), 1e-8), Err(Error::Domain(_))));
        assert!(matches!(f1(DomainPoint::new(1.0, 0.5), 1e-8), Err(Error::Domain(_))));
    }

    #[test]
    fn cf_phi_worked_example() {
        // φ = s + sin r at s = 1, r = π/2: 1/(φ + K(n²r²/φ)) is twice cf_phi
        let r = PI / 2.0;
        let arg = ShiftedArgument::new(r.sin(), r);
        let ev = cf_phi(arg, 1.0, Budget::new(1e-6, DEFAULT_MAX_DEPTH)).unwrap();
        assert!(ev.converged);
        let expected = (2.0 / PI) * laplace_sech(4.0 / PI).unwrap();
        assert!((2.0 * ev.value - expected).abs() <= 2.0 * ev.err_estimate);
    }

    #[test]
    fn cf_phi_matches_the_integral() {
        let ev = cf_phi(ShiftedArgument::new(0.0, 1.0), 2.0, 1e-10).unwrap();
        assert!((ev.value - 0.5 * laplace_sech(2.0).unwrap()).abs() < 1e-10);
        let ev = cf_phi(ShiftedArgument::new(0.0, 3.0), 5.0, 1e-10).unwrap();
        assert!(ev.converged);
        assert!((ev.value - laplace_sech(5.0 / 3.0).unwrap() / 6.0).abs() < 1e-9);
        assert!((ev.value - euler_integral(5.0 / 3.0).unwrap() / 6.0).abs() < 1e-9);
    }

    #[test]
    fn cf_phi_reports_non_convergence() {
        let ev = cf_phi(ShiftedArgument::new(0.0, 5.0), 0.5, Budget::new(1e-12, 1000)).unwrap();
        assert!(!ev.converged);
        assert!((ev.value - phi_integral(ShiftedArgument::new(0.0, 5.0), 0.5).unwrap()).abs() <= ev.err_estimate);
    }

    #[test]
    fn first_halves() {
        let p = DomainPoint::new(2.0, 1.5);
        let q = p.next_period();
        assert!((f1(p, 1e-11).unwrap() + f1(q, 1e-11).unwrap() - 1.0 / 3.0).abs() < 1e-9);
        assert!((f2(p, 1e-11).unwrap() + f2(q, 1e-11).unwrap() - 1.0 / 4.0).abs() < 1e-9);
        for s in [0.2, 3.0, 6.0] {
            let p = DomainPoint::new(s, 1.0);
            let (a, b) = (f1(p, 1e-11).unwrap(), f2(p, 1e-11).unwrap());
            assert_eq!(a, b);
            assert!((a + b - laplace_sech(s).unwrap()).abs() < 1e-11, "s = {s}");
            if s > 1.0 {
                let whole = CfSpec::new(s, |n| (n * n) as f64, move |_| s);
                let ev = eval_forward(&whole, 1e-12, DEFAULT_MAX_DEPTH).unwrap();
                assert!((a + b - 1.0 / ev.value).abs() < 1e-10, "s = {s}");
            }
        }
    }

    #[test]
    fn overlap_band_brackets_the_integral() {
        // just above the switch the fraction converges like n^{-φ/r}; its
        // bracket must still contain the integral
        for (s, r) in [(0.75, 1.5), (1.2, 2.0), (0.35, 0.7), (4.5, 5.0)] {
            for arg in [ShiftedArgument::f1(r), ShiftedArgument::f2(r)] {
                let cf = cf_phi(arg, s, Budget::new(1e-11, DEFAULT_MAX_DEPTH)).unwrap();
                let int = phi_integral(arg, s).unwrap();
                assert!((cf.value - int).abs() <= cf.err_estimate + 1e-12, "({s}, {r}) shift {}", arg.shift);
            }
        }
    }

    #[test]
    fn paths_agree_where_the_fraction_converges() {
        for (s, r) in [(6.0, 1.5), (3.0, 0.6), (9.0, 2.0), (5.0, 1.0)] {
            for arg in [ShiftedArgument::f1(r), ShiftedArgument::f2(r)] {
                let cf = cf_phi(arg, s, Budget::new(1e-11, DEFAULT_MAX_DEPTH)).unwrap();
                assert!(cf.err_estimate < 1e-9);
                assert!((cf.value - phi_integral(arg, s).unwrap()).abs() < 1e-9, "({s}, {r})");
            }
        }
    }

    #[test]
    fn integral_path_near_zero() {
        let ev = f1_eval(DomainPoint::new(0.05, 2.0), 1e-10).unwrap();
        assert_eq!(ev.method, Method::Quadrature);
        let ev = f2_eval(DomainPoint::new(0.0, 1.0), 1e-10).unwrap();
        assert!((ev.value - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn dlog_at_one_one() {
        // b'/b(1) = (ψ(1) - ψ(1/2)) / 2 = ln 2
        assert!((dlog_y(DomainPoint::new(1.0, 1.0), 1e-10).unwrap() - LN_2).abs() < 1e-9);
    }

    #[test]
    fn dlog_large_s() {
        let s = 1e3;
        let v = dlog_y(DomainPoint::new(s, 2.0), 1e-12).unwrap();
        assert!((v * s - 1.0).abs() < 1e-5);
    }

    #[test]
    fn second_halves() {
        let p = DomainPoint::new(3.0, 1.2);
        let q = p.next_period();
        assert!((h1(p, 1e-11).unwrap() + h1(q, 1e-11).unwrap() - 1.0 / 16.0).abs() < 1e-9);
        for (s, r) in [(3.0, 1.0), (2.5, 1.5), (6.0, 3.0)] {
            let p = DomainPoint::new(s, r);
            for arg in [ShiftedArgument::f1(r), ShiftedArgument::f2(r)] {
                let ev = second_half(arg, p, Budget::new(1e-11, CF_MAX_DEPTH)).unwrap();
                assert!((ev.value - phi_x_integral(arg, s).unwrap()).abs() < 1e-9, "({s}, {r})");
            }
        }
    }

    #[test]
    fn second_derivative_at_r_one() {
        let p = DomainPoint::new(3.0, 1.0);
        assert_eq!(h1(p, 1e-11).unwrap(), h2(p, 1e-11).unwrap());
        assert!((d2log_y(p, 1e-11).unwrap() + laplace_x_sech(3.0).unwrap()).abs() < 1e-9);
        let whole = tk_to_cf(8.0, |n| 4.0 * (n * n) as f64, 1.0, |_| 8.0);
        let ev = eval_forward(&whole, 1e-12, DEFAULT_MAX_DEPTH).unwrap();
        assert!((d2log_y(p, 1e-11).unwrap() + 1.0 / ev.value).abs() < 1e-9);
    }

    #[test]
    fn second_worked_example() {
        // φ = s + sin r, r = π/2: the derivative of the first-order fraction
        let r = PI / 2.0;
        let arg = ShiftedArgument::new(r.sin(), r);
        let s = 2.0;
        let h = 1e-4;
        let f = |s: f64| cf_phi(arg, s, Budget::new(1e-13, DEFAULT_MAX_DEPTH)).unwrap().value;
        let fd = (f(s + h) - f(s - h)) / (2.0 * h);
        let expected = laplace_x_sech(2.0 * (s + 1.0) / PI).unwrap() / (2.0 * r * r);
        assert!((fd + expected).abs() < 1e-6);
        // the TK form with A = (s+1)² - π²/4
        let a = (s + 1.0) * (s + 1.0) - r * r;
        let tk = tk_to_cf(a, move |n| 4.0 * (n * n) as f64 * r * r, 1.0, move |_| a);
        let ev = eval_forward(&tk, 1e-12, DEFAULT_MAX_DEPTH).unwrap();
        assert!((0.5 / ev.value - expected).abs() < 1e-9);
    }

    #[test]
    fn identity_residuals() {
        let p = DomainPoint::new(2.0, 1.5);
        for id in Identity::ALL.into_iter().filter(|id| !id.is_second_order()) {
            assert!(id.residual(p, 1e-11).unwrap() < 1e-9, "{}", id.as_str());
        }
        let p = DomainPoint::new(4.0, 1.5);
        for id in Identity::ALL {
            assert!(id.residual(p, 1e-11).unwrap() < 1e-9, "{}", id.as_str());
        }
    }
}
