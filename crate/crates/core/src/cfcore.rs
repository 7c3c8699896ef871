//! Continued-fraction evaluation engine.
//!
//! A fraction `b0 + a1/(b1 + a2/(b2 + ...))` is described by a [`CfSpec`]
//! holding its leading term and two element generators. When every element
//! is positive the even convergents increase and the odd convergents
//! decrease towards the limit, so two consecutive convergents always
//! bracket the value. [`eval_forward`] relies on that bracket for its error
//! estimate.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Generator of partial numerators or denominators, indexed from 1.
pub type Element<'a> = Arc<dyn Fn(usize) -> f64 + Send + Sync + 'a>;

/// Default cap on the number of levels [`eval_forward`] may unroll.
pub const DEFAULT_MAX_DEPTH: usize = 1_000_000;

/// Recurrence pairs are renormalized once a magnitude exceeds this.
const RESCALE_THRESHOLD: f64 = 1e150;
/// 2^-500; a power of two so rescaling is exact.
const RESCALE_FACTOR: f64 = 3.054936363499605e-151;

/// Number of transform parameters checked eagerly by [`equivalence_transform`].
pub const TRANSFORM_CHECK_DEPTH: usize = 1 << 16;

/// Generator description of `b0 + K_{n>=1}(a(n) / b(n))`.
#[derive(Clone)]
pub struct CfSpec<'a> {
    pub b0: f64,
    a: Element<'a>,
    b: Element<'a>,
}

impl<'a> CfSpec<'a> {
    pub fn new<A, B>(b0: f64, a: A, b: B) -> Self
    where
        A: Fn(usize) -> f64 + Send + Sync + 'a,
        B: Fn(usize) -> f64 + Send + Sync + 'a,
    {
        CfSpec {
            b0,
            a: Arc::new(a),
            b: Arc::new(b),
        }
    }

    /// Partial numerator `a(n)`, `n >= 1`.
    #[inline]
    pub fn a(&self, n: usize) -> f64 {
        (self.a)(n)
    }

    /// Partial denominator `b(n)`, `n >= 1`.
    #[inline]
    pub fn b(&self, n: usize) -> f64 {
        (self.b)(n)
    }

    /// True when the first `depth` elements of both fractions agree exactly.
    pub fn same_elements(&self, other: &CfSpec<'_>, depth: usize) -> bool {
        self.b0 == other.b0 && (1..=depth).all(|n| self.a(n) == other.a(n) && self.b(n) == other.b(n))
    }
}

impl fmt::Debug for CfSpec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CfSpec")
            .field("b0", &self.b0)
            .field("a", &[self.a(1), self.a(2), self.a(3)])
            .field("b", &[self.b(1), self.b(2), self.b(3)])
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ForwardBracket,
    Lentz,
    Backward,
    Product,
    Quadrature,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ForwardBracket => "forward-bracket",
            Method::Lentz => "lentz",
            Method::Backward => "backward",
            Method::Product => "product",
            Method::Quadrature => "quadrature",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A value together with its convergence metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub iterations: usize,
    /// Half-width of the final bracket (or the Lentz step for [`Method::Lentz`]).
    pub err_estimate: f64,
    pub converged: bool,
    pub method: Method,
}

impl Evaluation {
    pub fn lower(&self) -> f64 {
        self.value - self.err_estimate
    }

    pub fn upper(&self) -> f64 {
        self.value + self.err_estimate
    }

    /// Pushes the bracket `[lower, upper]` through a monotone map and
    /// re-centres it. Convergence is re-judged against `tol`.
    pub fn map_monotone(&self, tol: f64, f: impl Fn(f64) -> f64) -> Evaluation {
        let (x, y) = (f(self.lower()), f(self.upper()));
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let err = 0.5 * (hi - lo);
        Evaluation {
            value: 0.5 * (lo + hi),
            err_estimate: err,
            converged: err <= tol,
            ..*self
        }
    }

    /// `1 / (scale * x)` applied to a bracket of positive values.
    pub fn reciprocal(&self, scale: f64, tol: f64) -> Evaluation {
        self.map_monotone(tol, |x| 1.0 / (scale * x))
    }
}

/// Stopping rule for the continued-fraction evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    /// Absolute tolerance on the bracket half-width.
    pub tol: f64,
    pub max_depth: usize,
}

impl Budget {
    pub fn new(tol: f64, max_depth: usize) -> Self {
        Budget { tol, max_depth }
    }

    pub fn with_tol(self, tol: f64) -> Self {
        Budget { tol, ..self }
    }
}

impl From<f64> for Budget {
    fn from(tol: f64) -> Self {
        Budget {
            tol,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

/// Forward three-term recurrence for the convergents `A_n / B_n`.
pub struct Recurrence<'s, 'a> {
    cf: &'s CfSpec<'a>,
    n: usize,
    num: (f64, f64),
    den: (f64, f64),
    threshold: f64,
    terminated: bool,
}

impl<'s, 'a> Recurrence<'s, 'a> {
    pub fn new(cf: &'s CfSpec<'a>) -> Self {
        Self::with_threshold(cf, RESCALE_THRESHOLD)
    }

    pub(crate) fn with_threshold(cf: &'s CfSpec<'a>, threshold: f64) -> Self {
        Recurrence {
            cf,
            n: 0,
            num: (1.0, cf.b0),
            den: (0.0, 1.0),
            threshold,
            terminated: false,
        }
    }

    /// Index of the current convergent.
    pub fn depth(&self) -> usize {
        self.n
    }

    pub fn current(&self) -> f64 {
        self.num.1 / self.den.1
    }

    /// True once a zero partial numerator has cut the fraction off.
    pub fn terminated(&self) -> bool {
        self.terminated
    }

    /// Advances to the next convergent. A zero numerator truncates the
    /// fraction: every later convergent equals the current one.
    pub fn advance(&mut self) -> Result<f64> {
        if self.terminated {
            self.n += 1;
            return Ok(self.current());
        }
        let n = self.n + 1;
        let a = self.cf.a(n);
        let b = self.cf.b(n);
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::NonPositiveElement { index: n, value: a });
        }
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::NonPositiveElement { index: n, value: b });
        }
        self.n = n;
        if a == 0.0 {
            self.terminated = true;
            return Ok(self.current());
        }
        let num = b * self.num.1 + a * self.num.0;
        let den = b * self.den.1 + a * self.den.0;
        self.num = (self.num.1, num);
        self.den = (self.den.1, den);
        if num.abs() > self.threshold || den.abs() > self.threshold {
            self.num.0 *= RESCALE_FACTOR;
            self.num.1 *= RESCALE_FACTOR;
            self.den.0 *= RESCALE_FACTOR;
            self.den.1 *= RESCALE_FACTOR;
        }
        Ok(self.current())
    }
}

/// Convergents `0..=depth` of a positive-element fraction.
pub fn convergents(cf: &CfSpec<'_>, depth: usize) -> Result<Vec<f64>> {
    let mut rec = Recurrence::new(cf);
    let mut out = Vec::with_capacity(depth + 1);
    out.push(rec.current());
    for _ in 0..depth {
        out.push(rec.advance()?);
    }
    Ok(out)
}

/// Evaluates a positive-element fraction by the forward recurrence, stopping
/// when consecutive convergents are within `2 * tol` of each other.
///
/// Running out of depth is not an error: the best bracket is returned with
/// `converged == false`.
pub fn eval_forward(cf: &CfSpec<'_>, tol: f64, max_depth: usize) -> Result<Evaluation> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if max_depth < 2 {
        return Err(Error::InvalidArgument(format!("max_depth must be at least 2, got {max_depth}")));
    }
    let mut rec = Recurrence::new(cf);
    let mut prev = rec.current();
    let mut half = f64::INFINITY;
    let mut mid = prev;
    for n in 1..=max_depth {
        let cur = rec.advance()?;
        if rec.terminated() {
            return Ok(Evaluation {
                value: cur,
                iterations: n,
                err_estimate: 0.0,
                converged: true,
                method: Method::ForwardBracket,
            });
        }
        half = 0.5 * (cur - prev).abs();
        mid = 0.5 * (cur + prev);
        if half <= tol {
            return Ok(Evaluation {
                value: mid,
                iterations: n,
                err_estimate: half,
                converged: true,
                method: Method::ForwardBracket,
            });
        }
        prev = cur;
    }
    Ok(Evaluation {
        value: mid,
        iterations: max_depth,
        err_estimate: half,
        converged: false,
        method: Method::ForwardBracket,
    })
}

/// Modified Lentz evaluation. Needs no sign conditions on the elements;
/// the error estimate is the last relative step times the value.
pub fn eval_lentz(cf: &CfSpec<'_>, tol: f64, max_depth: usize) -> Result<Evaluation> {
    const TINY: f64 = 1e-300;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut f = if cf.b0 == 0.0 { TINY } else { cf.b0 };
    let mut c = f;
    let mut d = 0.0;
    let mut step = f64::INFINITY;
    for n in 1..=max_depth {
        let (a, b) = (cf.a(n), cf.b(n));
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::NonPositiveElement {
                index: n,
                value: if a.is_finite() { b } else { a },
            });
        }
        if a == 0.0 {
            return Ok(Evaluation {
                value: f,
                iterations: n,
                err_estimate: 0.0,
                converged: true,
                method: Method::Lentz,
            });
        }
        d = b + a * d;
        if d == 0.0 {
            d = TINY;
        }
        c = b + a / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        step = (delta - 1.0).abs();
        if step * f.abs() <= tol {
            return Ok(Evaluation {
                value: f,
                iterations: n,
                err_estimate: step * f.abs(),
                converged: true,
                method: Method::Lentz,
            });
        }
    }
    Ok(Evaluation {
        value: f,
        iterations: max_depth,
        err_estimate: step * f.abs(),
        converged: false,
        method: Method::Lentz,
    })
}

/// The `depth`-th convergent computed bottom-up with the tail set to zero.
pub fn eval_backward(cf: &CfSpec<'_>, depth: usize) -> Result<f64> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let mut tail = 0.0;
    for n in (1..=depth).rev() {
        let den = cf.b(n) + tail;
        if den == 0.0 {
            return Err(Error::DivisionByZeroDenominator { level: n });
        }
        tail = cf.a(n) / den;
    }
    Ok(cf.b0 + tail)
}

/// Equivalence transform with parameters `r0, r_seq(1), r_seq(2), ...`:
///
/// `b0' = r0 b0`, `a'(n) = r(n-1) r(n) a(n)`, `b'(n) = r(n) b(n)`, with `r(0) = r0`.
///
/// Every convergent of the result is `r0` times the matching convergent of
/// `cf`; with `r0 = 1` the value is unchanged. Parameters are checked
/// eagerly up to [`TRANSFORM_CHECK_DEPTH`].
pub fn equivalence_transform<'a, R>(cf: CfSpec<'a>, r_seq: R, r0: f64) -> Result<CfSpec<'a>>
where
    R: Fn(usize) -> f64 + Send + Sync + 'a,
{
    if r0 == 0.0 {
        return Err(Error::ZeroParameter { index: 0 });
    }
    if let Some(index) = (1..=TRANSFORM_CHECK_DEPTH).find(|&n| r_seq(n) == 0.0) {
        return Err(Error::ZeroParameter { index });
    }
    let r: Element<'a> = Arc::new(move |n| if n == 0 { r0 } else { r_seq(n) });
    let (ra, rb) = (r.clone(), r);
    let (a, b) = (cf.a, cf.b);
    Ok(CfSpec {
        b0: r0 * cf.b0,
        a: Arc::new(move |n| ra(n - 1) * ra(n) * a(n)),
        b: Arc::new(move |n| rb(n) * b(n)),
    })
}

/// Unfolds the period-two composed fraction
/// `prefix + num(1)/alt1 + num(1)/alt2(1) + num(2)/alt1 + num(2)/alt2(2) + ...`
/// into an ordinary [`CfSpec`].
pub fn tk_to_cf<'a, N, D>(prefix: f64, num: N, alt1: f64, alt2: D) -> CfSpec<'a>
where
    N: Fn(usize) -> f64 + Send + Sync + 'a,
    D: Fn(usize) -> f64 + Send + Sync + 'a,
{
    CfSpec::new(
        prefix,
        move |k| num(k.div_ceil(2)),
        move |k| if k % 2 == 1 { alt1 } else { alt2(k / 2) },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn brouncker(s: f64) -> CfSpec<'static> {
        CfSpec::new(s, |n| ((2 * n - 1) as f64).powi(2), move |_| 2.0 * s)
    }

    #[test]
    fn brouncker_at_one_brackets_four_over_pi() {
        let ev = eval_forward(&brouncker(1.0), 1e-6, DEFAULT_MAX_DEPTH).unwrap();
        assert!(ev.converged);
        assert!((ev.value - 4.0 / PI).abs() <= ev.err_estimate);
    }

    #[test]
    fn zero_numerators_truncate() {
        let cf = CfSpec::new(2.5, |_| 0.0, |_| 3.0);
        let ev = eval_forward(&cf, 1e-12, 10).unwrap();
        assert_eq!(ev.value, 2.5);
        assert_eq!(ev.err_estimate, 0.0);
        assert!(ev.converged);
    }

    #[test]
    fn negative_elements_are_rejected() {
        let cf = CfSpec::new(1.0, |n| if n == 3 { -1.0 } else { 1.0 }, |_| 1.0);
        assert_eq!(
            eval_forward(&cf, 1e-12, 10),
            Err(Error::NonPositiveElement { index: 3, value: -1.0 })
        );
        let cf = CfSpec::new(1.0, |_| 1.0, |n| if n == 2 { 0.0 } else { 1.0 });
        assert!(matches!(eval_forward(&cf, 1e-12, 10), Err(Error::NonPositiveElement { index: 2, .. })));
    }

    #[test]
    fn exhausted_depth_reports_unconverged_bracket() {
        let ev = eval_forward(&brouncker(1.0), 1e-12, 100).unwrap();
        assert!(!ev.converged);
        assert_eq!(ev.iterations, 100);
        assert!((ev.value - 4.0 / PI).abs() <= ev.err_estimate);
    }

    #[test]
    fn bad_arguments() {
        assert!(eval_forward(&brouncker(1.0), 0.0, 10).is_err());
        assert!(eval_forward(&brouncker(1.0), 1e-3, 1).is_err());
        assert!(eval_backward(&brouncker(1.0), 0).is_err());
    }

    #[test]
    fn backward_one_level() {
        let s = 1.0;
        let cf = CfSpec::new(s, |_| 1.0, move |_| 2.0 * s);
        assert_eq!(eval_backward(&cf, 1).unwrap(), 1.5);
    }

    #[test]
    fn backward_zero_denominator() {
        let cf = CfSpec::new(0.0, |_| 1.0, |n| if n == 2 { 0.0 } else { 1.0 });
        assert_eq!(eval_backward(&cf, 2), Err(Error::DivisionByZeroDenominator { level: 2 }));
    }

    #[test]
    fn backward_depths_bracket_four_over_pi() {
        let cf = brouncker(1.0);
        let (x, y) = (eval_backward(&cf, 200).unwrap(), eval_backward(&cf, 201).unwrap());
        let (lo, hi) = (x.min(y), x.max(y));
        assert!(lo < 4.0 / PI && 4.0 / PI < hi);
    }

    #[test]
    fn lentz_agrees_with_forward() {
        let s = 3.0;
        let cf = brouncker(s);
        let fwd = eval_forward(&cf, 1e-13, DEFAULT_MAX_DEPTH).unwrap();
        let lentz = eval_lentz(&cf, 1e-13, DEFAULT_MAX_DEPTH).unwrap();
        assert_eq!(lentz.method, Method::Lentz);
        assert!((fwd.value - lentz.value).abs() < 1e-11);
    }

    #[test]
    fn identity_transform_keeps_elements() {
        let cf = brouncker(1.7);
        let t = equivalence_transform(cf.clone(), |_| 1.0, 1.0).unwrap();
        assert!(t.same_elements(&cf, 100));
    }

    #[test]
    fn transform_rejects_zero_parameters() {
        assert_eq!(
            equivalence_transform(brouncker(1.0), |_| 1.0, 0.0).unwrap_err(),
            Error::ZeroParameter { index: 0 }
        );
        assert_eq!(
            equivalence_transform(brouncker(1.0), |n| if n == 7 { 0.0 } else { 2.0 }, 1.0).unwrap_err(),
            Error::ZeroParameter { index: 7 }
        );
    }

    #[test]
    fn uniform_scaling_reproduces_sech_example() {
        // 2 + K((n^2 pi^2 / 4) / 2) scaled by 2 throughout is 4 + K(n^2 pi^2 / 4).
        let cf = CfSpec::new(2.0, |n| (n * n) as f64 * PI * PI / 4.0, |_| 2.0);
        let t = equivalence_transform(cf.clone(), |_| 2.0, 2.0).unwrap();
        let target = CfSpec::new(4.0, |n| (n * n) as f64 * PI * PI, |_| 4.0);
        for n in 1..50 {
            assert!((t.a(n) - target.a(n)).abs() <= 1e-13 * target.a(n));
            assert_eq!(t.b(n), target.b(n));
        }
        assert_eq!(t.b0, 4.0);
        for k in 1..60 {
            let (x, y) = (eval_backward(&cf, k).unwrap(), eval_backward(&t, k).unwrap());
            assert!((2.0 * x - y).abs() <= 1e-13 * y);
        }
    }

    #[test]
    fn transform_absorbs_scale_into_tail() {
        // 2 phi + 2 r K(n^2 / (phi/r)) with r0 = 1, r_n = r becomes 2 phi + 2 K(n^2 r^2 / phi).
        let (r, phi) = (3.0, 5.0);
        let scaled = CfSpec::new(
            2.0 * phi,
            move |n| if n == 1 { 2.0 * r } else { (n * n) as f64 },
            move |_| phi / r,
        );
        let t = equivalence_transform(scaled.clone(), move |_| r, 1.0).unwrap();
        let target = CfSpec::new(
            2.0 * phi,
            move |n| if n == 1 { 2.0 * r * r } else { (n * n) as f64 * r * r },
            move |_| phi,
        );
        for k in 1..=50 {
            let (x, y, z) = (
                eval_backward(&scaled, k).unwrap(),
                eval_backward(&t, k).unwrap(),
                eval_backward(&target, k).unwrap(),
            );
            assert!((x - y).abs() <= 1e-13 * x.abs());
            assert!((y - z).abs() <= 1e-13 * z.abs());
        }
    }

    #[test]
    fn tk_layout() {
        let s = 3.0;
        let cf = tk_to_cf(s * s - 1.0, |n| 4.0 * (n * n) as f64, 1.0, move |_| s * s - 1.0);
        assert_eq!(cf.b0, 8.0);
        assert_eq!([cf.a(1), cf.a(2), cf.a(3), cf.a(4)], [4.0, 4.0, 16.0, 16.0]);
        assert_eq!([cf.b(1), cf.b(2), cf.b(3), cf.b(4)], [1.0, 8.0, 1.0, 8.0]);
    }

    #[test]
    fn tk_with_zero_numerators_is_prefix() {
        let cf = tk_to_cf(7.25, |_| 0.0, 1.0, |_| 3.0);
        assert_eq!(eval_forward(&cf, 1e-14, 10).unwrap().value, 7.25);
    }

    #[test]
    fn rescaling_is_exact() {
        // Elements large enough to trip the threshold every few steps.
        let cf = CfSpec::new(1.0, |n| 1e40 * (n as f64).powi(2), |n| 1e20 * n as f64);
        let mut scaled = Recurrence::new(&cf);
        let mut plain = Recurrence::with_threshold(&cf, f64::INFINITY);
        for _ in 0..6 {
            let (x, y) = (scaled.advance().unwrap(), plain.advance().unwrap());
            assert_eq!(x, y);
        }
    }

    #[test]
    fn map_monotone_rejudges_convergence() {
        let ev = Evaluation {
            value: 2.0,
            iterations: 5,
            err_estimate: 0.1,
            converged: false,
            method: Method::ForwardBracket,
        };
        let r = ev.reciprocal(2.0, 0.02);
        assert!((r.lower() - 1.0 / 4.2).abs() < 1e-15);
        assert!((r.upper() - 1.0 / 3.8).abs() < 1e-15);
        assert!(r.converged);
    }
}
