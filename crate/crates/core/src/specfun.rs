//! Scalar special functions and exact integer machinery.

use std::f64::consts::PI;

use num::{BigInt, One, Zero};

use crate::error::{domain, Error, Result};

/// Below this the argument is shifted upwards before the Stirling series is used.
const STIRLING_MIN: f64 = 15.0;

/// B_{2k} / (2k (2k-1)) for k = 1..=10.
const STIRLING_COEFFS: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_406;

/// Correction term `ln Γ(x) - ((x - 1/2) ln x - x + ln(2π)/2)`.
fn stirling_series(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    for c in STIRLING_COEFFS.iter().rev() {
        series = series * inv2 + c;
    }
    series * inv
}

fn stirling(x: f64) -> f64 {
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + stirling_series(x)
}

/// Natural logarithm of the Gamma function for `x > 0`.
///
/// Arguments below 15 are shifted up with `Γ(x) = Γ(x + n) / (x (x+1) ... (x+n-1))`,
/// then the Stirling series with ten Bernoulli terms is applied.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("ln_gamma needs a positive finite argument, got {x}")));
    }
    if x >= STIRLING_MIN {
        return Ok(stirling(x));
    }
    let shift = (STIRLING_MIN - x).ceil() as usize;
    let prod: f64 = (0..shift).map(|k| x + k as f64).product();
    Ok(stirling(x + shift as f64) - prod.ln())
}

/// `ln Γ(y + d) - ln Γ(y)` for `y > 0`, `y + d > 0`, computed without the
/// cancellation of subtracting two large logarithms.
pub fn ln_gamma_shift_ratio(y: f64, d: f64) -> Result<f64> {
    let x = y + d;
    if !(y > 0.0) || !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("ln_gamma_shift_ratio needs y > 0 and y + d > 0, got y={y}, d={d}")));
    }
    let low = y.min(x);
    if low >= STIRLING_MIN {
        // (x - 1/2) ln x - (y - 1/2) ln y = d ln y + (x - 1/2) ln(1 + d/y)
        return Ok(d * y.ln() + ((x - 0.5) * (d / y).ln_1p() - d) + (stirling_series(x) - stirling_series(y)));
    }
    let shift = (STIRLING_MIN - low).ceil() as usize;
    let correction: f64 = (0..shift).map(|k| (d / (y + k as f64)).ln_1p()).sum();
    Ok(ln_gamma_shift_ratio(y + shift as f64, d)? - correction)
}

/// Γ(x) for real `x` that is not a non-positive integer. Negative arguments
/// go through the reflection formula so only positive ones reach [`ln_gamma`].
pub fn gamma(x: f64) -> Result<f64> {
    if x > 0.0 {
        return Ok(ln_gamma(x)?.exp());
    }
    if x == x.floor() {
        return Err(domain(format!("gamma has a pole at {x}")));
    }
    // Γ(x) Γ(1-x) = π / sin(πx)
    Ok(PI / ((PI * x).sin() * ln_gamma(1.0 - x)?.exp()))
}

/// Exact Euler numbers `E_0 ..= E_max_index` (the Taylor coefficients of sech,
/// scaled by n!). Only even indices are stored; odd ones are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerTable {
    even: Vec<BigInt>,
    max_index: usize,
}

impl EulerTable {
    pub fn max_index(&self) -> usize {
        self.max_index
    }

    /// `E_n`, or `None` beyond the table.
    pub fn get(&self, n: usize) -> Option<BigInt> {
        if n > self.max_index {
            None
        } else if n % 2 == 1 {
            Some(BigInt::zero())
        } else {
            Some(self.even[n / 2].clone())
        }
    }

    /// `E_{2k}` by reference.
    pub fn even(&self, k: usize) -> &BigInt {
        &self.even[k]
    }
}

/// Builds the table from `sum_{k=0}^{n} C(2n, 2k) E_{2k} = 0` (n >= 1), `E_0 = 1`.
pub fn euler_numbers(max_index: usize) -> EulerTable {
    let half = max_index / 2;
    let mut even: Vec<BigInt> = Vec::with_capacity(half + 1);
    even.push(BigInt::one());
    for n in 1..=half {
        // Row 2n of Pascal's triangle, even entries only.
        let mut acc = BigInt::zero();
        let mut binom = BigInt::one(); // C(2n, 0)
        for (k, e) in even.iter().enumerate() {
            acc += &binom * e;
            // C(2n, 2k+2) = C(2n, 2k) (2n-2k)(2n-2k-1) / ((2k+1)(2k+2))
            let (m, k) = (2 * n as u64, 2 * k as u64);
            binom = binom * ((m - k) * (m - k - 1)) / ((k + 1) * (k + 2));
        }
        even.push(-acc);
    }
    EulerTable { even, max_index }
}

/// `f(s) + f(s + step) = g(s)` posed on a monotone `g` that vanishes at infinity.
pub struct ShiftEquation<'a> {
    pub g: Box<dyn Fn(f64) -> f64 + 'a>,
    pub step: f64,
}

impl<'a> ShiftEquation<'a> {
    pub fn new(g: impl Fn(f64) -> f64 + 'a, step: f64) -> Self {
        ShiftEquation { g: Box::new(g), step }
    }
}

pub const SHIFT_SERIES_MAX_TERMS: usize = 10_000_000;

/// Sums `sum_n (-1)^n g(s + n step)`, the solution of the functional
/// equation that vanishes at infinity.
///
/// Consecutive partial sums bracket the limit; the midpoint of the final
/// bracket is returned once its half-width `|g_N| / 2` is at most `tol`.
/// Terms must keep one sign and never grow in magnitude.
pub fn solve_shift_equation(p: &ShiftEquation<'_>, s: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if !(p.step > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {}", p.step)));
    }
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut sign = 0.0;
    for n in 0..SHIFT_SERIES_MAX_TERMS {
        let t = (p.g)(s + n as f64 * p.step);
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!("g is not finite at {}", s + n as f64 * p.step)));
        }
        if t == 0.0 {
            return Ok(sum);
        }
        if sign == 0.0 {
            sign = t.signum();
        }
        if t.signum() != sign || t.abs() > prev {
            return Err(Error::MonotonicityViolated { index: n });
        }
        prev = t.abs();
        let alt = if n % 2 == 0 { t } else { -t };
        if 0.5 * t.abs() <= tol {
            return Ok(sum + 0.5 * alt);
        }
        sum += alt;
    }
    Err(Error::NotConverged {
        terms: SHIFT_SERIES_MAX_TERMS,
        estimate: 0.5 * prev,
    })
}
