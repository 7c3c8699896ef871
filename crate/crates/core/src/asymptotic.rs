//! Large-`s` expansion of `y(s, r)` in exact rational arithmetic.
//!
//! ```text
//! y(s, r) ~ s exp(-sum_{n>=1} A_n / (2n s^{2n}))
//! A_n     = sum_{k=0}^{n} C(2n, 2k) (r-1)^{2k} r^{2(n-k)} E_{2(n-k)}
//! ```
//!
//! Expanding the exponential gives the Laurent series
//! `y ~ c_{-1} s + c_1 / s + c_3 / s^3 + ...` with `c_{-1} = 1`.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::brouncker::DomainPoint;
use crate::error::{Error, Result};
use crate::specfun::euler_numbers;

/// Coefficients for one value of `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymSeries {
    pub r: BigRational,
    /// `A_1, A_2, ...` (index 0 holds `A_1`).
    pub a: Vec<BigRational>,
    /// `c_{-1}, c_1, c_3, ...` (index `j` holds `c_{2j-1}`). Empty until
    /// [`exp_compose`] has run.
    pub laurent: Vec<BigRational>,
}

fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 0..n {
        let next = &row[k] * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(next);
    }
    row
}

/// `A_1 ..= A_n` for rational `r`.
pub fn asym_coeffs(r: &BigRational, n: usize) -> AsymSeries {
    let euler = euler_numbers(2 * n);
    let t2 = {
        let t = r - BigRational::one();
        &t * &t
    };
    let r2 = r * r;
    let a = (1..=n)
        .map(|m| {
            let row = binomial_row(2 * m);
            let mut sum = BigRational::zero();
            let mut t_pow = BigRational::one(); // (r-1)^{2k}
            for k in 0..=m {
                let term = &t_pow * num::pow(r2.clone(), m - k) * BigRational::from_integer(&row[2 * k] * euler.even(m - k));
                sum += term;
                t_pow *= &t2;
            }
            sum
        })
        .collect();
    AsymSeries {
        r: r.clone(),
        a,
        laurent: Vec::new(),
    }
}

/// Laurent coefficients `c_{-1} ..= c_{2m-1}` of `s exp(-sum_{n<=m} A_n / (2n s^{2n}))`.
///
/// Power-series exponentiation in `u = 1/s²`: with `G = sum g_k u^k` and
/// `e = exp(G)`, `n e_n = sum_{k=1}^{n} k g_k e_{n-k}`. Missing `A_n` are
/// generated first.
pub fn exp_compose(series: &AsymSeries, m: usize) -> AsymSeries {
    let base = if series.a.len() < m {
        asym_coeffs(&series.r, m)
    } else {
        series.clone()
    };
    let g: Vec<BigRational> = (1..=m)
        .map(|k| -&base.a[k - 1] / BigRational::from_integer(BigInt::from(2 * k)))
        .collect();
    let mut e = vec![BigRational::one()];
    for n in 1..=m {
        let mut acc = BigRational::zero();
        for k in 1..=n {
            acc += BigRational::from_integer(BigInt::from(k)) * &g[k - 1] * &e[n - k];
        }
        e.push(acc / BigRational::from_integer(BigInt::from(n)));
    }
    AsymSeries { laurent: e, ..base }
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Truncated expansion `sum_{j=0}^{m} c_{2j-1} s^{1-2j}` and the size of the
/// first omitted term `|c_{2m+1}| / s^{2m+1}`.
///
/// `p.r` must match `series.r`. The omitted-term size is a heuristic; the
/// series diverges for every fixed `s`.
pub fn y_asymptotic(p: DomainPoint, series: &AsymSeries, m: usize) -> Result<(f64, f64)> {
    let r = to_f64(&series.r);
    if (r - p.r).abs() > 4.0 * f64::EPSILON * r.abs() {
        return Err(Error::InvalidArgument(format!(
            "series was built for r = {}, evaluated at r = {}",
            rational_string(&series.r),
            p.r
        )));
    }
    if !(p.s > 0.0 && p.s.is_finite()) {
        return Err(Error::Domain(format!("s = {}: the expansion needs s > 0", p.s)));
    }
    let full;
    let series = if series.laurent.len() < m + 2 {
        full = exp_compose(series, m + 1);
        &full
    } else {
        series
    };
    let inv2 = 1.0 / (p.s * p.s);
    let mut value = 0.0;
    for c in series.laurent[..=m].iter().rev() {
        value = value * inv2 + to_f64(c);
    }
    let omitted = to_f64(&series.laurent[m + 1]).abs() * p.s.powi(-(2 * m as i32 + 1));
    Ok((value * p.s, omitted))
}

/// Parses an exact rational from `"p"`, `"p/q"` or a decimal such as
/// `"-1.25e-3"`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("not a rational number: {text:?}"));
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("{int_part}{frac_part}0").parse::<BigInt>().map_err(|_| bad())? / BigInt::from(10);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let mut q = BigRational::from_integer(all);
    if scale >= 0 {
        q *= num::pow(ten, scale as usize);
    } else {
        q /= num::pow(ten, scale.unsigned_abs() as usize);
    }
    Ok(if negative { -q } else { q })
}

/// `"p/q"` in lowest terms, with `q = 1` written out.
pub fn rational_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Whether every entry has a power-of-two denominator.
pub fn dyadic(values: &[BigRational]) -> bool {
    values.iter().all(|q| {
        let d = q.denom().abs();
        (&d & (&d - BigInt::one())).is_zero()
    })
}
