//! Special functions and combinatorial coefficients.
//!
//! Polynomials are evaluated by their three-term recurrences. Factorials,
//! binomials and double factorials are formed in exact integer arithmetic while
//! they fit in `u128` and by double-double products beyond that; the `_dd`
//! variants keep the extra precision for the moment sums.

use std::sync::OnceLock;

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};

/// Largest `n` for which `n!` is held exactly in `u128`.
pub const EXACT_FACTORIAL_MAX: usize = 34;

/// Largest argument accepted by [`factorial_dd`]; `170!` is the last finite `f64`.
pub const FACTORIAL_TABLE_MAX: usize = 170;

fn factorial_table() -> &'static [DoubleDouble] {
    static TABLE: OnceLock<Vec<DoubleDouble>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = Vec::with_capacity(FACTORIAL_TABLE_MAX + 1);
        let mut exact: u128 = 1;
        out.push(DoubleDouble::ONE);
        for n in 1..=FACTORIAL_TABLE_MAX {
            if n <= EXACT_FACTORIAL_MAX {
                exact *= n as u128;
                out.push(DoubleDouble::from_u128(exact));
            } else {
                let prev = out[n - 1];
                out.push(prev.mul_f64(n as f64));
            }
        }
        out
    })
}

/// `n!` in double-double precision.
///
/// # Panics
/// If `n > FACTORIAL_TABLE_MAX`.
pub fn factorial_dd(n: usize) -> DoubleDouble {
    factorial_table()[n]
}

pub fn factorial(n: usize) -> f64 {
    if n > FACTORIAL_TABLE_MAX {
        return f64::INFINITY;
    }
    factorial_dd(n).to_f64()
}

fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(r)
}

/// `C(n, k)` in double-double; zero outside `0 ≤ k ≤ n`.
pub fn binomial_dd(n: usize, k: i64) -> DoubleDouble {
    if k < 0 || k as usize > n {
        return DoubleDouble::ZERO;
    }
    match binomial_u128(n as u64, k as u64) {
        Some(v) => DoubleDouble::from_u128(v),
        None => {
            let k = k as usize;
            factorial_dd(n) / (factorial_dd(k) * factorial_dd(n - k))
        }
    }
}

/// Binomial coefficient `C(n, k)`; zero for `k < 0` or `k > n`.
pub fn binomial(n: usize, k: i64) -> f64 {
    binomial_dd(n, k).to_f64()
}

/// `|2j − 1|!!` in double-double, with `|−1|!! = 1`.
pub fn odd_double_factorial_dd(j: usize) -> DoubleDouble {
    let mut exact: u128 = 1;
    for i in 1..=j {
        match exact.checked_mul(2 * i as u128 - 1) {
            Some(v) => exact = v,
            None => {
                // (2j)! / (2^j j!)
                return (factorial_dd(2 * j) / factorial_dd(j)).ldexp(-(j as i32));
            }
        }
    }
    DoubleDouble::from_u128(exact)
}

/// `|2j − 1|!!`, with the convention `|−1|!! = 1` at `j = 0`.
pub fn odd_double_factorial(j: usize) -> f64 {
    odd_double_factorial_dd(j).to_f64()
}

/// `(m − s − 1)! / (s! (m − 2s)!)`, the coefficient of the Chebyshev-series
/// expansion of `T_m`; at `s = 0` this is `1/m`.
pub fn cheb_series_coef_dd(m: usize, s: usize) -> Result<DoubleDouble> {
    if m == 0 {
        return Err(Error::invalid("cheb_series_coef requires m >= 1"));
    }
    if s > m / 2 {
        return Err(Error::invalid(format!(
            "cheb_series_coef: s = {s} exceeds floor(m/2) = {}",
            m / 2
        )));
    }
    Ok(factorial_dd(m - s - 1) / (factorial_dd(s) * factorial_dd(m - 2 * s)))
}

pub fn cheb_series_coef(m: usize, s: usize) -> Result<f64> {
    cheb_series_coef_dd(m, s).map(DoubleDouble::to_f64)
}

/// Physicists' Hermite polynomial `H_n(x)`.
pub fn hermite(n: usize, x: f64) -> f64 {
    let mut h0 = 1.0;
    if n == 0 {
        return h0;
    }
    let mut h1 = 2.0 * x;
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// `H_n(0)²`: `((2λ)!/λ!)²` for `n = 2λ`, zero for odd `n`.
pub fn hermite_sq_zero(n: usize) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    let h = hermite_zero_abs_dd(n).to_f64();
    h * h
}

/// `|H_n(0)| = n!/(n/2)!` for even `n`, in double-double.
pub fn hermite_zero_abs_dd(n: usize) -> DoubleDouble {
    if n % 2 == 1 {
        return DoubleDouble::ZERO;
    }
    let lambda = n / 2;
    let mut exact: u128 = 1;
    for i in (lambda + 1)..=n {
        match exact.checked_mul(i as u128) {
            Some(v) => exact = v,
            None => return factorial_dd(n) / factorial_dd(lambda),
        }
    }
    DoubleDouble::from_u128(exact)
}

/// Generalized Laguerre polynomial `L_n^{(α)}(x)` for integer `α ≥ 0`.
pub fn laguerre(n: usize, alpha: i32, x: f64) -> Result<f64> {
    if alpha < 0 {
        return Err(Error::invalid(format!(
            "laguerre requires alpha >= 0, got {alpha}"
        )));
    }
    let a = alpha as f64;
    let mut l0 = 1.0;
    if n == 0 {
        return Ok(l0);
    }
    let mut l1 = 1.0 + a - x;
    for k in 1..n {
        let kf = k as f64;
        let l2 = ((2.0 * kf + 1.0 + a - x) * l1 - (kf + a) * l0) / (kf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    Ok(l1)
}

/// Laguerre recurrence carried in double-double.
pub(crate) fn laguerre_dd(n: usize, alpha: usize, x: DoubleDouble) -> DoubleDouble {
    let a = alpha as f64;
    let mut l0 = DoubleDouble::ONE;
    if n == 0 {
        return l0;
    }
    let mut l1 = DoubleDouble::from_f64(1.0 + a) - x;
    for k in 1..n {
        let kf = k as f64;
        let c = DoubleDouble::from_f64(2.0 * kf + 1.0 + a) - x;
        let l2 = (c * l1 - l0.mul_f64(kf + a)) / DoubleDouble::from_f64(kf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

/// Chebyshev polynomial of the first kind `T_n(x)`.
pub fn chebyshev_t(n: usize, x: f64) -> f64 {
    let mut t0 = 1.0;
    if n == 0 {
        return t0;
    }
    let mut t1 = x;
    for _ in 1..n {
        let t2 = 2.0 * x * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    t1
}

/// π in double-double.
pub fn pi_dd() -> DoubleDouble {
    DoubleDouble::from_f64(std::f64::consts::PI)
        + DoubleDouble::from_f64(1.224_646_799_147_353_2e-16)
}

/// √π in double-double.
pub fn sqrt_pi_dd() -> DoubleDouble {
    static V: OnceLock<DoubleDouble> = OnceLock::new();
    *V.get_or_init(|| pi_dd().sqrt())
}
