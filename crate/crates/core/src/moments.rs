//! Closed-form conditional moments of the Weyl kernels.
//!
//! `I^ℓ_{n,k}(x) = ∫ p^{2ℓ} w_{n,k}(x,p) dp` and `J^r_{n,k}(p) = Re ∫ x^r w_{n,k}(x,p) dx`
//! are both a polynomial times a Gaussian in the scaled coordinate. The
//! polynomial coefficients are finite alternating sums with factorial-sized
//! terms; they are accumulated in double-double and kept as [`GaussPoly`] so that
//! density-matrix weighted sums can be formed once and evaluated many times.
//!
//! `J` is only the real part of the defining integral; the imaginary parts
//! cancel between `(n,k)` and `(k,n)` when summed against a symmetric density
//! matrix, so `J` on its own is meaningful only inside such sums.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::model::{DensityMatrix, OscillatorFrame};
use crate::specfun::{
    binomial_dd, cheb_series_coef_dd, factorial_dd, hermite_zero_abs_dd, laguerre_dd,
    odd_double_factorial_dd, sqrt_pi_dd,
};

/// Largest `n + k` accepted by the closed-form moment operations.
pub const MAX_INDEX_SUM: usize = 100;

/// Largest `λ` and `β` held by a [`GTable`].
pub const G_TABLE_CAP: usize = 64;

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn check_indices(n: usize, k: usize) -> Result<()> {
    if n + k > MAX_INDEX_SUM {
        return Err(Error::IndexLimit {
            sum: n + k,
            limit: MAX_INDEX_SUM,
        });
    }
    Ok(())
}

/// `P(t) e^{−t²}` with `P` held in double-double coefficients of ascending powers.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GaussPoly {
    coeffs: Vec<DoubleDouble>,
}

impl GaussPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    fn with_degree(degree: usize) -> Self {
        Self {
            coeffs: vec![DoubleDouble::ZERO; degree + 1],
        }
    }

    fn add_term(&mut self, power: usize, value: DoubleDouble) {
        if self.coeffs.len() <= power {
            self.coeffs.resize(power + 1, DoubleDouble::ZERO);
        }
        self.coeffs[power] += value;
    }

    /// `self += w · other`.
    pub fn add_scaled(&mut self, other: &GaussPoly, w: f64) {
        if w == 0.0 {
            return;
        }
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), DoubleDouble::ZERO);
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b.mul_f64(w);
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Coefficients of `P` rounded to `f64`.
    pub fn coefficients(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64()).collect()
    }

    /// `P(t)` without the Gaussian.
    pub fn poly_dd(&self, t: f64) -> DoubleDouble {
        DoubleDouble::horner(&self.coeffs, t.into())
    }

    /// `P(t) e^{−t²}`.
    pub fn eval(&self, t: f64) -> f64 {
        self.poly_dd(t).to_f64() * (-t * t).exp()
    }

    /// Value and `t`-derivative of `P(t) e^{−t²}`.
    pub fn eval_with_derivative(&self, t: f64) -> (f64, f64) {
        let td = DoubleDouble::from_f64(t);
        let mut p = DoubleDouble::ZERO;
        let mut dp = DoubleDouble::ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * td + p;
            p = p * td + c;
        }
        let g = (-t * t).exp();
        let d = dp - p * td.mul_f64(2.0);
        (p.to_f64() * g, d.to_f64() * g)
    }
}

/// `√(2^{3M−m}/(n! k!))`.
fn sqrt_norm(n: usize, k: usize) -> DoubleDouble {
    let (lo, hi) = (n.min(k), n.max(k));
    let e = 3 * hi - lo;
    let mut v = DoubleDouble::ONE.ldexp((e / 2) as i32);
    if e % 2 == 1 {
        v *= DoubleDouble::from_f64(2.0).sqrt();
    }
    v / (factorial_dd(n).sqrt() * factorial_dd(k).sqrt())
}

/// Dimensionless polynomial of the direct (Chebyshev-series) form of `I^ℓ_{n,k}`
/// in `x̄`; the physical moment is `(mħω)^{ℓ+½}/ħ` times its value.
pub fn i_direct_poly(n: usize, k: usize, ell: usize) -> Result<GaussPoly> {
    check_indices(n, k)?;
    if n == k {
        return Ok(diagonal_i_poly(
            n,
            ell,
            DoubleDouble::ONE / sqrt_pi_dd(),
            sign(n),
        ));
    }
    let (m, big) = (n.min(k), n.max(k));
    let d = big - m;
    let pref = sqrt_norm(n, k).mul_f64(d as f64) / sqrt_pi_dd();
    let mut poly = GaussPoly::with_degree(n + k);
    for lambda in 0..=m {
        let outer =
            factorial_dd(lambda) * binomial_dd(k, lambda as i64) * binomial_dd(n, lambda as i64);
        for s in 0..=d / 2 {
            let cs = cheb_series_coef_dd(d, s)?;
            let top = m - lambda + s;
            for mu in 0..=top {
                let power = (n + k) as isize - 2 * (lambda + mu) as isize;
                debug_assert!(power >= 0);
                let t =
                    binomial_dd(top, mu as i64) * outer * odd_double_factorial_dd(ell + mu) * cs;
                let t = t
                    .ldexp(-((lambda + 2 * s + ell + mu + 1) as i32))
                    .mul_f64(sign(lambda + s));
                poly.add_term(power as usize, pref * t);
            }
        }
    }
    Ok(poly)
}

/// Shared `n = k` sum; `pref` carries the normalization and `outer_sign` the `(−1)^n`.
fn diagonal_i_poly(n: usize, ell: usize, pref: DoubleDouble, outer_sign: f64) -> GaussPoly {
    let mut poly = GaussPoly::with_degree(2 * n);
    for lambda in 0..=n {
        let a = binomial_dd(n, lambda as i64) / factorial_dd(lambda);
        for s in 0..=lambda {
            let t = a * binomial_dd(lambda, s as i64) * odd_double_factorial_dd(ell + s);
            let t = t
                .ldexp(lambda as i32 - ell as i32 - s as i32)
                .mul_f64(sign(lambda) * outer_sign);
            poly.add_term(2 * (lambda - s), pref * t);
        }
    }
    poly
}

fn i_scale(frame: &OscillatorFrame, ell: usize) -> f64 {
    frame.pscale().powi(2 * ell as i32 + 1) / frame.hbar
}

fn j_scale(frame: &OscillatorFrame, r: usize) -> f64 {
    1.0 / (frame.hbar * frame.kappa().powi(r as i32 + 1))
}

/// `I^ℓ_{n,k}(x)` from the Chebyshev-series closed form.
pub fn moment_i_direct(
    frame: &OscillatorFrame,
    n: usize,
    k: usize,
    ell: usize,
    x: f64,
) -> Result<f64> {
    Ok(i_scale(frame, ell) * i_direct_poly(n, k, ell)?.eval(frame.xbar(x)))
}

/// Memoized `G_λ^{2β} = ∫₀^∞ p̄^{2β} e^{−p̄²} L_λ(2p̄²) dp̄` for `λ, β ≤ 64`.
///
/// The `β = 0` and `β = 1` columns come from their Hermite-at-zero closed
/// forms; larger `β` follow the recurrence
/// `G_λ^{2β} = (β + λ − ½) G_λ^{2β−2} − λ G_{λ−1}^{2β−2}`.
#[derive(Clone, Debug)]
pub struct GTable {
    values: Vec<DoubleDouble>,
    perturbation: f64,
}

impl GTable {
    pub fn new() -> Self {
        Self::with_perturbation(0.0)
    }

    /// Every entry multiplied by `1 + eps`; used to check that the
    /// verification harness notices a corrupted table.
    pub fn with_perturbation(eps: f64) -> Self {
        let n = G_TABLE_CAP + 1;
        let mut v = vec![DoubleDouble::ZERO; n * n];
        let idx = |lambda: usize, beta: usize| lambda * n + beta;
        for lambda in 0..n {
            v[idx(lambda, 0)] = g_base_zero(lambda);
            v[idx(lambda, 1)] = g_base_one(lambda);
        }
        for beta in 2..n {
            for lambda in 0..n {
                let a = v[idx(lambda, beta - 1)].mul_f64(beta as f64 + lambda as f64 - 0.5);
                let b = if lambda > 0 {
                    v[idx(lambda - 1, beta - 1)].mul_f64(lambda as f64)
                } else {
                    DoubleDouble::ZERO
                };
                v[idx(lambda, beta)] = a - b;
            }
        }
        if eps != 0.0 {
            for x in v.iter_mut() {
                *x = x.mul_f64(1.0 + eps);
            }
        }
        Self {
            values: v,
            perturbation: eps,
        }
    }

    /// Process-wide unperturbed table.
    pub fn shared() -> &'static GTable {
        static T: OnceLock<GTable> = OnceLock::new();
        T.get_or_init(GTable::new)
    }

    pub fn perturbation(&self) -> f64 {
        self.perturbation
    }

    pub fn get_dd(&self, lambda: usize, beta: usize) -> Result<DoubleDouble> {
        if lambda > G_TABLE_CAP || beta > G_TABLE_CAP {
            return Err(Error::invalid(format!(
                "G table request ({lambda}, {beta}) beyond cap {G_TABLE_CAP}"
            )));
        }
        Ok(self.values[lambda * (G_TABLE_CAP + 1) + beta])
    }
}

impl Default for GTable {
    fn default() -> Self {
        Self::new()
    }
}

/// `G_λ^0 = (−1)^λ √π H_λ²(0) / (2^{λ+1} λ!)`.
pub fn g_base_zero(lambda: usize) -> DoubleDouble {
    let h = hermite_zero_abs_dd(lambda);
    (sqrt_pi_dd() * h * h / factorial_dd(lambda))
        .ldexp(-(lambda as i32 + 1))
        .mul_f64(sign(lambda))
}

/// `G_λ^2 = (−1)^λ (√π/2) [H_λ²(0)/(2^{λ+1} λ!) + Σ_{r=1}^{λ} H²_{λ−r}(0)/(2^{λ−r} (λ−r)!)]`.
pub fn g_base_one(lambda: usize) -> DoubleDouble {
    let term = |j: usize, extra: i32| {
        let h = hermite_zero_abs_dd(j);
        (h * h / factorial_dd(j)).ldexp(-(j as i32) - extra)
    };
    let mut sum = term(lambda, 1);
    for r in 1..=lambda {
        sum += term(lambda - r, 0);
    }
    (sqrt_pi_dd() * sum).ldexp(-1).mul_f64(sign(lambda))
}

/// `G_λ^{2β}` from `table`.
pub fn g_coefficient(table: &GTable, lambda: usize, beta: usize) -> Result<f64> {
    table.get_dd(lambda, beta).map(DoubleDouble::to_f64)
}

/// `I^ℓ_{n,k}(x)` from the generalized-Laguerre closed form using `table`.
pub fn moment_i_laguerre_with(
    table: &GTable,
    frame: &OscillatorFrame,
    n: usize,
    k: usize,
    ell: usize,
    x: f64,
) -> Result<f64> {
    check_indices(n, k)?;
    let xb = frame.xbar(x);
    let scale = i_scale(frame, ell);
    let (m, big) = (n.min(k), n.max(k));
    let d = big - m;
    let pi = crate::specfun::pi_dd();
    if d == 0 {
        // A_{nn} √π with A_{nn} = (−1)^n/(πħ)
        let pref = sqrt_pi_dd() / pi;
        let poly = diagonal_i_poly(n, ell, pref, sign(n));
        return Ok(scale * poly.eval(xb));
    }
    // A_{nk} = (−1)^m/(πħ) √(2^d m!/M!)
    let a = (factorial_dd(m) / factorial_dd(big)).ldexp(d as i32).sqrt() / pi;
    let y = DoubleDouble::from_f64(2.0 * xb * xb);
    let xd = DoubleDouble::from_f64(xb);
    let mut sum = DoubleDouble::ZERO;
    for lambda in 0..=m {
        let lag = laguerre_dd(m - lambda, d - 1, y);
        for s in 0..=d / 2 {
            let cs = cheb_series_coef_dd(d, s)?
                .ldexp(-2 * s as i32)
                .mul_f64(sign(s));
            for mu in 0..=s {
                let g = table.get_dd(lambda, ell + mu)?;
                let t = cs * binomial_dd(s, mu as i64) * g * xd.powi((d - 2 * mu) as u32) * lag;
                sum += t;
            }
        }
    }
    let v = a.ldexp(d as i32).mul_f64(d as f64 * sign(m)) * sum;
    Ok(scale * v.to_f64() * (-xb * xb).exp())
}

/// `I^ℓ_{n,k}(x)` from the generalized-Laguerre closed form.
pub fn moment_i_laguerre(
    frame: &OscillatorFrame,
    n: usize,
    k: usize,
    ell: usize,
    x: f64,
) -> Result<f64> {
    moment_i_laguerre_with(GTable::shared(), frame, n, k, ell, x)
}

/// Dimensionless polynomial of `J^r_{n,k}` in `p̄`; `None` when `|n−k| + r` is
/// odd, in which case the moment vanishes identically. The physical moment is
/// `1/(ħκ^{r+1})` times its value.
pub fn j_poly(n: usize, k: usize, r: usize) -> Result<Option<GaussPoly>> {
    check_indices(n, k)?;
    let (m, big) = (n.min(k), n.max(k));
    let d = big - m;
    if (d + r) % 2 == 1 {
        return Ok(None);
    }
    let nu = (d + r) / 2;
    if d == 0 {
        let ell = r / 2;
        let pref = (factorial_dd(n).ldexp(n as i32)) / sqrt_pi_dd();
        let mut poly = GaussPoly::with_degree(2 * n);
        for lambda in 0..=n {
            let f = factorial_dd(n - lambda);
            let a = DoubleDouble::ONE / (factorial_dd(lambda) * f * f);
            for mu in 0..=(n - lambda) {
                let t = a * odd_double_factorial_dd(ell + mu) * binomial_dd(n - lambda, mu as i64);
                let t = t.ldexp(-((lambda + ell + mu) as i32)).mul_f64(sign(lambda));
                poly.add_term(2 * (n - lambda - mu), pref * t);
            }
        }
        return Ok(Some(poly));
    }
    let pref = sqrt_norm(n, k).mul_f64(0.5 * d as f64) / sqrt_pi_dd();
    let mut poly = GaussPoly::with_degree(2 * (m + d / 2));
    for lambda in 0..=m {
        let outer =
            factorial_dd(lambda) * binomial_dd(k, lambda as i64) * binomial_dd(n, lambda as i64);
        for s in 0..=d / 2 {
            let cs = cheb_series_coef_dd(d, s)?;
            let top = m + s - lambda;
            for mu in 0..=top {
                let t =
                    outer * cs * binomial_dd(top, mu as i64) * odd_double_factorial_dd(nu + mu - s);
                let t = t
                    .ldexp(-((lambda + s + mu + nu) as i32))
                    .mul_f64(sign(lambda + s));
                poly.add_term(2 * (top - mu), pref * t);
            }
        }
    }
    Ok(Some(poly))
}

/// `J^r_{n,k}(p)`: real part of `∫ x^r w_{n,k}(x,p) dx`.
pub fn moment_j(frame: &OscillatorFrame, n: usize, k: usize, r: usize, p: f64) -> Result<f64> {
    Ok(match j_poly(n, k, r)? {
        None => 0.0,
        Some(poly) => j_scale(frame, r) * poly.eval(frame.pbar(p)),
    })
}

/// Closed-form polynomials for every pair `k ≤ n < size`, reusable across
/// density matrices on the same basis.
#[derive(Clone, Debug)]
pub struct PairPolys {
    size: usize,
    polys: Vec<Option<GaussPoly>>,
}

impl PairPolys {
    fn build(
        size: usize,
        f: impl Fn(usize, usize) -> Result<Option<GaussPoly>> + Sync,
    ) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = (0..size)
            .flat_map(|n| (0..=n).map(move |k| (n, k)))
            .collect();
        let polys = pairs
            .par_iter()
            .map(|&(n, k)| f(n, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { size, polys })
    }

    /// Polynomials of `I^ℓ_{n,k}`.
    pub fn momentum_moments(size: usize, ell: usize) -> Result<Self> {
        Self::build(size, |n, k| i_direct_poly(n, k, ell).map(Some))
    }

    /// Polynomials of `J^r_{n,k}`.
    pub fn position_moments(size: usize, r: usize) -> Result<Self> {
        Self::build(size, |n, k| j_poly(n, k, r))
    }

    /// `Σ_{n,k} ρ_{k,n} P_{n,k}` using `P_{n,k} = P_{k,n}`.
    pub fn weighted(&self, rho: &DensityMatrix) -> Result<GaussPoly> {
        if rho.size() > self.size {
            return Err(Error::invalid(format!(
                "density matrix of size {} exceeds the tabulated basis {}",
                rho.size(),
                self.size
            )));
        }
        let mut out = GaussPoly::zero();
        let mut idx = 0;
        for n in 0..self.size {
            for k in 0..=n {
                if let Some(p) = &self.polys[idx] {
                    if n < rho.size() {
                        let w = if n == k {
                            rho.get(k, n)
                        } else {
                            2.0 * rho.get(k, n)
                        };
                        out.add_scaled(p, w);
                    }
                }
                idx += 1;
            }
        }
        Ok(out)
    }
}

/// Scale turning a weighted `I` polynomial into physical units.
pub fn momentum_moment_scale(frame: &OscillatorFrame, ell: usize) -> f64 {
    i_scale(frame, ell)
}

/// Scale turning a weighted `J` polynomial into physical units.
pub fn position_moment_scale(frame: &OscillatorFrame, r: usize) -> f64 {
    j_scale(frame, r)
}
