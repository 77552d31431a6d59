//! Brute-force references for the closed forms: adaptive quadrature of the
//! defining integrals and a finite-difference Schrödinger solver.
//!
//! Quadratures integrate the polynomial form of the Weyl kernel
//! ([`kernel_w_reference`]), never the Laguerre form or the moment sums.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{OscillatorFrame, PolynomialPotential};
use crate::specfun::laguerre;
use crate::wigner::{kernel_w_reference, PhasePoint};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Integration half-width in oscillator units (`x̄` or `p̄`).
    pub half_width: f64,
    pub max_subdivisions: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            half_width: 10.0,
            max_subdivisions: 2000,
            abs_tol: 1e-12,
            rel_tol: 1e-9,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.half_width >= 8.0) {
            return Err(Error::invalid("quadrature half-width must be at least 8"));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::invalid("quadrature tolerances must be positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::invalid("quadrature needs at least one subdivision"));
        }
        Ok(())
    }
}

// 15-point Kronrod nodes on [0, 1] (symmetric) with 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod estimate, |Kronrod − Gauss| and the Kronrod estimate of `∫|f|` on `[a, b]`.
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let (l, r) = (f(c - dx), f(c + dx));
        k += WGK[j] * (l + r);
        abs += WGK[j] * (l.abs() + r.abs());
        if j % 2 == 1 {
            g += WG[j / 2] * (l + r);
        }
    }
    (k * h, ((k - g) * h).abs(), abs * h.abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl Panel {
    fn new(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Self {
        let (value, error, abs) = gk15(f, a, b);
        Self {
            a,
            b,
            value,
            error,
            abs,
        }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive Gauss–Kronrod (7/15) integration of `f` over `[a, b]`, bisecting
/// the panel with the largest error estimate until the total error is below
/// `max(abs_tol, rel_tol·|I|)`, or below the rounding floor `50ε·∫|f|` that no
/// further subdivision can improve.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    // Start from a few panels so that narrow peaks are not missed.
    let initial = 8;
    let mut heap = BinaryHeap::new();
    let h = (b - a) / initial as f64;
    for i in 0..initial {
        let (lo, hi) = (
            a + h * i as f64,
            if i + 1 == initial {
                b
            } else {
                a + h * (i + 1) as f64
            },
        );
        heap.push(Panel::new(f, lo, hi));
    }
    let converged = |heap: &BinaryHeap<Panel>| -> (bool, f64, f64) {
        let (total, err, abs) = heap.iter().fold((0.0, 0.0, 0.0), |(v, e, m), p| {
            (v + p.value, e + p.error, m + p.abs)
        });
        let tol = spec
            .abs_tol
            .max(spec.rel_tol * total.abs())
            .max(50.0 * f64::EPSILON * abs);
        (err <= tol, total, err)
    };
    for _ in 0..spec.max_subdivisions {
        if let (true, total, _) = converged(&heap) {
            return Ok(total);
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(Panel::new(f, worst.a, mid));
        heap.push(Panel::new(f, mid, worst.b));
    }
    match converged(&heap) {
        (true, total, _) => Ok(total),
        (false, estimate, error) => Err(Error::QuadratureTolerance { estimate, error }),
    }
}

/// `∫ p^{2ℓ} Re w_{n,k}(x,p) dp` by adaptive quadrature over `|p̄| ≤ half_width`.
pub fn quad_moment_i(
    frame: &OscillatorFrame,
    n: usize,
    k: usize,
    ell: usize,
    x: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    let ps = frame.pscale();
    let f = |pb: f64| {
        let p = pb * ps;
        p.powi(2 * ell as i32) * kernel_w_reference(frame, n, k, PhasePoint::new(x, p)).re * ps
    };
    integrate(&f, -spec.half_width, spec.half_width, spec)
}

/// `∫ x^r Re w_{n,k}(x,p) dx` by adaptive quadrature over `|x̄| ≤ half_width`.
pub fn quad_moment_j(
    frame: &OscillatorFrame,
    n: usize,
    k: usize,
    r: usize,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    let l = 1.0 / frame.kappa();
    let f = |xb: f64| {
        let x = xb * l;
        x.powi(r as i32) * kernel_w_reference(frame, n, k, PhasePoint::new(x, p)).re * l
    };
    integrate(&f, -spec.half_width, spec.half_width, spec)
}

/// `∫₀^∞ t^{2j} e^{−t²} dt` by adaptive quadrature.
pub fn quad_gaussian_moment(j: usize) -> Result<f64> {
    if j > 16 {
        return Err(Error::invalid("gaussian moment order must be at most 16"));
    }
    let spec = QuadratureSpec::default();
    let upper = 10.0 + (j as f64).sqrt();
    integrate(
        &|t: f64| t.powi(2 * j as i32) * (-t * t).exp(),
        0.0,
        upper,
        &spec,
    )
}

/// `G_λ^{2β} = ∫₀^∞ t^{2β} e^{−t²} L_λ(2t²) dt` by adaptive quadrature.
pub fn quad_g_coefficient(lambda: usize, beta: usize, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    let upper = spec.half_width + ((lambda + beta) as f64).sqrt();
    let f = |t: f64| {
        t.powi(2 * beta as i32)
            * (-t * t).exp()
            * laguerre(lambda, 0, 2.0 * t * t).expect("alpha is zero")
    };
    integrate(&f, 0.0, upper, spec)
}

/// Lowest `count` eigenvalues of the three-point finite-difference Hamiltonian
/// on `points` interior nodes of `domain` with Dirichlet walls, found by Sturm
/// sequence bisection.
pub fn finite_difference_spectrum(
    potential: &PolynomialPotential,
    frame: &OscillatorFrame,
    domain: (f64, f64),
    points: usize,
    count: usize,
) -> Result<Vec<f64>> {
    let (lo, hi) = domain;
    if !(hi > lo) {
        return Err(Error::invalid("finite-difference domain must have hi > lo"));
    }
    if points < 2000 {
        return Err(Error::invalid(
            "finite-difference solve needs at least 2000 points",
        ));
    }
    if count > points {
        return Err(Error::invalid(
            "more eigenvalues requested than grid points",
        ));
    }
    let h = (hi - lo) / (points + 1) as f64;
    let t = frame.hbar * frame.hbar / (2.0 * frame.mass * h * h);
    let diag: Vec<f64> = (1..=points)
        .map(|i| 2.0 * t + potential.eval(lo + h * i as f64))
        .collect();
    let off2 = t * t;

    // number of eigenvalues strictly below `lam`
    let below = |lam: f64| -> usize {
        let mut q = diag[0] - lam;
        let mut c = usize::from(q < 0.0);
        for &d in &diag[1..] {
            let prev = if q == 0.0 { f64::EPSILON * t } else { q };
            q = d - lam - off2 / prev;
            c += usize::from(q < 0.0);
        }
        c
    };

    let gl = diag.iter().copied().fold(f64::INFINITY, f64::min) - 2.0 * t;
    let gu = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 2.0 * t;
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let (mut a, mut b) = (gl, gu);
        let mut iterations = 0;
        while b - a > 1e-14 * a.abs().max(b.abs()).max(1.0) {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if below(mid) > j {
                b = mid;
            } else {
                a = mid;
            }
            iterations += 1;
            if iterations > 400 {
                return Err(Error::NonConvergence { residual: b - a });
            }
        }
        out.push(0.5 * (a + b));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::odd_double_factorial;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_moments() {
        let sp = PI.sqrt();
        assert!((quad_gaussian_moment(0).unwrap() - sp / 2.0).abs() < 1e-12);
        assert!((quad_gaussian_moment(1).unwrap() - sp / 4.0).abs() < 1e-12);
        assert!((quad_gaussian_moment(3).unwrap() - 15.0 * sp / 16.0).abs() < 1e-12);
        for j in 0..=8 {
            let want = odd_double_factorial(j) * sp / 2f64.powi(j as i32 + 1);
            assert!((quad_gaussian_moment(j).unwrap() - want).abs() <= 1e-10 * want.max(1.0));
        }
        assert!(quad_gaussian_moment(17).is_err());
    }

    #[test]
    fn moment_examples() {
        let f = OscillatorFrame::unit();
        let spec = QuadratureSpec::default();
        assert!((quad_moment_i(&f, 0, 0, 0, 0.0, &spec).unwrap() - 1.0 / PI.sqrt()).abs() < 1e-10);
        assert!(quad_moment_i(&f, 0, 1, 0, 0.0, &spec).unwrap().abs() < 1e-12);
        assert!(quad_moment_j(&f, 0, 0, 1, 0.4, &spec).unwrap().abs() < 1e-12);
        assert!((quad_moment_j(&f, 0, 0, 0, 0.0, &spec).unwrap() - 1.0 / PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn widening_changes_little() {
        let f = OscillatorFrame::new(1.4, 0.7, 1.2).unwrap();
        let base = QuadratureSpec::default();
        let wide = QuadratureSpec {
            half_width: 20.0,
            max_subdivisions: 4000,
            ..base
        };
        let a = quad_moment_i(&f, 3, 1, 2, 0.8, &base).unwrap();
        let b = quad_moment_i(&f, 3, 1, 2, 0.8, &wide).unwrap();
        assert!((a - b).abs() < 2.0 * base.abs_tol.max(base.rel_tol * a.abs()));
    }

    #[test]
    fn spec_validation() {
        let bad = QuadratureSpec {
            half_width: 4.0,
            ..QuadratureSpec::default()
        };
        assert!(bad.validate().is_err());
        let f = OscillatorFrame::unit();
        assert!(quad_moment_i(&f, 0, 0, 0, 0.0, &bad).is_err());
    }

    #[test]
    fn tolerance_failure_is_reported() {
        let spec = QuadratureSpec {
            max_subdivisions: 1,
            abs_tol: 1e-300,
            rel_tol: 1e-300,
            ..QuadratureSpec::default()
        };
        let err = integrate(&|t: f64| (50.0 * t).sin().abs(), 0.0, 3.0, &spec).unwrap_err();
        assert!(matches!(err, Error::QuadratureTolerance { .. }));
    }

    #[test]
    fn harmonic_finite_difference() {
        let f = OscillatorFrame::unit();
        let e = finite_difference_spectrum(
            &PolynomialPotential::harmonic(&f),
            &f,
            (-10.0, 10.0),
            40_000,
            6,
        )
        .unwrap();
        for (s, v) in e.iter().enumerate() {
            assert!((v - (s as f64 + 0.5)).abs() < 1e-6, "s = {s}: {v}");
        }
        assert!(e.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn infinite_well_levels() {
        // flat potential: E_n = ħ²π²(n+1)²/(2mL²)
        let f = OscillatorFrame::unit();
        let flat = PolynomialPotential::new(vec![0.0, 1e-300]).unwrap();
        let e = finite_difference_spectrum(&flat, &f, (0.0, 1.0), 4000, 4).unwrap();
        for (n, v) in e.iter().enumerate() {
            let want = PI * PI * ((n + 1) * (n + 1)) as f64 / 2.0;
            assert!((v - want).abs() / want < 1e-5);
        }
        assert!(e.windows(2).all(|w| w[0] < w[1]));
    }
}
