//! End-to-end cross-checks of the closed forms against independent references.
//!
//! Each suite returns a [`SuiteResult`] with the worst observed error relative
//! to its tolerance; `passed` is true when every check is within tolerance.

use std::f64::consts::PI;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use wplab_core::energy::{
    energy_profile, harmonic_avg_energy_p, harmonic_avg_energy_x, MomentTables,
};
use wplab_core::moments::{
    g_base_one, g_base_zero, g_coefficient, j_poly, moment_i_direct, moment_i_laguerre_with,
    moment_j, GTable,
};
use wplab_core::oracle::{quad_g_coefficient, quad_moment_i, quad_moment_j, QuadratureSpec};
use wplab_core::specfun::laguerre;
use wplab_core::wigner::{
    kernel_w, kernel_w_reference, linspace, trapezoid_weights, wigner_value, Axis, PhasePoint,
};
use wplab_core::{
    model::solve_potential, DensityMatrix, EigenState, OscillatorFrame, PolynomialPotential,
    SpectralBasis,
};

use crate::error::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: usize,
    /// Largest `error / tolerance` ratio observed.
    pub worst_ratio: f64,
    pub detail: String,
}

/// Accumulates `error / tolerance` ratios.
#[derive(Debug, Default)]
struct Tally {
    checks: usize,
    failures: usize,
    worst: f64,
    worst_case: String,
}

impl Tally {
    fn check(&mut self, error: f64, tol: f64, case: impl FnOnce() -> String) {
        self.checks += 1;
        let ratio = if error.is_nan() {
            f64::INFINITY
        } else {
            error / tol
        };
        if !(ratio <= 1.0) {
            self.failures += 1;
        }
        if self.checks == 1 || ratio > self.worst {
            self.worst = ratio;
            self.worst_case = case();
        }
    }

    fn require(&mut self, ok: bool, case: impl FnOnce() -> String) {
        self.check(if ok { 0.0 } else { f64::INFINITY }, 1.0, case);
    }

    fn merge(&mut self, other: Tally) {
        self.checks += other.checks;
        self.failures += other.failures;
        if other.worst > self.worst {
            self.worst = other.worst;
            self.worst_case = other.worst_case;
        }
    }

    fn finish(self, name: &str) -> SuiteResult {
        SuiteResult {
            name: name.to_string(),
            passed: self.failures == 0 && self.checks > 0,
            checks: self.checks,
            failures: self.failures,
            worst_ratio: self.worst,
            detail: self.worst_case,
        }
    }
}

fn pairs(max_nk: usize) -> Vec<(usize, usize)> {
    (0..=max_nk)
        .flat_map(|n| (0..=max_nk).map(move |k| (n, k)))
        .collect()
}

/// Direct and Laguerre forms of `I^ℓ_{n,k}` agree to `1e−9·max(1,|I|)` on
/// `points` positions in `x̄ ∈ [−4, 4]`.
pub fn theorem_equivalence(
    frame: &OscillatorFrame,
    table: &GTable,
    max_nk: usize,
    points: usize,
) -> Result<SuiteResult, CliError> {
    let xs: Vec<f64> = linspace(-4.0, 4.0, points)
        .iter()
        .map(|t| t / frame.kappa())
        .collect();
    let tallies = pairs(max_nk)
        .par_iter()
        .map(|&(n, k)| -> Result<Tally, CliError> {
            let mut t = Tally::default();
            for ell in 0..4 {
                for &x in &xs {
                    let d = moment_i_direct(frame, n, k, ell, x)?;
                    let l = moment_i_laguerre_with(table, frame, n, k, ell, x)?;
                    t.check((d - l).abs(), 1e-9 * d.abs().max(1.0), || {
                        format!("n={n} k={k} l={ell} x={x}: direct {d:e} laguerre {l:e}")
                    });
                }
            }
            Ok(t)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut total = Tally::default();
    tallies.into_iter().for_each(|t| total.merge(t));
    Ok(total.finish("theorem-equivalence"))
}

fn tight_quadrature() -> QuadratureSpec {
    QuadratureSpec {
        half_width: 12.0,
        max_subdivisions: 4000,
        abs_tol: 1e-14,
        rel_tol: 1e-12,
    }
}

/// Closed-form `I^ℓ` and `J^r` against adaptive quadrature of the Weyl kernel,
/// relative `1e−8` with absolute floor `1e−12`.
pub fn closed_form_vs_quadrature(
    frame: &OscillatorFrame,
    max_nk: usize,
    max_ell: usize,
    max_r: usize,
    points: usize,
) -> Result<SuiteResult, CliError> {
    let spec = tight_quadrature();
    let coords = linspace(-3.55, 3.65, points);
    let tallies = pairs(max_nk)
        .par_iter()
        .map(|&(n, k)| -> Result<Tally, CliError> {
            let mut t = Tally::default();
            for &c in &coords {
                let x = c / frame.kappa();
                for ell in 0..=max_ell {
                    let a = moment_i_direct(frame, n, k, ell, x)?;
                    match quad_moment_i(frame, n, k, ell, x, &spec) {
                        Ok(q) => t.check((a - q).abs(), (1e-8 * q.abs()).max(1e-12), || {
                            format!("I n={n} k={k} l={ell} x={x}: closed {a:e} quad {q:e}")
                        }),
                        Err(e) => t.require(false, || format!("I n={n} k={k} l={ell} x={x}: {e}")),
                    }
                }
                let p = c * frame.pscale();
                for r in 0..=max_r {
                    let a = moment_j(frame, n, k, r, p)?;
                    match quad_moment_j(frame, n, k, r, p, &spec) {
                        Ok(q) => t.check((a - q).abs(), (1e-8 * q.abs()).max(1e-12), || {
                            format!("J n={n} k={k} r={r} p={p}: closed {a:e} quad {q:e}")
                        }),
                        Err(e) => t.require(false, || format!("J n={n} k={k} r={r} p={p}: {e}")),
                    }
                }
            }
            Ok(t)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut total = Tally::default();
    tallies.into_iter().for_each(|t| total.merge(t));
    Ok(total.finish("closed-form-vs-quadrature"))
}

/// `J^r_{n,k}` vanishes identically exactly when `|n−k| + r` is odd: `cases`
/// random odd cases are zero in closed form and below `1e−12` by quadrature,
/// and as many even cases are not identically zero.
pub fn parity_law(
    frame: &OscillatorFrame,
    max_nk: usize,
    cases: usize,
    seed: u64,
) -> Result<SuiteResult, CliError> {
    let spec = tight_quadrature();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut t = Tally::default();
    let mut odd = 0;
    let mut even = 0;
    while odd < cases || even < cases {
        let n = rng.gen_range(0..=max_nk);
        let k = rng.gen_range(0..=max_nk);
        let r = rng.gen_range(0..=4usize);
        let p = rng.gen_range(-4.0..4.0) * frame.pscale();
        let is_odd = (n.abs_diff(k) + r) % 2 == 1;
        if is_odd && odd < cases {
            odd += 1;
            let closed = moment_j(frame, n, k, r, p)?;
            t.require(closed == 0.0 && j_poly(n, k, r)?.is_none(), || {
                format!("odd case n={n} k={k} r={r} has nonzero closed form {closed:e}")
            });
            match quad_moment_j(frame, n, k, r, p, &spec) {
                Ok(q) => t.check(q.abs(), 1e-12, || {
                    format!("odd case n={n} k={k} r={r} p={p}: quadrature {q:e}")
                }),
                Err(e) => t.require(false, || format!("odd case n={n} k={k} r={r} p={p}: {e}")),
            }
        } else if !is_odd && even < cases {
            even += 1;
            let nonzero =
                j_poly(n, k, r)?.is_some_and(|g| g.coefficients().iter().any(|&c| c != 0.0));
            t.require(nonzero, || {
                format!("even case n={n} k={k} r={r} vanishes identically")
            });
        }
    }
    Ok(t.finish("parity-law"))
}

/// `G_λ^{2β}` against quadrature for `λ, β ≤ max` (relative `1e−10`, floor 1),
/// and the `β ∈ {0, 1}` columns bit-equal to the closed forms.
pub fn g_table(table: &GTable, max: usize) -> Result<SuiteResult, CliError> {
    let spec = QuadratureSpec {
        half_width: 10.0,
        max_subdivisions: 4000,
        abs_tol: 1e-12,
        rel_tol: 1e-13,
    };
    let mut t = Tally::default();
    for lambda in 0..=max {
        for beta in 0..=max {
            let g = g_coefficient(table, lambda, beta)?;
            match quad_g_coefficient(lambda, beta, &spec) {
                Ok(q) => t.check((g - q).abs(), 1e-10 * q.abs().max(1.0), || {
                    format!("G lambda={lambda} beta={beta}: table {g:e} quad {q:e}")
                }),
                Err(e) => t.require(false, || format!("G lambda={lambda} beta={beta}: {e}")),
            }
        }
    }
    for lambda in 0..=wplab_core::moments::G_TABLE_CAP {
        let z = table.get_dd(lambda, 0)?;
        let o = table.get_dd(lambda, 1)?;
        t.require(z == g_base_zero(lambda), || {
            format!("beta=0 column differs at lambda={lambda}")
        });
        t.require(o == g_base_one(lambda), || {
            format!("beta=1 column differs at lambda={lambda}")
        });
    }
    Ok(t.finish("g-table"))
}

/// Laguerre and polynomial kernel forms agree at `points` random phase points
/// (relative `1e−10`, floor `1e−12`); `w_{n,k} = conj(w_{k,n})`; and the
/// trapezoid integral over `±8` oscillator units is `δ_{n,k} ± 1e−6`.
pub fn kernel_consistency(
    frame: &OscillatorFrame,
    max_nk: usize,
    points: usize,
    seed: u64,
) -> Result<SuiteResult, CliError> {
    let mut rng = StdRng::seed_from_u64(seed);
    let pts: Vec<PhasePoint> = (0..points)
        .map(|_| {
            PhasePoint::new(
                rng.gen_range(-5.0..5.0) / frame.kappa(),
                rng.gen_range(-5.0..5.0) * frame.pscale(),
            )
        })
        .collect();
    let mut t = Tally::default();
    for &pt in &pts {
        for (n, k) in pairs(max_nk) {
            let a = kernel_w(frame, n, k, pt);
            let b = kernel_w_reference(frame, n, k, pt);
            t.check((a - b).norm(), (1e-10 * b.norm()).max(1e-12), || {
                format!("kernel n={n} k={k} at ({}, {}): {a} vs {b}", pt.x, pt.p)
            });
            let h = (a - kernel_w(frame, k, n, pt).conj()).norm();
            t.check(h, 1e-12, || format!("hermiticity n={n} k={k}: {h:e}"));
        }
    }
    // trapezoid normalization
    let m = 321;
    let xs: Vec<f64> = linspace(-8.0, 8.0, m)
        .iter()
        .map(|v| v / frame.kappa())
        .collect();
    let ps: Vec<f64> = linspace(-8.0, 8.0, m)
        .iter()
        .map(|v| v * frame.pscale())
        .collect();
    let wx = trapezoid_weights(&xs);
    let wp = trapezoid_weights(&ps);
    let all = pairs(max_nk);
    let sums: Vec<Vec<num_complex::Complex64>> = xs
        .par_iter()
        .zip(&wx)
        .map(|(&x, &ax)| {
            let mut acc = vec![num_complex::Complex64::new(0.0, 0.0); all.len()];
            for (&p, &ap) in ps.iter().zip(&wp) {
                let pt = PhasePoint::new(x, p);
                for (slot, &(n, k)) in acc.iter_mut().zip(&all) {
                    *slot += kernel_w(frame, n, k, pt) * (ax * ap);
                }
            }
            acc
        })
        .collect();
    for (idx, &(n, k)) in all.iter().enumerate() {
        let total: num_complex::Complex64 = sums.iter().map(|row| row[idx]).sum();
        let want = if n == k { 1.0 } else { 0.0 };
        let err = (total - want).norm();
        t.check(err, 1e-6, || {
            format!("integral of w n={n} k={k} is {total}")
        });
    }
    Ok(t.finish("kernel-consistency"))
}

/// Harmonic Wigner function `(−1)^s/(πħ)·e^{−r̄²}·L_s(2r̄²)`.
pub fn harmonic_wigner(frame: &OscillatorFrame, s: usize, point: PhasePoint) -> f64 {
    let r2 = frame.xbar(point.x).powi(2) + frame.pbar(point.p).powi(2);
    let sign = if s.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign / (PI * frame.hbar) * (-r2).exp() * laguerre(s, 0, 2.0 * r2).expect("alpha is zero")
}

/// The full pipeline applied to `U = mω²x²/2` reproduces the exact spectrum
/// (`1e−10`), Wigner functions (`1e−12`), closed-form energy profiles
/// (`1e−8·max(1,|E|)` where the denominator exceeds `1e−6`), and `s` poles per axis for `s ≤ max_state`.
pub fn harmonic_regression(
    frame: &OscillatorFrame,
    basis_size: usize,
    max_state: usize,
    seed: u64,
) -> Result<SuiteResult, CliError> {
    let pot = PolynomialPotential::harmonic(frame);
    let basis = SpectralBasis::new(basis_size, *frame)?;
    let states = solve_potential(&basis, &pot, max_state + 1)?;
    let hw = frame.hbar * frame.omega;
    let mut t = Tally::default();
    for st in &states {
        let want = hw * (st.index as f64 + 0.5);
        t.check((st.energy - want).abs(), 1e-10, || {
            format!("eigenvalue s={}: {} vs {want}", st.index, st.energy)
        });
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let tables = MomentTables::new(basis_size, 2)?;
    let window_x = (-6.0 / frame.kappa(), 6.0 / frame.kappa());
    let window_p = (-6.0 * frame.pscale(), 6.0 * frame.pscale());
    for st in &states {
        let s = st.index;
        let rho = DensityMatrix::from_state(st);
        for _ in 0..50 {
            let pt = PhasePoint::new(
                rng.gen_range(-4.0..4.0) / frame.kappa(),
                rng.gen_range(-4.0..4.0) * frame.pscale(),
            );
            let w = wigner_value(frame, &rho, pt);
            let want = harmonic_wigner(frame, s, pt);
            t.check((w - want).abs(), 1e-12, || {
                format!("wigner s={s} at ({}, {}): {w:e} vs {want:e}", pt.x, pt.p)
            });
        }
        let sm = tables.state(frame, &pot, &rho)?;
        for (axis, window) in [(Axis::X, window_x), (Axis::P, window_p)] {
            let prof = energy_profile(&sm, s, axis, window, 2001)?;
            for smp in prof.samples.iter().step_by(4) {
                if smp.denominator.abs() > 1e-6 {
                    let want = match axis {
                        Axis::X => harmonic_avg_energy_x(s, smp.coord, frame)?,
                        Axis::P => harmonic_avg_energy_p(s, smp.coord, frame)?,
                    };
                    t.check(
                        (smp.energy - want).abs(),
                        1e-8 * want.abs().max(1.0),
                        || {
                            format!(
                                "profile s={s} {}={}: {:e} vs {want:e}",
                                axis.name(),
                                smp.coord,
                                smp.energy
                            )
                        },
                    );
                }
            }
            t.require(prof.poles.len() == s, || {
                format!("s={s} {}-axis: {} poles", axis.name(), prof.poles.len())
            });
        }
    }
    Ok(t.finish("harmonic-regression"))
}

/// `∬ W_s E dx dp = E_s` within `max(1e−6, 1e−6|E_s|)`, integrated along both axes.
pub fn energy_identity(
    frame: &OscillatorFrame,
    potential: &PolynomialPotential,
    states: &[EigenState],
    tables: &MomentTables,
) -> Result<SuiteResult, CliError> {
    let half_width = (2.0 * tables.size() as f64 + 1.0).sqrt() + 8.0;
    let mut t = Tally::default();
    for st in states {
        let sm = tables.state(frame, potential, &DensityMatrix::from_state(st))?;
        for axis in [Axis::X, Axis::P] {
            let e = sm.total_energy(axis, half_width)?;
            t.check(
                (e - st.energy).abs(),
                1e-6f64.max(1e-6 * st.energy.abs()),
                || format!("s={} along {}: {e} vs {}", st.index, axis.name(), st.energy),
            );
        }
    }
    Ok(t.finish("energy-identity"))
}
