//! Conditional average-energy profiles along `x` and `p`, their poles, and the
//! harmonic-oscillator closed-form reference.
//!
//! Along `x` the profile is `⟨E⟩(x) = ⟨p²⟩_x/2m + U(x)` with
//! `⟨p²⟩_x = Σρ I¹ / Σρ I⁰`; along `p` it is `⟨E⟩(p) = p²/2m + Σ_r a_r ⟨x^r⟩_p`
//! with `⟨x^r⟩_p = Σρ J^r / Σρ J⁰`. The denominators are the position and
//! momentum densities, and the poles of the profile sit at their zeros.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt17;
use crate::model::{DensityMatrix, OscillatorFrame, PolynomialPotential};
use crate::moments::{momentum_moment_scale, position_moment_scale, GaussPoly, PairPolys};
use crate::oracle::{integrate, QuadratureSpec};
use crate::specfun::{factorial, hermite_sq_zero, laguerre};
use crate::wigner::{linspace, slice_negativity, Axis, NegativityInterval};

/// Absolute denominator floor (in oscillator units) below which the single-point
/// conditional moments report [`Error::DenominatorNearZero`].
pub const DENOMINATOR_FLOOR: f64 = 1e-24;

/// Relative denominator tolerance used by the pole search.
pub const POLE_DENOMINATOR_TOL: f64 = 1e-9;

/// Required ratio of the profile numerator to the denominator tolerance at a pole.
pub const POLE_NUMERATOR_FACTOR: f64 = 1e3;

/// Closed-form moment polynomials for every pair of a basis, shared by all
/// states expanded in it.
#[derive(Clone, Debug)]
pub struct MomentTables {
    size: usize,
    i0: PairPolys,
    i1: PairPolys,
    j: Vec<PairPolys>,
}

impl MomentTables {
    /// Tables for a basis of `size` and potentials up to `degree`.
    pub fn new(size: usize, degree: usize) -> Result<Self> {
        Ok(Self {
            size,
            i0: PairPolys::momentum_moments(size, 0)?,
            i1: PairPolys::momentum_moments(size, 1)?,
            j: (0..=degree)
                .map(|r| PairPolys::position_moments(size, r))
                .collect::<Result<_>>()?,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn degree(&self) -> usize {
        self.j.len() - 1
    }

    /// Weighted moment sums of one state.
    pub fn state(
        &self,
        frame: &OscillatorFrame,
        potential: &PolynomialPotential,
        rho: &DensityMatrix,
    ) -> Result<StateMoments> {
        if potential.degree() > self.degree() {
            return Err(Error::invalid(format!(
                "potential degree {} exceeds tabulated degree {}",
                potential.degree(),
                self.degree()
            )));
        }
        Ok(StateMoments {
            frame: *frame,
            potential: potential.clone(),
            q0: self.i0.weighted(rho)?,
            q1: self.i1.weighted(rho)?,
            r: (0..=potential.degree())
                .map(|r| self.j[r].weighted(rho))
                .collect::<Result<_>>()?,
        })
    }
}

/// `Σρ I⁰`, `Σρ I¹` and `Σρ J^r` of one state as Gaussian polynomials.
#[derive(Clone, Debug)]
pub struct StateMoments {
    frame: OscillatorFrame,
    potential: PolynomialPotential,
    q0: GaussPoly,
    q1: GaussPoly,
    r: Vec<GaussPoly>,
}

/// Numerator and denominator of a conditional energy at one coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyParts {
    pub numerator: f64,
    pub denominator: f64,
}

impl EnergyParts {
    pub fn energy(&self) -> f64 {
        self.numerator / self.denominator
    }
}

impl StateMoments {
    /// Builds the moment sums of a single state directly.
    pub fn new(
        frame: &OscillatorFrame,
        potential: &PolynomialPotential,
        rho: &DensityMatrix,
    ) -> Result<Self> {
        MomentTables::new(rho.size(), potential.degree())?.state(frame, potential, rho)
    }

    pub fn frame(&self) -> &OscillatorFrame {
        &self.frame
    }

    pub fn potential(&self) -> &PolynomialPotential {
        &self.potential
    }

    /// `Q(x) = Σρ I⁰(x)`, the position density.
    pub fn position_density(&self, x: f64) -> f64 {
        momentum_moment_scale(&self.frame, 0) * self.q0.eval(self.frame.xbar(x))
    }

    /// `Σρ I¹(x) = ∫ p² W dp`.
    pub fn kinetic_weight(&self, x: f64) -> f64 {
        momentum_moment_scale(&self.frame, 1) * self.q1.eval(self.frame.xbar(x))
    }

    /// `R(p) = Σρ J⁰(p)`, the momentum density.
    pub fn momentum_density(&self, p: f64) -> f64 {
        position_moment_scale(&self.frame, 0) * self.r[0].eval(self.frame.pbar(p))
    }

    /// `Σρ J^r(p) = ∫ x^r W dx` for `r ≤ degree`.
    pub fn position_weight(&self, r: usize, p: f64) -> f64 {
        position_moment_scale(&self.frame, r) * self.r[r].eval(self.frame.pbar(p))
    }

    /// Denominator and its derivative with respect to the physical coordinate.
    pub fn denominator_with_derivative(&self, axis: Axis, c: f64) -> (f64, f64) {
        match axis {
            Axis::X => {
                let s = momentum_moment_scale(&self.frame, 0);
                let (v, d) = self.q0.eval_with_derivative(self.frame.xbar(c));
                (s * v, s * d * self.frame.kappa())
            }
            Axis::P => {
                let s = position_moment_scale(&self.frame, 0);
                let (v, d) = self.r[0].eval_with_derivative(self.frame.pbar(c));
                (s * v, s * d / self.frame.pscale())
            }
        }
    }

    /// Numerator and denominator of `⟨E⟩` along `axis`.
    pub fn energy_parts(&self, axis: Axis, c: f64) -> EnergyParts {
        let m = self.frame.mass;
        match axis {
            Axis::X => {
                let q = self.position_density(c);
                EnergyParts {
                    numerator: self.kinetic_weight(c) / (2.0 * m) + self.potential.eval(c) * q,
                    denominator: q,
                }
            }
            Axis::P => {
                let rden = self.momentum_density(c);
                let mut num = c * c / (2.0 * m) * rden;
                for (r, &a) in self.potential.coeffs().iter().enumerate() {
                    if a != 0.0 {
                        num += a * self.position_weight(r, c);
                    }
                }
                EnergyParts {
                    numerator: num,
                    denominator: rden,
                }
            }
        }
    }

    /// `∬ W E dx dp` integrated along `axis` over `|c̄| ≤ half_width`.
    pub fn total_energy(&self, axis: Axis, half_width: f64) -> Result<f64> {
        let scale = match axis {
            Axis::X => 1.0 / self.frame.kappa(),
            Axis::P => self.frame.pscale(),
        };
        let spec = QuadratureSpec {
            half_width: half_width.max(8.0),
            max_subdivisions: 4000,
            abs_tol: 1e-13,
            rel_tol: 1e-12,
        };
        let f = |t: f64| self.energy_parts(axis, t * scale).numerator * scale;
        integrate(&f, -spec.half_width, spec.half_width, &spec)
    }
}

/// [`DENOMINATOR_FLOOR`] in the density units of `axis`.
pub fn denominator_floor(frame: &OscillatorFrame, axis: Axis) -> f64 {
    match axis {
        Axis::X => DENOMINATOR_FLOOR * frame.kappa(),
        Axis::P => DENOMINATOR_FLOOR / frame.pscale(),
    }
}

fn check_denominator(value: f64, coord: f64, tol: f64) -> Result<()> {
    if value.abs() < tol {
        return Err(Error::DenominatorNearZero { coord, value, tol });
    }
    Ok(())
}

/// `⟨p^{2ℓ}⟩` conditioned on `x`, returned with its denominator `Σρ I⁰(x)`.
pub fn conditional_p_moment(
    frame: &OscillatorFrame,
    rho: &DensityMatrix,
    ell: usize,
    x: f64,
) -> Result<(f64, f64)> {
    let t = frame.xbar(x);
    let den_poly = PairPolys::momentum_moments(rho.size(), 0)?.weighted(rho)?;
    let den = momentum_moment_scale(frame, 0) * den_poly.eval(t);
    check_denominator(den, x, denominator_floor(frame, Axis::X))?;
    let num = if ell == 0 {
        den
    } else {
        momentum_moment_scale(frame, ell)
            * PairPolys::momentum_moments(rho.size(), ell)?
                .weighted(rho)?
                .eval(t)
    };
    Ok((num / den, den))
}

/// `⟨E⟩_x = ⟨p²⟩_x/2m + U(x)`.
pub fn average_energy_x(
    frame: &OscillatorFrame,
    rho: &DensityMatrix,
    potential: &PolynomialPotential,
    x: f64,
) -> Result<f64> {
    let (p2, _) = conditional_p_moment(frame, rho, 1, x)?;
    Ok(p2 / (2.0 * frame.mass) + potential.eval(x))
}

/// `⟨x^r⟩` conditioned on `p`, returned with its denominator `Σρ J⁰(p)`.
pub fn conditional_x_moment(
    frame: &OscillatorFrame,
    rho: &DensityMatrix,
    r: usize,
    p: f64,
) -> Result<(f64, f64)> {
    let t = frame.pbar(p);
    let den = position_moment_scale(frame, 0)
        * PairPolys::position_moments(rho.size(), 0)?
            .weighted(rho)?
            .eval(t);
    check_denominator(den, p, denominator_floor(frame, Axis::P))?;
    let num = if r == 0 {
        den
    } else {
        position_moment_scale(frame, r)
            * PairPolys::position_moments(rho.size(), r)?
                .weighted(rho)?
                .eval(t)
    };
    Ok((num / den, den))
}

/// `⟨E⟩_p = p²/2m + Σ a_r ⟨x^r⟩_p`.
pub fn average_energy_p(
    frame: &OscillatorFrame,
    rho: &DensityMatrix,
    potential: &PolynomialPotential,
    p: f64,
) -> Result<f64> {
    let sm = StateMoments::new(frame, potential, rho)?;
    let parts = sm.energy_parts(Axis::P, p);
    check_denominator(parts.denominator, p, denominator_floor(frame, Axis::P))?;
    Ok(parts.energy())
}

/// A local minimum of the denominator that does not reach zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dip {
    pub coord: f64,
    pub denominator: f64,
    /// Denominator relative to its maximum over the window.
    pub relative_depth: f64,
}

/// Result of a pole search along one axis.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PoleSearch {
    pub poles: Vec<f64>,
    pub dips: Vec<Dip>,
    pub denominator_tol: f64,
    pub diagnostics: Vec<String>,
}

/// One sample of an energy profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub coord: f64,
    pub energy: f64,
    pub denominator: f64,
    pub is_gap: bool,
}

/// `⟨E⟩` sampled along one axis, with its poles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyProfile {
    pub axis: Axis,
    pub state_index: usize,
    pub samples: Vec<ProfileSample>,
    pub poles: Vec<f64>,
    pub dips: Vec<Dip>,
    pub diagnostics: Vec<String>,
}

impl EnergyProfile {
    /// CSV with header `coord,energy,denominator,is_gap`; gap rows (denominator
    /// below [`DENOMINATOR_FLOOR`]) carry `NaN` energy.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "coord,energy,denominator,is_gap")?;
        for s in &self.samples {
            let e = if s.is_gap {
                "NaN".to_string()
            } else {
                fmt17(s.energy)
            };
            writeln!(
                out,
                "{},{},{},{}",
                fmt17(s.coord),
                e,
                fmt17(s.denominator),
                u8::from(s.is_gap)
            )?;
        }
        Ok(())
    }
}

/// Bisects on the sign of the denominator derivative for the minimum inside `[a, b]`.
fn refine_minimum(sm: &StateMoments, axis: Axis, mut a: f64, mut b: f64, width: f64) -> f64 {
    let tol = 1e-10 * width;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let (_, d) = sm.denominator_with_derivative(axis, mid);
        if d > 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

/// Bisects on the sign of the denominator for a crossing inside `[a, b]`.
fn refine_crossing(sm: &StateMoments, axis: Axis, mut a: f64, mut b: f64, width: f64) -> f64 {
    let tol = 1e-10 * width;
    let fa = sm.denominator_with_derivative(axis, a).0;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = sm.denominator_with_derivative(axis, mid).0;
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

fn pole_search_on_samples(
    sm: &StateMoments,
    axis: Axis,
    coords: &[f64],
    dens: &[f64],
) -> PoleSearch {
    let n = coords.len();
    let width = coords[n - 1] - coords[0];
    let max_den = dens.iter().copied().fold(0.0f64, |m, d| m.max(d.abs()));
    let den_tol = POLE_DENOMINATOR_TOL * max_den;
    let mut diagnostics = Vec::new();
    if dens[0].abs() < 10.0 * den_tol || dens[n - 1].abs() < 10.0 * den_tol {
        diagnostics.push(format!(
            "{}-axis denominator at the window edge is below 10x tolerance; the window may not contain every density zero",
            axis.name()
        ));
    }

    let mut candidates: Vec<f64> = Vec::new();
    for i in 1..n - 1 {
        if dens[i] <= dens[i - 1]
            && dens[i] <= dens[i + 1]
            && !(dens[i] == dens[i - 1] && dens[i] == dens[i + 1])
        {
            candidates.push(refine_minimum(
                sm,
                axis,
                coords[i - 1],
                coords[i + 1],
                width,
            ));
        }
    }
    for i in 0..n - 1 {
        if (dens[i] > 0.0 && dens[i + 1] < 0.0) || (dens[i] < 0.0 && dens[i + 1] > 0.0) {
            candidates.push(refine_crossing(sm, axis, coords[i], coords[i + 1], width));
        }
    }
    candidates.sort_by(f64::total_cmp);
    let spacing = width / (n - 1) as f64;
    candidates.dedup_by(|a, b| (*a - *b).abs() < 2.0 * spacing);

    let mut poles = Vec::new();
    let mut dips = Vec::new();
    let mut rejected = Vec::new();
    for c in candidates {
        let parts = sm.energy_parts(axis, c);
        if parts.denominator <= den_tol && parts.numerator.abs() >= POLE_NUMERATOR_FACTOR * den_tol
        {
            poles.push(c);
        } else if parts.denominator > den_tol {
            dips.push(Dip {
                coord: c,
                denominator: parts.denominator,
                relative_depth: parts.denominator / max_den,
            });
        } else {
            rejected.push(c);
        }
    }
    if let (Some(first), Some(last)) = (rejected.first(), rejected.last()) {
        diagnostics.push(format!(
            "{}-axis: {} denominator zeros in [{first:.4}, {last:.4}] rejected, numerator below threshold",
            axis.name(),
            rejected.len()
        ));
    }
    PoleSearch {
        poles,
        dips,
        denominator_tol: den_tol,
        diagnostics,
    }
}

/// Samples `⟨E⟩` of one state along `axis` over `window` and locates its poles.
///
/// A pole is a zero of the denominator: a sampled local minimum or sign change,
/// refined by bisection to `10⁻¹⁰·width`, whose refined denominator is within
/// `10⁻⁹·max|denominator|` of zero while the numerator exceeds `10³` times that
/// tolerance. Minima that stay above the tolerance are reported as dips.
pub fn energy_profile(
    sm: &StateMoments,
    state_index: usize,
    axis: Axis,
    window: (f64, f64),
    samples: usize,
) -> Result<EnergyProfile> {
    if samples < 3 || !(window.1 > window.0) {
        return Err(Error::invalid(
            "profile needs at least 3 samples over a non-empty window",
        ));
    }
    let coords = linspace(window.0, window.1, samples);
    let parts: Vec<EnergyParts> = coords
        .par_iter()
        .map(|&c| sm.energy_parts(axis, c))
        .collect();
    let dens: Vec<f64> = parts.iter().map(|p| p.denominator).collect();
    let search = pole_search_on_samples(sm, axis, &coords, &dens);
    let floor = denominator_floor(sm.frame(), axis);
    let samples = coords
        .iter()
        .zip(&parts)
        .map(|(&coord, p)| {
            let is_gap = p.denominator.abs() < floor;
            ProfileSample {
                coord,
                energy: if is_gap { f64::NAN } else { p.energy() },
                denominator: p.denominator,
                is_gap,
            }
        })
        .collect();
    Ok(EnergyProfile {
        axis,
        state_index,
        samples,
        poles: search.poles,
        dips: search.dips,
        diagnostics: search.diagnostics,
    })
}

/// Poles of `⟨E⟩` of `rho` along `axis`.
pub fn find_poles(
    frame: &OscillatorFrame,
    rho: &DensityMatrix,
    potential: &PolynomialPotential,
    axis: Axis,
    window: (f64, f64),
    samples: usize,
) -> Result<PoleSearch> {
    let sm = StateMoments::new(frame, potential, rho)?;
    let profile = energy_profile(&sm, 0, axis, window, samples)?;
    Ok(PoleSearch {
        poles: profile.poles,
        dips: profile.dips,
        denominator_tol: POLE_DENOMINATOR_TOL
            * profile
                .samples
                .iter()
                .map(|s| s.denominator.abs())
                .fold(0.0, f64::max),
        diagnostics: profile.diagnostics,
    })
}

/// The `C_k` and `C̄_k` coefficients of the harmonic profiles, with the
/// Heaviside weight `(1 + η(j))/2` equal to `½` at `j = 0` and `1` afterwards.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicCoeffSet {
    pub c: Vec<f64>,
    pub c_bar: Vec<f64>,
}

impl HarmonicCoeffSet {
    pub fn new(s: usize) -> Self {
        let mut c = Vec::with_capacity(s + 1);
        let mut c_bar = Vec::with_capacity(s + 1);
        for k in 0..=s {
            let mut plus = 0.0;
            let mut minus = 0.0;
            for j in 0..=k {
                let weight = if j == 0 { 0.5 } else { 1.0 };
                let q = k - j;
                let h = hermite_sq_zero(q);
                let h1 = if q > 0 {
                    2.0 * q as f64 * hermite_sq_zero(q - 1)
                } else {
                    0.0
                };
                let den = 2f64.powi(q as i32) * factorial(q);
                plus += weight * (h + h1) / den;
                minus += weight * (h - h1) / den;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            c.push(sign * plus);
            c_bar.push(sign * minus);
        }
        Self { c, c_bar }
    }

    /// `(Σ C_k L_{s−k}(u), Σ C̄_k L_{s−k}(u))`.
    pub fn sums(&self, u: f64) -> (f64, f64) {
        let s = self.c.len() - 1;
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..=s {
            let l = laguerre(s - k, 0, u).expect("alpha is zero");
            num += self.c[k] * l;
            den += self.c_bar[k] * l;
        }
        (num, den)
    }
}

/// Maximum harmonic state accepted by the closed-form profiles.
pub const HARMONIC_MAX_STATE: usize = 24;

/// Harmonic `⟨E⟩_{s,x}` from the `C_k/C̄_k` Laguerre ratio, in energy units:
/// `ħω/4 · ΣC_k L_{s−k}(2x̄²)/ΣC̄_k L_{s−k}(2x̄²) + ħω x̄²/2`.
pub fn harmonic_avg_energy_x(s: usize, x: f64, frame: &OscillatorFrame) -> Result<f64> {
    let (num, den) = harmonic_sums(s, frame.xbar(x))?;
    let hw = frame.hbar * frame.omega;
    Ok(0.25 * hw * num / den + 0.5 * hw * frame.xbar(x).powi(2))
}

/// Harmonic `⟨E⟩_{s,p}`: `ħω p̄²/2 + ħω/4 · ΣC_k L_{s−k}(2p̄²)/ΣC̄_k L_{s−k}(2p̄²)`.
pub fn harmonic_avg_energy_p(s: usize, p: f64, frame: &OscillatorFrame) -> Result<f64> {
    let (num, den) = harmonic_sums(s, frame.pbar(p))?;
    let hw = frame.hbar * frame.omega;
    Ok(0.5 * hw * frame.pbar(p).powi(2) + 0.25 * hw * num / den)
}

/// Numerator and denominator sums of the harmonic ratio at scaled coordinate `t`.
pub fn harmonic_sums(s: usize, t: f64) -> Result<(f64, f64)> {
    if s > HARMONIC_MAX_STATE {
        return Err(Error::invalid(format!(
            "harmonic closed form supports s <= {HARMONIC_MAX_STATE}"
        )));
    }
    Ok(HarmonicCoeffSet::new(s).sums(2.0 * t * t))
}

/// A pole paired with the negativity interval that contains it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleMatch {
    pub pole: f64,
    pub interval: Option<NegativityInterval>,
}

/// Poles of one axis matched against the negativity intervals of the Wigner
/// slice through the origin along the same axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleNegativityReport {
    pub axis: Axis,
    pub state_index: usize,
    pub poles: Vec<f64>,
    pub dips: Vec<Dip>,
    pub intervals: Vec<NegativityInterval>,
    pub matches: Vec<PoleMatch>,
    pub unmatched_poles: Vec<f64>,
    pub unmatched_intervals: Vec<NegativityInterval>,
    /// Every pole lies in an interval and every interval holds exactly one pole.
    pub bijection: bool,
}

/// Pairs each pole with the negativity interval containing it.
pub fn match_poles(
    axis: Axis,
    state_index: usize,
    poles: &[f64],
    dips: &[Dip],
    intervals: &[NegativityInterval],
) -> PoleNegativityReport {
    let matches: Vec<PoleMatch> = poles
        .iter()
        .map(|&pole| PoleMatch {
            pole,
            interval: intervals.iter().find(|iv| iv.contains(pole)).copied(),
        })
        .collect();
    let unmatched_poles = matches
        .iter()
        .filter(|m| m.interval.is_none())
        .map(|m| m.pole)
        .collect::<Vec<_>>();
    let counts: Vec<usize> = intervals
        .iter()
        .map(|iv| poles.iter().filter(|&&p| iv.contains(p)).count())
        .collect();
    let unmatched_intervals = intervals
        .iter()
        .zip(&counts)
        .filter(|(_, &c)| c == 0)
        .map(|(iv, _)| *iv)
        .collect::<Vec<_>>();
    let bijection = unmatched_poles.is_empty() && counts.iter().all(|&c| c == 1);
    PoleNegativityReport {
        axis,
        state_index,
        poles: poles.to_vec(),
        dips: dips.to_vec(),
        intervals: intervals.to_vec(),
        matches,
        unmatched_poles,
        unmatched_intervals,
        bijection,
    }
}

/// Poles of `⟨E⟩` along `axis` paired with negativity intervals of the
/// corresponding Wigner slice, both sampled on the same `samples` points of `window`.
#[allow(clippy::too_many_arguments)]
pub fn pole_negativity_report(
    sm: &StateMoments,
    rho: &DensityMatrix,
    state_index: usize,
    axis: Axis,
    window: (f64, f64),
    samples: usize,
    negativity_tol: f64,
) -> Result<(EnergyProfile, PoleNegativityReport)> {
    let profile = energy_profile(sm, state_index, axis, window, samples)?;
    let coords = linspace(window.0, window.1, samples);
    let (_, intervals) = slice_negativity(sm.frame(), rho, axis, &coords, negativity_tol);
    let report = match_poles(axis, state_index, &profile.poles, &profile.dips, &intervals);
    Ok((profile, report))
}
