//! Weyl-kernel matrix elements, Wigner functions on grids and negativity domains.

use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dd::DoubleDouble;
use crate::fmt17;
use crate::model::{DensityMatrix, OscillatorFrame};
use crate::specfun::{factorial_dd, laguerre};

/// A phase-space point in physical units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub p: f64,
}

impl PhasePoint {
    pub fn new(x: f64, p: f64) -> Self {
        Self { x, p }
    }

    /// `z = x̄ + i p̄`.
    pub fn z(&self, frame: &OscillatorFrame) -> Complex64 {
        Complex64::new(frame.xbar(self.x), frame.pbar(self.p))
    }

    /// `ε = (p²/2m + mω²x²/2)/(ħω) = |z|²/2`.
    pub fn eps(&self, frame: &OscillatorFrame) -> f64 {
        0.5 * self.z(frame).norm_sqr()
    }

    pub fn modz(&self, frame: &OscillatorFrame) -> f64 {
        self.z(frame).norm()
    }

    /// Full two-argument angle of `x̄ + i p̄`, in `(−π, π]`.
    pub fn phi(&self, frame: &OscillatorFrame) -> f64 {
        let z = self.z(frame);
        z.im.atan2(z.re)
    }
}

fn parity(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `w_{n,k}(x,p)` in its generalized-Laguerre form:
/// `(−1)^{min}/(πħ) √(2^d min!/max!) e^{−|z|²} |z|^d L_{min}^{(d)}(2|z|²) e^{i(n−k)φ}`, `d = |n−k|`.
pub fn kernel_w(frame: &OscillatorFrame, n: usize, k: usize, point: PhasePoint) -> Complex64 {
    let z = point.z(frame);
    let r2 = z.norm_sqr();
    let (m, big) = (n.min(k), n.max(k));
    let d = big - m;
    let pre = parity(m) / (std::f64::consts::PI * frame.hbar);
    if d == 0 {
        let l = laguerre(m, 0, 2.0 * r2).expect("alpha is non-negative");
        return Complex64::new(pre * (-r2).exp() * l, 0.0);
    }
    if r2 == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let ratio = (factorial_dd(m) / factorial_dd(big)).to_f64();
    let log_mag =
        0.5 * (d as f64 * std::f64::consts::LN_2 + ratio.ln()) + 0.5 * d as f64 * r2.ln() - r2;
    let l = laguerre(m, d as i32, 2.0 * r2).expect("alpha is non-negative");
    let phase = (z / z.norm()).powi(d as i32);
    let phase = if n >= k { phase } else { phase.conj() };
    phase * (pre * log_mag.exp() * l)
}

/// `w_{n,k}(x,p) = (−1)^n/(πħ) e^{−|z|²} P_{n,k}(−z, z̄)` with
/// `P_{n,k}(z₁,z₂) = √(2^{n+k} n! k!) Σ_s z₁^{n−s} z₂^{k−s} / (2^s s! (k−s)! (n−s)!)`.
///
/// The alternating sum is accumulated in double-double arithmetic.
pub fn kernel_w_reference(
    frame: &OscillatorFrame,
    n: usize,
    k: usize,
    point: PhasePoint,
) -> Complex64 {
    let z = point.z(frame);
    let z1 = DdComplex::new(-z.re, -z.im);
    let z2 = DdComplex::new(z.re, -z.im);
    let pow1 = z1.powers(n);
    let pow2 = z2.powers(k);
    let mut sum = DdComplex::new(0.0, 0.0);
    for s in 0..=n.min(k) {
        let den = (factorial_dd(s) * factorial_dd(k - s) * factorial_dd(n - s)).ldexp(s as i32);
        let term = pow1[n - s].mul(&pow2[k - s]);
        sum.re += term.re / den;
        sum.im += term.im / den;
    }
    let norm = (factorial_dd(n) * factorial_dd(k))
        .ldexp((n + k) as i32)
        .sqrt();
    let scale = parity(n) * (-z.norm_sqr()).exp() / (std::f64::consts::PI * frame.hbar);
    Complex64::new(
        (sum.re * norm).to_f64() * scale,
        (sum.im * norm).to_f64() * scale,
    )
}

#[derive(Clone, Copy)]
struct DdComplex {
    re: DoubleDouble,
    im: DoubleDouble,
}

impl DdComplex {
    fn new(re: f64, im: f64) -> Self {
        Self {
            re: DoubleDouble::from_f64(re),
            im: DoubleDouble::from_f64(im),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        Self {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }

    /// `[1, z, z², …, z^m]`.
    fn powers(&self, m: usize) -> Vec<Self> {
        let mut out = Vec::with_capacity(m + 1);
        out.push(Self::new(1.0, 0.0));
        for j in 0..m {
            let next = out[j].mul(self);
            out.push(next);
        }
        out
    }
}

/// Real parts of every `w_{n,k}` with `k ≤ n < size` at one point, indexed by
/// `d = n − k` and `m = k`, through normalized Laguerre recurrences that stay
/// finite for large indices.
struct KernelTable {
    values: Vec<Vec<f64>>,
    imag: Vec<Vec<f64>>,
}

impl KernelTable {
    fn new(frame: &OscillatorFrame, size: usize, point: PhasePoint, with_imag: bool) -> Self {
        let z = point.z(frame);
        let r2 = z.norm_sqr();
        let y = 2.0 * r2;
        let inv = 1.0 / (std::f64::consts::PI * frame.hbar);
        let unit = if r2 > 0.0 {
            z / z.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut phase = Complex64::new(1.0, 0.0);
        let mut log_pref = -r2;
        let log_r = 0.5 * (2.0 * r2).ln();
        let mut values = Vec::with_capacity(size);
        let mut imag = Vec::with_capacity(if with_imag { size } else { 0 });
        for d in 0..size {
            if d > 0 {
                phase *= unit;
                log_pref += log_r - 0.5 * (d as f64).ln();
            }
            let pref = if d > 0 && r2 == 0.0 {
                0.0
            } else {
                inv * log_pref.exp()
            };
            let df = d as f64;
            let count = size - d;
            let mut re = Vec::with_capacity(count);
            let mut im = Vec::with_capacity(if with_imag { count } else { 0 });
            let mut prev = 0.0;
            let mut cur = 1.0;
            for m in 0..count {
                if m > 0 {
                    let mf = (m - 1) as f64;
                    let next = ((2.0 * mf + df + 1.0 - y) * cur - (mf * (mf + df)).sqrt() * prev)
                        / ((mf + 1.0) * (mf + df + 1.0)).sqrt();
                    prev = cur;
                    cur = next;
                }
                let v = parity(m) * pref * cur;
                re.push(v * phase.re);
                if with_imag {
                    im.push(v * phase.im);
                }
            }
            values.push(re);
            imag.push(im);
        }
        Self { values, imag }
    }

    #[inline]
    fn re(&self, n: usize, k: usize) -> f64 {
        let (m, d) = if n >= k { (k, n - k) } else { (n, k - n) };
        self.values[d][m]
    }

    /// `Im w_{n,k}`.
    #[inline]
    fn im(&self, n: usize, k: usize) -> f64 {
        if n >= k {
            self.imag[n - k][k]
        } else {
            -self.imag[k - n][n]
        }
    }
}

fn weighted_sum(table: &KernelTable, rho: &DensityMatrix) -> f64 {
    let size = rho.size();
    let mut diag = 0.0;
    let mut off = 0.0;
    for n in 0..size {
        diag += rho.get(n, n) * table.re(n, n);
        for k in 0..n {
            off += rho.get(k, n) * table.re(n, k);
        }
    }
    diag + 2.0 * off
}

/// `W(x,p) = Σ ρ_{k,n} w_{n,k}(x,p)` for a symmetric density matrix.
pub fn wigner_value(frame: &OscillatorFrame, rho: &DensityMatrix, point: PhasePoint) -> f64 {
    let table = KernelTable::new(frame, rho.size(), point, false);
    weighted_sum(&table, rho)
}

/// `Σ ρ_{k,n} w_{n,k}` summed over every ordered pair without using Hermiticity;
/// the imaginary part measures the residue that [`wigner_value`] discards.
pub fn wigner_value_complex(
    frame: &OscillatorFrame,
    rho: &DensityMatrix,
    point: PhasePoint,
) -> Complex64 {
    let size = rho.size();
    let table = KernelTable::new(frame, size, point, true);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..size {
        for k in 0..size {
            sum += rho.get(k, n) * Complex64::new(table.re(n, k), table.im(n, k));
        }
    }
    sum
}

/// Wigner values of several states sharing one basis at a single point.
pub fn wigner_values(
    frame: &OscillatorFrame,
    rhos: &[&DensityMatrix],
    point: PhasePoint,
) -> Vec<f64> {
    let size = rhos.iter().map(|r| r.size()).max().unwrap_or(0);
    let table = KernelTable::new(frame, size, point, false);
    rhos.iter().map(|rho| weighted_sum(&table, rho)).collect()
}

/// `W_s` sampled on a rectangular grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerField {
    pub state_index: usize,
    pub xs: Vec<f64>,
    pub ps: Vec<f64>,
    /// Row-major: `values[i * ps.len() + j] = W(xs[i], ps[j])`.
    pub values: Vec<f64>,
}

impl WignerField {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ps.len() + j]
    }

    /// Trapezoid estimate of `∬ W dx dp`.
    pub fn integral(&self) -> f64 {
        let wx = trapezoid_weights(&self.xs);
        let wp = trapezoid_weights(&self.ps);
        let mut s = crate::dd::NeumaierSum::new();
        for (i, a) in wx.iter().enumerate() {
            for (j, b) in wp.iter().enumerate() {
                s.add(a * b * self.get(i, j));
            }
        }
        s.total()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Number of grid cells with `W < −tol`.
    pub fn negative_cells(&self, tol: f64) -> usize {
        self.values.iter().filter(|&&v| v < -tol).count()
    }

    /// CSV with header `x,p,W`, one row per grid point, `x` outer.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,p,W")?;
        for (i, x) in self.xs.iter().enumerate() {
            for (j, p) in self.ps.iter().enumerate() {
                writeln!(out, "{},{},{}", fmt17(*x), fmt17(*p), fmt17(self.get(i, j)))?;
            }
        }
        Ok(())
    }
}

/// Trapezoid weights for a monotone grid.
pub fn trapezoid_weights(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let h = 0.5 * (xs[i + 1] - xs[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    w
}

/// `n` equally spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let h = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + h * i as f64 })
                .collect()
        }
    }
}

/// `W` of one state on the grid `xs × ps`.
pub fn wigner_grid(
    frame: &OscillatorFrame,
    rho: &DensityMatrix,
    xs: &[f64],
    ps: &[f64],
) -> WignerField {
    wigner_grids(frame, &[(0, rho)], xs, ps)
        .pop()
        .expect("one field requested")
}

/// `W` of several `(state_index, ρ)` pairs on the same grid, sharing kernel evaluations.
pub fn wigner_grids(
    frame: &OscillatorFrame,
    states: &[(usize, &DensityMatrix)],
    xs: &[f64],
    ps: &[f64],
) -> Vec<WignerField> {
    let rhos: Vec<&DensityMatrix> = states.iter().map(|(_, r)| *r).collect();
    let rows: Vec<Vec<Vec<f64>>> = xs
        .par_iter()
        .map(|&x| {
            ps.iter()
                .map(|&p| wigner_values(frame, &rhos, PhasePoint::new(x, p)))
                .collect()
        })
        .collect();
    states
        .iter()
        .enumerate()
        .map(|(idx, (s, _))| WignerField {
            state_index: *s,
            xs: xs.to_vec(),
            ps: ps.to_vec(),
            values: rows
                .iter()
                .flat_map(|row| row.iter().map(move |v| v[idx]))
                .collect(),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    P,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::P => "p",
        }
    }

    /// Phase point on this axis with the other coordinate at zero.
    pub fn point(&self, coord: f64) -> PhasePoint {
        match self {
            Axis::X => PhasePoint::new(coord, 0.0),
            Axis::P => PhasePoint::new(0.0, coord),
        }
    }
}

/// A maximal interval along one axis on which the Wigner slice is negative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegativityInterval {
    pub axis: Axis,
    pub lo: f64,
    pub hi: f64,
    pub min_value: f64,
}

impl NegativityInterval {
    pub fn contains(&self, c: f64) -> bool {
        self.lo < c && c < self.hi
    }
}

/// Default negativity tolerance `10⁻⁹/(πħ)`.
pub fn default_negativity_tol(frame: &OscillatorFrame) -> f64 {
    1e-9 / (std::f64::consts::PI * frame.hbar)
}

/// Root of `f` between `a` (`f ≥ 0`) and `b` (`f < 0`), stopping once
/// `|f| ≤ ftol` or the bracket stops shrinking.
fn bisect_crossing(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, ftol: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        let v = f(mid);
        if v.abs() <= ftol {
            return mid;
        }
        if v >= 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Maximal intervals of a one-dimensional slice on which `W < −tol`.
///
/// `coords` must be increasing. Each run of samples below `−tol` is widened to
/// the neighbouring samples where `W ≥ 0`, and the two crossings are located by
/// bisection on `refine` (the exact slice) when given, or on the piecewise-linear
/// interpolant of the samples otherwise, until `|W| ≤ tol/10`. A run touching the
/// end of the sample range is clipped there.
pub fn negativity_intervals(
    axis: Axis,
    coords: &[f64],
    values: &[f64],
    tol: f64,
    refine: Option<&(dyn Fn(f64) -> f64 + Sync)>,
) -> Vec<NegativityInterval> {
    assert_eq!(
        coords.len(),
        values.len(),
        "coordinate and value lengths differ"
    );
    let n = coords.len();
    let interp = |c: f64| -> f64 {
        let i = coords.partition_point(|&x| x <= c).clamp(1, n - 1);
        let (x0, x1) = (coords[i - 1], coords[i]);
        let t = (c - x0) / (x1 - x0);
        values[i - 1] + t * (values[i] - values[i - 1])
    };
    let f: &dyn Fn(f64) -> f64 = match refine {
        Some(g) => g,
        None => &interp,
    };
    let mut out: Vec<NegativityInterval> = Vec::new();
    let mut i = 0;
    while i < n {
        if values[i] >= -tol {
            i += 1;
            continue;
        }
        // widen to the enclosing non-negative samples
        let mut a = i;
        while a > 0 && values[a - 1] < 0.0 {
            a -= 1;
        }
        let mut b = i;
        while b + 1 < n && values[b + 1] < 0.0 {
            b += 1;
        }
        let lo = if a == 0 {
            coords[0]
        } else {
            bisect_crossing(f, coords[a - 1], coords[a], tol / 10.0)
        };
        let hi = if b + 1 == n {
            coords[n - 1]
        } else {
            bisect_crossing(f, coords[b + 1], coords[b], tol / 10.0)
        };
        let min_value = values[a..=b].iter().copied().fold(f64::INFINITY, f64::min);
        out.push(NegativityInterval {
            axis,
            lo,
            hi,
            min_value,
        });
        i = b + 1;
    }
    out
}

/// Samples `W(coord, 0)` or `W(0, coord)` and returns the negativity intervals,
/// refining the crossings on the exact slice.
pub fn slice_negativity(
    frame: &OscillatorFrame,
    rho: &DensityMatrix,
    axis: Axis,
    coords: &[f64],
    tol: f64,
) -> (Vec<f64>, Vec<NegativityInterval>) {
    let values: Vec<f64> = coords
        .par_iter()
        .map(|&c| wigner_value(frame, rho, axis.point(c)))
        .collect();
    let exact = |c: f64| wigner_value(frame, rho, axis.point(c));
    let intervals = negativity_intervals(axis, coords, &values, tol, Some(&exact));
    (values, intervals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::laguerre;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn unit() -> OscillatorFrame {
        OscillatorFrame::unit()
    }

    #[test]
    fn kernel_examples() {
        let f = unit();
        let o = PhasePoint::new(0.0, 0.0);
        assert!((kernel_w(&f, 0, 0, o) - Complex64::new(1.0 / PI, 0.0)).norm() < 1e-16);
        assert!((kernel_w(&f, 1, 1, o).re + 1.0 / PI).abs() < 1e-16);
        let pt = PhasePoint::new(0.5, 0.3);
        let a = kernel_w(&f, 0, 1, pt);
        let b = kernel_w_reference(&f, 0, 1, pt);
        assert!((a - b).norm() < 1e-15);
        assert_eq!(kernel_w(&f, 2, 0, o), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn reference_ground_kernel_is_gaussian() {
        let f = OscillatorFrame::new(0.7, 1.9, 1.3).unwrap();
        for &(x, p) in &[(0.3, -0.2), (-1.5, 0.8), (2.0, 2.0)] {
            let pt = PhasePoint::new(x, p);
            let want = (-pt.z(&f).norm_sqr()).exp() / (PI * f.hbar);
            assert!((kernel_w_reference(&f, 0, 0, pt).re - want).abs() < 1e-16);
        }
    }

    #[test]
    fn diagonal_kernel_is_harmonic_wigner() {
        let f = OscillatorFrame::new(1.2, 0.9, 0.8).unwrap();
        for n in 0..10 {
            for &(x, p) in &[(0.0, 0.0), (0.4, -1.1), (-2.0, 0.7)] {
                let pt = PhasePoint::new(x, p);
                let e = pt.eps(&f);
                let want =
                    parity(n) / (PI * f.hbar) * (-2.0 * e).exp() * laguerre(n, 0, 4.0 * e).unwrap();
                assert!((kernel_w(&f, n, n, pt).re - want).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn table_matches_kernel() {
        let f = OscillatorFrame::new(0.6, 1.4, 1.1).unwrap();
        let pt = PhasePoint::new(-0.8, 1.3);
        let table = KernelTable::new(&f, 14, pt, true);
        for n in 0..14 {
            for k in 0..14 {
                let w = kernel_w(&f, n, k, pt);
                assert!((table.re(n, k) - w.re).abs() < 1e-14, "({n},{k})");
                assert!((table.im(n, k) - w.im).abs() < 1e-14, "({n},{k})");
            }
        }
    }

    #[test]
    fn harmonic_values_at_origin() {
        let f = OscillatorFrame::new(2.0, 0.5, 0.9).unwrap();
        let o = PhasePoint::new(0.0, 0.0);
        let w0 = wigner_value(&f, &DensityMatrix::basis_state(0, 6), o);
        let w1 = wigner_value(&f, &DensityMatrix::basis_state(1, 6), o);
        assert!((w0 - 1.0 / (PI * f.hbar)).abs() < 1e-14);
        assert!((w1 + 1.0 / (PI * f.hbar)).abs() < 1e-14);
    }

    #[test]
    fn harmonic_grid_properties() {
        let f = unit();
        let xs = linspace(-6.0, 6.0, 241);
        let ps = xs.clone();
        for s in 0..=3 {
            let field = wigner_grid(&f, &DensityMatrix::basis_state(s, 8), &xs, &ps);
            assert!((field.integral() - 1.0).abs() < 1e-6, "s = {s}");
            let n = xs.len();
            for i in 0..n {
                for j in 0..n {
                    let v = field.get(i, j);
                    assert!((v - field.get(n - 1 - i, j)).abs() < 1e-14);
                    assert!((v - field.get(i, n - 1 - j)).abs() < 1e-14);
                }
            }
            if s == 0 {
                assert!(field.min() > 0.0);
            }
        }
    }

    #[test]
    fn harmonic_slice_intervals() {
        let f = unit();
        let xs = linspace(-5.0, 5.0, 1001);
        let tol = default_negativity_tol(&f);
        let (_, i0) = slice_negativity(&f, &DensityMatrix::basis_state(0, 4), Axis::X, &xs, tol);
        assert!(i0.is_empty());
        let (_, i1) = slice_negativity(&f, &DensityMatrix::basis_state(1, 4), Axis::X, &xs, tol);
        assert_eq!(i1.len(), 1);
        // L_1(4ε) = 1 − 2x̄² changes sign at x̄ = ±1/√2
        let r = 0.5f64.sqrt();
        assert!((i1[0].lo + r).abs() < 1e-8 && (i1[0].hi - r).abs() < 1e-8);
        let (_, i2) = slice_negativity(&f, &DensityMatrix::basis_state(2, 4), Axis::X, &xs, tol);
        assert_eq!(i2.len(), 2);
        // L_2(y) = 1 − 2y + y²/2, roots y = 2 ∓ √2, y = 2x̄²
        let (a, b) = (
            ((2.0 - 2f64.sqrt()) / 2.0).sqrt(),
            ((2.0 + 2f64.sqrt()) / 2.0).sqrt(),
        );
        assert!((i2[0].lo + b).abs() < 1e-8 && (i2[0].hi + a).abs() < 1e-8);
        assert!((i2[1].lo - a).abs() < 1e-8 && (i2[1].hi - b).abs() < 1e-8);
    }

    #[test]
    fn interpolated_intervals_without_refinement() {
        let xs = linspace(0.0, 1.0, 11);
        let vals: Vec<f64> = xs.iter().map(|x| (x - 0.25) * (x - 0.75)).collect();
        let iv = negativity_intervals(Axis::P, &xs, &vals, 1e-6, None);
        assert_eq!(iv.len(), 1);
        assert!(iv[0].lo > 0.2 && iv[0].lo < 0.3 && iv[0].hi > 0.7 && iv[0].hi < 0.8);
        assert!((iv[0].min_value + 0.0625).abs() < 1e-15);
        let none = negativity_intervals(Axis::P, &xs, &[1.0; 11], 1e-6, None);
        assert!(none.is_empty());
    }

    #[test]
    fn csv_layout() {
        let f = unit();
        let field = wigner_grid(
            &f,
            &DensityMatrix::basis_state(0, 2),
            &[0.0, 1.0],
            &[-1.0, 0.5],
        );
        let mut buf = Vec::new();
        field.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,p,W");
        assert_eq!(lines.len(), 5);
        assert!(lines[2].starts_with("0.0000000000000000e0,5.0000000000000000e-1,"));
    }

    proptest! {
        #[test]
        fn laguerre_and_polynomial_kernels_agree(n in 0usize..=10, k in 0usize..=10, x in -4.0f64..4.0, p in -4.0f64..4.0) {
            let f = unit();
            let pt = PhasePoint::new(x, p);
            let a = kernel_w(&f, n, k, pt);
            let b = kernel_w_reference(&f, n, k, pt);
            prop_assert!((a - b).norm() <= 1e-10 * b.norm().max(1e-300) + 1e-15);
        }

        #[test]
        fn kernel_hermiticity(n in 0usize..=12, k in 0usize..=12, x in -4.0f64..4.0, p in -4.0f64..4.0) {
            let f = unit();
            let pt = PhasePoint::new(x, p);
            prop_assert!((kernel_w(&f, n, k, pt) - kernel_w(&f, k, n, pt).conj()).norm() <= 1e-12);
            prop_assert!((kernel_w_reference(&f, n, k, pt) - kernel_w_reference(&f, k, n, pt).conj()).norm() <= 1e-12);
        }

        #[test]
        fn wigner_value_is_real(c in proptest::collection::vec(-1.0f64..1.0, 6), x in -3.0f64..3.0, p in -3.0f64..3.0) {
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assume!(norm > 1e-3);
            let st = crate::model::EigenState { index: 0, energy: 0.0, coeffs: c.iter().map(|v| v / norm).collect() };
            let rho = DensityMatrix::from_state(&st);
            let f = unit();
            let full = wigner_value_complex(&f, &rho, PhasePoint::new(x, p));
            let fast = wigner_value(&f, &rho, PhasePoint::new(x, p));
            prop_assert!(full.im.abs() <= 1e-12 * full.norm().max(1e-3));
            prop_assert!((full.re - fast).abs() <= 1e-13);
        }
    }
}
