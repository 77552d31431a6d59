//! Physical frame, polynomial potential and the harmonic-basis spectral solver.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mass, frequency and Planck constant of the reference harmonic oscillator.
///
/// The frame fixes the length scale `1/κ` and momentum scale `√(mħω)` used to
/// nondimensionalize phase-space coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorFrame {
    pub mass: f64,
    pub omega: f64,
    pub hbar: f64,
}

impl Default for OscillatorFrame {
    fn default() -> Self {
        Self::unit()
    }
}

impl OscillatorFrame {
    pub fn new(mass: f64, omega: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("mass", mass), ("omega", omega), ("hbar", hbar)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { mass, omega, hbar })
    }

    /// `m = ω = ħ = 1`.
    pub fn unit() -> Self {
        Self {
            mass: 1.0,
            omega: 1.0,
            hbar: 1.0,
        }
    }

    /// `κ = √(mω/ħ)`.
    pub fn kappa(&self) -> f64 {
        (self.mass * self.omega / self.hbar).sqrt()
    }

    /// `√(mħω)`.
    pub fn pscale(&self) -> f64 {
        (self.mass * self.hbar * self.omega).sqrt()
    }

    pub fn xbar(&self, x: f64) -> f64 {
        self.kappa() * x
    }

    pub fn pbar(&self, p: f64) -> f64 {
        p / self.pscale()
    }

    /// Coefficient `mω²/2` of the harmonic potential.
    pub fn harmonic_stiffness(&self) -> f64 {
        0.5 * self.mass * self.omega * self.omega
    }

    /// Position standard deviation of the harmonic ground state.
    pub fn sigma_x(&self) -> f64 {
        (self.hbar / (2.0 * self.mass * self.omega)).sqrt()
    }

    /// Momentum standard deviation of the harmonic ground state.
    pub fn sigma_p(&self) -> f64 {
        (0.5 * self.mass * self.hbar * self.omega).sqrt()
    }
}

/// `U(x) = Σ a_n xⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PolynomialPotential {
    coeffs: Vec<f64>,
}

impl TryFrom<Vec<f64>> for PolynomialPotential {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PolynomialPotential> for Vec<f64> {
    fn from(p: PolynomialPotential) -> Self {
        p.coeffs
    }
}

impl PolynomialPotential {
    /// Builds from `a_0..a_N`; requires `N ≥ 1` and `a_N ≠ 0`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::invalid("potential needs degree >= 1"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("potential coefficients must be finite"));
        }
        if *coeffs.last().unwrap() == 0.0 {
            return Err(Error::invalid(
                "leading potential coefficient must be non-zero",
            ));
        }
        Ok(Self { coeffs })
    }

    /// `mω²x²/2`.
    pub fn harmonic(frame: &OscillatorFrame) -> Self {
        Self {
            coeffs: vec![0.0, 0.0, frame.harmonic_stiffness()],
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &a| acc * x + a)
    }
}

/// Truncated harmonic-oscillator basis of `size` functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralBasis {
    pub size: usize,
    pub frame: OscillatorFrame,
}

impl SpectralBasis {
    pub fn new(size: usize, frame: OscillatorFrame) -> Result<Self> {
        if size < 2 {
            return Err(Error::invalid("basis size must be at least 2"));
        }
        Ok(Self { size, frame })
    }
}

fn position_matrix(size: usize, kappa: f64) -> DMatrix<f64> {
    let mut x = DMatrix::zeros(size, size);
    for n in 0..size.saturating_sub(1) {
        let v = ((n + 1) as f64 / 2.0).sqrt() / kappa;
        x[(n, n + 1)] = v;
        x[(n + 1, n)] = v;
    }
    x
}

/// Matrix of `x̂` in the basis: `X[n, n+1] = √((n+1)/2)/κ`.
pub fn build_position_matrix(basis: &SpectralBasis) -> DMatrix<f64> {
    position_matrix(basis.size, basis.frame.kappa())
}

/// `H = ħω(n + ½) − (mω²/2)X² + Σ a_n Xⁿ`.
///
/// Powers of `X` are taken in a basis enlarged by the potential degree and
/// cropped, so every retained entry is exact.
pub fn build_hamiltonian(
    basis: &SpectralBasis,
    potential: &PolynomialPotential,
) -> Result<DMatrix<f64>> {
    let k = basis.size;
    let degree = potential.degree();
    if k < degree + 2 {
        return Err(Error::invalid(format!(
            "basis size {k} is below degree + 2 = {}",
            degree + 2
        )));
    }
    let frame = &basis.frame;
    let work = k + degree;
    let x = position_matrix(work, frame.kappa());

    // Fold the harmonic subtraction into the quadratic coefficient.
    let mut coeffs = potential.coeffs().to_vec();
    if degree >= 2 {
        coeffs[2] -= frame.harmonic_stiffness();
    } else {
        coeffs.resize(3, 0.0);
        coeffs[2] = -frame.harmonic_stiffness();
    }

    let mut v = DMatrix::<f64>::zeros(work, work);
    let mut power = DMatrix::<f64>::identity(work, work);
    for (n, &a) in coeffs.iter().enumerate() {
        if n > 0 {
            power = &power * &x;
        }
        if a != 0.0 {
            v += &power * a;
        }
    }

    let mut h = v.view((0, 0), (k, k)).into_owned();
    let hw = frame.hbar * frame.omega;
    for n in 0..k {
        h[(n, n)] += hw * (n as f64 + 0.5);
    }
    // Exact symmetry.
    for i in 0..k {
        for j in (i + 1)..k {
            let s = 0.5 * (h[(i, j)] + h[(j, i)]);
            h[(i, j)] = s;
            h[(j, i)] = s;
        }
    }
    Ok(h)
}

/// Stationary state with real basis coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenState {
    pub index: usize,
    pub energy: f64,
    pub coeffs: Vec<f64>,
}

/// Normalized Hermite functions `h_0(t)..h_{n-1}(t)` with `∫ h_k² dt = 1`.
pub fn hermite_functions(n: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(std::f64::consts::PI.powf(-0.25) * (-0.5 * t * t).exp());
    if n > 1 {
        out.push(std::f64::consts::SQRT_2 * t * out[0]);
    }
    for k in 1..n.saturating_sub(1) {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * t * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

impl EigenState {
    pub fn basis_size(&self) -> usize {
        self.coeffs.len()
    }

    /// `Ψ(x) = Σ c_k φ_k(x)`.
    pub fn wavefunction(&self, frame: &OscillatorFrame, x: f64) -> f64 {
        let h = hermite_functions(self.coeffs.len(), frame.xbar(x));
        let s: f64 = self.coeffs.iter().zip(&h).map(|(c, h)| c * h).sum();
        frame.kappa().sqrt() * s
    }

    /// `|Ψ(x)|²`.
    pub fn position_density(&self, frame: &OscillatorFrame, x: f64) -> f64 {
        self.wavefunction(frame, x).powi(2)
    }

    /// Momentum-space amplitude `Ψ̃(p) = Σ c_k (−i)^k φ̃_k(p)`.
    pub fn momentum_amplitude(&self, frame: &OscillatorFrame, p: f64) -> Complex64 {
        let h = hermite_functions(self.coeffs.len(), frame.pbar(p));
        let phases = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        let s: Complex64 = self
            .coeffs
            .iter()
            .zip(&h)
            .enumerate()
            .map(|(k, (c, h))| phases[k % 4] * (c * h))
            .sum();
        s / frame.pscale().sqrt()
    }

    pub fn momentum_density(&self, frame: &OscillatorFrame, p: f64) -> f64 {
        self.momentum_amplitude(frame, p).norm_sqr()
    }
}

/// Lowest `count` eigenpairs of the symmetric matrix `h`, ascending, with the
/// largest-magnitude coefficient of each eigenvector made positive.
pub fn solve_eigenstates(h: &DMatrix<f64>, count: usize) -> Result<Vec<EigenState>> {
    let k = h.nrows();
    if h.ncols() != k {
        return Err(Error::invalid("hamiltonian must be square"));
    }
    if count > k {
        return Err(Error::invalid(format!(
            "requested {count} states from a basis of {k}"
        )));
    }
    let norm = h.norm();
    let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, 10_000)
        .ok_or(Error::NonConvergence { residual: f64::NAN })?;

    let dominant = |j: usize| -> usize {
        let col = eig.eigenvectors.column(j);
        (0..k)
            .max_by(|&a, &b| col[a].abs().total_cmp(&col[b].abs()).then(b.cmp(&a)))
            .unwrap_or(0)
    };
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .total_cmp(&eig.eigenvalues[b])
            .then_with(|| dominant(a).cmp(&dominant(b)))
    });

    let mut v = DMatrix::<f64>::zeros(k, k);
    for (new, &old) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(old).into_owned();
        let d = dominant(old);
        if col[d] < 0.0 {
            col.neg_mut();
        }
        v.set_column(new, &col);
    }

    let t = v.transpose() * h * &v;
    let mut residual: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            if i != j {
                residual = residual.max(t[(i, j)].abs());
            }
        }
    }
    if residual > 1e-12 * norm.max(1.0) {
        return Err(Error::NonConvergence { residual });
    }

    Ok((0..count)
        .map(|s| EigenState {
            index: s,
            energy: eig.eigenvalues[order[s]],
            coeffs: v.column(s).iter().copied().collect(),
        })
        .collect())
}

/// Builds the Hamiltonian for `potential` and returns its lowest `count` states.
pub fn solve_potential(
    basis: &SpectralBasis,
    potential: &PolynomialPotential,
    count: usize,
) -> Result<Vec<EigenState>> {
    if basis.size < count + 1 {
        return Err(Error::invalid(format!(
            "basis size {} is below highest state + 2 = {}",
            basis.size,
            count + 1
        )));
    }
    let h = build_hamiltonian(basis, potential)?;
    solve_eigenstates(&h, count)
}

/// `ρ_{k,n}` stored as a dense symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    size: usize,
    rho: Vec<f64>,
}

impl DensityMatrix {
    /// `ρ_{k,n} = c_k c_n`.
    pub fn from_state(state: &EigenState) -> Self {
        let c = &state.coeffs;
        let size = c.len();
        let mut rho = vec![0.0; size * size];
        for k in 0..size {
            for n in k..size {
                let v = c[k] * c[n];
                rho[k * size + n] = v;
                rho[n * size + k] = v;
            }
        }
        Self { size, rho }
    }

    /// Pure harmonic state `|s⟩⟨s|` in a basis of `size`.
    pub fn basis_state(s: usize, size: usize) -> Self {
        let mut coeffs = vec![0.0; size];
        coeffs[s] = 1.0;
        Self::from_state(&EigenState {
            index: s,
            energy: 0.0,
            coeffs,
        })
    }

    /// Symmetric matrix from row-major entries; rejects asymmetric input.
    pub fn from_row_major(size: usize, rho: Vec<f64>) -> Result<Self> {
        if rho.len() != size * size {
            return Err(Error::invalid("density matrix has wrong length"));
        }
        for k in 0..size {
            for n in 0..k {
                if rho[k * size + n] != rho[n * size + k] {
                    return Err(Error::invalid("density matrix must be symmetric"));
                }
            }
        }
        Ok(Self { size, rho })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, k: usize, n: usize) -> f64 {
        self.rho[k * self.size + n]
    }

    pub fn trace(&self) -> f64 {
        (0..self.size).map(|k| self.get(k, k)).sum()
    }

    pub fn as_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.size, self.size, &self.rho)
    }
}
