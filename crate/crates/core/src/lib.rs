//! Wigner functions, closed-form conditional moments and average-energy
//! profiles for one-dimensional oscillators with polynomial potentials.
//!
//! The state is expanded in the harmonic-oscillator basis of an
//! [`OscillatorFrame`]; the Wigner function is assembled from Weyl-kernel
//! matrix elements, and the conditional moments of momentum and position are
//! evaluated from exact finite sums.

pub mod dd;
pub mod energy;
pub mod error;
pub mod model;
pub mod moments;
pub mod oracle;
pub mod specfun;
pub mod wigner;

pub use error::{Error, Result};
pub use model::{DensityMatrix, EigenState, OscillatorFrame, PolynomialPotential, SpectralBasis};

/// Formats a float with 17 significant digits in scientific notation, as
/// written to every CSV file.
pub fn fmt17(x: f64) -> String {
    if x == 0.0 {
        // normalise negative zero
        return format!("{:.16e}", 0.0);
    }
    format!("{x:.16e}")
}
