//! Spectral symbols and the initial kernels they describe: the order-4 Airy
//! function φ, the classical Airy function, and zero finding for both.

mod airy;
mod phi;
mod symbol;
mod zeros;

pub use airy::{airy_ai, airy_ai_derivative, airy_ai_prime, airy_pair, AI0};
pub use phi::{
    phi4, phi4_derivative, phi4_moment, phi4_series, PHI4_AT_ZERO, PHI4_SECOND_AT_ZERO,
    SERIES_RANGE,
};
pub use symbol::{Builtin, SpectralSymbol};
pub use zeros::{find_zero_near, find_zeros, refine_bracket, ZeroList, SCAN_STEP};

use crate::error::Result;

/// First `n` positive zeros of φ.
pub fn phi4_zeros(n: usize) -> Result<ZeroList> {
    find_zeros(phi4, (0.1, 10.0 + 4.0 * n as f64), n, 1e-13)
}

/// First `n` zeros of Ai, in descending order.
pub fn airy_ai_zeros(n: usize) -> Result<ZeroList> {
    find_zeros(|x| Ok(airy_ai(x)), (-(5.0 + 3.0 * n as f64), 0.0), n, 1e-14)
}

/// First `n` zeros of Ai′, in descending order.
pub fn airy_ai_prime_zeros(n: usize) -> Result<ZeroList> {
    find_zeros(
        |x| Ok(airy_ai_prime(x)),
        (-(5.0 + 3.0 * n as f64), 0.0),
        n,
        1e-14,
    )
}
