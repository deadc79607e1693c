use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quadrature::{ExponentPolynomial, Polynomial};

/// Fourier-domain kernel `prefactor(λ) · exp(exponent(λ))`.
///
/// The evolved function is `normalization · ∫ symbol(λ) e^{iλx − λ²t/2} dλ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSymbol {
    pub name: String,
    pub prefactor: Polynomial,
    pub exponent: ExponentPolynomial,
    pub normalization: f64,
}

impl SpectralSymbol {
    /// Builds a symbol, rejecting ones whose transform would not be real.
    pub fn new(
        name: impl Into<String>,
        prefactor: Polynomial,
        exponent: ExponentPolynomial,
        normalization: f64,
    ) -> Result<Self> {
        let name = name.into();
        if !prefactor.is_hermitian() || !exponent.is_hermitian() {
            return Err(Error::InvalidKernel(format!(
                "symbol {name} is not Hermitian-symmetric; its transform would be complex"
            )));
        }
        if !(normalization.is_finite() && normalization != 0.0) {
            return Err(Error::InvalidKernel(format!(
                "bad normalization {normalization}"
            )));
        }
        Ok(SpectralSymbol {
            name,
            prefactor,
            exponent,
            normalization,
        })
    }

    /// True when the symbol decays on its own, so `t = 0` needs no heat damping.
    pub fn is_damped(&self) -> bool {
        self.exponent.check_decay().is_ok()
    }

    /// `e^{−λ⁴/4}`: the order-4 Airy function φ.
    pub fn quartic() -> Self {
        Builtin::Quartic.symbol()
    }

    /// `e^{iλ³/3}`: Ai.
    pub fn airy_cubic() -> Self {
        Builtin::AiryCubic.symbol()
    }

    /// `e^{iλ³/3 − λ²/2}`: solution of `φ″ = xφ + φ′`.
    pub fn shifted_cubic() -> Self {
        Builtin::ShiftedCubic.symbol()
    }

    /// `(1 − 4λ²) e^{−λ²}`: position kernel proportional to `(x² − 1) e^{−x²/4}`.
    pub fn hermite_gauss() -> Self {
        Builtin::HermiteGauss.symbol()
    }

    /// `iλ e^{iλ³/3}`: Ai′.
    pub fn airy_prime() -> Self {
        Builtin::AiryPrime.symbol()
    }
}

/// The built-in symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    Quartic,
    AiryCubic,
    ShiftedCubic,
    HermiteGauss,
    AiryPrime,
}

impl Builtin {
    pub const ALL: [Builtin; 5] = [
        Builtin::Quartic,
        Builtin::AiryCubic,
        Builtin::ShiftedCubic,
        Builtin::HermiteGauss,
        Builtin::AiryPrime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Quartic => "quartic",
            Builtin::AiryCubic => "airy-cubic",
            Builtin::ShiftedCubic => "shifted-cubic",
            Builtin::HermiteGauss => "hermite-gauss",
            Builtin::AiryPrime => "airy-prime",
        }
    }

    pub fn is_even(self) -> bool {
        matches!(self, Builtin::Quartic | Builtin::HermiteGauss)
    }

    pub fn symbol(self) -> SpectralSymbol {
        let zero = Complex64::new(0.0, 0.0);
        let cubic = Complex64::new(0.0, 1.0 / 3.0);
        let (prefactor, exponent) = match self {
            Builtin::Quartic => (
                Polynomial::one(),
                vec![zero, zero, zero, zero, Complex64::new(-0.25, 0.0)],
            ),
            Builtin::AiryCubic => (Polynomial::one(), vec![zero, zero, zero, cubic]),
            Builtin::ShiftedCubic => (
                Polynomial::one(),
                vec![zero, zero, Complex64::new(-0.5, 0.0), cubic],
            ),
            Builtin::HermiteGauss => (
                Polynomial::from_real(&[1.0, 0.0, -4.0]),
                vec![zero, zero, Complex64::new(-1.0, 0.0)],
            ),
            Builtin::AiryPrime => (
                Polynomial::monomial(1, Complex64::i()),
                vec![zero, zero, zero, cubic],
            ),
        };
        SpectralSymbol::new(
            self.name(),
            prefactor,
            ExponentPolynomial::new(exponent).expect("built-in exponent"),
            1.0 / (2.0 * PI),
        )
        .expect("built-in symbols are Hermitian")
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown symbol {s:?}")))
    }
}
