//! The order-4 Airy function `φ(x) = (1/2π) ∫ e^{iλx − λ⁴/4} dλ`.
//!
//! Two independent routes: the Fourier integral (quadrature) and the Maclaurin
//! series generated by `φ‴ = xφ`, seeded from Gamma-function values at 0.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{oscillatory_integral, ExponentPolynomial, Polynomial, QuadratureSpec};

const GAMMA_QUARTER: f64 = 3.625_609_908_221_908_3;
const GAMMA_THREE_QUARTERS: f64 = 1.225_416_702_465_177_6;

/// `φ(0) = Γ(1/4) / (2^{3/2} π)`.
pub const PHI4_AT_ZERO: f64 = GAMMA_QUARTER / (2.0 * std::f64::consts::SQRT_2 * PI);

/// `φ″(0) = −Γ(3/4) / (√2 π)`.
pub const PHI4_SECOND_AT_ZERO: f64 = -GAMMA_THREE_QUARTERS / (std::f64::consts::SQRT_2 * PI);

/// Largest |x| the series is used for.
pub const SERIES_RANGE: f64 = 6.0;

fn quartic_exponent() -> ExponentPolynomial {
    ExponentPolynomial::from_real(&[0.0, 0.0, 0.0, 0.0, -0.25]).expect("quartic exponent")
}

/// `φ(x)` by quadrature.
pub fn phi4(x: f64) -> Result<f64> {
    phi4_moment(x, 0, &QuadratureSpec::default())
}

/// `(1/2π) ∫ (iλ)^j e^{iλx − λ⁴/4} dλ`, which is `φ^{(j)}(x)`.
pub fn phi4_moment(x: f64, j: usize, spec: &QuadratureSpec) -> Result<f64> {
    let est = oscillatory_integral(
        &Polynomial::derivative_factor(j),
        &quartic_exponent(),
        x,
        spec,
    )?;
    Ok(est.value.re / (2.0 * PI))
}

/// `φ(x)` from the Maclaurin series with `order` coefficients.
pub fn phi4_series(x: f64, order: usize) -> Result<f64> {
    if !x.is_finite() || x.abs() > SERIES_RANGE {
        return Err(Error::Domain(format!(
            "series evaluation needs |x| ≤ {SERIES_RANGE}, got {x}"
        )));
    }
    if order < 40 {
        return Err(Error::Domain(format!(
            "series order must be at least 40, got {order}"
        )));
    }
    // a_{k+3} = a_{k−1} / ((k+1)(k+2)(k+3)); only even powers survive.
    let mut coeffs = vec![0.0; order];
    coeffs[0] = PHI4_AT_ZERO;
    coeffs[2] = 0.5 * PHI4_SECOND_AT_ZERO;
    for k in 1..order.saturating_sub(3) {
        let k_f = k as f64;
        coeffs[k + 3] = coeffs[k - 1] / ((k_f + 1.0) * (k_f + 2.0) * (k_f + 3.0));
    }

    let mut sum = 0.0;
    let mut largest: f64 = 0.0;
    let mut power = 1.0;
    let mut tail: f64 = 0.0;
    for (k, &a) in coeffs.iter().enumerate() {
        let term = a * power;
        sum += term;
        largest = largest.max(term.abs());
        if k + 8 >= order {
            tail = tail.max(term.abs());
        }
        power *= x;
    }
    if tail > 1e-17 * largest.max(f64::MIN_POSITIVE) && tail > 1e-300 {
        let value = sum;
        return Err(Error::Accuracy {
            re: value,
            im: 0.0,
            error: tail,
            nodes: order,
        });
    }
    Ok(sum)
}

/// `φ^{(j)}(x)`: moment integrals for `j ≤ 2`, then `φ‴ = xφ` and
/// `φ^{(j)} = (j−3) φ^{(j−4)} + x φ^{(j−3)}`.
pub fn phi4_derivative(x: f64, j: usize) -> Result<f64> {
    let spec = QuadratureSpec::default();
    let base = j.min(2);
    let mut d = Vec::with_capacity(j + 1);
    for k in 0..=base {
        d.push(phi4_moment(x, k, &spec)?);
    }
    for k in 3..=j {
        let value = if k == 3 {
            x * d[0]
        } else {
            (k as f64 - 3.0) * d[k - 4] + x * d[k - 3]
        };
        d.push(value);
    }
    Ok(d[j])
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force trapezoid sweep of the Fourier integral; the integrand is
    /// entire and decays super-exponentially, so the trapezoid rule is
    /// spectrally accurate with a fine uniform step.
    fn trapezoid_moment(x: f64, j: u32) -> f64 {
        let h = 1e-3;
        let n = 8000;
        let mut sum = 0.0;
        for i in -n..=n {
            let l = i as f64 * h;
            let weight = (-(l.powi(4)) / 4.0).exp();
            // Re[(iλ)^j e^{iλx}]
            let phase = l * x + j as f64 * PI / 2.0;
            sum += l.powi(j as i32) * weight * phase.cos();
        }
        sum * h / (2.0 * PI)
    }

    #[test]
    fn closed_forms_at_origin_match_brute_force() {
        assert!((PHI4_AT_ZERO - trapezoid_moment(0.0, 0)).abs() < 1e-12);
        assert!((PHI4_SECOND_AT_ZERO - trapezoid_moment(0.0, 2)).abs() < 1e-12);
        assert!((PHI4_AT_ZERO - 0.408_024_469_549_131_5).abs() < 1e-15);
        assert!((PHI4_SECOND_AT_ZERO + 0.275_815_662_830_209_3).abs() < 1e-15);
        // the customary 7-digit quotes are only accurate to ~1e-5
        assert!((PHI4_AT_ZERO - 0.4080301).abs() < 1e-5);
        assert!((PHI4_SECOND_AT_ZERO + 0.2758171).abs() < 1e-5);
    }

    #[test]
    fn phi4_at_origin() {
        assert!((phi4(0.0).unwrap() - PHI4_AT_ZERO).abs() < 1e-13);
    }

    #[test]
    fn phi4_first_zero() {
        assert!(phi4(2.44197).unwrap().abs() < 1e-5);
        assert!(phi4(-2.44197).unwrap().abs() < 1e-5);
    }

    #[test]
    fn phi4_matches_brute_force_off_origin() {
        for x in [-3.3, -1.0, 0.5, 2.0, 4.7] {
            let a = phi4(x).unwrap();
            let b = trapezoid_moment(x, 0);
            assert!((a - b).abs() < 1e-12, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn series_agrees_with_quadrature() {
        for i in -40..=40 {
            let x = i as f64 * 0.1;
            let a = phi4(x).unwrap();
            let b = phi4_series(x, 120).unwrap();
            assert!((a - b).abs() < 1e-9, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn series_zero_and_seeds() {
        assert!((phi4_series(0.0, 40).unwrap() - 0.408_024_469_549_131_5).abs() < 1e-15);
        assert!(phi4_series(2.44197, 120).unwrap().abs() < 1e-6);
    }

    #[test]
    fn series_rejects_short_orders_and_far_points() {
        assert!(matches!(phi4_series(1.0, 10), Err(Error::Domain(_))));
        assert!(matches!(phi4_series(7.0, 200), Err(Error::Domain(_))));
        assert!(matches!(phi4_series(6.0, 40), Err(Error::Accuracy { .. })));
    }

    #[test]
    fn derivative_small_orders() {
        assert!(phi4_derivative(0.0, 1).unwrap().abs() < 1e-15);
        assert!((phi4_derivative(0.0, 2).unwrap() - PHI4_SECOND_AT_ZERO).abs() < 1e-13);
        assert!((phi4_derivative(0.0, 4).unwrap() - PHI4_AT_ZERO).abs() < 1e-13);
        for x in [-2.0, 0.3, 1.7] {
            let lhs = phi4_derivative(x, 3).unwrap();
            assert!((lhs - x * phi4(x).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn recurrence_matches_moment_quadrature() {
        let spec = QuadratureSpec::default().with_density(12.0);
        for j in 3..=6 {
            for i in -8..=8 {
                let x = i as f64 * 0.5;
                let rec = phi4_derivative(x, j).unwrap();
                let mom = phi4_moment(x, j, &spec).unwrap();
                assert!((rec - mom).abs() < 1e-8, "j={j} x={x}: {rec} vs {mom}");
            }
        }
    }
}
