//! Classical Airy function Ai and its derivatives on the real line.
//!
//! - `−7 ≤ x ≤ 3`: Maclaurin series `Ai = c₁f − c₂g`.
//! - `x < −7`: oscillatory asymptotic expansion in `ζ = (2/3)|x|^{3/2}`.
//! - `x > 3`: the saddle-point representation
//!   `Ai(x) = e^{−ζ}/(2π) ∫ e^{−√x s² + is³/3} ds`, evaluated with the
//!   crate's own quadrature. It keeps full relative accuracy in the decaying
//!   tail where the power series cancels and the asymptotic series stalls.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::quadrature::{oscillatory_integral, ExponentPolynomial, Polynomial, QuadratureSpec};

/// Ai(0) = 3^{−2/3}/Γ(2/3)
pub const AI0: f64 = 0.355_028_053_887_817_24;
/// −Ai′(0) = 3^{−1/3}/Γ(1/3)
const AI1: f64 = 0.258_819_403_792_806_8;

const SERIES_MIN: f64 = -7.0;
const SERIES_MAX: f64 = 3.0;

/// `Ai(x)`.
pub fn airy_ai(x: f64) -> f64 {
    airy_pair(x).0
}

/// `Ai′(x)`.
pub fn airy_ai_prime(x: f64) -> f64 {
    airy_pair(x).1
}

/// `(Ai(x), Ai′(x))`.
pub fn airy_pair(x: f64) -> (f64, f64) {
    if x.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    if x < SERIES_MIN {
        asymptotic_negative(-x)
    } else if x <= SERIES_MAX {
        maclaurin(x)
    } else {
        saddle_positive(x)
    }
}

/// `Ai^{(k)}(x)`, from `Ai″ = x·Ai` written as `P_k(x)·Ai + Q_k(x)·Ai′`.
pub fn airy_ai_derivative(x: f64, k: usize) -> f64 {
    let (ai, aip) = airy_pair(x);
    let (p, q) = derivative_coefficients(k);
    horner(&p, x) * ai + horner(&q, x) * aip
}

/// Polynomials `(P_k, Q_k)` with `Ai^{(k)} = P_k·Ai + Q_k·Ai′`.
fn derivative_coefficients(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut p = vec![1.0];
    let mut q = vec![0.0];
    for _ in 0..k {
        // P' + x·Q  and  P + Q'
        let mut next_p = derivative(&p);
        let shifted: Vec<f64> = std::iter::once(0.0).chain(q.iter().copied()).collect();
        add_into(&mut next_p, &shifted);
        let mut next_q = derivative(&q);
        add_into(&mut next_q, &p);
        p = next_p;
        q = next_q;
    }
    (p, q)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    if c.len() <= 1 {
        return vec![0.0];
    }
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, v)| k as f64 * v)
        .collect()
}

fn add_into(acc: &mut Vec<f64>, other: &[f64]) {
    if acc.len() < other.len() {
        acc.resize(other.len(), 0.0);
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * x + v)
}

fn maclaurin(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    // f, g and their derivatives via term ratios
    let (mut f, mut fp, mut g, mut gp) = (1.0, 0.0, x, 1.0);
    let (mut tf, mut tfp, mut tg, mut tgp) = (1.0, 0.5 * x * x, x, 1.0);
    fp += tfp;
    for k in 0..200 {
        let k = k as f64;
        tf *= x3 / ((3.0 * k + 2.0) * (3.0 * k + 3.0));
        tg *= x3 / ((3.0 * k + 3.0) * (3.0 * k + 4.0));
        tfp *= x3 / ((3.0 * k + 3.0) * (3.0 * k + 5.0));
        tgp *= x3 / ((3.0 * k + 1.0) * (3.0 * k + 3.0));
        f += tf;
        g += tg;
        fp += tfp;
        gp += tgp;
        let small = |t: f64, s: f64| t.abs() <= 1e-18 * s.abs().max(1e-300);
        if small(tf, f) && small(tg, g) && small(tfp, fp) && small(tgp, gp) {
            break;
        }
    }
    (AI0 * f - AI1 * g, AI0 * fp - AI1 * gp)
}

fn asymptotic_negative(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    // u_k and v_k = −(6k+1)/(6k−1)·u_k; sum while terms still shrink
    let (mut p, mut q, mut pv, mut qv) = (1.0, 0.0, 1.0, 0.0);
    let mut u = 1.0;
    let mut zk = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        zk *= zeta;
        let term = u / zk;
        if term.abs() >= last || term.abs() < 1e-17 {
            break;
        }
        last = term.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
            pv += sign * v / zk;
        } else {
            q += sign * term;
            qv += sign * v / zk;
        }
    }
    let theta = zeta - PI / 4.0;
    let (s, c) = theta.sin_cos();
    let z4 = z.powf(0.25);
    let ai = (c * p + s * q) / (PI.sqrt() * z4);
    let aip = z4 * (s * pv - c * qv) / PI.sqrt();
    (ai, aip)
}

fn saddle_positive(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    if zeta > 745.0 {
        return (0.0, -0.0);
    }
    let root = x.sqrt();
    let exponent = ExponentPolynomial::new(vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(-root, 0.0),
        Complex64::new(0.0, 1.0 / 3.0),
    ])
    .expect("valid saddle exponent");
    let spec = QuadratureSpec::default();
    let scale = (-zeta).exp() / (2.0 * PI);
    let ai = oscillatory_integral(&Polynomial::one(), &exponent, 0.0, &spec)
        .expect("saddle integral is well conditioned")
        .value
        .re;
    let slope_factor = Polynomial::new(vec![Complex64::new(-root, 0.0), Complex64::i()]);
    let aip = oscillatory_integral(&slope_factor, &exponent, 0.0, &spec)
        .expect("saddle integral is well conditioned")
        .value
        .re;
    (scale * ai, scale * aip)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed with mpmath at 30 digits.
    const TABLE: &[(f64, f64, f64)] = &[
        (-15.0, 0.278_217_490_870_828_93, 0.272_374_204_308_642_02),
        (-10.0, 0.040_241_238_486_443_191, 0.996_265_044_132_790_06),
        (-7.5, 0.321_775_716_380_647_88, 0.318_809_506_698_554_6),
        (-5.0, 0.350_761_009_024_114_32, 0.327_192_818_554_443_14),
        (-2.0, 0.227_407_428_201_685_58, 0.618_259_020_741_691_04),
        (0.0, 0.355_028_053_887_817_24, -0.258_819_403_792_806_8),
        (1.0, 0.135_292_416_312_881_42, -0.159_147_441_296_793_21),
        (2.5, 0.015_725_923_380_470_49, -0.026_250_881_035_903_23),
        (4.0, 9.515_638_512_048_018_7e-4, -1.958_640_950_204_178_9e-3),
        (8.0, 4.692_207_616_099_231_6e-8, -1.341_439_297_906_786_6e-7),
    ];

    #[test]
    fn matches_reference_table() {
        for &(x, ai, aip) in TABLE {
            let (a, b) = airy_pair(x);
            let scale = ai.abs().max(1e-300);
            assert!(
                (a - ai).abs() < 1e-10 && (a - ai).abs() / scale < 1e-8,
                "Ai({x}) = {a}, want {ai}"
            );
            assert!(
                (b - aip).abs() < 1e-10 && (b - aip).abs() / aip.abs() < 1e-8,
                "Ai'({x}) = {b}, want {aip}"
            );
        }
    }

    #[test]
    fn branches_agree_at_switch_points() {
        for x in [SERIES_MIN, SERIES_MAX] {
            let (a, b) = maclaurin(x);
            let (c, d) = if x < 0.0 {
                asymptotic_negative(-x)
            } else {
                saddle_positive(x)
            };
            assert!((a - c).abs() < 1e-11, "Ai at {x}: {a} vs {c}");
            assert!((b - d).abs() < 1e-11, "Ai' at {x}: {b} vs {d}");
        }
    }

    #[test]
    fn first_zeros() {
        assert!(airy_ai(-2.33811).abs() < 1e-5);
        assert!(airy_ai_prime(-1.01879).abs() < 1e-5);
        assert!((airy_ai(0.0) - 0.3550281).abs() < 1e-7);
    }

    #[test]
    fn derivative_ladder_obeys_airy_equation() {
        for x in [-3.0, -0.5, 0.7, 2.0] {
            let (ai, aip) = airy_pair(x);
            assert!((airy_ai_derivative(x, 0) - ai).abs() < 1e-15);
            assert!((airy_ai_derivative(x, 1) - aip).abs() < 1e-15);
            assert!((airy_ai_derivative(x, 2) - x * ai).abs() < 1e-14);
            assert!((airy_ai_derivative(x, 3) - (ai + x * aip)).abs() < 1e-14);
            assert!((airy_ai_derivative(x, 4) - (2.0 * aip + x * x * ai)).abs() < 1e-14);
        }
    }

    #[test]
    fn wronskian_with_derivative_identity() {
        // d/dx Ai′ = x·Ai checked by central differences
        for x in [-12.0, -6.0, -1.0, 1.5, 5.0] {
            let h = 1e-5;
            let fd = (airy_ai_prime(x + h) - airy_ai_prime(x - h)) / (2.0 * h);
            assert!(
                (fd - x * airy_ai(x)).abs() < 1e-7,
                "x={x}: {fd} vs {}",
                x * airy_ai(x)
            );
        }
    }
}
