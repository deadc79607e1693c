//! Quadrature for decaying, oscillatory Fourier integrals
//!
//! Evaluates
//!
//! ```text
//!   ∫ p(λ) · exp(q(λ) + iλx) dλ      over ℝ
//! ```
//!
//! where `p` is a complex polynomial prefactor and `q` an exponent polynomial of
//! degree at most four whose real part decays at both ends. The integrand is
//! entire, so the line is truncated where `Re q` falls below `ln(tol)` and the
//! remaining interval is covered by fixed-width composite Gauss–Legendre panels
//! sized to the local oscillation frequency. The error estimate compares the
//! result against the same rule run at half the panel count.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Highest exponent degree accepted.
pub const MAX_EXPONENT_DEGREE: usize = 4;

/// Fraction added on top of the bisected truncation radius.
const RADIUS_INFLATION: f64 = 1.1;

/// Complex polynomial `Σ c_k λ^k` with `c_0` first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn one() -> Self {
        Self::from_real(&[1.0])
    }

    /// `c · λ^k`.
    pub fn monomial(k: usize, c: Complex64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// The moment factor `(iλ)^n`, i.e. the symbol of `∂ⁿ/∂xⁿ`.
    pub fn derivative_factor(n: usize) -> Self {
        Self::monomial(n, Complex64::i().powu(n as u32))
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(Complex64::new(0.0, 0.0));
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    #[inline]
    pub fn eval(&self, lambda: f64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * lambda + c)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::new(coeffs)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        let coeffs = (0..n)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or(zero)
                    + other.coeffs.get(k).copied().unwrap_or(zero)
            })
            .collect();
        Polynomial::new(coeffs)
    }

    /// `p(−λ) = conj(p(λ))` for real λ: even coefficients real, odd ones imaginary.
    pub fn is_hermitian(&self) -> bool {
        hermitian_coeffs(&self.coeffs)
    }
}

fn hermitian_coeffs(coeffs: &[Complex64]) -> bool {
    coeffs.iter().enumerate().all(|(k, c)| {
        let scale = c.norm().max(f64::MIN_POSITIVE);
        if k % 2 == 0 {
            c.im.abs() <= 1e-15 * scale
        } else {
            c.re.abs() <= 1e-15 * scale
        }
    })
}

/// Exponent `q(λ) = Σ c_k λ^k` with degree at most four.
///
/// Decay is not enforced at construction: a pure cubic phase is a valid
/// symbol exponent, it only becomes integrable once a heat factor is added.
/// [`ExponentPolynomial::check_decay`] is what the integrators call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentPolynomial {
    coeffs: Vec<Complex64>,
}

impl ExponentPolynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        if coeffs.len() - 1 > MAX_EXPONENT_DEGREE {
            return Err(Error::InvalidKernel(format!(
                "exponent degree {} exceeds {MAX_EXPONENT_DEGREE}",
                coeffs.len() - 1
            )));
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::InvalidKernel(
                "non-finite exponent coefficient".into(),
            ));
        }
        Ok(ExponentPolynomial { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn eval(&self, lambda: f64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * lambda + c)
    }

    /// `Re q(λ)` for real λ.
    #[inline]
    pub fn real_part(&self, lambda: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * lambda + c.re)
    }

    /// `d/dλ Im q(λ)`, the local phase frequency contributed by the exponent.
    pub fn phase_slope(&self, lambda: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, c)| acc * lambda + k as f64 * c.im)
    }

    /// Exponent plus `extra · λ²`; used to fold in the heat factor `−tλ²/2`.
    pub fn with_quadratic(&self, extra: f64) -> Result<Self> {
        let mut coeffs = self.coeffs.clone();
        if coeffs.len() < 3 {
            coeffs.resize(3, Complex64::new(0.0, 0.0));
        }
        coeffs[2] += extra;
        Self::new(coeffs)
    }

    pub fn is_hermitian(&self) -> bool {
        hermitian_coeffs(&self.coeffs)
    }

    /// Degree and coefficient of the highest non-zero real coefficient.
    fn leading_real(&self) -> Option<(usize, f64)> {
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .find(|(_, c)| c.re != 0.0)
            .map(|(k, c)| (k, c.re))
    }

    /// `Re q` must be led by a negative even-degree term.
    pub fn check_decay(&self) -> Result<()> {
        match self.leading_real() {
            Some((k, c)) if k > 0 && k % 2 == 0 && c < 0.0 => Ok(()),
            Some((k, c)) => Err(Error::InvalidKernel(format!(
                "exponent does not decay: leading real term {c}·λ^{k}"
            ))),
            None => Err(Error::InvalidKernel("exponent has no real part".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Integrand magnitude below which the tails are dropped.
    pub truncation_tolerance: f64,
    /// Nodes per oscillation period.
    pub node_density: f64,
    pub max_nodes: usize,
    /// Gauss–Legendre order of each panel.
    pub panel_order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            truncation_tolerance: 1e-16,
            node_density: 8.0,
            max_nodes: 200_000,
            panel_order: 16,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.truncation_tolerance > 0.0 && self.truncation_tolerance < 1.0) {
            return Err(Error::Domain(format!(
                "truncation tolerance must lie in (0, 1), got {}",
                self.truncation_tolerance
            )));
        }
        if !(self.node_density >= 2.0 && self.node_density.is_finite()) {
            return Err(Error::Domain(format!(
                "node density must be at least 2, got {}",
                self.node_density
            )));
        }
        if self.panel_order < 2 || self.panel_order > 64 {
            return Err(Error::Domain(format!(
                "panel order must lie in [2, 64], got {}",
                self.panel_order
            )));
        }
        if self.max_nodes < 2 * self.panel_order {
            return Err(Error::Domain("node budget smaller than two panels".into()));
        }
        Ok(())
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.truncation_tolerance = tol;
        self
    }

    pub fn with_density(mut self, density: f64) -> Self {
        self.node_density = density;
        self
    }
}

/// A value together with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub nodes: usize,
}

/// Smallest radius beyond which `Re q(λ) ≤ ln(tol)`, inflated by 10%.
///
/// Past the Cauchy bound of `Re q′` the real part is monotone in `|λ|`, so the
/// outermost crossing is either bracketed there directly or located by a
/// coarse inward scan and then bisected.
pub fn truncation_radius(q: &ExponentPolynomial, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    truncation_radius_ln(q, tol.ln())
}

/// [`truncation_radius`] with the tolerance given by its logarithm, for
/// tolerances below the smallest representable double.
pub fn truncation_radius_ln(q: &ExponentPolynomial, ln_tol: f64) -> Result<f64> {
    q.check_decay()?;
    if !(ln_tol.is_finite() && ln_tol < 0.0) {
        return Err(Error::Domain(format!(
            "log tolerance must be finite and negative, got {ln_tol}"
        )));
    }
    let excess = |r: f64| q.real_part(r).max(q.real_part(-r)) - ln_tol;

    let (n, lead) = q.leading_real().expect("checked by check_decay");
    let monotone_from = 1.0
        + (1..n)
            .map(|k| (k as f64 * q.coeffs[k].re / (n as f64 * lead)).abs())
            .fold(0.0, f64::max);

    let (mut lo, mut hi) = if excess(monotone_from) > 0.0 {
        let mut hi = 2.0 * monotone_from;
        while excess(hi) > 0.0 {
            hi *= 2.0;
        }
        (monotone_from, hi)
    } else {
        const SCAN: usize = 4096;
        let step = monotone_from / SCAN as f64;
        match (0..SCAN)
            .rev()
            .map(|i| i as f64 * step)
            .find(|&r| excess(r) > 0.0)
        {
            Some(r) => (r, r + step),
            None => return Ok(0.0),
        }
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(hi * RADIUS_INFLATION)
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_{n-1}(x)
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

/// Neumaier-compensated accumulator.
#[derive(Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    #[inline]
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

struct PanelRule<'a> {
    prefactor: &'a Polynomial,
    exponent: &'a ExponentPolynomial,
    x: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl PanelRule<'_> {
    /// Composite rule over `panels` equal panels on [−radius, radius].
    /// Returns the integral and the sum of absolute contributions.
    fn apply(&self, radius: f64, panels: usize) -> (Complex64, f64) {
        let width = 2.0 * radius / panels as f64;
        let half = 0.5 * width;
        let (mut re, mut im, mut abs) = (Compensated::default(), Compensated::default(), 0.0);
        for j in 0..panels {
            let mid = -radius + (j as f64 + 0.5) * width;
            for (&node, &w) in self.nodes.iter().zip(&self.weights) {
                let lambda = mid + half * node;
                let phase = self.exponent.eval(lambda) + Complex64::new(0.0, lambda * self.x);
                let term = self.prefactor.eval(lambda) * phase.exp() * (w * half);
                re.add(term.re);
                im.add(term.im);
                abs += term.norm();
            }
        }
        (Complex64::new(re.total(), im.total()), abs)
    }
}

/// `∫ p(λ) e^{q(λ) + iλx} dλ` over the truncated line.
pub fn oscillatory_integral(
    prefactor: &Polynomial,
    exponent: &ExponentPolynomial,
    x: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate<Complex64>> {
    spec.validate()?;
    exponent.check_decay()?;
    if !x.is_finite() {
        return Err(Error::Domain(format!("non-finite evaluation point {x}")));
    }
    let tol = spec.truncation_tolerance;
    let mut radius = truncation_radius(exponent, tol)?;
    if radius == 0.0 || prefactor.is_zero() {
        return Ok(Estimate {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            nodes: 0,
        });
    }
    // The prefactor can outgrow the exponential at the cut; push the radius out until it doesn't.
    let tail = |r: f64| {
        let mag = prefactor.eval(r).norm().max(prefactor.eval(-r).norm());
        mag * exponent.real_part(r).max(exponent.real_part(-r)).exp()
    };
    for _ in 0..200 {
        if tail(radius) <= tol {
            break;
        }
        radius *= 1.05;
    }

    const SAMPLES: usize = 256;
    let max_phase_slope = (0..=SAMPLES)
        .map(|i| {
            exponent
                .phase_slope(-radius + 2.0 * radius * i as f64 / SAMPLES as f64)
                .abs()
        })
        .fold(0.0, f64::max);
    let frequency = x.abs() + max_phase_slope;

    let max_width = PI / (2.0 * frequency.max(1.0));
    let by_width = (2.0 * radius / max_width).ceil() as usize;
    let floor = 2.0 * (exponent.degree() + prefactor.degree()) as f64 + 4.0;
    let target_nodes = ((frequency * radius / PI + floor) * spec.node_density).ceil() as usize;
    let mut panels = by_width.max(target_nodes.div_ceil(spec.panel_order)).max(2);
    panels += panels % 2;

    let (nodes, weights) = gauss_legendre(spec.panel_order);
    let rule = PanelRule {
        prefactor,
        exponent,
        x,
        nodes,
        weights,
    };

    let budget_panels = spec.max_nodes / spec.panel_order;
    if panels > budget_panels {
        let panels = budget_panels - budget_panels % 2;
        let (full, abs) = rule.apply(radius, panels);
        let (coarse, _) = rule.apply(radius, panels / 2);
        return Err(Error::Accuracy {
            re: full.re,
            im: full.im,
            error: (full - coarse).norm().max(roundoff_floor(abs)),
            nodes: panels * spec.panel_order,
        });
    }

    let (full, abs) = rule.apply(radius, panels);
    let (coarse, _) = rule.apply(radius, panels / 2);
    Ok(Estimate {
        value: full,
        error: (full - coarse).norm().max(roundoff_floor(abs)),
        nodes: panels * spec.panel_order,
    })
}

#[inline]
fn roundoff_floor(abs_sum: f64) -> f64 {
    32.0 * f64::EPSILON * abs_sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quartic() -> ExponentPolynomial {
        ExponentPolynomial::from_real(&[0.0, 0.0, 0.0, 0.0, -0.25]).unwrap()
    }

    fn gaussian() -> ExponentPolynomial {
        ExponentPolynomial::from_real(&[0.0, 0.0, -0.5]).unwrap()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for order in [1, 2, 5, 16, 17] {
            let (x, w) = gauss_legendre(order);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            for k in 0..2 * order {
                let exact = if k % 2 == 0 {
                    2.0 / (k as f64 + 1.0)
                } else {
                    0.0
                };
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                assert!((got - exact).abs() < 1e-13, "order {order}, k {k}");
            }
        }
    }

    #[test]
    fn radius_of_pure_quartic() {
        let r = truncation_radius_ln(&quartic(), -2500.0).unwrap();
        assert!((r - 11.0).abs() < 1e-9, "{r}");
    }

    #[test]
    fn radius_of_gaussian() {
        let r = truncation_radius(&gaussian(), (-50.0f64).exp()).unwrap();
        assert!((r - 11.0).abs() < 1e-9, "{r}");
    }

    #[test]
    fn extra_gaussian_decay_shrinks_radius() {
        let q = ExponentPolynomial::from_real(&[0.0, 0.0, -5.0, 0.0, -0.25]).unwrap();
        let r = truncation_radius_ln(&q, -2500.0).unwrap();
        // λ⁴/4 + 5λ² = 2500  ⇒  λ² = −10 + √10100
        let exact = (-10.0 + 10100f64.sqrt()).sqrt() * 1.1;
        assert!(r < 11.0);
        assert!((r - exact).abs() < 1e-9, "{r} vs {exact}");
    }

    #[test]
    fn radius_satisfies_tail_bound() {
        let q = ExponentPolynomial::new(vec![
            Complex64::new(0.3, 0.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(1.5, 0.0),
            Complex64::new(0.0, 1.0 / 3.0),
            Complex64::new(-0.25, 0.0),
        ])
        .unwrap();
        let tol = 1e-16;
        let r = truncation_radius(&q, tol).unwrap() / 1.1;
        for i in 0..2000 {
            let lambda = r + i as f64 * 0.01;
            assert!(q.real_part(lambda) <= tol.ln() + 1e-9);
            assert!(q.real_part(-lambda) <= tol.ln() + 1e-9);
        }
        assert!(q.real_part(r * 0.999).max(q.real_part(-r * 0.999)) > tol.ln());
    }

    #[test]
    fn non_decaying_exponents_are_rejected() {
        let growing = ExponentPolynomial::from_real(&[0.0, 0.0, 0.5]).unwrap();
        let odd = ExponentPolynomial::from_real(&[0.0, 0.0, 0.0, -1.0]).unwrap();
        let cubic_phase = ExponentPolynomial::new(
            vec![Complex64::new(0.0, 0.0); 3]
                .into_iter()
                .chain([Complex64::new(0.0, 1.0 / 3.0)])
                .collect(),
        )
        .unwrap();
        for q in [growing, odd, cubic_phase] {
            assert!(matches!(
                truncation_radius(&q, 1e-16),
                Err(Error::InvalidKernel(_))
            ));
            assert!(matches!(
                oscillatory_integral(&Polynomial::one(), &q, 0.0, &QuadratureSpec::default()),
                Err(Error::InvalidKernel(_))
            ));
        }
        assert!(ExponentPolynomial::from_real(&[0.0, 0.0, 0.0, 0.0, 0.0, -1.0]).is_err());
    }

    #[test]
    fn gaussian_integral() {
        let est = oscillatory_integral(
            &Polynomial::one(),
            &gaussian(),
            0.0,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((est.value.re - (2.0 * PI).sqrt()).abs() < 1e-13);
        assert!(est.value.im.abs() < 1e-15);
    }

    #[test]
    fn gaussian_fourier_transform() {
        let est = oscillatory_integral(
            &Polynomial::one(),
            &gaussian(),
            3.0,
            &QuadratureSpec::default(),
        )
        .unwrap();
        let exact = (2.0 * PI).sqrt() * (-4.5f64).exp();
        assert!(
            (est.value.re - exact).abs() < 1e-14,
            "{} vs {exact}",
            est.value.re
        );
        assert!((est.value.re - 0.027_846_124_825_536_07).abs() < 1e-12);
        assert!((est.value.re - 0.0278469).abs() < 1e-6);
    }

    #[test]
    fn quartic_integral_at_origin() {
        // Γ(1/4)/√2, from the substitution u = λ⁴/4
        let exact = 3.625_609_908_221_908_3 / 2f64.sqrt();
        let est = oscillatory_integral(
            &Polynomial::one(),
            &quartic(),
            0.0,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((est.value.re - exact).abs() < 1e-13);
        assert!((est.value.re - 2.563_693_352_040_847_6).abs() < 1e-12);
        assert!((est.value.re - 2.5636887).abs() < 1e-5);
    }

    #[test]
    fn node_budget_overflow_carries_estimate() {
        let spec = QuadratureSpec {
            max_nodes: 64,
            ..QuadratureSpec::default()
        };
        match oscillatory_integral(&Polynomial::one(), &gaussian(), 200.0, &spec) {
            Err(Error::Accuracy { nodes, .. }) => assert_eq!(nodes, 64),
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_spec_is_rejected() {
        let bad = QuadratureSpec {
            node_density: 1.0,
            ..QuadratureSpec::default()
        };
        assert!(bad.validate().is_err());
        assert!(QuadratureSpec::default()
            .with_tolerance(0.0)
            .validate()
            .is_err());
    }
}
