//! Independent checks of traced boundaries and of the identities behind them.
//!
//! Quadrature-based checks use [`verification_spec`], a node density different
//! from the evaluator default, so that a check never re-runs the exact code
//! path it is meant to test.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{
    abel_implicit_residual, asymptotic_boundary, rayleigh_rhs, BoundaryTrajectory, Method,
    RayleighState,
};
use crate::error::{Error, Result};
use crate::evolve::{hermite_closed_form, EvolvedKernel, Kernel};
use crate::quadrature::QuadratureSpec;

/// Finite-difference steps for the heat-equation check, in t and x.
pub const HEAT_STEPS: (f64, f64) = (1e-4, 1e-3);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub check: String,
    pub grid: String,
    pub max_abs: f64,
    pub mean_abs: f64,
    /// `(t, x)` where `max_abs` is attained.
    pub worst_point: (f64, f64),
    pub tolerance: f64,
    pub pass: bool,
    /// Evaluation failures, which count as infinite residuals.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

impl ResidualReport {
    /// Summarizes `(t, x, residual)` triples; `Err` entries fail the report.
    pub fn from_points(
        check: impl Into<String>,
        grid: impl Into<String>,
        tolerance: f64,
        points: Vec<(f64, f64, Result<f64>)>,
    ) -> Self {
        let mut max_abs: f64 = 0.0;
        let mut sum = 0.0;
        let mut worst_point = (f64::NAN, f64::NAN);
        let mut errors = Vec::new();
        let count = points.len();
        for (t, x, r) in points {
            let r = match r {
                Ok(r) => r.abs(),
                Err(e) => {
                    errors.push(format!("(t={t}, x={x}): {e}"));
                    f64::INFINITY
                }
            };
            let r = if r.is_nan() { f64::INFINITY } else { r };
            sum += r;
            if r > max_abs || worst_point.0.is_nan() {
                max_abs = max_abs.max(r);
                worst_point = (t, x);
            }
        }
        let mean_abs = if count == 0 { 0.0 } else { sum / count as f64 };
        ResidualReport {
            check: check.into(),
            grid: grid.into(),
            max_abs,
            mean_abs: mean_abs.min(max_abs),
            worst_point,
            tolerance,
            pass: count > 0 && errors.is_empty() && max_abs <= tolerance,
            errors,
        }
    }
}

/// Quadrature settings for verification: denser nodes than the evaluator default.
pub fn verification_spec() -> QuadratureSpec {
    QuadratureSpec::default().with_density(12.0)
}

/// `|v(t, f(t))|` at every sample; fills the trajectory's residual column.
pub fn check_zero_residual(
    traj: &mut BoundaryTrajectory,
    kernel: &dyn Kernel,
    tol: f64,
) -> ResidualReport {
    let values: Vec<Result<f64>> = traj
        .samples
        .par_iter()
        .map(|s| kernel.v(s.t, s.f).map(f64::abs))
        .collect();
    let mut points = Vec::with_capacity(values.len());
    for (s, r) in traj.samples.iter_mut().zip(values) {
        s.residual = r.as_ref().ok().copied();
        points.push((s.t, s.f, r));
    }
    ResidualReport::from_points(
        "zero-residual",
        format!(
            "{} samples of the {} {:?} trajectory",
            traj.len(),
            traj.kernel,
            traj.method
        ),
        tol,
        points,
    )
}

/// Residuals of `v‴ = x v + t v′` and `v⁗ = v + x v′ + t v″` for the
/// Pearcey-type kernel, each derivative from its own moment quadrature.
pub fn check_airy4_identities(t: f64, x: f64) -> Result<(f64, f64)> {
    let kernel = EvolvedKernel::pearcey().with_spec(verification_spec());
    let d: Vec<f64> = (0..=4)
        .map(|n| kernel.v_derivative(t, x, n))
        .collect::<Result<_>>()?;
    let first = d[3] - x * d[0] - t * d[1];
    let second = d[4] - d[0] - x * d[1] - t * d[2];
    Ok((first.abs(), second.abs()))
}

/// [`check_airy4_identities`] over a grid; both residuals share the report.
pub fn airy4_identity_report(ts: &[f64], xs: &[f64], tol: f64) -> ResidualReport {
    let grid: Vec<(f64, f64)> = ts
        .iter()
        .flat_map(|&t| xs.iter().map(move |&x| (t, x)))
        .collect();
    let points = grid
        .par_iter()
        .map(|&(t, x)| (t, x, check_airy4_identities(t, x).map(|(a, b)| a.max(b))))
        .collect();
    ResidualReport::from_points(
        "airy4-identities",
        format!("t in {ts:?} x in {xs:?}"),
        tol,
        points,
    )
}

/// Along the trajectory: `f′v′ + ½v″` and, for Rayleigh traces,
/// `f″v′ + f′(f′v″ + v‴) + ¼v⁗` with `f″` from the Rayleigh equation.
pub fn check_hit_identities(
    traj: &BoundaryTrajectory,
    kernel: &dyn Kernel,
    tol: f64,
) -> ResidualReport {
    let second = traj.method == Method::Rayleigh;
    let points = traj
        .samples
        .par_iter()
        .map(|s| {
            let r = (|| {
                let max_order = if second { 4 } else { 2 };
                let d: Vec<f64> = (1..=max_order)
                    .map(|n| kernel.v_derivative(s.t, s.f, n))
                    .collect::<Result<_>>()?;
                let first = s.f_prime * d[0] + 0.5 * d[1];
                if !second {
                    return Ok(first.abs());
                }
                let f2 = rayleigh_rhs(RayleighState {
                    t: s.t,
                    f: s.f,
                    f_prime: s.f_prime,
                });
                let hit2 = f2 * d[0] + s.f_prime * (s.f_prime * d[1] + d[2]) + 0.25 * d[3];
                Ok(first.abs().max(hit2.abs()))
            })();
            (s.t, s.f, r)
        })
        .collect();
    let which = if second {
        "both identities"
    } else {
        "first identity"
    };
    ResidualReport::from_points(
        "hit-identities",
        format!(
            "{which} at {} samples of the {} trajectory",
            traj.len(),
            traj.kernel
        ),
        tol,
        points,
    )
}

/// `½t·Ai(t²/4 + f) + Ai′(t²/4 + f)` along an Abel trajectory.
pub fn check_abel_identity(traj: &BoundaryTrajectory, tol: f64) -> ResidualReport {
    let points = traj
        .samples
        .iter()
        .map(|s| (s.t, s.f, Ok(abel_implicit_residual(s.t, s.f))))
        .collect();
    ResidualReport::from_points(
        "abel-implicit-identity",
        format!("{} samples of the Abel trajectory", traj.len()),
        tol,
        points,
    )
}

/// `|v_t − ½v_xx|` by central differences, and the local scale it is measured against.
pub fn heat_residual(kernel: &dyn Kernel, t: f64, x: f64) -> Result<(f64, f64)> {
    let (ht, hx) = HEAT_STEPS;
    if t - ht <= 0.0 {
        return Err(Error::Domain(format!("heat check needs t > {ht}, got {t}")));
    }
    let v = kernel.v(t, x)?;
    let v_t = (kernel.v(t + ht, x)? - kernel.v(t - ht, x)?) / (2.0 * ht);
    let v_xx = (kernel.v(t, x + hx)? - 2.0 * v + kernel.v(t, x - hx)?) / (hx * hx);
    let v_x = kernel.v_derivative(t, x, 1)?;
    let scale = v
        .abs()
        .max(v_x.abs())
        .max(v_xx.abs())
        .max(f64::MIN_POSITIVE);
    Ok(((v_t - 0.5 * v_xx).abs(), scale))
}

/// Relative heat residual `|v_t − ½v_xx| / scale` over a grid.
pub fn heat_report(kernel: &dyn Kernel, ts: &[f64], xs: &[f64], tol: f64) -> ResidualReport {
    let grid: Vec<(f64, f64)> = ts
        .iter()
        .flat_map(|&t| xs.iter().map(move |&x| (t, x)))
        .collect();
    let points = grid
        .par_iter()
        .map(|&(t, x)| (t, x, heat_residual(kernel, t, x).map(|(r, s)| r / s)))
        .collect();
    ResidualReport::from_points(
        format!("heat-equation:{}", kernel.name()),
        format!("t in {ts:?} x in {xs:?}, relative to local scale"),
        tol,
        points,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledValue {
    pub t: f64,
    pub value: f64,
}

/// `(3t)^{1/6} e^{t²/12 − ξ t^{2/3}/3^{1/3}} v(t, −2(t/3)^{3/2} + ξ(3t)^{1/6})`,
/// which tends to `Ai(ξ)` as `t → ∞`.
pub fn check_scaled_limit(xi: f64, ts: &[f64]) -> Result<Vec<ScaledValue>> {
    if ts.iter().any(|&t| !(t > 0.0)) || ts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(format!(
            "times must be positive and increasing, got {ts:?}"
        )));
    }
    ts.par_iter()
        .map(|&t| {
            let log_scale = t * t / 12.0 - xi * t.powf(2.0 / 3.0) / 3f64.cbrt();
            if log_scale > 700.0 {
                return Err(Error::Range(format!("scaled limit overflows at t={t}")));
            }
            // the prefactor amplifies absolute quadrature error; tighten accordingly
            let spec = verification_spec()
                .with_tolerance((1e-16 * (-t * t / 12.0).exp()).max(f64::MIN_POSITIVE));
            let kernel = EvolvedKernel::pearcey().with_spec(spec);
            let v = kernel.v(t, asymptotic_boundary(t, xi))?;
            Ok(ScaledValue {
                t,
                value: (3.0 * t).powf(1.0 / 6.0) * log_scale.exp() * v,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermiteDiscrepancy {
    /// `±½√(4 − t²)` on `[0, 2]`: expected to pass.
    pub derived: ResidualReport,
    /// `±½√(t² − 4)` on `[2, 4]`, at the stated tolerance: expected to fail.
    pub stated: ResidualReport,
    /// Smallest `|kernel|` on the stated curve for `t ≥ 2.5`.
    pub stated_min_abs: f64,
    pub stated_value_at_3: f64,
}

impl HermiteDiscrepancy {
    /// Derived curve zeroes the kernel and the stated one does not.
    pub fn confirmed(&self) -> bool {
        self.derived.pass && !self.stated.pass && self.stated_min_abs > 1e-3
    }
}

/// Compares the Hermite–Gauss zero curve `±½√(4 − t²)` with the published `±½√(t² − 4)`.
pub fn check_hermite_discrepancy(tol: f64) -> HermiteDiscrepancy {
    let steps = 40;
    let mut derived = Vec::new();
    let mut stated = Vec::new();
    for k in 0..=steps {
        let t = 2.0 * k as f64 / steps as f64;
        let x = 0.5 * (4.0 - t * t).max(0.0).sqrt();
        derived.push((t, x, hermite_closed_form(t, x)));
        derived.push((t, -x, hermite_closed_form(t, -x)));
        let t = 2.0 + t;
        let x = 0.5 * (t * t - 4.0).max(0.0).sqrt();
        stated.push((t, x, hermite_closed_form(t, x)));
    }
    let stated_min_abs = stated
        .iter()
        .filter(|(t, _, _)| *t >= 2.5)
        .filter_map(|(_, _, r)| r.as_ref().ok().map(|v| v.abs()))
        .fold(f64::INFINITY, f64::min);
    let stated_value_at_3 = hermite_closed_form(3.0, 0.5 * 5f64.sqrt()).unwrap_or(f64::NAN);
    HermiteDiscrepancy {
        derived: ResidualReport::from_points(
            "hermite-derived-curve",
            "t in [0, 2], both signs, 41 times",
            tol,
            derived,
        ),
        stated: ResidualReport::from_points(
            "hermite-stated-curve",
            "t in [2, 4], 41 times",
            tol,
            stated,
        ),
        stated_min_abs,
        stated_value_at_3,
    }
}
