//! Zero curves `f(t)` with `v(t, f(t)) = 0`.
//!
//! For the Pearcey-type kernel the curve through a zero ξ of φ solves the
//! Rayleigh-type equation `f″ = 2f′³ − ½tf′ − ¼f` with `f(0) = ξ` and
//! `f′(0) = −φ″(ξ)/(2φ′(ξ))`. Also here: the Abel equation of the evolved Ai′,
//! parabolic closed-form curves, the large-time asymptotic boundary and the
//! restart procedure that re-seeds the ODE from a root of `v(t, ·)`.
//!
//! The Rayleigh equation is unstable forward in time: near the curve a
//! perturbation of the slope grows roughly like `e^{0.75 t²}`. Pure integration
//! is reliable up to `t ≈ 5`; beyond that enable [`TraceOptions::projection`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::{ClosedForm, EvolvedKernel, Kernel};
use crate::kernels::{airy_ai_prime, find_zero_near, phi4_derivative, refine_bracket};
use crate::ode::{Dopri5, Failure, FailureKind};

pub const SLOPE_CAP: f64 = 50.0;
pub const DEFAULT_DT: f64 = 1e-2;
/// Abel integration stops once `|f|` falls below this.
pub const ABEL_SINGULARITY: f64 = 1e-6;
/// A zero counts as double when `|v′| ≤ DOUBLE_ZERO_RATIO·|v″|`.
const DOUBLE_ZERO_RATIO: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayleighState {
    pub t: f64,
    pub f: f64,
    pub f_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub f: f64,
    pub f_prime: f64,
    /// `|v(t, f)|`, filled by the verification pass.
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub projected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }

    pub fn factor(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    /// 1-based index of the seeding zero.
    pub index: usize,
    pub sign: Sign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Rayleigh,
    Abel,
    ClosedForm,
    Asymptotic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTrajectory {
    pub kernel: String,
    pub branch: Branch,
    pub method: Method,
    pub samples: Vec<Sample>,
}

impl BoundaryTrajectory {
    pub fn new(kernel: impl Into<String>, branch: Branch, method: Method) -> Self {
        BoundaryTrajectory {
            kernel: kernel.into(),
            branch,
            method,
            samples: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// The sample whose time is within `tol` of `t`.
    pub fn sample_at(&self, t: f64, tol: f64) -> Option<&Sample> {
        self.samples.iter().find(|s| (s.t - t).abs() <= tol)
    }

    /// Mirror image `f ↦ −f`, the partner branch of an even kernel.
    pub fn mirrored(&self) -> Self {
        let mut out = self.clone();
        out.branch.sign = match self.branch.sign {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        };
        for s in &mut out.samples {
            s.f = -s.f;
            s.f_prime = -s.f_prime;
        }
        out
    }

    fn push(&mut self, t: f64, f: f64, f_prime: f64, projected: bool) {
        self.samples.push(Sample {
            t,
            f,
            f_prime,
            residual: None,
            projected,
        });
    }
}

/// Re-projection of the traced state onto the zero set of `v(t, ·)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    /// Project every `every` output samples.
    pub every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    pub rtol: f64,
    pub atol: f64,
    pub dt: f64,
    pub slope_cap: f64,
    /// Longest integrator step, independent of the output grid.
    pub max_step: f64,
    pub projection: Option<Projection>,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            rtol: 1e-10,
            atol: 1e-12,
            dt: DEFAULT_DT,
            slope_cap: SLOPE_CAP,
            max_step: 1e-2,
            projection: None,
        }
    }
}

impl TraceOptions {
    pub fn with_projection(mut self, every: usize) -> Self {
        self.projection = Some(Projection {
            every: every.max(1),
        });
        self
    }

    pub fn with_tolerances(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Domain(format!(
                "output step must be positive, got {}",
                self.dt
            )));
        }
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::Domain(
                "integrator tolerances must be positive".into(),
            ));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::Domain("maximum step must be positive".into()));
        }
        if !(self.slope_cap > 0.0) {
            return Err(Error::Domain("slope cap must be positive".into()));
        }
        Ok(())
    }

    fn solver(&self) -> Dopri5 {
        Dopri5::new(self.rtol, self.atol).with_max_step(self.max_step)
    }
}

/// `f″ = 2f′³ − ½ t f′ − ¼ f`.
pub fn rayleigh_rhs(s: RayleighState) -> f64 {
    2.0 * s.f_prime.powi(3) - 0.5 * s.t * s.f_prime - 0.25 * s.f
}

/// `f′ = −(1 + t f) / (2f)`.
pub fn abel_rhs(t: f64, f: f64) -> f64 {
    -(1.0 + t * f) / (2.0 * f)
}

fn slope_ratio(t: f64, x: f64, d1: f64, d2: f64) -> Result<f64> {
    if d1 == 0.0 || d1.abs() <= DOUBLE_ZERO_RATIO * d2.abs() || !d1.is_finite() {
        return Err(Error::DoubleZero {
            t,
            x,
            derivative: d1,
        });
    }
    Ok(-d2 / (2.0 * d1))
}

/// `f′(0) = −φ″(ξ) / (2φ′(ξ))` at a zero ξ of φ.
pub fn initial_slope(xi: f64) -> Result<f64> {
    slope_ratio(0.0, xi, phi4_derivative(xi, 1)?, phi4_derivative(xi, 2)?)
}

/// `f′ = −½ v″/v′` at a point of the zero curve.
pub fn slope_from_v(t: f64, f: f64, kernel: &dyn Kernel) -> Result<f64> {
    slope_ratio(
        t,
        f,
        kernel.v_derivative(t, f, 1)?,
        kernel.v_derivative(t, f, 2)?,
    )
}

/// Root of `v(t, ·)` near `x0`: Newton with a bracketing fallback.
pub fn project_to_zero(t: f64, x0: f64, kernel: &dyn Kernel) -> Result<f64> {
    let mut x = x0;
    for _ in 0..12 {
        let v = kernel.v(t, x)?;
        let d = kernel.v_derivative(t, x, 1)?;
        if v == 0.0 {
            return Ok(x);
        }
        let step = v / d;
        if !step.is_finite() || step.abs() > 0.25 {
            break;
        }
        x -= step;
        if step.abs() <= 1e-14 * (1.0 + x.abs()) {
            return Ok(x);
        }
    }
    find_zero_near(|y| kernel.v(t, y), x0, 1.0, 1e-13)
}

fn output_grid(t0: f64, t1: f64, dt: f64) -> Vec<f64> {
    let n = ((t1 - t0) / dt).round() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|k| t0 + k as f64 * dt).collect();
    let last = grid.last().copied().unwrap_or(t0);
    if (last - t1).abs() <= 1e-9 * dt {
        *grid.last_mut().unwrap() = t1;
    } else if last < t1 {
        grid.push(t1);
    } else {
        grid.pop();
        grid.push(t1);
    }
    grid
}

/// Integrates the Rayleigh equation through `grid` (monotone, either direction)
/// from `start`, appending a sample per grid point after the first.
fn integrate_rayleigh(
    start: RayleighState,
    grid: &[f64],
    kernel: &dyn Kernel,
    opts: &TraceOptions,
    traj: &mut BoundaryTrajectory,
) -> Result<()> {
    let solver = opts.solver();
    let cap = opts.slope_cap;
    let mut rhs = |t: f64, y: &[f64; 2]| {
        [
            y[1],
            rayleigh_rhs(RayleighState {
                t,
                f: y[0],
                f_prime: y[1],
            }),
        ]
    };
    let mut guard = |_t: f64, y: &[f64; 2]| y[1].abs() < cap;
    let mut y = [start.f, start.f_prime];
    let mut h = 0.0;
    for (k, w) in grid.windows(2).enumerate() {
        match solver.advance(&mut rhs, &mut guard, w[0], y, w[1], &mut h) {
            Ok(next) => y = next,
            Err(failure) => return Err(blow_up(failure, cap, traj)),
        }
        let mut projected = false;
        if let Some(p) = opts.projection {
            if (k + 1) % p.every == 0 {
                y[0] = project_to_zero(w[1], y[0], kernel)?;
                y[1] = slope_from_v(w[1], y[0], kernel)?;
                projected = true;
            }
        }
        traj.push(w[1], y[0], y[1], projected);
    }
    Ok(())
}

fn blow_up(failure: Failure<2>, cap: f64, traj: &BoundaryTrajectory) -> Error {
    let reason = match failure.kind {
        FailureKind::Guard => format!(
            "|f′| exceeded the slope cap {cap} (f′ = {:e})",
            failure.y[1]
        ),
        FailureKind::StepUnderflow => "integrator step underflow".to_string(),
        FailureKind::TooManySteps => "integrator step budget exhausted".to_string(),
        FailureKind::NonFinite => "non-finite state".to_string(),
    };
    Error::BlowUp {
        t: failure.t,
        reason,
        partial: Box::new(traj.clone()),
    }
}

/// Zero curve of the Pearcey-type kernel through the zero `xi` of φ on `[0, t_end]`.
pub fn trace_rayleigh(xi: f64, t_end: f64, opts: &TraceOptions) -> Result<BoundaryTrajectory> {
    trace_rayleigh_with(
        &EvolvedKernel::pearcey(),
        xi,
        initial_slope(xi)?,
        t_end,
        opts,
    )
}

/// As [`trace_rayleigh`] with an explicit kernel (used for projection) and initial slope.
pub fn trace_rayleigh_with(
    kernel: &dyn Kernel,
    xi: f64,
    slope: f64,
    t_end: f64,
    opts: &TraceOptions,
) -> Result<BoundaryTrajectory> {
    opts.validate()?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Domain(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    if !(xi.is_finite() && slope.is_finite()) {
        return Err(Error::Domain(format!(
            "non-finite seed (ξ={xi}, f′={slope})"
        )));
    }
    let branch = Branch {
        index: 1,
        sign: Sign::of(xi),
    };
    let mut traj = BoundaryTrajectory::new(kernel.name(), branch, Method::Rayleigh);
    traj.push(0.0, xi, slope, false);
    let grid = output_grid(0.0, t_end, opts.dt);
    let start = RayleighState {
        t: 0.0,
        f: xi,
        f_prime: slope,
    };
    integrate_rayleigh(start, &grid, kernel, opts, &mut traj)?;
    Ok(traj)
}

/// Large-time boundary `−2(t/3)^{3/2} + ξ (3t)^{1/6}` for a zero ξ of Ai.
pub fn asymptotic_boundary(t: f64, xi_ai: f64) -> f64 {
    -2.0 * (t / 3.0).powf(1.5) + xi_ai * (3.0 * t).powf(1.0 / 6.0)
}

/// The mirror image `2(t/3)^{3/2} − ξ (3t)^{1/6}`, followed by curves starting at positive zeros of φ.
pub fn positive_asymptotic_boundary(t: f64, xi_ai: f64) -> f64 {
    -asymptotic_boundary(t, xi_ai)
}

fn asymptotic_slope(t: f64, xi_ai: f64) -> f64 {
    if t == 0.0 {
        return f64::NAN;
    }
    -(t / 3.0).sqrt() + xi_ai * 0.5 * (3.0 * t).powf(-5.0 / 6.0)
}

/// The asymptotic boundary sampled on `[t0, t1]`.
pub fn asymptotic_trajectory(
    xi_ai: f64,
    t0: f64,
    t1: f64,
    dt: f64,
    sign: Sign,
) -> Result<BoundaryTrajectory> {
    if !(t0 >= 0.0 && t1 > t0 && dt > 0.0) {
        return Err(Error::Domain(format!(
            "bad asymptotic range [{t0}, {t1}] with step {dt}"
        )));
    }
    let s = sign.factor();
    let mut traj =
        BoundaryTrajectory::new("asymptotic", Branch { index: 1, sign }, Method::Asymptotic);
    for t in output_grid(t0, t1, dt) {
        traj.push(
            t,
            -s * asymptotic_boundary(t, xi_ai),
            -s * asymptotic_slope(t, xi_ai),
            false,
        );
    }
    Ok(traj)
}

/// Re-seeds the Rayleigh equation at time `t` from the root of `v(t, ·)` nearest
/// the positive-branch asymptotic boundary and integrates over `[t − ε, t + ε]`.
pub fn restart_at(
    t: f64,
    xi_ai: f64,
    epsilon: f64,
    kernel: &dyn Kernel,
    opts: &TraceOptions,
) -> Result<BoundaryTrajectory> {
    opts.validate()?;
    if !(epsilon > 0.0 && t - epsilon > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!(
            "restart window [{}, {}] must lie in t > 0",
            t - epsilon,
            t + epsilon
        )));
    }
    let seed = positive_asymptotic_boundary(t, xi_ai);
    let radius = (3.0 * t).powf(1.0 / 6.0).max(1.0);
    let f = find_zero_near(|x| kernel.v(t, x), seed, radius, 1e-13)?;
    let f_prime = slope_from_v(t, f, kernel)?;
    let center = RayleighState { t, f, f_prime };

    let grid = output_grid(t - epsilon, t + epsilon, opts.dt);
    let split = grid
        .iter()
        .position(|&g| g >= t - 1e-9 * opts.dt)
        .unwrap_or(grid.len() - 1);
    let branch = Branch {
        index: 1,
        sign: Sign::of(f),
    };

    // backward half: t, then grid points below t in descending order
    let mut back = BoundaryTrajectory::new(kernel.name(), branch, Method::Rayleigh);
    let mut back_grid = vec![t];
    back_grid.extend(grid[..split].iter().rev().copied());
    if let Err(e) = integrate_rayleigh(center, &back_grid, kernel, opts, &mut back) {
        return Err(reorder_partial(e, |p| p.samples.reverse()));
    }

    let mut traj = BoundaryTrajectory::new(kernel.name(), branch, Method::Rayleigh);
    traj.samples = back.samples.into_iter().rev().collect();
    let on_grid = (grid[split] - t).abs() <= 1e-9 * opts.dt;
    let fwd_start = if on_grid { split + 1 } else { split };
    if on_grid {
        traj.push(grid[split], f, f_prime, true);
    }
    let mut fwd_grid = vec![t];
    fwd_grid.extend(grid[fwd_start..].iter().copied());
    integrate_rayleigh(center, &fwd_grid, kernel, opts, &mut traj)?;
    Ok(traj)
}

fn reorder_partial(err: Error, fix: impl FnOnce(&mut BoundaryTrajectory)) -> Error {
    match err {
        Error::BlowUp {
            t,
            reason,
            mut partial,
        } => {
            fix(&mut partial);
            Error::BlowUp { t, reason, partial }
        }
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbelOptions {
    pub rtol: f64,
    pub atol: f64,
    pub dt: f64,
    /// Snap a seed lying within this distance of a zero of Ai′ onto that zero.
    pub polish_radius: f64,
}

impl Default for AbelOptions {
    fn default() -> Self {
        AbelOptions {
            rtol: 1e-12,
            atol: 1e-14,
            dt: DEFAULT_DT,
            polish_radius: 1e-3,
        }
    }
}

/// Zero curve of the evolved Ai′: `2 f f′ + 1 + t f = 0`, `f(0) = f0`.
///
/// Seeds are usually quoted to a few digits, which leaves an O(1e−6) defect in
/// the implicit identity `½t·Ai(t²/4 + f) + Ai′(t²/4 + f) = 0`; when `f0` lies
/// within `polish_radius` of a zero of Ai′ it is replaced by that zero.
pub fn trace_abel(f0: f64, t_end: f64, opts: &AbelOptions) -> Result<BoundaryTrajectory> {
    if !(f0.is_finite() && f0.abs() >= ABEL_SINGULARITY) {
        return Err(Error::Domain(format!(
            "Abel seed must be finite and non-zero, got {f0}"
        )));
    }
    if !(t_end > 0.0 && opts.dt > 0.0) {
        return Err(Error::Domain(format!(
            "t_end and dt must be positive (t_end={t_end}, dt={})",
            opts.dt
        )));
    }
    let start = polish_abel_seed(f0, opts.polish_radius);
    let branch = Branch {
        index: 1,
        sign: Sign::of(start),
    };
    let mut traj = BoundaryTrajectory::new(ClosedForm::AiryPrime.name(), branch, Method::Abel);
    traj.push(0.0, start, abel_rhs(0.0, start), false);

    let solver = Dopri5::new(opts.rtol, opts.atol);
    let mut rhs = |t: f64, y: &[f64; 1]| [abel_rhs(t, y[0])];
    let mut guard = |_t: f64, y: &[f64; 1]| y[0].abs() >= ABEL_SINGULARITY;
    let mut y = [start];
    let mut h = 0.0;
    for w in output_grid(0.0, t_end, opts.dt).windows(2) {
        match solver.advance(&mut rhs, &mut guard, w[0], y, w[1], &mut h) {
            Ok(next) => y = next,
            Err(failure) => {
                return Err(Error::Singularity {
                    t: failure.t,
                    f: failure.y[0],
                    partial: Box::new(traj),
                })
            }
        }
        traj.push(w[1], y[0], abel_rhs(w[1], y[0]), false);
    }
    Ok(traj)
}

fn polish_abel_seed(f0: f64, radius: f64) -> f64 {
    if radius <= 0.0 {
        return f0;
    }
    let mut target = |x: f64| Ok(airy_ai_prime(x));
    refine_bracket(&mut target, f0 - radius, f0 + radius, 1e-15).unwrap_or(f0)
}

/// `½ t Ai(t²/4 + f) + Ai′(t²/4 + f)`, which vanishes on the Abel curve.
pub fn abel_implicit_residual(t: f64, f: f64) -> f64 {
    let (ai, aip) = crate::kernels::airy_pair(0.25 * t * t + f);
    0.5 * t * ai + aip
}

/// Zero curves known in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClosedBoundary {
    /// `C − t²/4`, zero curve of the evolved Ai when `C` is a zero of Ai.
    Airy3 { c: f64 },
    /// `C − t/2 − t²/4` for the shifted cubic kernel.
    Shifted { c: f64 },
    /// `±½√(4 − t²)` for the Hermite–Gauss kernel, `t ≤ 2`.
    Hermite { sign: Sign },
    /// `−b t` for the linear-boundary kernel.
    Linear { slope: f64 },
}

impl ClosedBoundary {
    pub fn kernel(&self) -> ClosedForm {
        match *self {
            ClosedBoundary::Airy3 { .. } => ClosedForm::Airy3,
            ClosedBoundary::Shifted { .. } => ClosedForm::ShiftedCubic,
            ClosedBoundary::Hermite { .. } => ClosedForm::Hermite,
            ClosedBoundary::Linear { slope } => ClosedForm::Linear { slope },
        }
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        closed_form_boundary(*self, t)
    }

    pub fn slope(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(match *self {
            ClosedBoundary::Airy3 { .. } => -0.5 * t,
            ClosedBoundary::Shifted { .. } => -0.5 - 0.5 * t,
            ClosedBoundary::Hermite { sign } => {
                let r = (4.0 - t * t).sqrt();
                if r == 0.0 {
                    sign.factor() * f64::NEG_INFINITY
                } else {
                    -sign.factor() * 0.5 * t / r
                }
            }
            ClosedBoundary::Linear { slope } => -slope,
        })
    }

    fn check(&self, t: f64) -> Result<()> {
        let ok = match self {
            ClosedBoundary::Hermite { .. } => (0.0..=2.0).contains(&t),
            ClosedBoundary::Linear { .. } => t > 0.0 && t.is_finite(),
            _ => t >= 0.0 && t.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "t={t} outside the domain of the {self:?} boundary"
            )))
        }
    }
}

pub fn closed_form_boundary(kind: ClosedBoundary, t: f64) -> Result<f64> {
    kind.check(t)?;
    Ok(match kind {
        ClosedBoundary::Airy3 { c } => c - 0.25 * t * t,
        ClosedBoundary::Shifted { c } => c - 0.5 * t - 0.25 * t * t,
        ClosedBoundary::Hermite { sign } => sign.factor() * 0.5 * (4.0 - t * t).max(0.0).sqrt(),
        ClosedBoundary::Linear { slope } => -slope * t,
    })
}

/// A closed-form curve sampled on `[t0, t1]`.
pub fn closed_form_trajectory(
    kind: ClosedBoundary,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<BoundaryTrajectory> {
    if !(t1 > t0 && dt > 0.0) {
        return Err(Error::Domain(format!(
            "bad range [{t0}, {t1}] with step {dt}"
        )));
    }
    let sign = match kind {
        ClosedBoundary::Hermite { sign } => sign,
        _ => Sign::of(closed_form_boundary(kind, t0)?),
    };
    let mut traj = BoundaryTrajectory::new(
        kind.kernel().name(),
        Branch { index: 1, sign },
        Method::ClosedForm,
    );
    for t in output_grid(t0, t1, dt) {
        traj.push(t, kind.value(t)?, kind.slope(t)?, false);
    }
    Ok(traj)
}
