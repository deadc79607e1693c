//! Dormand–Prince 5(4) embedded Runge–Kutta pair with adaptive step control.
//!
//! Integration proceeds segment by segment so that callers can land exactly on
//! an output grid; the step size carries over between segments.

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Steps shorter than this (relative to `|t|`) count as underflow.
    pub min_step: f64,
    pub max_step: f64,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Dopri5 {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 1_000_000,
            min_step: 1e-14,
            max_step: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    StepUnderflow,
    TooManySteps,
    NonFinite,
    /// The caller's guard rejected an accepted state.
    Guard,
}

/// Where and why integration stopped. `y` is the last accepted state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Failure<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub kind: FailureKind,
}

impl Dopri5 {
    pub fn with_max_step(mut self, max_step: f64) -> Self {
        self.max_step = max_step;
        self
    }

    pub fn new(rtol: f64, atol: f64) -> Self {
        Dopri5 {
            rtol,
            atol,
            ..Self::default()
        }
    }

    /// Integrates from `t0` to exactly `t1` (either direction).
    ///
    /// `step` holds the step magnitude to try first and is updated with the
    /// last proposed step; pass `0.0` to let the integrator choose.
    pub fn advance<F, G, const N: usize>(
        &self,
        rhs: &mut F,
        guard: &mut G,
        t0: f64,
        y0: [f64; N],
        t1: f64,
        step: &mut f64,
    ) -> Result<[f64; N], Failure<N>>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
        G: FnMut(f64, &[f64; N]) -> bool,
    {
        let span = t1 - t0;
        if span == 0.0 {
            return Ok(y0);
        }
        let dir = span.signum();
        let mut h = if *step > 0.0 {
            *step
        } else {
            (1e-3 * span.abs()).max(1e-6)
        };
        h = h.min(self.max_step);
        let mut t = t0;
        let mut y = y0;
        let fail = |t: f64, y: [f64; N], kind| Err(Failure { t, y, kind });

        for _ in 0..self.max_steps {
            let remaining = (t1 - t).abs();
            if remaining <= 1e-15 * t1.abs().max(1.0) {
                return Ok(y);
            }
            let last = h >= remaining;
            let h_try = if last { remaining } else { h };
            let (y_new, err) = self.trial(rhs, t, &y, dir * h_try);
            let finite = y_new.iter().all(|v| v.is_finite()) && err.is_finite();

            if finite && err <= 1.0 {
                let t_new = if last { t1 } else { t + dir * h_try };
                if !guard(t_new, &y_new) {
                    return fail(t_new, y_new, FailureKind::Guard);
                }
                t = t_new;
                y = y_new;
                let grow = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                // keep a proposal even when this step was clipped to the segment end
                h = if last {
                    h.max(h_try * grow)
                } else {
                    h_try * grow
                }
                .min(self.max_step);
                *step = h;
                if last {
                    return Ok(y);
                }
            } else {
                let shrink = if finite {
                    (0.9 * err.powf(-0.2)).clamp(0.1, 0.5)
                } else {
                    0.25
                };
                h = h_try * shrink;
                if h < self.min_step * t.abs().max(1.0) {
                    let kind = if finite {
                        FailureKind::StepUnderflow
                    } else {
                        FailureKind::NonFinite
                    };
                    return fail(t, y, kind);
                }
            }
        }
        fail(t, y, FailureKind::TooManySteps)
    }

    /// One Dormand–Prince step; returns the fifth-order state and the scaled error norm.
    fn trial<F, const N: usize>(&self, rhs: &mut F, t: f64, y: &[f64; N], h: f64) -> ([f64; N], f64)
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let combine = |coeffs: &[(f64, &[f64; N])]| {
            let mut out = *y;
            for (c, k) in coeffs {
                for i in 0..N {
                    out[i] += h * c * k[i];
                }
            }
            out
        };
        let k1 = rhs(t, y);
        let k2 = rhs(t + C2 * h, &combine(&[(A21, &k1)]));
        let k3 = rhs(t + C3 * h, &combine(&[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(t + C4 * h, &combine(&[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(
            t + C5 * h,
            &combine(&[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            t + h,
            &combine(&[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = combine(&[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = rhs(t + h, &y_new);

        let mut sum = 0.0;
        for i in 0..N {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
            sum += (e / scale).powi(2);
        }
        (y_new, (sum / N as f64).sqrt())
    }
}
