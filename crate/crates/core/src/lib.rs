//! Moving zero boundaries of heat-evolved Airy-type kernels.
//!
//! The central object is the Gaussian-damped Pearcey-type integral
//!
//! ```text
//!   v(t, x) = (1/2π) ∫ exp(iλx − λ²t/2 − λ⁴/4) dλ
//! ```
//!
//! which solves `v_t = ½ v_xx` and starts from the order-4 Airy function φ.
//! Each zero ξ of φ spawns a curve `f(t)` with `v(t, f(t)) = 0`; it obeys the
//! Rayleigh-type equation `f″ = 2f′³ − ½tf′ − ¼f` with `f(0) = ξ` and
//! `f′(0) = −φ″(ξ)/(2φ′(ξ))`.
//!
//! Modules, bottom-up:
//!
//! - [`quadrature`]: truncated composite Gauss–Legendre for decaying oscillatory integrals
//! - [`kernels`]: spectral symbols, φ (quadrature and series), Ai/Ai′, zero finding
//! - [`evolve`]: heat-evolved kernels `v(t, x)` and closed-form companions
//! - [`ode`]: embedded Dormand–Prince 5(4) integrator
//! - [`boundary`]: zero-curve tracing (Rayleigh, Abel, closed forms, asymptotics, restarts)
//! - [`verify`]: residual and identity checks

pub mod boundary;
pub mod error;
pub mod evolve;
pub mod kernels;
pub mod ode;
pub mod quadrature;
pub mod verify;

pub use error::{Error, Result};
