//! Analytic continuation of power series through coefficient interpolants.
//!
//! A series `sum a_n z^n` whose coefficients are the values `phi(n)` of a
//! function of exponential type is continued to `C \ [1, inf)` by
//! integrating `phi(zeta) z^zeta / (e^{2 pi i zeta} - 1)` along the boundary
//! of a truncated sector. Conversely, [`interpolant`] builds such a `phi`
//! from a function decaying along a ray, and [`growth`] estimates the growth
//! functionals that govern both directions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod branches;
pub mod catalog;
pub mod continuation;
pub mod contours;
pub mod error;
pub mod expr;
pub mod function;
pub mod growth;
pub mod interpolant;
pub mod kernel;
pub mod quadrature;

pub use catalog::{builtin_registry, lookup, Dilog, ExampleEntry};
pub use continuation::{continue_at, tail_integral, verify_invariants, Continued, ContinuationConfig, SeriesSpec};
pub use error::{Error, Result};
pub use expr::{parse_expr, FunctionExpr};
pub use function::{ComplexFunction, CutRay, FnFunction, SharedFunction};
pub use growth::{exp_type, indicator, inner_exp_type, order_estimate, GrowthReport, RadialSchedule, Spacing};
pub use interpolant::{phi_deformed, phi_interpolant, DecayCertificate, InterpolantConfig, NumericInterpolant};
pub use kernel::KernelBoundConstants;
pub use num_complex::Complex64;
