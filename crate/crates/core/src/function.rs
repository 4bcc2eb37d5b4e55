use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;

/// A complex function that can be evaluated pointwise: a parsed expression,
/// a quadrature-backed interpolant, or a native special function.
pub trait ComplexFunction: Send + Sync {
    fn eval(&self, z: Complex64) -> Result<Complex64>;

    /// `log|f(z)|`; `-inf` at zeros. Implementations that can avoid overflow
    /// by working in the log domain should override this.
    fn log_abs(&self, z: Complex64) -> Result<f64> {
        Ok(self.eval(z)?.norm().ln())
    }

    /// True only when the function is known to be entire.
    fn is_entire(&self) -> bool {
        false
    }

    /// Known isolated singularities. Empty does not imply entire.
    fn poles(&self) -> Vec<Complex64> {
        Vec::new()
    }

    /// Known branch cut rays.
    fn cut_rays(&self) -> Vec<CutRay> {
        Vec::new()
    }

    fn describe(&self) -> String;
}

/// A ray `{origin + t e^{i angle} : t >= 0}` along which a function is
/// discontinuous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutRay {
    pub origin: Complex64,
    pub angle: f64,
}

pub type SharedFunction = Arc<dyn ComplexFunction>;

/// Adapter turning a closure into a [`ComplexFunction`].
pub struct FnFunction<F> {
    f: F,
    entire: bool,
    label: String,
}

impl<F> FnFunction<F>
where
    F: Fn(Complex64) -> Result<Complex64> + Send + Sync,
{
    pub fn new(label: impl Into<String>, f: F) -> Self {
        FnFunction {
            f,
            entire: false,
            label: label.into(),
        }
    }

    pub fn entire(mut self) -> Self {
        self.entire = true;
        self
    }
}

impl<F> ComplexFunction for FnFunction<F>
where
    F: Fn(Complex64) -> Result<Complex64> + Send + Sync,
{
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        (self.f)(z)
    }

    fn is_entire(&self) -> bool {
        self.entire
    }

    fn describe(&self) -> String {
        self.label.clone()
    }
}

impl fmt::Debug for dyn ComplexFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexFunction({})", self.describe())
    }
}
