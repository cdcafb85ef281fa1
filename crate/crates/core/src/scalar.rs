//! Numeric scalar abstraction.
//!
//! All distances, task costs and work-function values are carried in a
//! [`Scalar`]. The trait is implemented for `f32` and `f64`; `f64` is the
//! type used by the instance format and the CLI.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type usable as a distance / cost.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Absolute tolerance used by metric-axiom and Lipschitz checks.
    const TOLERANCE: Self;

    /// Lossy conversion from `f64`; used for literal constants.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("f64 is representable in every Scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const TOLERANCE: Self = 1e-9;
}

impl Scalar for f32 {
    // f32 carries ~7 significant digits; 1e-9 would be below its resolution
    // for any fixture scale above 1e-2.
    const TOLERANCE: Self = 1e-4;
}

/// Returns `a <= b` within the scalar tolerance.
pub(crate) fn le_tol<T: Scalar>(a: T, b: T) -> bool {
    a <= b + T::TOLERANCE
}
