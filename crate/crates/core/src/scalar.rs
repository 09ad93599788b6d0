//! Scalar abstraction: everything numerical is generic over the real
//! component type, instantiated at `f64` for the CLI and reports.

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Real scalar backing the complex matrix entries: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum<Self> + Display + Debug + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for tolerances and literals.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to any Real")
    }

    /// Upcast to `f64` for reports and digests (exact for f32/f64).
    fn to64(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum<T>
        + Display
        + Debug
        + Send
        + Sync
        + 'static
{
}

/// Complex scalar over a [`Real`] component type.
pub type C<T> = Complex<T>;

/// Double-precision complex scalar, the default instantiation.
pub type C64 = Complex<f64>;
