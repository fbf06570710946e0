//! Scalar abstraction shared by every simulation module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar the simulations are generic over: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Widens a scalar to `f64` for error reporting.
#[inline]
pub fn wide<F: Real>(x: F) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// A tolerance stated for double precision, floored at a small multiple of
/// the scalar's machine epsilon so single precision stays usable.
#[inline]
pub fn tol<F: Real>(x: f64) -> F {
    lit::<F>(x).max(F::epsilon() * lit(64.0))
}

/// Tolerances used across the crate, stated for `f64`.
pub mod tolerance {
    /// Allowed deviation of a phase factor's modulus from 1.
    pub const UNIT_MODULUS: f64 = 1e-9;
    /// Beam-splitter normalization `alpha^2 + beta^2 = 1`.
    pub const SPLIT_NORMALIZATION: f64 = 1e-12;
    /// Minimum modulus of `1 - beta^2 U^2` (and `2 - U^2`) before it counts as a pole.
    pub const POLE: f64 = 1e-12;
    /// Width of the marginal band around `beta |U| = 1`.
    pub const MARGINAL: f64 = 1e-12;
    /// Relative uniformity of a trajectory's time grid.
    pub const GRID_UNIFORMITY: f64 = 1e-12;
    /// Register normalization.
    pub const REGISTER_NORM: f64 = 1e-10;
    /// Equal-duration precondition for the gauge phase shift.
    pub const EQUAL_DURATION: f64 = 1e-12;
}
