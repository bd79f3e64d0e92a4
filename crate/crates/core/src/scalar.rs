use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Scalar type for all vector arithmetic: `f32` or `f64`.
///
/// Everything in this crate is generic over `Real`; the crate root exports
/// `f64` aliases, which is what the simulator and CLI use.
pub trait Real:
    Float + FromPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FromPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

/// Convert an `f64` constant (or RNG draw) into `R`.
pub fn real<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("f64 value not representable in scalar type")
}
