//! Scalar abstraction for the numeric models.

use std::fmt::{Debug, Display};
use std::str::FromStr;

/// Floating-point scalar the threshold models are generic over (`f32`, `f64`).
pub trait Scalar:
    num_traits::Float + num_traits::FromPrimitive + Debug + Display + FromStr + Send + Sync + 'static
{
    fn of_count(n: usize) -> Self {
        <Self as num_traits::FromPrimitive>::from_usize(n).expect("usize fits in a float")
    }

    /// Lossy conversion for literal configuration values.
    fn lit(x: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(x).expect("finite literal")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
