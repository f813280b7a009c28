//! Scalar abstraction for the numeric core.
//!
//! All feature math (separability scores, centroids, distances) is generic
//! over [`Scalar`] so the same code runs in `f32` or `f64`. Concrete type
//! aliases live at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar used for feature values and derived statistics.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum<Self>
    + Debug
    + Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, for constants and RNG output.
    #[inline]
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 converts to every supported scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
