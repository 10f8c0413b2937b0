//! Scalar abstraction shared by the interpreter, the search distributions
//! and the training loop.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StandardUniform};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point type the engine computes in: `f32` or `f64`.
///
/// Literals are printed with `Debug`, which yields the shortest decimal that
/// parses back to the same value, so printing and re-parsing a program is exact.
pub trait Scalar:
    Float
    + FromPrimitive
    + FromStr
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Draws from N(0, 1).
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draws uniformly from [0, 1).
    fn unit<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Converts an `f64` constant. Total for both `f32` and `f64`.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable")
    }
}

macro_rules! impl_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            #[inline]
            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }

            #[inline]
            fn unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardUniform.sample(rng)
            }
        }
    )*};
}

impl_scalar!(f32, f64);
