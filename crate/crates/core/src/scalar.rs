use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumCast};

/// Floating-point scalar used for spacings, distances and metric values.
pub trait Real:
    Float + FromPrimitive + NumCast + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossless for f64, rounding for f32.
    fn of(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("finite f64 converts to any float")
    }

    fn of_usize(v: usize) -> Self {
        <Self as NumCast>::from(v).expect("usize converts to float")
    }

    fn of_i64(v: i64) -> Self {
        <Self as NumCast>::from(v).expect("i64 converts to float")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
