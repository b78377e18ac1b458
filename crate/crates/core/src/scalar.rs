//! Floating-point scalar abstraction used by the raster and placement math.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Real scalar the cost-map pipeline can run on: `f32` or `f64`.
///
/// The bound on [`rustfft::FftNum`] lets the transform-domain correlation
/// share the same element type as the direct path.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + rustfft::FftNum + Default + Debug + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for literals and configuration values.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 converts to every float scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
