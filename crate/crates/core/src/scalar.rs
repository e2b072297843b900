//! Scalar abstraction for the numeric modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::AddAssign;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar used by the diversity, network and comparison
/// modules. Implemented for `f32` and `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + AddAssign + Sum + Display + Debug + Default + Copy + 'static
{
    /// Lossless-enough conversion from a count.
    fn from_count(c: u64) -> Self {
        Self::from_u64(c).expect("count representable")
    }

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Kahan-Babuska compensated accumulator. Keeps the large double sums
/// (the 630x630 disparity grid) stable at 1e-12 tolerances.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<R: Real> {
    sum: R,
    compensation: R,
}

impl<R: Real> CompensatedSum<R> {
    pub fn new() -> Self {
        Self { sum: R::zero(), compensation: R::zero() }
    }

    pub fn add(&mut self, value: R) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> R {
        self.sum + self.compensation
    }
}
