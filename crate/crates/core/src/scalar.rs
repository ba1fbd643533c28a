//! Scalar abstraction shared by the exact and floating-point code paths.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive};

/// Arbitrary-precision rational used for every exact computation.
pub type Rational = BigRational;

/// Ordered field element used for potentials, Birkhoff sums and masses.
///
/// Implemented for `f32`, `f64` and exact rationals. Comparisons against
/// tolerances happen at [`Scalar::SIGNIFICAND_BITS`]; `None` means exact.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    const SIGNIFICAND_BITS: Option<u32>;

    fn as_f64(&self) -> f64;

    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("every i64 is representable")
    }

    /// Smallest magnitude treated as distinguishable from zero, relative to `scale`.
    fn zero_tolerance(scale: f64) -> f64 {
        match Self::SIGNIFICAND_BITS {
            None => 0.0,
            Some(bits) => 64.0 * scale.abs().max(1.0) * 2f64.powi(-(bits as i32)),
        }
    }

    fn is_negligible(&self, scale: f64) -> bool {
        match Self::SIGNIFICAND_BITS {
            None => self.is_zero(),
            Some(_) => self.as_f64().abs() <= Self::zero_tolerance(scale),
        }
    }
}

impl Scalar for f64 {
    const SIGNIFICAND_BITS: Option<u32> = Some(53);
    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    const SIGNIFICAND_BITS: Option<u32> = Some(24);
    fn as_f64(&self) -> f64 {
        *self as f64
    }
}

impl Scalar for BigRational {
    const SIGNIFICAND_BITS: Option<u32> = None;
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or_else(|| {
            // numerator/denominator too large for a direct conversion
            let shift = self.denom().bits().max(self.numer().bits()) as i64 - 900;
            if shift <= 0 {
                return f64::NAN;
            }
            let n = self.numer() >> (shift as usize);
            let d = self.denom() >> (shift as usize);
            n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
        })
    }
}

impl Scalar for Ratio<i64> {
    const SIGNIFICAND_BITS: Option<u32> = None;
    fn as_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

/// Floating-point scalars (needed wherever exponentials or angles appear).
pub trait Real: Scalar + Float + FloatConst {}

impl<T: Scalar + Float + FloatConst> Real for T {}

/// Exact rational `n/d`.
pub fn rational(n: i64, d: i64) -> Rational {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

/// Exact value of a double, as a rational.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Ratio::from_float(x)
}
