//! Scalar abstractions.
//!
//! Two families of scalars appear in this crate. Linear algebra over the
//! subshift and the graded cohomology model only needs field operations and
//! is run either exactly (over [`Rational`](crate::Rational)) or in floating
//! point. Geometry and the zeta engine need transcendental functions and are
//! generic over [`Real`].

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// A field usable for elimination and operator algebra.
///
/// Exact fields report `EXACT = true`; for those `is_negligible` is plain
/// zero testing. Floating fields treat tiny magnitudes as zero.
pub trait Field: Num + Neg<Output = Self> + Clone + PartialEq + Debug + Display + Send + Sync + 'static {
    const EXACT: bool;

    fn from_int(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn to_f64(&self) -> f64;

    fn is_negligible(&self) -> bool;

    /// Magnitude used for pivot selection in floating fields.
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
}

macro_rules! float_field {
    ($t:ty, $eps:expr) => {
        impl Field for $t {
            const EXACT: bool = false;

            fn from_int(v: i64) -> Self {
                v as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn is_negligible(&self) -> bool {
                self.abs() <= $eps
            }
        }
    };
}

float_field!(f32, 1e-5);
float_field!(f64, 1e-11);

impl Field for BigRational {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        Ratio::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn magnitude(&self) -> f64 {
        Field::to_f64(&self.abs())
    }
}

impl Field for Ratio<i64> {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        Ratio::from_integer(v)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }

    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
}

/// Real scalar for geometry and special functions (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Working tolerance for classification and projective normalization.
    fn tolerance() -> Self;

    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal fits in scalar")
    }
}

impl Real for f32 {
    fn tolerance() -> Self {
        1e-5
    }
}

impl Real for f64 {
    fn tolerance() -> Self {
        1e-12
    }
}

/// Sign `(-1)^e` of an integer exponent as a field element.
pub fn sign_pow<F: Field>(e: i64) -> F {
    if e.rem_euclid(2) == 0 {
        F::one()
    } else {
        -F::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn rational_field_is_exact() {
        let a = BigRational::from_ratio(1, 3);
        let b = BigRational::from_ratio(2, 3);
        assert!((a + b).is_one());
        assert!(BigRational::zero().is_negligible());
    }

    #[test]
    fn float_negligibility() {
        assert!(1e-13f64.is_negligible());
        assert!(!1e-6f64.is_negligible());
        assert_eq!(sign_pow::<f64>(-1), -1.0);
        assert_eq!(sign_pow::<f64>(4), 1.0);
    }

    #[test]
    fn small_ratio_field() {
        let x = Ratio::<i64>::from_ratio(3, 6);
        assert_eq!(x, Ratio::new(1, 2));
        assert_eq!(Field::to_f64(&x), 0.5);
        assert!(!One::is_one(&x));
    }
}
