//! Scalar abstraction shared by the exact (rational) and floating-point paths.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};

/// Relative tolerance used by floating-point scalars when deciding whether two
/// values coincide (e.g. whether `d·p` sits on the critical point).
pub const FLOAT_NEAR_TOLERANCE: f64 = 1e-12;

/// A number type the recursions and kernels can be evaluated in.
///
/// Implemented for `f32`, `f64` and [`BigRational`]. Exact scalars compare
/// with `==`; floating scalars compare with a relative tolerance.
pub trait Scalar: Num + Signed + Clone + PartialOrd + Debug + Display + Send + Sync + 'static {
    /// `true` for types with exact field arithmetic.
    const EXACT: bool;

    fn from_count(n: u64) -> Self;

    fn ratio(num: u64, den: u64) -> Self {
        Self::from_count(num) / Self::from_count(den)
    }

    fn to_f64(&self) -> f64;

    /// Equality for exact types; relative closeness for floats.
    fn near(&self, other: &Self) -> bool;

    fn powu(&self, exp: u32) -> Self {
        num_traits::pow(self.clone(), exp as usize)
    }

    fn is_infinite_value(&self) -> bool {
        false
    }
}

macro_rules! impl_float_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_count(n: u64) -> Self {
                n as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn near(&self, other: &Self) -> bool {
                let (a, b) = (*self as f64, *other as f64);
                let tol = FLOAT_NEAR_TOLERANCE.max(<$t>::EPSILON as f64 * 4.0);
                (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
            }

            fn powu(&self, exp: u32) -> Self {
                self.powi(exp as i32)
            }

            fn is_infinite_value(&self) -> bool {
                self.is_infinite()
            }
        }
    )*};
}

impl_float_scalar!(f32, f64);

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_count(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        // Ratio::to_f64 handles huge numerators and denominators without
        // overflowing to inf/inf.
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn near(&self, other: &Self) -> bool {
        self == other
    }
}

/// `1 - x` without an extra clone at the call site.
pub(crate) fn complement<T: Scalar>(x: &T) -> T {
    T::one() - x.clone()
}

pub(crate) fn is_unit_interval_open_right<T: Scalar>(x: &T) -> bool {
    !x.is_negative() && *x < T::one()
}

pub(crate) fn is_probability<T: Scalar>(x: &T) -> bool {
    !x.is_negative() && *x <= T::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_ratio_is_reduced() {
        let r = BigRational::ratio(6, 8);
        assert_eq!(r.to_string(), "3/4");
        assert_eq!(BigRational::from_count(1).to_string(), "1");
    }

    #[test]
    fn float_near_uses_relative_tolerance() {
        assert!(1.0_f64.near(&(1.0 + 1e-14)));
        assert!(!1.0_f64.near(&(1.0 + 1e-9)));
        assert!(0.5_f32.near(&0.5));
    }

    #[test]
    fn rational_to_f64_of_huge_values() {
        let big = BigRational::from_count(3).powu(2000) / BigRational::from_count(2).powu(3000);
        let expected = (2000.0 * 3f64.ln() - 3000.0 * 2f64.ln()).exp();
        assert!((Scalar::to_f64(&big) / expected - 1.0).abs() < 1e-9);
    }
}
