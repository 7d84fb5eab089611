//! Numeric abstraction shared by every algorithm in the crate.
//!
//! Distances, costs, fractional amounts and approximation constants are all
//! carried in a single scalar type `T: Scalar`. Floating types compare with a
//! small relative tolerance; [`Rational64`] is exact and compares with none,
//! which is what the integer-valued golden tests use.

use std::fmt::{Debug, Display};

use num_rational::Rational64;
use num_traits::{Num, Signed, ToPrimitive};

/// A totally ordered (in practice) field-like scalar used for distances and costs.
pub trait Scalar:
    Num + Signed + Copy + PartialOrd + Debug + Display + Send + Sync + 'static
{
    /// `true` when arithmetic is exact and comparisons need no tolerance.
    const EXACT: bool;

    /// Builds `num / den`. `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Nearest representable value to `v`. Exact types use a bounded-denominator
    /// approximation.
    fn from_f64(v: f64) -> Self;

    fn to_f64(self) -> f64;

    /// Relative tolerance used by [`Scalar::approx_le`].
    fn comparison_tolerance() -> Self;

    /// Relative improvement below which a local-search move counts as a plateau.
    fn plateau_tolerance() -> Self;

    /// Smallest integer `>= self` for nonnegative values. Floating values within
    /// the comparison tolerance of an integer snap to it first, so `1.0 / 0.2`
    /// yields 5 rather than 6.
    fn ceil_usize(self) -> usize;

    fn from_usize(v: usize) -> Self {
        Self::from_ratio(v as i64, 1)
    }

    /// `self <= rhs` up to the relative comparison tolerance.
    fn approx_le(self, rhs: Self) -> bool {
        if self <= rhs {
            return true;
        }
        let scale = max_of(max_of(self.abs(), rhs.abs()), Self::one());
        self - rhs <= Self::comparison_tolerance() * scale
    }

    fn approx_eq(self, rhs: Self) -> bool {
        self.approx_le(rhs) && rhs.approx_le(self)
    }
}

pub fn max_of<T: PartialOrd>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

pub fn min_of<T: PartialOrd>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

/// Sum of an iterator of scalars.
pub fn sum<T: Scalar, I: IntoIterator<Item = T>>(iter: I) -> T {
    iter.into_iter().fold(T::zero(), |acc, v| acc + v)
}

macro_rules! float_scalar {
    ($t:ty, $cmp:expr, $plateau:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_ratio(num: i64, den: i64) -> Self {
                num as $t / den as $t
            }

            fn from_f64(v: f64) -> Self {
                v as $t
            }

            fn to_f64(self) -> f64 {
                self as f64
            }

            fn comparison_tolerance() -> Self {
                $cmp
            }

            fn plateau_tolerance() -> Self {
                $plateau
            }

            fn ceil_usize(self) -> usize {
                let rounded = self.round();
                if (self - rounded).abs() <= $cmp * rounded.abs().max(1.0) {
                    return rounded.max(0.0) as usize;
                }
                self.ceil().max(0.0) as usize
            }
        }
    };
}

float_scalar!(f64, 1e-9, 1e-12);
float_scalar!(f32, 1e-5, 1e-6);

impl Scalar for Rational64 {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational64::new(num, den)
    }

    fn from_f64(v: f64) -> Self {
        // Denominators up to 10^6 keep downstream products well inside i64.
        Rational64::approximate_float(v)
            .filter(|r| *r.denom() <= 1_000_000)
            .unwrap_or_else(|| Rational64::new((v * 1e6).round() as i64, 1_000_000))
    }

    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    fn comparison_tolerance() -> Self {
        Rational64::from_integer(0)
    }

    fn plateau_tolerance() -> Self {
        Rational64::from_integer(0)
    }

    fn ceil_usize(self) -> usize {
        let c = self.ceil().to_integer();
        c.max(0) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_ceil_snaps_near_integers() {
        assert_eq!((1.0f64 / 0.2).ceil_usize(), 5);
        assert_eq!(2.5f64.ceil_usize(), 3);
        assert_eq!((0.75f64 * 4.0).ceil_usize(), 3);
        assert_eq!(0.0f64.ceil_usize(), 0);
    }

    #[test]
    fn rational_ceil_is_exact() {
        assert_eq!(Rational64::new(5, 2).ceil_usize(), 3);
        assert_eq!(Rational64::new(1, 1).ceil_usize(), 1);
        let eps = Rational64::new(1, 5);
        assert_eq!((Rational64::from_integer(1) / eps).ceil_usize(), 5);
    }

    #[test]
    fn approx_le_tolerates_rounding_only_for_floats() {
        assert!(1.0f64.approx_le(1.0 - 1e-12));
        assert!(!1.0f64.approx_le(1.0 - 1e-6));
        let a = Rational64::new(1, 3);
        assert!(a.approx_le(a));
        assert!(!(a + Rational64::new(1, 1_000_000_000)).approx_le(a));
    }

    #[test]
    fn rational_from_f64_keeps_small_denominators() {
        assert_eq!(Rational64::from_f64(0.25), Rational64::new(1, 4));
        assert_eq!(Rational64::from_f64(0.2), Rational64::new(1, 5));
    }
}
