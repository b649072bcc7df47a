use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Numeric type usable for scores, reliabilities and metrics.
///
/// Implemented for `f32`, `f64` and `Ratio<i64>`. Every constant the ranking
/// arithmetic needs (`±1/2`, `±1`, `2`) is representable exactly in all three.
pub trait Scalar:
    Num + Neg<Output = Self> + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Display
{
    fn half() -> Self {
        Self::one() / Self::two()
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Num + Neg<Output = T> + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Display
{
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn constants_are_exact() {
        assert_eq!(f64::half(), 0.5);
        assert_eq!(f32::two(), 2.0);
        assert_eq!(Rational::half(), Rational::new(1, 2));
        assert_eq!(Rational::from_count(7), Rational::from_integer(7));
        assert_eq!(Rational::new(3, 4).to_f64_lossy(), 0.75);
    }
}
