//! Scalar abstraction shared by the network, trainer and pruning code.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type a rule-fact network can be computed in.
pub trait Scalar: Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Tolerance used when checking that a rule's weights sum to one.
    const WEIGHT_SUM_TOLERANCE: f64;

    /// Default per-sweep change threshold for fixpoint evaluation.
    const CHANGE_EPSILON: f64;

    /// Converts an `f64` literal. Panics only for values the type cannot hold,
    /// which never happens for the finite constants used in this crate.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn clamp_unit(self) -> Self {
        self.max(Self::zero()).min(Self::one())
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Scalar for f32 {
    const WEIGHT_SUM_TOLERANCE: f64 = 1e-5;
    const CHANGE_EPSILON: f64 = 1e-6;
}

impl Scalar for f64 {
    const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;
    const CHANGE_EPSILON: f64 = 1e-9;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamp_unit_bounds() {
        assert_eq!((-0.5f64).clamp_unit(), 0.0);
        assert_eq!(1.5f32.clamp_unit(), 1.0);
        assert_eq!(0.25f64.clamp_unit(), 0.25);
    }

    #[test]
    fn literals_round_trip() {
        assert_eq!(f64::lit(0.99), 0.99);
        assert!((f32::lit(0.99).as_f64() - 0.99).abs() < 1e-6);
    }
}
