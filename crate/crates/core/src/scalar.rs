//! Scalar types used for edge weights and path costs.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Exact rational cost, the default weight type.
pub type Rational = num_rational::Ratio<i64>;

/// Numeric type usable as an edge weight.
///
/// Implemented for every type that is a signed number with parsing and
/// printing support, which covers `f32`, `f64`, `i64` and [`Rational`].
/// Signedness is needed because the min-cost flow step works on a
/// residual network with negated arc costs.
pub trait Weight:
    Clone
    + PartialOrd
    + Signed
    + ToPrimitive
    + FromPrimitive
    + Debug
    + Display
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Lossy view used for reporting (means, CSV output).
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn is_negative_weight(&self) -> bool {
        *self < Self::zero()
    }
}

impl<T> Weight for T where
    T: Clone
        + PartialOrd
        + Signed
        + ToPrimitive
        + FromPrimitive
        + Debug
        + Display
        + FromStr
        + Send
        + Sync
        + 'static
{
}

/// Sum of an iterator of weights.
pub fn sum_weights<'a, W: Weight, I: IntoIterator<Item = &'a W>>(items: I) -> W {
    items
        .into_iter()
        .fold(W::zero(), |acc, w| acc + w.clone())
}
