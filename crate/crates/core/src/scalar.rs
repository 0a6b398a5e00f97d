//! Floating-point abstraction so the whole toolkit works at either
//! precision. `f64` is the intended default; `f32` is available for
//! callers that trade accuracy for size.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssignOps, ToPrimitive};

/// Scalar type every computation is generic over.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssignOps + Debug + Display + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` literal; every literal used in this crate is
/// representable at both precisions.
pub(crate) fn cast<S: Scalar>(x: f64) -> S {
    S::from_f64(x).expect("f64 literal must convert to the scalar type")
}

/// Converts a count (player index, round count, iteration count).
pub(crate) fn cast_u64<S: Scalar>(n: u64) -> S {
    S::from_u64(n).expect("count must convert to the scalar type")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn casts_are_exact_for_small_integers() {
        assert_eq!(cast::<f32>(3.0), 3.0f32);
        assert_eq!(cast::<f64>(3.0), 3.0f64);
        assert_eq!(cast_u64::<f64>(1_000_000), 1e6);
    }
}
