//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating point type the geometry is built over: `f32` or `f64`.
///
/// The associated constants carry the precision-dependent thresholds used
/// by validation predicates and finite-difference stencils, so generic code
/// never hard-codes an `f64` tolerance.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Hermiticity, trace-one and probability-sum tolerance.
    const EXACT_TOL: Self;
    /// Smallest admissible eigenvalue of a density matrix.
    const POSITIVITY_TOL: Self;
    /// Orthonormality tolerance for user supplied measurement bases.
    const ORTHONORMAL_TOL: Self;
    /// Central-difference step for gradients of non-polynomial scalar fields.
    const GRADIENT_STEP: Self;
    /// Central-difference step for derivatives of Hamiltonian vector fields.
    const LIE_STEP: Self;
    /// Central-difference step for numeric chart Jacobians.
    const JACOBIAN_STEP: Self;
    /// Chart regularity guard on `r` and `sin(theta)`.
    const CHART_GUARD: Self;
    /// Central-difference step for functions pulled back to chart coordinates.
    const CHART_STEP: Self;

    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const EXACT_TOL: Self = 1e-12;
    const POSITIVITY_TOL: Self = 1e-10;
    const ORTHONORMAL_TOL: Self = 1e-10;
    const GRADIENT_STEP: Self = 1e-6;
    const LIE_STEP: Self = 1e-5;
    const JACOBIAN_STEP: Self = 1e-7;
    const CHART_GUARD: Self = 1e-8;
    const CHART_STEP: Self = 1e-5;
}

impl Real for f32 {
    const EXACT_TOL: Self = 1e-5;
    const POSITIVITY_TOL: Self = 1e-5;
    const ORTHONORMAL_TOL: Self = 1e-5;
    const GRADIENT_STEP: Self = 1e-2;
    const LIE_STEP: Self = 1e-2;
    const JACOBIAN_STEP: Self = 1e-3;
    const CHART_GUARD: Self = 1e-4;
    const CHART_STEP: Self = 1e-2;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_conversion() {
        assert_eq!(<f64 as Real>::lit(0.25), 0.25);
        assert_eq!(<f32 as Real>::lit(0.5), 0.5f32);
        assert_eq!(<f64 as Real>::from_usize_lossy(7), 7.0);
    }
}
