//! Scalar abstraction.
//!
//! Matrix code is written against [`Real`], a thin layer over
//! `nalgebra::RealField` that also carries the precision-dependent
//! tolerances used by the validating constructors. Closed-form moment
//! formulas only need field arithmetic and are generic over [`Field`], which
//! admits exact rationals.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};

/// Complex entry type of every dense matrix in the crate.
pub type C<T> = Complex<T>;

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Display + Debug + Send + Sync + 'static
{
    /// Absolute tolerance for eigenvalue-class membership ({0,1}, {±1}, [0,1]).
    fn spectral_tol() -> Self;
    /// Frobenius tolerance for algebraic identities on constructed types
    /// (P² = P, χ² = I, U*U = I).
    fn identity_tol() -> Self;
    /// Tolerance for accepting caller-supplied orthonormal columns.
    fn orthonormal_tol() -> Self;
    /// Relative size of the anti-Hermitian part above which input is rejected.
    fn hermitian_reject_tol() -> Self;
    /// Floor on residual norms during sequential sampling.
    fn breakdown_tol() -> Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal is representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn spectral_tol() -> Self {
        1e-10
    }
    fn identity_tol() -> Self {
        1e-10
    }
    fn orthonormal_tol() -> Self {
        1e-8
    }
    fn hermitian_reject_tol() -> Self {
        1e-6
    }
    fn breakdown_tol() -> Self {
        1e-12
    }
}

impl Real for f32 {
    fn spectral_tol() -> Self {
        1e-4
    }
    fn identity_tol() -> Self {
        1e-4
    }
    fn orthonormal_tol() -> Self {
        1e-4
    }
    fn hermitian_reject_tol() -> Self {
        1e-3
    }
    fn breakdown_tol() -> Self {
        1e-6
    }
}

/// Field arithmetic sufficient for the exact moment formulas.
///
/// Implemented for `f32`, `f64`, `Ratio<i64>` and `Ratio<i128>`.
pub trait Field:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_int(n: i64) -> Self;
}

impl Field for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }
}

impl Field for f32 {
    fn from_int(n: i64) -> Self {
        n as f32
    }
}

macro_rules! rational_field {
    ($($int:ty),*) => {$(
        impl Field for num_rational::Ratio<$int> {
            fn from_int(n: i64) -> Self {
                num_rational::Ratio::from_integer(n as $int)
            }
        }
    )*};
}

rational_field!(i64, i128);
