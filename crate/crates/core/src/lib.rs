//! Combinatorial and quantum discrepancy of set and projection systems,
//! exact sampling of Hermitian determinantal point processes, and the Haar
//! moment formulas used to bound quantum discrepancy of random systems.

#[cfg(test)]
macro_rules! assert_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b): (f64, f64) = ($a as f64, $b as f64);
        assert!((a - b).abs() <= $tol, "{} vs {} (tol {})", a, b, $tol);
    }};
}

pub mod combdisc;
pub mod concentration;
pub mod dpp;
pub mod error;
pub mod io;
pub mod matcore;
pub mod qdisc;
pub mod randmat;
pub mod scalar;
pub mod seeding;
pub mod setsys;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::{Field, Real, C};

/// Exact rational scalar for the closed-form moment formulas.
pub type Rational = num_rational::Rational64;

pub type CMatrix64 = matcore::CMatrix<f64>;
pub type HermitianMatrix64 = matcore::HermitianMatrix<f64>;
pub type OrthogonalProjection64 = matcore::OrthogonalProjection<f64>;
pub type QuantumColoring64 = matcore::QuantumColoring<f64>;
pub type ProjectionSystem64 = setsys::ProjectionSystem<f64>;
pub type DppKernel64 = dpp::DppKernel<f64>;
pub type QdiscEstimate64 = qdisc::QdiscEstimate<f64>;
