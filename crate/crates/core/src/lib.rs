//! Conformal measures and KMS states for the ℕ²-semigroup groupoid with the
//! potential c(a,b) = a + bθ, plus the model systems that realize them.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod kms;
pub mod lattice;
pub mod models;
pub mod number;
pub mod scalar;
pub mod symbolic;

pub use error::{KmsError, LatticeError, MeasureError, ModelError, ParseError};
pub use lattice::{c_value, sl2_transport, GroupElement, Potential, TransportMatrix};
pub use number::{Decision, Number};
pub use scalar::{rational, Rational, Real, Scalar};
pub use symbolic::{BiSeq, OmegaZPoint};

/// Double-precision potential.
pub type Potential64 = Potential<f64>;
/// Single-precision potential.
pub type Potential32 = Potential<f32>;
/// Potential with exact rational β and θ.
pub type ExactPotential = Potential<Rational>;
pub mod conformal;
pub mod step;
