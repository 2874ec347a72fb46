pub mod complex;
pub mod error;
pub mod exact;
pub mod frame;
pub mod io;
pub mod nsp;
pub mod phaseless;
pub mod retrieval;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Rational = num_rational::BigRational;
pub type RationalMatrix = exact::Matrix<Rational>;
pub type RationalSubspace = exact::Subspace<Rational>;
pub type RationalFrame = frame::Frame<Rational>;
