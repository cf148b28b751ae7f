//! Numerical Laplace, Carleman and Beurling spectra of bounded vector-valued
//! functions, with the tauberian and semigroup checks built on them.
//!
//! Quadrature is generic over the real scalar (`quad::Real`); everything above it
//! works in `f64`, and the aliases below fix the generic layer to that type.

pub mod cvec;
pub mod error;
pub mod func_model;
pub mod kernels;
pub mod quad;
pub mod special;
pub mod spectral;
pub mod transforms;
pub mod spectra;
pub mod semigroup;
pub mod tauberian;
pub mod corpus;
pub mod suites;
pub mod report;

pub type QuadOptions = quad::QuadOptions<f64>;
pub type QuadOutput<V> = quad::QuadOutput<f64, V>;

pub use cvec::{CVec, C64};
pub use error::{Result, SpectraError};
pub use func_model::{Domain, FunctionDescriptor};
pub use kernels::Kernel;
pub use spectra::{Classification, EstimatorParams, FrequencyGrid, SpectrumEstimate, SpectrumKind};
