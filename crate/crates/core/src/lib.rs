//! Virtual network embedding via decomposable LP relaxations and randomized rounding.
//!
//! Graph types are generic over a [`Scalar`] (`f32` or `f64`); the aliases below fix `f64`.
//! LP models and decompositions always work in `f64`.

pub mod decomposition;
pub mod extraction;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod rounding;
pub mod scalar;
pub mod scenario;

pub use scalar::Scalar;

pub type Substrate = model::SubstrateGraph<f64>;
pub type Request = model::Request<f64>;
pub type Instance = model::Instance<f64>;
pub type RawInstance = model::RawInstance<f64>;
pub type AllocationVector = model::AllocationVector<f64>;
pub type ResourceStats = model::ResourceStats<f64>;
