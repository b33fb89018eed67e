//! Simulation and numerical theory for isolated nodes and connectivity in
//! Poisson networks under the random connection model, on the unit torus
//! and the unit square.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod campaign;
pub mod error;
pub mod geometry;
pub mod models;
pub mod quadrature;
pub mod rng;
pub mod sampler;
pub mod theory;


pub use error::{Error, Result};
pub use geometry::{distance, Metric, Point2};
pub use models::{connection_radius, ConnectionModel, ModelKind, ModelValidationReport};
pub use quadrature::Estimate;
pub use sampler::{CoupledSample, NetworkSample, SampleParams};
