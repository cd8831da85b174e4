//! Finite-temperature Casimir forces between metal-coated bodies from the
//! Lifshitz theory, with Drude parameter extraction from optical data,
//! closed-form corrections and upper-limit analysis of measurements.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod constants;
pub mod corrections;
pub mod dielectric;
pub mod drude_fit;
pub mod error;
pub mod force;
pub mod kk;
pub mod quadrature;
pub mod reflection;

pub use dielectric::{DielectricModel, DrudeParams, MaterialComposition, OpticalSample};
pub use error::{Error, Result};
pub use force::{ForceResult, Geometry, GeometryKind};
pub use reflection::{GFactors, LayerStack};
