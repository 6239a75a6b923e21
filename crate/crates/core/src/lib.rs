//! Random hyperbolic surfaces glued from pairs of pants.
//!
//! The crate builds closed hyperbolic surfaces by gluing pants along
//! 3-regular configuration-model graphs with random Fenchel-Nielsen
//! (length, twist) weights, computes certified upper/lower distance bounds
//! on a cuff-sample metric graph, grows tree-like surfaces to estimate the
//! frontier growth exponent, and runs a distance-driven exploration of the
//! graph that brackets the diameter.
//!
//! The geometry layer (`hyperbolic`, `pants`) is generic over the scalar
//! type; the simulation layers are instantiated at `f64` through the aliases
//! below.

pub mod error;
pub mod explore;
pub mod hyperbolic;
pub mod metric;
pub mod pants;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod surface;
pub mod tree;

pub use error::{Error, Result};
pub use rng::{LengthLaw, TwistLaw, WeightLaw};

/// Concrete `f64` aliases for the generic geometry types.
pub type PantsShape64 = pants::PantsShape<f64>;
pub type PantsBounds64 = pants::PantsBounds<f64>;
pub type BoundaryPoint64 = pants::BoundaryPoint<f64>;
pub type HexagonChart64 = pants::HexagonChart<f64>;
pub type PantsChart64 = pants::PantsChart<f64>;

/// `f32` aliases; same geometry at reduced precision.
pub type PantsShape32 = pants::PantsShape<f32>;
pub type PantsBounds32 = pants::PantsBounds<f32>;

/// Numeric tolerance used by geometric consistency checks (right angles,
/// seam matching, symmetry).
pub const GEOMETRY_TOLERANCE: f64 = 1e-9;
