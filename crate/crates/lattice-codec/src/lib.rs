//! Codec for periodic lattice truss materials.
//!
//! A unit cell (nodes, struts, bounding box) is encoded into five square
//! matrices: pairwise distances, linear densities, stretching and bending
//! stiffnesses, and the integer packing matrix naming periodic partner
//! nodes. The crate covers the full round trip (encode, validate,
//! canonicalize, fingerprint, rebuild coordinates), derived properties,
//! a beam-frame stiffness model, tiling, and the file formats.
//!
//! Everything numeric is generic over the scalar type through [`Scalar`];
//! the aliases at the crate root fix `f64` for everyday use.

pub mod canonicalizer;
pub mod encoder;
pub mod error;
pub mod io;
pub mod matrix;
pub mod mechanics;
pub mod prefab;
pub mod properties;
pub mod reconstructor;
pub mod scalar;
pub mod tessellator;
pub mod types;
pub mod validator;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// `f64` aliases for the core types.
pub type Mat = matrix::Matrix<f64>;
pub type ExtMat = matrix::ExtendedMatrix<f64>;
pub type Vec3f = types::Vec3<f64>;
pub type Cell = types::UnitCell<f64>;
pub type Descriptors = types::DescriptorSet<f64>;
pub type StrutF = types::Strut<f64>;
pub type NodeF = types::Node<f64>;
