//! Boundary-aligned cross fields on planar triangle meshes.
//!
//! The field is stored through its fourth-power representation `u = e^{4 i theta}`
//! and computed by alternating heat diffusion and pointwise normalization, which
//! approximately minimizes the Ginzburg-Landau energy. Singularities are read off
//! from face windings, separatrices are traced with RK4, and the resulting curve
//! arrangement is turned into a quad layout.

mod error;
mod scalar;

pub mod fem;
pub mod gl;
pub mod layout;
pub mod crossfield;
pub mod domains;
pub mod mesh;
pub mod trace;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Point = mesh::Point2<f64>;
pub type Mesh = mesh::TriMesh<f64>;
pub type Mesh32 = mesh::TriMesh<f32>;
