//! Lagrange finite elements on a structured triangulation of the unit square.
//!
//! Only what the reduced-order machinery needs: `P1`–`P3` nodal spaces, stiffness, mass and
//! weighted-mass assembly, load vectors, homogeneous Dirichlet elimination, norms, and point
//! evaluation.

mod assembly;
mod mesh;
mod quadrature;
mod space;

pub use assembly::{apply_dirichlet, FeOperators};
pub use mesh::Mesh;
pub use quadrature::{gauss_legendre, TriangleRule};
pub use space::{FeSpace, ReferenceElement};
