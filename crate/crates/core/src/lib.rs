//! Symmetry-reduced helical Navier-Stokes and Euler solvers on the unit disk
//! and their planar limits.

pub mod bessel;
pub mod config;
pub mod correction;
pub mod dense;
pub mod diagnostics;
pub mod error;
pub mod euler;
pub mod experiments;
pub mod families;
pub mod field;
pub mod grid;
pub mod io;
pub mod lift;
pub mod metric;
pub mod ns;
pub mod operators;
pub mod radial;
pub mod sigma;
pub mod staggered;

pub use error::{HelixError, Result};
pub use field::{azimuthal_transform, l2_inner, l2_norm, lp_norm, Direction, ScalarField, VectorField3};
pub use grid::{build_grid, DiskGrid};
pub use radial::OuterBc;
pub use sigma::SigmaParam;
