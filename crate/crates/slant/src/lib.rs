//! Slant surfaces in E⁴ ≅ ℂ²: Wirtinger angles, the Grassmannian of oriented
//! planes and its self-dual splitting, compatible complex structures, Gauss
//! maps, helices in S³ and the canonical forms of proper slant surfaces.

pub mod cxstruct;
pub mod dsl;
pub mod error;
pub mod exterior;
pub mod forms;
pub mod gaussmap;
pub mod jets;
pub mod selfcheck;
pub mod sphere3;
pub mod tol;

pub use cxstruct::{ComplexStructure, OrientationClass};
pub use error::{GeomError, Result};
pub use exterior::{OrientedPlane, TwoVector, Vec4};
pub use jets::{Domain, Grid, Immersion, Jet, PointGeometry};
