//! Subgroups of a cusped surface group as folded core graphs, their
//! convex-core boundaries, rational subset currents, and mapping class group
//! orbit censuses.
//!
//! ```
//! use subset_currents::{SurfaceStructure, SubgroupClass, RationalSubsetCurrent};
//! use subset_currents::currents::{boundary_projection, parse_generators};
//!
//! let s = SurfaceStructure::modular_torus();
//! let h = SubgroupClass::from_generators(&parse_generators("aa,b", 2).unwrap(), &s).unwrap();
//! let b = boundary_projection(&RationalSubsetCurrent::single(h), &s).unwrap();
//! assert_eq!(b.to_string(), "aabAAB:1/2");
//! ```

pub mod census;
pub mod cli;
pub mod currents;
pub mod error;
pub mod geometry;
pub mod graphs;
pub mod mcg;
pub mod ribbon;
pub mod words;

pub use currents::{Functional, Multicurve, RationalSubsetCurrent, Weight};
pub use error::{Error, Result};
pub use geometry::SurfaceStructure;
pub use graphs::{CoreGraph, SubgroupClass};
pub use mcg::{MappingClass, OrbitBall, OrbitConfig};
pub use words::{conj_class, ConjClass, Letter, Word};

/// Runs the guide's code blocks as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/words.md")]
    pub struct Words;
    #[doc = include_str!("../../../book/src/graphs.md")]
    pub struct Graphs;
    #[doc = include_str!("../../../book/src/ribbon.md")]
    pub struct Ribbon;
    #[doc = include_str!("../../../book/src/geometry.md")]
    pub struct Geometry;
    #[doc = include_str!("../../../book/src/currents.md")]
    pub struct Currents;
    #[doc = include_str!("../../../book/src/orbits.md")]
    pub struct Orbits;
    #[doc = include_str!("../../../book/src/census.md")]
    pub struct Census;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
