//! Approximation algorithms for packing 3D boxes and convex polyhedra into
//! containers of bounded volume.
//!
//! Every packer returns a [`PackingResult`] carrying a certificate: the
//! achieved container volume is compared against a computable lower bound on
//! the optimum, scaled by the constant the algorithm guarantees.

pub mod basesearch;
pub mod error;
pub mod gen;
pub mod geom3;
pub mod model;
pub mod slab;
pub mod strip2d;
pub mod verify;

pub use error::{Error, Result};
pub use model::{BoxItem, Container, Instance, ItemId, Placement, PackingResult, PolyItem, Variant};
