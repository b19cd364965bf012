//! Antipodal covers of spheres by open sets: constructions, exact and
//! sampled multiplicity verification, Ky Fan chain certificates and a small
//! extremal search.
//!
//! Hemisphere covers are handled exactly over the rationals; predicate
//! covers are evaluated in binary64 and checked by sampling.

pub mod constructions;
pub mod cover;
pub mod document;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod kyfan;
pub mod linalg;
pub mod sampling;
pub mod render;
pub mod search;

pub use cover::{Claims, Cover, CoverSet, Region};
pub use error::{Error, Result};
pub use geometry::{ApproxPoint, Direction, Rat};
