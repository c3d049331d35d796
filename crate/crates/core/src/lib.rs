//! Rectangle-free colorings of grids.
//!
//! A c-coloring of `G_{n,m} = [n] x [m]` is rectangle-free when no two rows
//! and two columns meet in four cells of one color. The crate provides
//! verifiers, explicit constructions, closed-form uncolorability bounds,
//! exact search, and the obstruction-set pipeline built on top of them.

pub mod bounds;
pub mod cache;
pub mod constructions;
pub mod error;
pub mod field;
pub mod grid;
pub mod obstruction;
pub mod partition;
pub mod search;

pub use error::{BoundsError, ConstructionError, GridError, ParseError, SearchError};
pub use grid::{CellSet, Coloring, GridDims, Rect};
