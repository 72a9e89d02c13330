//! Finite models of local po-spaces and the sheaf theory around them.

pub mod dihomotopy;
pub mod dispace;
pub mod etale;
pub mod finspace;
pub mod fixtures;
pub mod io;
pub mod order;
pub mod pv;
pub mod sheaf;
pub mod simplicial;
pub mod site;

pub use dispace::{Chart, Dimap, DispaceError, LocalPoSpace, OrderAtlas};
pub use finspace::{CtsMap, FinSpace, PointSet, SpaceError, Subspace};
pub use order::Relation;
