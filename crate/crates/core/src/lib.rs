//! Combinatorics of taut ideal triangulations and of disks carrying train
//! tracks with stops.

pub mod census;
pub mod corpus;
pub mod disk;
pub mod loops;
pub mod perm;
pub mod taut;
pub mod transverse;
pub mod tri;
pub mod unionfind;

pub use perm::Perm4;
pub use tri::{parse_triangulation, validate_triangulation, GluingTable, Triangulation, TriError};
