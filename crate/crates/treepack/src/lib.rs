//! Edge-disjoint spanning tree packings with bypass constraints.
//!
//! The crate builds packings of `k` spanning trees in multigraphs where a
//! designated vertex `u` has a minimum `u`-`v` cut as its edge set, such that
//! two of the trees together contain a path between two given points that
//! avoids `v`. Around that core sit the supporting pieces: flows and minimum
//! cuts, splitting off, uncrossing of minimum cuts, Eulerian subgraphs and
//! Hamiltonian cycles of line graphs, a layered construction over growing
//! vertex sets, and generators for test graphs.
//!
//! Every producer returns data that [`packing::verify_packing`] and the
//! other checkers can validate without trusting the producer.

pub mod connectivity;
pub mod error;
pub mod eulerline;
pub mod generators;
pub mod layered;
pub mod multigraph;
pub mod packing;
pub mod uncross;

pub use error::{Error, Result};
pub use multigraph::{ContractionMap, EdgeId, Multigraph, Point, Provenance, VertexId};
