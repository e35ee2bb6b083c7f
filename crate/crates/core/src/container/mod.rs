//! Neighbour-identification containers and their traversals.

pub mod grid;
pub mod kernel;
pub mod linked_cells;
pub mod traversal;
pub mod verlet;

pub use grid::{build_linked_cells, CellGrid, GridGeometry};
pub use kernel::PairCounter;
pub use linked_cells::LinkedCells;
pub use verlet::{build_verlet_lists, list_iter_forces, NeighborLists};
