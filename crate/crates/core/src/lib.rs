//! Contractible Hamiltonian cycles in equivelar triangulations of closed
//! surfaces, decided through proper trees in the dual map.
//!
//! - [`complex`]: triangulations, surface validation, fixtures.
//! - [`dual`]: the dual polyhedral map and its correspondence to the
//!   triangulation.
//! - [`tree`]: proper-tree checking, search and enumeration.
//! - [`disk`]: disks, contractibility, both directions of the tree/cycle
//!   correspondence, and the brute-force oracle.
//! - [`cli`]: the `chc` command-line front end.

pub mod cli;
pub mod complex;
pub mod disk;
pub mod dual;
pub mod tree;

pub use complex::{
    equivelar_degree, euler_characteristic, generate_fixture, validate_surface, Fixture, SurfaceError,
    SurfaceReport, Triangulation,
};
pub use disk::{
    brute_force_chc, cycle_is_contractible, disk_from_tree, find_chc, tree_from_cycle, ChcSearch, CycleTree,
    DiskError, TriangulatedDisk, VertexCycle,
};
pub use dual::{dualize, face_walk, DualCorrespondence, PolyhedralMap};
pub use tree::{
    check_proper, enumerate_proper_trees, enumerate_proper_trees_with, find_proper_tree, CandidateTree,
    SearchOptions, TreeSearch,
};
