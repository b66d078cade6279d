//! Minimum leaf out-branchings of digraphs.
//!
//! * [`digraph`]: digraphs, out-trees, existence of out-branchings, contraction.
//! * [`linkage`]: exact covering-linkage search.
//! * [`solvers`]: brute-force and contraction-enumeration MinLOB solvers.
//! * [`reduction`]: 3SAT instances of directed path-width 1 with certificate maps.
//! * [`width`]: path, DAG and arboreal decompositions.
//! * [`format`]: text file formats used by the `minlob` binary.

pub mod digraph;
pub mod format;
pub mod generate;
pub mod linkage;
pub mod reduction;
pub mod solvers;
pub mod width;

pub use digraph::{has_out_branching, validate_out_branching, Digraph, OutTree};
pub use linkage::{solve_cover_linkage, LinkageQuery, LinkageSolution};
pub use reduction::{reduce_cnf, CnfFormula, ReducedInstance};
pub use solvers::{check_k_leaves_contraction, min_leaf_brute_force, SolveResult};
