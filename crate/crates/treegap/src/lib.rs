//! Certified estimates of the first Dirichlet eigenvalue of a birth-death
//! process on a finite rooted tree.
//!
//! The process jumps between neighbouring vertices of a rooted tree with
//! positive rates both ways; the root is absorbing. The smallest
//! eigenvalue of the negated generator restricted to functions vanishing
//! at the root governs the absorption rate. This crate computes it three
//! ways, each checking the others:
//!
//! - **Exact**: a sparse symmetric eigensolver specialized to trees
//!   ([`solve`]), with a dense rotation-based solver as an independent
//!   cross-check.
//! - **Certified bounds**: any admissible test function yields a one-sided
//!   bound through one of three operator forms ([`bounds`], [`ops`]);
//!   certificates carry the witness and every per-vertex evaluation.
//! - **Closed form**: a two-sided estimate from subtree masses and
//!   accumulated resistances, with the ratio of the two sides capped by a
//!   branching count ([`bounds::closed_form_bounds`]).
//!
//! Truncating the tree at a layer and rescaling the boundary rates gives a
//! non-increasing sequence of approximations ending at the exact value
//! ([`tree::collapse`], [`solve::lambda0_sequence`]).
//!
//! The `examples/` directory walks through every capability; the `treegap`
//! binary exposes the same pipelines on tree files.

// Indexed loops are the house style for the numeric kernels, and negated
// comparisons like `!(a > b)` are deliberate: they fail closed on NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod func;
pub mod io;
pub mod ops;
pub mod report;
pub mod solve;
pub mod tree;

pub use bounds::{
    closed_form_bounds, iterate_ii, lower_bound, path_indicator_function, sqrt_phi_function,
    upper_bound, BoundCertificate, BoundKind, ClosedFormBounds,
};
pub use error::{Error, Result};
pub use func::{check_domain, DomainCheck, DomainTag, Family, VertexFunction};
pub use solve::{
    build_dirichlet_matrix, dense_reference_solve, eigen_ratio, flat_extension, lambda0_sequence,
    smallest_eigenpair, DirichletMatrix, EigenPair,
};
pub use tree::{collapse, random_tree, Branching, CollapsedTree, EdgeSpec, Measure, RootedTree};
