//! Combinatorial classification of the stable categories of graded maximal
//! Cohen–Macaulay modules over (±1)-skew quadric hypersurfaces.
//!
//! A sign matrix `ε` is encoded by the graph [`Graph`] whose edges are its
//! `+1` entries. From the graph alone the crate computes
//!
//! * the normal form `G(α, β)` reached by mutations and relative mutations
//!   ([`mutation`]),
//! * the exponent `r` of `D^b(mod k^(2^r))`, both as `β - 1` and as a GF(2)
//!   nullity ([`classify`], [`gf2`]),
//! * the `P^1` components of the point scheme and the bound
//!   `ℓ ≤ C(r+1, 2)` ([`point_scheme`]),
//!
//! and [`verify`] checks all of these relations across whole graph spaces.

pub mod classify;
pub mod error;
pub mod gf2;
pub mod graph;
pub mod mutation;
pub mod point_scheme;
pub mod verify;

pub use classify::{classify, Classification};
pub use error::{Error, Result};
pub use gf2::BitMatrix;
pub use graph::{canonical_disjoint, EpsilonMatrix, Graph, VertexSet};
pub use mutation::{reduce_to_normal_form, NormalForm, Operation, ReductionTrace};
pub use point_scheme::{theorem4_report, PointSchemeReport};
pub use verify::{Check, CheckSuite, VerifyReport};
