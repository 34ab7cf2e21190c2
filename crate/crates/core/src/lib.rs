//! Rosen continued fractions as paths in the Farey graphs of Hecke groups.
//!
//! - [`algebraic`]: exact arithmetic in Q(λ_q).
//! - [`moebius`]: the Hecke group acting on the boundary circle.
//! - [`farey`]: adjacency, faces, parents, q-chains.
//! - [`cf`]: evaluation, expansion, geodesic tests, rewrites, enumeration and
//!   infinite expansions.
//! - [`oracle`]: brute-force ground truth used to cross-check [`cf`].

pub mod algebraic;
pub mod cf;
mod error;
pub mod farey;
pub mod moebius;
pub mod oracle;

pub use algebraic::{make_context, FieldElement, HeckeIndex, QContext, RealInterval};
pub use cf::{CoefficientStream, PathOfConvergents, RosenCF};
pub use error::{Error, ErrorKind, Result};
pub use farey::{Face, QChain, Vertex};
pub use moebius::{BoundaryPoint, CyclicOrder, Generator, GroupElement};
pub use oracle::ChainGraph;
