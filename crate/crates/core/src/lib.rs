//! Exact-arithmetic toolkit for graded branching graphs and Markov links.
//!
//! The crate builds finite truncations of (possibly infinite) graded
//! branching graphs, equips them with links (backward Markov kernels),
//! computes kappa-dimensions and edge weights, constructs the
//! weight-extended graph with its translation group action, transports
//! coherent systems to power-scaling harmonic functions on the extension,
//! and materialises finite windows of the associated dimension-group
//! (K0) data with its scaling functionals.
//!
//! All arithmetic is exact: scalars are arbitrary-precision rationals,
//! dimensions are arbitrary-precision naturals, and group elements are
//! prime-exponent vectors. Every public operation is deterministic.
//!
//! Modules:
//! - [`ratio`]: exact rational scalar with `"p/q"` text form
//! - [`graph`]: vertices, providers, finite truncations, dimensions
//! - [`link`]: links, standard link, kappa-dimensions, weights, weight group
//! - [`group`]: multiplicative group elements as prime-exponent vectors
//! - [`extension`]: the weight-extended graph and its translation action
//! - [`harmonic`]: coherent systems and power-scaling harmonic functions
//! - [`k0`]: dimension-group windows, embeddings, cone, scaling functionals
//! - [`uq`]: the Gelfand-Tsetlin graph with q-geometric edge weights
//! - [`io`]: JSON and DOT serialisation of every artifact
//! - [`selftest`]: the machine-checkable invariant suite

pub mod error;
pub mod extension;
pub mod factor;
pub mod graph;
pub mod group;
pub mod harmonic;
pub mod io;
pub mod k0;
pub mod link;
pub mod ratio;
pub mod report;
pub mod sample;
pub mod selftest;
pub mod uq;

pub use error::Error;
pub use extension::{ExtTruncation, ExtVertex};
pub use graph::{GraphProvider, LevelSeed, PascalGraph, Truncation, VertexId, VertexKey};
pub use group::GroupElement;
pub use harmonic::{CoherentSystem, ExtendedHarmonic};
pub use k0::{K0Element, K0Functional};
pub use link::{Link, WeightSystem};
pub use ratio::Ratio;
pub use report::{Report, Status};
pub use uq::{QParam, Signature, UqGraph};
