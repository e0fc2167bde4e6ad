//! Signed blocky decompositions of integer matrices whose factorization norm
//! is bounded.
//!
//! A *blocky* matrix is a 0/1 matrix whose support is a disjoint union of
//! combinatorial rectangles. The [`pipeline::decompose`] driver writes an
//! integer matrix as a signed sum of blocky matrices by repeatedly peeling off
//! a blocky part that lowers the squared `γ₂` norm of the remainder.
//!
//! Modules, roughly in dependency order:
//! - [`matrix`]: dense integer and real matrices, rounding.
//! - [`blocky`]: rectangles, blocky matrices, signed sums.
//! - [`factorize`]: `γ₂` upper bounds by explicit factorization, lower bounds.
//! - [`littlestone`]: Littlestone dimensions and stabilizers.
//! - [`partition`]: greedy column partition and the averaging lemma.
//! - [`pipeline`]: the decomposition driver and the exact complexity oracle.
//! - [`generate`] and [`format`](mod@format): seeded inputs and file formats.
//! - [`suite`]: the reproduction battery.

pub mod blocky;
pub mod error;
pub mod factorize;
pub mod format;
pub mod generate;
pub mod littlestone;
pub mod matrix;
pub mod partition;
pub mod pipeline;
pub mod suite;

pub use error::{Error, Result};
