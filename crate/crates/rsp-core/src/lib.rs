//! Desk-scale simulation and numerical optimization toolkit for remote
//! state preparation: randomizing unitary sets, the universal r.s.p.
//! protocol and its relatives, ebit/cbit trade-off curves for pure and
//! entangled ensembles, and the method-of-types machinery backing them.
//!
//! Modules map onto the pieces of the problem:
//! - [`qmath`]: states, entropies, fidelities, multipartite operations;
//! - [`sampling`]: seeded random sources and large-deviation bounds;
//! - [`randomize`]: randomizing unitary sets, ε-nets, the
//!   quantum–classical description scheme and its lower bound;
//! - [`protocols`]: end-to-end protocol simulation with resource
//!   accounting;
//! - [`tradeoff`]: entropic trade-off curve evaluation and minimization;
//! - [`typicality`]: types, typical projectors, concentration checks;
//! - [`verify`]: the acceptance battery shared by tests and the CLI.

pub mod error;
pub mod linalg;
pub mod qmath;
pub mod sampling;
pub mod stats;

pub mod protocols;
pub mod randomize;
pub mod tradeoff;
pub mod typicality;
pub mod verify;

pub use error::{Error, Result};

/// Library version reported in CLI meta blocks.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
