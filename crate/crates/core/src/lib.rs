//! Witness constructions for stateless Ethereum clients.
//!
//! Two designs are implemented side by side so that they can be measured
//! under one methodology:
//!
//! * [`verkle`]: an arity-256 Verkle tree whose witnesses consist of the
//!   proven leaves, the commitments along the access paths and a single
//!   aggregated [`commitment::MultiProof`].
//! * [`merkle`] + [`circuit`] + [`backend`]: a binary Merkle tree over an
//!   algebraic permutation hash, where every branch is encoded as a rank-1
//!   constraint system and proven by a transparent inner-product argument.
//!
//! [`sizing`] holds closed-form witness-size models and [`bench`] is the
//! measurement harness used by the `witness-bench` binary.

pub mod algebra;
pub mod backend;
pub mod bench;
pub mod circuit;
pub mod commitment;
mod error;
pub mod merkle;
pub(crate) mod parallel;
pub mod sizing;
pub mod verkle;

pub use error::{Error, Result};
