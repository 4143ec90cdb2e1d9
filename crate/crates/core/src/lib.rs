//! Simulator and analysis workbench for BB84 with information bits encoded
//! only in the z basis (BB84-INFO-z).
//!
//! The crate runs the protocol against exactly modeled collective attacks,
//! computes Eve's states and their trace distances by brute force at small
//! block lengths, and evaluates the finite-key security and reliability
//! bounds, the key rate and the asymptotic threshold curve.
//!
//! ```
//! use bb84z::bounds::symmetric_threshold;
//!
//! let p = symmetric_threshold();
//! assert!((p - 0.0756).abs() < 1e-3);
//! ```
//!
//! The `examples/` directory has one runnable program per capability, and
//! the `bb84z` binary exposes the same functionality from the shell.

pub mod bounds;
pub mod cli;
pub mod codes;
pub mod error;
pub mod gf2;
pub mod protocol;
pub mod quantum;
pub mod stats;
pub mod verify;

pub use codes::{make_code_pair, CodePair};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector};
pub use protocol::{run_protocol, ProtocolParams, Transcript};
pub use quantum::{AttackModel, BasisTag, DensityMatrix};
