//! Gradient-based edge detection on NEQR-encoded grayscale images, executed
//! on an embedded dense statevector simulator.
//!
//! The crate is organised bottom-up: [`sim`] is the simulator and circuit IR,
//! [`arith`] holds the reversible arithmetic builders, [`image`] handles PGM
//! I/O and the NEQR oracle, [`threshold`] the phase-oracle partitioning,
//! [`pipeline`] wires the stages into a full run, and [`reference`] is the
//! independent classical implementation used to check it.

pub mod arith;
pub mod cli;
pub mod error;
pub mod image;
pub mod pipeline;
pub mod reference;
pub mod sim;
pub mod threshold;

pub use error::{Error, Result};
