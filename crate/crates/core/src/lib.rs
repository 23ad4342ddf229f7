//! Group-sparse generative models, their exact ReLU-network realizations,
//! information-theoretic recovery bounds, and the Gaussian sensing
//! simulator used to probe them.
//!
//! Layout:
//! * [`model`]: the block-sparse triangle-wave generator, its inverse, and
//!   signed support enumeration.
//! * [`relu`]: explicit-weight ReLU networks, combinators, and the
//!   constructions that realize the generator at several depth/width
//!   trade-offs.
//! * [`bounds`]: closed-form packing/covering/information bounds plus the
//!   small-scale exhaustive oracles that cross-check them.
//! * [`sensing`]: Gaussian measurement simulation, exhaustive and latent
//!   decoders, Monte Carlo risk estimation.
//! * [`rng`]: counter-based pseudo-randomness with named, disjoint
//!   streams, so every experiment is replayable.

pub mod bounds;
pub mod error;
pub mod model;
pub mod relu;
pub mod rng;
pub mod sensing;

pub use error::{Error, Result};
