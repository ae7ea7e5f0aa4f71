//! Core primitives for a phase-noise quantum random number generator
//! software twin: deterministic simulation of the laser → unbalanced
//! interferometer → photodiode → sampler chain, operating-point analysis,
//! and the post-processing stack (quantization, min-entropy estimation,
//! Toeplitz extraction, statistical randomness testing).
//!
//! The crate is `no_std`-compatible (with `alloc`); all floating-point
//! transcendentals go through [`libm`] so results are bit-identical across
//! platforms. File formats, CLI, and multi-threaded streaming live in the
//! companion `pqn-cli` crate.
//!
//! Enable the `std` feature to get `std::error::Error` on [`Error`].

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod bits;
pub mod digitize;
pub mod entropy;
pub mod error;
pub mod extractor;
mod fft;
pub mod randtests;
pub mod rng;
pub mod seed;
pub mod sim;
pub mod special;
pub mod spectral;
pub mod timing;
pub mod variance;

pub use error::{Error, Result};
