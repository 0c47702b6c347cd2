//! Adaptive dithering of quantized SDR images ahead of SDR-to-HDR inverse
//! tone mapping.
//!
//! The pipeline has two stages:
//!
//! * **Offline**: [`pattern::build_bank`] lays two-state Markov-Gaussian
//!   noise ([`markov`]) along concentric circles, breaks up the circular
//!   structure by swapping congruent Voronoi cells between the four
//!   quadrants of each block, and stores one set of blocks per transition
//!   probability in a [`pattern::PatternBank`] file.
//! * **Online**: [`inject::inject_frame`] adds bank noise to each pixel of a
//!   quantized frame. The pattern is chosen from the slope of the backward
//!   look-up table ([`blut`]) at the pixel's own codeword, so no neighbor is
//!   ever read.
//!
//! [`baselines`] holds the plain and low-pass Gaussian comparators and
//! [`metrics`] objective banding and pattern statistics.

pub mod baselines;
pub mod blut;
pub mod error;
pub mod image;
pub mod inject;
pub mod markov;
pub mod metrics;
pub mod par;
pub mod pattern;
pub mod pnm;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};

/// Number of transition probabilities in a bank.
pub const PROBABILITY_COUNT: usize = 10;

/// Intra-state probability of bank index `k`: `0.545 + 0.045 k`.
///
/// Evaluated as `(545 + 45 k) / 1000` so each value is the correctly
/// rounded double of its decimal (index 6 is exactly `0.815`).
pub fn transition_probability(k: usize) -> f64 {
    assert!(k < PROBABILITY_COUNT, "probability index {k} out of range");
    (545 + 45 * k) as f64 / 1000.0
}

/// All ten bank probabilities in index order.
pub fn transition_probabilities() -> [f64; PROBABILITY_COUNT] {
    std::array::from_fn(transition_probability)
}
