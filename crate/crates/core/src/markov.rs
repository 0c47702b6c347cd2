//! Two-state Markov-Gaussian noise.
//!
//! State 0 emits `N(mu0, sigma0)`, state 1 emits `N(mu1, sigma1)`; after each
//! sample the chain keeps its state with probability `p` and switches with
//! probability `1 - p`. With symmetric means the stationary output has zero
//! mean while runs of one state give locally non-zero means.
//!
//! Random draw order (fixed, banks depend on it): one fair coin for the
//! initial state, then per sample a Gaussian draw, and before every sample
//! after the first one uniform for the transition.

use crate::error::{invalid_arg, Result};
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarkovParams {
    /// Intra-state (stay) probability.
    pub p: f64,
    pub mu0: f64,
    /// Standard deviation of state 0.
    pub sigma0: f64,
    pub mu1: f64,
    pub sigma1: f64,
}

impl Default for MarkovParams {
    fn default() -> Self {
        Self {
            p: 0.815,
            mu0: 2.0,
            sigma0: 1.0,
            mu1: -2.0,
            sigma1: 1.0,
        }
    }
}

impl MarkovParams {
    pub fn with_p(self, p: f64) -> Self {
        Self { p, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(invalid_arg(format!("intra-state probability {} outside (0, 1)", self.p)));
        }
        if !(self.sigma0 >= 0.0 && self.sigma1 >= 0.0) {
            return Err(invalid_arg("standard deviations must be non-negative"));
        }
        if !(self.mu0.is_finite() && self.mu1.is_finite() && self.sigma0.is_finite() && self.sigma1.is_finite()) {
            return Err(invalid_arg("means and deviations must be finite"));
        }
        Ok(())
    }

    #[inline]
    fn emission(&self, state: u8) -> (f64, f64) {
        if state == 0 {
            (self.mu0, self.sigma0)
        } else {
            (self.mu1, self.sigma1)
        }
    }
}

/// Stays in `current` when `u < p`, otherwise switches.
#[inline]
pub fn next_state(current: u8, p: f64, u: f64) -> u8 {
    if u < p {
        current
    } else {
        1 - current
    }
}

/// One Gaussian draw for `state`. A zero deviation returns the mean exactly.
#[inline]
pub fn sample_state(state: u8, params: &MarkovParams, rng: &mut Rng) -> f64 {
    let (mu, sigma) = params.emission(state);
    let z = rng.standard_normal();
    if sigma == 0.0 {
        mu
    } else {
        mu + sigma * z
    }
}

/// A running chain. Not `Sync`-shared; move it between threads if needed.
#[derive(Clone, Debug)]
pub struct MarkovChain {
    params: MarkovParams,
    state: u8,
    started: bool,
    rng: Rng,
}

impl MarkovChain {
    pub fn new(params: MarkovParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let mut rng = Rng::new(seed);
        let state = rng.coin() as u8;
        Ok(Self {
            params,
            state,
            started: false,
            rng,
        })
    }

    pub fn state(&self) -> u8 {
        self.state
    }

    /// Advances one pixel and returns `(state, value)`.
    #[inline]
    pub fn step(&mut self) -> (u8, f64) {
        if self.started {
            let u = self.rng.next_f64();
            self.state = next_state(self.state, self.params.p, u);
        }
        self.started = true;
        let v = sample_state(self.state, &self.params, &mut self.rng);
        (self.state, v)
    }
}

impl Iterator for MarkovChain {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.step().1)
    }
}

pub fn generate_sequence(params: &MarkovParams, length: usize, seed: u64) -> Result<Vec<f64>> {
    if length == 0 {
        return Err(invalid_arg("sequence length must be at least 1"));
    }
    Ok(MarkovChain::new(*params, seed)?.take(length).collect())
}
