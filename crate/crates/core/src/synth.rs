//! Synthetic inputs for tests, benchmarks and the demo.

use crate::image::{max_codeword, CodePlane, PlanarImage, Plane};
use crate::markov::{MarkovChain, MarkovParams};
use crate::Result;

/// Horizontal luma ramp spanning the full codeword range; with
/// `width == 2^bit_depth` every column holds its own codeword. Chroma
/// planes sit at mid-range.
pub fn ramp_image(width: usize, height: usize, bit_depth: u8) -> Result<PlanarImage> {
    let levels = max_codeword(bit_depth) as usize + 1;
    let y = Plane::from_fn(width, height, |x, _| ((x * levels) / width.max(1)) as u16);
    let c: CodePlane = Plane::filled(width, height, (levels / 2) as u16);
    PlanarImage::new(bit_depth, [y, c.clone(), c])
}

/// Markov-Gaussian noise filled row by row from one chain, the straight
/// striped pattern curved noise is meant to replace.
pub fn row_major_markov(width: usize, height: usize, params: &MarkovParams, seed: u64) -> Result<Vec<f32>> {
    let chain = MarkovChain::new(*params, seed)?;
    Ok(chain.take(width * height).map(|v| v as f32).collect())
}
