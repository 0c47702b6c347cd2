//! Offline noise pattern generation.
//!
//! A block starts as *circular* noise: one continuous Markov-Gaussian
//! sequence written along concentric circles, outermost first. It becomes
//! *curved* noise once congruent Voronoi cells are swapped among its four
//! quadrants. A [`PatternBank`] holds curved blocks for every transition
//! probability and a carousel of per-frame variants.

mod bank;
mod bankfile;
mod circular;
mod curve;
mod voronoi;

pub use bank::{block_seed, build_bank, build_block, BankConfig, PatternBank, DEFAULT_BLOCK_SIDE, DEFAULT_SITE_COUNT, DEFAULT_VARIANTS};
pub use bankfile::{decode_bank, encode_bank, load_bank, save_bank, BANK_MAGIC, BANK_VERSION};
pub use circular::{circle_layout, rasterize_circular, required_length, CircleSpec};
pub use curve::{apply_cell_swap, curve_block, draw_swap_choices, SwapChoices};
pub use voronoi::{voronoi_assign, CellMap, SiteSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    Circular,
    Curved,
}

/// A square grid of noise samples in codeword units.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseBlock {
    side: usize,
    values: Vec<f32>,
    kind: BlockKind,
    p: f64,
    seed: u64,
}

impl NoiseBlock {
    pub(crate) fn new(side: usize, values: Vec<f32>, kind: BlockKind, p: f64, seed: u64) -> Self {
        debug_assert_eq!(values.len(), side * side);
        Self {
            side,
            values,
            kind,
            p,
            seed,
        }
    }

    /// A block holding one value everywhere; handy for tests and demos.
    pub fn constant(side: usize, value: f32) -> Self {
        Self::new(side, vec![value; side * side], BlockKind::Curved, 0.0, 0)
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn kind(&self) -> BlockKind {
        self.kind
    }

    /// Transition probability the block was generated with.
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.values[y * self.side + x]
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    /// Same values, bitwise.
    pub fn bit_eq(&self, other: &NoiseBlock) -> bool {
        self.side == other.side
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}
