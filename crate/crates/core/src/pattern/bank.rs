use super::circular::rasterize_circular;
use super::curve::curve_block;
use super::voronoi::SiteSet;
use super::NoiseBlock;
use crate::error::{invalid_arg, Error, Result};
use crate::markov::MarkovParams;
use crate::rng::{derive_seed, Rng};
use crate::{par, transition_probability, PROBABILITY_COUNT};

pub const DEFAULT_BLOCK_SIDE: usize = 200;
pub const DEFAULT_SITE_COUNT: usize = 300;
pub const DEFAULT_VARIANTS: usize = 8;

// sub-stream labels under a block's sub-seed
const STREAM_CHAIN: u64 = 0;
const STREAM_SITES: u64 = 1;
const STREAM_SWAP: u64 = 2;

/// Everything needed to regenerate a bank bit for bit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BankConfig {
    pub block_side: usize,
    pub site_count: usize,
    pub variants: usize,
    /// Emission parameters; `p` is replaced per probability index.
    pub params: MarkovParams,
    pub master_seed: u64,
}

impl Default for BankConfig {
    fn default() -> Self {
        Self {
            block_side: DEFAULT_BLOCK_SIDE,
            site_count: DEFAULT_SITE_COUNT,
            variants: DEFAULT_VARIANTS,
            params: MarkovParams::default(),
            master_seed: 0,
        }
    }
}

impl BankConfig {
    pub fn validate(&self) -> Result<()> {
        if self.block_side < 2 || self.block_side % 2 != 0 || self.block_side > u16::MAX as usize {
            return Err(invalid_arg(format!("block side {} must be even and in 2..=65534", self.block_side)));
        }
        let half = self.block_side / 2;
        if self.site_count == 0 || self.site_count > half * half {
            return Err(invalid_arg(format!(
                "site count {} must be in 1..={} for block side {}",
                self.site_count,
                half * half,
                self.block_side
            )));
        }
        if self.variants == 0 || self.variants > u8::MAX as usize {
            return Err(invalid_arg(format!("variant count {} must be in 1..=255", self.variants)));
        }
        self.params.with_p(0.5).validate()
    }
}

/// Sub-seed of block `(k, variant)`.
pub fn block_seed(master_seed: u64, k: usize, variant: usize) -> u64 {
    derive_seed(master_seed, &[k as u64, variant as u64])
}

/// Curved noise blocks for each of the ten transition probabilities and
/// each per-frame variant. Immutable once built or loaded.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternBank {
    block_side: usize,
    variant_count: usize,
    master_seed: u64,
    /// `k`-major: block `(k, v)` at `k * variant_count + v`.
    blocks: Vec<NoiseBlock>,
    config: Option<BankConfig>,
}

impl PatternBank {
    /// Assembles a bank from pre-built blocks, checking shape consistency.
    pub fn from_blocks(block_side: usize, variant_count: usize, master_seed: u64, blocks: Vec<NoiseBlock>) -> Result<Self> {
        if block_side == 0 || variant_count == 0 {
            return Err(Error::InvalidBank("block side and variant count must be positive".into()));
        }
        if blocks.len() != PROBABILITY_COUNT * variant_count {
            return Err(Error::InvalidBank(format!(
                "expected {} blocks, found {}",
                PROBABILITY_COUNT * variant_count,
                blocks.len()
            )));
        }
        if let Some(b) = blocks.iter().find(|b| b.side() != block_side) {
            return Err(Error::InvalidBank(format!("block of side {} in a side-{block_side} bank", b.side())));
        }
        Ok(Self {
            block_side,
            variant_count,
            master_seed,
            blocks,
            config: None,
        })
    }

    pub fn block_side(&self) -> usize {
        self.block_side
    }

    pub fn variant_count(&self) -> usize {
        self.variant_count
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn probabilities(&self) -> [f64; PROBABILITY_COUNT] {
        crate::transition_probabilities()
    }

    /// Generation settings, when the bank was built in this process. Bank
    /// files do not carry site count or emission parameters.
    pub fn config(&self) -> Option<&BankConfig> {
        self.config.as_ref()
    }

    pub fn block(&self, k: usize, variant: usize) -> &NoiseBlock {
        &self.blocks[k * self.variant_count + variant]
    }

    pub fn blocks(&self) -> &[NoiseBlock] {
        &self.blocks
    }

    pub fn bit_eq(&self, other: &PatternBank) -> bool {
        self.block_side == other.block_side
            && self.variant_count == other.variant_count
            && self.master_seed == other.master_seed
            && self.blocks.len() == other.blocks.len()
            && self.blocks.iter().zip(&other.blocks).all(|(a, b)| {
                a.bit_eq(b) && a.p().to_bits() == b.p().to_bits() && a.seed() == b.seed()
            })
    }
}

/// Generates one curved block for `(k, variant)` from its sub-seed.
pub fn build_block(cfg: &BankConfig, k: usize, variant: usize) -> Result<NoiseBlock> {
    let sub = block_seed(cfg.master_seed, k, variant);
    let params = cfg.params.with_p(transition_probability(k));
    let circular = rasterize_circular(cfg.block_side, &params, derive_seed(sub, &[STREAM_CHAIN]))?;
    let mut site_rng = Rng::new(derive_seed(sub, &[STREAM_SITES]));
    let sites = SiteSet::random(cfg.block_side / 2, cfg.site_count, &mut site_rng)?;
    let curved = curve_block(&circular, &sites, derive_seed(sub, &[STREAM_SWAP]))?;
    Ok(NoiseBlock::new(
        curved.side(),
        curved.values().to_vec(),
        curved.kind(),
        params.p,
        sub,
    ))
}

/// Builds the full bank; blocks are generated in parallel and independently
/// seeded, so the result does not depend on the thread count.
pub fn build_bank(cfg: &BankConfig) -> Result<PatternBank> {
    cfg.validate()?;
    let blocks = par::map_indexed(PROBABILITY_COUNT * cfg.variants, |i| {
        build_block(cfg, i / cfg.variants, i % cfg.variants)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut bank = PatternBank::from_blocks(cfg.block_side, cfg.variants, cfg.master_seed, blocks)?;
    bank.config = Some(*cfg);
    Ok(bank)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BankConfig {
        BankConfig {
            block_side: 32,
            site_count: 12,
            variants: 2,
            master_seed: 7,
            ..Default::default()
        }
    }

    #[test]
    fn bank_shape_and_probabilities() {
        let bank = build_bank(&small()).unwrap();
        assert_eq!(bank.blocks().len(), 20);
        assert_eq!(bank.block(6, 1).p(), 0.815);
        for k in 0..PROBABILITY_COUNT {
            for v in 0..2 {
                assert_eq!(bank.block(k, v).p(), transition_probability(k));
                assert_eq!(bank.block(k, v).seed(), block_seed(7, k, v));
            }
        }
        assert!(!bank.block(0, 0).bit_eq(bank.block(0, 1)));
    }

    #[test]
    fn deterministic() {
        let a = build_bank(&small()).unwrap();
        let b = build_bank(&small()).unwrap();
        assert!(a.bit_eq(&b));
        let c = build_bank(&BankConfig { master_seed: 8, ..small() }).unwrap();
        assert!(!a.bit_eq(&c));
    }

    #[test]
    fn validation() {
        assert!(BankConfig { block_side: 31, ..small() }.validate().is_err());
        assert!(BankConfig { variants: 0, ..small() }.validate().is_err());
        assert!(BankConfig { site_count: 0, ..small() }.validate().is_err());
        assert!(BankConfig { site_count: 257, ..small() }.validate().is_err());
        assert!(BankConfig::default().validate().is_ok());
        assert!(PatternBank::from_blocks(4, 1, 0, vec![NoiseBlock::constant(4, 0.0)]).is_err());
    }
}
