//! Online noise injection, `D = clamp(Q + gain * N)`, one pixel at a time.
//!
//! The noise pattern for a luma pixel depends only on its own quantized
//! codeword: the BLUT slope at that codeword picks the transition
//! probability index and the BLUT region picks the gain. Noise samples are
//! read from a bank block tiled over the frame with a per-frame offset, so
//! all randomness lives in the bank and the offset schedule.

use crate::blut::{partition, probability_index, slopes, Blut, Region, RegionPartition, SlopeProfile, BLUT_LEN};
use crate::error::{invalid_arg, Error, Result};
use crate::image::{clamp_codeword, max_codeword, Channel, CodePlane, PlanarImage, Plane};
use crate::pattern::{NoiseBlock, PatternBank};
use crate::rng::derive_seed;
use crate::{par, PROBABILITY_COUNT};

/// Bit depth of the luma codewords a BLUT indexes.
pub const BLUT_BIT_DEPTH: u8 = 10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionGains {
    pub down: f64,
    pub mid: f64,
    pub high: f64,
    pub up: f64,
}

impl Default for RegionGains {
    fn default() -> Self {
        Self {
            down: 0.0,
            mid: 1.0,
            high: 1.0,
            up: 0.0,
        }
    }
}

impl RegionGains {
    pub fn get(&self, region: Region) -> f64 {
        match region {
            Region::Down => self.down,
            Region::Mid => self.mid,
            Region::High => self.high,
            Region::Up => self.up,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChromaPolicy {
    Off,
    /// Same pattern index and gain for every chroma pixel.
    Fixed { k: usize, gain: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InjectionConfig {
    /// Scalar gain on the noise pattern, in codewords per noise unit.
    pub gain_base: f64,
    /// Per-region multipliers on `gain_base`.
    pub region_gains: RegionGains,
    pub chroma: ChromaPolicy,
    /// Selects the bank variant (`frame_index mod V`) and the tile offset.
    pub frame_index: u64,
    pub tile_offset_seed: u64,
}

pub const DEFAULT_CHROMA_K: usize = 4;

impl Default for InjectionConfig {
    fn default() -> Self {
        Self::with_gain(1.0)
    }
}

impl InjectionConfig {
    /// Defaults for a given base gain: mid/high regions at full gain, clipped
    /// regions untouched, chroma at the middle pattern and half gain.
    pub fn with_gain(gain_base: f64) -> Self {
        Self {
            gain_base,
            region_gains: RegionGains::default(),
            chroma: ChromaPolicy::Fixed {
                k: DEFAULT_CHROMA_K,
                gain: 0.5 * gain_base,
            },
            frame_index: 0,
            tile_offset_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.region_gains;
        let all = [self.gain_base, g.down, g.mid, g.high, g.up];
        if all.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(invalid_arg("gains must be finite and non-negative"));
        }
        if let ChromaPolicy::Fixed { k, gain } = self.chroma {
            if k >= PROBABILITY_COUNT {
                return Err(invalid_arg(format!("chroma pattern index {k} out of range")));
            }
            if !(gain.is_finite() && gain >= 0.0) {
                return Err(invalid_arg("chroma gain must be finite and non-negative"));
            }
        }
        Ok(())
    }
}

/// Pattern index and gain for a quantized luma codeword. `None` means the
/// pixel is left untouched.
pub fn select_pattern(t: u16, part: &RegionPartition, slopes: &SlopeProfile, cfg: &InjectionConfig) -> (Option<usize>, f64) {
    let gain = cfg.gain_base * cfg.region_gains.get(part.region(t));
    if gain == 0.0 {
        return (None, 0.0);
    }
    match probability_index(slopes.slope(t), slopes.max_slope()) {
        Ok(k) => (Some(k), gain),
        Err(_) => (None, 0.0),
    }
}

/// Per-frame tile offset `(dx, dy)` into a block of the given side.
pub fn tile_offset(block_side: usize, cfg: &InjectionConfig) -> (usize, usize) {
    let h = derive_seed(cfg.tile_offset_seed, &[cfg.frame_index]);
    let side = block_side as u64;
    ((h % side) as usize, ((h >> 32) % side) as usize)
}

fn check_bank(bank: &PatternBank, cfg: &InjectionConfig) -> Result<usize> {
    if bank.block_side() == 0 {
        return Err(Error::InvalidBank("block side is zero".into()));
    }
    let variant = (cfg.frame_index % bank.variant_count() as u64) as usize;
    if bank.blocks().len() < PROBABILITY_COUNT * bank.variant_count() {
        return Err(Error::InvalidBank(format!("variant {variant} missing")));
    }
    Ok(variant)
}

/// Adds `gain * block` to every pixel whose codeword has a selection;
/// `select` is indexed by codeword.
fn apply(
    plane: &CodePlane,
    bit_depth: u8,
    bank: &PatternBank,
    variant: usize,
    offset: (usize, usize),
    select: &[(Option<u8>, f64)],
) -> CodePlane {
    let side = bank.block_side();
    let blocks: Vec<&NoiseBlock> = (0..PROBABILITY_COUNT).map(|k| bank.block(k, variant)).collect();
    let width = plane.width();
    // x -> column inside the block, shared by every row
    let cols: Vec<usize> = (0..width).map(|x| (x + offset.0) % side).collect();
    let mut out = plane.clone();
    par::for_each_row_mut(out.as_mut_slice(), width, |y, row| {
        let by = (y + offset.1) % side;
        for (x, px) in row.iter_mut().enumerate() {
            let (k, gain) = select[*px as usize];
            if let Some(k) = k {
                let n = blocks[k as usize].get(cols[x], by) as f64;
                *px = clamp_codeword(*px as f64 + gain * n, bit_depth);
            }
        }
    });
    out
}

/// Injects noise into a 10-bit luma plane.
pub fn inject_luma(
    q: &CodePlane,
    part: &RegionPartition,
    slopes: &SlopeProfile,
    bank: &PatternBank,
    cfg: &InjectionConfig,
) -> Result<CodePlane> {
    cfg.validate()?;
    let variant = check_bank(bank, cfg)?;
    if let Some(v) = q.as_slice().iter().find(|&&v| v as usize >= BLUT_LEN) {
        return Err(invalid_arg(format!("luma codeword {v} outside the 10-bit BLUT domain")));
    }
    let select: Vec<(Option<u8>, f64)> = (0..BLUT_LEN as u16)
        .map(|t| {
            let (k, g) = select_pattern(t, part, slopes, cfg);
            (k.map(|k| k as u8), g)
        })
        .collect();
    Ok(apply(q, BLUT_BIT_DEPTH, bank, variant, tile_offset(bank.block_side(), cfg), &select))
}

/// Injects noise into a chroma plane according to `cfg.chroma`; no BLUT
/// is involved.
pub fn inject_chroma(plane: &CodePlane, bit_depth: u8, bank: &PatternBank, cfg: &InjectionConfig) -> Result<CodePlane> {
    cfg.validate()?;
    let (k, gain) = match cfg.chroma {
        ChromaPolicy::Off => return Ok(plane.clone()),
        ChromaPolicy::Fixed { gain, .. } if gain == 0.0 => return Ok(plane.clone()),
        ChromaPolicy::Fixed { k, gain } => (k, gain),
    };
    let variant = check_bank(bank, cfg)?;
    let levels = max_codeword(bit_depth) as usize + 1;
    let select = vec![(Some(k as u8), gain); levels];
    Ok(apply(plane, bit_depth, bank, variant, tile_offset(bank.block_side(), cfg), &select))
}

/// Region partition and slopes of a frame's BLUT, computed once per frame.
#[derive(Clone, Debug)]
pub struct FrameCurve {
    pub partition: RegionPartition,
    pub slopes: SlopeProfile,
}

impl FrameCurve {
    pub fn new(blut: &Blut) -> Result<Self> {
        let partition = partition(blut, blut.highlight_threshold())?;
        let slopes = slopes(blut, &partition);
        Ok(Self { partition, slopes })
    }
}

pub fn inject_frame(q: &PlanarImage, blut: &Blut, bank: &PatternBank, cfg: &InjectionConfig) -> Result<PlanarImage> {
    if q.bit_depth() != BLUT_BIT_DEPTH {
        return Err(invalid_arg(format!(
            "frame is {}-bit, the BLUT covers {BLUT_BIT_DEPTH}-bit luma",
            q.bit_depth()
        )));
    }
    let curve = FrameCurve::new(blut)?;
    let y = inject_luma(q.plane(Channel::Y), &curve.partition, &curve.slopes, bank, cfg)?;
    let cb = inject_chroma(q.plane(Channel::Cb), q.bit_depth(), bank, cfg)?;
    let cr = inject_chroma(q.plane(Channel::Cr), q.bit_depth(), bank, cfg)?;
    PlanarImage::new(q.bit_depth(), [y, cb, cr])
}

/// Applies the BLUT to luma; chroma is normalized linearly by its codeword
/// range.
pub fn to_hdr(img: &PlanarImage, blut: &Blut) -> Result<crate::image::HdrImage> {
    if img.bit_depth() != BLUT_BIT_DEPTH {
        return Err(invalid_arg("HDR mapping needs a 10-bit frame"));
    }
    let scale = 1.0 / (1u32 << img.bit_depth()) as f64;
    let y = img.plane(Channel::Y).map(|t| blut.lookup(t));
    let norm = |p: &CodePlane| -> Plane<f64> { p.map(|v| v as f64 * scale) };
    crate::image::HdrImage::new([y, norm(img.plane(Channel::Cb)), norm(img.plane(Channel::Cr))])
}
