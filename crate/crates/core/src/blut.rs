//! Backward look-up table (SDR luma codeword -> normalized HDR intensity):
//! region partition, per-codeword slopes and the slope -> pattern mapping.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::PROBABILITY_COUNT;

/// Number of SDR codewords covered by a BLUT (10-bit luma).
pub const BLUT_LEN: usize = 1024;
pub const DEFAULT_HIGHLIGHT_THRESHOLD: f64 = 0.625;

/// A monotone map from 10-bit SDR codewords to HDR intensities in `[0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Blut {
    entries: Vec<f64>,
    highlight_threshold: f64,
}

#[derive(Serialize, Deserialize)]
struct BlutDoc {
    entries: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    highlight_threshold: Option<f64>,
}

impl Blut {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        Self::with_threshold(entries, DEFAULT_HIGHLIGHT_THRESHOLD)
    }

    pub fn with_threshold(entries: Vec<f64>, highlight_threshold: f64) -> Result<Self> {
        if entries.len() != BLUT_LEN {
            return Err(Error::InvalidBlut(format!(
                "expected {BLUT_LEN} entries, found {}",
                entries.len()
            )));
        }
        if let Some((t, v)) = entries.iter().enumerate().find(|(_, v)| !(0.0..1.0).contains(*v)) {
            return Err(Error::InvalidBlut(format!("entry {t} = {v} outside [0, 1)")));
        }
        if let Some(t) = (1..BLUT_LEN).find(|&t| entries[t] < entries[t - 1]) {
            return Err(Error::InvalidBlut(format!(
                "not monotone: entry {t} = {} < entry {} = {}",
                entries[t],
                t - 1,
                entries[t - 1]
            )));
        }
        check_threshold(highlight_threshold)?;
        Ok(Self {
            entries,
            highlight_threshold,
        })
    }

    pub fn from_fn(f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new((0..BLUT_LEN).map(f).collect())
    }

    /// `entries[t] = t / 1024`.
    pub fn linear() -> Self {
        Self::from_fn(|t| t as f64 / BLUT_LEN as f64).expect("linear BLUT is valid")
    }

    /// Flat below `lo` and from `hi` upward, `((t - lo) / (hi - lo))^gamma`
    /// scaled into `[floor, ceil]` in between. Mimics the clipped curves
    /// produced by SMPTE-range inverse tone mapping.
    pub fn clipped_power(lo: usize, hi: usize, gamma: f64, floor: f64, ceil: f64) -> Result<Self> {
        if !(lo < hi && hi < BLUT_LEN) || gamma <= 0.0 || !(0.0 <= floor && floor < ceil && ceil < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "bad clipped BLUT parameters lo={lo} hi={hi} gamma={gamma} range=[{floor}, {ceil}]"
            )));
        }
        Self::from_fn(|t| {
            let x = (t.clamp(lo, hi) - lo) as f64 / (hi - lo) as f64;
            floor + (ceil - floor) * x.powf(gamma)
        })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn lookup(&self, t: u16) -> f64 {
        self.entries[t as usize]
    }

    pub fn highlight_threshold(&self) -> f64 {
        self.highlight_threshold
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: BlutDoc =
            serde_json::from_str(text).map_err(|e| Error::InvalidBlut(format!("parse error: {e}")))?;
        Self::with_threshold(
            doc.entries,
            doc.highlight_threshold.unwrap_or(DEFAULT_HIGHLIGHT_THRESHOLD),
        )
    }

    pub fn to_json(&self) -> String {
        let doc = BlutDoc {
            entries: self.entries.clone(),
            highlight_threshold: Some(self.highlight_threshold),
        };
        serde_json::to_string(&doc).expect("BLUT serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::pnm::atomic_write(path, self.to_json().as_bytes())
    }
}

fn check_threshold(thr: f64) -> Result<()> {
    if thr > 0.0 && thr < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidBlut(format!("highlight threshold {thr} outside (0, 1)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    /// Lower clipped region, `t < y0`.
    Down,
    /// Low-lights and mid-tones, `y0 <= t < yh`.
    Mid,
    /// Highlights before the upper clip, `yh <= t < y1`.
    High,
    /// Upper clipped region, `t >= y1`.
    Up,
}

impl Region {
    pub const ALL: [Region; 4] = [Region::Down, Region::Mid, Region::High, Region::Up];

    pub fn name(self) -> &'static str {
        match self {
            Region::Down => "down",
            Region::Mid => "mid",
            Region::High => "high",
            Region::Up => "up",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegionPartition {
    /// Highest codeword of the lower flat region.
    pub y0: u16,
    /// Lowest codeword of the upper flat region.
    pub y1: u16,
    /// First codeword of the highlight region.
    pub yh: u16,
}

impl RegionPartition {
    #[inline]
    pub fn region(&self, t: u16) -> Region {
        if t < self.y0 {
            Region::Down
        } else if t < self.yh {
            Region::Mid
        } else if t < self.y1 {
            Region::High
        } else {
            Region::Up
        }
    }

    /// Half-open codeword span `[start, end)` of a region.
    pub fn span(&self, region: Region) -> (u16, u16) {
        match region {
            Region::Down => (0, self.y0),
            Region::Mid => (self.y0, self.yh),
            Region::High => (self.yh, self.y1),
            Region::Up => (self.y1, BLUT_LEN as u16),
        }
    }
}

/// Splits the codeword range into the four regions.
///
/// `y0` is the last codeword of the flat prefix and `y1` the first of the
/// flat suffix; `yh` is the first codeword mapping above the threshold,
/// clamped into `(y0, y1]` so a scene that never reaches the threshold
/// gets an empty highlight region. For an entirely constant table the
/// prefix and suffix overlap; `y0` is then capped at 1022 and `y1` lifted
/// to `y0 + 1`.
pub fn partition(blut: &Blut, highlight_threshold: f64) -> Result<RegionPartition> {
    check_threshold(highlight_threshold)?;
    let e = &blut.entries;
    let last = BLUT_LEN - 1;
    let prefix_end = e.iter().position(|&v| v != e[0]).map_or(last, |t| t - 1);
    let suffix_start = e.iter().rposition(|&v| v != e[last]).map_or(0, |t| t + 1);

    let y0 = prefix_end.min(last - 1);
    let y1 = suffix_start.max(y0 + 1);
    let yh = e
        .iter()
        .position(|&v| v > highlight_threshold)
        .unwrap_or(y1)
        .clamp(y0 + 1, y1);
    Ok(RegionPartition {
        y0: y0 as u16,
        y1: y1 as u16,
        yh: yh as u16,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlopeProfile {
    slope: Vec<f64>,
    max_slope: f64,
}

impl SlopeProfile {
    #[inline]
    pub fn slope(&self, t: u16) -> f64 {
        self.slope[t as usize]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.slope
    }

    /// Maximum over the mid and highlight regions.
    pub fn max_slope(&self) -> f64 {
        self.max_slope
    }
}

/// Forward differences, last entry replicated. The maximum is taken over
/// `[y0, y1)`, the mid and highlight regions of `part`.
pub fn slopes(blut: &Blut, part: &RegionPartition) -> SlopeProfile {
    let e = &blut.entries;
    let mut slope: Vec<f64> = e.windows(2).map(|w| w[1] - w[0]).collect();
    slope.push(slope[slope.len() - 1]);
    let max_slope = slope[part.y0 as usize..part.y1 as usize]
        .iter()
        .copied()
        .fold(0.0, f64::max);
    SlopeProfile { slope, max_slope }
}

/// Uniform 10-bin quantization of `slope / max_slope`; the top bin is
/// closed so `slope == max_slope` maps to 9.
pub fn probability_index(slope: f64, max_slope: f64) -> Result<usize> {
    if !(max_slope > 0.0) || !max_slope.is_finite() {
        return Err(Error::FlatBlut);
    }
    let bin = (PROBABILITY_COUNT as f64 * slope.max(0.0) / max_slope).floor();
    Ok((bin as usize).min(PROBABILITY_COUNT - 1))
}
