//! Objective banding and noise-pattern statistics.
//!
//! A banding step is a horizontal jump larger than half the quantization
//! step that separates two plateaus (runs of identical codewords). Plateaus
//! are what makes a false contour: dithered pixels rarely repeat a codeword,
//! so noise-induced jumps are not counted as bands.

use serde::Serialize;

use crate::image::{distinct_codewords, CodePlane};
use crate::pattern::NoiseBlock;
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandingOptions {
    /// Jump threshold in codewords; `None` infers half the quantization
    /// step of the measured (or reference) plane.
    pub threshold: Option<f64>,
    /// Pixels of identical codeword required on each side of a jump,
    /// including the pixel adjacent to it. Image borders extend plateaus.
    pub min_plateau: usize,
    /// Half-width of the running mean used for noise power.
    pub smooth_radius: usize,
    /// Steps are only searched when the content is declared smooth.
    pub expected_smooth: bool,
}

impl Default for BandingOptions {
    fn default() -> Self {
        Self {
            threshold: None,
            min_plateau: 2,
            smooth_radius: 8,
            expected_smooth: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BandingReport {
    pub step_count: u64,
    /// Sum over counted steps of `|jump| - threshold`.
    pub step_energy: f64,
    pub distinct_codewords: usize,
    /// Mean squared deviation from the running mean.
    pub noise_power: f64,
    pub threshold: f64,
    pub quant_step: u32,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Greatest common divisor of the gaps between consecutive distinct
/// codewords; 1 for a constant plane.
pub fn inferred_quant_step(plane: &CodePlane) -> u32 {
    let mut present = vec![false; 1 << 16];
    for &v in plane.as_slice() {
        present[v as usize] = true;
    }
    let mut prev: Option<u32> = None;
    let mut g = 0;
    for (v, _) in present.iter().enumerate().filter(|(_, &p)| p) {
        if let Some(p) = prev {
            g = gcd(g, v as u32 - p);
        }
        prev = Some(v as u32);
    }
    g.max(1)
}

fn row_steps(row: &[u16], threshold: f64, min_plateau: usize) -> (u64, f64) {
    let n = row.len();
    let mut count = 0;
    let mut energy = 0.0;
    for x in 0..n.saturating_sub(1) {
        let jump = (row[x + 1] as f64 - row[x] as f64).abs();
        if jump <= threshold {
            continue;
        }
        let left_flat = (1..min_plateau).all(|i| x < i || row[x - i] == row[x]);
        let right_flat = (1..min_plateau).all(|i| x + 1 + i >= n || row[x + 1 + i] == row[x + 1]);
        if left_flat && right_flat {
            count += 1;
            energy += jump - threshold;
        }
    }
    (count, energy)
}

/// Mean squared deviation from a `(2r+1)^2` box mean; windows shrink at
/// the borders.
pub fn noise_power(plane: &CodePlane, radius: usize) -> f64 {
    let (w, h) = (plane.width(), plane.height());
    if w == 0 || h == 0 {
        return 0.0;
    }
    // summed-area table with a zero border
    let mut sat = vec![0.0f64; (w + 1) * (h + 1)];
    for y in 0..h {
        let mut run = 0.0;
        for x in 0..w {
            run += plane.get(x, y) as f64;
            sat[(y + 1) * (w + 1) + x + 1] = sat[y * (w + 1) + x + 1] + run;
        }
    }
    let total = par::sum_rows(h, |y| {
        let y0 = y.saturating_sub(radius);
        let y1 = (y + radius + 1).min(h);
        let mut acc = 0.0;
        for x in 0..w {
            let x0 = x.saturating_sub(radius);
            let x1 = (x + radius + 1).min(w);
            let s = sat[y1 * (w + 1) + x1] - sat[y0 * (w + 1) + x1] - sat[y1 * (w + 1) + x0] + sat[y0 * (w + 1) + x0];
            let mean = s / ((x1 - x0) * (y1 - y0)) as f64;
            acc += (plane.get(x, y) as f64 - mean).powi(2);
        }
        acc
    });
    total / (w * h) as f64
}

/// Banding report with the threshold inferred from `reference` (or from
/// `plane` itself when no reference is given and no threshold is set).
pub fn banding_index_with_reference(plane: &CodePlane, reference: Option<&CodePlane>, opts: &BandingOptions) -> BandingReport {
    let quant_step = inferred_quant_step(reference.unwrap_or(plane));
    let threshold = opts.threshold.unwrap_or(quant_step as f64 / 2.0);
    let (step_count, step_energy) = if opts.expected_smooth {
        let per_row = par::map_indexed(plane.height(), |y| row_steps(plane.row(y), threshold, opts.min_plateau));
        per_row
            .into_iter()
            .fold((0, 0.0), |(c, e), (rc, re)| (c + rc, e + re))
    } else {
        (0, 0.0)
    };
    BandingReport {
        step_count,
        step_energy,
        distinct_codewords: distinct_codewords(plane),
        noise_power: noise_power(plane, opts.smooth_radius),
        threshold,
        quant_step,
    }
}

pub fn banding_index(plane: &CodePlane, opts: &BandingOptions) -> BandingReport {
    banding_index_with_reference(plane, None, opts)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PatternStats {
    pub mean: f64,
    pub variance: f64,
    /// Share of gradient energy in near-horizontal or near-vertical
    /// directions; 0.5 for isotropic noise.
    pub orientation_ratio: f64,
    /// Mean length of same-sign runs along rows.
    pub run_length_mean: f64,
}

/// Gradients count as axis-aligned when within 22.5 degrees of an axis.
const AXIS_TAN: f64 = 0.414_213_562_373_095_03; // tan(pi/8)

/// Axis-aligned share of central-difference gradient energy over the
/// interior of a row-major grid. I.i.d. Gaussian noise scores 0.5.
pub fn orientation_ratio(width: usize, height: usize, values: &[f32]) -> f64 {
    let mut axis = 0.0;
    let mut total = 0.0;
    let at = |x: usize, y: usize| values[y * width + x] as f64;
    for y in 1..height.saturating_sub(1) {
        for x in 1..width.saturating_sub(1) {
            let gx = at(x + 1, y) - at(x - 1, y);
            let gy = at(x, y + 1) - at(x, y - 1);
            let e = gx * gx + gy * gy;
            let (lo, hi) = if gx.abs() < gy.abs() { (gx.abs(), gy.abs()) } else { (gy.abs(), gx.abs()) };
            if lo <= AXIS_TAN * hi {
                axis += e;
            }
            total += e;
        }
    }
    if total > 0.0 {
        axis / total
    } else {
        0.0
    }
}

/// Mean same-sign run length over the rows of a grid. Zero counts as
/// non-positive.
pub fn row_run_length(width: usize, height: usize, values: &[f32]) -> f64 {
    let mut runs = 0usize;
    for y in 0..height {
        let row = &values[y * width..(y + 1) * width];
        runs += sign_runs(row.iter().map(|&v| v as f64));
    }
    if runs == 0 {
        0.0
    } else {
        (width * height) as f64 / runs as f64
    }
}

/// Number of maximal same-sign runs in a sequence.
pub fn sign_runs(values: impl IntoIterator<Item = f64>) -> usize {
    let mut runs = 0;
    let mut prev = None;
    for v in values {
        let s = v > 0.0;
        if prev != Some(s) {
            runs += 1;
        }
        prev = Some(s);
    }
    runs
}

pub fn pattern_stats(block: &NoiseBlock) -> PatternStats {
    let v = block.values();
    let n = v.len() as f64;
    let mean = v.iter().map(|&x| x as f64).sum::<f64>() / n;
    let variance = v.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / n;
    PatternStats {
        mean,
        variance,
        orientation_ratio: orientation_ratio(block.side(), block.side(), v),
        run_length_mean: row_run_length(block.side(), block.side(), v),
    }
}

/// Means of the non-overlapping `tile x tile` squares of a block.
pub fn tile_means(block: &NoiseBlock, tile: usize) -> Vec<f64> {
    let per_side = block.side() / tile;
    let mut out = Vec::with_capacity(per_side * per_side);
    for ty in 0..per_side {
        for tx in 0..per_side {
            let mut s = 0.0;
            for y in 0..tile {
                for x in 0..tile {
                    s += block.get(tx * tile + x, ty * tile + y) as f64;
                }
            }
            out.push(s / (tile * tile) as f64);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::{quantize_codewords, Channel, Plane};
    use crate::synth::ramp_image;

    #[test]
    fn constant_plane_has_no_steps() {
        let p = Plane::filled(40, 10, 300u16);
        let r = banding_index(&p, &BandingOptions::default());
        assert_eq!(r.step_count, 0);
        assert_eq!(r.distinct_codewords, 1);
        assert_eq!(r.noise_power, 0.0);
    }

    #[test]
    fn quantized_ramp_step_count() {
        let height = 6;
        let q = quantize_codewords(&ramp_image(1024, height, 10).unwrap(), 2).unwrap();
        let plane = q.plane(Channel::Y);
        // oracle: enumerate columns where the quantized value changes
        let per_row = (0..1023).filter(|&x| (x + 1) / 4 != x / 4).count();
        assert_eq!(per_row, 255);
        let r = banding_index(plane, &BandingOptions::default());
        assert_eq!(r.quant_step, 4);
        assert_eq!(r.threshold, 2.0);
        assert_eq!(r.step_count, 255 * height as u64);
        assert!((r.step_energy - 2.0 * 255.0 * height as f64).abs() < 1e-9);
        assert_eq!(r.distinct_codewords, 256);
    }

    #[test]
    fn plateau_rule() {
        let row = [10u16, 10, 20, 20, 10, 20, 20];
        assert_eq!(row_steps(&row, 2.0, 1), (3, 24.0));
        // 20->10 at x=3 has a one-pixel right side; 10->20 at x=4 a one-pixel left
        assert_eq!(row_steps(&row, 2.0, 2).0, 1);
    }

    #[test]
    fn lower_threshold_never_counts_fewer() {
        let p = Plane::from_fn(64, 8, |x, y| ((x / 3) * 5 + (x * y) % 3) as u16);
        let mut prev = 0;
        for t in [8.0, 6.0, 4.0, 2.0, 1.0, 0.5] {
            let r = banding_index(&p, &BandingOptions { threshold: Some(t), ..Default::default() });
            assert!(r.step_count >= prev);
            prev = r.step_count;
        }
    }

    #[test]
    fn reference_sets_threshold() {
        let q = Plane::from_fn(16, 1, |x, _| (x as u16 / 4) * 4);
        let d = Plane::from_fn(16, 1, |x, _| x as u16);
        let r = banding_index_with_reference(&d, Some(&q), &BandingOptions::default());
        assert_eq!(r.threshold, 2.0);
        assert_eq!(r.step_count, 0);
        let off = BandingOptions { expected_smooth: false, ..Default::default() };
        assert_eq!(banding_index(&q, &off).step_count, 0);
    }

    #[test]
    fn constant_block_stats() {
        let s = pattern_stats(&NoiseBlock::constant(16, 1.5));
        assert_eq!(s.mean, 1.5);
        assert_eq!(s.variance, 0.0);
        assert_eq!(s.orientation_ratio, 0.0);
        assert_eq!(s.run_length_mean, 16.0);
    }

    #[test]
    fn orientation_of_stripes_and_diagonals() {
        // horizontal stripes: all energy vertical
        let stripes: Vec<f32> = (0..100).map(|i| if (i / 20) % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert_eq!(orientation_ratio(10, 10, &stripes), 1.0);
        // diagonal ramp: gx == gy everywhere
        let diag: Vec<f32> = (0..100).map(|i| (i % 10 + i / 10) as f32).collect();
        assert_eq!(orientation_ratio(10, 10, &diag), 0.0);
    }

    #[test]
    fn white_gaussian_is_isotropic() {
        let mut rng = crate::rng::Rng::new(3);
        let v: Vec<f32> = (0..400 * 400).map(|_| rng.standard_normal() as f32).collect();
        assert!((orientation_ratio(400, 400, &v) - 0.5).abs() < 0.01);
    }

    #[test]
    fn sign_run_counting() {
        assert_eq!(sign_runs([1.0, 2.0, -1.0, -3.0, 4.0]), 3);
        assert_eq!(sign_runs(std::iter::empty()), 0);
    }
}
