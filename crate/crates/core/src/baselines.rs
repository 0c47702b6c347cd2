//! Comparator ditherers: i.i.d. Gaussian noise, and Gaussian noise passed
//! through a box low-pass filter. Unlike the curved-noise injector the
//! low-pass variant reads neighboring noise samples.

use crate::error::{invalid_arg, Result};
use crate::image::{clamp_codeword, CodePlane, Plane};
use crate::par;
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaselineConfig {
    /// Target noise standard deviation in codewords.
    pub sigma: f64,
    /// Box kernel half-width; the kernel side is `2 * radius + 1`.
    pub kernel_radius: usize,
    pub seed: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            sigma: 5f64.sqrt(),
            kernel_radius: 2,
            seed: 0,
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(invalid_arg(format!("sigma {} must be finite and non-negative", self.sigma)));
        }
        if self.kernel_radius == 0 {
            return Err(invalid_arg("kernel radius must be at least 1"));
        }
        Ok(())
    }
}

/// i.i.d. `N(0, sigma)` samples in row-major order from one seeded stream.
pub fn gaussian_field(width: usize, height: usize, sigma: f64, seed: u64) -> Plane<f64> {
    let mut rng = Rng::new(seed);
    Plane::from_fn(width, height, |_, _| rng.normal(0.0, sigma))
}

/// Box-filters `field` with edge clamping (out-of-range taps reuse the
/// nearest edge sample), separably.
pub fn box_filter(field: &Plane<f64>, radius: usize) -> Plane<f64> {
    let (w, h) = (field.width(), field.height());
    let norm = 1.0 / (2 * radius + 1) as f64;
    let r = radius as isize;
    let clampi = |i: isize, n: usize| i.clamp(0, n as isize - 1) as usize;

    let mut horiz = Plane::filled(w, h, 0.0);
    par::for_each_row_mut(horiz.as_mut_slice(), w, |y, row| {
        let src = field.row(y);
        for (x, out) in row.iter_mut().enumerate() {
            let x = x as isize;
            *out = (-r..=r).map(|d| src[clampi(x + d, w)]).sum::<f64>() * norm;
        }
    });
    let mut out = Plane::filled(w, h, 0.0);
    par::for_each_row_mut(out.as_mut_slice(), w, |y, row| {
        let y = y as isize;
        for (x, o) in row.iter_mut().enumerate() {
            *o = (-r..=r).map(|d| horiz.get(x, clampi(y + d, h))).sum::<f64>() * norm;
        }
    });
    out
}

fn population_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Low-passed unit Gaussian noise rescaled to standard deviation `sigma`.
pub fn lpf_gaussian_field(width: usize, height: usize, cfg: &BaselineConfig) -> Plane<f64> {
    let filtered = box_filter(&gaussian_field(width, height, 1.0, cfg.seed), cfg.kernel_radius);
    let std = population_std(filtered.as_slice());
    let scale = if std > 0.0 { cfg.sigma / std } else { 0.0 };
    filtered.map(|v| v * scale)
}

fn add_field(q: &CodePlane, field: &Plane<f64>, bit_depth: u8) -> CodePlane {
    let mut out = q.clone();
    let w = q.width();
    par::for_each_row_mut(out.as_mut_slice(), w, |y, row| {
        let noise = field.row(y);
        for (px, n) in row.iter_mut().zip(noise) {
            *px = clamp_codeword(*px as f64 + n, bit_depth);
        }
    });
    out
}

pub fn gaussian_dither(q: &CodePlane, bit_depth: u8, cfg: &BaselineConfig) -> Result<CodePlane> {
    cfg.validate()?;
    if cfg.sigma == 0.0 {
        return Ok(q.clone());
    }
    let field = gaussian_field(q.width(), q.height(), cfg.sigma, cfg.seed);
    Ok(add_field(q, &field, bit_depth))
}

pub fn lpf_gaussian_dither(q: &CodePlane, bit_depth: u8, cfg: &BaselineConfig) -> Result<CodePlane> {
    cfg.validate()?;
    if cfg.sigma == 0.0 {
        return Ok(q.clone());
    }
    let field = lpf_gaussian_field(q.width(), q.height(), cfg);
    Ok(add_field(q, &field, bit_depth))
}
