//! Planar Y/Cb/Cr images, codeword arithmetic and the quantization simulator.

use crate::error::{invalid_arg, Result};

/// A row-major 2-D grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

pub type CodePlane = Plane<u16>;

impl<T: Copy> Plane<T> {
    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != width * height {
            return Err(invalid_arg(format!(
                "plane data has {} samples, expected {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: T) {
        self.data[y * self.width + x] = v;
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[T] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Plane<U> {
        Plane {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Channel index into a [`PlanarImage`] or [`HdrImage`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    Y = 0,
    Cb = 1,
    Cr = 2,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Y, Channel::Cb, Channel::Cr];

    pub fn suffix(self) -> &'static str {
        match self {
            Channel::Y => "y",
            Channel::Cb => "cb",
            Channel::Cr => "cr",
        }
    }
}

/// A 4:4:4 planar Y/Cb/Cr image of integer codewords.
///
/// Codewords are stored in `u16` whatever the declared bit depth; every
/// sample is guaranteed to fit in `bit_depth` bits.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarImage {
    bit_depth: u8,
    planes: [CodePlane; 3],
}

impl PlanarImage {
    pub fn new(bit_depth: u8, planes: [CodePlane; 3]) -> Result<Self> {
        check_bit_depth(bit_depth)?;
        let (w, h) = (planes[0].width(), planes[0].height());
        if planes.iter().any(|p| p.width() != w || p.height() != h) {
            return Err(invalid_arg("all three planes must share dimensions"));
        }
        let max = max_codeword(bit_depth);
        for (plane, ch) in planes.iter().zip(Channel::ALL) {
            if let Some(pos) = plane.as_slice().iter().position(|&v| v > max) {
                return Err(invalid_arg(format!(
                    "{} codeword {} at index {pos} exceeds {bit_depth}-bit range",
                    ch.suffix(),
                    plane.as_slice()[pos]
                )));
            }
        }
        Ok(Self { bit_depth, planes })
    }

    pub fn width(&self) -> usize {
        self.planes[0].width()
    }

    pub fn height(&self) -> usize {
        self.planes[0].height()
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    pub fn plane(&self, ch: Channel) -> &CodePlane {
        &self.planes[ch as usize]
    }

    pub fn planes(&self) -> &[CodePlane; 3] {
        &self.planes
    }

    pub fn into_planes(self) -> [CodePlane; 3] {
        self.planes
    }
}

/// Normalized HDR intensities, each in `[0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HdrImage {
    planes: [Plane<f64>; 3],
}

impl HdrImage {
    pub fn new(planes: [Plane<f64>; 3]) -> Result<Self> {
        let (w, h) = (planes[0].width(), planes[0].height());
        if planes.iter().any(|p| p.width() != w || p.height() != h) {
            return Err(invalid_arg("all three planes must share dimensions"));
        }
        for plane in &planes {
            if let Some(v) = plane.as_slice().iter().find(|v| !(0.0..1.0).contains(*v)) {
                return Err(invalid_arg(format!("HDR value {v} outside [0, 1)")));
            }
        }
        Ok(Self { planes })
    }

    pub fn width(&self) -> usize {
        self.planes[0].width()
    }

    pub fn height(&self) -> usize {
        self.planes[0].height()
    }

    pub fn plane(&self, ch: Channel) -> &Plane<f64> {
        &self.planes[ch as usize]
    }
}

pub(crate) fn check_bit_depth(bit_depth: u8) -> Result<()> {
    if (8..=16).contains(&bit_depth) {
        Ok(())
    } else {
        Err(invalid_arg(format!("bit depth {bit_depth} outside 8..=16")))
    }
}

#[inline]
pub fn max_codeword(bit_depth: u8) -> u16 {
    ((1u32 << bit_depth) - 1) as u16
}

/// Zeroes the low `drop_bits` bits of every codeword (shift right, shift
/// left), simulating transmission at a lower bit depth.
pub fn quantize_codewords(img: &PlanarImage, drop_bits: u8) -> Result<PlanarImage> {
    if drop_bits >= img.bit_depth {
        return Err(invalid_arg(format!(
            "drop_bits {drop_bits} must be below bit depth {}",
            img.bit_depth
        )));
    }
    let planes = img
        .planes
        .clone()
        .map(|p| p.map(|v| quantize_codeword(v, drop_bits)));
    Ok(PlanarImage {
        bit_depth: img.bit_depth,
        planes,
    })
}

#[inline]
pub fn quantize_codeword(v: u16, drop_bits: u8) -> u16 {
    (v >> drop_bits) << drop_bits
}

/// Rounds half away from zero and clamps into the codeword range.
/// NaN maps to 0.
#[inline]
pub fn clamp_codeword(v: f64, bit_depth: u8) -> u16 {
    let max = max_codeword(bit_depth) as f64;
    let r = v.round();
    if r >= max {
        max as u16
    } else if r > 0.0 {
        r as u16
    } else {
        0
    }
}

pub fn distinct_codewords(plane: &CodePlane) -> usize {
    let mut seen = vec![false; 1 << 16];
    let mut count = 0;
    for &v in plane.as_slice() {
        let slot = &mut seen[v as usize];
        if !*slot {
            *slot = true;
            count += 1;
        }
    }
    count
}
