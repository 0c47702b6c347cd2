//! Planar image files: one binary PGM (`P5`) per channel plus a JSON sidecar.
//!
//! An image with stem `out/frame` is stored as
//! `out/frame.y.pgm`, `out/frame.cb.pgm`, `out/frame.cr.pgm` and
//! `out/frame.json` holding `{"width", "height", "bit_depth"}`. Samples are
//! written with maxval 65535, big-endian 16-bit. HDR images use the same
//! layout with bit depth 16 and each normalized value `v` stored as
//! `floor(v * 65536)`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{Channel, CodePlane, HdrImage, PlanarImage, Plane};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageMeta {
    pub width: usize,
    pub height: usize,
    pub bit_depth: u8,
}

/// Normalizes a user-supplied stem: a trailing `.json` is dropped so the
/// sidecar path can be passed directly.
pub fn stem_of(path: &Path) -> PathBuf {
    match path.to_str().and_then(|s| s.strip_suffix(".json")) {
        Some(stripped) => PathBuf::from(stripped),
        None => path.to_path_buf(),
    }
}

pub fn plane_path(stem: &Path, ch: Channel) -> PathBuf {
    with_suffix(stem, &format!(".{}.pgm", ch.suffix()))
}

pub fn sidecar_path(stem: &Path) -> PathBuf {
    with_suffix(stem, ".json")
}

fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn encode_pgm16(plane: &CodePlane) -> Vec<u8> {
    let header = format!("P5\n{} {}\n65535\n", plane.width(), plane.height());
    let mut out = Vec::with_capacity(header.len() + 2 * plane.as_slice().len());
    out.extend_from_slice(header.as_bytes());
    for &v in plane.as_slice() {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out
}

/// Parses a binary PGM. Maxval below 256 uses one byte per sample, otherwise
/// two bytes big-endian.
pub fn decode_pgm(bytes: &[u8]) -> Result<CodePlane> {
    let mut pos = 0usize;
    let magic = next_token(bytes, &mut pos)?;
    if magic != b"P5" {
        return Err(Error::Format(format!(
            "expected PGM magic P5, found {:?}",
            String::from_utf8_lossy(magic)
        )));
    }
    let width = parse_header_number(bytes, &mut pos, "width")?;
    let height = parse_header_number(bytes, &mut pos, "height")?;
    let maxval = parse_header_number(bytes, &mut pos, "maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Format(format!("maxval {maxval} outside 1..=65535")));
    }
    // exactly one whitespace byte separates the header from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::Format("missing whitespace after maxval".into()));
    }
    pos += 1;
    let bytes_per_sample = if maxval < 256 { 1 } else { 2 };
    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::Format("image dimensions overflow".into()))?;
    let raster = &bytes[pos..];
    if raster.len() < count * bytes_per_sample {
        return Err(Error::Format(format!(
            "raster truncated: {} bytes, expected {}",
            raster.len(),
            count * bytes_per_sample
        )));
    }
    let data: Vec<u16> = if bytes_per_sample == 1 {
        raster[..count].iter().map(|&b| b as u16).collect()
    } else {
        raster[..2 * count]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    };
    if let Some(v) = data.iter().find(|&&v| v as usize > maxval) {
        return Err(Error::Format(format!("sample {v} exceeds maxval {maxval}")));
    }
    Plane::from_vec(width, height, data)
}

fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'#' {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::Format("unexpected end of PGM header".into()));
    }
    Ok(&bytes[start..*pos])
}

fn parse_header_number(bytes: &[u8], pos: &mut usize, what: &str) -> Result<usize> {
    let tok = next_token(bytes, pos)?;
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Format(format!("bad PGM {what}: {:?}", String::from_utf8_lossy(tok))))
}

/// Writes `bytes` to a sibling temporary file, then renames it over `path`.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = temp_sibling(path);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

fn temp_sibling(path: &Path) -> PathBuf {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!(".{name}.tmp{}", std::process::id()))
}

/// Writes several files so that either all of them land or none do
/// (barring a failure between renames).
fn write_all_or_nothing(files: &[(PathBuf, Vec<u8>)]) -> Result<()> {
    let mut staged = Vec::with_capacity(files.len());
    for (path, bytes) in files {
        let tmp = temp_sibling(path);
        let res = fs::File::create(&tmp).and_then(|mut f| {
            f.write_all(bytes)?;
            f.sync_all()
        });
        if let Err(e) = res {
            let _ = fs::remove_file(&tmp);
            for (t, _) in &staged {
                let _ = fs::remove_file(t);
            }
            return Err(e.into());
        }
        staged.push((tmp, path));
    }
    for (tmp, path) in staged {
        fs::rename(tmp, path)?;
    }
    Ok(())
}

fn save_planes(stem: &Path, planes: [&CodePlane; 3], meta: ImageMeta) -> Result<()> {
    let mut files = Vec::with_capacity(4);
    for (plane, ch) in planes.into_iter().zip(Channel::ALL) {
        files.push((plane_path(stem, ch), encode_pgm16(plane)));
    }
    let json = serde_json::to_vec_pretty(&meta).expect("sidecar serializes");
    files.push((sidecar_path(stem), json));
    write_all_or_nothing(&files)
}

pub fn read_meta(stem: &Path) -> Result<ImageMeta> {
    let bytes = fs::read(sidecar_path(stem))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::Format(format!("sidecar: {e}")))
}

fn load_planes(stem: &Path) -> Result<(ImageMeta, [CodePlane; 3])> {
    let meta = read_meta(stem)?;
    let mut planes = Vec::with_capacity(3);
    for ch in Channel::ALL {
        let plane = decode_pgm(&fs::read(plane_path(stem, ch))?)?;
        if plane.width() != meta.width || plane.height() != meta.height {
            return Err(Error::Format(format!(
                "{} plane is {}x{}, sidecar says {}x{}",
                ch.suffix(),
                plane.width(),
                plane.height(),
                meta.width,
                meta.height
            )));
        }
        planes.push(plane);
    }
    let planes: [CodePlane; 3] = planes.try_into().expect("three planes");
    Ok((meta, planes))
}

pub fn save_image(stem: &Path, img: &PlanarImage) -> Result<()> {
    let [y, cb, cr] = img.planes();
    let meta = ImageMeta {
        width: img.width(),
        height: img.height(),
        bit_depth: img.bit_depth(),
    };
    save_planes(stem, [y, cb, cr], meta)
}

pub fn load_image(stem: &Path) -> Result<PlanarImage> {
    let (meta, planes) = load_planes(stem)?;
    PlanarImage::new(meta.bit_depth, planes).map_err(|e| Error::Format(e.to_string()))
}

/// Exports normalized values as `floor(v * 65536)`.
pub fn hdr_to_codes(plane: &Plane<f64>) -> CodePlane {
    plane.map(|v| (v * 65536.0).floor().clamp(0.0, 65535.0) as u16)
}

pub fn save_hdr(stem: &Path, img: &HdrImage) -> Result<()> {
    let planes = Channel::ALL.map(|ch| hdr_to_codes(img.plane(ch)));
    let meta = ImageMeta {
        width: img.width(),
        height: img.height(),
        bit_depth: 16,
    };
    save_planes(stem, [&planes[0], &planes[1], &planes[2]], meta)
}

pub fn load_hdr(stem: &Path) -> Result<HdrImage> {
    let (meta, planes) = load_planes(stem)?;
    if meta.bit_depth != 16 {
        return Err(Error::Format(format!(
            "HDR images are stored at 16 bits, sidecar says {}",
            meta.bit_depth
        )));
    }
    HdrImage::new(planes.map(|p| p.map(|v| v as f64 / 65536.0)))
}
