//! Binary bank file, little-endian:
//!
//! ```text
//! "CMGN" | u16 version | u16 block_side | u8 probability_count | u8 variant_count | u64 master_seed
//! then per (k, variant), k-major:
//!   u8 k | u8 variant | f64 p | u64 sub_seed | block_side^2 x f32 (row-major)
//! ```

use std::fs;
use std::path::Path;

use super::{BlockKind, NoiseBlock, PatternBank};
use crate::error::{Error, Result};
use crate::{transition_probability, PROBABILITY_COUNT};

pub const BANK_MAGIC: [u8; 4] = *b"CMGN";
pub const BANK_VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 2 + 1 + 1 + 8;

pub fn encode_bank(bank: &PatternBank) -> Vec<u8> {
    let side = bank.block_side();
    let per_block = 1 + 1 + 8 + 8 + 4 * side * side;
    let mut out = Vec::with_capacity(HEADER_LEN + bank.blocks().len() * per_block);
    out.extend_from_slice(&BANK_MAGIC);
    out.extend_from_slice(&BANK_VERSION.to_le_bytes());
    out.extend_from_slice(&(side as u16).to_le_bytes());
    out.push(PROBABILITY_COUNT as u8);
    out.push(bank.variant_count() as u8);
    out.extend_from_slice(&bank.master_seed().to_le_bytes());
    for k in 0..PROBABILITY_COUNT {
        for v in 0..bank.variant_count() {
            let block = bank.block(k, v);
            out.push(k as u8);
            out.push(v as u8);
            out.extend_from_slice(&block.p().to_le_bytes());
            out.extend_from_slice(&block.seed().to_le_bytes());
            for &x in block.values() {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn corrupt(&self, reason: impl Into<String>) -> Error {
        Error::CorruptBank {
            offset: self.pos,
            reason: reason.into(),
        }
    }

    fn take<const N: usize>(&mut self, what: &str) -> Result<[u8; N]> {
        if self.bytes.len() - self.pos < N {
            return Err(self.corrupt(format!(
                "truncated while reading {what}: need {N} bytes, {} left",
                self.bytes.len() - self.pos
            )));
        }
        let mut buf = [0u8; N];
        buf.copy_from_slice(&self.bytes[self.pos..self.pos + N]);
        self.pos += N;
        Ok(buf)
    }
}

/// Parses and validates a bank. Nothing is returned unless the whole file
/// is consistent.
pub fn decode_bank(bytes: &[u8]) -> Result<PatternBank> {
    let mut r = Reader { bytes, pos: 0 };
    let magic = r.take::<4>("magic")?;
    if magic != BANK_MAGIC {
        r.pos = 0;
        return Err(r.corrupt(format!("bad magic {:?}, expected \"CMGN\"", String::from_utf8_lossy(&magic))));
    }
    let version = u16::from_le_bytes(r.take("version")?);
    if version != BANK_VERSION {
        r.pos -= 2;
        return Err(r.corrupt(format!("unsupported version {version}, expected {BANK_VERSION}")));
    }
    let side = u16::from_le_bytes(r.take("block_side")?) as usize;
    if side == 0 {
        r.pos -= 2;
        return Err(r.corrupt("block side is zero"));
    }
    let prob_count = u8::from_le_bytes(r.take("probability_count")?);
    if prob_count as usize != PROBABILITY_COUNT {
        r.pos -= 1;
        return Err(r.corrupt(format!("probability count {prob_count}, expected {PROBABILITY_COUNT}")));
    }
    let variants = u8::from_le_bytes(r.take("variant_count")?) as usize;
    if variants == 0 {
        r.pos -= 1;
        return Err(r.corrupt("variant count is zero"));
    }
    let master_seed = u64::from_le_bytes(r.take("master_seed")?);

    let per_block = 18 + 4 * side * side;
    let expected = HEADER_LEN + PROBABILITY_COUNT * variants * per_block;
    if bytes.len() < expected {
        // walk to the exact truncation point for the diagnostic
        let whole = (bytes.len() - HEADER_LEN) / per_block;
        r.pos = HEADER_LEN + whole * per_block;
        return Err(r.corrupt(format!(
            "truncated: file has {} bytes, header implies {expected} (block {whole} incomplete)",
            bytes.len()
        )));
    }

    let mut blocks = Vec::with_capacity(PROBABILITY_COUNT * variants);
    for k in 0..PROBABILITY_COUNT {
        for v in 0..variants {
            let at = r.pos;
            let (fk, fv) = (r.take::<1>("k")?[0] as usize, r.take::<1>("variant")?[0] as usize);
            if (fk, fv) != (k, v) {
                r.pos = at;
                return Err(r.corrupt(format!("block ({fk}, {fv}) out of order, expected ({k}, {v})")));
            }
            let p = f64::from_le_bytes(r.take("p")?);
            if p.to_bits() != transition_probability(k).to_bits() {
                r.pos -= 8;
                return Err(r.corrupt(format!("block {k} probability {p} != {}", transition_probability(k))));
            }
            let seed = u64::from_le_bytes(r.take("sub_seed")?);
            let raw = &bytes[r.pos..r.pos + 4 * side * side];
            let values: Vec<f32> = raw
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect();
            if let Some(i) = values.iter().position(|x| !x.is_finite()) {
                r.pos += 4 * i;
                return Err(r.corrupt(format!("non-finite sample in block ({k}, {v})")));
            }
            r.pos += raw.len();
            blocks.push(NoiseBlock::new(side, values, BlockKind::Curved, p, seed));
        }
    }
    if r.pos != bytes.len() {
        return Err(r.corrupt(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    PatternBank::from_blocks(side, variants, master_seed, blocks)
}

pub fn save_bank(bank: &PatternBank, path: &Path) -> Result<()> {
    crate::pnm::atomic_write(path, &encode_bank(bank))
}

pub fn load_bank(path: &Path) -> Result<PatternBank> {
    decode_bank(&fs::read(path)?)
}
