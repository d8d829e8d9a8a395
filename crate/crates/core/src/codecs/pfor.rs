//! Patched frame-of-reference blocks.
//!
//! Each block of up to [`PFOR_BLOCK`] values is bit-packed at a width that
//! covers the 90th percentile; values that do not fit are stored verbatim as
//! exceptions and their packed slots hold zero.
//!
//! Layout: `varint count`, then per block `u8 width`, `varint exceptions`,
//! `(u8 slot, varint value)` per exception, then `ceil(n * width / 8)`
//! packed bytes, MSB first.

use super::bits::{BitReader, BitWriter};
use super::varint::{read_varint, write_varint};
use super::CodecError;

pub const PFOR_BLOCK: usize = 128;

fn bit_width(v: u32) -> u32 {
    32 - v.leading_zeros()
}

/// Width covering at least 90% of the block.
fn choose_width(block: &[u32]) -> u32 {
    let mut widths: Vec<u32> = block.iter().map(|&v| bit_width(v)).collect();
    widths.sort_unstable();
    let idx = (block.len() * 9).div_ceil(10) - 1;
    widths[idx]
}

pub fn pfor_encode(values: &[u32]) -> Vec<u8> {
    pfor_encode_with_block(values, PFOR_BLOCK)
}

pub fn pfor_encode_with_block(values: &[u32], block: usize) -> Vec<u8> {
    assert!((1..=256).contains(&block), "block size must be in 1..=256");
    let mut out = Vec::new();
    write_varint(&mut out, values.len() as u64);
    for chunk in values.chunks(block) {
        let width = choose_width(chunk);
        let exceptions: Vec<(usize, u32)> = chunk
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, v)| bit_width(v) > width)
            .collect();
        out.push(width as u8);
        write_varint(&mut out, exceptions.len() as u64);
        for &(slot, v) in &exceptions {
            out.push(slot as u8);
            write_varint(&mut out, v as u64);
        }
        let mut w = BitWriter::new();
        for &v in chunk {
            w.write(if bit_width(v) > width { 0 } else { v as u64 }, width);
        }
        out.extend(w.finish().0);
    }
    out
}

pub fn pfor_decode(bytes: &[u8]) -> Result<Vec<u32>, CodecError> {
    pfor_decode_with_block(bytes, PFOR_BLOCK)
}

pub fn pfor_decode_with_block(bytes: &[u8], block: usize) -> Result<Vec<u32>, CodecError> {
    let mut pos = 0;
    let total = read_varint(bytes, &mut pos)? as usize;
    let mut out = Vec::with_capacity(total.min(bytes.len() * 8));
    while out.len() < total {
        let n = block.min(total - out.len());
        let &width = bytes.get(pos).ok_or(CodecError::Truncated)?;
        pos += 1;
        if width > 32 {
            return Err(CodecError::Corrupt(format!("block width {width}")));
        }
        let exc_count = read_varint(bytes, &mut pos)? as usize;
        let mut exceptions = Vec::with_capacity(exc_count.min(n));
        for _ in 0..exc_count {
            let &slot = bytes.get(pos).ok_or(CodecError::Truncated)?;
            pos += 1;
            let v = read_varint(bytes, &mut pos)?;
            if slot as usize >= n || v > u32::MAX as u64 {
                return Err(CodecError::Corrupt("bad exception".into()));
            }
            exceptions.push((slot as usize, v as u32));
        }
        let packed_len = (n * width as usize).div_ceil(8);
        let packed = bytes
            .get(pos..pos + packed_len)
            .ok_or(CodecError::Truncated)?;
        pos += packed_len;
        let mut r = BitReader::new(packed);
        let start = out.len();
        for _ in 0..n {
            out.push(r.read(width as u32)? as u32);
        }
        for (slot, v) in exceptions {
            out[start + slot] = v;
        }
    }
    if pos != bytes.len() {
        return Err(CodecError::Corrupt(
            "trailing bytes after last block".into(),
        ));
    }
    Ok(out)
}
