//! Binary interpolative coding of strictly increasing integer lists.
//!
//! The middle element is written first with a minimal binary code over the
//! range it can still occupy, then the two halves recurse over the shrunken
//! ranges on either side. A run that exactly fills its range costs no bits.

use super::bits::{BitReader, BitWriter};
use super::CodecError;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitStream {
    pub bytes: Vec<u8>,
    pub bit_len: u64,
}

pub fn bic_encode(values: &[u64], lo: u64, hi: u64) -> Result<BitStream, CodecError> {
    if values.is_empty() {
        return Ok(BitStream::default());
    }
    if lo > hi {
        return Err(CodecError::OutOfRange(format!("empty range [{lo}, {hi}]")));
    }
    for (i, &v) in values.iter().enumerate() {
        if v < lo || v > hi {
            return Err(CodecError::OutOfRange(format!(
                "value {v} outside [{lo}, {hi}]"
            )));
        }
        if i > 0 && values[i - 1] >= v {
            return Err(CodecError::NotStrictlyIncreasing { index: i });
        }
    }
    let mut w = BitWriter::new();
    encode_rec(&mut w, values, lo, hi);
    let (bytes, bit_len) = w.finish();
    Ok(BitStream { bytes, bit_len })
}

fn encode_rec(w: &mut BitWriter, values: &[u64], lo: u64, hi: u64) {
    if values.is_empty() {
        return;
    }
    let mid = values.len() / 2;
    let right = (values.len() - mid - 1) as u64;
    let v = values[mid];
    let low = lo + mid as u64;
    let high = hi - right;
    write_minimal(w, v - low, (high - low) as u128 + 1);
    if mid > 0 {
        encode_rec(w, &values[..mid], lo, v - 1);
    }
    if right > 0 {
        encode_rec(w, &values[mid + 1..], v + 1, hi);
    }
}

pub fn bic_decode(bits: &BitStream, n: usize, lo: u64, hi: u64) -> Result<Vec<u64>, CodecError> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if lo > hi || (n as u128) > (hi - lo) as u128 + 1 {
        return Err(CodecError::Corrupt(format!(
            "{n} values cannot fit [{lo}, {hi}]"
        )));
    }
    let mut r = BitReader::new(&bits.bytes);
    let mut out = vec![0u64; n];
    decode_rec(&mut r, &mut out, lo, hi)?;
    if r.position() > bits.bit_len {
        return Err(CodecError::Truncated);
    }
    Ok(out)
}

fn decode_rec(r: &mut BitReader, out: &mut [u64], lo: u64, hi: u64) -> Result<(), CodecError> {
    if out.is_empty() {
        return Ok(());
    }
    let mid = out.len() / 2;
    let right = (out.len() - mid - 1) as u64;
    let low = lo + mid as u64;
    let high = hi - right;
    let v = low + read_minimal(r, (high - low) as u128 + 1)?;
    if v > high {
        return Err(CodecError::Corrupt(
            "interpolative code out of range".into(),
        ));
    }
    out[mid] = v;
    let (left, rest) = out.split_at_mut(mid);
    if mid > 0 {
        decode_rec(r, left, lo, v - 1)?;
    }
    if right > 0 {
        decode_rec(r, &mut rest[1..], v + 1, hi)?;
    }
    Ok(())
}

// Truncated binary code for x in [0, size).
fn write_minimal(w: &mut BitWriter, x: u64, size: u128) {
    if size <= 1 {
        return;
    }
    let b = 128 - (size - 1).leading_zeros();
    let u = (1u128 << b) - size;
    if (x as u128) < u {
        w.write(x, b - 1);
    } else {
        w.write((x as u128 + u) as u64, b);
    }
}

fn read_minimal(r: &mut BitReader, size: u128) -> Result<u64, CodecError> {
    if size <= 1 {
        return Ok(0);
    }
    let b = 128 - (size - 1).leading_zeros();
    let u = (1u128 << b) - size;
    let y = r.read(b - 1)? as u128;
    if y < u {
        Ok(y as u64)
    } else {
        let y = (y << 1) | r.read(1)? as u128;
        Ok((y - u) as u64)
    }
}
