//! Two bits per nucleotide, with any other byte patched in as an exception.
//!
//! Layout: `varint len`, `varint exceptions`, `(varint gap, byte)` per
//! exception with gaps between successive exception positions, then
//! `ceil(len / 4)` packed bytes.

use super::varint::{read_varint, write_varint};
use super::CodecError;
use crate::kmer::Base;

fn rank(b: u8) -> Option<u8> {
    match b {
        b'A' | b'C' | b'T' | b'G' => Base::from_byte(b).map(Base::rank),
        _ => None,
    }
}

pub fn twobit_encode(data: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(data.len() / 4 + 4);
    write_varint(&mut out, data.len() as u64);
    let exceptions: Vec<usize> = (0..data.len())
        .filter(|&i| rank(data[i]).is_none())
        .collect();
    write_varint(&mut out, exceptions.len() as u64);
    let mut prev = 0;
    for &i in &exceptions {
        write_varint(&mut out, (i - prev) as u64);
        out.push(data[i]);
        prev = i;
    }
    for chunk in data.chunks(4) {
        let mut byte = 0u8;
        for (j, &b) in chunk.iter().enumerate() {
            byte |= rank(b).unwrap_or(0) << (6 - 2 * j);
        }
        out.push(byte);
    }
    out
}

pub fn twobit_decode(bytes: &[u8]) -> Result<Vec<u8>, CodecError> {
    let mut pos = 0;
    let len = read_varint(bytes, &mut pos)? as usize;
    let exc = read_varint(bytes, &mut pos)? as usize;
    let mut patches = Vec::with_capacity(exc.min(bytes.len()));
    let mut at = 0usize;
    for _ in 0..exc {
        at = at
            .checked_add(read_varint(bytes, &mut pos)? as usize)
            .filter(|&a| a < len)
            .ok_or_else(|| CodecError::Corrupt("exception position out of range".into()))?;
        let &b = bytes.get(pos).ok_or(CodecError::Truncated)?;
        pos += 1;
        patches.push((at, b));
    }
    let packed = &bytes[pos..];
    if packed.len() < len.div_ceil(4) {
        return Err(CodecError::Truncated);
    }
    if packed.len() > len.div_ceil(4) {
        return Err(CodecError::Corrupt("trailing bytes".into()));
    }
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        let r = (packed[i / 4] >> (6 - 2 * (i % 4))) & 3;
        out.push(Base::from_rank(r).to_byte());
    }
    for (i, b) in patches {
        out[i] = b;
    }
    Ok(out)
}
