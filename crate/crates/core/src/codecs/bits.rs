//! MSB-first bit I/O.

use super::CodecError;

#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bytes: Vec<u8>,
    bit_len: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn write(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        for i in (0..width).rev() {
            let bit = (value >> i) & 1;
            let pos = self.bit_len % 8;
            if pos == 0 {
                self.bytes.push(0);
            }
            if bit == 1 {
                *self.bytes.last_mut().unwrap() |= 0x80 >> pos;
            }
            self.bit_len += 1;
        }
    }

    pub fn bit_len(&self) -> u64 {
        self.bit_len
    }

    pub fn finish(self) -> (Vec<u8>, u64) {
        (self.bytes, self.bit_len)
    }
}

pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        BitReader { bytes, pos: 0 }
    }

    pub fn read(&mut self, width: u32) -> Result<u64, CodecError> {
        if self.pos + width as u64 > self.bytes.len() as u64 * 8 {
            return Err(CodecError::Truncated);
        }
        let mut v = 0u64;
        for _ in 0..width {
            let byte = self.bytes[(self.pos / 8) as usize];
            let bit = (byte >> (7 - (self.pos % 8))) & 1;
            v = (v << 1) | bit as u64;
            self.pos += 1;
        }
        Ok(v)
    }

    pub fn position(&self) -> u64 {
        self.pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_first_layout() {
        let mut w = BitWriter::new();
        w.write(0b101, 3);
        w.write(0b1, 1);
        w.write(0xff, 8);
        let (bytes, len) = w.finish();
        assert_eq!(len, 12);
        assert_eq!(bytes, [0b1011_1111, 0b1111_0000]);
        let mut r = BitReader::new(&bytes);
        assert_eq!(r.read(3).unwrap(), 0b101);
        assert_eq!(r.read(1).unwrap(), 1);
        assert_eq!(r.read(8).unwrap(), 0xff);
        assert_eq!(r.read(4).unwrap(), 0);
        assert_eq!(r.read(1), Err(CodecError::Truncated));
    }

    #[test]
    fn wide_values() {
        let mut w = BitWriter::new();
        w.write(u64::MAX, 64);
        w.write(0, 0);
        let (bytes, _) = w.finish();
        assert_eq!(BitReader::new(&bytes).read(64).unwrap(), u64::MAX);
    }
}
