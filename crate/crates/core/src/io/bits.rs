//! Fixed-width bit packing, least-significant bit first inside each byte.
//! Every packed section starts on a byte boundary and pads its final byte
//! with zero bits, so a section of `n` fields of `w` bits occupies exactly
//! `ceil(n * w / 8)` bytes.

use crate::error::{Error, Result};

pub struct BitWriter {
    bytes: Vec<u8>,
    /// Bits already used in the final byte, 0..8.
    used: u32,
}

impl BitWriter {
    pub fn new() -> Self {
        BitWriter {
            bytes: Vec::new(),
            used: 0,
        }
    }

    pub fn push(&mut self, mut value: u64, mut width: u32) {
        debug_assert!(width <= 64);
        debug_assert!(width == 64 || value < (1u64 << width));
        while width > 0 {
            if self.used == 0 {
                self.bytes.push(0);
            }
            let take = (8 - self.used).min(width);
            let chunk = (value & ((1u64 << take) - 1)) as u8;
            *self.bytes.last_mut().unwrap() |= chunk << self.used;
            self.used = (self.used + take) % 8;
            value >>= take;
            width -= take;
        }
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

pub struct BitReader<'a> {
    bytes: &'a [u8],
    /// Next bit to read, counted from the start of the slice.
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        BitReader { bytes, pos: 0 }
    }

    pub fn read(&mut self, width: u32) -> Result<u64> {
        debug_assert!(width <= 64);
        if self.pos + width as usize > self.bytes.len() * 8 {
            return Err(Error::Container("packed section is truncated".into()));
        }
        let mut out = 0u64;
        let mut got = 0u32;
        while got < width {
            let byte = self.bytes[self.pos / 8];
            let offset = (self.pos % 8) as u32;
            let take = (8 - offset).min(width - got);
            let chunk = (byte >> offset) as u64 & ((1u64 << take) - 1);
            out |= chunk << got;
            got += take;
            self.pos += take as usize;
        }
        Ok(out)
    }
}
