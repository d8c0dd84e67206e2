use std::fmt;

use super::BridgeError;

/// Fixed-width bit vector carried across the bridge.
///
/// Bit `i` lives in word `i / 32`, bit position `i % 32`. Storage is always
/// a whole number of 32-bit words and the pad bits above `width` are zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Message {
    width: usize,
    words: Vec<u32>,
}

impl Message {
    pub fn zeros(width: usize) -> Result<Self, BridgeError> {
        if width == 0 {
            return Err(BridgeError::ZeroWidth);
        }
        Ok(Message {
            width,
            words: vec![0; words_for(width)],
        })
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self, BridgeError> {
        if bits.is_empty() {
            return Err(BridgeError::ZeroWidth);
        }
        Ok(Message {
            width: bits.len(),
            words: pack(bits),
        })
    }

    /// The low `width` bits of `value`. Bits of `value` above `width` are an
    /// error rather than silently dropped.
    pub fn from_u64(width: usize, value: u64) -> Result<Self, BridgeError> {
        let mut m = Message::zeros(width)?;
        if width < 64 && value >> width != 0 {
            return Err(BridgeError::ValueTooWide { width, value });
        }
        m.words[0] = value as u32;
        if m.words.len() > 1 {
            m.words[1] = (value >> 32) as u32;
        }
        Ok(m)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn words(&self) -> &[u32] {
        &self.words
    }

    /// Bits of storage actually transported, a multiple of 32.
    pub fn storage_bits(&self) -> usize {
        self.words.len() * 32
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.width, "bit {i} out of range for width {}", self.width);
        self.words[i / 32] >> (i % 32) & 1 == 1
    }

    pub fn set_bit(&mut self, i: usize, v: bool) {
        assert!(i < self.width, "bit {i} out of range for width {}", self.width);
        let mask = 1u32 << (i % 32);
        if v {
            self.words[i / 32] |= mask;
        } else {
            self.words[i / 32] &= !mask;
        }
    }

    pub fn to_bits(&self) -> Vec<bool> {
        unpack(&self.words, self.width)
    }

    /// The payload as an integer, if it fits in 64 bits.
    pub fn to_u64(&self) -> Option<u64> {
        if self.words.iter().skip(2).any(|&w| w != 0) {
            return None;
        }
        let lo = self.words[0] as u64;
        let hi = self.words.get(1).copied().unwrap_or(0) as u64;
        Some(lo | hi << 32)
    }
}

impl fmt::Debug for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Message({}'b", self.width)?;
        for i in (0..self.width).rev() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

fn words_for(width: usize) -> usize {
    width.div_ceil(32)
}

pub fn pack(bits: &[bool]) -> Vec<u32> {
    let mut words = vec![0u32; words_for(bits.len()).max(1)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            words[i / 32] |= 1 << (i % 32);
        }
    }
    words
}

pub fn unpack(words: &[u32], width: usize) -> Vec<bool> {
    (0..width).map(|i| words[i / 32] >> (i % 32) & 1 == 1).collect()
}
