//! Packed bit buffers.
//!
//! The bit order is MSB-first within bytes everywhere: stream bit `i` lives
//! in byte `i / 8` at bit position `7 - (i % 8)`. Unused tail bits of the
//! final byte are kept at zero.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A contiguous run of bits, packed MSB-first.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BitBlock {
    bytes: Vec<u8>,
    len_bits: usize,
}

impl BitBlock {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            len_bits: 0,
        }
    }

    /// All bits of `bytes`, in MSB-first order.
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        let len_bits = bytes.len() * 8;
        Self { bytes, len_bits }
    }

    /// First `len_bits` of `bytes`; the unused tail is cleared.
    pub fn from_bytes_truncated(mut bytes: Vec<u8>, len_bits: usize) -> Result<Self> {
        if len_bits > bytes.len() * 8 {
            return Err(Error::LengthMismatch {
                expected: len_bits,
                got: bytes.len() * 8,
            });
        }
        bytes.truncate(len_bits.div_ceil(8));
        if len_bits % 8 != 0 {
            if let Some(last) = bytes.last_mut() {
                *last &= 0xFFu8 << (8 - len_bits % 8);
            }
        }
        Ok(Self { bytes, len_bits })
    }

    pub fn len(&self) -> usize {
        self.len_bits
    }

    pub fn is_empty(&self) -> bool {
        self.len_bits == 0
    }

    /// Bit `i` of the stream. Panics if out of range.
    pub fn bit(&self, i: usize) -> bool {
        assert!(
            i < self.len_bits,
            "bit index {i} out of range {}",
            self.len_bits
        );
        (self.bytes[i / 8] >> (7 - (i % 8))) & 1 == 1
    }

    pub fn push(&mut self, bit: bool) {
        if self.len_bits % 8 == 0 {
            self.bytes.push(0);
        }
        if bit {
            let i = self.len_bits;
            self.bytes[i / 8] |= 1 << (7 - (i % 8));
        }
        self.len_bits += 1;
    }

    /// Append the low `width` bits of `symbol`, most significant first.
    pub fn push_symbol_msb(&mut self, symbol: u16, width: u8) {
        debug_assert!(width >= 1 && width <= 16);
        for k in (0..width).rev() {
            self.push((symbol >> k) & 1 == 1);
        }
    }

    /// Append another block's bits in order.
    pub fn append(&mut self, other: &BitBlock) {
        if self.len_bits % 8 == 0 {
            // byte-aligned fast path
            self.bytes.extend_from_slice(&other.bytes);
            self.len_bits += other.len_bits;
            self.bytes.truncate(self.len_bits.div_ceil(8));
        } else {
            for i in 0..other.len_bits {
                self.push(other.bit(i));
            }
        }
    }

    /// Packed bytes; the last byte is zero-padded past `len()`.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Number of set bits.
    pub fn count_ones(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// The block as 0/1 values, unpacked.
    pub fn to_unpacked(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len_bits];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = u8::from(self.bit(i));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_first_indexing() {
        let b = BitBlock::from_bytes(vec![0b1010_0001]);
        assert_eq!(b.len(), 8);
        assert!(b.bit(0));
        assert!(!b.bit(1));
        assert!(b.bit(2));
        assert!(b.bit(7));
    }

    #[test]
    fn push_and_roundtrip() {
        let mut b = BitBlock::new();
        for i in 0..19 {
            b.push(i % 3 == 0);
        }
        assert_eq!(b.len(), 19);
        for i in 0..19 {
            assert_eq!(b.bit(i), i % 3 == 0);
        }
        // tail bits of the final byte stay zero
        assert_eq!(b.as_bytes()[2] & 0b0001_1111, 0);
    }

    #[test]
    fn push_symbol_msb_order() {
        let mut b = BitBlock::new();
        b.push_symbol_msb(0b1011, 4);
        assert_eq!(b.to_unpacked(), vec![1, 0, 1, 1]);
        let mut c = BitBlock::new();
        c.push_symbol_msb(0xA5, 8);
        assert_eq!(c.as_bytes(), &[0xA5]);
    }

    #[test]
    fn append_aligned_and_unaligned() {
        let mut a = BitBlock::from_bytes(vec![0xFF]);
        let b = BitBlock::from_bytes(vec![0x0F]);
        a.append(&b);
        assert_eq!(a.as_bytes(), &[0xFF, 0x0F]);

        let mut c = BitBlock::new();
        c.push(true);
        c.append(&b);
        assert_eq!(c.len(), 9);
        assert!(c.bit(0));
        for i in 1..5 {
            assert!(!c.bit(i), "bit {i}");
        }
        for i in 5..9 {
            assert!(c.bit(i), "bit {i}");
        }
    }

    #[test]
    fn truncated_masks_tail() {
        let b = BitBlock::from_bytes_truncated(vec![0xFF, 0xFF], 11).unwrap();
        assert_eq!(b.len(), 11);
        assert_eq!(b.as_bytes(), &[0xFF, 0b1110_0000]);
        assert!(BitBlock::from_bytes_truncated(vec![0xFF], 9).is_err());
    }
}
