//! Seeded Toeplitz strong extractor over GF(2).
//!
//! An `m x n` Toeplitz matrix is described by `n + m - 1` seed bits with
//! `T[r][c] = seed_bit(r - c + n - 1)`; the extractor output is the
//! matrix-vector product `y = T x` over GF(2). The matrix is never
//! materialized: input bit `c` contributes the m-bit seed window starting
//! at offset `n - 1 - c`, so extraction is a masked word-wide XOR
//! accumulation over 64 precomputed shifted copies of the seed.
//!
//! One session seed is reused across blocks; the strong-extractor property
//! makes the seed reusable and publishable, provided each input block
//! carries enough conditional min-entropy. That per-block entropy bound is
//! the caller's trust assumption, tracked informally via
//! [`security_epsilon_log2`].

use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::bits::BitBlock;
use crate::digitize::ByteBlock;
use crate::error::{Error, Result};

/// Seed material and geometry of one extractor session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToeplitzSeed {
    bits: BitBlock,
    n_in: usize,
    m_out: usize,
}

/// Seed bits required for an (n, m) geometry.
pub fn seed_len_bits(n_in: usize, m_out: usize) -> usize {
    n_in + m_out - 1
}

impl ToeplitzSeed {
    fn check_geometry(n_in: usize, m_out: usize) -> Result<()> {
        if m_out == 0 || n_in == 0 || m_out > n_in {
            return Err(Error::BadGeometry(alloc::format!(
                "need 0 < m_out <= n_in, got n_in = {n_in}, m_out = {m_out}"
            )));
        }
        Ok(())
    }

    /// Fresh uniformly random seed from a deterministic generator.
    pub fn from_rng(n_in: usize, m_out: usize, rng_seed: u64) -> Result<Self> {
        Self::check_geometry(n_in, m_out)?;
        let len = seed_len_bits(n_in, m_out);
        let mut bytes = vec![0u8; len.div_ceil(8)];
        let mut rng = crate::rng::from_seed(crate::seed::derive(rng_seed, "toeplitz.seed"));
        rng.fill_bytes(&mut bytes);
        let bits = BitBlock::from_bytes_truncated(bytes, len)?;
        Ok(Self { bits, n_in, m_out })
    }

    /// Seed from externally supplied bits (a prefix of `source` is used).
    pub fn from_bits(n_in: usize, m_out: usize, source: &BitBlock) -> Result<Self> {
        Self::check_geometry(n_in, m_out)?;
        let len = seed_len_bits(n_in, m_out);
        if source.len() < len {
            return Err(Error::SeedTooShort {
                needed: len,
                got: source.len(),
            });
        }
        let mut bits = BitBlock::with_capacity(len);
        for i in 0..len {
            bits.push(source.bit(i));
        }
        Ok(Self { bits, n_in, m_out })
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn m_out(&self) -> usize {
        self.m_out
    }

    pub fn bits(&self) -> &BitBlock {
        &self.bits
    }

    /// Matrix entry `T[r][c] = seed_bit(r - c + n - 1)`.
    pub fn matrix_entry(&self, row: usize, col: usize) -> bool {
        debug_assert!(row < self.m_out && col < self.n_in);
        self.bits.bit(row + self.n_in - 1 - col)
    }
}

/// Cap on the byte-table kernel's table size.
const TABLE_BYTES_LIMIT: usize = 8 << 20;

/// Word-level extraction engine for one seed.
///
/// The engine never materializes the matrix. Two kernels share the same
/// window algebra (input bit `c` XORs the m-bit seed window at offset
/// `n - 1 - c` into the accumulator):
///
/// * masked-XOR: 64 bit-offset-shifted copies of the seed; every input
///   bit costs `ceil(m/64)` branch-free masked XORs. Works for any
///   geometry.
/// * byte-table: for block sizes that are multiples of 64, the eight
///   window offsets inside one input byte share a word frame, so the 256
///   possible XOR combinations per offset class are precomputed and each
///   input *byte* costs one table row XOR. Used automatically when the
///   tables fit in [`TABLE_BYTES_LIMIT`].
pub struct ToeplitzExtractor {
    n_in: usize,
    m_out: usize,
    /// `shifted[b]` holds the seed bit string starting at bit offset `b`,
    /// LSB-first within words, zero padded. Length `words` each.
    shifted: Vec<Vec<u64>>,
    /// Flattened byte tables: `[class][byte_value][word]`, 8 classes.
    byte_tables: Option<Vec<u64>>,
    words: usize,
    out_words: usize,
}

impl ToeplitzExtractor {
    pub fn new(seed: &ToeplitzSeed) -> Self {
        let len = seed.bits.len();
        let words = len.div_ceil(64) + 2;
        // repack MSB-first seed bits into LSB-first words
        let mut base = vec![0u64; words];
        for i in 0..len {
            if seed.bits.bit(i) {
                base[i / 64] |= 1u64 << (i % 64);
            }
        }
        let mut shifted = Vec::with_capacity(64);
        shifted.push(base.clone());
        for b in 1..64 {
            let mut arr = vec![0u64; words];
            for k in 0..words - 1 {
                arr[k] = (base[k] >> b) | (base[k + 1] << (64 - b));
            }
            arr[words - 1] = base[words - 1] >> b;
            shifted.push(arr);
        }

        let table_bytes = 8 * 256 * words * 8;
        let byte_tables = if seed.n_in % 64 == 0 && table_bytes <= TABLE_BYTES_LIMIT {
            // class `cl` covers window offsets b = 8*cl + 7 down to 8*cl;
            // entry v = XOR of shifted[b - s] over the MSB-first set bits
            // s of v, built incrementally from v with its lowest bit cleared
            let mut tables = vec![0u64; 8 * 256 * words];
            for cl in 0..8usize {
                let b = 8 * cl + 7;
                for v in 1usize..256 {
                    let low = v.trailing_zeros() as usize;
                    let prev = v & (v - 1);
                    let src_shift = &shifted[b - 7 + low];
                    let (head, tail) = tables.split_at_mut((cl * 256 + v) * words);
                    let prev_row = &head[(cl * 256 + prev) * words..][..words];
                    let row = &mut tail[..words];
                    for j in 0..words {
                        row[j] = prev_row[j] ^ src_shift[j];
                    }
                }
            }
            Some(tables)
        } else {
            None
        };

        Self {
            n_in: seed.n_in,
            m_out: seed.m_out,
            shifted,
            byte_tables,
            words,
            out_words: seed.m_out.div_ceil(64),
        }
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn m_out(&self) -> usize {
        self.m_out
    }

    /// `y = T x` for one exact-length input block.
    pub fn extract_block(&self, input: &BitBlock) -> Result<BitBlock> {
        if input.len() != self.n_in {
            return Err(Error::LengthMismatch {
                expected: self.n_in,
                got: input.len(),
            });
        }
        let mut acc = vec![0u64; self.out_words];
        self.accumulate(input.as_bytes(), 0, &mut acc);
        Ok(self.pack_output(&acc))
    }

    /// Extract one block starting at byte-aligned `bit_offset` in `bytes`.
    fn accumulate(&self, bytes: &[u8], bit_offset: usize, acc: &mut [u64]) {
        debug_assert_eq!(bit_offset % 8, 0);
        let start_byte = bit_offset / 8;
        match &self.byte_tables {
            Some(tables) => self.accumulate_bytes(tables, bytes, start_byte, acc),
            None => self.accumulate_bits(bytes, start_byte, acc),
        }
        // clear bits past m in the top word
        if self.m_out % 64 != 0 {
            acc[self.out_words - 1] &= (1u64 << (self.m_out % 64)) - 1;
        }
    }

    fn accumulate_bits(&self, bytes: &[u8], start_byte: usize, acc: &mut [u64]) {
        let ow = self.out_words;
        for c in 0..self.n_in {
            let byte = bytes[start_byte + c / 8];
            let bit = u64::from((byte >> (7 - (c % 8))) & 1);
            let mask = bit.wrapping_neg();
            let offset = self.n_in - 1 - c;
            let slice = &self.shifted[offset & 63][offset >> 6..];
            for (a, s) in acc.iter_mut().zip(&slice[..ow]) {
                *a ^= s & mask;
            }
        }
    }

    fn accumulate_bytes(&self, tables: &[u64], bytes: &[u8], start_byte: usize, acc: &mut [u64]) {
        let ow = self.out_words;
        let words = self.words;
        for ib in 0..self.n_in / 8 {
            let v = bytes[start_byte + ib] as usize;
            if v == 0 {
                continue;
            }
            // first offset of this byte; all eight share the word frame
            let o0 = self.n_in - 1 - 8 * ib;
            let class = (o0 & 63) >> 3;
            let base = o0 >> 6;
            let row = &tables[(class * 256 + v) * words + base..][..ow];
            for (a, s) in acc.iter_mut().zip(row) {
                *a ^= s;
            }
        }
    }

    fn pack_output(&self, acc: &[u64]) -> BitBlock {
        let mut bytes = vec![0u8; self.m_out.div_ceil(8)];
        if self.m_out % 8 == 0 {
            // byte-aligned reads never straddle a word: r0 % 64 <= 56
            for (i, slot) in bytes.iter_mut().enumerate() {
                let r0 = 8 * i;
                let w = acc[r0 / 64] >> (r0 % 64);
                *slot = (w as u8).reverse_bits();
            }
        } else {
            for r in 0..self.m_out {
                let bit = (acc[r / 64] >> (r % 64)) & 1;
                bytes[r / 8] |= (bit as u8) << (7 - (r % 8));
            }
        }
        BitBlock::from_bytes_truncated(bytes, self.m_out).expect("sized above")
    }

    /// Extract as many whole blocks as fit in `bits`, in input order.
    /// Returns the concatenated output and the number of whole blocks.
    pub fn extract_whole_blocks(&self, bits: &BitBlock) -> (BitBlock, usize) {
        let blocks = bits.len() / self.n_in;
        let mut out = BitBlock::with_capacity(blocks * self.m_out);
        let mut acc = vec![0u64; self.out_words];
        for blk in 0..blocks {
            acc.iter_mut().for_each(|a| *a = 0);
            let bit_offset = blk * self.n_in;
            if bit_offset % 8 == 0 {
                self.accumulate(bits.as_bytes(), bit_offset, &mut acc);
            } else {
                // unaligned geometry: gather the block bit by bit
                let mut tmp = BitBlock::with_capacity(self.n_in);
                for i in 0..self.n_in {
                    tmp.push(bits.bit(bit_offset + i));
                }
                self.accumulate(tmp.as_bytes(), 0, &mut acc);
            }
            out.append(&self.pack_output(&acc));
        }
        (out, blocks)
    }
}

/// Convenience single-block extraction.
pub fn extract_block(seed: &ToeplitzSeed, input: &BitBlock) -> Result<BitBlock> {
    ToeplitzExtractor::new(seed).extract_block(input)
}

/// Tallies of one streaming run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StreamStats {
    pub whole_blocks: usize,
    pub input_bits_used: usize,
    /// Trailing bits that did not fill a block.
    pub tail_bits_discarded: usize,
}

/// Incremental extractor: feed packed input, collect output in order.
pub struct StreamExtractor {
    engine: ToeplitzExtractor,
    carry: BitBlock,
    stats: StreamStats,
}

impl StreamExtractor {
    pub fn new(seed: &ToeplitzSeed) -> Self {
        Self {
            engine: ToeplitzExtractor::new(seed),
            carry: BitBlock::new(),
            stats: StreamStats::default(),
        }
    }

    pub fn engine(&self) -> &ToeplitzExtractor {
        &self.engine
    }

    /// Feed a symbol block; returns output produced by now-complete blocks.
    pub fn push_block(&mut self, block: &ByteBlock) -> BitBlock {
        self.push_bits(&block.to_bits())
    }

    /// Feed raw packed bits.
    pub fn push_bits(&mut self, bits: &BitBlock) -> BitBlock {
        self.carry.append(bits);
        let (out, blocks) = self.engine.extract_whole_blocks(&self.carry);
        if blocks > 0 {
            let consumed = blocks * self.engine.n_in;
            let mut rest = BitBlock::with_capacity(self.carry.len() - consumed);
            for i in consumed..self.carry.len() {
                rest.push(self.carry.bit(i));
            }
            self.carry = rest;
            self.stats.whole_blocks += blocks;
            self.stats.input_bits_used += consumed;
        }
        out
    }

    /// End the stream; leftover carry bits are discarded and counted.
    pub fn finish(mut self) -> StreamStats {
        self.stats.tail_bits_discarded = self.carry.len();
        self.stats
    }
}

/// Extract a whole in-memory stream of symbol blocks with one fixed seed.
pub fn extract_stream(
    seed: &ToeplitzSeed,
    inputs: &[ByteBlock],
) -> Result<(BitBlock, StreamStats)> {
    let mut stream = StreamExtractor::new(seed);
    let mut out = BitBlock::new();
    for block in inputs {
        out.append(&stream.push_block(block));
    }
    Ok((out, stream.finish()))
}

/// Leftover-hash distance exponent: `log2(eps) = (m - k) / 2` with
/// `k = n * h_per_symbol / symbol_bits` the input block's min-entropy.
pub fn security_epsilon_log2(n_in: usize, m_out: usize, h_per_symbol: f64, symbol_bits: u8) -> f64 {
    let k = n_in as f64 * h_per_symbol / f64::from(symbol_bits);
    (m_out as f64 - k) / 2.0
}
