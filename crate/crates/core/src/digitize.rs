//! ADC quantization, normalization to unsigned symbols, and rate budgets.
//!
//! Acquired voltage blocks are mapped affinely onto the full symbol range
//! `[0, 2^bits - 1]` using the block extrema:
//!
//! ```text
//! beta_i = round((delta_i - delta_min) / (delta_max - delta_min) * (2^bits - 1))
//! ```
//!
//! with half-way values rounded up, then clamped. Extrema are per-block
//! statistics; streaming callers re-normalize per chunk and record the
//! chunk extrema in metadata.
//!
//! [`quantize_vertical`] models the acquisition front end's finite vertical
//! resolution: samples snap to a fixed voltage grid before normalization,
//! which is what leaves part of the symbol range unpopulated on real
//! captures of a small signal.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::sim::SampleBlock;

/// Provenance carried through the digital chain.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SourceMeta {
    /// Seed of the producing simulation (0 when not applicable).
    pub seed: u64,
    /// Hash of the producing model (0 when not applicable).
    pub model_hash: u64,
    /// Minimum voltage of the normalized block (mV).
    pub delta_min: f64,
    /// Maximum voltage of the normalized block (mV).
    pub delta_max: f64,
}

/// A block of unsigned symbols in `[0, 2^adc_bits - 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ByteBlock {
    pub symbols: Vec<u16>,
    pub adc_bits: u8,
    pub meta: SourceMeta,
}

impl ByteBlock {
    pub fn new(symbols: Vec<u16>, adc_bits: u8, meta: SourceMeta) -> Result<Self> {
        if !(1..=16).contains(&adc_bits) {
            return Err(Error::InvalidModel(format!(
                "adc_bits must be in 1..=16, got {adc_bits}"
            )));
        }
        let limit = symbol_count(adc_bits);
        if let Some(&bad) = symbols.iter().find(|&&s| u32::from(s) >= limit) {
            return Err(Error::InvalidModel(format!(
                "symbol {bad} exceeds 2^{adc_bits} - 1"
            )));
        }
        Ok(Self {
            symbols,
            adc_bits,
            meta,
        })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Total payload bits.
    pub fn bit_len(&self) -> usize {
        self.symbols.len() * self.adc_bits as usize
    }

    /// Pack all symbols into a bit stream, each symbol MSB-first.
    pub fn to_bits(&self) -> crate::bits::BitBlock {
        if self.adc_bits == 8 {
            let bytes: Vec<u8> = self.symbols.iter().map(|&s| s as u8).collect();
            return crate::bits::BitBlock::from_bytes(bytes);
        }
        let mut out = crate::bits::BitBlock::with_capacity(self.bit_len());
        for &s in &self.symbols {
            out.push_symbol_msb(s, self.adc_bits);
        }
        out
    }
}

/// Number of representable symbols for a resolution.
pub fn symbol_count(adc_bits: u8) -> u32 {
    1u32 << adc_bits
}

/// Raw and post-processed bit rates tied by the extraction ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBudget {
    /// Raw generation rate (bits/s).
    pub raw_bps: f64,
    /// Extraction ratio in (0, 1].
    pub extraction_ratio: f64,
    /// Post-processed rate (bits/s), `extraction_ratio * raw_bps`.
    pub post_bps: f64,
}

impl RateBudget {
    pub fn new(raw_bps: f64, extraction_ratio: f64) -> Result<Self> {
        if !(extraction_ratio > 0.0 && extraction_ratio <= 1.0) {
            return Err(Error::RatioOutOfRange(extraction_ratio));
        }
        Ok(Self {
            raw_bps,
            extraction_ratio,
            post_bps: extraction_ratio * raw_bps,
        })
    }
}

/// Raw generation rate `fs * adc_bits` in bits/second.
pub fn raw_rate(sampler: &crate::sim::SamplerConfig) -> f64 {
    sampler.sample_rate_sps * f64::from(sampler.adc_bits)
}

/// Post-processed rate of a budget (the stored product).
pub fn post_rate(budget: &RateBudget) -> f64 {
    budget.post_bps
}

/// Snap every sample to a fixed vertical grid of pitch `step_mv`.
///
/// Models the digitizer's vertical resolution ahead of normalization;
/// `step_mv = 0` disables the grid. Ties round half away from zero.
pub fn quantize_vertical(block: &SampleBlock, step_mv: f64) -> Result<SampleBlock> {
    if step_mv < 0.0 || !step_mv.is_finite() {
        return Err(Error::InvalidModel(format!(
            "vertical step must be finite and >= 0, got {step_mv}"
        )));
    }
    if step_mv == 0.0 {
        return Ok(block.clone());
    }
    let samples = block
        .samples
        .iter()
        .map(|&v| libm::round(v / step_mv) * step_mv)
        .collect();
    SampleBlock::new(samples, block.sample_period_s, block.origin)
}

/// Normalize a voltage block onto `[0, 2^adc_bits - 1]` per the affine map.
pub fn normalize(block: &SampleBlock, adc_bits: u8) -> Result<ByteBlock> {
    if !(1..=16).contains(&adc_bits) {
        return Err(Error::InvalidModel(format!(
            "adc_bits must be in 1..=16, got {adc_bits}"
        )));
    }
    if block.samples.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: block.samples.len(),
        });
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in &block.samples {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !(hi > lo) {
        return Err(Error::DegenerateRange);
    }
    let top = f64::from(symbol_count(adc_bits) - 1);
    let scale = top / (hi - lo);
    let symbols = block
        .samples
        .iter()
        .map(|&v| {
            // nearest with ties toward +inf, then clamp
            let x = (v - lo) * scale;
            libm::floor(x + 0.5).clamp(0.0, top) as u16
        })
        .collect();
    Ok(ByteBlock {
        symbols,
        adc_bits,
        meta: SourceMeta {
            seed: block.origin.seed,
            model_hash: block.origin.model_hash,
            delta_min: lo,
            delta_max: hi,
        },
    })
}

/// Exact symbol counts; the result has `2^adc_bits` entries.
pub fn histogram(block: &ByteBlock) -> Result<Vec<u64>> {
    if block.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut counts = vec![0u64; symbol_count(block.adc_bits) as usize];
    for &s in &block.symbols {
        counts[s as usize] += 1;
    }
    Ok(counts)
}

/// Fraction of histogram bins with zero hits.
pub fn empty_bin_fraction(counts: &[u64]) -> f64 {
    if counts.is_empty() {
        return 0.0;
    }
    counts.iter().filter(|&&c| c == 0).count() as f64 / counts.len() as f64
}
