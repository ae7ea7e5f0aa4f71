//! Power spectral density estimation (Welch averaging).
//!
//! Hann-windowed, mean-detrended, overlapped segment averaging with a
//! one-sided density normalization: the sum of `psd * df` over all bins
//! recovers the time-domain variance. Values are reported in dB relative
//! to 1 mV^2/Hz and floored at -300 dB so silent inputs stay finite.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::sim::SampleBlock;

/// Floor applied to log-domain PSD values.
pub const PSD_FLOOR_DB: f64 = -300.0;

/// One-sided PSD estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate {
    /// Bin centers (Hz), 0 ..= fs/2.
    pub freqs_hz: Vec<f64>,
    /// Power density per bin, dB re 1 mV^2/Hz, floored at [`PSD_FLOOR_DB`].
    pub psd_db: Vec<f64>,
    pub segment_len: usize,
    pub overlap: f64,
}

/// Welch PSD of a sample block.
///
/// `segment_len` must be a power of two no longer than the block;
/// `overlap` is the segment overlap fraction in `[0, 1)`.
pub fn estimate_psd(block: &SampleBlock, segment_len: usize, overlap: f64) -> Result<PsdEstimate> {
    if !segment_len.is_power_of_two() || segment_len < 2 {
        return Err(Error::InvalidModel(alloc::format!(
            "segment length must be a power of two >= 2, got {segment_len}"
        )));
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::InvalidModel(alloc::format!(
            "overlap must be in [0, 1), got {overlap}"
        )));
    }
    let n = block.samples.len();
    if n < segment_len {
        return Err(Error::InsufficientData {
            needed: segment_len,
            got: n,
        });
    }
    let fs = 1.0 / block.sample_period_s;
    let step = ((segment_len as f64) * (1.0 - overlap)) as usize;
    let step = step.max(1);

    // periodic Hann window
    let window: Vec<f64> = (0..segment_len)
        .map(|i| {
            0.5 * (1.0 - libm::cos(2.0 * core::f64::consts::PI * i as f64 / segment_len as f64))
        })
        .collect();
    let window_power: f64 = window.iter().map(|w| w * w).sum();

    let half = segment_len / 2;
    let tw = fft::twiddles(segment_len);
    let mut acc = vec![0.0f64; half + 1];
    let mut buf = vec![Complex64::new(0.0, 0.0); segment_len];
    let mut segments = 0usize;
    let mut start = 0usize;
    while start + segment_len <= n {
        let seg = &block.samples[start..start + segment_len];
        let mean = seg.iter().sum::<f64>() / segment_len as f64;
        for (i, (&v, &w)) in seg.iter().zip(&window).enumerate() {
            buf[i] = Complex64::new((v - mean) * w, 0.0);
        }
        fft::fft_in_place(&mut buf, &tw);
        for (k, slot) in acc.iter_mut().enumerate() {
            *slot += buf[k].norm_sqr();
        }
        segments += 1;
        start += step;
    }
    debug_assert!(segments >= 1);

    let scale = 1.0 / (fs * window_power * segments as f64);
    let df = fs / segment_len as f64;
    let mut freqs = Vec::with_capacity(half + 1);
    let mut psd_db = Vec::with_capacity(half + 1);
    for (k, &power) in acc.iter().enumerate() {
        // interior bins carry the mirrored half of the spectrum
        let one_sided = if k == 0 || k == half { 1.0 } else { 2.0 };
        let density = power * scale * one_sided;
        freqs.push(k as f64 * df);
        psd_db.push(if density > 0.0 {
            (10.0 * libm::log10(density)).max(PSD_FLOOR_DB)
        } else {
            PSD_FLOOR_DB
        });
    }
    Ok(PsdEstimate {
        freqs_hz: freqs,
        psd_db,
        segment_len,
        overlap,
    })
}

/// Mean of `psd_db` over bins with `f_lo <= f <= f_hi`.
pub fn average_band_power(psd: &PsdEstimate, f_lo: f64, f_hi: f64) -> Result<f64> {
    if !(f_lo < f_hi) {
        return Err(Error::InvalidModel(alloc::format!(
            "band requires f_lo < f_hi, got [{f_lo}, {f_hi}]"
        )));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for (f, db) in psd.freqs_hz.iter().zip(&psd.psd_db) {
        if *f >= f_lo && *f <= f_hi {
            sum += db;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::EmptyBand);
    }
    Ok(sum / count as f64)
}
