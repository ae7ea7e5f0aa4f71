//! On-disk formats.
//!
//! Binary blocks use a fixed 64-byte little-endian header with a 4-byte
//! magic, then the payload:
//!
//! * `.pqns` — magic `PQNS`; version u16; reserved u16; sample rate f64;
//!   sample count u64; seed u64; model hash u64; zero padding. Payload:
//!   samples as f64 LE (mV).
//! * `.pqnb` — magic `PQNB`; version u16; adc_bits u8; reserved u8;
//!   symbol count u64; seed u64; model hash u64; block minimum f64; block
//!   maximum f64; zero padding. Payload: one byte per symbol when
//!   adc_bits <= 8, else u16 LE per symbol.
//! * `.pqts` — magic `PQTS`; version u16; reserved u16; input bits u64;
//!   output bits u64; seed bit count u64; zero padding. Payload: seed bits
//!   packed MSB-first.
//!
//! Extracted output is headerless raw bytes, consumable by external
//! statistical suites; its run report travels in a text sidecar.

use std::fs;
use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

use pqn_core::bits::BitBlock;
use pqn_core::digitize::{ByteBlock, SourceMeta};
use pqn_core::extractor::{seed_len_bits, ToeplitzSeed};
use pqn_core::sim::{BlockOrigin, SampleBlock};
use pqn_core::variance::VariancePoint;

pub const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 64;

/// Magic and version; each format appends its own fields from offset 6.
fn header(magic: &[u8; 4]) -> Vec<u8> {
    let mut h = Vec::with_capacity(HEADER_LEN);
    h.extend_from_slice(magic);
    h.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    h
}

fn finish_header(mut h: Vec<u8>) -> Vec<u8> {
    assert!(h.len() <= HEADER_LEN);
    h.resize(HEADER_LEN, 0);
    h
}

fn check_header(buf: &[u8], magic: &[u8; 4], what: &str) -> Result<()> {
    if buf.len() < HEADER_LEN {
        bail!("{what}: file shorter than the 64-byte header");
    }
    if &buf[0..4] != magic {
        bail!("{what}: bad magic {:?}", &buf[0..4]);
    }
    let version = u16::from_le_bytes([buf[4], buf[5]]);
    if version != FORMAT_VERSION {
        bail!("{what}: unsupported format version {version}");
    }
    Ok(())
}

fn f64_at(buf: &[u8], off: usize) -> f64 {
    f64::from_le_bytes(buf[off..off + 8].try_into().unwrap())
}

fn u64_at(buf: &[u8], off: usize) -> u64 {
    u64::from_le_bytes(buf[off..off + 8].try_into().unwrap())
}

/// Write a sample block as `.pqns`.
pub fn write_pqns(path: &Path, block: &SampleBlock) -> Result<()> {
    let mut h = header(b"PQNS");
    h.extend_from_slice(&[0u8; 2]);
    h.extend_from_slice(&(1.0 / block.sample_period_s).to_le_bytes());
    h.extend_from_slice(&(block.samples.len() as u64).to_le_bytes());
    h.extend_from_slice(&block.origin.seed.to_le_bytes());
    h.extend_from_slice(&block.origin.model_hash.to_le_bytes());
    let mut out = finish_header(h);
    out.reserve(block.samples.len() * 8);
    for v in &block.samples {
        out.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Read a `.pqns` file.
pub fn read_pqns(path: &Path) -> Result<SampleBlock> {
    let buf = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    check_header(&buf, b"PQNS", "pqns")?;
    let fs_rate = f64_at(&buf, 8);
    let n = u64_at(&buf, 16) as usize;
    let seed = u64_at(&buf, 24);
    let model_hash = u64_at(&buf, 32);
    if !(fs_rate > 0.0) {
        bail!("pqns: non-positive sample rate {fs_rate}");
    }
    let want = HEADER_LEN + 8 * n;
    if buf.len() != want {
        bail!(
            "pqns: expected {want} bytes for {n} samples, found {}",
            buf.len()
        );
    }
    let samples = (0..n).map(|i| f64_at(&buf, HEADER_LEN + 8 * i)).collect();
    SampleBlock::new(samples, 1.0 / fs_rate, BlockOrigin { seed, model_hash })
        .map_err(|e| anyhow::anyhow!("pqns: {e}"))
}

/// Write a symbol block as `.pqnb`.
pub fn write_pqnb(path: &Path, block: &ByteBlock) -> Result<()> {
    let mut h = header(b"PQNB");
    h.push(block.adc_bits);
    h.push(0);
    h.extend_from_slice(&(block.symbols.len() as u64).to_le_bytes());
    h.extend_from_slice(&block.meta.seed.to_le_bytes());
    h.extend_from_slice(&block.meta.model_hash.to_le_bytes());
    h.extend_from_slice(&block.meta.delta_min.to_le_bytes());
    h.extend_from_slice(&block.meta.delta_max.to_le_bytes());
    let mut out = finish_header(h);
    if block.adc_bits <= 8 {
        out.extend(block.symbols.iter().map(|&s| s as u8));
    } else {
        for &s in &block.symbols {
            out.extend_from_slice(&s.to_le_bytes());
        }
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Read a `.pqnb` file.
pub fn read_pqnb(path: &Path) -> Result<ByteBlock> {
    let buf = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    check_header(&buf, b"PQNB", "pqnb")?;
    let adc_bits = buf[6];
    let n = u64_at(&buf, 8) as usize;
    let meta = SourceMeta {
        seed: u64_at(&buf, 16),
        model_hash: u64_at(&buf, 24),
        delta_min: f64_at(&buf, 32),
        delta_max: f64_at(&buf, 40),
    };
    let wide = adc_bits > 8;
    let want = HEADER_LEN + n * if wide { 2 } else { 1 };
    if buf.len() != want {
        bail!(
            "pqnb: expected {want} bytes for {n} symbols, found {}",
            buf.len()
        );
    }
    let symbols = if wide {
        (0..n)
            .map(|i| u16::from_le_bytes([buf[HEADER_LEN + 2 * i], buf[HEADER_LEN + 2 * i + 1]]))
            .collect()
    } else {
        buf[HEADER_LEN..].iter().map(|&b| u16::from(b)).collect()
    };
    ByteBlock::new(symbols, adc_bits, meta).map_err(|e| anyhow::anyhow!("pqnb: {e}"))
}

/// Write an extractor seed as `.pqts`.
pub fn write_pqts(path: &Path, seed: &ToeplitzSeed) -> Result<()> {
    let mut h = header(b"PQTS");
    h.extend_from_slice(&[0u8; 2]);
    h.extend_from_slice(&(seed.n_in() as u64).to_le_bytes());
    h.extend_from_slice(&(seed.m_out() as u64).to_le_bytes());
    h.extend_from_slice(&(seed.bits().len() as u64).to_le_bytes());
    let mut out = finish_header(h);
    out.extend_from_slice(seed.bits().as_bytes());
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Read a `.pqts` file.
pub fn read_pqts(path: &Path) -> Result<ToeplitzSeed> {
    let buf = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    check_header(&buf, b"PQTS", "pqts")?;
    let n = u64_at(&buf, 8) as usize;
    let m = u64_at(&buf, 16) as usize;
    let bit_count = u64_at(&buf, 24) as usize;
    if bit_count != seed_len_bits(n, m) {
        bail!("pqts: bit count {bit_count} does not match geometry n = {n}, m = {m}");
    }
    let want = HEADER_LEN + bit_count.div_ceil(8);
    if buf.len() != want {
        bail!("pqts: expected {want} bytes, found {}", buf.len());
    }
    let bits = BitBlock::from_bytes_truncated(buf[HEADER_LEN..].to_vec(), bit_count)
        .map_err(|e| anyhow::anyhow!("pqts: {e}"))?;
    ToeplitzSeed::from_bits(n, m, &bits).map_err(|e| anyhow::anyhow!("pqts: {e}"))
}

/// Write extracted bits as headerless raw bytes (padded to a whole byte).
pub fn write_raw_bits(path: &Path, bits: &BitBlock) -> Result<()> {
    fs::write(path, bits.as_bytes()).with_context(|| format!("writing {}", path.display()))
}

/// Read a headerless byte file as a bit stream.
pub fn read_raw_bits(path: &Path) -> Result<BitBlock> {
    let mut buf = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut buf))
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(BitBlock::from_bytes(buf))
}

/// Write variance points as `power_mw,variance_mv2,n_samples` CSV.
pub fn write_points_csv(path: &Path, points: &[VariancePoint]) -> Result<()> {
    let mut out = String::from("power_mw,variance_mv2,n_samples\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{}\n",
            p.power_mw, p.variance_mv2, p.n_samples
        ));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Read a variance-point CSV (header optional).
pub fn read_points_csv(path: &Path) -> Result<Vec<VariancePoint>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if lineno == 0 && line.starts_with("power_mw") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 2 {
            bail!(
                "{}:{}: expected power_mw,variance_mv2[,n_samples]",
                path.display(),
                lineno + 1
            );
        }
        let power_mw: f64 = fields[0]
            .parse()
            .with_context(|| format!("{}:{}: bad power", path.display(), lineno + 1))?;
        let variance_mv2: f64 = fields[1]
            .parse()
            .with_context(|| format!("{}:{}: bad variance", path.display(), lineno + 1))?;
        let n_samples: u64 = if fields.len() > 2 {
            fields[2]
                .parse()
                .with_context(|| format!("{}:{}: bad sample count", path.display(), lineno + 1))?
        } else {
            0
        };
        points.push(VariancePoint {
            power_mw,
            variance_mv2,
            n_samples,
        });
    }
    Ok(points)
}

/// Write a PSD as `freq_hz,psd_db` CSV.
pub fn write_psd_csv(path: &Path, psd: &pqn_core::spectral::PsdEstimate) -> Result<()> {
    let mut out = String::from("freq_hz,psd_db\n");
    for (f, db) in psd.freqs_hz.iter().zip(&psd.psd_db) {
        out.push_str(&format!("{f},{db}\n"));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Write a histogram as `symbol,count` CSV.
pub fn write_histogram_csv(path: &Path, counts: &[u64]) -> Result<()> {
    let mut out = String::from("symbol,count\n");
    for (symbol, count) in counts.iter().enumerate() {
        out.push_str(&format!("{symbol},{count}\n"));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// SHA-256 of a file, hex encoded.
pub fn sha256_file(path: &Path) -> Result<String> {
    let buf = fs::read(path).with_context(|| format!("hashing {}", path.display()))?;
    let digest = Sha256::digest(&buf);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// SHA-256 of a byte slice, hex encoded.
pub fn sha256_bytes(data: &[u8]) -> String {
    Sha256::digest(data)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
