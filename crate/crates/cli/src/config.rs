//! Pipeline configuration file.
//!
//! A versioned TOML document; every dimensioned quantity is a string with
//! a unit suffix, parsed by [`crate::units`]. Noise strengths, variances,
//! and gains are plain numbers in the model's calibrated units (gain = 1
//! convention: mV^2 composites per mW power).

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use pqn_core::sim::{self, LaserModel, OpticalChain, SamplerConfig};

use crate::units;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub version: u32,
    pub seed: u64,
    pub laser: RawLaser,
    pub interferometer: RawInterferometer,
    pub photodiode: RawPhotodiode,
    pub sampler: RawSampler,
    #[serde(default)]
    pub digitize: RawDigitize,
    #[serde(default)]
    pub timing: RawTiming,
    #[serde(default)]
    pub entropy: RawEntropy,
    #[serde(default)]
    pub extractor: RawExtractor,
    #[serde(default)]
    pub tests: RawTests,
    #[serde(default)]
    pub pipeline: RawPipeline,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawLaser {
    /// Optional if `spectral_width` and `wavelength` are given.
    pub linewidth: Option<String>,
    pub wavelength: String,
    #[serde(default)]
    pub spectral_width: Option<String>,
    pub power: String,
    pub quantum_strength: f64,
    pub classical_strength: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInterferometer {
    pub delay_length: String,
    pub group_index: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPhotodiode {
    pub bandwidth: String,
    pub background_variance: f64,
    #[serde(default = "one")]
    pub gain: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSampler {
    pub sample_rate: String,
    #[serde(default = "eight")]
    pub adc_bits: u8,
    #[serde(default = "sixteen")]
    pub oversample: u32,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RawDigitize {
    /// Acquisition vertical grid, e.g. "0.054 uV"; omit or "0 mV" to disable.
    pub vertical_resolution: Option<String>,
    pub chunk_samples: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTiming {
    pub dominance_factor: f64,
}

impl Default for RawTiming {
    fn default() -> Self {
        Self {
            dominance_factor: 10.0,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEntropy {
    pub safety_margin: f64,
    pub min_support: usize,
}

impl Default for RawEntropy {
    fn default() -> Self {
        Self {
            safety_margin: 0.03,
            min_support: 100,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawExtractor {
    pub block_bits: usize,
    /// Omit to use the ratio recommended by the entropy stage.
    pub ratio: Option<f64>,
}

impl Default for RawExtractor {
    fn default() -> Self {
        Self {
            block_bits: 4096,
            ratio: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTests {
    pub alpha: f64,
    pub min_bits: usize,
}

impl Default for RawTests {
    fn default() -> Self {
        Self {
            alpha: 0.01,
            min_bits: 1_000_000,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPipeline {
    pub samples: usize,
}

impl Default for RawPipeline {
    fn default() -> Self {
        Self { samples: 1_500_000 }
    }
}

fn one() -> f64 {
    1.0
}
fn eight() -> u8 {
    8
}
fn sixteen() -> u32 {
    16
}

/// Fully resolved configuration in canonical units.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub seed: u64,
    pub laser: LaserModel,
    pub chain: OpticalChain,
    pub sampler: SamplerConfig,
    pub dominance_factor: f64,
    pub vertical_resolution_mv: f64,
    pub chunk_samples: usize,
    pub entropy_safety_margin: f64,
    pub entropy_min_support: usize,
    pub extractor_block_bits: usize,
    pub extractor_ratio: Option<f64>,
    pub test_alpha: f64,
    pub test_min_bits: usize,
    pub pipeline_samples: usize,
}

/// Parse and resolve a config file.
pub fn load(path: &Path) -> Result<PipelineConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let raw: RawConfig =
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    resolve(raw)
}

pub fn resolve(raw: RawConfig) -> Result<PipelineConfig> {
    if raw.version != CONFIG_VERSION {
        bail!(
            "config version {} not supported (expected {CONFIG_VERSION})",
            raw.version
        );
    }

    let wavelength = units::parse_length_m(&raw.laser.wavelength).context("laser.wavelength")?;
    let spectral_width = raw
        .laser
        .spectral_width
        .as_deref()
        .map(units::parse_length_m)
        .transpose()
        .context("laser.spectral_width")?;
    let linewidth = match (&raw.laser.linewidth, spectral_width) {
        (Some(s), _) => units::parse_frequency_hz(s).context("laser.linewidth")?,
        (None, Some(dl)) => sim::linewidth_from_spectrum(dl, wavelength)
            .map_err(|e| anyhow::anyhow!("deriving linewidth: {e}"))?,
        (None, None) => bail!("laser needs either linewidth or spectral_width"),
    };

    let laser = LaserModel {
        linewidth_hz: linewidth,
        center_wavelength_m: wavelength,
        spectral_width_m: spectral_width.unwrap_or(0.0),
        power_mw: units::parse_power_mw(&raw.laser.power).context("laser.power")?,
        quantum_strength: raw.laser.quantum_strength,
        classical_strength: raw.laser.classical_strength,
    };
    let chain = OpticalChain {
        delay_length_m: units::parse_length_m(&raw.interferometer.delay_length)
            .context("interferometer.delay_length")?,
        group_index: raw.interferometer.group_index,
        pd_bandwidth_hz: units::parse_frequency_hz(&raw.photodiode.bandwidth)
            .context("photodiode.bandwidth")?,
        pd_background_var: raw.photodiode.background_variance,
        gain: raw.photodiode.gain,
    };
    let sampler = SamplerConfig {
        sample_rate_sps: units::parse_rate_sps(&raw.sampler.sample_rate)
            .context("sampler.sample_rate")?,
        adc_bits: raw.sampler.adc_bits,
        sim_oversample: raw.sampler.oversample,
    };
    laser
        .validate()
        .map_err(|e| anyhow::anyhow!("laser: {e}"))?;
    chain
        .validate()
        .map_err(|e| anyhow::anyhow!("chain: {e}"))?;
    sampler
        .validate()
        .map_err(|e| anyhow::anyhow!("sampler: {e}"))?;

    let vertical_resolution_mv = raw
        .digitize
        .vertical_resolution
        .as_deref()
        .map(units::parse_voltage_mv)
        .transpose()
        .context("digitize.vertical_resolution")?
        .unwrap_or(0.0);
    if vertical_resolution_mv < 0.0 {
        bail!("digitize.vertical_resolution must be >= 0");
    }
    if let Some(r) = raw.extractor.ratio {
        if !(r > 0.0 && r <= 1.0) {
            bail!("extractor.ratio must be in (0, 1], got {r}");
        }
    }
    if raw.extractor.block_bits == 0 {
        bail!("extractor.block_bits must be > 0");
    }

    Ok(PipelineConfig {
        seed: raw.seed,
        laser,
        chain,
        sampler,
        dominance_factor: raw.timing.dominance_factor,
        vertical_resolution_mv,
        chunk_samples: raw.digitize.chunk_samples.unwrap_or(1 << 20),
        entropy_safety_margin: raw.entropy.safety_margin,
        entropy_min_support: raw.entropy.min_support,
        extractor_block_bits: raw.extractor.block_bits,
        extractor_ratio: raw.extractor.ratio,
        test_alpha: raw.tests.alpha,
        test_min_bits: raw.tests.min_bits,
        pipeline_samples: raw.pipeline.samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const REFERENCE_TOML: &str = r#"
version = 1
seed = 20260809

[laser]
linewidth = "5.23 GHz"
wavelength = "1551.1970 nm"
spectral_width = "0.0421 nm"
power = "172.37 uW"
quantum_strength = 6.72e-7
classical_strength = 1.51e-6

[interferometer]
delay_length = "48 cm"
group_index = 1.468

[photodiode]
bandwidth = "5 GHz"
background_variance = 4.5e-8
gain = 1.0

[sampler]
sample_rate = "250 MS/s"
adc_bits = 8
oversample = 16

[digitize]
vertical_resolution = "0.054 uV"

[extractor]
block_bits = 4096
ratio = 0.5
"#;

    #[test]
    fn reference_config_resolves() {
        let raw: RawConfig = toml::from_str(REFERENCE_TOML).unwrap();
        let cfg = resolve(raw).unwrap();
        assert_eq!(cfg.seed, 20260809);
        assert_eq!(cfg.laser.linewidth_hz, 5.23e9);
        assert_eq!(cfg.laser.power_mw, 0.17237);
        assert_eq!(cfg.chain.delay_length_m, 0.48);
        assert_eq!(cfg.sampler.sample_rate_sps, 250e6);
        assert_eq!(cfg.extractor_ratio, Some(0.5));
        assert!((cfg.vertical_resolution_mv - 5.4e-5).abs() < 1e-18);
        assert_eq!(cfg.chunk_samples, 1 << 20);
        assert_eq!(cfg.test_alpha, 0.01);
    }

    #[test]
    fn linewidth_derivable_from_spectrum() {
        let toml_text = REFERENCE_TOML.replace("linewidth = \"5.23 GHz\"\n", "");
        let raw: RawConfig = toml::from_str(&toml_text).unwrap();
        let cfg = resolve(raw).unwrap();
        assert!((cfg.laser.linewidth_hz - 5.2455e9).abs() / 5.2455e9 < 1e-3);
    }

    #[test]
    fn version_and_field_validation() {
        let bad_version = REFERENCE_TOML.replace("version = 1", "version = 2");
        let raw: RawConfig = toml::from_str(&bad_version).unwrap();
        assert!(resolve(raw).is_err());

        // unit-less quantity rejected
        let no_unit = REFERENCE_TOML.replace("\"48 cm\"", "\"48\"");
        let raw: RawConfig = toml::from_str(&no_unit).unwrap();
        assert!(resolve(raw).is_err());

        // unknown keys rejected at parse time
        let extra = format!("{REFERENCE_TOML}\n[bogus]\nx = 1\n");
        assert!(toml::from_str::<RawConfig>(&extra).is_err());

        let bad_ratio = REFERENCE_TOML.replace("ratio = 0.5", "ratio = 1.5");
        let raw: RawConfig = toml::from_str(&bad_ratio).unwrap();
        assert!(resolve(raw).is_err());
    }
}
