//! Deterministic simulation of the optical chain.
//!
//! The signal path is: laser phase noise → unbalanced two-arm
//! interferometer biased at quadrature → photodiode (single-pole low-pass
//! plus additive background) → sampler. The differential phase between the
//! arms, `dtheta(t) = theta(t - Td) - theta(t)`, diffuses as a Wiener
//! process; a slowly varying Ornstein-Uhlenbeck term models classical
//! (power-independent) phase noise. The voltage is
//!
//! ```text
//! V(t) = gain * P * sin(dtheta(t) + theta_c(t))   [mV]
//! ```
//!
//! low-pass filtered with the photodiode time constant and sampled at `fs`,
//! plus white Gaussian detector background of variance `F`.
//!
//! Noise calibration convention: with `gain = 1` the per-sample variance is
//! `C*P^2 + Q*P + F`, i.e. `quantum_strength` and `classical_strength` are
//! exactly the fitted linear/quadratic composites of the variance model.
//! The Wiener increment variance per fine step is therefore
//! `Q / (P * d)` over the `d`-step discretized delay — equivalently
//! `2*pi*dnu_eff*dt` for an effective diffusion linewidth
//! `dnu_eff = Q / (2*pi*P*Td_eff)`. The spectral linewidth field is the
//! *measured* linewidth; it sets the coherence time and the timing budget,
//! not the injected noise power (the two are not mutually consistent on
//! real near-threshold hardware, and the variance calibration wins here).
//!
//! Everything is a pure function of (models, seed): per-purpose ChaCha12
//! streams are derived from the seed with [`crate::seed::derive`], so equal
//! inputs give byte-identical blocks on every platform.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::GaussianSource;
use crate::seed;
use crate::timing::TimingBudget;

/// Speed of light used throughout (m/s).
pub const SPEED_OF_LIGHT_M_S: f64 = 2.998e8;

/// 10-90% rise time of a single-pole system in units of its time constant.
const RISE_LN9: f64 = 2.197_224_577_336_219_6;

/// Relative intensity fluctuation, as a fraction of the quantum phase-noise
/// voltage contribution at the same power.
pub const RIN_FRACTION: f64 = 0.1;

/// Laser source parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserModel {
    /// Measured optical linewidth (Hz).
    pub linewidth_hz: f64,
    /// Center wavelength (m).
    pub center_wavelength_m: f64,
    /// Spectral width of the emission (m).
    pub spectral_width_m: f64,
    /// Operating output power P (mW).
    pub power_mw: f64,
    /// Quantum phase-noise strength Q (phase-variance * mW).
    pub quantum_strength: f64,
    /// Classical phase-noise strength C (phase-variance).
    pub classical_strength: f64,
}

impl LaserModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.linewidth_hz > 0.0) {
            return Err(Error::InvalidModel(format!(
                "linewidth must be > 0 Hz, got {}",
                self.linewidth_hz
            )));
        }
        if !(self.center_wavelength_m > 0.0) {
            return Err(Error::InvalidModel(format!(
                "center wavelength must be > 0 m, got {}",
                self.center_wavelength_m
            )));
        }
        if self.spectral_width_m < 0.0 {
            return Err(Error::InvalidModel(format!(
                "spectral width must be >= 0 m, got {}",
                self.spectral_width_m
            )));
        }
        if self.power_mw < 0.0 {
            return Err(Error::InvalidModel(format!(
                "power must be >= 0 mW, got {}",
                self.power_mw
            )));
        }
        if self.quantum_strength < 0.0 || self.classical_strength < 0.0 {
            return Err(Error::InvalidModel(format!(
                "noise strengths must be >= 0, got Q = {}, C = {}",
                self.quantum_strength, self.classical_strength
            )));
        }
        Ok(())
    }
}

/// Interferometer geometry and photodiode response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalChain {
    /// Arm-length imbalance (m).
    pub delay_length_m: f64,
    /// Effective fiber group index.
    pub group_index: f64,
    /// Photodiode small-signal bandwidth f_-3dB (Hz).
    pub pd_bandwidth_hz: f64,
    /// Detector background variance F (mV^2).
    pub pd_background_var: f64,
    /// Phase-to-voltage proportionality (mV per mW*rad).
    pub gain: f64,
}

impl OpticalChain {
    pub fn validate(&self) -> Result<()> {
        if self.delay_length_m < 0.0 {
            return Err(Error::InvalidModel(format!(
                "delay length must be >= 0 m, got {}",
                self.delay_length_m
            )));
        }
        if !(self.group_index > 0.0) {
            return Err(Error::InvalidModel(format!(
                "group index must be > 0, got {}",
                self.group_index
            )));
        }
        if !(self.pd_bandwidth_hz > 0.0) {
            return Err(Error::InvalidModel(format!(
                "photodiode bandwidth must be > 0 Hz, got {}",
                self.pd_bandwidth_hz
            )));
        }
        if self.pd_background_var < 0.0 {
            return Err(Error::InvalidModel(format!(
                "detector background variance must be >= 0, got {}",
                self.pd_background_var
            )));
        }
        if !(self.gain > 0.0) {
            return Err(Error::InvalidModel(format!(
                "gain must be > 0, got {}",
                self.gain
            )));
        }
        Ok(())
    }
}

/// Sampler configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    /// Sampling rate fs (samples/s).
    pub sample_rate_sps: f64,
    /// ADC resolution (bits), 1..=16.
    pub adc_bits: u8,
    /// Internal fine-step factor per sample period, >= 4.
    pub sim_oversample: u32,
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate_sps > 0.0) {
            return Err(Error::InvalidModel(format!(
                "sample rate must be > 0, got {}",
                self.sample_rate_sps
            )));
        }
        if !(1..=16).contains(&self.adc_bits) {
            return Err(Error::InvalidModel(format!(
                "adc_bits must be in 1..=16, got {}",
                self.adc_bits
            )));
        }
        if self.sim_oversample < 4 {
            return Err(Error::InvalidModel(format!(
                "sim_oversample must be >= 4, got {}",
                self.sim_oversample
            )));
        }
        Ok(())
    }

    /// Sampling period Ts (s).
    pub fn sample_period_s(&self) -> f64 {
        1.0 / self.sample_rate_sps
    }
}

/// Where a block came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BlockOrigin {
    pub seed: u64,
    pub model_hash: u64,
}

/// A contiguous run of analog voltage samples (mV).
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBlock {
    pub samples: Vec<f64>,
    /// Spacing between samples (s).
    pub sample_period_s: f64,
    pub origin: BlockOrigin,
}

impl SampleBlock {
    pub fn new(samples: Vec<f64>, sample_period_s: f64, origin: BlockOrigin) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput);
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel(alloc::string::String::from(
                "sample block contains non-finite values",
            )));
        }
        Ok(Self {
            samples,
            sample_period_s,
            origin,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Population variance, two-pass compensated.
    pub fn variance(&self) -> f64 {
        variance_of(&self.samples)
    }
}

/// Two-pass compensated population variance.
pub fn variance_of(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let n = samples.len() as f64;
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &v in samples {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() {
            (sum - t) + v
        } else {
            (v - t) + sum
        };
        sum = t;
    }
    let mean = (sum + comp) / n;
    let mut acc = 0.0;
    let mut c2 = 0.0;
    for &v in samples {
        let d = (v - mean) * (v - mean);
        let t = acc + d;
        c2 += if acc.abs() >= d.abs() {
            (acc - t) + d
        } else {
            (d - t) + acc
        };
        acc = t;
    }
    (acc + c2) / n
}

/// Coherence time `Tc = 1 / linewidth`.
pub fn coherence_time(laser: &LaserModel) -> Result<f64> {
    if !(laser.linewidth_hz > 0.0) {
        return Err(Error::InvalidModel(format!(
            "coherence time needs linewidth > 0, got {}",
            laser.linewidth_hz
        )));
    }
    Ok(1.0 / laser.linewidth_hz)
}

/// Linewidth in Hz from a spectral width: `c * dlambda / lambda^2`.
pub fn linewidth_from_spectrum(delta_lambda_m: f64, lambda_m: f64) -> Result<f64> {
    if !(lambda_m > 0.0) {
        return Err(Error::InvalidModel(format!(
            "wavelength must be > 0 m, got {lambda_m}"
        )));
    }
    if delta_lambda_m < 0.0 {
        return Err(Error::InvalidModel(format!(
            "spectral width must be >= 0 m, got {delta_lambda_m}"
        )));
    }
    Ok(SPEED_OF_LIGHT_M_S * delta_lambda_m / (lambda_m * lambda_m))
}

/// Interferometer delay `Td = n * dL / c`.
pub fn delay_time(chain: &OpticalChain) -> f64 {
    chain.group_index * chain.delay_length_m / SPEED_OF_LIGHT_M_S
}

/// Photodiode 10-90% response time `Tr = 0.35 / f_-3dB`.
pub fn response_time(chain: &OpticalChain) -> f64 {
    0.35 / chain.pd_bandwidth_hz
}

/// Assemble the four-timescale budget for a configured system.
pub fn timing_budget(
    laser: &LaserModel,
    chain: &OpticalChain,
    sampler: &SamplerConfig,
    dominance_factor: f64,
) -> Result<TimingBudget> {
    TimingBudget::with_dominance(
        coherence_time(laser)?,
        delay_time(chain),
        response_time(chain),
        sampler.sample_period_s(),
        dominance_factor,
    )
}

/// Stable hash of the full model triple, for provenance headers.
pub fn model_hash(laser: &LaserModel, chain: &OpticalChain, sampler: &SamplerConfig) -> u64 {
    let mut bytes = Vec::with_capacity(13 * 8);
    for v in [
        laser.linewidth_hz,
        laser.center_wavelength_m,
        laser.spectral_width_m,
        laser.power_mw,
        laser.quantum_strength,
        laser.classical_strength,
        chain.delay_length_m,
        chain.group_index,
        chain.pd_bandwidth_hz,
        chain.pd_background_var,
        chain.gain,
        sampler.sample_rate_sps,
    ] {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    bytes.push(sampler.adc_bits);
    bytes.extend_from_slice(&sampler.sim_oversample.to_le_bytes());
    seed::fnv1a64(&bytes)
}

/// Discretization of one simulation run.
struct Grid {
    /// Fine step (s).
    dt: f64,
    /// Delay in fine steps.
    delay_steps: usize,
    /// Fine steps discarded before the first emitted sample.
    warmup: usize,
    oversample: usize,
}

fn build_grid(chain: &OpticalChain, sampler: &SamplerConfig) -> Result<Grid> {
    let ts = sampler.sample_period_s();
    let ov = sampler.sim_oversample as usize;
    let dt = ts / ov as f64;
    let td = delay_time(chain);
    if td > 0.0 && td < 2.0 * dt {
        return Err(Error::Resolution(format!(
            "delay {td:.3e} s needs at least two fine steps, but dt = {dt:.3e} s; \
             raise sim_oversample"
        )));
    }
    let delay_steps = libm::round(td / dt) as usize;
    let tau_pd = response_time(chain) / RISE_LN9;
    let filter_warm = libm::ceil(8.0 * tau_pd / dt) as usize;
    Ok(Grid {
        dt,
        delay_steps,
        warmup: delay_steps + ov + filter_warm,
        oversample: ov,
    })
}

/// Phase/voltage synthesis shared by the voltage simulation and the
/// differential-phase tap.
struct PhaseEngine {
    quantum: GaussianSource<crate::rng::Rng>,
    classical: GaussianSource<crate::rng::Rng>,
    /// Per-fine-step Wiener increment standard deviation.
    sigma_q: f64,
    /// OU decay per fine step.
    ou_rho: f64,
    /// OU innovation standard deviation per fine step.
    ou_sigma: f64,
    theta: f64,
    classical_phase: f64,
    ring: Vec<f64>,
    ring_pos: usize,
    draw_quantum: bool,
    draw_classical: bool,
}

impl PhaseEngine {
    fn new(laser: &LaserModel, grid: &Grid, sampler: &SamplerConfig, seed_value: u64) -> Self {
        let p = laser.power_mw;
        let d = grid.delay_steps;
        let draw_quantum = p > 0.0 && laser.quantum_strength > 0.0 && d > 0;
        let sigma_q = if draw_quantum {
            libm::sqrt(laser.quantum_strength / (p * d as f64))
        } else {
            0.0
        };
        let draw_classical = laser.classical_strength > 0.0;
        let tau_c = 100.0 * sampler.sample_period_s();
        let ou_rho = libm::exp(-grid.dt / tau_c);
        let ou_sigma = if draw_classical {
            libm::sqrt(laser.classical_strength * (1.0 - ou_rho * ou_rho))
        } else {
            0.0
        };
        let mut classical = GaussianSource::new(crate::rng::from_seed(seed::derive(
            seed_value,
            "sim.classical",
        )));
        let classical_phase = if draw_classical {
            libm::sqrt(laser.classical_strength) * classical.next()
        } else {
            0.0
        };
        PhaseEngine {
            quantum: GaussianSource::new(crate::rng::from_seed(seed::derive(
                seed_value,
                "sim.quantum",
            ))),
            classical,
            sigma_q,
            ou_rho,
            ou_sigma,
            theta: 0.0,
            classical_phase,
            ring: vec![0.0; d + 1],
            ring_pos: 0,
            draw_quantum,
            draw_classical,
        }
    }

    /// Pre-fill the delay line so the differential phase is defined from
    /// the first step of the main loop.
    fn fill_delay_line(&mut self) {
        for i in 1..self.ring.len() {
            if self.draw_quantum {
                self.theta += self.sigma_q * self.quantum.next();
            }
            self.ring[i] = self.theta;
        }
    }

    /// Advance one fine step; returns the sin argument
    /// `theta(t - Td) - theta(t) + theta_c(t)`.
    #[inline]
    fn step(&mut self) -> f64 {
        let delayed = self.ring[self.ring_pos];
        let arg = delayed - self.theta + self.classical_phase;
        if self.draw_quantum {
            self.theta += self.sigma_q * self.quantum.next();
        }
        self.ring[self.ring_pos] = self.theta;
        self.ring_pos += 1;
        if self.ring_pos == self.ring.len() {
            self.ring_pos = 0;
        }
        if self.draw_classical {
            self.classical_phase =
                self.ou_rho * self.classical_phase + self.ou_sigma * self.classical.next();
        }
        arg
    }
}

fn validate_all(
    laser: &LaserModel,
    chain: &OpticalChain,
    sampler: &SamplerConfig,
    n_samples: usize,
) -> Result<()> {
    laser.validate()?;
    chain.validate()?;
    sampler.validate()?;
    if n_samples == 0 {
        return Err(Error::InvalidModel(alloc::string::String::from(
            "n_samples must be > 0",
        )));
    }
    Ok(())
}

/// Simulate the self-heterodyne voltage output.
///
/// The timing budget is deliberately *not* enforced here; callers may
/// simulate mismatched configurations on purpose.
pub fn simulate_voltage(
    laser: &LaserModel,
    chain: &OpticalChain,
    sampler: &SamplerConfig,
    n_samples: usize,
    seed_value: u64,
) -> Result<SampleBlock> {
    validate_all(laser, chain, sampler, n_samples)?;
    let grid = build_grid(chain, sampler)?;

    let mut engine = PhaseEngine::new(laser, &grid, sampler, seed_value);
    engine.fill_delay_line();

    let tau_pd = response_time(chain) / RISE_LN9;
    let lp_alpha = 1.0 - libm::exp(-grid.dt / tau_pd);
    let noise_std = libm::sqrt(chain.pd_background_var);
    let draw_detector = chain.pd_background_var > 0.0;
    let mut detector = GaussianSource::new(crate::rng::from_seed(seed::derive(
        seed_value,
        "sim.detector",
    )));

    let level = chain.gain * laser.power_mw;
    let mut filtered = 0.0;
    let mut samples = Vec::with_capacity(n_samples);
    let total = grid.warmup + n_samples * grid.oversample;
    for k in 0..total {
        let arg = engine.step();
        let v = level * libm::sin(arg);
        filtered += lp_alpha * (v - filtered);
        if k >= grid.warmup && (k - grid.warmup) % grid.oversample == grid.oversample - 1 {
            let noise = if draw_detector {
                noise_std * detector.next()
            } else {
                0.0
            };
            samples.push(filtered + noise);
        }
    }
    SampleBlock::new(
        samples,
        sampler.sample_period_s(),
        BlockOrigin {
            seed: seed_value,
            model_hash: model_hash(laser, chain, sampler),
        },
    )
}

/// Differential-phase tap: the sin argument at each sample instant,
/// before the nonlinearity and the photodiode filter.
pub fn phase_differences(
    laser: &LaserModel,
    chain: &OpticalChain,
    sampler: &SamplerConfig,
    n_samples: usize,
    seed_value: u64,
) -> Result<Vec<f64>> {
    validate_all(laser, chain, sampler, n_samples)?;
    let grid = build_grid(chain, sampler)?;
    let mut engine = PhaseEngine::new(laser, &grid, sampler, seed_value);
    engine.fill_delay_line();
    let mut out = Vec::with_capacity(n_samples);
    let total = grid.warmup + n_samples * grid.oversample;
    for k in 0..total {
        let arg = engine.step();
        if k >= grid.warmup && (k - grid.warmup) % grid.oversample == grid.oversample - 1 {
            out.push(arg);
        }
    }
    Ok(out)
}

/// Direct-detection signal with the interferometer bypassed: constant
/// level plus relative-intensity fluctuation plus detector background.
///
/// The fluctuation is white with relative standard deviation
/// `RIN_FRACTION * sqrt(Q / P)`, i.e. a tenth of the quantum phase-noise
/// voltage contribution at the same power. It is synthesized directly at
/// the output rate (its spectrum is flat well past Nyquist).
pub fn simulate_intensity_noise(
    laser: &LaserModel,
    chain: &OpticalChain,
    sampler: &SamplerConfig,
    n_samples: usize,
    seed_value: u64,
) -> Result<SampleBlock> {
    validate_all(laser, chain, sampler, n_samples)?;
    let p = laser.power_mw;
    let level = chain.gain * p;
    let rel_sigma = if p > 0.0 && laser.quantum_strength > 0.0 {
        RIN_FRACTION * libm::sqrt(laser.quantum_strength / p)
    } else {
        0.0
    };
    let mut rin = GaussianSource::new(crate::rng::from_seed(seed::derive(seed_value, "in.rin")));
    let mut detector = GaussianSource::new(crate::rng::from_seed(seed::derive(
        seed_value,
        "in.detector",
    )));
    let noise_std = libm::sqrt(chain.pd_background_var);
    let draw_detector = chain.pd_background_var > 0.0;
    let samples = (0..n_samples)
        .map(|_| {
            let fluct = if rel_sigma > 0.0 {
                level * rel_sigma * rin.next()
            } else {
                0.0
            };
            let noise = if draw_detector {
                noise_std * detector.next()
            } else {
                0.0
            };
            level + fluct + noise
        })
        .collect();
    SampleBlock::new(
        samples,
        sampler.sample_period_s(),
        BlockOrigin {
            seed: seed_value,
            model_hash: model_hash(laser, chain, sampler),
        },
    )
}

/// Reference models matching the fitted variance composites, for tests and
/// calibrated pipeline runs.
pub mod presets {
    use super::*;
    use crate::variance::REFERENCE_FIT;

    /// QSCNR-optimal operating power (mW) of the reference fit.
    pub const OPTIMUM_POWER_MW: f64 = 0.17237;

    pub fn reference_laser(power_mw: f64) -> LaserModel {
        LaserModel {
            linewidth_hz: 5.23e9,
            center_wavelength_m: 1551.1970e-9,
            spectral_width_m: 0.0421e-9,
            power_mw,
            quantum_strength: REFERENCE_FIT.aq,
            classical_strength: REFERENCE_FIT.ac,
        }
    }

    pub fn reference_chain() -> OpticalChain {
        OpticalChain {
            delay_length_m: 0.48,
            group_index: 1.468,
            pd_bandwidth_hz: 5.0e9,
            pd_background_var: REFERENCE_FIT.f,
            gain: 1.0,
        }
    }

    pub fn reference_sampler() -> SamplerConfig {
        SamplerConfig {
            sample_rate_sps: 250e6,
            adc_bits: 8,
            sim_oversample: 16,
        }
    }

    /// Closed-form variance of the reference model at a power.
    pub fn expected_variance(power_mw: f64) -> f64 {
        REFERENCE_FIT.ac * power_mw * power_mw + REFERENCE_FIT.aq * power_mw + REFERENCE_FIT.f
    }
}
