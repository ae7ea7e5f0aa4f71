//! Full pipeline orchestration: simulate → digitize → entropy → extract →
//! test, with a complete run manifest.
//!
//! The global seed fans out into per-stage seeds via the documented
//! derivation, so each stage is reproducible in isolation; two runs with
//! equal configs and seeds produce byte-identical artifacts (the manifest
//! carries no timestamps).

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use pqn_core::digitize::{self, ByteBlock, SourceMeta};
use pqn_core::entropy::{self, EntropyReport};
use pqn_core::extractor::{security_epsilon_log2, StreamStats, ToeplitzSeed};
use pqn_core::randtests::{self, BatteryConfig, BatteryEntry, BatterySummary};
use pqn_core::seed as seeding;
use pqn_core::sim::{self, SampleBlock};
use pqn_core::timing;

use crate::config::PipelineConfig;
use crate::formats;
use crate::report;
use crate::stream;

pub const STAGE_SIMULATE: &str = "stage.simulate";
pub const STAGE_EXTRACTOR: &str = "stage.extractor";

/// Everything a pipeline run produced, for printing and testing.
pub struct PipelineOutcome {
    pub out_dir: PathBuf,
    pub timing_report: String,
    pub budget_check: timing::BudgetCheck,
    pub entropy: EntropyReport,
    pub recommended_ratio: f64,
    pub eta: f64,
    pub raw_entries: Vec<BatteryEntry>,
    pub raw_summary: BatterySummary,
    pub extracted_entries: Vec<BatteryEntry>,
    pub extracted_summary: BatterySummary,
    pub stats: StreamStats,
    pub raw_bps: f64,
    pub post_bps: f64,
}

/// Split a voltage block into chunks, snap each to the vertical grid, and
/// normalize each chunk independently; returns the concatenated symbols
/// and per-chunk extrema.
pub fn digitize_chunked(
    block: &SampleBlock,
    adc_bits: u8,
    vertical_resolution_mv: f64,
    chunk_samples: usize,
) -> Result<(ByteBlock, Vec<(f64, f64)>)> {
    let chunk_samples = chunk_samples.max(2);
    let mut symbols = Vec::with_capacity(block.samples.len());
    let mut extrema = Vec::new();
    let mut global = (f64::INFINITY, f64::NEG_INFINITY);
    let mut start = 0;
    while start < block.samples.len() {
        let end = (start + chunk_samples).min(block.samples.len());
        let chunk = SampleBlock::new(
            block.samples[start..end].to_vec(),
            block.sample_period_s,
            block.origin,
        )
        .map_err(|e| anyhow::anyhow!("digitize chunk: {e}"))?;
        let gridded = digitize::quantize_vertical(&chunk, vertical_resolution_mv)
            .map_err(|e| anyhow::anyhow!("digitize grid: {e}"))?;
        let normalized = digitize::normalize(&gridded, adc_bits)
            .map_err(|e| anyhow::anyhow!("digitize normalize: {e}"))?;
        extrema.push((normalized.meta.delta_min, normalized.meta.delta_max));
        global.0 = global.0.min(normalized.meta.delta_min);
        global.1 = global.1.max(normalized.meta.delta_max);
        symbols.extend_from_slice(&normalized.symbols);
        start = end;
    }
    let meta = SourceMeta {
        seed: block.origin.seed,
        model_hash: block.origin.model_hash,
        delta_min: global.0,
        delta_max: global.1,
    };
    let block =
        ByteBlock::new(symbols, adc_bits, meta).map_err(|e| anyhow::anyhow!("digitize: {e}"))?;
    Ok((block, extrema))
}

/// Run the whole pipeline into `out_dir`.
pub fn run(cfg: &PipelineConfig, out_dir: &Path, force: bool) -> Result<PipelineOutcome> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;

    // timing gate
    let budget = sim::timing_budget(&cfg.laser, &cfg.chain, &cfg.sampler, cfg.dominance_factor)
        .map_err(|e| anyhow::anyhow!("timing: {e}"))?;
    let check = timing::check_budget(&budget);
    let timing_text = report::timing_report(&budget, &check);
    if !check.sample_decorrelated && !force {
        bail!(
            "timing: sampling period minus delay does not clear the photodiode \
             response time (Ts - Td <= Tr); lower the sample rate below {} S/s \
             or pass --force\n{}",
            timing::max_sample_rate(&budget),
            timing_text
        );
    }

    // simulate
    let sim_seed = seeding::derive(cfg.seed, STAGE_SIMULATE);
    let voltage = sim::simulate_voltage(
        &cfg.laser,
        &cfg.chain,
        &cfg.sampler,
        cfg.pipeline_samples,
        sim_seed,
    )
    .map_err(|e| anyhow::anyhow!("simulate: {e}"))?;
    let voltage_path = out_dir.join("voltage.pqns");
    formats::write_pqns(&voltage_path, &voltage)?;

    // digitize
    let (raw_block, extrema) = digitize_chunked(
        &voltage,
        cfg.sampler.adc_bits,
        cfg.vertical_resolution_mv,
        cfg.chunk_samples,
    )?;
    let raw_path = out_dir.join("raw.pqnb");
    formats::write_pqnb(&raw_path, &raw_block)?;
    let hist = digitize::histogram(&raw_block).map_err(|e| anyhow::anyhow!("digitize: {e}"))?;
    let hist_path = out_dir.join("histogram.csv");
    formats::write_histogram_csv(&hist_path, &hist)?;
    let empty_fraction = digitize::empty_bin_fraction(&hist);
    let extrema_path = out_dir.join("extrema.csv");
    {
        let mut text = String::from("chunk,delta_min,delta_max\n");
        for (i, (lo, hi)) in extrema.iter().enumerate() {
            text.push_str(&format!("{i},{lo},{hi}\n"));
        }
        fs::write(&extrema_path, text)?;
    }

    // entropy
    let entropy_report = entropy::min_entropy_with_support(&raw_block, cfg.entropy_min_support)
        .map_err(|e| anyhow::anyhow!("entropy: {e}"))?;
    let recommended = entropy::recommend_ratio(&entropy_report, cfg.entropy_safety_margin)
        .map_err(|e| anyhow::anyhow!("entropy: {e}"))?;
    let eta = match cfg.extractor_ratio {
        Some(r) => {
            if r > entropy_report.ratio_bound {
                bail!(
                    "entropy: configured extraction ratio {r} exceeds the \
                     min-entropy bound {}",
                    entropy_report.ratio_bound
                );
            }
            r
        }
        None => recommended,
    };
    let entropy_path = out_dir.join("entropy.txt");
    fs::write(
        &entropy_path,
        report::entropy_report(&entropy_report, Some(recommended)),
    )?;

    // extract
    let n_in = cfg.extractor_block_bits;
    let m_out = ((n_in as f64) * eta).round() as usize;
    if m_out == 0 || m_out > n_in {
        bail!("extract: ratio {eta} gives invalid output width {m_out} for n = {n_in}");
    }
    let ext_seed_value = seeding::derive(cfg.seed, STAGE_EXTRACTOR);
    let toeplitz = ToeplitzSeed::from_rng(n_in, m_out, ext_seed_value)
        .map_err(|e| anyhow::anyhow!("extract: {e}"))?;
    let seed_path = out_dir.join("seed.pqts");
    formats::write_pqts(&seed_path, &toeplitz)?;
    let raw_bits = raw_block.to_bits();
    let workers = stream::worker_count(None);
    let (extracted, stats) = stream::extract_parallel(&toeplitz, &raw_bits, workers)?;
    let extracted_path = out_dir.join("extracted.bin");
    formats::write_raw_bits(&extracted_path, &extracted)?;
    let eps_log2 = security_epsilon_log2(
        n_in,
        m_out,
        entropy_report.min_entropy_bits_per_symbol,
        cfg.sampler.adc_bits,
    );
    let seed_hash = formats::sha256_file(&seed_path)?;
    let extract_report_path = out_dir.join("extracted.report.txt");
    fs::write(
        &extract_report_path,
        report::extract_report(
            n_in,
            m_out,
            &stats,
            extracted.len(),
            Some(eps_log2),
            &seed_hash,
        ),
    )?;

    // battery on raw and extracted streams
    let battery_cfg = BatteryConfig {
        alpha: cfg.test_alpha,
        min_bits: cfg.test_min_bits,
        ..BatteryConfig::default()
    };
    let raw_entries = randtests::run_battery_with(&raw_bits, &battery_cfg);
    let raw_summary =
        randtests::battery_summary(&raw_entries).map_err(|e| anyhow::anyhow!("test: {e}"))?;
    let extracted_entries = randtests::run_battery_with(&extracted, &battery_cfg);
    let extracted_summary =
        randtests::battery_summary(&extracted_entries).map_err(|e| anyhow::anyhow!("test: {e}"))?;
    let battery_raw_path = out_dir.join("battery_raw.txt");
    fs::write(
        &battery_raw_path,
        report::battery_report(&raw_entries, &raw_summary),
    )?;
    let battery_extracted_path = out_dir.join("battery_extracted.txt");
    fs::write(
        &battery_extracted_path,
        report::battery_report(&extracted_entries, &extracted_summary),
    )?;

    // rate budget
    let raw_bps = digitize::raw_rate(&cfg.sampler);
    let budget_rates =
        digitize::RateBudget::new(raw_bps, eta).map_err(|e| anyhow::anyhow!("rates: {e}"))?;

    // manifest
    let mut m = String::new();
    m.push_str("pqn pipeline manifest\n");
    m.push_str("schema = 1\n");
    m.push_str(&format!("global_seed = {}\n", cfg.seed));
    m.push_str(&format!("stage_seed.simulate = {sim_seed}\n"));
    m.push_str(&format!("stage_seed.extractor = {ext_seed_value}\n"));
    m.push_str(&format!(
        "model_hash = {}\n",
        sim::model_hash(&cfg.laser, &cfg.chain, &cfg.sampler)
    ));
    m.push_str("\n[timing]\n");
    m.push_str(&timing_text);
    m.push_str("\n[rates]\n");
    m.push_str(&format!("raw_bps = {}\n", budget_rates.raw_bps));
    m.push_str(&format!(
        "extraction_ratio = {}\n",
        budget_rates.extraction_ratio
    ));
    m.push_str(&format!("post_bps = {}\n", budget_rates.post_bps));
    m.push_str("\n[digitize]\n");
    m.push_str(&format!("samples = {}\n", cfg.pipeline_samples));
    m.push_str(&format!(
        "vertical_resolution_mv = {}\n",
        cfg.vertical_resolution_mv
    ));
    m.push_str(&format!("chunks = {}\n", extrema.len()));
    m.push_str(&format!("empty_bin_fraction = {empty_fraction}\n"));
    m.push_str("\n[entropy]\n");
    m.push_str(&report::entropy_report(&entropy_report, Some(recommended)));
    m.push_str("\n[extractor]\n");
    m.push_str(&report::extract_report(
        n_in,
        m_out,
        &stats,
        extracted.len(),
        Some(eps_log2),
        &seed_hash,
    ));
    m.push_str("\n[battery.raw]\n");
    m.push_str(&report::battery_report(&raw_entries, &raw_summary));
    m.push_str("\n[battery.extracted]\n");
    m.push_str(&report::battery_report(
        &extracted_entries,
        &extracted_summary,
    ));
    m.push_str("\n[files]\n");
    for (name, path) in [
        ("voltage.pqns", &voltage_path),
        ("raw.pqnb", &raw_path),
        ("histogram.csv", &hist_path),
        ("extrema.csv", &extrema_path),
        ("entropy.txt", &entropy_path),
        ("seed.pqts", &seed_path),
        ("extracted.bin", &extracted_path),
        ("extracted.report.txt", &extract_report_path),
        ("battery_raw.txt", &battery_raw_path),
        ("battery_extracted.txt", &battery_extracted_path),
    ] {
        m.push_str(&format!(
            "{name} = sha256:{}\n",
            formats::sha256_file(path)?
        ));
    }
    fs::write(out_dir.join("manifest.txt"), m)?;

    Ok(PipelineOutcome {
        out_dir: out_dir.to_path_buf(),
        timing_report: timing_text,
        budget_check: check,
        entropy: entropy_report,
        recommended_ratio: recommended,
        eta,
        raw_entries,
        raw_summary,
        extracted_entries,
        extracted_summary,
        stats,
        raw_bps: budget_rates.raw_bps,
        post_bps: budget_rates.post_bps,
    })
}
