//! `pqn` — phase-noise QRNG toolkit CLI.

use pqn_cli::{config, formats, pipeline, report, stream, units};

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use pqn_core::digitize;
use pqn_core::entropy;
use pqn_core::extractor::ToeplitzSeed;
use pqn_core::randtests::{self, BatteryConfig};
use pqn_core::sim;
use pqn_core::spectral;
use pqn_core::timing::{check_budget, TimingBudget};
use pqn_core::variance;

#[derive(Parser)]
#[command(
    name = "pqn",
    version,
    about = "Phase-noise QRNG software twin: simulation, analysis, and post-processing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the optical chain into a .pqns sample file.
    Simulate(SimulateArgs),
    /// Evaluate the four-timescale sampling-rate-matching predicates.
    Timing(TimingArgs),
    /// Fit the voltage-variance model and locate the QSCNR optimum.
    Qscnr(QscnrArgs),
    /// Welch power spectral density of a .pqns file.
    Psd(PsdArgs),
    /// Quantize and normalize a .pqns file into .pqnb symbols.
    Digitize(DigitizeArgs),
    /// Min-entropy estimate and extraction-ratio recommendation.
    Entropy(EntropyArgs),
    /// Toeplitz-extract a .pqnb file into raw output bits.
    Extract(ExtractArgs),
    /// Run the randomness test battery on a raw bit file.
    Test(TestArgs),
    /// Run the full pipeline from a config file.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Pipeline config file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output .pqns path.
    #[arg(long)]
    out: PathBuf,
    /// Sample count (defaults to the config's pipeline.samples).
    #[arg(long)]
    samples: Option<usize>,
    /// Override the config's global seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Proceed even if the sampling-rate-matching condition fails.
    #[arg(long)]
    force: bool,
    /// Simulate the interferometer-bypassed intensity-noise signal instead.
    #[arg(long)]
    intensity: bool,
}

#[derive(Args)]
struct TimingArgs {
    /// Coherence time, e.g. "0.19ns".
    #[arg(long)]
    tc: Option<String>,
    /// Interferometer delay, e.g. "2.35ns".
    #[arg(long)]
    td: Option<String>,
    /// Photodiode response time, e.g. "0.07ns".
    #[arg(long)]
    tr: Option<String>,
    /// Sampling period, e.g. "4ns".
    #[arg(long)]
    ts: Option<String>,
    /// Dominance threshold interpreting "much greater than".
    #[arg(long, default_value_t = 10.0)]
    k: f64,
    /// Derive the budget from a config file instead of explicit flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct QscnrArgs {
    /// CSV of measured points: power_mw,variance_mv2,n_samples.
    #[arg(long)]
    fit: PathBuf,
    /// Also evaluate the fitted QSCNR at this power (mW).
    #[arg(long)]
    power: Option<f64>,
    /// Write the report here as well as printing it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PsdArgs {
    /// Input .pqns file.
    #[arg(long)]
    input: PathBuf,
    /// FFT segment length (power of two).
    #[arg(long, default_value_t = 4096)]
    segment: usize,
    /// Segment overlap fraction in [0, 1).
    #[arg(long, default_value_t = 0.5)]
    overlap: f64,
    /// Output CSV freq_hz,psd_db.
    #[arg(long)]
    out: PathBuf,
    /// Also print the average power in a band, "LO:HI" in Hz.
    #[arg(long)]
    band: Option<String>,
}

#[derive(Args)]
struct DigitizeArgs {
    /// Input .pqns file.
    #[arg(long)]
    input: PathBuf,
    /// Output .pqnb file.
    #[arg(long)]
    out: PathBuf,
    /// Symbol resolution in bits.
    #[arg(long, default_value_t = 8)]
    bits: u8,
    /// Streaming re-normalization chunk, in samples.
    #[arg(long, default_value_t = 1 << 20)]
    chunk: usize,
    /// Acquisition vertical grid, e.g. "0.054 uV" (omit to disable).
    #[arg(long)]
    vertical_resolution: Option<String>,
    /// Also write a symbol histogram CSV here.
    #[arg(long)]
    histogram: Option<PathBuf>,
}

#[derive(Args)]
struct EntropyArgs {
    /// Input .pqnb file.
    #[arg(long)]
    input: PathBuf,
    /// Safety margin for the ratio recommendation.
    #[arg(long, default_value_t = 0.03)]
    margin: f64,
    /// Required symbols per possible value.
    #[arg(long, default_value_t = 100)]
    min_support: usize,
    /// Write the report here as well as printing it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExtractArgs {
    /// Input .pqnb file.
    #[arg(long)]
    input: PathBuf,
    /// Output raw-bit file (headerless bytes).
    #[arg(long)]
    out: PathBuf,
    /// Extractor input block size in bits.
    #[arg(long, default_value_t = 4096)]
    block_bits: usize,
    /// Extraction ratio m/n (defaults to 0.5).
    #[arg(long, default_value_t = 0.5)]
    ratio: f64,
    /// Seed the Toeplitz matrix from this RNG seed.
    #[arg(long, conflicts_with = "seed_file")]
    seed: Option<u64>,
    /// Load the Toeplitz seed from a .pqts file.
    #[arg(long)]
    seed_file: Option<PathBuf>,
    /// Save the session seed to a .pqts file.
    #[arg(long)]
    save_seed: Option<PathBuf>,
    /// Worker threads (default: PQN_WORKERS or machine parallelism).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct TestArgs {
    /// Raw bit file (headerless bytes).
    input: PathBuf,
    /// Significance level.
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// Battery-level floor on input bits.
    #[arg(long, default_value_t = 1_000_000)]
    min_bits: usize,
    /// Block length for the block-frequency test.
    #[arg(long, default_value_t = 128)]
    block_m: usize,
    /// Pattern length for the serial test.
    #[arg(long, default_value_t = 16)]
    serial_m: usize,
    /// Pattern length for approximate entropy.
    #[arg(long, default_value_t = 10)]
    apen_m: usize,
    /// Write the report here as well as printing it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    /// Pipeline config file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for all artifacts.
    #[arg(long)]
    out_dir: PathBuf,
    /// Override the config's global seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Proceed even if the sampling-rate-matching condition fails.
    #[arg(long)]
    force: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Timing(args) => cmd_timing(args),
        Command::Qscnr(args) => cmd_qscnr(args),
        Command::Psd(args) => cmd_psd(args),
        Command::Digitize(args) => cmd_digitize(args),
        Command::Entropy(args) => cmd_entropy(args),
        Command::Extract(args) => cmd_extract(args),
        Command::Test(args) => cmd_test(args),
        Command::Pipeline(args) => cmd_pipeline(args),
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode> {
    let mut cfg = config::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let n = args.samples.unwrap_or(cfg.pipeline_samples);

    let budget = sim::timing_budget(&cfg.laser, &cfg.chain, &cfg.sampler, cfg.dominance_factor)
        .map_err(|e| anyhow::anyhow!("timing: {e}"))?;
    let check = check_budget(&budget);
    print!("{}", report::timing_report(&budget, &check));
    if !check.sample_decorrelated {
        if !args.force {
            bail!(
                "sampling-rate matching violated (Ts - Td <= Tr); max admissible \
                 rate is {} S/s. Pass --force to simulate anyway.",
                pqn_core::timing::max_sample_rate(&budget)
            );
        }
        eprintln!("warning: proceeding with correlated samples (--force)");
    }
    if !check.phase_decorrelated {
        eprintln!("warning: interferometer delay does not dominate the coherence time");
    }

    let seed = pqn_core::seed::derive(cfg.seed, pipeline::STAGE_SIMULATE);
    let block = if args.intensity {
        sim::simulate_intensity_noise(&cfg.laser, &cfg.chain, &cfg.sampler, n, seed)
    } else {
        sim::simulate_voltage(&cfg.laser, &cfg.chain, &cfg.sampler, n, seed)
    }
    .map_err(|e| anyhow::anyhow!("simulate: {e}"))?;
    formats::write_pqns(&args.out, &block)?;
    println!(
        "wrote {} samples to {} (variance {} mV^2)",
        block.len(),
        args.out.display(),
        block.variance()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_timing(args: TimingArgs) -> Result<ExitCode> {
    let budget = if let Some(path) = &args.config {
        let cfg = config::load(path)?;
        sim::timing_budget(&cfg.laser, &cfg.chain, &cfg.sampler, args.k)
            .map_err(|e| anyhow::anyhow!("timing: {e}"))?
    } else {
        let (tc, td, tr, ts) = match (&args.tc, &args.td, &args.tr, &args.ts) {
            (Some(tc), Some(td), Some(tr), Some(ts)) => (tc, td, tr, ts),
            _ => bail!("timing needs either --config or all of --tc --td --tr --ts"),
        };
        TimingBudget::with_dominance(
            units::parse_time_s(tc).context("--tc")?,
            units::parse_time_s(td).context("--td")?,
            units::parse_time_s(tr).context("--tr")?,
            units::parse_time_s(ts).context("--ts")?,
            args.k,
        )
        .map_err(|e| anyhow::anyhow!("timing: {e}"))?
    };
    let check = check_budget(&budget);
    print!("{}", report::timing_report(&budget, &check));
    Ok(ExitCode::SUCCESS)
}

fn cmd_qscnr(args: QscnrArgs) -> Result<ExitCode> {
    let points = formats::read_points_csv(&args.fit)?;
    let fit = variance::fit_variance(&points).map_err(|e| anyhow::anyhow!("fit: {e}"))?;
    let curve = variance::optimize_qscnr(&fit).ok();
    let mut text = report::fit_report(&fit, curve.as_ref());
    if let Some(p) = args.power {
        let q = variance::qscnr(&fit, p).map_err(|e| anyhow::anyhow!("qscnr: {e}"))?;
        text.push_str(&format!("qscnr_at_{p}_mw = {q}\n"));
    }
    print!("{text}");
    if let Some(out) = &args.out {
        std::fs::write(out, &text)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_psd(args: PsdArgs) -> Result<ExitCode> {
    let block = formats::read_pqns(&args.input)?;
    let psd = spectral::estimate_psd(&block, args.segment, args.overlap)
        .map_err(|e| anyhow::anyhow!("psd: {e}"))?;
    formats::write_psd_csv(&args.out, &psd)?;
    println!(
        "wrote {} bins to {}",
        psd.freqs_hz.len(),
        args.out.display()
    );
    if let Some(band) = &args.band {
        let (lo, hi) = band
            .split_once(':')
            .ok_or_else(|| anyhow::anyhow!("--band expects LO:HI in Hz"))?;
        let lo: f64 = lo.trim().parse().context("--band low edge")?;
        let hi: f64 = hi.trim().parse().context("--band high edge")?;
        let avg =
            spectral::average_band_power(&psd, lo, hi).map_err(|e| anyhow::anyhow!("psd: {e}"))?;
        println!("band [{lo}, {hi}] Hz average = {avg} dB");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_digitize(args: DigitizeArgs) -> Result<ExitCode> {
    let block = formats::read_pqns(&args.input)?;
    let vres = args
        .vertical_resolution
        .as_deref()
        .map(units::parse_voltage_mv)
        .transpose()
        .context("--vertical-resolution")?
        .unwrap_or(0.0);
    let (bytes, extrema) = pipeline::digitize_chunked(&block, args.bits, vres, args.chunk)?;
    formats::write_pqnb(&args.out, &bytes)?;
    let extrema_path = args.out.with_extension("extrema.csv");
    let mut text = String::from("chunk,delta_min,delta_max\n");
    for (i, (lo, hi)) in extrema.iter().enumerate() {
        text.push_str(&format!("{i},{lo},{hi}\n"));
    }
    std::fs::write(&extrema_path, text)?;
    println!(
        "wrote {} symbols to {} ({} chunks; extrema in {})",
        bytes.len(),
        args.out.display(),
        extrema.len(),
        extrema_path.display()
    );
    if let Some(hist_path) = &args.histogram {
        let hist = digitize::histogram(&bytes).map_err(|e| anyhow::anyhow!("digitize: {e}"))?;
        formats::write_histogram_csv(hist_path, &hist)?;
        println!(
            "histogram in {} (empty-bin fraction {})",
            hist_path.display(),
            digitize::empty_bin_fraction(&hist)
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_entropy(args: EntropyArgs) -> Result<ExitCode> {
    let block = formats::read_pqnb(&args.input)?;
    let rep = entropy::min_entropy_with_support(&block, args.min_support)
        .map_err(|e| anyhow::anyhow!("entropy: {e}"))?;
    let recommended =
        entropy::recommend_ratio(&rep, args.margin).map_err(|e| anyhow::anyhow!("entropy: {e}"))?;
    let text = report::entropy_report(&rep, Some(recommended));
    print!("{text}");
    if let Some(out) = &args.out {
        std::fs::write(out, &text)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_extract(args: ExtractArgs) -> Result<ExitCode> {
    let block = formats::read_pqnb(&args.input)?;
    let n_in = args.block_bits;
    let m_out = ((n_in as f64) * args.ratio).round() as usize;
    if m_out == 0 || m_out > n_in {
        bail!(
            "ratio {} gives invalid output width {m_out} for n = {n_in}",
            args.ratio
        );
    }
    let seed = if let Some(path) = &args.seed_file {
        let s = formats::read_pqts(path)?;
        if s.n_in() != n_in || s.m_out() != m_out {
            bail!(
                "seed file geometry ({}, {}) does not match requested ({n_in}, {m_out})",
                s.n_in(),
                s.m_out()
            );
        }
        s
    } else {
        let rng_seed = args.seed.unwrap_or(0);
        ToeplitzSeed::from_rng(n_in, m_out, rng_seed)
            .map_err(|e| anyhow::anyhow!("extract: {e}"))?
    };
    if let Some(path) = &args.save_seed {
        formats::write_pqts(path, &seed)?;
    }
    let workers = stream::worker_count(args.workers);
    let bits = block.to_bits();
    let (out, stats) = stream::extract_parallel(&seed, &bits, workers)?;
    formats::write_raw_bits(&args.out, &out)?;
    let seed_hash = formats::sha256_bytes(seed.bits().as_bytes());
    let report_path = args.out.with_extension("report.txt");
    let text = report::extract_report(n_in, m_out, &stats, out.len(), None, &seed_hash);
    std::fs::write(&report_path, &text)?;
    println!(
        "extracted {} bits from {} input bits ({} blocks, {} workers); report in {}",
        out.len(),
        stats.input_bits_used,
        stats.whole_blocks,
        workers,
        report_path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_test(args: TestArgs) -> Result<ExitCode> {
    let bits = formats::read_raw_bits(&args.input)?;
    if args.serial_m < 2 || args.apen_m < 1 {
        bail!("pattern lengths must satisfy serial_m >= 2 and apen_m >= 1");
    }
    let cfg = BatteryConfig {
        alpha: args.alpha,
        min_bits: args.min_bits,
        block_m: args.block_m,
        serial_m: args.serial_m,
        apen_m: args.apen_m,
        ..BatteryConfig::default()
    };
    let entries = randtests::run_battery_with(&bits, &cfg);
    let summary = randtests::battery_summary(&entries).map_err(|e| anyhow::anyhow!("test: {e}"))?;
    let text = report::battery_report(&entries, &summary);
    print!("{text}");
    if let Some(out) = &args.out {
        std::fs::write(out, &text)?;
    }
    Ok(if summary.overall_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_pipeline(args: PipelineArgs) -> Result<ExitCode> {
    let mut cfg = config::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let outcome = pipeline::run(&cfg, &args.out_dir, args.force)?;
    print!("{}", outcome.timing_report);
    println!(
        "entropy: H_inf = {} bits/{}; recommended ratio {}; using {}",
        outcome.entropy.min_entropy_bits_per_symbol,
        outcome.entropy.symbol_bits,
        outcome.recommended_ratio,
        outcome.eta
    );
    println!(
        "rates: raw {} bps (budget), post {} bps (budget)",
        outcome.raw_bps, outcome.post_bps
    );
    println!(
        "battery: raw pass/fail/skip = {}/{}/{}; extracted pass/fail/skip = {}/{}/{}",
        outcome.raw_summary.pass_count,
        outcome.raw_summary.fail_count,
        outcome.raw_summary.skip_count,
        outcome.extracted_summary.pass_count,
        outcome.extracted_summary.fail_count,
        outcome.extracted_summary.skip_count
    );
    println!("artifacts in {}", outcome.out_dir.display());
    Ok(if outcome.extracted_summary.overall_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
