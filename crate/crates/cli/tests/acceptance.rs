//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its measured numbers (visible with `--nocapture`).
//!
//! Heavy criteria serialize on a global lock so timing-sensitive
//! measurements never share the machine with other tests.

use std::sync::{Mutex, PoisonError};
use std::time::Instant;

use pqn_cli::{config, pipeline, stream};
use pqn_core::bits::BitBlock;
use pqn_core::digitize::{post_rate, raw_rate, RateBudget};
use pqn_core::extractor::{ToeplitzExtractor, ToeplitzSeed};
use pqn_core::randtests::{run_battery_with, BatteryConfig, BatteryEntry};
use pqn_core::rng::{self, RngCore};
use pqn_core::sim::{self, presets};
use pqn_core::timing::{check_budget, TimingBudget};
use pqn_core::variance::{fit_variance, optimize_qscnr, VariancePoint, REFERENCE_FIT};

static LOCK: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    LOCK.lock().unwrap_or_else(PoisonError::into_inner)
}

fn reference_pipeline_config(seed: u64) -> config::PipelineConfig {
    config::PipelineConfig {
        seed,
        laser: presets::reference_laser(presets::OPTIMUM_POWER_MW),
        chain: presets::reference_chain(),
        sampler: presets::reference_sampler(),
        dominance_factor: 10.0,
        vertical_resolution_mv: 5.4e-5,
        chunk_samples: 1 << 20,
        entropy_safety_margin: 0.03,
        entropy_min_support: 100,
        extractor_block_bits: 4096,
        extractor_ratio: Some(0.5),
        test_alpha: 0.01,
        test_min_bits: 1_000_000,
        pipeline_samples: 1_500_000,
    }
}

#[test]
fn criterion_01_qscnr_optimum() {
    let curve = optimize_qscnr(&REFERENCE_FIT).unwrap();
    let p_err = (curve.optimum_power_mw - 0.17237).abs() / 0.17237;
    let q_err = (curve.optimum_qscnr - 1.29).abs() / 1.29;
    assert!(
        p_err < 0.005,
        "P* = {} mW ({p_err:.4} rel)",
        curve.optimum_power_mw
    );
    assert!(
        q_err < 0.01,
        "peak = {} ({q_err:.4} rel)",
        curve.optimum_qscnr
    );
    println!(
        "ACCEPTANCE 1 (qscnr optimum): PASS — P* = {} mW (rel err {p_err:.2e}), peak = {} (rel err {q_err:.2e})",
        curve.optimum_power_mw, curve.optimum_qscnr
    );
}

#[test]
fn criterion_02_timing_table() {
    let reference = TimingBudget::new(0.19e-9, 2.35e-9, 0.07e-9, 4.00e-9).unwrap();
    let c = check_budget(&reference);
    assert!(c.phase_decorrelated && c.sample_decorrelated, "{c:?}");

    // raising the sampling rate so Ts = 2.40 ns flips only the sample predicate
    let tight = TimingBudget::new(0.19e-9, 2.35e-9, 0.07e-9, 2.40e-9).unwrap();
    let c_tight = check_budget(&tight);
    assert!(
        c_tight.phase_decorrelated && !c_tight.sample_decorrelated,
        "{c_tight:?}"
    );

    // slowing the laser to Tc = 0.235 ns flips only the phase predicate
    let slow = TimingBudget::new(0.235e-9, 2.35e-9, 0.07e-9, 4.00e-9).unwrap();
    let c_slow = check_budget(&slow);
    assert!(
        !c_slow.phase_decorrelated && c_slow.sample_decorrelated,
        "{c_slow:?}"
    );

    println!(
        "ACCEPTANCE 2 (timing table): PASS — reference (true, true); Ts=2.40 ns -> (true, false); Tc=0.235 ns -> (false, true)"
    );
}

#[test]
fn criterion_03_rate_budget() {
    let sampler = presets::reference_sampler();
    let raw = raw_rate(&sampler);
    assert_eq!(raw, 2.0e9);
    let budget = RateBudget::new(raw, 0.5).unwrap();
    assert_eq!(post_rate(&budget), 1.0e9);
    println!(
        "ACCEPTANCE 3 (rate budget): PASS — raw = {raw} bps, post = {} bps, exact",
        budget.post_bps
    );
}

#[test]
fn criterion_04_linewidth_consistency() {
    let dnu = sim::linewidth_from_spectrum(0.0421e-9, 1551.1970e-9).unwrap();
    let dnu_err = (dnu - 5.23e9).abs() / 5.23e9;
    assert!(dnu_err < 0.01, "linewidth {dnu} Hz ({dnu_err:.4} rel)");

    let laser = presets::reference_laser(0.17237);
    let tc = sim::coherence_time(&laser).unwrap();
    let tc_err = (tc - 0.19e-9).abs() / 0.19e-9;
    assert!(tc_err < 0.02, "coherence {tc} s ({tc_err:.4} rel)");
    println!(
        "ACCEPTANCE 4 (linewidth consistency): PASS — {dnu:.4e} Hz (rel err {dnu_err:.2e}), Tc = {tc:.4e} s (rel err {tc_err:.2e})"
    );
}

#[test]
fn criterion_05_variance_law_monte_carlo() {
    let _guard = serial();
    let chain = presets::reference_chain();
    let sampler = presets::reference_sampler();
    let mut details = String::new();
    for (i, &p) in [0.05, 0.1, 0.5, 1.0, 2.0].iter().enumerate() {
        let block = sim::simulate_voltage(
            &presets::reference_laser(p),
            &chain,
            &sampler,
            1_000_000,
            4100 + i as u64,
        )
        .unwrap();
        let measured = block.variance();
        let expected = presets::expected_variance(p);
        let rel = (measured - expected).abs() / expected;
        assert!(
            rel < 0.03,
            "P = {p} mW: measured {measured}, closed form {expected} ({rel:.4} rel)"
        );
        details.push_str(&format!("P={p}: {rel:.3}; "));
    }
    println!("ACCEPTANCE 5 (variance-law Monte-Carlo): PASS — rel errors {details}");
}

#[test]
fn criterion_06_fit_round_trip() {
    let _guard = serial();
    let grid = pqn_core::variance::power_grid(0.005, 2.0, 39);
    let clean: Vec<VariancePoint> = grid
        .iter()
        .map(|&p| VariancePoint {
            power_mw: p,
            variance_mv2: REFERENCE_FIT.ac * p * p + REFERENCE_FIT.aq * p + REFERENCE_FIT.f,
            n_samples: 1_000_000,
        })
        .collect();
    let fit = fit_variance(&clean).unwrap();
    for (name, got, want) in [
        ("ac", fit.ac, REFERENCE_FIT.ac),
        ("aq", fit.aq, REFERENCE_FIT.aq),
        ("f", fit.f, REFERENCE_FIT.f),
    ] {
        let rel = (got - want).abs() / want;
        assert!(rel < 0.001, "noiseless {name}: {got} vs {want} ({rel:.2e})");
    }

    let mut gauss = rng::GaussianSource::new(rng::from_seed(0x0F17));
    let mut errs = vec![Vec::new(), Vec::new(), Vec::new()];
    for _ in 0..20 {
        let noisy: Vec<VariancePoint> = clean
            .iter()
            .map(|p| VariancePoint {
                variance_mv2: p.variance_mv2 * (1.0 + 0.01 * gauss.next()),
                ..*p
            })
            .collect();
        let f = fit_variance(&noisy).unwrap();
        errs[0].push((f.ac - REFERENCE_FIT.ac).abs() / REFERENCE_FIT.ac);
        errs[1].push((f.aq - REFERENCE_FIT.aq).abs() / REFERENCE_FIT.aq);
        errs[2].push((f.f - REFERENCE_FIT.f).abs() / REFERENCE_FIT.f);
    }
    let mut medians = Vec::new();
    for (name, e) in ["ac", "aq", "f"].iter().zip(&mut errs) {
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = e[e.len() / 2];
        assert!(median < 0.05, "noisy {name} median rel err {median:.4}");
        medians.push(format!("{name}={median:.4}"));
    }
    println!(
        "ACCEPTANCE 6 (fit round trip): PASS — noiseless < 0.1%; noisy medians {}",
        medians.join(", ")
    );
}

/// Direct bit-by-bit GF(2) Toeplitz matrix-vector product, written from
/// the matrix definition; the engine must match it bit-exactly.
fn naive_extract(seed_bits: &[u8], n: usize, m: usize, input: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; m];
    for (r, slot) in out.iter_mut().enumerate() {
        let mut parity = 0u8;
        for (c, &x) in input.iter().enumerate() {
            // T[r][c] = seed_bit(r - c + n - 1)
            parity ^= seed_bits[r + n - 1 - c] & x;
        }
        *slot = parity;
    }
    out
}

#[test]
fn criterion_07_extractor_oracle() {
    let _guard = serial();
    let mut rng = rng::from_seed(0x70E9);
    for &n in &[64usize, 512, 4096] {
        let m = n / 2;
        let seed = ToeplitzSeed::from_rng(n, m, rng.next_u64()).unwrap();
        let engine = ToeplitzExtractor::new(&seed);
        let seed_bits = seed.bits().to_unpacked();
        for case in 0..1000 {
            let mut bytes = vec![0u8; n / 8];
            rng.fill_bytes(&mut bytes);
            let input = BitBlock::from_bytes(bytes);
            let fast = engine.extract_block(&input).unwrap();
            let slow = naive_extract(&seed_bits, n, m, &input.to_unpacked());
            assert_eq!(fast.to_unpacked(), slow, "n = {n}, case {case}");
        }
    }

    // GF(2) linearity on 1000 random pairs
    let seed = ToeplitzSeed::from_rng(4096, 2048, 0x11AA).unwrap();
    let engine = ToeplitzExtractor::new(&seed);
    for case in 0..1000 {
        let mut a = vec![0u8; 512];
        let mut b = vec![0u8; 512];
        rng.fill_bytes(&mut a);
        rng.fill_bytes(&mut b);
        let xor: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let ea = engine.extract_block(&BitBlock::from_bytes(a)).unwrap();
        let eb = engine.extract_block(&BitBlock::from_bytes(b)).unwrap();
        let exy = engine.extract_block(&BitBlock::from_bytes(xor)).unwrap();
        let manual: Vec<u8> = ea
            .as_bytes()
            .iter()
            .zip(eb.as_bytes())
            .map(|(x, y)| x ^ y)
            .collect();
        assert_eq!(exy.as_bytes(), &manual[..], "linearity case {case}");
    }
    println!(
        "ACCEPTANCE 7 (extractor oracle): PASS — 1000 cases bit-exact at n = 64, 512, 4096; 1000 linearity pairs"
    );
}

#[test]
fn criterion_08_battery_calibration() {
    let _guard = serial();
    let streams = 100usize;
    let bits_per_stream = 1_000_000usize;
    let cfg = BatteryConfig::default();
    let mut rejections: std::collections::BTreeMap<String, usize> = Default::default();
    let mut monobit_ps = Vec::with_capacity(streams);
    for i in 0..streams {
        let mut bytes = vec![0u8; bits_per_stream / 8];
        rng::from_seed(pqn_core::seed::derive(0xCA11B, "calibration") + i as u64)
            .fill_bytes(&mut bytes);
        let bits = BitBlock::from_bytes(bytes);
        for entry in run_battery_with(&bits, &cfg) {
            if let BatteryEntry::Completed(r) = entry {
                if !r.passed {
                    *rejections.entry(r.test_name.clone()).or_default() += 1;
                }
                if r.test_name == "monobit" {
                    monobit_ps.push(r.p_value);
                }
            } else {
                panic!("unexpected skip in calibration: {entry:?}");
            }
        }
    }
    // per-test rejection rate at alpha = 0.01 within [0, 0.04]
    let mut worst = 0usize;
    for (name, count) in &rejections {
        assert!(*count <= 4, "{name} rejected {count}/100 streams");
        worst = worst.max(*count);
    }
    // monobit p-values uniform: KS distance < 0.20
    monobit_ps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = monobit_ps.len() as f64;
    let mut ks = 0.0f64;
    for (i, p) in monobit_ps.iter().enumerate() {
        let hi = ((i + 1) as f64 / n - p).abs();
        let lo = (p - i as f64 / n).abs();
        ks = ks.max(hi).max(lo);
    }
    assert!(ks < 0.20, "monobit KS distance {ks:.3}");
    println!(
        "ACCEPTANCE 8 (battery calibration): PASS — worst rejection {worst}/100, monobit KS = {ks:.3}"
    );
}

#[test]
fn criterion_09_end_to_end_shape() {
    let _guard = serial();
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference_pipeline_config(20260809);
    assert!(cfg.pipeline_samples * usize::from(cfg.sampler.adc_bits) >= 10_000_000);
    let outcome = pipeline::run(&cfg, dir.path(), false).unwrap();

    // (a) the raw stream fails at least one battery test
    assert!(
        outcome.raw_summary.fail_count >= 1,
        "raw stream passed everything: {:?}",
        outcome.raw_summary
    );
    // (b) measured min-entropy in the compatible band
    let h = outcome.entropy.min_entropy_bits_per_symbol;
    assert!((3.5..=5.0).contains(&h), "H_inf = {h}");
    // (c) the extracted stream passes the whole battery
    assert_eq!(
        outcome.extracted_summary.fail_count, 0,
        "extracted failures: {:?}",
        outcome.extracted_entries
    );
    assert!(outcome.extracted_summary.pass_count > 0);
    assert_eq!(outcome.extracted_summary.skip_count, 0);
    println!(
        "ACCEPTANCE 9 (end-to-end shape): PASS — raw fails {}/{} tests, H_inf = {h:.3}/8, extracted passes {}/{} (min p = {:.4})",
        outcome.raw_summary.fail_count,
        outcome.raw_summary.fail_count + outcome.raw_summary.pass_count,
        outcome.extracted_summary.pass_count,
        outcome.extracted_summary.pass_count,
        outcome.extracted_summary.min_p
    );
}

#[test]
fn criterion_10_throughput() {
    let _guard = serial();
    let seed = ToeplitzSeed::from_rng(4096, 2048, 0xBEE5).unwrap();
    let mbits = 256usize;
    let mut bytes = vec![0u8; mbits << 17];
    rng::from_seed(0x10AD).fill_bytes(&mut bytes);
    let input = BitBlock::from_bytes(bytes);

    // warmup pass builds tables and faults pages in
    let _ = stream::extract_parallel(&seed, &input, 1).unwrap();

    let run = |workers: usize| {
        let t = Instant::now();
        let out = stream::extract_parallel(&seed, &input, workers).unwrap();
        let dt = t.elapsed().as_secs_f64();
        (out, input.len() as f64 / dt / 1e6)
    };
    let ((seq_out, _), single_mbps) = run(1);
    let ((par_out, par_stats), aggregate_mbps) = run(4);

    assert!(
        single_mbps >= 250.0,
        "single-worker input rate {single_mbps:.1} Mbps"
    );
    // aggregate target with 4 workers: 2.5x the single-worker floor
    assert!(
        aggregate_mbps >= 2.5 * 250.0,
        "4-worker aggregate {aggregate_mbps:.1} Mbps < 625 Mbps"
    );
    assert_eq!(seq_out, par_out, "parallel output differs from sequential");
    assert_eq!(par_stats.whole_blocks, mbits * 1024 * 1024 / 4096);
    println!(
        "ACCEPTANCE 10 (throughput): PASS — single {single_mbps:.0} Mbps, 4-worker {aggregate_mbps:.0} Mbps (speedup x{:.2} on {} cpus), outputs bit-identical",
        aggregate_mbps / single_mbps,
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    );
}

#[test]
fn criterion_11_determinism() {
    let _guard = serial();
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let cfg = reference_pipeline_config(424242);
    pipeline::run(&cfg, dir_a.path(), false).unwrap();
    pipeline::run(&cfg, dir_b.path(), false).unwrap();

    let mut names: Vec<String> = std::fs::read_dir(dir_a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(names.len() >= 10, "unexpected artifact set: {names:?}");
    for name in &names {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
    println!(
        "ACCEPTANCE 11 (determinism): PASS — {} artifacts byte-identical across two runs",
        names.len()
    );
}
