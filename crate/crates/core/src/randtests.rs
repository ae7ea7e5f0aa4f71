//! Statistical randomness test battery.
//!
//! A representative frequency/dependence battery with exact p-value
//! formulas: monobit, block frequency, runs, longest run of ones,
//! cumulative sums (both directions), serial (two p-values), approximate
//! entropy, and bit autocorrelation at fixed lags. All p-values come from
//! [`crate::special`]'s erfc / incomplete-gamma implementations.
//!
//! Undersized inputs produce explicit skip markers, never a silent pass.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::bits::BitBlock;
use crate::error::{Error, Result};
use crate::special::{erfc, gamma_q, normal_cdf};

const SQRT_2: f64 = core::f64::consts::SQRT_2;

/// Battery parameters; the defaults mirror the common suite conventions.
#[derive(Debug, Clone, PartialEq)]
pub struct BatteryConfig {
    /// Significance level.
    pub alpha: f64,
    /// Battery-level floor on input bits.
    pub min_bits: usize,
    /// Block length for the block-frequency test.
    pub block_m: usize,
    /// Pattern length for the serial test.
    pub serial_m: usize,
    /// Pattern length for approximate entropy.
    pub apen_m: usize,
    /// Autocorrelation lags, in bits.
    pub autocorr_lags: Vec<usize>,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self {
            alpha: 0.01,
            min_bits: 1_000_000,
            block_m: 128,
            serial_m: 16,
            apen_m: 10,
            autocorr_lags: vec![1, 2, 8, 16],
        }
    }
}

/// Outcome of one completed test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub test_name: String,
    pub statistic: f64,
    pub p_value: f64,
    /// `p_value >= alpha`
    pub passed: bool,
    pub n_bits: usize,
}

/// A battery slot: either a completed test or an explicit skip.
#[derive(Debug, Clone, PartialEq)]
pub enum BatteryEntry {
    Completed(TestResult),
    Skipped {
        test_name: String,
        required_bits: usize,
        available_bits: usize,
    },
}

impl BatteryEntry {
    pub fn name(&self) -> &str {
        match self {
            BatteryEntry::Completed(r) => &r.test_name,
            BatteryEntry::Skipped { test_name, .. } => test_name,
        }
    }

    pub fn as_completed(&self) -> Option<&TestResult> {
        match self {
            BatteryEntry::Completed(r) => Some(r),
            BatteryEntry::Skipped { .. } => None,
        }
    }
}

/// Aggregated battery verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatterySummary {
    pub pass_count: usize,
    pub fail_count: usize,
    pub skip_count: usize,
    /// Smallest p-value among completed tests (1.0 if none completed).
    pub min_p: f64,
    /// True iff nothing failed (skips are reported, not passed).
    pub overall_pass: bool,
}

/// Run the battery at significance `alpha` with default parameters.
pub fn run_battery(bits: &BitBlock, alpha: f64) -> Vec<BatteryEntry> {
    let cfg = BatteryConfig {
        alpha,
        ..BatteryConfig::default()
    };
    run_battery_with(bits, &cfg)
}

/// Run the battery with explicit parameters.
pub fn run_battery_with(bits: &BitBlock, cfg: &BatteryConfig) -> Vec<BatteryEntry> {
    let n = bits.len();
    let x = bits.to_unpacked();
    let mut out = Vec::new();

    let mut push = |name: &str, required: usize, run: &dyn Fn() -> (f64, f64)| {
        if n < cfg.min_bits.max(required) {
            out.push(BatteryEntry::Skipped {
                test_name: String::from(name),
                required_bits: cfg.min_bits.max(required),
                available_bits: n,
            });
            return;
        }
        let (statistic, p_value) = run();
        out.push(BatteryEntry::Completed(TestResult {
            test_name: String::from(name),
            statistic,
            p_value,
            passed: p_value >= cfg.alpha,
            n_bits: n,
        }));
    };

    push("monobit", 100, &|| monobit(&x));
    push("block_frequency", 20 * cfg.block_m, &|| {
        block_frequency(&x, cfg.block_m)
    });
    push("runs", 100, &|| runs(&x));
    push("longest_run", 128, &|| longest_run(&x));
    push("cusum_forward", 100, &|| cumulative_sums(&x, true));
    push("cusum_backward", 100, &|| cumulative_sums(&x, false));
    let serial_min = 1usize << (cfg.serial_m + 2);
    push("serial1", serial_min, &|| {
        let (d1, p1, _, _) = serial(&x, cfg.serial_m);
        (d1, p1)
    });
    push("serial2", serial_min, &|| {
        let (_, _, d2, p2) = serial(&x, cfg.serial_m);
        (d2, p2)
    });
    push("approximate_entropy", 1usize << (cfg.apen_m + 5), &|| {
        approximate_entropy(&x, cfg.apen_m)
    });
    for &lag in &cfg.autocorr_lags {
        let name = format!("autocorr_lag{lag}");
        if n < cfg.min_bits.max(lag + 1000) {
            out.push(BatteryEntry::Skipped {
                test_name: name,
                required_bits: cfg.min_bits.max(lag + 1000),
                available_bits: n,
            });
            continue;
        }
        let (statistic, p_value) = autocorrelation(&x, lag);
        out.push(BatteryEntry::Completed(TestResult {
            test_name: name,
            statistic,
            p_value,
            passed: p_value >= cfg.alpha,
            n_bits: n,
        }));
    }
    out
}

/// Aggregate results; errors on an empty list.
pub fn battery_summary(entries: &[BatteryEntry]) -> Result<BatterySummary> {
    if entries.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut pass = 0;
    let mut fail = 0;
    let mut skip = 0;
    let mut min_p = 1.0f64;
    for e in entries {
        match e {
            BatteryEntry::Completed(r) => {
                if r.passed {
                    pass += 1;
                } else {
                    fail += 1;
                }
                min_p = min_p.min(r.p_value);
            }
            BatteryEntry::Skipped { .. } => skip += 1,
        }
    }
    Ok(BatterySummary {
        pass_count: pass,
        fail_count: fail,
        skip_count: skip,
        min_p,
        overall_pass: fail == 0,
    })
}

/// Frequency (monobit): `p = erfc(|S| / sqrt(2 n))` with `S` the +-1 sum.
pub fn monobit(x: &[u8]) -> (f64, f64) {
    let n = x.len();
    let ones: i64 = x.iter().map(|&b| i64::from(b)).sum();
    let s = 2 * ones - n as i64;
    let s_obs = (s.abs() as f64) / libm::sqrt(n as f64);
    (s_obs, erfc(s_obs / SQRT_2))
}

/// Block frequency with block length `m`.
pub fn block_frequency(x: &[u8], m: usize) -> (f64, f64) {
    let n_blocks = x.len() / m;
    let mut chi = 0.0;
    for i in 0..n_blocks {
        let ones: u32 = x[i * m..(i + 1) * m].iter().map(|&b| u32::from(b)).sum();
        let pi = f64::from(ones) / m as f64;
        chi += (pi - 0.5) * (pi - 0.5);
    }
    chi *= 4.0 * m as f64;
    (chi, gamma_q(n_blocks as f64 / 2.0, chi / 2.0))
}

/// Runs test, with the monobit pre-condition (`p = 0` when it fails).
pub fn runs(x: &[u8]) -> (f64, f64) {
    let n = x.len();
    let pi = x.iter().map(|&b| f64::from(b)).sum::<f64>() / n as f64;
    let vn = 1 + x.windows(2).filter(|w| w[0] != w[1]).count();
    if (pi - 0.5).abs() >= 2.0 / libm::sqrt(n as f64) {
        return (vn as f64, 0.0);
    }
    let num = (vn as f64 - 2.0 * n as f64 * pi * (1.0 - pi)).abs();
    let den = 2.0 * libm::sqrt(2.0 * n as f64) * pi * (1.0 - pi);
    (vn as f64, erfc(num / den))
}

/// Longest run of ones, with block length chosen by input size.
pub fn longest_run(x: &[u8]) -> (f64, f64) {
    let n = x.len();
    debug_assert!(n >= 128);
    // (block length, class probabilities, lowest class)
    let (m, probs, lo): (usize, &[f64], usize) = if n >= 750_000 {
        (
            10_000,
            &[0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727],
            10,
        )
    } else if n >= 6272 {
        (128, &[0.1174, 0.2430, 0.2493, 0.1770, 0.1088, 0.1047], 4)
    } else {
        (8, &[0.2148, 0.3672, 0.2305, 0.1875], 1)
    };
    let classes = probs.len();
    let n_blocks = n / m;
    let mut v = vec![0u64; classes];
    for i in 0..n_blocks {
        let mut longest = 0usize;
        let mut cur = 0usize;
        for &b in &x[i * m..(i + 1) * m] {
            if b == 1 {
                cur += 1;
                if cur > longest {
                    longest = cur;
                }
            } else {
                cur = 0;
            }
        }
        let idx = longest.clamp(lo, lo + classes - 1) - lo;
        v[idx] += 1;
    }
    let mut chi = 0.0;
    for (count, &p) in v.iter().zip(probs) {
        let expect = n_blocks as f64 * p;
        let d = *count as f64 - expect;
        chi += d * d / expect;
    }
    let k = (classes - 1) as f64;
    (chi, gamma_q(k / 2.0, chi / 2.0))
}

/// Cumulative sums, forward or backward.
pub fn cumulative_sums(x: &[u8], forward: bool) -> (f64, f64) {
    let n = x.len();
    let mut s: i64 = 0;
    let mut z: i64 = 0;
    let mut scan = |b: u8| {
        s += 2 * i64::from(b) - 1;
        z = z.max(s.abs());
    };
    if forward {
        x.iter().for_each(|&b| scan(b));
    } else {
        x.iter().rev().for_each(|&b| scan(b));
    }
    if z == 0 {
        // degenerate constant alternation edge: the maximum excursion of a
        // nonempty walk is at least 1, so this cannot happen for n >= 1
        return (0.0, 0.0);
    }
    let zf = z as f64;
    let nf = n as f64;
    let sqrt_n = libm::sqrt(nf);
    let lo1 = libm::floor((-nf / zf + 1.0) / 4.0) as i64;
    let hi1 = libm::floor((nf / zf - 1.0) / 4.0) as i64;
    let mut t1 = 0.0;
    for k in lo1..=hi1 {
        let k = k as f64;
        t1 += normal_cdf((4.0 * k + 1.0) * zf / sqrt_n) - normal_cdf((4.0 * k - 1.0) * zf / sqrt_n);
    }
    let lo2 = libm::floor((-nf / zf - 3.0) / 4.0) as i64;
    let mut t2 = 0.0;
    for k in lo2..=hi1 {
        let k = k as f64;
        t2 += normal_cdf((4.0 * k + 3.0) * zf / sqrt_n) - normal_cdf((4.0 * k + 1.0) * zf / sqrt_n);
    }
    (zf, (1.0 - t1 + t2).clamp(0.0, 1.0))
}

/// Overlapping m-bit pattern counts with circular wraparound.
fn pattern_counts(x: &[u8], m: usize) -> Vec<u32> {
    let n = x.len();
    let mut counts = vec![0u32; 1 << m];
    let mask = (1usize << m) - 1;
    let mut v = 0usize;
    for i in 0..m - 1 {
        v = (v << 1) | x[i] as usize;
    }
    for i in m - 1..n + m - 1 {
        let bit = x[if i < n { i } else { i - n }] as usize;
        v = ((v << 1) | bit) & mask;
        counts[v] += 1;
    }
    counts
}

/// Fold m-bit circular counts to (m-1)-bit counts by summing over the
/// trailing bit; exact for circular overlapping counts.
fn fold_counts(counts: &[u32]) -> Vec<u32> {
    let half = counts.len() / 2;
    (0..half)
        .map(|w| counts[2 * w] + counts[2 * w + 1])
        .collect()
}

fn psi_sq(counts: &[u32], n: usize) -> f64 {
    let sum_sq: f64 = counts.iter().map(|&c| f64::from(c) * f64::from(c)).sum();
    counts.len() as f64 / n as f64 * sum_sq - n as f64
}

/// Serial test: returns `(dpsi, p1, d2psi, p2)`.
pub fn serial(x: &[u8], m: usize) -> (f64, f64, f64, f64) {
    debug_assert!(m >= 2);
    let n = x.len();
    let counts_m = pattern_counts(x, m);
    let counts_m1 = fold_counts(&counts_m);
    let counts_m2 = fold_counts(&counts_m1);
    let psi_m = psi_sq(&counts_m, n);
    let psi_m1 = psi_sq(&counts_m1, n);
    let psi_m2 = if m >= 3 { psi_sq(&counts_m2, n) } else { 0.0 };
    // the psi differences are non-negative quadratic forms; clamp the
    // floating-point residue of exactly-uniform inputs
    let d1 = (psi_m - psi_m1).max(0.0);
    let d2 = (psi_m - 2.0 * psi_m1 + psi_m2).max(0.0);
    let p1 = gamma_q(libm::exp2((m - 2) as f64), d1 / 2.0);
    let p2 = gamma_q(libm::exp2((m - 3) as f64), d2 / 2.0);
    (d1, p1, d2, p2)
}

/// Approximate entropy with pattern length `m`.
pub fn approximate_entropy(x: &[u8], m: usize) -> (f64, f64) {
    let n = x.len();
    let phi = |counts: &[u32]| -> f64 {
        let mut total = 0.0;
        for &c in counts {
            if c > 0 {
                let p = f64::from(c) / n as f64;
                total += p * libm::log(p);
            }
        }
        total
    };
    let counts_m1 = pattern_counts(x, m + 1);
    let counts_m = fold_counts(&counts_m1);
    let apen = phi(&counts_m) - phi(&counts_m1);
    let chi = (2.0 * n as f64 * (core::f64::consts::LN_2 - apen)).max(0.0);
    (chi, gamma_q(libm::exp2((m - 1) as f64), chi / 2.0))
}

/// Bit autocorrelation at `lag`: the XOR count against the shifted stream,
/// normalized to a standard normal statistic.
pub fn autocorrelation(x: &[u8], lag: usize) -> (f64, f64) {
    let n = x.len();
    debug_assert!(lag >= 1 && lag < n);
    let mut a = 0u64;
    for i in 0..n - lag {
        a += u64::from(x[i] ^ x[i + lag]);
    }
    let nd = (n - lag) as f64;
    let z = 2.0 * (a as f64 - nd / 2.0) / libm::sqrt(nd);
    (z, erfc(z.abs() / SQRT_2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_core::RngCore;

    /// 8192-bit fixed reference vector.
    const VECTOR_HEX: &str = concat!(
        "17dd48e4a608a9bef1d14f0573621cc433718768321d8b60a4b2490204ee520b18141c82a5154c4c6d90a7c61af1c595ae1cbbafadb2f9bed8e985182dd2ccfa2de7823bd8454eb10fca311bcd5a8baefa4b56d992e7c4b41f4815639573caf4bb8b79d88f236f70dac5ab1e49c2c9234e8d5ca614f1f94faf022664b8d2b8cfcd3fb84b2480d71bbc33c49d1b5dda8b781774591f9e3392b6ec221380ce241027908720fa0b6d6df038b98dc710dc680bc62c3714009b6715911bd1c220d2745ba43fdf4bf9f26b212250e0412fbb25df8b809577168e56e2be1b5b2a0994edc0433ddf857e75f19246c09f0bb39ab8555da74a34e20a9c2cac5d9cb9dc29f2",
        "42f9b9ca7af717ce2428cac55c8f8edf48d7e47784ffcfa9cb46ed29106a8d90e610f4eb3d446f4e219438b5110063adffa3f8b975b491d1be4d3ed249316ea4aa2e521f232366475c67ea10ece2c7a615382cf52432149c0f9e449b4740ed955b8c05b0429844ce263d6801cd194d45a4b65ddedcb69fea9300708be3a360227e069e00d08db7d077c80e58eef6db29964feb907fba327a3e7d3705edb096694613a1c65e65664c046a20658e691134674eb7a1a55d7f6c3237c4e55eb64d6392cf34696c3dd8a25b1b6cf22c94f5d01110722256b76ac548e8b64ac9eb98838b43b3f37aba1d35916138e8ccd791f62498c569f5f240b18f15fcb5da0483c0",
        "82971d0c901566c42efd3d4ebae7532d6b865b45060e2ebe98da40738e79108fdbc941d65862ad1d2dfb5274831a5f533f25557e18d5ffb43b8dd066a771f61f6e6512f4e9e27e8f6521dad07ad8f884f45363de503627304e106fb323e4f56e36b5f4f6cefc756e63cbf4e87366db7c0cb1979b6ed6a155517ab13ae581a1dbfa809186ea9f6df1dc8e58a9a7c4dc236cc27520d95dab7f1e2fb02713d306388cb25dd0f28c780b165e7ec32b49e4b16edba21b1bd5d8fa475ee76a9505ba653ce0eac9031fa631f0c9fd4827c9e188fdd0b441a6eb1b9790bbdf8b6fef5268eb5a815865420a3b22b748a9d257448e1ea9a98d3520fce80f779f32210a0354",
        "96df92b071ed63ce2fb6dbbeb3c953772ed3072fe04f86651583e36e2faf636dedfe5932ccd30d778e95e004e25abce80dafcb436f3821628905619aed1b926bf55b9bb3c5f3ffe67647b93546fdd123b165898f54913c2712cdeecac396e78becc3364730066d3a9f3ea1a745667e45bb7088ba59027b4914f693798988f4928f73302c15449f35aa206678cc23ce1abfecc4a140c4717a666fd86d9f4e46299be357a459bcea6417207a4d58c118afc801d74da93174dff14d686db93ef1405827962dfd5ec2b776e12419d015ee663516ed776a5dca6c00eacd59c7e2f83bd069081eb03a196fe9b69ba425e1d2d3fdb59d555d94cffcbae8e0f6c86c2f52"
    );

    fn reference_bits() -> Vec<u8> {
        let bytes: Vec<u8> = (0..VECTOR_HEX.len() / 2)
            .map(|i| u8::from_str_radix(&VECTOR_HEX[2 * i..2 * i + 2], 16).unwrap())
            .collect();
        BitBlock::from_bytes(bytes).to_unpacked()
    }

    fn close(actual: f64, expected: f64) {
        let err = if expected == 0.0 {
            actual.abs()
        } else {
            ((actual - expected) / expected).abs()
        };
        assert!(err < 1e-10, "actual {actual:e} vs expected {expected:e}");
    }

    #[test]
    fn reference_vector_p_values() {
        // expected values computed independently from the test definitions
        let x = reference_bits();
        assert_eq!(x.len(), 8192);

        let (s, p) = monobit(&x);
        close(s, 0.79549512883486595);
        close(p, 0.42632554338440798);

        let (chi, p) = block_frequency(&x, 128);
        close(chi, 76.0625);
        close(p, 0.14370579661645522);

        let (vn, p) = runs(&x);
        assert_eq!(vn, 4145.0);
        close(p, 0.27578666952754849);

        let (chi, p) = longest_run(&x);
        close(chi, 4.8485644237772094);
        close(p, 0.43463993493344844);

        let (z, p) = cumulative_sums(&x, true);
        assert_eq!(z, 84.0);
        close(p, 0.69601064219382858);
        let (z, p) = cumulative_sums(&x, false);
        assert_eq!(z, 156.0);
        close(p, 0.16956952586487345);

        let (d1, p1, d2, p2) = serial(&x, 5);
        close(d1, 21.99609375);
        close(p1, 0.14331770671684044);
        close(d2, 8.43359375);
        close(p2, 0.39230064571682061);

        let (chi, p) = approximate_entropy(&x, 4);
        close(chi, 21.586284378359778);
        close(p, 0.15705918982962896);

        for (lag, za, pa) in [
            (1usize, 1.0717741331339985, 0.28382149404828394),
            (2, 2.342577189265679, 0.019151072072302096),
            (8, 0.99485479864210924, 0.31980688974981786),
            (16, 0.57508614176495154, 0.56523303990746332),
        ] {
            let (z, p) = autocorrelation(&x, lag);
            close(z, za);
            close(p, pa);
        }
    }

    #[test]
    fn monobit_on_constant_stream_fails_hard() {
        let x = vec![0u8; 100];
        let (s, p) = monobit(&x);
        assert_eq!(s, 10.0);
        close(p, 1.5239706048320996e-23);
        assert!(p < 0.01);
    }

    #[test]
    fn alternating_bits_pass_monobit_but_fail_runs() {
        let x: Vec<u8> = (0..128).map(|i| (i % 2) as u8).collect();
        let (s, p) = monobit(&x);
        assert_eq!(s, 0.0);
        assert_eq!(p, 1.0);
        let (vn, p_runs) = runs(&x);
        assert_eq!(vn, 128.0);
        close(p_runs, 1.1224297172982928e-29);
        assert!(p_runs < 0.01);
    }

    #[test]
    fn battery_emits_skip_markers_on_undersized_input() {
        let bits = BitBlock::from_bytes(vec![0xA5; 64]); // 512 bits
        let entries = run_battery(&bits, 0.01);
        assert!(!entries.is_empty());
        assert!(entries
            .iter()
            .all(|e| matches!(e, BatteryEntry::Skipped { .. })));
        let summary = battery_summary(&entries).unwrap();
        assert_eq!(summary.skip_count, entries.len());
        assert_eq!(summary.pass_count, 0);
        // skips alone never certify a pass silently: nothing failed, but
        // nothing passed either, and callers see skip_count
        assert!(summary.overall_pass);
        assert_eq!(summary.min_p, 1.0);
    }

    #[test]
    fn battery_passes_on_good_generator() {
        let mut rng = crate::rng::from_seed(0x600D);
        let mut bytes = vec![0u8; 1 << 15]; // 2^18 bits
        rng.fill_bytes(&mut bytes);
        let bits = BitBlock::from_bytes(bytes);
        let cfg = BatteryConfig {
            alpha: 1e-4,
            min_bits: 1 << 20,
            ..BatteryConfig::default()
        };
        // below the battery floor: everything skips
        let entries = run_battery_with(&bits, &cfg);
        assert!(entries.iter().all(|e| e.as_completed().is_none()));

        let cfg = BatteryConfig {
            alpha: 1e-4,
            min_bits: 1 << 18,
            ..BatteryConfig::default()
        };
        let entries = run_battery_with(&bits, &cfg);
        let summary = battery_summary(&entries).unwrap();
        assert_eq!(summary.skip_count, 0, "{entries:?}");
        assert_eq!(summary.fail_count, 0, "min_p {}", summary.min_p);
        assert!(summary.overall_pass);
    }

    #[test]
    fn battery_rejects_heavily_biased_stream() {
        // 60/40 biased bits
        let mut rng = crate::rng::from_seed(0xBAD);
        let mut bits = BitBlock::with_capacity(1 << 17);
        for _ in 0..1 << 17 {
            bits.push(rng.next_u32() % 10 < 6);
        }
        let cfg = BatteryConfig {
            alpha: 0.01,
            min_bits: 1 << 17,
            ..BatteryConfig::default()
        };
        let summary = battery_summary(&run_battery_with(&bits, &cfg)).unwrap();
        assert!(summary.fail_count >= 1);
        assert!(!summary.overall_pass);
    }

    #[test]
    fn summary_reference_cases() {
        let mk = |name: &str, p: f64, alpha: f64| {
            BatteryEntry::Completed(TestResult {
                test_name: String::from(name),
                statistic: 0.0,
                p_value: p,
                passed: p >= alpha,
                n_bits: 1,
            })
        };
        let all_pass = vec![mk("a", 0.5, 0.01), mk("b", 0.2, 0.01)];
        let s = battery_summary(&all_pass).unwrap();
        assert_eq!(s.fail_count, 0);
        assert!(s.overall_pass);

        let one_fail = vec![mk("a", 0.5, 0.01), mk("b", 0.005, 0.01)];
        let s = battery_summary(&one_fail).unwrap();
        assert_eq!(s.fail_count, 1);
        assert_eq!(s.min_p, 0.005);
        assert!(!s.overall_pass);

        assert!(matches!(battery_summary(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn longest_run_regime_selection() {
        // big-regime inputs go through the 10^4-bit block table
        let mut rng = crate::rng::from_seed(3);
        let mut bytes = vec![0u8; 100_000];
        rng.fill_bytes(&mut bytes);
        let x = BitBlock::from_bytes(bytes).to_unpacked();
        let (_, p_mid) = longest_run(&x[..8192]);
        let (_, p_big) = longest_run(&x);
        assert!((0.0..=1.0).contains(&p_mid));
        assert!((0.0..=1.0).contains(&p_big));
    }
}
