//! Text renderings of analysis results.
//!
//! Key-value report files use `name = value` lines with comma-free
//! numbers; the battery table is one `name,statistic,p_value,verdict`
//! line per test with a machine-readable summary footer.

use pqn_core::entropy::EntropyReport;
use pqn_core::randtests::{BatteryEntry, BatterySummary};
use pqn_core::timing::{BudgetCheck, TimingBudget};
use pqn_core::variance::{QscnrCurve, VarianceFit};

/// Sampling-rate-matching table row, mirroring the budget report layout.
pub fn timing_report(budget: &TimingBudget, check: &BudgetCheck) -> String {
    let ns = 1e9;
    let mut s = String::new();
    s.push_str("Tc_ns,Td_ns,Tr_ns,Ts_ns,phase_decorrelated,sample_decorrelated\n");
    s.push_str(&format!(
        "{},{},{},{},{},{}\n",
        budget.tc_s * ns,
        budget.td_s * ns,
        budget.tr_s * ns,
        budget.ts_s * ns,
        check.phase_decorrelated,
        check.sample_decorrelated
    ));
    s.push_str(&format!(
        "# dominance_factor = {}\n# max_sample_rate_sps = {}\n",
        budget.dominance_factor,
        pqn_core::timing::max_sample_rate(budget)
    ));
    s
}

/// Variance fit (and optional optimum) as a key-value report.
pub fn fit_report(fit: &VarianceFit, curve: Option<&QscnrCurve>) -> String {
    let mut s = String::new();
    s.push_str(&format!("ac_mv2_per_mw2 = {}\n", fit.ac));
    s.push_str(&format!("aq_mv2_per_mw = {}\n", fit.aq));
    s.push_str(&format!("f_mv2 = {}\n", fit.f));
    s.push_str(&format!("residual_rms_mv2 = {}\n", fit.residual_rms));
    if let Some(c) = curve {
        s.push_str(&format!("optimum_power_mw = {}\n", c.optimum_power_mw));
        s.push_str(&format!("optimum_qscnr = {}\n", c.optimum_qscnr));
    }
    s
}

/// Min-entropy report as key-value text.
pub fn entropy_report(report: &EntropyReport, recommended_ratio: Option<f64>) -> String {
    let mut s = String::new();
    s.push_str(&format!("n_symbols = {}\n", report.n_symbols));
    s.push_str(&format!("symbol_bits = {}\n", report.symbol_bits));
    s.push_str(&format!("p_max = {}\n", report.p_max));
    s.push_str(&format!("p_hat = {}\n", report.p_hat));
    s.push_str(&format!(
        "min_entropy_bits_per_symbol = {}\n",
        report.min_entropy_bits_per_symbol
    ));
    s.push_str(&format!("ratio_bound = {}\n", report.ratio_bound));
    if let Some(r) = recommended_ratio {
        s.push_str(&format!("recommended_ratio = {}\n", r));
    }
    s
}

/// Battery table plus summary footer.
pub fn battery_report(entries: &[BatteryEntry], summary: &BatterySummary) -> String {
    let mut s = String::from("name,statistic,p_value,verdict\n");
    for e in entries {
        match e {
            BatteryEntry::Completed(r) => {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    r.test_name,
                    r.statistic,
                    r.p_value,
                    if r.passed { "pass" } else { "FAIL" }
                ));
            }
            BatteryEntry::Skipped {
                test_name,
                required_bits,
                available_bits,
            } => {
                s.push_str(&format!(
                    "{test_name},nan,nan,skip(need {required_bits} bits; have {available_bits})\n"
                ));
            }
        }
    }
    s.push_str(&format!(
        "# summary pass={} fail={} skip={} min_p={} overall={}\n",
        summary.pass_count,
        summary.fail_count,
        summary.skip_count,
        summary.min_p,
        if summary.overall_pass { "PASS" } else { "FAIL" }
    ));
    s
}

/// Extraction run sidecar.
pub fn extract_report(
    n_in: usize,
    m_out: usize,
    stats: &pqn_core::extractor::StreamStats,
    output_bits: usize,
    epsilon_log2: Option<f64>,
    seed_sha256: &str,
) -> String {
    let mut s = String::new();
    s.push_str(&format!("block_input_bits = {n_in}\n"));
    s.push_str(&format!("block_output_bits = {m_out}\n"));
    s.push_str(&format!(
        "extraction_ratio = {}\n",
        m_out as f64 / n_in as f64
    ));
    s.push_str(&format!("whole_blocks = {}\n", stats.whole_blocks));
    s.push_str(&format!("input_bits_used = {}\n", stats.input_bits_used));
    s.push_str(&format!(
        "tail_bits_discarded = {}\n",
        stats.tail_bits_discarded
    ));
    s.push_str(&format!("output_bits = {output_bits}\n"));
    if let Some(l) = epsilon_log2 {
        s.push_str(&format!("epsilon_log2 = {l}\n"));
    }
    s.push_str(&format!("seed_sha256 = {seed_sha256}\n"));
    s
}
