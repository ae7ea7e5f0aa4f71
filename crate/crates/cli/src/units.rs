//! Physical-quantity parsing with mandatory unit suffixes.
//!
//! Every dimensioned config or flag value is written as `<number><unit>`
//! ("2.35 ns", "250 MS/s", "172.37 uW"); parsing scales it to the
//! canonical unit of its dimension (Hz, s, mW, m, mV, S/s). Refusing bare
//! numbers for dimensioned fields is what keeps unit bugs out of the
//! pipeline.

use anyhow::{bail, Context, Result};

/// Split a quantity string into numeric text and unit suffix.
fn split(input: &str) -> Result<(&str, &str)> {
    let s = input.trim();
    if s.is_empty() {
        bail!("empty quantity");
    }
    // unit = trailing run of letters, 'µ', and '/'
    let unit_start = s
        .char_indices()
        .rev()
        .take_while(|(_, c)| c.is_alphabetic() || *c == 'µ' || *c == '/')
        .last()
        .map(|(i, _)| i)
        .unwrap_or(s.len());
    let (num, unit) = s.split_at(unit_start);
    let num = num.trim();
    if num.is_empty() {
        bail!("no numeric value in {input:?}");
    }
    Ok((num, unit.trim()))
}

/// All unit scales are powers of ten, so the conversion composes the
/// decimal exponent textually and parses once: "2.35" + ns becomes the
/// f64 nearest to the decimal 2.35e-9, exactly as a source literal would.
fn lookup(input: &str, table: &[(&str, i32)], dimension: &str) -> Result<f64> {
    let (num, unit) = split(input)?;
    for (name, exp) in table {
        if *name == unit {
            let value: f64 = if *exp == 0 {
                num.parse()
            } else if num.contains(['e', 'E']) {
                return num
                    .parse::<f64>()
                    .map(|v| v * 10f64.powi(*exp))
                    .with_context(|| format!("bad numeric value in {input:?}"));
            } else {
                format!("{num}e{exp}").parse()
            }
            .with_context(|| format!("bad numeric value in {input:?}"))?;
            return Ok(value);
        }
    }
    bail!(
        "{input:?}: unknown or missing {dimension} unit {unit:?} (expected one of {})",
        table.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
    );
}

/// Frequency to Hz.
pub fn parse_frequency_hz(input: &str) -> Result<f64> {
    lookup(
        input,
        &[("Hz", 0), ("kHz", 3), ("MHz", 6), ("GHz", 9), ("THz", 12)],
        "frequency",
    )
}

/// Time to seconds.
pub fn parse_time_s(input: &str) -> Result<f64> {
    lookup(
        input,
        &[
            ("s", 0),
            ("ms", -3),
            ("us", -6),
            ("µs", -6),
            ("ns", -9),
            ("ps", -12),
        ],
        "time",
    )
}

/// Optical power to mW.
pub fn parse_power_mw(input: &str) -> Result<f64> {
    lookup(
        input,
        &[("W", 3), ("mW", 0), ("uW", -3), ("µW", -3), ("nW", -6)],
        "power",
    )
}

/// Length to meters.
pub fn parse_length_m(input: &str) -> Result<f64> {
    lookup(
        input,
        &[
            ("m", 0),
            ("cm", -2),
            ("mm", -3),
            ("um", -6),
            ("µm", -6),
            ("nm", -9),
        ],
        "length",
    )
}

/// Voltage to mV.
pub fn parse_voltage_mv(input: &str) -> Result<f64> {
    lookup(
        input,
        &[("V", 3), ("mV", 0), ("uV", -3), ("µV", -3), ("nV", -6)],
        "voltage",
    )
}

/// Sampling rate to samples/second. Accepts S/s forms and Hz forms.
pub fn parse_rate_sps(input: &str) -> Result<f64> {
    lookup(
        input,
        &[
            ("S/s", 0),
            ("kS/s", 3),
            ("MS/s", 6),
            ("GS/s", 9),
            ("Hz", 0),
            ("kHz", 3),
            ("MHz", 6),
            ("GHz", 9),
        ],
        "sampling rate",
    )
}
