//! Voltage-variance model fitting and operating-point optimization.
//!
//! The measured voltage variance across laser powers follows
//! `<V^2> = AC*P^2 + AQ*P + F` with a classical quadratic term, a quantum
//! linear term, and the detector background. The fit is a non-negative
//! least squares over that basis (unconstrained fits can return a negative
//! background on noisy data). The quantum-signal-to-classical-noise ratio
//! `AQ*P / (AC*P^2 + F)` then has the closed-form optimum
//! `P* = sqrt(F/AC)` with peak `AQ / (2*sqrt(AC*F))`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// One measured (power, variance) point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariancePoint {
    /// Laser operating power (mW), >= 0.
    pub power_mw: f64,
    /// Measured voltage variance (mV^2), >= 0.
    pub variance_mv2: f64,
    /// Samples behind the variance estimate.
    pub n_samples: u64,
}

/// Fitted coefficients of the quadratic variance model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceFit {
    /// Classical coefficient AC (mV^2/mW^2).
    pub ac: f64,
    /// Quantum coefficient AQ (mV^2/mW).
    pub aq: f64,
    /// Detector background F (mV^2).
    pub f: f64,
    /// RMS residual of the fit (mV^2).
    pub residual_rms: f64,
}

/// The QSCNR functional with its closed-form optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QscnrCurve {
    pub fit: VarianceFit,
    /// `sqrt(f / ac)` (mW).
    pub optimum_power_mw: f64,
    /// `aq / (2 sqrt(ac f))`.
    pub optimum_qscnr: f64,
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator.
fn csum(values: impl Iterator<Item = f64>) -> f64 {
    let mut acc = Kahan::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Fit the quadratic variance model with non-negative coefficients.
///
/// Requires at least three points with three distinct powers. The solver
/// enumerates the active sets of the three-parameter problem exactly.
pub fn fit_variance(points: &[VariancePoint]) -> Result<VarianceFit> {
    for p in points {
        if p.power_mw < 0.0 || p.variance_mv2 < 0.0 {
            return Err(Error::InvalidModel(format!(
                "variance point ({}, {}) is negative",
                p.power_mw, p.variance_mv2
            )));
        }
    }
    let mut powers: Vec<f64> = points.iter().map(|p| p.power_mw).collect();
    powers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    powers.dedup();
    if points.len() < 3 || powers.len() < 3 {
        return Err(Error::Underdetermined(format!(
            "need >= 3 points with >= 3 distinct powers, got {} points / {} powers",
            points.len(),
            powers.len()
        )));
    }

    // Normal-equation moments, compensated. Basis: [P^2, P, 1].
    let m = |k: u32| csum(points.iter().map(|p| libm::pow(p.power_mw, k as f64)));
    let mv = |k: u32| {
        csum(
            points
                .iter()
                .map(|p| libm::pow(p.power_mw, k as f64) * p.variance_mv2),
        )
    };
    let ata = [
        [m(4), m(3), m(2)],
        [m(3), m(2), m(1)],
        [m(2), m(1), points.len() as f64],
    ];
    let atv = [mv(2), mv(1), mv(0)];

    // Exhaustive active-set search: for each subset of coefficients pinned
    // at zero, solve the reduced least squares and keep the best feasible
    // candidate. With three parameters this is exact NNLS.
    let mut best: Option<([f64; 3], f64)> = None;
    for mask in 0u8..8 {
        let free: Vec<usize> = (0..3).filter(|i| mask & (1 << i) == 0).collect();
        let coef = match solve_reduced(&ata, &atv, &free) {
            Some(c) => c,
            None => continue,
        };
        if coef.iter().any(|&c| c < 0.0) {
            continue;
        }
        let ss = csum(points.iter().map(|p| {
            let fitv = coef[0] * p.power_mw * p.power_mw + coef[1] * p.power_mw + coef[2];
            let r = p.variance_mv2 - fitv;
            r * r
        }));
        if best.map_or(true, |(_, s)| ss < s) {
            best = Some((coef, ss));
        }
    }
    let (coef, ss) =
        best.ok_or_else(|| Error::Underdetermined(String::from("no feasible non-negative fit")))?;

    Ok(VarianceFit {
        ac: coef[0],
        aq: coef[1],
        f: coef[2],
        residual_rms: libm::sqrt(ss / points.len() as f64),
    })
}

/// Solve the normal equations restricted to `free` columns; returns the
/// full coefficient vector with pinned entries at zero.
fn solve_reduced(ata: &[[f64; 3]; 3], atv: &[f64; 3], free: &[usize]) -> Option<[f64; 3]> {
    let k = free.len();
    if k == 0 {
        return Some([0.0; 3]);
    }
    let mut a = [[0.0f64; 4]; 3];
    for (r, &fr) in free.iter().enumerate() {
        for (c, &fc) in free.iter().enumerate() {
            a[r][c] = ata[fr][fc];
        }
        a[r][k] = atv[fr];
    }
    // Gaussian elimination with partial pivoting on the k x k system.
    for col in 0..k {
        let pivot =
            (col..k).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        for row in 0..k {
            if row != col {
                let f = a[row][col] / a[col][col];
                for c in col..=k {
                    a[row][c] -= f * a[col][c];
                }
            }
        }
    }
    let mut out = [0.0f64; 3];
    for (r, &fr) in free.iter().enumerate() {
        out[fr] = a[r][k] / a[r][r];
    }
    Some(out)
}

/// Evaluate `aq*P / (ac*P^2 + f)`.
pub fn qscnr(fit: &VarianceFit, power_mw: f64) -> Result<f64> {
    let denom = fit.ac * power_mw * power_mw + fit.f;
    if denom <= 0.0 {
        return Err(Error::DegenerateFit(format!(
            "qscnr denominator {denom} is not positive at P = {power_mw}"
        )));
    }
    Ok(fit.aq * power_mw / denom)
}

/// Closed-form QSCNR optimum.
pub fn optimize_qscnr(fit: &VarianceFit) -> Result<QscnrCurve> {
    if fit.ac <= 0.0 {
        return Err(Error::DegenerateFit(String::from(
            "ac = 0: QSCNR grows without bound, no interior optimum",
        )));
    }
    if fit.f <= 0.0 {
        return Err(Error::DegenerateFit(String::from(
            "f = 0: QSCNR is maximized at P -> 0, no interior optimum",
        )));
    }
    if fit.aq <= 0.0 {
        return Err(Error::DegenerateFit(String::from(
            "aq = 0: QSCNR is identically zero",
        )));
    }
    Ok(QscnrCurve {
        fit: *fit,
        optimum_power_mw: libm::sqrt(fit.f / fit.ac),
        optimum_qscnr: fit.aq / (2.0 * libm::sqrt(fit.ac * fit.f)),
    })
}

/// The reference fitted coefficients used for calibrated simulations.
pub const REFERENCE_FIT: VarianceFit = VarianceFit {
    ac: 1.51e-6,
    aq: 6.72e-7,
    f: 4.50e-8,
    residual_rms: 0.0,
};

/// A log-spaced power grid over (lo, hi], mirroring a 39-point sweep.
pub fn power_grid(lo_mw: f64, hi_mw: f64, n: usize) -> Vec<f64> {
    debug_assert!(lo_mw > 0.0 && hi_mw > lo_mw && n >= 2);
    let l0 = libm::log(lo_mw);
    let l1 = libm::log(hi_mw);
    (0..n)
        .map(|i| libm::exp(l0 + (l1 - l0) * i as f64 / (n - 1) as f64))
        .collect()
}
