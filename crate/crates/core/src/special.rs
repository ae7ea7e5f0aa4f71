//! Special functions needed for exact randomness-test p-values.
//!
//! The complementary error function and the regularized incomplete gamma
//! functions are implemented from their standard series / continued-fraction
//! expansions (Lanczos log-gamma, power series for `P(a,x)` when
//! `x < a + 1`, modified-Lentz continued fraction for `Q(a,x)` otherwise).
//! Accuracy is better than 1e-10 relative over the ranges the test battery
//! uses; see the frozen reference values in the tests.

/// Lanczos g = 7, n = 9 coefficients.
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

const LN_SQRT_2PI: f64 = 0.91893853320467274178;
const MAX_ITER: usize = 20_000;
const EPS: f64 = 1e-16;

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    // Lanczos approximation evaluated at x (shifted form valid on x > 0).
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64 - 1.0);
    }
    let t = x + 6.5; // g + 0.5
    LN_SQRT_2PI + (x - 0.5) * libm::log(t) - t + libm::log(acc)
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        1.0 - gamma_q_cf(a, x)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

/// Series expansion for P(a, x), converges for x < a + 1.
fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * libm::exp(-x + a * libm::log(x) - ln_gamma(a))
}

/// Continued fraction for Q(a, x) (modified Lentz), converges for x >= a + 1.
fn gamma_q_cf(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    libm::exp(-x + a * libm::log(x) - ln_gamma(a)) * h
}

/// Complementary error function.
///
/// Uses the identity `erfc(x) = Q(1/2, x^2)` for `x >= 0` and the
/// reflection `erfc(-x) = 2 - erfc(x)`.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        2.0 - erfc(-x)
    } else if x == 0.0 {
        1.0
    } else {
        gamma_q(0.5, x * x)
    }
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * core::f64::consts::FRAC_1_SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(actual: f64, expected: f64, rel: f64) {
        let err = if expected == 0.0 {
            actual.abs()
        } else {
            ((actual - expected) / expected).abs()
        };
        assert!(
            err <= rel,
            "actual {actual:e}, expected {expected:e}, rel err {err:e}"
        );
    }

    #[test]
    fn ln_gamma_reference() {
        check(ln_gamma(0.5), 0.572364942924700087, 1e-13);
        assert!(ln_gamma(1.0).abs() < 1e-13);
        check(ln_gamma(3.75), 1.48681557859341706, 1e-13);
        check(ln_gamma(64.0), 201.009316399281527, 1e-13);
        check(ln_gamma(8192.0), 65621.8156329440267, 1e-13);
        check(ln_gamma(16384.5), 142608.246624108088, 1e-13);
    }

    #[test]
    fn gamma_q_reference() {
        check(gamma_q(0.5, 2.0), 0.045500263896358414, 1e-11);
        check(gamma_q(3.0, 2.5), 0.54381311588332952, 1e-11);
        check(gamma_q(1.5, 0.01), 0.99925224466060880, 1e-11);
        check(gamma_q(64.0, 60.0), 0.68043322453568184, 1e-11);
        check(gamma_q(128.0, 100.0), 0.99600537970596441, 1e-11);
        check(gamma_q(8192.0, 8192.0), 0.49853075529672123, 1e-10);
        check(gamma_q(16384.0, 16500.0), 0.18227674031392938, 1e-10);
        check(gamma_q(2.0, 10.0), 0.00049939922738733337, 1e-11);
        check(gamma_q(0.5, 50.0), 1.5239706048321052e-23, 1e-11);
        assert_eq!(gamma_q(3.0, 0.0), 1.0);
    }

    #[test]
    fn gamma_p_q_complement() {
        for &(a, x) in &[(0.5, 0.3), (2.0, 2.0), (10.0, 12.0), (100.0, 90.0)] {
            let s = gamma_p(a, x) + gamma_q(a, x);
            assert!((s - 1.0).abs() < 1e-12, "P+Q = {s} at a={a}, x={x}");
        }
    }

    #[test]
    fn erfc_reference() {
        check(erfc(0.1), 0.88753708398171511, 1e-11);
        check(erfc(0.5), 0.47950012218695346, 1e-11);
        check(erfc(1.0), 0.15729920705028513, 1e-11);
        check(erfc(2.0), 0.0046777349810472658, 1e-11);
        check(erfc(3.5), 7.4309837234141275e-7, 1e-11);
        check(erfc(7.0710678118654755), 1.5239706048320996e-23, 1e-11);
        check(erfc(10.0), 2.0884875837625448e-45, 1e-11);
        check(erfc(-1.5), 1.9661051464753107, 1e-11);
        check(erfc(-0.25), 1.2763263901682369, 1e-11);
        assert_eq!(erfc(0.0), 1.0);
    }

    #[test]
    fn normal_cdf_basics() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        check(normal_cdf(1.959963984540054), 0.975, 1e-10);
        let x = 1.234;
        assert!((normal_cdf(x) + normal_cdf(-x) - 1.0).abs() < 1e-14);
    }
}
