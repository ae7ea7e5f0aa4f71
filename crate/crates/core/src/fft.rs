//! Minimal in-place radix-2 FFT.
//!
//! Segment lengths in the PSD estimator are restricted to powers of two,
//! so a plain iterative Cooley-Tukey transform with a precomputed twiddle
//! table is all that is needed here.

use alloc::vec::Vec;
use num_complex::Complex64;

/// Twiddle factors exp(-2*pi*i*k/n) for k in 0..n/2.
pub(crate) fn twiddles(n: usize) -> Vec<Complex64> {
    debug_assert!(n.is_power_of_two());
    let step = -2.0 * core::f64::consts::PI / n as f64;
    (0..n / 2)
        .map(|k| {
            let a = step * k as f64;
            Complex64::new(libm::cos(a), libm::sin(a))
        })
        .collect()
}

/// In-place forward DFT; `buf.len()` must be a power of two and match the
/// table length used to build `tw`.
pub(crate) fn fft_in_place(buf: &mut [Complex64], tw: &[Complex64]) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    debug_assert_eq!(tw.len(), n / 2);
    if n <= 1 {
        return;
    }

    // bit-reversal permutation
    let mut j = 0usize;
    for i in 0..n - 1 {
        if i < j {
            buf.swap(i, j);
        }
        let mut m = n >> 1;
        while m >= 1 && j & m != 0 {
            j ^= m;
            m >>= 1;
        }
        j |= m;
    }

    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = tw[k * stride];
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &v) in x.iter().enumerate() {
                    let a = -2.0 * core::f64::consts::PI * (k * j) as f64 / n as f64;
                    acc += v * Complex64::new(libm::cos(a), libm::sin(a));
                }
                acc
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        let n = 64;
        let mut state = 0x1234_5678u64;
        let x: Vec<Complex64> = (0..n)
            .map(|_| {
                let a = crate::seed::splitmix64(&mut state) as f64 / u64::MAX as f64 - 0.5;
                let b = crate::seed::splitmix64(&mut state) as f64 / u64::MAX as f64 - 0.5;
                Complex64::new(a, b)
            })
            .collect();
        let expect = naive_dft(&x);
        let mut buf = x.clone();
        let tw = twiddles(n);
        fft_in_place(&mut buf, &tw);
        for (got, want) in buf.iter().zip(expect.iter()) {
            assert!((got - want).norm_sqr() < 1e-18, "{got} vs {want}");
        }
    }

    #[test]
    fn impulse_is_flat() {
        let n = 16;
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        buf[0] = Complex64::new(1.0, 0.0);
        let tw = twiddles(n);
        fft_in_place(&mut buf, &tw);
        for v in &buf {
            assert!((v.re - 1.0).abs() < 1e-12 && v.im.abs() < 1e-12);
        }
    }
}
