//! Trigonometric helpers on θ-equispaced periodic samples.

use num_complex::Complex64;
use rustfft::FftPlanner;

fn forward(values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new()
        .plan_fft_forward(buf.len())
        .process(&mut buf);
    buf
}

fn inverse_real(mut buf: Vec<Complex64>) -> Vec<f64> {
    let n = buf.len();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

/// Signed wavenumber of FFT bin `k` for a length-`n` transform.
fn wavenumber(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// Spectral derivative d/dθ of periodic samples. The Nyquist bin is dropped.
pub fn derivative(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut hat = forward(values);
    for (k, c) in hat.iter_mut().enumerate() {
        if n % 2 == 0 && k == n / 2 {
            *c = Complex64::new(0.0, 0.0);
        } else {
            *c *= Complex64::new(0.0, wavenumber(k, n));
        }
    }
    inverse_real(hat)
}

/// Real Fourier coefficients `(a_k, b_k)` for `k = 0..=N/2`, so that
/// `v(θ) = a_0 + Σ a_k cos kθ + b_k sin kθ` on the samples.
pub fn cos_sin_coefficients(values: &[f64]) -> Vec<(f64, f64)> {
    let n = values.len();
    let hat = forward(values);
    (0..=n / 2)
        .map(|k| {
            let c = hat[k] / n as f64;
            if k == 0 || (n % 2 == 0 && k == n / 2) {
                (c.re, 0.0)
            } else {
                (2.0 * c.re, -2.0 * c.im)
            }
        })
        .collect()
}

/// Ratio of the largest Fourier amplitude at modes `>= from_mode` to the largest overall.
/// Zero input gives zero.
pub fn tail_ratio(values: &[f64], from_mode: usize) -> f64 {
    let coeffs = cos_sin_coefficients(values);
    let amp = |&(a, b): &(f64, f64)| a.hypot(b);
    let total = coeffs.iter().map(amp).fold(0.0, f64::max);
    if total == 0.0 {
        return 0.0;
    }
    let tail = coeffs.iter().skip(from_mode).map(amp).fold(0.0, f64::max);
    tail / total
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn samples(n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..n).map(|j| f(2.0 * PI * j as f64 / n as f64)).collect()
    }

    #[test]
    fn derivative_of_trig_polynomial_is_exact() {
        let v = samples(32, |t| (3.0 * t).cos() + 0.5 * (5.0 * t).sin());
        let d = derivative(&v);
        let want = samples(32, |t| -3.0 * (3.0 * t).sin() + 2.5 * (5.0 * t).cos());
        for (a, b) in d.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn coefficients_recover_amplitudes() {
        let v = samples(64, |t| 1.5 + 2.0 * (2.0 * t).cos() - 0.25 * (7.0 * t).sin());
        let c = cos_sin_coefficients(&v);
        assert!((c[0].0 - 1.5).abs() < 1e-13);
        assert!((c[2].0 - 2.0).abs() < 1e-13);
        assert!((c[7].1 + 0.25).abs() < 1e-13);
        assert!(c[3].0.abs() < 1e-13);
    }

    #[test]
    fn tail_ratio_flags_high_modes() {
        let smooth = samples(64, |t| t.cos());
        assert!(tail_ratio(&smooth, 16) < 1e-14);
        let rough = samples(64, |t| t.cos() + 1e-3 * (30.0 * t).cos());
        assert!((tail_ratio(&rough, 16) - 1e-3).abs() < 1e-12);
    }
}
