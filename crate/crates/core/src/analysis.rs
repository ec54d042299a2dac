//! Small signal-analysis helpers used to turn trajectories into scalar checks.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{domain, Result};

/// Ordinary least-squares line `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
    pub max_residual: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if n != y.len() || n < 2 {
        return domain(format!("linear fit needs matching inputs of length >= 2 (got {} and {})", n, y.len()));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return domain("linear fit with constant abscissa");
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - (slope * a + intercept)).collect();
    let ssr: f64 = residuals.iter().map(|r| r * r).sum();
    let slope_stderr = if n > 2 { (ssr / (nf - 2.0) / sxx).sqrt() } else { 0.0 };
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ssr / syy };
    let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(LinearFit { slope, intercept, slope_stderr, r_squared, max_residual })
}

/// Linearly interpolated sign changes of `y(t)`.
pub fn zero_crossings(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 1..t.len().min(y.len()) {
        let (y0, y1) = (y[i - 1], y[i]);
        if y0 == 0.0 {
            if i == 1 || y[i - 2] != 0.0 {
                out.push(t[i - 1]);
            }
        } else if y0 * y1 < 0.0 {
            out.push(t[i - 1] + (t[i] - t[i - 1]) * y0 / (y0 - y1));
        }
    }
    out
}

/// Angular frequency from half-period spacing of zero crossings.
pub fn crossing_frequency(t: &[f64], y: &[f64]) -> Result<f64> {
    let zc = zero_crossings(t, y);
    if zc.len() < 3 {
        return domain(format!("need at least three zero crossings, found {}", zc.len()));
    }
    let idx: Vec<f64> = (0..zc.len()).map(|i| i as f64).collect();
    Ok(PI / linear_fit(&idx, &zc)?.slope)
}

/// Interior local maxima, refined by a parabola through the three samples.
/// Returns `(t, y)` pairs; assumes a uniform grid.
pub fn local_maxima(t: &[f64], y: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 1..y.len().saturating_sub(1) {
        let (a, b, c) = (y[i - 1], y[i], y[i + 1]);
        if b > a && b >= c {
            let denom = a - 2.0 * b + c;
            let shift = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            let h = t[i + 1] - t[i];
            out.push((t[i] + shift * h, b - 0.25 * (a - c) * shift));
        }
    }
    out
}

/// Local maxima of |y|.
pub fn envelope_peaks(t: &[f64], y: &[f64]) -> Vec<(f64, f64)> {
    let abs: Vec<f64> = y.iter().map(|v| v.abs()).collect();
    local_maxima(t, &abs)
}

/// Dominant angular frequency of a uniformly sampled signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralPeak {
    pub frequency: f64,
    pub resolution: f64,
    pub amplitude: f64,
}

/// Dominant spectral line after removing a linear trend and applying a Hann
/// window: the largest interior local maximum of the magnitude spectrum, so
/// that leakage from a residual monotone trend at the lowest bins is not
/// mistaken for a line. The peak bin is refined with a parabola through log-magnitudes of its neighbours.
pub fn spectral_peak(dt: f64, y: &[f64]) -> Result<SpectralPeak> {
    let n = y.len();
    if n < 8 || !(dt > 0.0) {
        return domain("spectral peak needs at least 8 uniformly spaced samples");
    }
    let x: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let fit = linear_fit(&x, y)?;
    let mut buf: Vec<Complex<f64>> = y
        .iter()
        .zip(&x)
        .map(|(v, i)| {
            let hann = 0.5 - 0.5 * (2.0 * PI * i / (n - 1) as f64).cos();
            Complex::new((v - fit.slope * i - fit.intercept) * hann, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mag: Vec<f64> = buf[..n / 2 + 1].iter().map(|c| c.norm()).collect();
    let (k, amp) = (1..mag.len() - 1)
        .filter(|&k| mag[k] > mag[k - 1] && mag[k] >= mag[k + 1])
        .map(|k| (k, mag[k]))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, 0.0));
    if amp == 0.0 {
        return domain("signal has no spectral line");
    }
    let mut kf = k as f64;
    if mag[k - 1] > 0.0 && mag[k + 1] > 0.0 {
        let (a, b, c) = (mag[k - 1].ln(), mag[k].ln(), mag[k + 1].ln());
        let denom = a - 2.0 * b + c;
        if denom < 0.0 {
            kf += 0.5 * (a - c) / denom;
        }
    }
    let resolution = 2.0 * PI / (n as f64 * dt);
    Ok(SpectralPeak { frequency: kf * resolution, resolution, amplitude: amp })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert_relative_eq!(f.slope, 2.5, epsilon = 1e-14);
        assert_relative_eq!(f.intercept, -1.0, epsilon = 1e-14);
        assert!(f.r_squared > 1.0 - 1e-14);
        assert!(f.slope_stderr < 1e-12);
    }

    #[test]
    fn degenerate_fit_rejected() {
        assert!(linear_fit(&[1.0], &[1.0]).is_err());
        assert!(linear_fit(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn cosine_frequency_from_crossings() {
        let t: Vec<f64> = (0..4000).map(|i| i as f64 * 0.01).collect();
        let y: Vec<f64> = t.iter().map(|t| (0.9 * t).cos() * (-0.05 * t).exp()).collect();
        assert_relative_eq!(crossing_frequency(&t, &y).unwrap(), 0.9, max_relative = 1e-5);
    }

    #[test]
    fn parabolic_peak() {
        let t: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|t| -(t - 4.237f64).powi(2)).collect();
        let m = local_maxima(&t, &y);
        assert_eq!(m.len(), 1);
        assert_relative_eq!(m[0].0, 4.237, epsilon = 1e-12);
        assert_relative_eq!(m[0].1, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn envelope_of_damped_cosine() {
        let t: Vec<f64> = (0..2000).map(|i| i as f64 * 0.01).collect();
        let y: Vec<f64> = t.iter().map(|t| t.cos() * (-0.1 * t).exp()).collect();
        let peaks = envelope_peaks(&t, &y);
        assert!(peaks.len() >= 6);
        for (tp, yp) in peaks {
            // |cos| peaks sit where tan t = −0.1, slightly below the exponential
            assert!((yp - (-0.1 * tp).exp()).abs() < 1e-2 * (-0.1 * tp).exp());
        }
    }

    #[test]
    fn spectral_peak_of_trended_signal() {
        let dt = 0.05;
        let y: Vec<f64> = (0..4096).map(|i| i as f64 * dt).map(|t| 0.7 * (0.968 * t).sin() + 0.01 * t).collect();
        let p = spectral_peak(dt, &y).unwrap();
        assert!((p.frequency - 0.968).abs() < p.resolution, "{p:?}");
    }

    #[test]
    fn spectral_line_on_saturating_background() {
        let dt = 0.1;
        let y: Vec<f64> = (0..500)
            .map(|i| i as f64 * dt)
            .map(|t| 3.0 - 2.5 * (-0.2 * t).exp() + 0.25 * (-0.2 * t).exp() * (1.99 * t).cos())
            .collect();
        let p = spectral_peak(dt, &y).unwrap();
        assert!((p.frequency - 1.99).abs() < p.resolution, "{p:?}");
    }
}
