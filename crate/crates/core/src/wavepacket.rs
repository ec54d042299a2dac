//! Coordinate-space densities built from branch cumulants.
//!
//! Each `(α, β)` branch contributes a complex Gaussian
//! `w · (2√(πV))⁻¹ · exp(−(Q − c)²/(4V))` with center `c = K10 + K01` and width
//! `V = 1/2 + K11 + K20 + K02`. Diagonal branches build the classical mixture;
//! the conjugate-paired off-diagonal branches combine into a real interference
//! term.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{linear_fit, LinearFit};
use crate::cumulant::{cat_norm_squared, BranchCumulants, EvolvedSuperposition, MarkovParams};
use crate::error::{Error, Result};

/// Uniform grid of Q values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for QGrid {
    fn default() -> Self {
        Self { min: -12.0, max: 12.0, points: 2048 }
    }
}

impl QGrid {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        if !(max > min) || points < 2 {
            return Err(Error::Config(format!("invalid Q grid [{min}, {max}] with {points} points")));
        }
        Ok(Self { min, max, points })
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.points - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points).map(|i| self.min + h * i as f64).collect()
    }
}

/// A real density sampled on a Q grid at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavepacketFrame {
    pub time: f64,
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    /// Set when the grid cannot resolve the finest fringes of the state.
    #[serde(default)]
    pub coarse_grid: bool,
}

impl WavepacketFrame {
    /// Trapezoidal ∫P dQ.
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(q, p)| 0.5 * (q[1] - q[0]) * (p[0] + p[1]))
            .sum()
    }

    pub fn min_value(&self) -> f64 {
        self.density.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Density at the grid point nearest to `q`.
    pub fn value_near(&self, q: f64) -> f64 {
        let i = self
            .grid
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - q).abs().total_cmp(&(b.1 - q).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        self.density[i]
    }

    /// Largest |P| over grid points with |Q − q0| ≤ half_width.
    pub fn max_abs_within(&self, q0: f64, half_width: f64) -> f64 {
        self.grid
            .iter()
            .zip(&self.density)
            .filter(|(q, _)| (**q - q0).abs() <= half_width)
            .map(|(_, p)| p.abs())
            .fold(0.0, f64::max)
    }

    /// Two-column CSV `Q,P`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["Q", "P"])?;
        for (q, p) in self.grid.iter().zip(&self.density) {
            w.write_record([q.to_string(), p.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Long-format CSV `t,Q,P` for a stack of frames.
pub fn write_frames_csv<W: Write>(frames: &[WavepacketFrame], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "Q", "P"])?;
    for f in frames {
        let t = f.time.to_string();
        for (q, p) in f.grid.iter().zip(&f.density) {
            w.write_record([t.as_str(), &q.to_string(), &p.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Parse the long-format `t,Q,P` CSV back into frames.
pub fn read_frames_csv<R: std::io::Read>(input: R) -> Result<Vec<WavepacketFrame>> {
    let mut r = csv::Reader::from_reader(input);
    let mut frames: Vec<WavepacketFrame> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Config(format!("malformed frame row {:?}", rec)))
        };
        let (t, q, p) = (parse(0)?, parse(1)?, parse(2)?);
        match frames.last_mut() {
            Some(f) if f.time == t => {
                f.grid.push(q);
                f.density.push(p);
            }
            _ => frames.push(WavepacketFrame { time: t, grid: vec![q], density: vec![p], coarse_grid: false }),
        }
    }
    Ok(frames)
}

/// A weighted complex Gaussian contribution to P(Q).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBranchDensity {
    pub center: Complex64,
    pub variance: Complex64,
    pub weight: Complex64,
    pub diagonal: bool,
}

impl GaussianBranchDensity {
    pub fn from_cumulants(k: &BranchCumulants, weight: Complex64) -> Self {
        Self { center: k.center(), variance: k.variance(), weight, diagonal: k.is_diagonal() }
    }
}

/// Value of one branch Gaussian at `q`, evaluated in log space.
pub fn branch_density(q: f64, branch: &GaussianBranchDensity) -> Result<Complex64> {
    let v = branch.variance;
    if v.re <= 1e-12 {
        return Err(Error::DegenerateVariance(v.re));
    }
    if branch.weight == Complex64::new(0.0, 0.0) {
        return Ok(branch.weight);
    }
    let d = Complex64::new(q, 0.0) - branch.center;
    let log = branch.weight.ln() - (2.0 * (PI * v).sqrt()).ln() - d * d / (4.0 * v);
    Ok(log.exp())
}

fn sum_frame<'a>(
    branches: impl Iterator<Item = &'a GaussianBranchDensity> + Clone,
    grid: &[f64],
    t: f64,
) -> Result<WavepacketFrame> {
    let mut density = Vec::with_capacity(grid.len());
    for &q in grid {
        let mut acc = 0.0;
        for b in branches.clone() {
            acc += branch_density(q, b)?.re;
        }
        density.push(acc);
    }
    Ok(WavepacketFrame { time: t, grid: grid.to_vec(), density, coarse_grid: false })
}

/// Full density: real part of the branch sum.
pub fn density_frame(branches: &[GaussianBranchDensity], grid: &[f64], t: f64) -> Result<WavepacketFrame> {
    sum_frame(branches.iter(), grid, t)
}

/// `(mixture, interference)` parts of the density: diagonal and off-diagonal branches.
pub fn split_frames(
    branches: &[GaussianBranchDensity],
    grid: &[f64],
    t: f64,
) -> Result<(WavepacketFrame, WavepacketFrame)> {
    let mixture = sum_frame(branches.iter().filter(|b| b.diagonal), grid, t)?;
    let interference = sum_frame(branches.iter().filter(|b| !b.diagonal), grid, t)?;
    Ok((mixture, interference))
}

/// Branch Gaussians of an evolved superposition at grid index `i`.
pub fn branches_at(ev: &EvolvedSuperposition, i: usize) -> Vec<GaussianBranchDensity> {
    ev.at(i).map(|(w, k)| GaussianBranchDensity::from_cumulants(k, w)).collect()
}

/// `s(t) = Im(α* z(t)) e^{−γt}`: half the imaginary center of the off-diagonal branches.
fn off_diagonal_shift(alpha: Complex64, p: &MarkovParams, t: f64) -> f64 {
    (alpha.conj() * p.z(t)).im * (-p.gamma * t).exp()
}

/// Closed-form Markovian interference term of the cat `N⁻¹(|α⟩ + e^{iφ}|−α⟩)`:
///
/// `N⁻² (πV)^{−1/2} exp(−2|α|² + (4s² − Q²)/(4V)) cos(φ + Q s/V)`, `s = Im(α* z) e^{−γt}`.
pub fn interference_term(alpha: Complex64, phi: f64, p: &MarkovParams, q: f64, t: f64) -> f64 {
    let v = p.variance(t);
    let s = off_diagonal_shift(alpha, p, t);
    let exponent = -2.0 * alpha.norm_sqr() + (4.0 * s * s - q * q) / (4.0 * v);
    exponent.exp() / (cat_norm_squared(alpha, phi) * (PI * v).sqrt()) * (phi + q * s / v).cos()
}

/// Amplitude of the interference fringes at Q = 0 (the cosine factor removed).
pub fn interference_envelope(alpha: Complex64, phi: f64, p: &MarkovParams, t: f64) -> f64 {
    let v = p.variance(t);
    let s = off_diagonal_shift(alpha, p, t);
    (-2.0 * alpha.norm_sqr() + s * s / v).exp() / (cat_norm_squared(alpha, phi) * (PI * v).sqrt())
}

/// `([Im(α* z)]² e^{−2γt} / V) / (2|α|²)`; close to one while fringes are visible.
pub fn significance_ratio(alpha: Complex64, p: &MarkovParams, t: f64) -> f64 {
    let s = off_diagonal_shift(alpha, p, t);
    s * s / p.variance(t) / (2.0 * alpha.norm_sqr())
}

/// Zurek-type decoherence rate `2|α|²γ`.
pub fn decoherence_rate(alpha: Complex64, gamma: f64) -> f64 {
    2.0 * alpha.norm_sqr() * gamma
}

/// Packet-collision times in `(0, t_end]`: local minima of `|z(t) ∓ i|`.
pub fn collision_times(p: &MarkovParams, t_end: f64) -> Vec<f64> {
    let dist = |t: f64| {
        let z = p.z(t);
        let i = Complex64::new(0.0, 1.0);
        (z - i).norm().min((z + i).norm())
    };
    let h = p.period() / 400.0;
    let n = (t_end / h).ceil() as usize;
    let mut out = Vec::new();
    for k in 1..n {
        let (a, b, c) = ((k - 1) as f64 * h, k as f64 * h, (k + 1) as f64 * h);
        if dist(b) < dist(a) && dist(b) <= dist(c) {
            let t = golden_min(&dist, a, c);
            if t <= t_end {
                out.push(t);
            }
        }
    }
    out
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    while (b - a).abs() > 1e-12 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    0.5 * (a + b)
}

/// Empirical decay rate of the fringe envelope at packet collisions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub rate: f64,
    pub rate_stderr: f64,
    pub r_squared: f64,
    pub times: Vec<f64>,
    pub envelopes: Vec<f64>,
}

/// Fit `ln envelope(t_i) = a − rate·t_i` over the collisions in `(0, t_end]`.
pub fn fit_decoherence_rate(alpha: Complex64, phi: f64, p: &MarkovParams, t_end: f64) -> Result<DecayFit> {
    let times = collision_times(p, t_end);
    if times.len() < 2 {
        return Err(Error::Domain(format!("need at least two packet collisions before t = {t_end}")));
    }
    let envelopes: Vec<f64> = times.iter().map(|&t| interference_envelope(alpha, phi, p, t)).collect();
    let logs: Vec<f64> = envelopes.iter().map(|e| e.ln()).collect();
    let LinearFit { slope, slope_stderr, r_squared, .. } = linear_fit(&times, &logs)?;
    Ok(DecayFit { rate: -slope, rate_stderr: slope_stderr, r_squared, times, envelopes })
}

/// Visibility of the fringes around `q0`: the largest |interference| over the
/// largest mixture density within `half_width` of `q0`.
pub fn fringe_visibility(mixture: &WavepacketFrame, interference: &WavepacketFrame, q0: f64, half_width: f64) -> f64 {
    let m = mixture.max_abs_within(q0, half_width);
    if m == 0.0 {
        return 0.0;
    }
    interference.max_abs_within(q0, half_width) / m
}
