//! Adaptive explicit integrators for complex linear systems.
//!
//! Two schemes are provided: a Dormand–Prince 5(4) embedded pair (used by the
//! cumulant solver) and classical RK4 with step-doubling error control (used
//! by the Fock integrator). Both report the state exactly at caller-supplied
//! grid points and may take any number of internal substeps in between.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Right-hand side of `dy/dt = f(t, y)` over a flat complex state.
pub trait System {
    fn rhs(&mut self, t: f64, y: &[Complex64], dy: &mut [Complex64]) -> Result<()>;

    /// Called on every accepted step; may modify the state in place.
    fn on_accept(&mut self, _t: f64, _y: &mut [Complex64]) {}
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, initial_step: 1e-3, max_steps: 5_000_000 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evaluations: usize,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Domain("empty time grid".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("time grid must be strictly increasing".into()));
    }
    Ok(())
}

fn error_ratio(y: &[Complex64], y_new: &[Complex64], err: &[Complex64], tol: &Tolerances) -> f64 {
    let r = y
        .iter()
        .zip(y_new)
        .zip(err)
        .map(|((a, b), e)| e.norm() / (tol.atol + tol.rtol * a.norm().max(b.norm())))
        .fold(0.0, |acc: f64, x| if x.is_nan() { f64::INFINITY } else { acc.max(x) });
    if r.is_finite() { r } else { f64::INFINITY }
}

fn axpy(out: &mut [Complex64], base: &[Complex64], terms: &[(f64, &[Complex64])], h: f64) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = base[i];
        for (c, k) in terms {
            if *c != 0.0 {
                acc += k[i] * (c * h);
            }
        }
        *o = acc;
    }
}

/// Step-size driver shared by both schemes: keeps the proposed step, clips
/// it to the next grid point and records the state on arrival.
struct Driver<'a> {
    grid: &'a [f64],
    tol: Tolerances,
    h: f64,
    stats: StepStats,
}

impl<'a> Driver<'a> {
    fn new(grid: &'a [f64], tol: Tolerances) -> Self {
        Self { grid, tol, h: tol.initial_step, stats: StepStats::default() }
    }

    fn min_step(t: f64) -> f64 {
        1e-13 * t.abs().max(1.0)
    }
}

const SAFETY: f64 = 0.9;

/// Integrate with the Dormand–Prince 5(4) pair; `record(i, t, y)` is called at
/// every grid point, including the first.
pub fn dormand_prince<S: System>(
    sys: &mut S,
    y0: &[Complex64],
    grid: &[f64],
    tol: Tolerances,
    mut record: impl FnMut(usize, f64, &[Complex64]),
) -> Result<StepStats> {
    check_grid(grid)?;
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    // fifth-order weights minus the embedded fourth-order weights
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];

    let n = y0.len();
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); n]; 7];
    let mut stage = vec![Complex64::new(0.0, 0.0); n];
    let mut y_new = vec![Complex64::new(0.0, 0.0); n];
    let mut err = vec![Complex64::new(0.0, 0.0); n];
    let mut drv = Driver::new(grid, tol);

    let mut t = grid[0];
    record(0, t, &y);
    sys.rhs(t, &y, &mut k[0])?;
    drv.stats.rhs_evaluations += 1;

    for (idx, &target) in drv.grid.iter().enumerate().skip(1) {
        while t < target {
            if drv.stats.accepted + drv.stats.rejected >= drv.tol.max_steps {
                return Err(Error::StepSize { t });
            }
            let mut h = drv.h.min(target - t);
            let hits = h >= target - t;
            if hits {
                h = target - t;
            }
            for s in 1..7 {
                let terms: Vec<(f64, &[Complex64])> =
                    (0..s).map(|j| (A[s][j], k[j].as_slice())).collect();
                axpy(&mut stage, &y, &terms, h);
                let (_, rest) = k.split_at_mut(s);
                sys.rhs(t + C[s] * h, &stage, &mut rest[0])?;
                drv.stats.rhs_evaluations += 1;
            }
            // stage 6 is the fifth-order solution (FSAL)
            y_new.copy_from_slice(&stage);
            for i in 0..n {
                let mut e = Complex64::new(0.0, 0.0);
                for s in 0..7 {
                    if E[s] != 0.0 {
                        e += k[s][i] * E[s];
                    }
                }
                err[i] = e * h;
            }
            let ratio = error_ratio(&y, &y_new, &err, &drv.tol);
            if ratio <= 1.0 {
                t = if hits { target } else { t + h };
                y.copy_from_slice(&y_new);
                sys.on_accept(t, &mut y);
                drv.stats.accepted += 1;
                let (first, rest) = k.split_at_mut(1);
                first[0].copy_from_slice(&rest[5]);
                if ratio > 0.0 {
                    let grow = (SAFETY * ratio.powf(-0.2)).clamp(0.2, 5.0);
                    if !hits || grow < 1.0 {
                        drv.h = h * grow;
                    }
                } else if !hits {
                    drv.h = h * 5.0;
                }
            } else {
                drv.stats.rejected += 1;
                drv.h = h * (SAFETY * ratio.powf(-0.25)).clamp(0.1, 0.9);
                if drv.h < Driver::min_step(t) {
                    return Err(Error::StepSize { t });
                }
            }
        }
        record(idx, t, &y);
    }
    Ok(drv.stats)
}

fn rk4_step<S: System>(
    sys: &mut S,
    t: f64,
    y: &[Complex64],
    f0: &[Complex64],
    h: f64,
    work: &mut [Vec<Complex64>; 4],
    out: &mut [Complex64],
) -> Result<()> {
    let [k2, k3, k4, stage] = work;
    axpy(stage, y, &[(0.5, f0)], h);
    sys.rhs(t + 0.5 * h, stage, k2)?;
    axpy(stage, y, &[(0.5, k2)], h);
    sys.rhs(t + 0.5 * h, stage, k3)?;
    axpy(stage, y, &[(1.0, k3)], h);
    sys.rhs(t + h, stage, k4)?;
    axpy(out, y, &[(1.0 / 6.0, f0), (1.0 / 3.0, k2), (1.0 / 3.0, k3), (1.0 / 6.0, k4)], h);
    Ok(())
}

/// Classical RK4 with step doubling: one step of size h is compared with two
/// of size h/2, and the Richardson-extrapolated result is kept.
pub fn rk4_step_doubling<S: System>(
    sys: &mut S,
    y0: &[Complex64],
    grid: &[f64],
    tol: Tolerances,
    mut record: impl FnMut(usize, f64, &[Complex64]),
) -> Result<StepStats> {
    check_grid(grid)?;
    let n = y0.len();
    let zeros = || vec![Complex64::new(0.0, 0.0); n];
    let mut y = y0.to_vec();
    let mut f0 = zeros();
    let mut f_mid = zeros();
    let mut full = zeros();
    let mut half = zeros();
    let mut two_half = zeros();
    let mut err = zeros();
    let mut work = [zeros(), zeros(), zeros(), zeros()];
    let mut drv = Driver::new(grid, tol);

    let mut t = grid[0];
    record(0, t, &y);
    sys.rhs(t, &y, &mut f0)?;
    drv.stats.rhs_evaluations += 1;

    for (idx, &target) in drv.grid.iter().enumerate().skip(1) {
        while t < target {
            if drv.stats.accepted + drv.stats.rejected >= drv.tol.max_steps {
                return Err(Error::StepSize { t });
            }
            let mut h = drv.h.min(target - t);
            let hits = h >= target - t;
            if hits {
                h = target - t;
            }
            rk4_step(sys, t, &y, &f0, h, &mut work, &mut full)?;
            rk4_step(sys, t, &y, &f0, 0.5 * h, &mut work, &mut half)?;
            sys.rhs(t + 0.5 * h, &half, &mut f_mid)?;
            rk4_step(sys, t + 0.5 * h, &half, &f_mid, 0.5 * h, &mut work, &mut two_half)?;
            drv.stats.rhs_evaluations += 10;
            for i in 0..n {
                err[i] = (two_half[i] - full[i]) / 15.0;
            }
            let ratio = error_ratio(&y, &two_half, &err, &drv.tol);
            if ratio <= 1.0 {
                t = if hits { target } else { t + h };
                for i in 0..n {
                    y[i] = two_half[i] + err[i];
                }
                sys.on_accept(t, &mut y);
                sys.rhs(t, &y, &mut f0)?;
                drv.stats.rhs_evaluations += 1;
                drv.stats.accepted += 1;
                let grow = if ratio > 0.0 { (SAFETY * ratio.powf(-0.2)).clamp(0.2, 4.0) } else { 4.0 };
                if !hits || grow < 1.0 {
                    drv.h = h * grow;
                }
            } else {
                drv.stats.rejected += 1;
                drv.h = h * (SAFETY * ratio.powf(-0.2)).clamp(0.1, 0.9);
                if drv.h < Driver::min_step(t) {
                    return Err(Error::StepSize { t });
                }
            }
        }
        record(idx, t, &y);
    }
    Ok(drv.stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// dy/dt = (iω − γ) y
    struct Decay {
        rate: Complex64,
    }

    impl System for Decay {
        fn rhs(&mut self, _t: f64, y: &[Complex64], dy: &mut [Complex64]) -> Result<()> {
            dy[0] = self.rate * y[0];
            Ok(())
        }
    }

    /// dy/dt = cos(t) y, exact y = exp(sin t)
    struct Driven;

    impl System for Driven {
        fn rhs(&mut self, t: f64, y: &[Complex64], dy: &mut [Complex64]) -> Result<()> {
            dy[0] = y[0] * t.cos();
            Ok(())
        }
    }

    fn grid(n: usize, t_end: f64) -> Vec<f64> {
        (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn dopri_matches_exponential() {
        let rate = Complex64::new(-0.1, 1.0);
        let g = grid(50, 20.0);
        let mut worst: f64 = 0.0;
        dormand_prince(&mut Decay { rate }, &[Complex64::new(1.0, 0.0)], &g, Tolerances::default(), |_, t, y| {
            worst = worst.max((y[0] - (rate * t).exp()).norm());
        })
        .unwrap();
        assert!(worst < 1e-9, "worst = {worst}");
    }

    #[test]
    fn rk4_doubling_matches_time_dependent_solution() {
        let g = grid(40, 10.0);
        let tol = Tolerances { rtol: 1e-9, atol: 1e-11, ..Tolerances::default() };
        let mut worst: f64 = 0.0;
        let stats = rk4_step_doubling(&mut Driven, &[Complex64::new(1.0, 0.0)], &g, tol, |_, t, y| {
            worst = worst.max((y[0].re - t.sin().exp()).abs());
        })
        .unwrap();
        assert!(worst < 1e-7, "worst = {worst}");
        assert!(stats.accepted > 0);
    }

    #[test]
    fn records_every_grid_point_exactly() {
        let g = vec![0.0, 0.3, 0.31, 2.0];
        let mut seen = vec![];
        dormand_prince(&mut Driven, &[Complex64::new(1.0, 0.0)], &g, Tolerances::default(), |i, t, _| {
            seen.push((i, t))
        })
        .unwrap();
        assert_eq!(seen, vec![(0, 0.0), (1, 0.3), (2, 0.31), (3, 2.0)]);
    }

    #[test]
    fn rejects_non_increasing_grid() {
        let r = rk4_step_doubling(&mut Driven, &[Complex64::new(1.0, 0.0)], &[0.0, 1.0, 1.0], Tolerances::default(), |_, _, _| {});
        assert!(r.is_err());
    }

    struct Blowup;

    impl System for Blowup {
        fn rhs(&mut self, _t: f64, y: &[Complex64], dy: &mut [Complex64]) -> Result<()> {
            dy[0] = y[0] * y[0] * 1e3;
            Ok(())
        }
    }

    #[test]
    fn unreachable_tolerance_reports_time() {
        let r = dormand_prince(&mut Blowup, &[Complex64::new(1.0, 0.0)], &[0.0, 1.0], Tolerances::default(), |_, _, _| {});
        match r {
            Err(Error::StepSize { t }) => assert!(t > 0.0 && t < 1.0e-2),
            other => panic!("expected step failure, got {other:?}"),
        }
    }
}
