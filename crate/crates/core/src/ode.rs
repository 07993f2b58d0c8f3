//! Adaptive Dormand-Prince 5(4) integration over flat complex state arrays.
//!
//! States are plain `&[Complex64]` slices; pure states flatten to their
//! amplitude vector and density matrices to their column-major entries, so
//! one integrator serves both. Steps are clamped to land exactly on the
//! requested sample times.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: u64,
    pub initial_step: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { atol: 1e-10, rtol: 1e-10, max_steps: 20_000_000, initial_step: None }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct StepStats {
    pub accepted: u64,
    pub rejected: u64,
    pub rhs_evals: u64,
    pub min_step: f64,
    pub max_step: f64,
    /// Largest accepted weighted error estimate.
    pub max_error: f64,
}

impl StepStats {
    fn new() -> Self {
        StepStats {
            accepted: 0,
            rejected: 0,
            rhs_evals: 0,
            min_step: f64::INFINITY,
            max_step: 0.0,
            max_error: 0.0,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] =
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const C: [f64; 5] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0];

fn combine(y: &[C64], ks: &[&Vec<C64>], coeffs: &[f64], h: f64, out: &mut [C64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (k, &c) in ks.iter().zip(coeffs) {
            if c != 0.0 {
                acc += k[i] * c;
            }
        }
        *o = y[i] + acc * h;
    }
}

/// Integrate `y' = rhs(t, y)` from `samples[0]`, invoking `on_sample` at every
/// sample time. `post_accept` runs after each accepted step (used to
/// re-Hermitize density matrices); it must only apply rounding-level
/// corrections. `on_sample` may return `Ok(false)` to stop early.
pub fn integrate_with_post<F, P, O>(
    mut rhs: F,
    y0: Vec<C64>,
    samples: &[f64],
    opts: &OdeOptions,
    mut post_accept: P,
    mut on_sample: O,
) -> Result<StepStats>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    P: FnMut(&mut [C64]),
    O: FnMut(usize, f64, &[C64]) -> Result<bool>,
{
    if samples.is_empty() {
        return Err(Error::InvalidParameter("empty sample grid".into()));
    }
    if samples.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("sample times must increase strictly".into()));
    }
    let mut stats = StepStats::new();
    let n = y0.len();
    let mut t = samples[0];
    let mut y = y0;
    if !on_sample(0, t, &y)? {
        return Ok(stats);
    }
    if samples.len() == 1 {
        return Ok(stats);
    }
    let span = samples[samples.len() - 1] - t;

    let mut k: Vec<Vec<C64>> = (0..7).map(|_| vec![C64::new(0.0, 0.0); n]).collect();
    let mut y_stage = vec![C64::new(0.0, 0.0); n];
    let mut y_new = vec![C64::new(0.0, 0.0); n];

    rhs(t, &y, &mut k[0]);
    stats.rhs_evals += 1;

    // Starting step from the usual magnitude heuristic.
    let weight = |yi: C64| opts.atol + opts.rtol * yi.norm();
    let mut h = opts.initial_step.unwrap_or_else(|| {
        let d0 = (y.iter().map(|&v| (v.norm() / weight(v)).powi(2)).sum::<f64>() / n as f64)
            .sqrt();
        let d1 = (y
            .iter()
            .zip(&k[0])
            .map(|(&v, f)| (f.norm() / weight(v)).powi(2))
            .sum::<f64>()
            / n as f64)
            .sqrt();
        if d0 < 1e-10 || d1 < 1e-10 {
            1e-6 * span
        } else {
            (0.01 * d0 / d1).min(span / 10.0)
        }
    });

    for (sample_idx, &target) in samples.iter().enumerate().skip(1) {
        while t < target {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(Error::StepBudgetExceeded { t });
            }
            let mut clamped = false;
            if t + h >= target {
                h = target - t;
                clamped = true;
            }
            if h < 1e-14 * t.abs().max(1.0) {
                if clamped {
                    // A zero-width remainder to the target: accept as arrived.
                    t = target;
                    break;
                }
                return Err(Error::StepSizeUnderflow { t, h });
            }

            // Stages 2..6 plus the 5th-order solution and its FSAL stage.
            combine(&y, &[&k[0]], &A2, h, &mut y_stage);
            rhs(t + C[0] * h, &y_stage, &mut k[1]);
            combine(&y, &[&k[0], &k[1]], &A3, h, &mut y_stage);
            rhs(t + C[1] * h, &y_stage, &mut k[2]);
            combine(&y, &[&k[0], &k[1], &k[2]], &A4, h, &mut y_stage);
            rhs(t + C[2] * h, &y_stage, &mut k[3]);
            combine(&y, &[&k[0], &k[1], &k[2], &k[3]], &A5, h, &mut y_stage);
            rhs(t + C[3] * h, &y_stage, &mut k[4]);
            combine(&y, &[&k[0], &k[1], &k[2], &k[3], &k[4]], &A6, h, &mut y_stage);
            rhs(t + C[4] * h, &y_stage, &mut k[5]);
            combine(&y, &[&k[0], &k[1], &k[2], &k[3], &k[4], &k[5]], &B, h, &mut y_new);
            rhs(t + h, &y_new, &mut k[6]);
            stats.rhs_evals += 6;

            // Weighted RMS of the embedded 4th/5th order difference, per unit
            // step, so the accumulated error over a span stays near span*tol.
            let mut err_acc = 0.0;
            for i in 0..n {
                let mut e = C64::new(0.0, 0.0);
                for (kj, &c) in k.iter().zip(&E) {
                    if c != 0.0 {
                        e += kj[i] * c;
                    }
                }
                let sc = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
                err_acc += (e.norm() / sc).powi(2);
            }
            let err_raw = (err_acc / n as f64).sqrt();
            // Overflowing stages read as an infinitely bad step.
            let err = if err_raw.is_finite() { err_raw } else { f64::INFINITY };

            let fac = if err > 0.0 { 0.9 * err.powf(-0.25) } else { 5.0 };
            if err <= 1.0 {
                t += h;
                std::mem::swap(&mut y, &mut y_new);
                post_accept(&mut y);
                k.swap(0, 6); // FSAL
                stats.accepted += 1;
                stats.min_step = stats.min_step.min(h);
                stats.max_step = stats.max_step.max(h);
                stats.max_error = stats.max_error.max(err);
                h *= fac.clamp(0.2, 5.0);
            } else {
                stats.rejected += 1;
                h *= fac.clamp(0.1, 1.0);
                // The rejected y_new invalidated nothing; k[0] still holds
                // f(t, y).
            }
        }
        if !on_sample(sample_idx, t, &y)? {
            return Ok(stats);
        }
    }
    Ok(stats)
}

/// [`integrate_with_post`] without a post-step hook.
pub fn integrate<F, O>(
    rhs: F,
    y0: Vec<C64>,
    samples: &[f64],
    opts: &OdeOptions,
    on_sample: O,
) -> Result<StepStats>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    O: FnMut(usize, f64, &[C64]) -> Result<bool>,
{
    integrate_with_post(rhs, y0, samples, opts, |_| {}, on_sample)
}
