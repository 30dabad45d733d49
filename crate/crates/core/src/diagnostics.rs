//! Residual norms, the right-edge marker p̃(t), drift-rate estimation and
//! convergence detection in the slowly drifting frame.
//!
//! On a finite cylinder the Neumann edge forces a slow global shift X*(t) of
//! the profile, so ‖∂ₜp‖ plateaus instead of vanishing. Convergence is
//! detected on the corrected residual ∂ₜp − ∂ₓp·dX*/dt, which does vanish
//! once the profile is steady in the frame x + X*(t).

use std::fmt;

use thiserror::Error;

use crate::grid::{GridSpec, PressureField};
use crate::solver::{Observer, StepContext};

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("dt must be positive, got {0}")]
    BadDt(f64),
    #[error("need at least {need} samples, have {have}")]
    InsufficientSamples { have: usize, need: usize },
}

/// Forward difference quotient (Pⁿ⁺¹ − Pⁿ)/dt, one value per unique node in
/// the same row-major layout as the fields.
pub fn residual_field(
    prev: &PressureField,
    next: &PressureField,
    dt: f64,
) -> Result<Vec<f64>, DiagnosticsError> {
    if prev.grid() != next.grid() {
        return Err(DiagnosticsError::GridMismatch);
    }
    if !(dt > 0.0) {
        return Err(DiagnosticsError::BadDt(dt));
    }
    Ok(prev
        .values()
        .iter()
        .zip(next.values())
        .map(|(a, b)| (b - a) / dt)
        .collect())
}

/// (L², L∞) norms of a nodal field. The L² sum uses half weights on the two
/// x-boundary columns so constant fields integrate to exactly x_max · 1.
pub fn norms(grid: &GridSpec, r: &[f64]) -> (f64, f64) {
    let n_x = grid.n_x();
    let mut sum = 0.0;
    let mut linf = 0.0f64;
    for (k, &v) in r.iter().enumerate() {
        let i = k % n_x;
        let w = if i == 0 || i == n_x - 1 { 0.5 } else { 1.0 };
        sum += w * v * v;
        let a = v.abs();
        if a > linf {
            linf = a;
        }
    }
    ((sum * grid.dx() * grid.dy()).sqrt(), linf)
}

/// Least-squares slope of p̃ over the trailing `window` samples, divided by
/// the wave speed c (the slope-equals-speed reading of the marker).
pub fn drift_rate(samples: &[(f64, f64)], c: f64, window: usize) -> Result<f64, DiagnosticsError> {
    let need = window.max(2);
    if samples.len() < need {
        return Err(DiagnosticsError::InsufficientSamples { have: samples.len(), need });
    }
    let tail = &samples[samples.len() - need..];
    let n = tail.len() as f64;
    let t_mean = tail.iter().map(|s| s.0).sum::<f64>() / n;
    let p_mean = tail.iter().map(|s| s.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for &(t, p) in tail {
        num += (t - t_mean) * (p - p_mean);
        den += (t - t_mean) * (t - t_mean);
    }
    Ok(num / den / c)
}

/// L∞ over interior columns of |(Pⁿ⁺¹ − Pⁿ)/dt − ΔₓPⁿ·drift|.
pub fn corrected_residual(
    prev: &PressureField,
    next: &PressureField,
    dt: f64,
    drift: f64,
) -> f64 {
    let g = prev.grid();
    let mut worst = 0.0f64;
    for j in 0..g.rows() {
        for i in 1..g.n_x() - 1 {
            let r = (next.at(i, j) - prev.at(i, j)) / dt - prev.ddx_centered(i, j) * drift;
            let a = r.abs();
            if a > worst {
                worst = a;
            }
        }
    }
    worst
}

/// One sampled diagnostics row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub t: f64,
    pub l2: f64,
    pub linf: f64,
    pub drift_rate: f64,
    pub e_corr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Converged,
    DriftingConverged,
    NotConverged,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Converged => "converged",
            Verdict::DriftingConverged => "drifting-converged",
            Verdict::NotConverged => "not-converged",
        })
    }
}

/// Classify a residual history.
///
/// `converged` when the last uncorrected L∞ residual is below `abs_tol`;
/// `drifting-converged` when e_corr dropped by at least `factor` across the
/// trailing `window` reports while L∞ plateaued (relative change < 20%);
/// `not-converged` otherwise (including histories shorter than 2·window).
pub fn convergence_monitor(
    reports: &[ResidualReport],
    window: usize,
    factor: f64,
    abs_tol: f64,
) -> Verdict {
    let Some(last) = reports.last() else {
        return Verdict::NotConverged;
    };
    if last.linf < abs_tol {
        return Verdict::Converged;
    }
    let window = window.max(1);
    if reports.len() < 2 * window {
        return Verdict::NotConverged;
    }
    let past = &reports[reports.len() - 1 - window];
    let dropped = last.e_corr * factor <= past.e_corr;
    let plateaued = (last.linf - past.linf).abs() < 0.2 * past.linf.abs().max(f64::MIN_POSITIVE);
    if dropped && plateaued {
        Verdict::DriftingConverged
    } else {
        Verdict::NotConverged
    }
}

/// Trailing-window drift estimator fed by the marker p̃(t) = p(t, x_max, y₀).
///
/// No drift is reported until a full window of samples exists (the fit
/// contract in [`drift_rate`] is strict), so early corrected residuals
/// coincide with the uncorrected ones.
#[derive(Debug, Clone)]
pub struct DriftTracker {
    marker_row: usize,
    window: usize,
    samples: Vec<(f64, f64)>,
}

impl DriftTracker {
    pub fn new(marker_row: usize, window: usize) -> Self {
        Self { marker_row, window: window.max(2), samples: Vec::new() }
    }

    pub fn record(&mut self, t: f64, field: &PressureField) {
        let v = field.at(field.grid().n_x() - 1, self.marker_row);
        self.samples.push((t, v));
    }

    pub fn rate(&self, c: f64) -> f64 {
        drift_rate(&self.samples, c, self.window).unwrap_or(0.0)
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }
}

/// Observer that samples residual diagnostics on a fixed time cadence.
///
/// Samples are spaced at least `interval` apart in time and at least
/// `MIN_STEP_GAP` solver steps apart, so the marker series stays well
/// separated for the drift fit.
pub struct DiagnosticsCollector {
    c: f64,
    interval: f64,
    tracker: DriftTracker,
    pub reports: Vec<ResidualReport>,
    next_t: f64,
    last_step: Option<usize>,
}

impl DiagnosticsCollector {
    const MIN_STEP_GAP: usize = 10;

    pub fn new(c: f64, interval: f64, marker_row: usize, drift_window: usize) -> Self {
        Self {
            c,
            interval,
            tracker: DriftTracker::new(marker_row, drift_window),
            reports: Vec::new(),
            next_t: interval,
            last_step: None,
        }
    }

    pub fn tracker(&self) -> &DriftTracker {
        &self.tracker
    }
}

impl Observer for DiagnosticsCollector {
    fn observe(&mut self, ctx: &StepContext<'_>) {
        let t = ctx.record.t;
        if t < self.next_t {
            return;
        }
        if let Some(last) = self.last_step {
            if ctx.record.n - last < Self::MIN_STEP_GAP {
                return;
            }
        }
        self.tracker.record(t, ctx.next);
        let drift = self.tracker.rate(self.c);
        let r = residual_field(ctx.prev, ctx.next, ctx.record.dt)
            .expect("solver hands matching grids to observers");
        let (l2, linf) = norms(ctx.prev.grid(), &r);
        let e_corr = corrected_residual(ctx.prev, ctx.next, ctx.record.dt, drift);
        self.reports.push(ResidualReport { t, l2, linf, drift_rate: drift, e_corr });
        self.last_step = Some(ctx.record.n);
        while self.next_t <= t {
            self.next_t += self.interval;
        }
    }
}
