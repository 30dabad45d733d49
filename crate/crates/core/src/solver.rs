//! Explicit solver for the pressure equation in the traveling frame,
//!
//!   ∂ₜp − m·p·Δp + (c + α(y))·∂ₓp = |∇p|²,
//!
//! advanced with an adaptive CFL time step, homogeneous Dirichlet data on the
//! left edge, the slope-equals-speed Neumann condition ∂ₓp = c on the right
//! edge, and a positivity clamp that is a no-op whenever the step respects
//! the CFL bound.

use thiserror::Error;

use crate::flow::FlowProfile;
use crate::grid::{GridSpec, PressureField};

/// Relative shave applied to the CFL bound so that accumulated floating-point
/// rounding cannot push a node negative when stepping exactly at the bound.
const CFL_SHAVE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum StepError {
    #[error("dt={dt} exceeds the CFL bound {bound}")]
    CflExceeded { dt: f64, bound: f64 },
    #[error("dt must be positive and finite, got {0}")]
    BadDt(f64),
    #[error("non-finite value at node ({i},{j})")]
    NonFinite { i: usize, j: usize },
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("config: {0}")]
    Config(String),
    #[error("step {n} (t={t}): {source}")]
    Step {
        n: usize,
        t: f64,
        #[source]
        source: StepError,
    },
}

/// Physics and run parameters for one Cauchy evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Diffusion exponent m > 0 of the degenerate term m·p·Δp.
    pub m: f64,
    /// Wave speed; must exceed the flow's critical speed and be positive.
    pub c: f64,
    /// Initial interface shift τ ∈ (0, x_max); the datum is c·[x − τ]⁺.
    pub tau: f64,
    /// Final time; the run stops at the first t ≥ t_max.
    pub t_max: f64,
    /// Fraction of the CFL bound used per step, in (0, 1].
    pub cfl_safety: f64,
    /// Requested snapshot output times (consumed by observers).
    pub snapshot_times: Vec<f64>,
}

impl SolverConfig {
    pub fn validate(&self, grid: &GridSpec, flow: &FlowProfile) -> Result<(), SolverError> {
        let err = |msg: String| Err(SolverError::Config(msg));
        if !(self.m > 0.0) || !self.m.is_finite() {
            return err(format!("m must be positive, got {}", self.m));
        }
        if !(self.c > 0.0) || !self.c.is_finite() {
            return err(format!("c must be positive, got {}", self.c));
        }
        let c_star = flow.critical_speed();
        if self.c <= c_star {
            return err(format!(
                "c={} is not admissible for flow `{}`: need c > c* = {}",
                self.c,
                flow.name(),
                c_star
            ));
        }
        if !(self.tau > 0.0 && self.tau < grid.x_max()) {
            return err(format!(
                "tau={} must lie strictly inside (0, {})",
                self.tau,
                grid.x_max()
            ));
        }
        if !(self.t_max >= 0.0) || !self.t_max.is_finite() {
            return err(format!("t_max must be nonnegative, got {}", self.t_max));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return err(format!("cfl_safety={} must lie in (0, 1]", self.cfl_safety));
        }
        Ok(())
    }
}

/// Per-step log entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub n: usize,
    pub t: f64,
    pub dt: f64,
    pub max_p: f64,
    pub clamp_count: usize,
}

/// What a single step reports back to the caller.
#[derive(Debug, Clone, Copy)]
pub struct StepStats {
    pub max_p: f64,
    /// Nodes that went negative before the clamp; zero under the CFL bound.
    pub clamp_count: usize,
}

/// Initial datum P⁰ = c·[x − τ]⁺, independent of y.
pub fn initial_datum(grid: &GridSpec, cfg: &SolverConfig) -> PressureField {
    let (c, tau) = (cfg.c, cfg.tau);
    PressureField::from_fn(*grid, |x, _| c * (x - tau).max(0.0))
}

/// The stability bound on dt:
/// 1 / [2(1/dx² + 1/dy²)·m·max P + (c + ‖α‖∞)/dx], shaved by one part in
/// 10¹² (see [`CFL_SHAVE`]). Strictly positive even when max P = 0 because
/// c > 0 keeps the advection term in the denominator.
fn cfl_bound(p: &PressureField, cfg: &SolverConfig, flow: &FlowProfile) -> f64 {
    let g = p.grid();
    let inv_sq = 1.0 / (g.dx() * g.dx()) + 1.0 / (g.dy() * g.dy());
    let denom = 2.0 * inv_sq * cfg.m * p.max_value() + (cfg.c + flow.sup_norm()) / g.dx();
    (1.0 / denom) * (1.0 - CFL_SHAVE)
}

/// The time step actually used: `cfl_safety` times the stability bound.
pub fn cfl_dt(p: &PressureField, cfg: &SolverConfig, flow: &FlowProfile) -> f64 {
    cfg.cfl_safety * cfl_bound(p, cfg, flow)
}

/// One fully explicit update of the interior followed by the Dirichlet and
/// Neumann boundary columns and the positivity clamp, in that order.
///
/// Rejects `dt` above the CFL bound (a contract violation) and reports any
/// non-finite node as fatal.
pub fn step(
    p: &PressureField,
    cfg: &SolverConfig,
    flow: &FlowProfile,
    dt: f64,
) -> Result<(PressureField, StepStats), StepError> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(StepError::BadDt(dt));
    }
    let bound = cfl_bound(p, cfg, flow);
    if dt > bound {
        return Err(StepError::CflExceeded { dt, bound });
    }

    let g = *p.grid();
    let n_x = g.n_x();
    let rows = g.rows();
    let alpha: Vec<f64> = (0..rows).map(|j| flow.eval(g.y(j))).collect();

    let mut next = p.clone();
    for j in 0..rows {
        let a = cfg.c + alpha[j];
        for i in 1..n_x - 1 {
            let pij = p.at(i, j);
            let lap = p.d2dx2(i, j) + p.d2dy2(i, j);
            let gx = p.ddx_centered(i, j);
            let gy = p.ddy_centered(i, j);
            let v = pij + dt * (cfg.m * pij * lap - a * p.ddx_backward(i, j) + (gx * gx + gy * gy));
            next.set(i, j, v);
        }
    }
    for j in 0..rows {
        next.set(0, j, 0.0);
        let v = next.at(n_x - 2, j) + cfg.c * g.dx();
        next.set(n_x - 1, j, v);
    }

    let mut clamp_count = 0usize;
    let mut max_p = 0.0f64;
    let mut bad = None;
    for (k, v) in next.values_mut().iter_mut().enumerate() {
        if !v.is_finite() {
            bad = Some(k);
            break;
        }
        if *v < 0.0 {
            *v = 0.0;
            clamp_count += 1;
        }
        if *v > max_p {
            max_p = *v;
        }
    }
    if let Some(k) = bad {
        return Err(StepError::NonFinite { i: k % n_x, j: k / n_x });
    }
    Ok((next, StepStats { max_p, clamp_count }))
}

/// Everything an observer may inspect after a completed step.
pub struct StepContext<'a> {
    pub record: &'a StepRecord,
    pub prev: &'a PressureField,
    pub next: &'a PressureField,
}

/// Callback invoked between steps (single-threaded, read-only).
pub trait Observer {
    fn observe(&mut self, ctx: &StepContext<'_>);
}

impl<F: FnMut(&StepContext<'_>)> Observer for F {
    fn observe(&mut self, ctx: &StepContext<'_>) {
        self(ctx)
    }
}

/// Observer that does nothing.
pub struct NullObserver;

impl Observer for NullObserver {
    fn observe(&mut self, _ctx: &StepContext<'_>) {}
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub field: PressureField,
    pub records: Vec<StepRecord>,
    pub warnings: Vec<String>,
}

/// Advance the Cauchy problem from the planar datum to the first t ≥ t_max.
///
/// The last step is not shortened to land on t_max exactly (the dynamics is
/// autonomous; diagnostics interpolate in time where needed). Deterministic:
/// identical inputs produce bitwise identical output fields.
pub fn run(
    grid: &GridSpec,
    cfg: &SolverConfig,
    flow: &FlowProfile,
    observer: &mut dyn Observer,
) -> Result<RunOutput, SolverError> {
    cfg.validate(grid, flow)?;
    let mut field = initial_datum(grid, cfg);
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    let mut warned_left = false;
    let mut t = 0.0;
    let mut n = 0usize;
    while t < cfg.t_max {
        let dt = cfl_dt(&field, cfg, flow);
        let (next, stats) =
            step(&field, cfg, flow, dt).map_err(|source| SolverError::Step { n, t, source })?;
        n += 1;
        t += dt;
        let record = StepRecord {
            n,
            t,
            dt,
            max_p: stats.max_p,
            clamp_count: stats.clamp_count,
        };
        observer.observe(&StepContext { record: &record, prev: &field, next: &next });
        if !warned_left && (0..grid.rows()).any(|j| next.at(1, j) > 0.0) {
            warnings.push(format!(
                "positivity set reached the left boundary collar at t={t:.6}; \
                 the Dirichlet edge may now distort the wave"
            ));
            warned_left = true;
        }
        records.push(record);
        field = next;
    }
    Ok(RunOutput { field, records, warnings })
}
