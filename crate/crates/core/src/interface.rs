//! Free-boundary analysis of a (near-)stationary pressure field.
//!
//! The one-sided gradient jump across the interface turns into a spike of
//! the discrete ∂²ₓₓp, which is what the row-wise detector locates. The
//! ε-levelset descent measures the one-sided slope and the ε-scaled second
//! derivatives along {p = ε}, the forcing g(y) = (c + α(y))/f(y) − 1 feeds
//! the eikonal equation |∂ᵧI|² = g obeyed by the interface graph, and the
//! corner classifier applies its zero-counting criterion: a maximum of I
//! where g stays bounded away from zero cannot be differentiable there.

use thiserror::Error;

use crate::flow::FlowProfile;
use crate::grid::{GridSpec, PressureField};

#[derive(Debug, Error)]
pub enum InterfaceError {
    #[error("row {row}: interface column {column} leaves no room for the offset-{s} slope probe")]
    SlopeOutOfRange { row: usize, column: usize, s: usize },
    #[error("levelset {eps} reaches no node in any row")]
    EmptyLevelset { eps: f64 },
    #[error("levelset {eps} missing in row {row}, cannot estimate the limiting slope")]
    MissingRow { eps: f64, row: usize },
    #[error("levelset ladder is empty")]
    EmptyLadder,
    #[error("nonpositive slope {slope} at row {row}: forcing undefined")]
    NonpositiveSlope { row: usize, slope: f64 },
    #[error("epsilon must be positive, got {0}")]
    BadEpsilon(f64),
}

/// Per-row interface columns and x-locations.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfacePositions {
    pub columns: Vec<usize>,
    pub xs: Vec<f64>,
}

/// Locate the interface row by row as the interior argmax of ∂²ₓₓp,
/// ties broken toward the smallest column (the cold side).
pub fn detect_interface(p: &PressureField) -> InterfacePositions {
    let g = p.grid();
    let mut columns = Vec::with_capacity(g.rows());
    let mut xs = Vec::with_capacity(g.rows());
    for j in 0..g.rows() {
        let mut best_i = 1usize;
        let mut best = f64::NEG_INFINITY;
        for i in 1..g.n_x() - 1 {
            let v = p.d2dx2(i, j);
            if v > best {
                best = v;
                best_i = i;
            }
        }
        columns.push(best_i);
        xs.push(g.x(best_i));
    }
    InterfacePositions { columns, xs }
}

/// One-sided slope s cells into the hot side of each detected column:
/// (P(i₀+s+1, j) − P(i₀+s, j))/dx.
pub fn slope_at_interface(
    p: &PressureField,
    pos: &InterfacePositions,
    s: usize,
) -> Result<Vec<f64>, InterfaceError> {
    let g = p.grid();
    let mut slopes = Vec::with_capacity(pos.columns.len());
    for (j, &i0) in pos.columns.iter().enumerate() {
        let probe = i0 + s + 1;
        if probe >= g.n_x() {
            return Err(InterfaceError::SlopeOutOfRange { row: j, column: i0, s });
        }
        slopes.push((p.at(probe, j) - p.at(probe - 1, j)) / g.dx());
    }
    Ok(slopes)
}

/// Detected interface with the offset-s slope per row.
#[derive(Debug, Clone)]
pub struct InterfaceTrace {
    pub positions: InterfacePositions,
    pub slopes: Vec<f64>,
    pub s: usize,
    /// Rows whose detected column sits within s+2 cells of an x-boundary,
    /// where the boundary layer contaminates the slope probe.
    pub boundary_rows: Vec<usize>,
}

impl InterfaceTrace {
    pub fn compute(p: &PressureField, s: usize) -> Result<Self, InterfaceError> {
        let g = p.grid();
        let positions = detect_interface(p);
        let slopes = slope_at_interface(p, &positions, s)?;
        let margin = s + 2;
        let boundary_rows = positions
            .columns
            .iter()
            .enumerate()
            .filter(|&(_, &i0)| i0 < margin || g.n_x() - 1 - i0 < margin)
            .map(|(j, _)| j)
            .collect();
        Ok(Self { positions, slopes, s, boundary_rows })
    }

    pub fn min_slope(&self) -> f64 {
        self.slopes.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Nondegeneracy check: every row's slope stays above the threshold.
    pub fn is_nondegenerate(&self, threshold: f64) -> bool {
        self.min_slope() >= threshold
    }
}

/// Per-row column of the ε-levelset: the smallest i with P(i,j) ≥ ε.
pub fn levelset_trace(p: &PressureField, eps: f64) -> Result<Vec<Option<usize>>, InterfaceError> {
    if !(eps > 0.0) {
        return Err(InterfaceError::BadEpsilon(eps));
    }
    let g = p.grid();
    Ok((0..g.rows())
        .map(|j| (0..g.n_x()).find(|&i| p.at(i, j) >= eps))
        .collect())
}

/// Stencil values measured at a levelset column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelsetDerivs {
    pub px: f64,
    pub pxx: f64,
    pub pxy: f64,
}

/// Centered ∂ₓ, ∂²ₓₓ and the cross stencil at each levelset column; rows
/// whose column is missing or boundary-adjacent come back as `None`.
pub fn levelset_derivatives(
    p: &PressureField,
    columns: &[Option<usize>],
) -> Vec<Option<LevelsetDerivs>> {
    let g = p.grid();
    columns
        .iter()
        .enumerate()
        .map(|(j, col)| {
            let i = (*col)?;
            if i < 1 || i + 1 >= g.n_x() {
                return None;
            }
            Some(LevelsetDerivs {
                px: p.ddx_centered(i, j),
                pxx: p.d2dx2(i, j),
                pxy: p.d2dxdy(i, j),
            })
        })
        .collect()
}

/// Geometric ladder of `count` values from `eps_max` down to `eps_min`,
/// truncated at `floor` (levelsets below the floor sit inside the numerical
/// boundary layer and their stencils are unreliable).
pub fn geometric_ladder(eps_max: f64, eps_min: f64, count: usize, floor: f64) -> Vec<f64> {
    assert!(eps_max > eps_min && eps_min > 0.0 && count >= 2);
    let ratio = (eps_min / eps_max).powf(1.0 / (count - 1) as f64);
    (0..count)
        .map(|k| eps_max * ratio.powi(k as i32))
        .filter(|&e| e >= floor * (1.0 - 1e-12))
        .collect()
}

/// Measurements along one ladder rung.
#[derive(Debug, Clone)]
pub struct LevelsetRung {
    pub eps: f64,
    /// Per-row (column, x, px, ε·|pxx|, ε·|pxy|); None where missing.
    pub rows: Vec<Option<LevelsetRow>>,
    pub sup_eps_pxx: f64,
    pub sup_eps_pxy: f64,
    pub min_px: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct LevelsetRow {
    pub column: usize,
    pub x: f64,
    pub px: f64,
    pub eps_pxx: f64,
    pub eps_pxy: f64,
}

/// Knobs for the levelset verdicts.
#[derive(Debug, Clone, Copy)]
pub struct LevelsetOptions {
    /// Slope floor: min ∂ₓp on every rung must stay at or above this.
    pub min_slope: f64,
    /// How many upper rungs must decrease strictly for the curvature verdict.
    pub strict_rungs: usize,
    /// Values at or below this count as already vanished (strictness not
    /// required between such rungs).
    pub curvature_floor: f64,
}

/// The ε-descent report: per-rung measurements, the limiting slope estimate
/// f(y) from the smallest rung, the induced forcing g(y), and the two
/// hypothesis verdicts the regularity analysis relies on.
#[derive(Debug, Clone)]
pub struct LevelsetReport {
    pub rungs: Vec<LevelsetRung>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    /// ε-scaled second derivatives decay along the descent.
    pub curvature_vanishes: bool,
    /// min ∂ₓp stays above the slope floor on every rung.
    pub slope_bounded_below: bool,
}

/// Walk the ladder, measure every rung, and issue the two verdicts.
pub fn levelset_report(
    p: &PressureField,
    ladder: &[f64],
    flow: &FlowProfile,
    c: f64,
    opts: &LevelsetOptions,
) -> Result<LevelsetReport, InterfaceError> {
    if ladder.is_empty() {
        return Err(InterfaceError::EmptyLadder);
    }
    let g = p.grid();
    let mut rungs = Vec::with_capacity(ladder.len());
    for &eps in ladder {
        let cols = levelset_trace(p, eps)?;
        let derivs = levelset_derivatives(p, &cols);
        let mut rows = Vec::with_capacity(g.rows());
        let mut sup_pxx = 0.0f64;
        let mut sup_pxy = 0.0f64;
        let mut min_px = f64::INFINITY;
        let mut any = false;
        for (j, d) in derivs.iter().enumerate() {
            match (cols[j], d) {
                (Some(col), Some(d)) => {
                    any = true;
                    let row = LevelsetRow {
                        column: col,
                        x: g.x(col),
                        px: d.px,
                        eps_pxx: eps * d.pxx.abs(),
                        eps_pxy: eps * d.pxy.abs(),
                    };
                    sup_pxx = sup_pxx.max(row.eps_pxx);
                    sup_pxy = sup_pxy.max(row.eps_pxy);
                    min_px = min_px.min(row.px);
                    rows.push(Some(row));
                }
                _ => rows.push(None),
            }
        }
        if !any {
            return Err(InterfaceError::EmptyLevelset { eps });
        }
        rungs.push(LevelsetRung { eps, rows, sup_eps_pxx: sup_pxx, sup_eps_pxy: sup_pxy, min_px });
    }

    // Limiting slope from the smallest reliable rung; every row must be
    // present there.
    let last = rungs.last().expect("ladder checked nonempty");
    let mut f = Vec::with_capacity(g.rows());
    for (j, row) in last.rows.iter().enumerate() {
        match row {
            Some(r) => f.push(r.px),
            None => return Err(InterfaceError::MissingRow { eps: last.eps, row: j }),
        }
    }
    let g_forcing = hj_forcing(&f, g, flow, c)?;

    let strict = opts.strict_rungs.min(rungs.len());
    let decays = |get: fn(&LevelsetRung) -> f64| {
        (0..strict.saturating_sub(1)).all(|k| {
            let (a, b) = (get(&rungs[k]), get(&rungs[k + 1]));
            b < a || a.max(b) <= opts.curvature_floor
        })
    };
    let curvature_vanishes = decays(|r| r.sup_eps_pxx) && decays(|r| r.sup_eps_pxy);
    let slope_bounded_below = rungs.iter().all(|r| r.min_px >= opts.min_slope);

    Ok(LevelsetReport { rungs, f, g: g_forcing, curvature_vanishes, slope_bounded_below })
}

/// Forcing g(y_j) = (c + α(y_j))/f(y_j) − 1 of the interface eikonal
/// equation, from any per-row slope estimate f.
pub fn hj_forcing(
    f: &[f64],
    grid: &GridSpec,
    flow: &FlowProfile,
    c: f64,
) -> Result<Vec<f64>, InterfaceError> {
    f.iter()
        .enumerate()
        .map(|(j, &fj)| {
            if fj > 0.0 {
                Ok((c + flow.eval(grid.y(j))) / fj - 1.0)
            } else {
                Err(InterfaceError::NonpositiveSlope { row: j, slope: fj })
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CornerVerdict {
    Corner,
    Smooth,
    Inconclusive,
}

impl std::fmt::Display for CornerVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CornerVerdict::Corner => "corner",
            CornerVerdict::Smooth => "smooth",
            CornerVerdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CornerThresholds {
    /// Half-width (in rows) of the neighbourhood scanned around each maximum.
    pub window: usize,
    /// A maximum is a corner when min g over its neighbourhood > kappa·max g.
    pub kappa: f64,
    /// Fraction of max g below which g counts as vanished.
    pub zero_tol_frac: f64,
}

impl Default for CornerThresholds {
    fn default() -> Self {
        Self { window: 5, kappa: 0.1, zero_tol_frac: 0.02 }
    }
}

/// One local maximum of the interface parametrization and its verdict.
#[derive(Debug, Clone, Copy)]
pub struct MaximumReport {
    /// Representative row (centre of the merged plateau).
    pub row: usize,
    pub y: f64,
    pub x: f64,
    /// min g over the plateau extended by ±window rows.
    pub g_min: f64,
    pub verdict: CornerVerdict,
}

#[derive(Debug, Clone)]
pub struct CornerReport {
    /// y-locations (group centres) where g drops to the zero tolerance.
    pub zeros_of_g: Vec<f64>,
    pub maxima: Vec<MaximumReport>,
    pub g_max: f64,
    pub zero_tol: f64,
}

impl CornerReport {
    pub fn corner_count(&self) -> usize {
        self.maxima.iter().filter(|m| m.verdict == CornerVerdict::Corner).count()
    }
}

/// Classify the local maxima of the interface (periodic comparison with
/// plateau merging) by the behaviour of g nearby: forcing bounded away from
/// zero around a maximum forces a corner there; forcing that dips to zero
/// admits a smooth cap; anything in between is inconclusive.
pub fn classify_corners(
    positions: &InterfacePositions,
    g_values: &[f64],
    grid: &GridSpec,
    th: &CornerThresholds,
) -> CornerReport {
    assert_eq!(positions.columns.len(), g_values.len());
    let rows = positions.columns.len();
    let g_max = g_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let zero_tol = th.zero_tol_frac * g_max.max(0.0);

    // Contiguous groups of rows where g is at the zero tolerance.
    let mut zeros_of_g = Vec::new();
    if g_max > 0.0 {
        let low: Vec<bool> = g_values.iter().map(|&v| v <= zero_tol).collect();
        let mut visited = vec![false; rows];
        for start in 0..rows {
            if !low[start] || visited[start] {
                continue;
            }
            // Walk the periodic group containing `start`.
            let mut members = vec![start];
            visited[start] = true;
            let mut k = (start + 1) % rows;
            while low[k] && !visited[k] {
                visited[k] = true;
                members.push(k);
                k = (k + 1) % rows;
            }
            let mut k = (start + rows - 1) % rows;
            while low[k] && !visited[k] {
                visited[k] = true;
                members.insert(0, k);
                k = (k + rows - 1) % rows;
            }
            zeros_of_g.push(grid.y(members[members.len() / 2]));
        }
    }

    // Plateau-merged segments of the periodic column sequence.
    let cols = &positions.columns;
    let all_equal = cols.iter().all(|&v| v == cols[0]);
    let mut maxima = Vec::new();
    if !all_equal {
        let mut segments: Vec<(usize, usize, usize)> = Vec::new(); // (start, len, value)
        let mut k = 0usize;
        while k < rows {
            let v = cols[k];
            let mut len = 1usize;
            while k + len < rows && cols[k + len] == v {
                len += 1;
            }
            segments.push((k, len, v));
            k += len;
        }
        // Merge a wrap-around plateau split across the seam.
        if segments.len() > 1 && segments[0].2 == segments.last().unwrap().2 {
            let last = segments.pop().unwrap();
            segments[0] = (last.0, last.1 + segments[0].1, segments[0].2);
        }
        let n_seg = segments.len();
        for (si, &(start, len, value)) in segments.iter().enumerate() {
            let prev = segments[(si + n_seg - 1) % n_seg].2;
            let next = segments[(si + 1) % n_seg].2;
            if !(value > prev && value > next) {
                continue;
            }
            let mid = (start + len / 2) % rows;
            let mut g_min = f64::INFINITY;
            for off in 0..len + 2 * th.window {
                let j = (start + rows - th.window % rows + off) % rows;
                g_min = g_min.min(g_values[j]);
            }
            let verdict = if g_max <= 0.0 || g_min <= zero_tol {
                CornerVerdict::Smooth
            } else if g_min >= th.kappa * g_max {
                CornerVerdict::Corner
            } else {
                CornerVerdict::Inconclusive
            };
            maxima.push(MaximumReport {
                row: mid,
                y: grid.y(mid),
                x: grid.x(value),
                g_min,
                verdict,
            });
        }
    }

    CornerReport { zeros_of_g, maxima, g_max, zero_tol }
}

/// Squared centered y-derivative of the interface graph, with a widened
/// stencil (±halfwidth rows) to average out the one-cell quantization of
/// the detected positions.
pub fn interface_gradient_sq(xs: &[f64], dy: f64, halfwidth: usize) -> Vec<f64> {
    let rows = xs.len();
    let k = halfwidth.max(1);
    (0..rows)
        .map(|j| {
            let plus = xs[(j + k) % rows];
            let minus = xs[(j + rows - k % rows) % rows];
            let d = (plus - minus) / (2.0 * k as f64 * dy);
            d * d
        })
        .collect()
}

/// L¹ row-average of ||∂ᵧI|² − g| over rows not excluded; the eikonal
/// equation holds pointwise away from the corner set, so this is small for
/// a converged field once corner neighbourhoods are masked out.
pub fn hj_consistency(xs: &[f64], dy: f64, g_values: &[f64], halfwidth: usize, exclude: &[bool]) -> f64 {
    let grad_sq = interface_gradient_sq(xs, dy, halfwidth);
    let mut total = 0.0;
    let mut count = 0usize;
    for j in 0..xs.len() {
        if exclude.get(j).copied().unwrap_or(false) {
            continue;
        }
        total += (grad_sq[j] - g_values[j]).abs();
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        total / count as f64
    }
}
