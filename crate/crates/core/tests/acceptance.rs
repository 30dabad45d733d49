//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Production-scale grids (dx = 5e-3, x_max = 10, t = 30) are out of reach
//! here; every criterion runs a desk-scaled substitute noted inline. The
//! shared degenerate-regime run (m = 0.1, alpha2, c = 0.4) backing criteria
//! 4-6 is computed once and reused.

use std::sync::OnceLock;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pmwave::config::parse_config;
use pmwave::diagnostics::{DiagnosticsCollector, ResidualReport};
use pmwave::flow::FlowProfile;
use pmwave::grid::{GridSpec, PressureField};
use pmwave::interface::{
    classify_corners, detect_interface, geometric_ladder, hj_forcing, levelset_report,
    slope_at_interface, InterfaceTrace, LevelsetOptions,
};
use pmwave::solver::{self, NullObserver, SolverConfig};

fn verdict(criterion: &str, ok: bool) -> bool {
    println!("acceptance {criterion}: {}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn solver_cfg(m: f64, c: f64, tau: f64, t_max: f64) -> SolverConfig {
    SolverConfig { m, c, tau, t_max, cfl_safety: 1.0, snapshot_times: vec![] }
}

/// Criterion 1 — positivity at the exact CFL bound: 10^3 randomized
/// nonnegative fields on a 101x33 grid, one step each, zero clamped nodes
/// and zero negative values pre-clamp (the clamp counter reports pre-clamp
/// sign violations).
#[test]
fn acceptance_01_positivity_at_exact_cfl() {
    let grid = GridSpec::new(1.0, 101, 33).unwrap();
    let flows = [FlowProfile::alpha1(), FlowProfile::alpha2(), FlowProfile::alpha3()];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut clamped = 0usize;
    let mut negative = 0usize;
    for k in 0..1000 {
        let flow = &flows[k % flows.len()];
        let m = 0.1 + 2.4 * rng.gen::<f64>();
        let c = flow.critical_speed() + 0.05 + rng.gen::<f64>();
        let scale = 0.05 + 2.0 * rng.gen::<f64>();
        let mut field = PressureField::zeros(grid);
        for j in 0..grid.rows() {
            for i in 0..grid.n_x() {
                field.set(i, j, scale * rng.gen::<f64>());
            }
        }
        let cfg = solver_cfg(m, c, 0.5, 0.0);
        let dt = solver::cfl_dt(&field, &cfg, flow);
        let (next, stats) = solver::step(&field, &cfg, flow, dt).expect("step");
        clamped += stats.clamp_count;
        if next.min_value() < 0.0 {
            negative += 1;
        }
    }
    let ok = clamped == 0 && negative == 0;
    assert!(
        verdict("1 (positivity at exact CFL bound)", ok),
        "clamped nodes: {clamped}, fields with negatives: {negative}"
    );
}

/// Criterion 2 — planar-wave fidelity on the desk grid (alpha = 0, exact
/// datum, c = 0.6): the scheme preserves the exact profile away from the
/// kink (first-step interior residual outside a 5-cell collar <= 1e-8) and
/// extracts the exact slope there; the detected interface stays within one
/// cell over a run to t = 2.
#[test]
fn acceptance_02_planar_wave_fidelity() {
    let grid = GridSpec::new(4.0, 201, 51).unwrap();
    let c = 0.6;
    let cfg = solver_cfg(1.1, c, 2.0, 2.0);
    let flow = FlowProfile::zero();
    let kink = 100usize; // tau / dx

    // (a) one explicit step from the exact datum: residual off-collar.
    let datum = solver::initial_datum(&grid, &cfg);
    let dt = solver::cfl_dt(&datum, &cfg, &flow);
    let (next, _) = solver::step(&datum, &cfg, &flow, dt).unwrap();
    let mut res_off_collar = 0.0f64;
    for j in 0..grid.rows() {
        for i in 1..grid.n_x() - 1 {
            if i.abs_diff(kink) > 5 {
                res_off_collar =
                    res_off_collar.max(((next.at(i, j) - datum.at(i, j)) / dt).abs());
            }
        }
    }

    // (b) slope extraction on the exact profile.
    let pos0 = detect_interface(&datum);
    let slopes0 = slope_at_interface(&datum, &pos0, 5).unwrap();
    let slope_err = slopes0.iter().map(|s| (s - c).abs()).fold(0.0, f64::max);

    // (c) interface stationarity over the run.
    let out = solver::run(&grid, &cfg, &flow, &mut NullObserver).unwrap();
    let pos2 = detect_interface(&out.field);
    let max_shift = pos2.columns.iter().map(|&i| i.abs_diff(kink)).max().unwrap();

    let ok = res_off_collar <= 1e-8 && slope_err <= 1e-6 && max_shift <= 1;
    assert!(
        verdict("2 (planar-wave fidelity)", ok),
        "off-collar residual {res_off_collar:.3e}, slope error {slope_err:.3e}, \
         interface shift {max_shift} cells"
    );
}

fn reports_at_unit_times(reports: &[ResidualReport], t_max: usize) -> Vec<ResidualReport> {
    (1..=t_max)
        .map(|t| {
            *reports
                .iter()
                .min_by(|a, b| {
                    (a.t - t as f64).abs().partial_cmp(&(b.t - t as f64).abs()).unwrap()
                })
                .unwrap()
        })
        .collect()
}

/// Criterion 3 — drifting-frame convergence on the desk-scaled degenerate
/// run (m = 0.1, alpha2, c = 0.4, 201x51, t = 10): the uncorrected residual
/// plateaus at a positive value while the corrected residual, sampled at
/// 1-time-unit spacing, decreases monotonically and by a factor >= 10 from
/// its value at t = 2.
#[test]
fn acceptance_03_drifting_frame_convergence() {
    let cfg = parse_config("m = 0.1\nc = 0.4\nflow = alpha2\nt_max = 10\n").unwrap();
    let mut diag = DiagnosticsCollector::new(
        cfg.solver.c,
        cfg.analysis.diag_interval,
        cfg.analysis.marker_row,
        cfg.analysis.drift_window,
    );
    solver::run(&cfg.grid, &cfg.solver, &cfg.flow, &mut diag).unwrap();
    let samples = reports_at_unit_times(&diag.reports, 10);
    let e: Vec<f64> = samples.iter().map(|r| r.e_corr).collect();
    let monotone = (1..e.len()).skip(1).all(|k| e[k] < e[k - 1]); // from the t=2 sample on
    let factor_ok = e[9] * 10.0 <= e[1];
    let linf2 = samples[1].linf;
    let linf10 = samples[9].linf;
    // "Plateaus at a positive value": the uncorrected norm stays well away
    // from zero (within a factor 5 of its t=2 level) and remains dominated
    // by the drift term the corrected residual removes.
    let plateau_ok = linf10 > 0.0 && linf10 >= linf2 / 5.0 && linf10 >= 2.0 * e[9];
    let ok = monotone && factor_ok && plateau_ok;
    assert!(
        verdict("3 (drifting-frame convergence)", ok),
        "e_corr at unit times: {e:?}; e(2)/e(10) = {:.2}; linf(2) = {linf2:.3e}, linf(10) = {linf10:.3e}",
        e[1] / e[9]
    );
}

/// The shared converged degenerate-regime run backing criteria 4-6:
/// m = 0.1, alpha2, c = 0.4 on a dx = dy = 0.01 grid with enough leftward
/// room (x_max = 7, tau = 4.5) to stay clear of the Dirichlet wall while the
/// profile drifts, run to t = 50 so the interface structure has settled.
struct SharedRun {
    cfg: pmwave::config::ExperimentConfig,
    field: PressureField,
    trace: InterfaceTrace,
    g_trace: Vec<f64>,
}

fn shared_run() -> &'static SharedRun {
    static RUN: OnceLock<SharedRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let cfg = parse_config(
            "m = 0.1\nc = 0.4\nflow = alpha2\nt_max = 50\nx_max = 7\nn_x = 701\nn_y = 101\ntau = 4.5\n",
        )
        .unwrap();
        let out = solver::run(&cfg.grid, &cfg.solver, &cfg.flow, &mut NullObserver).unwrap();
        assert!(out.warnings.is_empty(), "run warnings: {:?}", out.warnings);
        let trace = InterfaceTrace::compute(&out.field, cfg.analysis.slope_offset).unwrap();
        let g_trace = hj_forcing(&trace.slopes, &cfg.grid, &cfg.flow, cfg.solver.c).unwrap();
        SharedRun { cfg, field: out.field, trace, g_trace }
    })
}

/// Criterion 4 — nondegeneracy: the one-sided interface slope stays above
/// 0.1*c uniformly in y at final time.
#[test]
fn acceptance_04_interface_nondegeneracy() {
    let run = shared_run();
    let c = run.cfg.solver.c;
    let min_slope = run.trace.min_slope();
    let ok = min_slope >= 0.1 * c;
    assert!(
        verdict("4 (interface nondegeneracy)", ok),
        "min slope {min_slope:.4} vs threshold {:.4}",
        0.1 * c
    );
}

/// Criterion 5 — levelset-descent hypotheses: the eps-scaled second
/// derivatives decrease strictly along the upper 8 ladder rungs, the
/// one-sided slope stays above 0.1*c on every rung, and a quadratic-growth
/// synthetic field fails the slope floor (negative control).
#[test]
fn acceptance_05_levelset_hypotheses() {
    let run = shared_run();
    let c = run.cfg.solver.c;
    let ladder = run.cfg.eps_ladder();
    let opts = LevelsetOptions { min_slope: 0.1 * c, strict_rungs: 8, curvature_floor: 0.0 };
    let report = levelset_report(&run.field, &ladder, &run.cfg.flow, c, &opts).unwrap();

    let strict = |get: fn(&pmwave::interface::LevelsetRung) -> f64| {
        (0..7).all(|k| get(&report.rungs[k + 1]) < get(&report.rungs[k]))
    };
    let pxx_ok = strict(|r| r.sup_eps_pxx);
    let pxy_ok = strict(|r| r.sup_eps_pxy);
    let slope_ok = report.rungs.iter().all(|r| r.min_px >= 0.1 * c);

    // Negative control: p = [x - tau]+^2 has levelset slopes ~ 2 sqrt(eps),
    // so the smallest rung's slope floor collapses relative to the largest.
    let g = GridSpec::new(4.0, 401, 17).unwrap();
    let quad = PressureField::from_fn(g, |x, _| {
        let d = (x - 1.0).max(0.0);
        d * d
    });
    let control_ladder = geometric_ladder(0.5, 0.01, 12, 0.0);
    let control =
        levelset_report(&quad, &control_ladder, &FlowProfile::zero(), c, &opts).unwrap();
    let control_first = control.rungs.first().unwrap().min_px;
    let control_last = control.rungs.last().unwrap().min_px;
    let control_ok = control_last < 0.5 * control_first;

    let ok = pxx_ok && pxy_ok && slope_ok && control_ok;
    assert!(
        verdict("5 (levelset hypothesis validation)", ok),
        "pxx strict: {pxx_ok}, pxy strict: {pxy_ok}, slope floor: {slope_ok} \
         (min {:.4}), control: {control_first:.3} -> {control_last:.3}",
        report.rungs.iter().map(|r| r.min_px).fold(f64::INFINITY, f64::min)
    );
}

/// Criterion 6 — forcing-term sanity: g >= -0.05 at every row, g vanishes
/// (<= 0.02 max g) within 3 rows of the interface minimum, and g stays
/// above 0.1 max g in a +-5-row neighbourhood of the interface maximum.
///
/// The first clause is sensitive to the offset-probe bias of the slope at
/// the near-stalled valley row (c + alpha there is only c - c* = 1/15) and
/// does not reach -0.05 at desk resolution; see the test output for the
/// measured floor.
#[test]
fn acceptance_06_forcing_term_sanity() {
    let run = shared_run();
    let rows = run.g_trace.len();
    let g_max = run.g_trace.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let g_min = run.g_trace.iter().copied().fold(f64::INFINITY, f64::min);
    let xs = &run.trace.positions.xs;
    let argmin = (0..rows).min_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap()).unwrap();
    let argmax = (0..rows).max_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap()).unwrap();
    let min_over = |center: usize, w: usize| -> f64 {
        (0..=2 * w)
            .map(|off| run.g_trace[(center + rows - w % rows + off) % rows])
            .fold(f64::INFINITY, f64::min)
    };

    let floor_ok = g_min >= -0.05;
    let vanishes_at_min = min_over(argmin, 3) <= 0.02 * g_max;
    let positive_at_max = min_over(argmax, 5) >= 0.1 * g_max;
    let ok = floor_ok && vanishes_at_min && positive_at_max;
    assert!(
        verdict("6 (forcing-term sanity)", ok),
        "min g = {g_min:.4} (floor -0.05: {floor_ok}), \
         g near interface min = {:.4} vs {:.4} ({vanishes_at_min}), \
         g near interface max = {:.4} vs {:.4} ({positive_at_max})",
        min_over(argmin, 3),
        0.02 * g_max,
        min_over(argmax, 5),
        0.1 * g_max
    );
}

/// Criterion 7 helper: corner count of one desk run. The degenerate (m<1)
/// runs develop their corners quickly but drift fast, so they are measured
/// at t = 10; the m>1 runs drift slowly and are given t = 30 to settle.
fn corner_count(flow_name: &str, c: f64, m: f64, t_max: f64) -> usize {
    let cfg = parse_config(&format!(
        "m = {m}\nc = {c}\nflow = {flow_name}\nt_max = {t_max}\nx_max = 5\nn_x = 251\nn_y = 51\ntau = 3.5\n"
    ))
    .unwrap();
    let out = solver::run(&cfg.grid, &cfg.solver, &cfg.flow, &mut NullObserver).unwrap();
    let trace = InterfaceTrace::compute(&out.field, cfg.analysis.slope_offset).unwrap();
    let g = hj_forcing(&trace.slopes, &cfg.grid, &cfg.flow, cfg.solver.c).unwrap();
    classify_corners(&trace.positions, &g, &cfg.grid, &cfg.analysis.corner).corner_count()
}

macro_rules! corner_case {
    ($name:ident, $flow:literal, $c:literal, $m:literal, $t:literal, $expect_corner:literal) => {
        #[test]
        fn $name() {
            let count = corner_count($flow, $c, $m, $t);
            let ok = if $expect_corner { count >= 1 } else { count == 0 };
            assert!(
                verdict(
                    concat!("7 (corner dichotomy, ", $flow, " m=", stringify!($m), ")"),
                    ok
                ),
                "corner count {count}, expected {}",
                if $expect_corner { ">= 1" } else { "0" }
            );
        }
    };
}

corner_case!(acceptance_07_alpha1_m01_has_corner, "alpha1", 0.6, 0.1, 10.0, true);
corner_case!(acceptance_07_alpha2_m01_has_corner, "alpha2", 0.5, 0.1, 10.0, true);
corner_case!(acceptance_07_alpha3_m01_has_corner, "alpha3", 0.4, 0.1, 10.0, true);
corner_case!(acceptance_07_alpha1_m11_smooth, "alpha1", 0.6, 1.1, 30.0, false);
corner_case!(acceptance_07_alpha2_m11_smooth, "alpha2", 0.5, 1.1, 30.0, false);
corner_case!(acceptance_07_alpha3_m11_smooth, "alpha3", 0.4, 1.1, 30.0, false);

/// Criterion 8 — CFL scaling: halving dx (and dy) in the diffusion-dominated
/// planar regime divides the selected time step by a factor in [1/0.27, 1/0.24].
#[test]
fn acceptance_08_cfl_scaling() {
    let mut last_dt = Vec::new();
    for (n_x, n_y) in [(201usize, 51usize), (401, 101)] {
        let grid = GridSpec::new(4.0, n_x, n_y).unwrap();
        let cfg = solver_cfg(1.0, 0.6, 2.0, 0.02);
        let flow = FlowProfile::zero();
        let out = solver::run(&grid, &cfg, &flow, &mut NullObserver).unwrap();
        last_dt.push(out.records.last().unwrap().dt);
    }
    let ratio = last_dt[1] / last_dt[0];
    let ok = (0.24..=0.27).contains(&ratio);
    assert!(
        verdict("8 (CFL step scaling)", ok),
        "dt ratio {ratio:.4} outside [0.24, 0.27]"
    );
}

/// Criterion 9 — oracle equivalence: one step on a random 9x9 field matches
/// an independently written single-node update at every interior node,
/// bitwise.
#[test]
fn acceptance_09_single_step_oracle() {
    let grid = GridSpec::new(1.0, 9, 9).unwrap();
    let flow = FlowProfile::alpha1();
    let cfg = solver_cfg(0.8, 0.7, 0.5, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut field = PressureField::zeros(grid);
    for j in 0..grid.rows() {
        for i in 0..grid.n_x() {
            field.set(i, j, rng.gen::<f64>());
        }
    }
    let dt = solver::cfl_dt(&field, &cfg, &flow);
    let (next, _) = solver::step(&field, &cfg, &flow, dt).unwrap();

    let (dx, dy) = (grid.dx(), grid.dy());
    let n_x = grid.n_x();
    let rows = grid.rows();
    let at = |i: usize, j: isize| field.at(i, (j.rem_euclid(rows as isize)) as usize);
    let mut mismatches = 0usize;
    for j in 0..rows {
        let a = cfg.c + flow.eval(grid.y(j));
        let js = j as isize;
        for i in 1..n_x - 1 {
            let p = at(i, js);
            let lap = (at(i + 1, js) + at(i - 1, js) - 2.0 * p) / (dx * dx)
                + (at(i, js + 1) + at(i, js - 1) - 2.0 * p) / (dy * dy);
            let back = (p - at(i - 1, js)) / dx;
            let gx = (at(i + 1, js) - at(i - 1, js)) / (2.0 * dx);
            let gy = (at(i, js + 1) - at(i, js - 1)) / (2.0 * dy);
            let expected = (p + dt * (cfg.m * p * lap - a * back + (gx * gx + gy * gy))).max(0.0);
            if next.at(i, j).to_bits() != expected.to_bits() {
                mismatches += 1;
            }
        }
    }
    let ok = mismatches == 0;
    assert!(
        verdict("9 (single-step oracle equivalence)", ok),
        "{mismatches} interior nodes differ from the hand-rolled update"
    );
}
