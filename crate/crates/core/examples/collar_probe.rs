// Scratch calibration probe (not part of the deliverable test suite).
use pmwave::config::parse_config;
use pmwave::diagnostics::DiagnosticsCollector;
use pmwave::experiment::analyze_field;
use pmwave::flow::FlowProfile;
use pmwave::grid::GridSpec;
use pmwave::solver::{self, SolverConfig};

fn probe_run(label: &str, text: &str) {
    let cfg = parse_config(text).unwrap();
    let mut diag = DiagnosticsCollector::new(
        cfg.solver.c,
        cfg.analysis.diag_interval,
        cfg.analysis.marker_row,
        cfg.analysis.drift_window,
    );
    let out = solver::run(&cfg.grid, &cfg.solver, &cfg.flow, &mut diag).unwrap();
    println!("== {label}: steps={} warnings={:?}", out.records.len(), out.warnings);
    // report at integer times
    for target in 1..=(cfg.solver.t_max as usize) {
        let r = diag
            .reports
            .iter()
            .min_by(|a, b| {
                (a.t - target as f64)
                    .abs()
                    .partial_cmp(&(b.t - target as f64).abs())
                    .unwrap()
            })
            .unwrap();
        println!(
            "  t={:5.2} l2={:.3e} linf={:.3e} drift={:.3e} e_corr={:.3e}",
            r.t, r.l2, r.linf, r.drift_rate, r.e_corr
        );
    }
    let ladder = cfg.eps_ladder();
    println!("  ladder: {:?}", ladder.iter().map(|e| (e * 1e4).round() / 1e4).collect::<Vec<_>>());
    match analyze_field(&out.field, &cfg.flow, cfg.solver.c, &cfg.analysis, &ladder) {
        Ok(a) => {
            println!(
                "  min_slope={:.4} (0.1c={:.4}) nondeg={}",
                a.trace.min_slope(),
                0.1 * cfg.solver.c,
                a.nondegenerate
            );
            for r in &a.levelset.rungs {
                println!(
                    "    eps={:.4} sup_eps_pxx={:.4e} sup_eps_pxy={:.4e} min_px={:.4}",
                    r.eps, r.sup_eps_pxx, r.sup_eps_pxy, r.min_px
                );
            }
            println!(
                "  h1={} h2={}",
                a.levelset.curvature_vanishes, a.levelset.slope_bounded_below
            );
            let gmax = a.corners.g_max;
            let gmin = a.g_trace.iter().copied().fold(f64::INFINITY, f64::min);
            println!("  g: max={gmax:.4} min={gmin:.4} zero_tol={:.4}", a.corners.zero_tol);
            // g near argmin / argmax of interface
            let xs = &a.trace.positions.xs;
            let argmin = (0..xs.len()).min_by(|&i, &j| xs[i].partial_cmp(&xs[j]).unwrap()).unwrap();
            let argmax = (0..xs.len()).max_by(|&i, &j| xs[i].partial_cmp(&xs[j]).unwrap()).unwrap();
            let rows = xs.len();
            let near = |center: usize, w: usize| -> f64 {
                let mut m = f64::INFINITY;
                for off in 0..=2 * w {
                    let j = (center + rows - w % rows + off) % rows;
                    m = m.min(a.g_trace[j]);
                }
                m
            };
            println!(
                "  interface span=[{:.3},{:.3}] argmin_row={argmin} argmax_row={argmax} g_near_min={:.4} g_near_max={:.4}",
                xs[argmin], xs[argmax], near(argmin, 3), near(argmax, 5)
            );
            // slope vs c+alpha at the interface minimum
            let ca0 = cfg.solver.c + cfg.flow.eval(cfg.grid.y(argmin));
            println!(
                "  valley: f={:.4} c+alpha={:.4} ratio={:.3}",
                a.trace.slopes[argmin],
                ca0,
                a.trace.slopes[argmin] / ca0
            );
            // one-sided slope profile into the hot side at the valley row
            let i0 = a.trace.positions.columns[argmin];
            print!("  valley slope profile:");
            for k in 1..=14usize {
                if i0 + k + 1 < cfg.grid.n_x() {
                    let s = (out.field.at(i0 + k + 1, argmin) - out.field.at(i0 + k, argmin))
                        / cfg.grid.dx();
                    print!(" k{k}:{s:.4}");
                }
            }
            println!();
            for m in &a.corners.maxima {
                println!("    max y={:.3} x={:.3} g_min={:.4} verdict={}", m.y, m.x, m.g_min, m.verdict);
            }
            println!("  corners={} zeros_at={:?}", a.corners.corner_count(), a.corners.zeros_of_g);
        }
        Err(e) => println!("  analysis failed: {e}"),
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("all");

    if which == "drift" || which == "all" {
        // quick look at planar first-step residual magnitudes
        let grid = GridSpec::new(4.0, 201, 51).unwrap();
        let cfg = SolverConfig {
            m: 1.1,
            c: 0.6,
            tau: 2.0,
            t_max: 0.0,
            cfl_safety: 1.0,
            snapshot_times: vec![],
        };
        let flow = FlowProfile::zero();
        let datum = solver::initial_datum(&grid, &cfg);
        let dt = solver::cfl_dt(&datum, &cfg, &flow);
        let (next, _) = solver::step(&datum, &cfg, &flow, dt).unwrap();
        let kink = 100usize;
        let mut r5 = 0.0f64;
        for j in 0..grid.rows() {
            for i in 1..grid.n_x() - 1 {
                if i.abs_diff(kink) > 5 {
                    r5 = r5.max(((next.at(i, j) - datum.at(i, j)) / dt).abs());
                }
            }
        }
        println!("planar first-step residual outside 5-cell collar: {r5:.3e} (dt={dt:.3e})");
    }

    if which == "m01" || which == "all" {
        probe_run(
            "desk m=0.1 alpha2 c=0.4 t=10",
            "m = 0.1\nc = 0.4\nflow = alpha2\nt_max = 10\n",
        );
    }
    if which == "m01-fine" {
        probe_run(
            "fine m=0.1 alpha2 c=0.4 t=10 dx=0.01",
            "m = 0.1\nc = 0.4\nflow = alpha2\nt_max = 10\nn_x = 401\nn_y = 101\n",
        );
    }
    if which == "m01-finest" {
        probe_run(
            "finest m=0.1 alpha2 c=0.4 t=10 dx=0.005",
            "m = 0.1\nc = 0.4\nflow = alpha2\nt_max = 10\nn_x = 801\nn_y = 201\n",
        );
    }
    if which == "m01-short" {
        probe_run(
            "short-domain m=0.1 alpha2 c=0.4 t=10 dx=0.01 xmax=3 tau=1.9",
            "m = 0.1\nc = 0.4\nflow = alpha2\nt_max = 10\nx_max = 3\nn_x = 301\nn_y = 101\ntau = 1.9\n",
        );
    }
    if which == "m01-long" {
        probe_run(
            "long-time m=0.1 alpha2 c=0.4 t=25 dx=0.02 tau=3",
            "m = 0.1\nc = 0.4\nflow = alpha2\nt_max = 25\ntau = 3.0\n",
        );
    }
    if which == "m01-conv" {
        probe_run(
            "converged m=0.1 alpha2 c=0.4 t=35 dx=0.02 xmax=6 tau=4",
            "m = 0.1\nc = 0.4\nflow = alpha2\nt_max = 35\nx_max = 6\nn_x = 301\nn_y = 51\ntau = 4.0\n",
        );
    }
    if which == "m01-conv-fine" {
        probe_run(
            "converged m=0.1 alpha2 c=0.4 t=35 dx=0.01 xmax=6 tau=4",
            "m = 0.1\nc = 0.4\nflow = alpha2\nt_max = 35\nx_max = 6\nn_x = 601\nn_y = 101\ntau = 4.0\n",
        );
    }
    if which == "m01-deep" {
        probe_run(
            "deep m=0.1 alpha2 c=0.4 t=130 dx=0.02 xmax=10 tau=5.5",
            "m = 0.1\nc = 0.4\nflow = alpha2\nt_max = 130\nx_max = 10\nn_x = 501\nn_y = 51\ntau = 5.5\n",
        );
    }
    if which == "m01-fine50" {
        probe_run(
            "fine t=50 m=0.1 alpha2 c=0.4 dx=0.01 xmax=7 tau=4.5",
            "m = 0.1\nc = 0.4\nflow = alpha2\nt_max = 50\nx_max = 7\nn_x = 701\nn_y = 101\ntau = 4.5\n",
        );
    }
    if which == "planar" || which == "all" {
        probe_run("planar desk t=10", "preset = planar-desk\n");
    }
    if which == "trio" || which == "all" {
        for (flow, c) in [("alpha1", 0.6), ("alpha2", 0.5), ("alpha3", 0.4)] {
            for (m, t_max) in [(0.1, 10.0), (1.1, 30.0)] {
                probe_run(
                    &format!("{flow} c={c} m={m} t={t_max} xmax=5 tau=3.5"),
                    &format!(
                        "m = {m}\nc = {c}\nflow = {flow}\nt_max = {t_max}\nx_max = 5\nn_x = 251\nn_y = 51\ntau = 3.5\n"
                    ),
                );
            }
        }
    }
    if which == "m11-fine" {
        use pmwave::interface::{classify_corners, hj_forcing, InterfaceTrace};
        let cfg = parse_config(
            "m = 1.1\nc = 0.5\nflow = alpha2\nt_max = 15\nx_max = 5\nn_x = 501\nn_y = 51\ntau = 3.5\n",
        )
        .unwrap();
        let out = solver::run(&cfg.grid, &cfg.solver, &cfg.flow, &mut solver::NullObserver).unwrap();
        println!("== m11 alpha2 fine dx=0.01 t=15: steps={}", out.records.len());
        for s in [1usize, 2, 3, 4, 5, 8] {
            let trace = InterfaceTrace::compute(&out.field, s).unwrap();
            let g = hj_forcing(&trace.slopes, &cfg.grid, &cfg.flow, cfg.solver.c).unwrap();
            let report = classify_corners(&trace.positions, &g, &cfg.grid, &cfg.analysis.corner);
            let gmax = report.g_max;
            let detail: Vec<String> = report
                .maxima
                .iter()
                .map(|m| format!("y={:.2} gmin={:.3} {}", m.y, m.g_min, m.verdict))
                .collect();
            println!(
                "  s={s}: corners={} gmax={gmax:.3} min_slope={:.3} maxima=[{}]",
                report.corner_count(),
                trace.min_slope(),
                detail.join("; ")
            );
        }
        // slope profiles at interface extremes
        let trace = InterfaceTrace::compute(&out.field, 5).unwrap();
        let xs = &trace.positions.xs;
        let rows = xs.len();
        let argmin = (0..rows).min_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap()).unwrap();
        let argmax = (0..rows).max_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap()).unwrap();
        for (label, row) in [("argmin", argmin), ("argmax", argmax)] {
            let i0 = trace.positions.columns[row];
            let ca = cfg.solver.c + cfg.flow.eval(cfg.grid.y(row));
            print!("  {label} row {row} (c+a={ca:.4}) slopes:");
            for k in 1..=12usize {
                let s = (out.field.at(i0 + k + 1, row) - out.field.at(i0 + k, row)) / cfg.grid.dx();
                print!(" k{k}:{s:.3}");
            }
            println!();
        }
        // interface shape around the maximum, in cells relative to the tip
        print!("  I(y) around max (cells):");
        for off in -8i64..=8 {
            let j = ((argmax as i64 + off).rem_euclid(rows as i64)) as usize;
            let cells = (xs[j] - xs[argmax]) / cfg.grid.dx();
            print!(" {cells:+.0}");
        }
        println!();
    }
    if which == "m11-trio" {
        for (flow, c) in [("alpha1", 0.6), ("alpha2", 0.5), ("alpha3", 0.4)] {
            probe_run(
                &format!("{flow} c={c} m=1.1 t=30 xmax=5 tau=3.5"),
                &format!(
                    "m = 1.1\nc = {c}\nflow = {flow}\nt_max = 30\nx_max = 5\nn_x = 251\nn_y = 51\ntau = 3.5\n"
                ),
            );
        }
    }
}
