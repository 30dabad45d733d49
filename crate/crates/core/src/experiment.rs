//! Experiment orchestration: run the solver with diagnostics attached,
//! analyze the final field, write every artifact as plain CSV/text, and
//! drive parameter sweeps.
//!
//! All outputs are deterministic: identical configs produce bitwise
//! identical files.

use std::collections::VecDeque;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::config::{AnalysisConfig, ConfigError, ExperimentConfig};
use crate::diagnostics::{
    convergence_monitor, DiagnosticsCollector, ResidualReport, Verdict,
};
use crate::flow::FlowProfile;
use crate::grid::{GridSpec, PressureField, SnapshotError, SnapshotMeta};
use crate::interface::{
    classify_corners, geometric_ladder, hj_forcing, levelset_report, CornerReport,
    InterfaceError, InterfaceTrace, LevelsetOptions, LevelsetReport,
};
use crate::solver::{self, Observer, SolverError, StepContext, StepRecord};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Interface(#[from] InterfaceError),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error("snapshot names flow `{0}`, which cannot be rebuilt from the config (use a config with the matching custom flow)")]
    FlowMismatch(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl ExperimentError {
    /// CLI exit code: 1 for configuration problems, 2 for numerical or i/o
    /// failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) | ExperimentError::FlowMismatch(_) => 1,
            _ => 2,
        }
    }
}

/// One-line verdict summary printed after every experiment.
#[derive(Debug, Clone)]
pub struct VerdictSummary {
    /// Convergence classification; `None` for snapshot re-analysis, which
    /// has no residual history.
    pub convergence: Option<Verdict>,
    pub nondegenerate: bool,
    pub min_slope: f64,
    pub curvature_vanishes: bool,
    pub slope_bounded_below: bool,
    pub corner_count: usize,
}

impl fmt::Display for VerdictSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pass = |b: bool| if b { "pass" } else { "fail" };
        match &self.convergence {
            Some(v) => write!(f, "convergence={v} ")?,
            None => write!(f, "convergence=n/a ")?,
        }
        write!(
            f,
            "nondegenerate={} min_slope={:.6} curvature_decay={} slope_floor={} corners={}",
            if self.nondegenerate { "yes" } else { "no" },
            self.min_slope,
            pass(self.curvature_vanishes),
            pass(self.slope_bounded_below),
            self.corner_count
        )
    }
}

/// Interface/levelset/corner analysis of one field.
#[derive(Debug, Clone)]
pub struct FieldAnalysis {
    pub trace: InterfaceTrace,
    /// Forcing g(y) from the offset-s interface slopes.
    pub g_trace: Vec<f64>,
    pub corners: CornerReport,
    pub levelset: LevelsetReport,
    pub nondegenerate: bool,
}

/// Everything a finished experiment hands back to the caller.
#[derive(Debug)]
pub struct RunArtifacts {
    pub summary: VerdictSummary,
    pub reports: Vec<ResidualReport>,
    pub records: Vec<StepRecord>,
    pub analysis: FieldAnalysis,
    pub final_field: PressureField,
    pub warnings: Vec<String>,
    pub files: Vec<PathBuf>,
}

/// Run the free-boundary analyses on a stationary field.
pub fn analyze_field(
    field: &PressureField,
    flow: &FlowProfile,
    c: f64,
    analysis: &AnalysisConfig,
    ladder: &[f64],
) -> Result<FieldAnalysis, ExperimentError> {
    let grid = field.grid();
    let trace = InterfaceTrace::compute(field, analysis.slope_offset)?;
    let g_trace = hj_forcing(&trace.slopes, grid, flow, c)?;
    let corners = classify_corners(&trace.positions, &g_trace, grid, &analysis.corner);
    let opts = LevelsetOptions {
        min_slope: analysis.nondeg_factor * c,
        strict_rungs: analysis.h1_strict_rungs,
        curvature_floor: analysis.h1_floor,
    };
    let levelset = levelset_report(field, ladder, flow, c, &opts)?;
    let nondegenerate = trace.is_nondegenerate(analysis.nondeg_factor * c);
    Ok(FieldAnalysis { trace, g_trace, corners, levelset, nondegenerate })
}

/// Collects step records so the log survives a failed run.
struct StepLog {
    records: Vec<StepRecord>,
}

impl Observer for StepLog {
    fn observe(&mut self, ctx: &StepContext<'_>) {
        self.records.push(*ctx.record);
    }
}

/// Grabs the field at the first step crossing each requested output time.
struct SnapshotCollector {
    remaining: VecDeque<f64>,
    collected: Vec<(f64, f64, PressureField)>,
}

impl Observer for SnapshotCollector {
    fn observe(&mut self, ctx: &StepContext<'_>) {
        while let Some(&want) = self.remaining.front() {
            if ctx.record.t < want {
                break;
            }
            self.collected.push((want, ctx.record.t, ctx.next.clone()));
            self.remaining.pop_front();
        }
    }
}

struct FanOut<'a>(Vec<&'a mut dyn Observer>);

impl Observer for FanOut<'_> {
    fn observe(&mut self, ctx: &StepContext<'_>) {
        for obs in &mut self.0 {
            obs.observe(ctx);
        }
    }
}

/// Execute the solver phase of an experiment, keeping logs even on failure.
struct Execution {
    outcome: Result<crate::solver::RunOutput, SolverError>,
    records: Vec<StepRecord>,
    reports: Vec<ResidualReport>,
    snapshots: Vec<(f64, f64, PressureField)>,
}

fn execute(cfg: &ExperimentConfig) -> Execution {
    let mut diag = DiagnosticsCollector::new(
        cfg.solver.c,
        cfg.analysis.diag_interval,
        cfg.analysis.marker_row,
        cfg.analysis.drift_window,
    );
    let mut log = StepLog { records: Vec::new() };
    let mut snaps = SnapshotCollector {
        remaining: cfg.solver.snapshot_times.iter().copied().collect(),
        collected: Vec::new(),
    };
    let outcome = {
        let mut fan = FanOut(vec![&mut log, &mut diag, &mut snaps]);
        solver::run(&cfg.grid, &cfg.solver, &cfg.flow, &mut fan)
    };
    Execution {
        outcome,
        records: log.records,
        reports: diag.reports,
        snapshots: snaps.collected,
    }
}

fn summarize(
    reports: &[ResidualReport],
    analysis_cfg: &AnalysisConfig,
    analysis: &FieldAnalysis,
) -> VerdictSummary {
    let convergence = convergence_monitor(
        reports,
        analysis_cfg.convergence_window,
        analysis_cfg.convergence_factor,
        analysis_cfg.convergence_tol,
    );
    VerdictSummary {
        convergence: Some(convergence),
        nondegenerate: analysis.nondegenerate,
        min_slope: analysis.trace.min_slope(),
        curvature_vanishes: analysis.levelset.curvature_vanishes,
        slope_bounded_below: analysis.levelset.slope_bounded_below,
        corner_count: analysis.corners.corner_count(),
    }
}

/// Run one experiment end to end and write every artifact.
///
/// Prints the one-line verdict summary on success. On a solver failure the
/// step log and diagnostics gathered so far are still flushed to disk.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunArtifacts, ExperimentError> {
    fs::create_dir_all(&cfg.output.dir)?;
    let prefix = cfg.output.dir.join(&cfg.output.prefix);
    let mut files = Vec::new();

    let exec = execute(cfg);
    let steps_path = with_suffix(&prefix, "steps.csv");
    write_steps_csv(&steps_path, &exec.records)?;
    files.push(steps_path);
    let diag_path = with_suffix(&prefix, "diagnostics.csv");
    write_diagnostics_csv(&diag_path, &exec.reports, &cfg.analysis)?;
    files.push(diag_path);

    let out = exec.outcome?;

    let meta = |t: f64| SnapshotMeta {
        m: cfg.solver.m,
        c: cfg.solver.c,
        alpha: cfg.flow.name().to_string(),
        t,
    };
    for (want, actual, field) in &exec.snapshots {
        let path = with_suffix(&prefix, &format!("snapshot_t{want:.3}.csv"));
        let mut w = BufWriter::new(File::create(&path)?);
        field.write_snapshot(&mut w, &meta(*actual))?;
        files.push(path);
    }
    let final_t = out.records.last().map_or(0.0, |r| r.t);
    let final_path = with_suffix(&prefix, "final.csv");
    {
        let mut w = BufWriter::new(File::create(&final_path)?);
        out.field.write_snapshot(&mut w, &meta(final_t))?;
    }
    files.push(final_path);

    let ladder = cfg.eps_ladder();
    let analysis = analyze_field(&out.field, &cfg.flow, cfg.solver.c, &cfg.analysis, &ladder)?;

    let interface_path = with_suffix(&prefix, "interface.csv");
    write_interface_csv(&interface_path, &cfg.grid, &analysis.trace)?;
    files.push(interface_path);
    let levelset_path = with_suffix(&prefix, "levelset.csv");
    write_levelset_csv(&levelset_path, &cfg.grid, &analysis.levelset)?;
    files.push(levelset_path);
    let corners_path = with_suffix(&prefix, "corners.txt");
    write_corners_txt(&corners_path, &analysis, &out.warnings)?;
    files.push(corners_path);

    let summary = summarize(&exec.reports, &cfg.analysis, &analysis);
    println!("verdict: {summary}");
    Ok(RunArtifacts {
        summary,
        reports: exec.reports,
        records: out.records,
        analysis,
        final_field: out.field,
        warnings: out.warnings,
        files,
    })
}

/// Re-run the interface/levelset/corner analyses on a stored snapshot.
///
/// Grid, m, c and the flow name come from the snapshot header (the header
/// flow must either be a builtin name or match the config's custom flow);
/// analysis knobs come from the config.
pub fn analyze_snapshot(
    snapshot: &Path,
    cfg: &ExperimentConfig,
) -> Result<(VerdictSummary, FieldAnalysis), ExperimentError> {
    let reader = BufReader::new(File::open(snapshot)?);
    let (field, meta) = PressureField::read_snapshot(reader)?;
    let flow = match meta.alpha.as_str() {
        "alpha1" => FlowProfile::alpha1(),
        "alpha2" => FlowProfile::alpha2(),
        "alpha3" => FlowProfile::alpha3(),
        "zero" => FlowProfile::zero(),
        "custom" if cfg.flow.name() == "custom" => cfg.flow.clone(),
        other => return Err(ExperimentError::FlowMismatch(other.to_string())),
    };
    let c = meta.c;
    let grid = *field.grid();
    let ladder = geometric_ladder(
        cfg.analysis.eps_max,
        cfg.analysis.eps_min,
        cfg.analysis.eps_count,
        4.0 * c * grid.dx(),
    );
    let analysis = analyze_field(&field, &flow, c, &cfg.analysis, &ladder)?;

    fs::create_dir_all(&cfg.output.dir)?;
    let prefix = cfg.output.dir.join(format!("{}_analyze", cfg.output.prefix));
    write_interface_csv(&with_suffix(&prefix, "interface.csv"), &grid, &analysis.trace)?;
    write_levelset_csv(&with_suffix(&prefix, "levelset.csv"), &grid, &analysis.levelset)?;
    write_corners_txt(&with_suffix(&prefix, "corners.txt"), &analysis, &[])?;

    let summary = VerdictSummary {
        convergence: None,
        nondegenerate: analysis.nondegenerate,
        min_slope: analysis.trace.min_slope(),
        curvature_vanishes: analysis.levelset.curvature_vanishes,
        slope_bounded_below: analysis.levelset.slope_bounded_below,
        corner_count: analysis.corners.corner_count(),
    };
    println!("verdict: {summary}");
    Ok((summary, analysis))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    M,
    C,
    EpsFloor,
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::M => "m",
            SweepParam::C => "c",
            SweepParam::EpsFloor => "eps_floor",
        })
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "m" => Ok(SweepParam::M),
            "c" => Ok(SweepParam::C),
            "eps_floor" => Ok(SweepParam::EpsFloor),
            other => Err(format!("unknown sweep parameter `{other}` (m|c|eps_floor)")),
        }
    }
}

#[derive(Debug)]
pub struct SweepRow {
    pub value: f64,
    pub result: Result<VerdictSummary, String>,
}

#[derive(Debug)]
pub struct SweepReport {
    pub param: SweepParam,
    pub rows: Vec<SweepRow>,
    /// For m-sweeps: the adjacent (corner, no-corner) pair bracketing the
    /// transition, when one exists.
    pub corner_bracket: Option<(f64, f64)>,
}

/// Run the experiment once per value of the swept parameter. Per-value
/// failures are recorded in the table and the sweep continues.
pub fn sweep(
    cfg: &ExperimentConfig,
    param: SweepParam,
    values: &[f64],
) -> Result<SweepReport, ExperimentError> {
    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let result = sweep_one(cfg, param, value);
        rows.push(SweepRow { value, result });
    }

    let mut corner_bracket = None;
    if param == SweepParam::M {
        let mut ok: Vec<(f64, usize)> = rows
            .iter()
            .filter_map(|r| r.result.as_ref().ok().map(|s| (r.value, s.corner_count)))
            .collect();
        ok.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in ok.windows(2) {
            if w[0].1 >= 1 && w[1].1 == 0 {
                corner_bracket = Some((w[0].0, w[1].0));
                break;
            }
        }
    }

    fs::create_dir_all(&cfg.output.dir)?;
    let prefix = cfg.output.dir.join(&cfg.output.prefix);
    let report = SweepReport { param, rows, corner_bracket };
    write_sweep_csv(&with_suffix(&prefix, "sweep.csv"), &report)?;
    Ok(report)
}

fn sweep_one(cfg: &ExperimentConfig, param: SweepParam, value: f64) -> Result<VerdictSummary, String> {
    let mut cfg = cfg.clone();
    let mut floor = cfg.eps_floor();
    match param {
        SweepParam::M => {
            cfg.solver.m = value;
        }
        SweepParam::C => {
            cfg.solver.c = value;
            floor = cfg.eps_floor();
            let c_star = cfg.flow.critical_speed();
            if value <= c_star || value <= 0.0 {
                return Err(format!("rejected: c={value} <= c* = {c_star:.9}"));
            }
        }
        SweepParam::EpsFloor => {
            if value < cfg.eps_floor() {
                return Err(format!(
                    "rejected: eps_floor={value} below the resolution limit 4*c*dx = {}",
                    cfg.eps_floor()
                ));
            }
            floor = value;
        }
    }
    cfg.solver.validate(&cfg.grid, &cfg.flow).map_err(|e| e.to_string())?;
    let ladder = geometric_ladder(cfg.analysis.eps_max, cfg.analysis.eps_min, cfg.analysis.eps_count, floor);
    if ladder.is_empty() {
        return Err("rejected: empty levelset ladder".into());
    }

    let exec = execute(&cfg);
    let out = exec.outcome.map_err(|e| e.to_string())?;
    let analysis = analyze_field(&out.field, &cfg.flow, cfg.solver.c, &cfg.analysis, &ladder)
        .map_err(|e| e.to_string())?;
    Ok(summarize(&exec.reports, &cfg.analysis, &analysis))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push("_");
    name.push(suffix);
    prefix.with_file_name(name)
}

fn write_steps_csv(path: &Path, records: &[StepRecord]) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "n,t,dt,max_p,clamp_count")?;
    for r in records {
        writeln!(w, "{},{:.16e},{:.16e},{:.16e},{}", r.n, r.t, r.dt, r.max_p, r.clamp_count)?;
    }
    Ok(())
}

fn write_diagnostics_csv(
    path: &Path,
    reports: &[ResidualReport],
    analysis: &AnalysisConfig,
) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t,l2,linf,drift_rate,e_corr,verdict")?;
    for k in 0..reports.len() {
        let r = &reports[k];
        let verdict = convergence_monitor(
            &reports[..=k],
            analysis.convergence_window,
            analysis.convergence_factor,
            analysis.convergence_tol,
        );
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.t, r.l2, r.linf, r.drift_rate, r.e_corr, verdict
        )?;
    }
    Ok(())
}

fn write_interface_csv(path: &Path, grid: &GridSpec, trace: &InterfaceTrace) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "j,y,fb_x,slope_gamma_plus")?;
    for j in 0..trace.positions.columns.len() {
        writeln!(
            w,
            "{},{:.16e},{:.16e},{:.16e}",
            j + 1,
            grid.y(j),
            trace.positions.xs[j],
            trace.slopes[j]
        )?;
    }
    Ok(())
}

fn write_levelset_csv(path: &Path, grid: &GridSpec, report: &LevelsetReport) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "eps,j,y,X_eps,px,eps_pxx,eps_pxy")?;
    for rung in &report.rungs {
        for (j, row) in rung.rows.iter().enumerate() {
            let Some(row) = row else { continue };
            writeln!(
                w,
                "{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                rung.eps,
                j + 1,
                grid.y(j),
                row.x,
                row.px,
                row.eps_pxx,
                row.eps_pxy
            )?;
        }
    }
    Ok(())
}

fn write_corners_txt(
    path: &Path,
    analysis: &FieldAnalysis,
    warnings: &[String],
) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let c = &analysis.corners;
    writeln!(w, "forcing: max_g={:.6e} zero_tol={:.6e}", c.g_max, c.zero_tol)?;
    write!(w, "zeros_of_g:")?;
    for y in &c.zeros_of_g {
        write!(w, " y={y:.4}")?;
    }
    writeln!(w)?;
    writeln!(w, "maxima:")?;
    for m in &c.maxima {
        writeln!(
            w,
            "  y={:.4} x={:.4} min_g={:.6e} verdict={}",
            m.y, m.x, m.g_min, m.verdict
        )?;
    }
    writeln!(w, "corner_count: {}", c.corner_count())?;
    writeln!(
        w,
        "nondegeneracy: min_slope={:.6e} verdict={}",
        analysis.trace.min_slope(),
        if analysis.nondegenerate { "pass" } else { "fail" }
    )?;
    if !analysis.trace.boundary_rows.is_empty() {
        writeln!(
            w,
            "warning: {} rows detected within the boundary margin",
            analysis.trace.boundary_rows.len()
        )?;
    }
    for warning in warnings {
        writeln!(w, "warning: {warning}")?;
    }
    Ok(())
}

fn write_sweep_csv(path: &Path, report: &SweepReport) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(
        w,
        "{},status,convergence,nondegenerate,curvature_decay,slope_floor,corners,note",
        report.param
    )?;
    for row in &report.rows {
        match &row.result {
            Ok(s) => {
                let conv = s
                    .convergence
                    .map(|v| v.to_string())
                    .unwrap_or_else(|| "n/a".into());
                writeln!(
                    w,
                    "{},ok,{},{},{},{},{},",
                    row.value,
                    conv,
                    if s.nondegenerate { "yes" } else { "no" },
                    if s.curvature_vanishes { "pass" } else { "fail" },
                    if s.slope_bounded_below { "pass" } else { "fail" },
                    s.corner_count
                )?;
            }
            Err(msg) => {
                writeln!(w, "{},failed,,,,,,\"{}\"", row.value, msg)?;
            }
        }
    }
    if let Some((lo, hi)) = report.corner_bracket {
        writeln!(w, "# corner/no-corner transition bracketed in [{lo},{hi}]")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn tiny_planar_cfg(dir: &Path) -> ExperimentConfig {
        parse_config(&format!(
            "preset = planar-desk\n\
             n_x = 101\n\
             n_y = 26\n\
             m = 1.0\n\
             t_max = 1.0\n\
             snapshot_times = 0.5\n\
             out_dir = {}\n\
             prefix = tiny\n",
            dir.display()
        ))
        .unwrap()
    }

    #[test]
    fn tiny_planar_experiment_writes_all_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny_planar_cfg(dir.path());
        let artifacts = run_experiment(&cfg).unwrap();
        for name in [
            "tiny_steps.csv",
            "tiny_diagnostics.csv",
            "tiny_snapshot_t0.500.csv",
            "tiny_final.csv",
            "tiny_interface.csv",
            "tiny_levelset.csv",
            "tiny_corners.txt",
        ] {
            assert!(dir.path().join(name).exists(), "{name} missing");
        }
        assert!(artifacts.summary.nondegenerate);
        assert_eq!(artifacts.summary.corner_count, 0);
        assert!(artifacts.records.last().unwrap().t >= 1.0);
        // Planar run: interface stays put, slopes equal c.
        assert!(artifacts.analysis.trace.min_slope() > 0.9 * 0.6);
    }

    #[test]
    fn experiment_outputs_are_bitwise_deterministic() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let mut cfg_a = tiny_planar_cfg(dir_a.path());
        let mut cfg_b = tiny_planar_cfg(dir_b.path());
        cfg_a.solver.t_max = 0.3;
        cfg_b.solver.t_max = 0.3;
        run_experiment(&cfg_a).unwrap();
        run_experiment(&cfg_b).unwrap();
        for name in ["tiny_steps.csv", "tiny_diagnostics.csv", "tiny_final.csv", "tiny_interface.csv"] {
            let a = fs::read(dir_a.path().join(name)).unwrap();
            let b = fs::read(dir_b.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs between identical runs");
        }
    }

    #[test]
    fn snapshot_reanalysis_matches_direct_analysis() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny_planar_cfg(dir.path());
        let artifacts = run_experiment(&cfg).unwrap();
        let (summary, analysis) =
            analyze_snapshot(&dir.path().join("tiny_final.csv"), &cfg).unwrap();
        assert_eq!(summary.corner_count, artifacts.summary.corner_count);
        assert_eq!(summary.nondegenerate, artifacts.summary.nondegenerate);
        assert_eq!(
            analysis.trace.positions.columns,
            artifacts.analysis.trace.positions.columns
        );
        assert_eq!(analysis.trace.slopes, artifacts.analysis.trace.slopes);
        assert!(summary.convergence.is_none());
    }

    #[test]
    fn single_value_sweep_matches_run_experiment() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny_planar_cfg(dir.path());
        let direct = run_experiment(&cfg).unwrap();
        let report = sweep(&cfg, SweepParam::M, &[1.0]).unwrap();
        assert_eq!(report.rows.len(), 1);
        let s = report.rows[0].result.as_ref().unwrap();
        assert_eq!(s.corner_count, direct.summary.corner_count);
        assert_eq!(s.nondegenerate, direct.summary.nondegenerate);
        assert!(dir.path().join("tiny_sweep.csv").exists());
    }

    #[test]
    fn c_sweep_flags_inadmissible_values_and_continues() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = parse_config(&format!(
            "n_x = 81\nn_y = 21\nx_max = 4\nt_max = 0.2\nflow = alpha2\nc = 0.5\n\
             out_dir = {}\nprefix = csweep\n",
            dir.path().display()
        ))
        .unwrap();
        cfg.analysis.eps_max = 0.5;
        let report = sweep(&cfg, SweepParam::C, &[0.2, 0.5]).unwrap();
        assert!(report.rows[0].result.is_err(), "c=0.2 <= c* should be rejected");
        assert!(report.rows[1].result.is_ok());
        let text = fs::read_to_string(dir.path().join("csweep_sweep.csv")).unwrap();
        assert!(text.contains("0.2,failed"), "{text}");
    }
}
