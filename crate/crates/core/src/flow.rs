//! Benchmark shear flows α(y) on the unit circle, their extrema, and the
//! critical wave speed c* = −min α.
//!
//! All profiles are mean-zero over the period; tabulated custom flows are
//! recentred at construction by subtracting their trapezoid mean.

use std::f64::consts::PI;

use thiserror::Error;

/// Sample count for the dense extrema scan and the quadrature panel floor.
const DENSE_SAMPLES: usize = 10_000;
/// Golden-section interval tolerance for extrema refinement.
const REFINE_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("custom flow needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("custom flow sample {index}: y values must be strictly increasing in [0,1)")]
    SamplesNotIncreasing { index: usize },
    #[error("custom flow sample {index}: y={y} outside [0,1)")]
    SampleOutOfRange { index: usize, y: f64 },
    #[error("custom flow line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("unknown flow `{0}` (expected alpha1, alpha2, alpha3 or zero)")]
    UnknownName(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    /// 0.5·sin(2πy)
    Alpha1,
    /// 10(y²(1−y)² − 1/30)
    Alpha2,
    /// (1/4)·Σ_{k=1..4} sin(2kπy)/k, a four-mode sawtooth truncation
    Alpha3,
    /// α ≡ 0, the planar baseline
    Zero,
    /// Periodic piecewise-linear interpolation of samples, recentred to mean zero
    Tabulated { ys: Vec<f64>, vals: Vec<f64> },
}

/// A shear flow profile: evaluator plus cached extrema.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowProfile {
    name: String,
    shape: Shape,
    alpha_min: f64,
    alpha_max: f64,
}

impl FlowProfile {
    pub fn alpha1() -> Self {
        Self::build("alpha1", Shape::Alpha1)
    }

    pub fn alpha2() -> Self {
        Self::build("alpha2", Shape::Alpha2)
    }

    pub fn alpha3() -> Self {
        Self::build("alpha3", Shape::Alpha3)
    }

    /// The identically-zero flow; realizes the planar-wave baseline.
    pub fn zero() -> Self {
        Self {
            name: "zero".into(),
            shape: Shape::Zero,
            alpha_min: 0.0,
            alpha_max: 0.0,
        }
    }

    pub fn by_name(name: &str) -> Result<Self, FlowError> {
        match name {
            "alpha1" => Ok(Self::alpha1()),
            "alpha2" => Ok(Self::alpha2()),
            "alpha3" => Ok(Self::alpha3()),
            "zero" => Ok(Self::zero()),
            other => Err(FlowError::UnknownName(other.into())),
        }
    }

    /// Build a custom flow from `(y, α)` samples with strictly increasing
    /// y ∈ [0,1). The profile is the periodic linear interpolant, shifted by
    /// its exact trapezoid mean so that it integrates to zero.
    pub fn from_samples(points: &[(f64, f64)]) -> Result<Self, FlowError> {
        if points.len() < 2 {
            return Err(FlowError::TooFewSamples(points.len()));
        }
        for (k, &(y, _)) in points.iter().enumerate() {
            if !(0.0..1.0).contains(&y) {
                return Err(FlowError::SampleOutOfRange { index: k, y });
            }
            if k > 0 && y <= points[k - 1].0 {
                return Err(FlowError::SamplesNotIncreasing { index: k });
            }
        }
        let ys: Vec<f64> = points.iter().map(|p| p.0).collect();
        let mut vals: Vec<f64> = points.iter().map(|p| p.1).collect();
        let mean = periodic_trapezoid_mean(&ys, &vals);
        for v in &mut vals {
            *v -= mean;
        }
        Ok(Self::build_custom(Shape::Tabulated { ys, vals }))
    }

    /// Parse the custom flow CSV: lines `y,alpha`, `#` comments allowed.
    pub fn from_csv(text: &str) -> Result<Self, FlowError> {
        let mut points = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (ys, vs) = line.split_once(',').ok_or_else(|| FlowError::Csv {
                line: k + 1,
                msg: "expected `y,alpha`".into(),
            })?;
            let y: f64 = ys.trim().parse().map_err(|e| FlowError::Csv {
                line: k + 1,
                msg: format!("bad y: {e}"),
            })?;
            let a: f64 = vs.trim().parse().map_err(|e| FlowError::Csv {
                line: k + 1,
                msg: format!("bad alpha: {e}"),
            })?;
            points.push((y, a));
        }
        Self::from_samples(&points)
    }

    fn build(name: &str, shape: Shape) -> Self {
        let mut p = Self {
            name: name.into(),
            shape,
            alpha_min: 0.0,
            alpha_max: 0.0,
        };
        let (lo, hi) = p.extrema();
        p.alpha_min = lo;
        p.alpha_max = hi;
        p
    }

    fn build_custom(shape: Shape) -> Self {
        let mut p = Self {
            name: "custom".into(),
            shape,
            alpha_min: 0.0,
            alpha_max: 0.0,
        };
        let (lo, hi) = p.extrema();
        p.alpha_min = lo;
        p.alpha_max = hi;
        p
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Evaluate α at y; the argument is wrapped into [0,1).
    pub fn eval(&self, y: f64) -> f64 {
        let y = y - y.floor();
        match &self.shape {
            Shape::Alpha1 => 0.5 * (2.0 * PI * y).sin(),
            Shape::Alpha2 => 10.0 * (y * y * (1.0 - y) * (1.0 - y) - 1.0 / 30.0),
            Shape::Alpha3 => {
                0.25 * (1..=4).map(|k| (2.0 * PI * k as f64 * y).sin() / k as f64).sum::<f64>()
            }
            Shape::Zero => 0.0,
            Shape::Tabulated { ys, vals } => {
                // Find the segment containing y; the last segment wraps to
                // the first sample one period later.
                let k = match ys.binary_search_by(|v| v.partial_cmp(&y).unwrap()) {
                    Ok(k) => return vals[k],
                    Err(0) => ys.len() - 1, // y below first sample: wrapped segment
                    Err(k) => k - 1,
                };
                let (y0, v0) = (ys[k], vals[k]);
                let (y1, v1) = if k + 1 < ys.len() {
                    (ys[k + 1], vals[k + 1])
                } else {
                    (ys[0] + 1.0, vals[0])
                };
                let y = if y < y0 { y + 1.0 } else { y };
                v0 + (v1 - v0) * (y - y0) / (y1 - y0)
            }
        }
    }

    /// Minimum of α over the period.
    pub fn alpha_min(&self) -> f64 {
        self.alpha_min
    }

    /// Sup-norm ‖α‖∞ over the period.
    pub fn sup_norm(&self) -> f64 {
        self.alpha_min.abs().max(self.alpha_max.abs())
    }

    /// Critical wave speed c* = −min α. Admissible speeds satisfy c > c*.
    ///
    /// Flows with min α ≥ 0 have no positive critical speed (the planar
    /// zero flow among them); see [`has_positive_critical_speed`](Self::has_positive_critical_speed).
    pub fn critical_speed(&self) -> f64 {
        -self.alpha_min
    }

    /// Whether the flow actually selects a positive threshold speed.
    pub fn has_positive_critical_speed(&self) -> bool {
        self.critical_speed() > 0.0
    }

    /// |∫₀¹ α(y) dy| under composite quadrature with ≥ 10⁴ panels.
    pub fn mean_residual(&self) -> f64 {
        match &self.shape {
            Shape::Tabulated { ys, .. } => {
                // The interpolant is piecewise linear, so a trapezoid rule
                // subdivided inside each knot interval is exact.
                let per_knot = DENSE_SAMPLES / ys.len() + 1;
                let mut total = 0.0;
                for k in 0..ys.len() {
                    let y0 = ys[k];
                    let y1 = if k + 1 < ys.len() { ys[k + 1] } else { ys[0] + 1.0 };
                    let h = (y1 - y0) / per_knot as f64;
                    for s in 0..per_knot {
                        let a = y0 + s as f64 * h;
                        total += 0.5 * h * (self.eval(a) + self.eval(a + h));
                    }
                }
                total.abs()
            }
            _ => {
                // Composite Simpson over [0,1] with 2·10⁴ panels.
                let n = 2 * DENSE_SAMPLES;
                let h = 1.0 / n as f64;
                let mut sum = self.eval(0.0) + self.eval(1.0 - 1e-15);
                for k in 1..n {
                    let w = if k % 2 == 1 { 4.0 } else { 2.0 };
                    sum += w * self.eval(k as f64 * h);
                }
                (sum * h / 3.0).abs()
            }
        }
    }

    /// Dense scan plus golden-section refinement of both extrema.
    fn extrema(&self) -> (f64, f64) {
        let n = DENSE_SAMPLES;
        let h = 1.0 / n as f64;
        let (mut kmin, mut kmax) = (0usize, 0usize);
        let (mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..n {
            let v = self.eval(k as f64 * h);
            if v < vmin {
                vmin = v;
                kmin = k;
            }
            if v > vmax {
                vmax = v;
                kmax = k;
            }
        }
        // Refine within the bracketing neighbours; eval wraps, so brackets
        // may extend below 0 or above 1.
        let lo = golden_min(|y| self.eval(y), (kmin as f64 - 1.0) * h, (kmin as f64 + 1.0) * h);
        let hi = -golden_min(|y| -self.eval(y), (kmax as f64 - 1.0) * h, (kmax as f64 + 1.0) * h);
        (lo.min(vmin), hi.max(vmax))
    }
}

/// Mean of the periodic linear interpolant by the (exact) trapezoid rule.
fn periodic_trapezoid_mean(ys: &[f64], vals: &[f64]) -> f64 {
    let n = ys.len();
    let mut total = 0.0;
    for k in 0..n {
        let y1 = if k + 1 < n { ys[k + 1] } else { ys[0] + 1.0 };
        let v1 = vals[(k + 1) % n];
        total += 0.5 * (y1 - ys[k]) * (vals[k] + v1);
    }
    total
}

/// Golden-section minimum value of `f` on [a, b].
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > REFINE_TOL {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    f1.min(f2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        assert!((FlowProfile::alpha1().eval(0.25) - 0.5).abs() < 1e-15);
        // alpha2(0.5) = 10(1/16 - 1/30) = 7/24
        assert!((FlowProfile::alpha2().eval(0.5) - 7.0 / 24.0).abs() < 1e-14);
        assert_eq!(FlowProfile::alpha3().eval(0.0), 0.0);
        assert_eq!(FlowProfile::zero().eval(0.73), 0.0);
    }

    #[test]
    fn eval_wraps_the_period() {
        let f = FlowProfile::alpha2();
        assert!((f.eval(1.25) - f.eval(0.25)).abs() < 1e-14);
        assert!((f.eval(-0.75) - f.eval(0.25)).abs() < 1e-14);
    }

    #[test]
    fn critical_speeds_of_builtins() {
        assert!((FlowProfile::alpha1().critical_speed() - 0.5).abs() < 1e-8);
        assert!((FlowProfile::alpha2().critical_speed() - 1.0 / 3.0).abs() < 1e-8);
        // min of alpha3 sits at y = 0.9 (angle pi/5 below the period), value
        // -(sin36 + sin72/2 + sin108/3 + sin144/4)/4.
        let expected = -(0.2 * PI).sin() / 4.0
            - (0.4 * PI).sin() / 8.0
            - (0.6 * PI).sin() / 12.0
            - (0.8 * PI).sin() / 16.0;
        assert!((FlowProfile::alpha3().critical_speed() + expected).abs() < 1e-8);
        assert!((FlowProfile::alpha3().critical_speed() - 0.381_819_665_5).abs() < 1e-8);
        // Paper-scale runs use c = 0.6 / 0.4 for these flows; both admissible.
        assert!(0.6 > FlowProfile::alpha1().critical_speed());
        assert!(0.4 > FlowProfile::alpha2().critical_speed());
        assert!(0.4 > FlowProfile::alpha3().critical_speed());
    }

    #[test]
    fn dense_scan_agrees_with_refined_minimum() {
        // Independent coarse oracle: plain scan without refinement.
        for flow in [FlowProfile::alpha1(), FlowProfile::alpha2(), FlowProfile::alpha3()] {
            let scan = (0..200_000)
                .map(|k| flow.eval(k as f64 / 200_000.0))
                .fold(f64::INFINITY, f64::min);
            assert!((flow.critical_speed() + scan).abs() < 1e-8, "{}", flow.name());
        }
    }

    #[test]
    fn builtin_flows_are_mean_zero() {
        assert!(FlowProfile::alpha1().mean_residual() < 1e-12);
        assert!(FlowProfile::alpha3().mean_residual() < 1e-12);
        // \int y^2(1-y)^2 dy = 1/30 exactly, so alpha2 is mean zero as well.
        assert!(FlowProfile::alpha2().mean_residual() < 1e-10);
    }

    #[test]
    fn builtin_extrema_invariants() {
        for flow in [FlowProfile::alpha1(), FlowProfile::alpha2(), FlowProfile::alpha3()] {
            assert!(flow.critical_speed() > 0.0);
            assert!(flow.has_positive_critical_speed());
            assert!(flow.sup_norm() >= -flow.alpha_min());
        }
        assert!(!FlowProfile::zero().has_positive_critical_speed());
    }

    #[test]
    fn custom_flow_recentred_and_interpolated() {
        let f = FlowProfile::from_samples(&[(0.0, 1.0), (0.25, 3.0), (0.5, 1.0), (0.75, -1.0)])
            .unwrap();
        assert_eq!(f.name(), "custom");
        // Mean of the raw interpolant is 1, so samples shift down by 1.
        assert!((f.eval(0.25) - 2.0).abs() < 1e-12);
        assert!((f.eval(0.125) - 1.0).abs() < 1e-12);
        // Wrapped segment from y=0.75 back to y=0 (value 0 at both ends).
        assert!((f.eval(0.875) + 1.0).abs() < 1e-12);
        assert!(f.mean_residual() < 1e-10);
    }

    #[test]
    fn custom_flow_validation() {
        assert!(matches!(
            FlowProfile::from_samples(&[(0.0, 1.0)]),
            Err(FlowError::TooFewSamples(1))
        ));
        assert!(matches!(
            FlowProfile::from_samples(&[(0.0, 1.0), (0.0, 2.0)]),
            Err(FlowError::SamplesNotIncreasing { index: 1 })
        ));
        assert!(matches!(
            FlowProfile::from_samples(&[(0.0, 1.0), (1.0, 2.0)]),
            Err(FlowError::SampleOutOfRange { index: 1, .. })
        ));
        assert!(FlowProfile::from_csv("0.0,1.0\n# comment\n0.5,-1.0\n").is_ok());
        assert!(matches!(
            FlowProfile::from_csv("0.0;1.0\n"),
            Err(FlowError::Csv { line: 1, .. })
        ));
    }

    #[test]
    fn grid_row_samples_match_single_evaluator() {
        // The solver caches per-row alpha values by calling eval once per
        // row; re-evaluating must reproduce them bit-for-bit.
        let flow = FlowProfile::alpha3();
        let g = crate::grid::GridSpec::new(1.0, 5, 33).unwrap();
        let cached: Vec<f64> = (0..g.rows()).map(|j| flow.eval(g.y(j))).collect();
        for j in 0..g.rows() {
            assert_eq!(cached[j], flow.eval(g.y(j)));
        }
    }
}
