//! Mesh geometry, discrete field storage, and the finite-difference stencils
//! shared by the solver and every diagnostic.
//!
//! The domain is the truncated cylinder [0, x_max] × T¹ discretized by an
//! n_x × n_y node grid with x_i = i·dx and y_j = j·dy (0-based indices).
//! The rows j = 0 and j = n_y−1 are the same circle point, so fields store
//! n_y−1 unique rows and wrap row indices modulo n_y−1; the seam row is
//! reconstructed on output only.

use std::io::{self, BufRead, Write};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("x_max must be positive and finite, got {0}")]
    BadExtent(f64),
    #[error("n_x must be at least 3, got {0}")]
    TooFewColumns(usize),
    #[error("n_y must be at least 4, got {0}")]
    TooFewRows(usize),
}

/// Errors raised while reading a field snapshot from CSV.
#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("snapshot header: {0}")]
    Header(String),
    #[error("snapshot line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("snapshot is incomplete: node ({i},{j}) was never assigned")]
    MissingNode { i: usize, j: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Geometry of the computational cylinder and its mesh increments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    x_max: f64,
    n_x: usize,
    n_y: usize,
    dx: f64,
    dy: f64,
}

impl GridSpec {
    pub fn new(x_max: f64, n_x: usize, n_y: usize) -> Result<Self, GridError> {
        if !x_max.is_finite() || x_max <= 0.0 {
            return Err(GridError::BadExtent(x_max));
        }
        if n_x < 3 {
            return Err(GridError::TooFewColumns(n_x));
        }
        if n_y < 4 {
            return Err(GridError::TooFewRows(n_y));
        }
        let dx = x_max / (n_x - 1) as f64;
        let dy = 1.0 / (n_y - 1) as f64;
        Ok(Self { x_max, n_x, n_y, dx, dy })
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    /// Number of independently stored rows (`n_y − 1`; the seam is implicit).
    pub fn rows(&self) -> usize {
        self.n_y - 1
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.dy
    }

    /// Reduce a signed row index to the stored range [0, n_y−2].
    ///
    /// The result is congruent to `j` modulo n_y−1, which makes the map a
    /// homomorphism of the row circle: wrapping commutes with adding a period.
    #[inline]
    pub fn wrap_row(&self, j: isize) -> usize {
        let m = (self.n_y - 1) as isize;
        (((j % m) + m) % m) as usize
    }
}

/// Metadata carried in the snapshot header line.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMeta {
    pub m: f64,
    pub c: f64,
    pub alpha: String,
    pub t: f64,
}

/// One time slice of the discrete pressure, one `f64` per unique node.
///
/// Values are stored row-major by j (consecutive i within a row) for
/// cache-friendly sweeps in the propagation direction. The container itself
/// does not enforce nonnegativity; the solver guarantees values ≥ 0 after
/// every completed step.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl PressureField {
    pub fn zeros(grid: GridSpec) -> Self {
        let values = vec![0.0; grid.n_x() * grid.rows()];
        Self { grid, values }
    }

    /// Build a field by sampling `f(x, y)` at every unique node.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut field = Self::zeros(grid);
        for j in 0..grid.rows() {
            let y = grid.y(j);
            for i in 0..grid.n_x() {
                field.set(i, j, f(grid.x(i), y));
            }
        }
        field
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.grid.n_x && j < self.grid.rows());
        j * self.grid.n_x + i
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.idx(i, j)]
    }

    /// Read with the row index wrapped modulo n_y−1.
    #[inline]
    pub fn at_wrapped(&self, i: usize, j: isize) -> f64 {
        self.values[self.grid.wrap_row(j) * self.grid.n_x + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.values[k] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |a, &v| if v > a { v } else { a })
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |a, &v| if v < a { v } else { a })
    }

    /// Backward difference in x: (P(i,j) − P(i−1,j))/dx. Requires i ≥ 1.
    #[inline]
    pub fn ddx_backward(&self, i: usize, j: usize) -> f64 {
        assert!(i >= 1, "backward x-difference undefined at the left column");
        (self.at(i, j) - self.at(i - 1, j)) / self.grid.dx
    }

    /// Centered difference in x: (P(i+1,j) − P(i−1,j))/(2dx). Requires interior i.
    #[inline]
    pub fn ddx_centered(&self, i: usize, j: usize) -> f64 {
        assert!(
            i >= 1 && i + 1 < self.grid.n_x,
            "centered x-difference undefined at boundary columns"
        );
        (self.at(i + 1, j) - self.at(i - 1, j)) / (2.0 * self.grid.dx)
    }

    /// Centered difference in y with periodic row wrap.
    #[inline]
    pub fn ddy_centered(&self, i: usize, j: usize) -> f64 {
        let j = j as isize;
        (self.at_wrapped(i, j + 1) - self.at_wrapped(i, j - 1)) / (2.0 * self.grid.dy)
    }

    /// Second difference in x: (P(i+1,j) + P(i−1,j) − 2P(i,j))/dx².
    #[inline]
    pub fn d2dx2(&self, i: usize, j: usize) -> f64 {
        assert!(
            i >= 1 && i + 1 < self.grid.n_x,
            "second x-difference undefined at boundary columns"
        );
        (self.at(i + 1, j) + self.at(i - 1, j) - 2.0 * self.at(i, j)) / (self.grid.dx * self.grid.dx)
    }

    /// Second difference in y with periodic row wrap.
    #[inline]
    pub fn d2dy2(&self, i: usize, j: usize) -> f64 {
        let js = j as isize;
        (self.at_wrapped(i, js + 1) + self.at_wrapped(i, js - 1) - 2.0 * self.at(i, j))
            / (self.grid.dy * self.grid.dy)
    }

    /// Four-point cross stencil:
    /// [(P(i+1,j+1) − P(i+1,j−1)) − (P(i−1,j+1) − P(i−1,j−1))]/(4 dx dy).
    #[inline]
    pub fn d2dxdy(&self, i: usize, j: usize) -> f64 {
        assert!(
            i >= 1 && i + 1 < self.grid.n_x,
            "cross difference undefined at boundary columns"
        );
        let js = j as isize;
        ((self.at_wrapped(i + 1, js + 1) - self.at_wrapped(i + 1, js - 1))
            - (self.at_wrapped(i - 1, js + 1) - self.at_wrapped(i - 1, js - 1)))
            / (4.0 * self.grid.dx * self.grid.dy)
    }

    /// Write the field as CSV: one `#`-prefixed header line, then
    /// n_x·(n_y−1) lines `i,j,x,y,p` in lexicographic (i, j) order with
    /// 1-based indices. Values carry 17 significant digits so a read-back
    /// reproduces the field bit-for-bit.
    pub fn write_snapshot<W: Write>(&self, w: &mut W, meta: &SnapshotMeta) -> io::Result<()> {
        let g = &self.grid;
        writeln!(
            w,
            "# x_max={} n_x={} n_y={} m={} c={} alpha={} t={}",
            g.x_max, g.n_x, g.n_y, meta.m, meta.c, meta.alpha, meta.t
        )?;
        for i in 0..g.n_x {
            for j in 0..g.rows() {
                writeln!(
                    w,
                    "{},{},{:.16e},{:.16e},{:.16e}",
                    i + 1,
                    j + 1,
                    g.x(i),
                    g.y(j),
                    self.at(i, j)
                )?;
            }
        }
        Ok(())
    }

    /// Parse a snapshot produced by [`write_snapshot`](Self::write_snapshot).
    pub fn read_snapshot<R: BufRead>(r: R) -> Result<(Self, SnapshotMeta), SnapshotError> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| SnapshotError::Header("empty file".into()))??;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| SnapshotError::Header("first line must start with '#'".into()))?;

        let mut x_max = None;
        let mut n_x = None;
        let mut n_y = None;
        let mut m = None;
        let mut c = None;
        let mut alpha = None;
        let mut t = None;
        for tok in header.split_whitespace() {
            let (key, val) = tok
                .split_once('=')
                .ok_or_else(|| SnapshotError::Header(format!("malformed token `{tok}`")))?;
            let bad = || SnapshotError::Header(format!("cannot parse `{tok}`"));
            match key {
                "x_max" => x_max = Some(val.parse::<f64>().map_err(|_| bad())?),
                "n_x" => n_x = Some(val.parse::<usize>().map_err(|_| bad())?),
                "n_y" => n_y = Some(val.parse::<usize>().map_err(|_| bad())?),
                "m" => m = Some(val.parse::<f64>().map_err(|_| bad())?),
                "c" => c = Some(val.parse::<f64>().map_err(|_| bad())?),
                "alpha" => alpha = Some(val.to_string()),
                "t" => t = Some(val.parse::<f64>().map_err(|_| bad())?),
                other => {
                    return Err(SnapshotError::Header(format!("unknown header key `{other}`")))
                }
            }
        }
        let missing = |k: &str| SnapshotError::Header(format!("missing header key `{k}`"));
        let grid = GridSpec::new(
            x_max.ok_or_else(|| missing("x_max"))?,
            n_x.ok_or_else(|| missing("n_x"))?,
            n_y.ok_or_else(|| missing("n_y"))?,
        )?;
        let meta = SnapshotMeta {
            m: m.ok_or_else(|| missing("m"))?,
            c: c.ok_or_else(|| missing("c"))?,
            alpha: alpha.ok_or_else(|| missing("alpha"))?,
            t: t.ok_or_else(|| missing("t"))?,
        };

        let mut values = vec![f64::NAN; grid.n_x() * grid.rows()];
        let mut line_no = 1usize;
        for line in lines {
            let line = line?;
            line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let mut next_part = |what: &str| {
                parts.next().ok_or(SnapshotError::Line {
                    line: line_no,
                    msg: format!("missing field `{what}`"),
                })
            };
            let i: usize = next_part("i")?.trim().parse().map_err(|e| SnapshotError::Line {
                line: line_no,
                msg: format!("bad i: {e}"),
            })?;
            let j: usize = next_part("j")?.trim().parse().map_err(|e| SnapshotError::Line {
                line: line_no,
                msg: format!("bad j: {e}"),
            })?;
            let x: f64 = next_part("x")?.trim().parse().map_err(|e| SnapshotError::Line {
                line: line_no,
                msg: format!("bad x: {e}"),
            })?;
            let _y: f64 = next_part("y")?.trim().parse().map_err(|e| SnapshotError::Line {
                line: line_no,
                msg: format!("bad y: {e}"),
            })?;
            let p: f64 = next_part("p")?.trim().parse().map_err(|e| SnapshotError::Line {
                line: line_no,
                msg: format!("bad p: {e}"),
            })?;
            if i < 1 || i > grid.n_x() || j < 1 || j > grid.rows() {
                return Err(SnapshotError::Line {
                    line: line_no,
                    msg: format!("index ({i},{j}) out of range"),
                });
            }
            let (i0, j0) = (i - 1, j - 1);
            if (x - grid.x(i0)).abs() > 1e-9 * grid.x_max().max(1.0) {
                return Err(SnapshotError::Line {
                    line: line_no,
                    msg: format!("x={x} inconsistent with column {i}"),
                });
            }
            values[j0 * grid.n_x() + i0] = p;
        }
        for (k, v) in values.iter().enumerate() {
            if v.is_nan() {
                return Err(SnapshotError::MissingNode {
                    i: k % grid.n_x() + 1,
                    j: k / grid.n_x() + 1,
                });
            }
        }
        Ok((Self { grid, values }, meta))
    }
}
