//! Finite-difference computation of traveling-wave profiles for the
//! degenerate porous-medium advection-diffusion equation on a truncated
//! periodic cylinder, plus the diagnostic stack that tracks the free
//! boundary, validates its nondegeneracy along descending levelsets, and
//! classifies Lipschitz corners through the induced Hamilton-Jacobi forcing.
//!
//! Pipeline: [`solver`] evolves the pressure in the wave frame until the
//! profile is steady up to a slow drift, [`diagnostics`] measures residuals
//! and the drift rate, and [`interface`] detects the free boundary and runs
//! the regularity analyses. [`experiment`] wires the pieces together behind
//! the `pmwave` CLI.

pub mod config;
pub mod diagnostics;
pub mod experiment;
pub mod flow;
pub mod grid;
pub mod interface;
pub mod solver;

pub use config::{parse_config, ExperimentConfig};
pub use flow::FlowProfile;
pub use grid::{GridSpec, PressureField, SnapshotMeta};
pub use solver::{cfl_dt, initial_datum, run, step, SolverConfig};
