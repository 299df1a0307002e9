//! Stochastic central path solver for linear programs in standard form
//! `min cᵀx s.t. Ax = b, x ≥ 0`.
//!
//! The solver follows the central path `xs ≈ t` with cheap sparse steps whose
//! projections come from a lazily updated inverse ([`ProjectionMaintainer`]),
//! and falls back to exact re-centering when the cosh potential says the
//! iterate drifted too far.
//!
//! ```
//! use stochastic_ipm::{solve, LinearProgram, Matrix, SolverConfig};
//!
//! let a = Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
//! let lp = LinearProgram::new(a, vec![1.0], vec![-1.0, 0.0], 2.0, None).unwrap();
//! let report = solve(&lp, &SolverConfig::default()).unwrap();
//! assert!(report.objective <= -1.0 + 2e-3);
//! ```

pub mod cli;
pub mod error;
pub mod instance;
pub mod linalg;
pub mod lp;
pub mod maintenance;
pub mod oracle;
pub mod potential;
pub mod solver;
pub mod step;

pub use error::{Error, Result};
pub use instance::{parse_instance, random_feasible_lp, read_instance, write_instance, Instance};
pub use linalg::{projection_full, Kernels, Matrix};
pub use lp::{recover_solution, reformulate, LinearProgram, ReformulatedLP};
pub use maintenance::{CounterSnapshot, MaintainerConfig, ProjectionMaintainer};
pub use oracle::{naive_projection_apply, reference_ipm, vertex_enumerate_solve, OracleResult, OracleStatus};
pub use potential::{CoshPotential, SoftErrorPotential, WeightSchedule};
pub use solver::{solve, solve_observed, Mode, SolveReport, SolverConfig};
pub use step::{sample_sparse_direction, stochastic_step, SparseDirection, StepResult};
