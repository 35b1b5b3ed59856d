//! Multi-cell NOMA resource optimization under the load-coupling model.
//!
//! Each cell minimizes the fraction of resource units (its *load*) needed to
//! meet per-user demands, given the loads of the other cells. Users sharing a
//! resource unit are decoded with successive interference cancellation in
//! ascending order of effective noise, and that order is recomputed from the
//! current interference every time a cell is solved. The per-cell minimum-load
//! maps are standard interference functions, so the network-wide iteration
//! `rho <- f(rho)` converges to a unique fixed point even when decoding orders
//! change from one iteration to the next.
//!
//! Layout:
//!
//! - [`model`]: network data, effective noise, decoding order, capacity.
//! - [`rate_region`]: power needed for a rate vector under a decoding order,
//!   power-split recovery, the exhaustive order oracle and the per-group
//!   minimum-load solver.
//! - [`single_cell`]: the per-cell map `f_i`, with OMA, fixed, pair (exact
//!   matching) and exhaustive grouping.
//! - [`fixed_point`]: Jacobi / Gauss-Seidel iteration, traces, feasibility and
//!   interference-function probes.
//! - [`scenario`]: 19-cell wrap-around hexagonal networks with COST-231-Hata
//!   path loss, shadowing and Rayleigh fading.
//! - [`experiment`]: the throughput, load, user-count, spectral-efficiency and
//!   convergence studies plus the `verify` property suites.
//!
//! See the crate's `examples/` directory for one runnable program per
//! capability.

pub mod error;
pub mod experiment;
pub mod fixed_point;
pub mod matching;
pub mod model;
pub mod rate_region;
pub mod scenario;
pub mod single_cell;

pub use error::{Error, Result};
pub use fixed_point::{solve, FixedPointSolution, Schedule, SolveConfig};
pub use model::{CellSolution, Group, LoadVector, NetworkModel};
pub use single_cell::{solve_cell, GroupingPolicy};
