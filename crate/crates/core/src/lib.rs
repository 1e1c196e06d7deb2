//! Grid-discretized convex analysis: power means, sup-convolutions
//! (Asplund sums), projections, Steiner and Schwarz symmetrizations, and a
//! harness that checks Prékopa–Leindler and Borell–Brascamp–Lieb type
//! inequalities on sampled functions.
//!
//! ```
//! use asplund::{sup_convolution, Grid, GridSet, Lambda, PParam};
//!
//! let grid = |n| Grid::from_step(&[0.0], &[0.25], &[n]).unwrap();
//! let f = GridSet::from_fn(grid(5), |_| true).indicator(); // [0, 1]
//! let g = GridSet::from_fn(grid(9), |_| true).indicator(); // [0, 2]
//! let c = sup_convolution(&f, &g, Lambda::half(), PParam::Finite(0.0)).unwrap();
//! assert_eq!(c.grid().coord(0, c.grid().count(0) as i64 - 1), 1.5);
//! ```

pub mod convolution;
pub mod error;
pub mod format;
pub mod generators;
pub mod grid;
pub mod means;
pub mod sum;
pub mod transform;
pub mod verify;

pub use convolution::{
    combined_grid, inf_convolution, minkowski_combine, sup_convolution, sup_convolution_bruteforce, PotentialFn,
};
pub use error::{Error, Result};
pub use grid::{Grid, GridFn, GridSet};
pub use means::{dual_exponent, mp_mean, ExtNonNeg, Lambda, PParam};
pub use transform::{project, project_set, schwarz_fn, steiner_fn, steiner_set, truncate_infinite};
pub use verify::{Report, ScanReport, Verdict};
