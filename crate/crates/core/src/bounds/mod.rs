//! Jensen-gap and AM–GM bounds, Hermite–Hadamard weights and sequences,
//! squeeze bounds and the quadrature that backs the integral checks.

mod func;
mod gap;
mod hh;
mod poly;
mod quad;

pub use func::{Func1D, REGISTRY};
pub use gap::{amgm_bound, jensen_gap_bound, two_point_gap, AmGmBound, GapBound, BISECTION_TOL, MONOTONE_SAMPLES};
pub use hh::{
    hh_sequences, hh_weights_density, hh_weights_discrete, natural_assignment, sharpened_hh_upper,
    sharpened_hh_upper_exact, squeeze_bounds, HhSequences, PartitionWeights, Squeeze,
};
pub use poly::{PiecewisePoly, MAX_DEGREE};
pub use quad::{adaptive_simpson, quad_mean_func, quad_mean_poly, SIMPSON_TOL};
