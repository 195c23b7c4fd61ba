//! Observation fields and the density functionals built on them: segment
//! averages (GCC), anisotropic rectangle densities and comb densities.

mod comb;
mod field;
mod lines;
mod rectangles;
mod search;

pub use comb::{
    comb_gcc_check, comb_profile, directional_gcc, relative_density_1d, CombCheck, CombProfile, CombSearch,
};
pub use field::{evaluate, Direction, Family, ObservationField};
pub use lines::{gcc_constant, line_average, GccEstimate, LineSegment};
pub use rectangles::{rectangle_density, rectangle_density_inf, RectangleEstimate, RectangleSpec};
pub use search::{DirectionSet, SegmentSearch};
