//! Random streams and the distribution functions used by the tests.

pub mod dist;
pub mod rng;
pub mod special;

pub use dist::{
    chi_square_sf, normal_cdf, normal_quantile, normal_sf, normal_two_sided_p, std_normal,
    student_t, student_t_cdf, student_t_quantile, student_t_sf, student_t_two_sided_cv,
    NormalMode, StudentMode,
};
pub use rng::{CorrelatedPair, RngStream};
