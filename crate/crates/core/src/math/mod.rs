//! Deterministic scalar and matrix utilities shared by every other module.

pub mod normal;
pub mod quad;
pub mod rng;
pub mod spd;

pub use normal::{hazard, ln_std_normal_cdf, std_normal_cdf, std_normal_pdf, LN_2PI};
pub use quad::simpson_integrate;
pub use rng::RngStream;
pub use spd::{spd_solve, Cholesky, SpdMatrix};
