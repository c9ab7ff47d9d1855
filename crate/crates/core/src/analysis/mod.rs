//! Checks of the limiting problem and of qualitative eigenfunction
//! properties.
//!
//! Residuals are pointwise: gradients and Hessians come from weighted
//! least-squares quadratics on the 2-ring of each vertex, so the classical
//! form of the equation is evaluated wherever the field is smooth. Touching
//! test functions are not enumerated.

mod fit;
mod properties;
mod residuals;

pub use fit::{quadratic_fit, two_ring, LocalFit};
pub use properties::{
    distance_inequality_check, property_checks, DistanceCheck, PropertyVerdicts, Verdict, HOTSPOT_MESH_SIZES,
    SLOPE_TOL, SYMMETRY_TOL,
};
pub use residuals::{
    fp_residual, infinity_residuals, BandCheck, FpReport, PointResidual, Region, ResidualReport, GRADIENT_FLOOR,
    ZERO_BAND,
};
