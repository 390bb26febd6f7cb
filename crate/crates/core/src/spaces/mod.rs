//! Cubes, exponent functions, cube families and quadrature.

mod cube;
mod exponent;
mod family;
mod quadrature;

pub use cube::{special_cube, Cube};
pub use exponent::{
    conjugate_value, diening_constant, estimate_lh_constants, harmonic_mean, sample_grid, Exponent,
    ExponentMeta, LhEstimate,
};
pub use family::{Anchor, CubeFamily, CubeTag, DyadicSpec, FamilySpec, RandomSpec, ShrinkSpec};
pub(crate) use quadrature::adaptive_grid;
pub use quadrature::{gauss_legendre, integrate_cube, Cut, Grid, Integral, IntegrationPlan};
