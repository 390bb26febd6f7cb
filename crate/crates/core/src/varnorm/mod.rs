//! Modulars, Luxemburg norms and the constant lemmas of variable Lebesgue spaces.

mod field;
mod lemmas;
mod norm;

pub use field::ScalarField;
pub use lemmas::{
    char_function_bounds, generalized_holder_ratio, holder_bound, holder_defect,
    large_cube_constants, one_characteristic, remainder_check, CharBound, RemainderCase,
    RemainderReport,
};
pub(crate) use norm::norm_on_grid;
pub use norm::{
    luxemburg_norm, modular, modular_with, norm_on, weighted_norm, NormOptions, NormResult,
};
