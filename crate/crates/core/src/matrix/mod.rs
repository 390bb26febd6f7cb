//! Matrix weights: operator norms, nested characteristics, reducing operators
//! and averaging operators.

mod averaging;
mod characteristic;
mod grid;
mod linalg;
mod reducing;
mod weight;

pub use averaging::{
    apply_aux_averaging, apply_averaging, aux_averaging_norm_lower_bound, averaged_inverse,
    averaging_norm_lower_bound, default_matrix_tests, vector_norm,
};
pub use characteristic::{
    directional_weight, matrix_app_characteristic, matrix_app_value, matrix_openness_sweep,
    matrix_to_scalar_check, reduced_characteristic, reduced_value, MatrixToScalar,
};
pub use linalg::{is_spd, op_norm, sqrt_psd};
pub use reducing::{reducing_operator, DirectionalNorm, ReduceOptions, ReducingOperator};
pub use weight::{MatrixWeight, VectorField};
