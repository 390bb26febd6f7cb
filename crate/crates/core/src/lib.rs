//! Variable-exponent Lebesgue norms and Muckenhoupt-type weight characteristics.
//!
//! The crate computes modulars and Luxemburg norms on cubes, scalar and matrix
//! `A_{p(.)}` characteristics over finite cube families, reducing operators,
//! averaging-operator lower bounds, and reverse Hölder certificates.
//!
//! ```
//! use varexp::prelude::*;
//!
//! let p = Exponent::piecewise(0, 0.0, 2.0, 3.0).unwrap();
//! let q = Cube::interval(-1.0, 1.0).unwrap();
//! let norm = norm_on(&ScalarField::constant(1.0), &p, &q, &NormOptions::default()).unwrap();
//! assert!((norm.value - 1.324717957).abs() < 1e-6);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod characteristic;
pub mod error;
pub mod matrix;
pub mod report;
pub mod spaces;
pub mod varnorm;
pub mod weights;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::characteristic::{CharacteristicReport, Value};
    pub use crate::error::{Error, Result};
    pub use crate::matrix::{MatrixWeight, VectorField};
    pub use crate::spaces::{
        special_cube, Cube, CubeFamily, Cut, Exponent, FamilySpec, IntegrationPlan,
    };
    pub use crate::varnorm::{norm_on, NormOptions, NormResult, ScalarField};
    pub use crate::weights::{Side, Weight};
}
