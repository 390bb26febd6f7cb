//! Scalar weights, their characteristics, reverse Hölder certificates and openness sweeps.

mod ainfty;
mod averaging;
mod characteristic;
mod lemmas;
mod openness;
mod rh;
mod weight;

pub use ainfty::{ainfty_fit, ainfty_pairs, rh_exponent_from_ainfty, AInftyEstimate, Pair};
pub use averaging::{
    apply_scalar_averaging, averaging_coefficient, default_scalar_tests,
    scalar_averaging_lower_bound, sub_cubes, AveragingBound,
};
pub use characteristic::{
    app_characteristic, app_value, classical_ap_characteristic, classical_ap_value,
};
pub use lemmas::{local_bounds, verify_scalar_lemma, LemmaId, LemmaParams, LemmaReport};
pub(crate) use openness::sweep_with;
pub use openness::{openness_sweep, OpennessRow, OpennessTable};
pub use rh::{
    empirical_rh_exponent, norm_rh_ratio, verify_classical_rh, verify_norm_rh, RhCertificate,
    RhRow, RhSearch, RhStep,
};
pub use weight::{Side, Weight};
