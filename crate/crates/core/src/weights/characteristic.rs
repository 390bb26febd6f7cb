use rayon::prelude::*;

use super::weight::Weight;
use crate::characteristic::{CharacteristicReport, Value};
use crate::error::{Error, Result};
use crate::spaces::{integrate_cube, Cube, CubeFamily, Exponent, IntegrationPlan};
use crate::varnorm::{norm_on, NormOptions};

/// `|Q|^{-1} ‖wχ_Q‖_p ‖w^{-1}χ_Q‖_{p'}`.
pub fn app_value(w: &Weight, p: &Exponent, q: &Cube, opts: &NormOptions) -> Result<f64> {
    let pc = p.conjugate();
    pc.require_bounded()?;
    let a = norm_on(&w.field(), p, q, opts)?.value;
    let b = norm_on(&w.inverse().field(), &pc, q, opts)?.value;
    Ok(a * b / q.measure())
}

/// Scalar `A_{p(.)}` characteristic over a family.
pub fn app_characteristic(
    w: &Weight,
    p: &Exponent,
    family: &CubeFamily,
    cap: f64,
    opts: &NormOptions,
) -> Result<CharacteristicReport> {
    p.require_bounded()?;
    p.conjugate().require_bounded()?;
    let values = family
        .cubes
        .par_iter()
        .map(|q| Value::from_result(app_value(w, p, q, opts)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CharacteristicReport::assemble(family, values, cap))
}

pub(crate) fn average(w: &Weight, t: f64, q: &Cube, opts: &NormOptions) -> Result<f64> {
    let f = w.field();
    let plan = IntegrationPlan::new(q.dim())
        .with_rtol(opts.rtol)
        .with_singular_points(w.singular_points());
    Ok(integrate_cube(|x| f.eval(x).powf(t), q, &plan)? / q.measure())
}

/// `⨍_Q v (⨍_Q v^{1-p'})^{p-1}`.
pub fn classical_ap_value(v: &Weight, p0: f64, q: &Cube, opts: &NormOptions) -> Result<f64> {
    if !(p0 > 1.0) || !p0.is_finite() {
        return Err(Error::invalid(format!(
            "classical A_p needs 1 < p < ∞, got {p0}"
        )));
    }
    let pc = p0 / (p0 - 1.0);
    Ok(average(v, 1.0, q, opts)? * average(v, 1.0 - pc, q, opts)?.powf(p0 - 1.0))
}

/// Classical `A_p` characteristic over a family.
pub fn classical_ap_characteristic(
    v: &Weight,
    p0: f64,
    family: &CubeFamily,
    cap: f64,
    opts: &NormOptions,
) -> Result<CharacteristicReport> {
    if !(p0 > 1.0) || !p0.is_finite() {
        return Err(Error::invalid(format!(
            "classical A_p needs 1 < p < ∞, got {p0}"
        )));
    }
    let values = family
        .cubes
        .par_iter()
        .map(|q| Value::from_result(classical_ap_value(v, p0, q, opts)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CharacteristicReport::assemble(family, values, cap))
}
