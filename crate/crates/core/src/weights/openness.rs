use serde::{Deserialize, Serialize};

use super::characteristic::app_characteristic;
use super::weight::{Side, Weight};
use crate::characteristic::{CharacteristicReport, Value};
use crate::error::{Error, Result};
use crate::spaces::{CubeFamily, Exponent};
use crate::varnorm::NormOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpennessRow {
    pub s: f64,
    pub sup_value: Value,
    pub divergent: bool,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpennessTable {
    pub side: Side,
    pub rows: Vec<OpennessRow>,
    /// First `s` in the grid with a divergent characteristic.
    pub boundary: Option<f64>,
}

pub(crate) fn sweep_with(
    p: &Exponent,
    s_grid: &[f64],
    side: Side,
    mut characteristic: impl FnMut(&Exponent) -> Result<CharacteristicReport>,
) -> Result<OpennessTable> {
    match side {
        Side::Right => p.require_bounded()?,
        Side::Left if !(p.p_minus() > 1.0) => {
            return Err(Error::UnboundedConjugate(
                "left openness needs p_minus > 1".into(),
            ))
        }
        Side::Left => {}
    }
    if let Some(s) = s_grid.iter().find(|s| !(**s >= 1.0) || !s.is_finite()) {
        return Err(Error::invalid(format!(
            "openness parameters must be >= 1, got {s}"
        )));
    }
    let mut rows = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let report = characteristic(&side.exponent(p, s)?)?;
        rows.push(OpennessRow {
            s,
            sup_value: report.sup_value,
            divergent: report.divergent,
            reason: report.divergence_reason,
        });
    }
    let boundary = rows.iter().find(|r| r.divergent).map(|r| r.s);
    Ok(OpennessTable {
        side,
        rows,
        boundary,
    })
}

/// Scalar characteristic of `w` for `s p(.)` (right) or `q(.)` with `q' = s p'` (left).
pub fn openness_sweep(
    w: &Weight,
    p: &Exponent,
    s_grid: &[f64],
    family: &CubeFamily,
    side: Side,
    cap: f64,
    opts: &NormOptions,
) -> Result<OpennessTable> {
    sweep_with(p, s_grid, side, |q| {
        app_characteristic(w, q, family, cap, opts)
    })
}
