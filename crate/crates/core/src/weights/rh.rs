use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::characteristic::average;
use super::weight::Weight;
use crate::characteristic::Value;
use crate::error::{Error, Result};
use crate::spaces::{harmonic_mean, Cube, CubeFamily, Exponent};
use crate::varnorm::{norm_on, NormOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhRow {
    pub cube: Cube,
    pub ratio: Value,
    pub pass: bool,
}

/// Outcome of a reverse Hölder check over a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhCertificate {
    pub r: f64,
    /// Largest per-cube ratio.
    pub minimal_c: Value,
    pub budget: f64,
    /// First divergent cube, else the cube attaining `minimal_c`.
    pub witness: Option<Cube>,
    pub verified: bool,
    pub rows: Vec<RhRow>,
}

fn certify(r: f64, budget: f64, family: &CubeFamily, ratios: Vec<Value>) -> RhCertificate {
    let rows: Vec<RhRow> = family
        .cubes
        .iter()
        .zip(ratios)
        .map(|(q, ratio)| RhRow {
            cube: q.clone(),
            pass: ratio.finite().is_some_and(|v| v <= budget),
            ratio,
        })
        .collect();
    let witness = rows
        .iter()
        .find(|row| row.ratio.is_divergent())
        .or_else(|| {
            rows.iter()
                .max_by(|a, b| a.ratio.as_f64().total_cmp(&b.ratio.as_f64()))
        })
        .map(|row| row.cube.clone());
    let minimal_c = Value::from_f64(
        rows.iter()
            .map(|row| row.ratio.as_f64())
            .fold(0.0, f64::max),
    );
    RhCertificate {
        r,
        minimal_c,
        budget,
        witness,
        verified: rows.iter().all(|row| row.pass),
        rows,
    }
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 1.0) || !r.is_finite() {
        return Err(Error::invalid(format!("r must be finite and > 1, got {r}")));
    }
    Ok(())
}

/// `⨍_Q v^r / (⨍_Q v)^r` per cube, checked against the constant 2.
pub fn verify_classical_rh(
    v: &Weight,
    r: f64,
    family: &CubeFamily,
    opts: &NormOptions,
) -> Result<RhCertificate> {
    check_r(r)?;
    let ratios = family
        .cubes
        .par_iter()
        .map(|q| {
            Value::from_result(
                average(v, r, q, opts).and_then(|a| Ok(a / average(v, 1.0, q, opts)?.powf(r))),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(certify(r, 2.0, family, ratios))
}

/// `|Q|^{-1/(r p_Q)} ‖wχ_Q‖_{rp} / (|Q|^{-1/p_Q} ‖wχ_Q‖_p)`.
pub fn norm_rh_ratio(
    w: &Weight,
    p: &Exponent,
    r: f64,
    q: &Cube,
    opts: &NormOptions,
) -> Result<f64> {
    let rp = p.scale(r)?;
    let pq = harmonic_mean(p, q)?;
    let m = q.measure();
    let f = w.field();
    let top = m.powf(-1.0 / (r * pq)) * norm_on(&f, &rp, q, opts)?.value;
    let bottom = m.powf(-1.0 / pq) * norm_on(&f, p, q, opts)?.value;
    Ok(top / bottom)
}

/// Per-cube norm reverse Hölder ratios checked against `budget`.
pub fn verify_norm_rh(
    w: &Weight,
    p: &Exponent,
    r: f64,
    family: &CubeFamily,
    budget: f64,
    opts: &NormOptions,
) -> Result<RhCertificate> {
    check_r(r)?;
    p.require_bounded()?;
    let ratios = family
        .cubes
        .par_iter()
        .map(|q| Value::from_result(norm_rh_ratio(w, p, r, q, opts)))
        .collect::<Result<Vec<_>>>()?;
    Ok(certify(r, budget, family, ratios))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhStep {
    pub r: f64,
    pub minimal_c: Value,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhSearch {
    pub r_star: f64,
    pub history: Vec<RhStep>,
    /// Pairs `r_1 < r_2` in the history where `r_2` passed but `r_1` failed.
    pub monotonicity_violations: usize,
}

/// Largest `r` in `(1, r_cap]` found by 20 bisection steps with
/// `minimal_c(r) <= budget`, assuming the pass set is an interval.
pub fn empirical_rh_exponent(
    w: &Weight,
    p: &Exponent,
    budget: f64,
    family: &CubeFamily,
    tol: f64,
    r_cap: f64,
    opts: &NormOptions,
) -> Result<RhSearch> {
    if !(tol > 0.0) || !(r_cap > 1.0 + tol) {
        return Err(Error::invalid("need tol > 0 and r_cap > 1 + tol"));
    }
    let mut history = Vec::new();
    let mut step = |r: f64| -> Result<bool> {
        let c = verify_norm_rh(w, p, r, family, budget, opts)?;
        history.push(RhStep {
            r,
            minimal_c: c.minimal_c,
            pass: c.verified,
        });
        Ok(c.verified)
    };
    let mut lo = 1.0 + tol;
    if !step(lo)? {
        return Err(Error::NoCertificate(format!(
            "norm reverse Hölder fails at r = {lo} with budget {budget}"
        )));
    }
    let mut hi = r_cap;
    if step(hi)? {
        lo = hi;
    } else {
        for _ in 0..20 {
            let mid = 0.5 * (lo + hi);
            if step(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let mut violations = 0;
    for a in &history {
        for b in &history {
            if a.r < b.r && !a.pass && b.pass {
                violations += 1;
            }
        }
    }
    Ok(RhSearch {
        r_star: lo,
        history,
        monotonicity_violations: violations,
    })
}
