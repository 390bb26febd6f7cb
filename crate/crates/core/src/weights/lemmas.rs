use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ainfty::Pair;
use super::characteristic::app_characteristic;
use super::rh::{norm_rh_ratio, verify_norm_rh};
use super::weight::Weight;
use crate::characteristic::{Value, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::spaces::{Cube, CubeFamily, Cut, Exponent};
use crate::varnorm::{
    holder_bound, norm_on, one_characteristic, remainder_check, NormOptions, RemainderCase,
    ScalarField,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LemmaId {
    SetRatio,
    WtdDiening,
    AinftyL2,
    Remainder,
    Collapse,
}

impl std::str::FromStr for LemmaId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_ascii_uppercase()))
            .map_err(|_| Error::invalid(format!("unknown lemma id {s}")))
    }
}

/// Extra parameters; only `COLLAPSE` reads them (`1 < s < r`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaParams {
    pub r: f64,
    pub s: f64,
}

impl Default for LemmaParams {
    fn default() -> Self {
        LemmaParams { r: 1.2, s: 1.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub id: LemmaId,
    /// Smallest constant making the inequality hold on the sample.
    pub multiplier: Value,
    /// Explicit factor the multiplier is compared against, when there is one.
    pub structural_factor: Option<f64>,
    pub passes: bool,
    pub witness: Option<Cube>,
    pub samples: usize,
    pub divergent: Vec<Cube>,
}

/// Min and max of `p` on a uniform lattice over `q`.
pub fn local_bounds(p: &Exponent, q: &Cube) -> (f64, f64) {
    let n = q.dim();
    let m: usize = if n == 1 {
        33
    } else if n == 2 {
        17
    } else {
        9
    };
    let lo = q.lower();
    let mut x = vec![0.0; n];
    let (mut a, mut b) = (f64::INFINITY, f64::NEG_INFINITY);
    for idx in 0..m.pow(n as u32) {
        let mut k = idx;
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = lo[i] + q.side * (k % m) as f64 / (m - 1) as f64;
            k /= m;
        }
        let v = p.eval(&x);
        a = a.min(v);
        b = b.max(v);
    }
    (a, b)
}

fn union_indicator(e: &[Cube]) -> ScalarField {
    let cubes = e.to_vec();
    let cuts: Vec<Cut> = e
        .iter()
        .flat_map(|c| {
            let (lo, hi) = (c.lower(), c.upper());
            (0..c.dim())
                .flat_map(move |axis| [Cut { axis, at: lo[axis] }, Cut { axis, at: hi[axis] }])
        })
        .collect();
    ScalarField::new(move |x| {
        if cubes.iter().any(|c| c.contains(x)) {
            1.0
        } else {
            0.0
        }
    })
    .with_cuts(cuts)
}

fn unique_cubes(pairs: &[Pair]) -> Vec<Cube> {
    let mut out: Vec<Cube> = Vec::new();
    for p in pairs {
        if !out.contains(&p.q) {
            out.push(p.q.clone());
        }
    }
    out
}

fn finish(
    id: LemmaId,
    values: Vec<(Cube, Value)>,
    scale: f64,
    structural: Option<f64>,
    limit: Option<f64>,
) -> LemmaReport {
    let divergent: Vec<Cube> = values
        .iter()
        .filter(|(_, v)| v.is_divergent())
        .map(|(q, _)| q.clone())
        .collect();
    let mut best = 0.0;
    let mut witness = None;
    for (q, v) in &values {
        if v.as_f64() > best {
            best = v.as_f64();
            witness = Some(q.clone());
        }
    }
    let multiplier = Value::from_f64(best / scale);
    let passes = match (multiplier, limit) {
        (Value::Divergent, _) => false,
        (Value::Finite(m), Some(l)) => m <= l * (1.0 + 1e-9),
        (Value::Finite(_), None) => true,
    };
    LemmaReport {
        id,
        multiplier,
        structural_factor: structural,
        passes,
        witness,
        samples: values.len(),
        divergent,
    }
}

fn weight_char(w: &Weight, p: &Exponent, cubes: Vec<Cube>, opts: &NormOptions) -> Result<f64> {
    let fam = CubeFamily::from_cubes(cubes)?;
    Ok(app_characteristic(w, p, &fam, DEFAULT_CAP, opts)?
        .sup_value
        .as_f64())
}

/// Fit the constant of one of the scalar lemmas over a sample.
pub fn verify_scalar_lemma(
    id: LemmaId,
    w: &Weight,
    p: &Exponent,
    family: &CubeFamily,
    pairs: &[Pair],
    params: LemmaParams,
    opts: &NormOptions,
) -> Result<LemmaReport> {
    p.require_bounded()?;
    let wf = w.field();
    let needs_pairs = matches!(id, LemmaId::SetRatio | LemmaId::AinftyL2);
    if needs_pairs && pairs.is_empty() {
        return Err(Error::invalid("this lemma needs E ⊂ Q pairs"));
    }
    match id {
        LemmaId::SetRatio => {
            let k = holder_bound(p);
            let wc = weight_char(w, p, unique_cubes(pairs), opts)?;
            let values = pairs
                .par_iter()
                .map(|pair| {
                    let v = Value::from_result((|| {
                        let nq = norm_on(&wf, p, &pair.q, opts)?.value;
                        let ne =
                            norm_on(&wf.mul(&union_indicator(&pair.e)), p, &pair.q, opts)?.value;
                        Ok(pair.e_measure() / pair.q.measure() * nq / ne)
                    })())?;
                    Ok((pair.q.clone(), v))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(finish(id, values, 1.0, Some(k * wc), Some(k * wc)))
        }
        LemmaId::WtdDiening => {
            let wc = weight_char(w, p, family.cubes.clone(), opts)?;
            let structural = wc.powf(p.p_plus() - p.p_minus());
            let values = family
                .cubes
                .par_iter()
                .map(|q| {
                    let (lo, hi) = local_bounds(p, q);
                    let v = Value::from_result(
                        norm_on(&wf, p, q, opts).map(|n| n.value.powf(lo - hi)),
                    )?;
                    Ok((q.clone(), v))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(finish(id, values, structural, Some(structural), None))
        }
        LemmaId::AinftyL2 => {
            let wc = weight_char(w, p, unique_cubes(pairs), opts)?;
            let m = p.meta();
            let structural = wc.powf(1.0 + 2.0 * m.c_inf * m.p_plus / (m.p_infty * m.p_minus));
            let delta = 1.0 / m.p_plus;
            let values = pairs
                .par_iter()
                .map(|pair| {
                    let v = Value::from_result((|| {
                        let wq = w.measure(p, std::slice::from_ref(&pair.q), opts)?;
                        let we = w.measure(p, &pair.e, opts)?;
                        if we <= 0.0 {
                            return Ok(0.0);
                        }
                        Ok(pair.e_measure() / pair.q.measure() * (wq / we).powf(delta))
                    })())?;
                    Ok((pair.q.clone(), v))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(finish(id, values, structural, Some(structural), None))
        }
        LemmaId::Remainder => {
            let n = family.dim() as f64;
            let pp = p.clone();
            let density = ScalarField::new({
                let wf = wf.clone();
                move |x| wf.eval(x).powf(pp.eval(x))
            })
            .with_singular_points(w.singular_points())
            .with_cuts(p.cuts());
            let mut cases = Vec::new();
            for q in &family.cubes {
                for t in [0.5, 1.0, 2.0] {
                    cases.push(RemainderCase {
                        cube: q.clone(),
                        t,
                        f: ScalarField::constant(0.5),
                    });
                    cases.push(RemainderCase {
                        cube: q.clone(),
                        t,
                        f: ScalarField::new(move |x| {
                            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                            (std::f64::consts::E + r).powf(-n)
                        }),
                    });
                }
            }
            let rep = remainder_check(p, &density, &cases, opts)?;
            let values = vec![(family.cubes[0].clone(), Value::from_f64(rep.worst_ratio))];
            let mut out = finish(id, values, 1.0, Some(1.0), Some(1.0));
            out.samples = rep.cases;
            out.witness = None;
            Ok(out)
        }
        LemmaId::Collapse => {
            let LemmaParams { r, s } = params;
            if !(1.0 < s && s < r) {
                return Err(Error::invalid(format!(
                    "collapse needs 1 < s < r, got s={s}, r={r}"
                )));
            }
            let c_p = verify_norm_rh(w, p, r, family, f64::INFINITY, opts)?
                .minimal_c
                .as_f64();
            let v = p.scale(r * s / (r - s))?;
            let one = one_characteristic(&v, family, opts)?.sup_value.as_f64();
            let values = family
                .cubes
                .par_iter()
                .map(|q| {
                    Ok((
                        q.clone(),
                        Value::from_result(norm_rh_ratio(w, p, s, q, opts))?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(finish(id, values, one * c_p, Some(32.0), Some(32.0)))
        }
    }
}
