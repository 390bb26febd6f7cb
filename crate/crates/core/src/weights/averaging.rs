use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::weight::Weight;
use crate::error::{Error, Result};
use crate::spaces::{integrate_cube, Cube, Exponent, IntegrationPlan};
use crate::varnorm::{norm_on, NormOptions, ScalarField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragingBound {
    /// `max ‖A f‖ / ‖f‖` over the test set.
    pub value: f64,
    pub best_index: Option<usize>,
    pub tested: usize,
    /// Test fields with zero norm.
    pub skipped: usize,
}

/// Dyadic sub-cubes of `q` down to `levels` generations, `q` included.
pub fn sub_cubes(q: &Cube, levels: usize) -> Vec<Cube> {
    let mut out = vec![q.clone()];
    let mut layer = vec![q.clone()];
    for _ in 0..levels {
        layer = layer.iter().flat_map(Cube::children).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// `χ_{Q'}` over dyadic sub-cubes of `q` (two generations) and `w^{1-p'} χ_Q`.
pub fn default_scalar_tests(w: &Weight, p: &Exponent, q: &Cube) -> Vec<ScalarField> {
    let mut out: Vec<ScalarField> = sub_cubes(q, 2).iter().map(ScalarField::indicator).collect();
    let pc = p.conjugate();
    let wf = w.field();
    out.push(
        ScalarField::new(move |x| wf.eval(x).powf(1.0 - pc.eval(x)))
            .with_singular_points(w.singular_points())
            .with_cuts(p.cuts())
            .restricted_to(q),
    );
    out
}

/// `⨍_Q w^{-1} f`.
pub fn averaging_coefficient(
    w: &Weight,
    q: &Cube,
    f: &ScalarField,
    opts: &NormOptions,
) -> Result<f64> {
    let wi = w.inverse().field();
    let plan = IntegrationPlan::new(q.dim())
        .with_rtol(opts.rtol)
        .with_singular_points(w.singular_points())
        .with_singular_points(f.singular_points().iter().cloned())
        .with_cuts(f.cuts().iter().copied());
    Ok(integrate_cube(|x| wi.eval(x) * f.eval(x), q, &plan)? / q.measure())
}

/// `A_{w,Q} f(x) = w(x) ⨍_Q w^{-1} f · χ_Q(x)`.
pub fn apply_scalar_averaging(
    w: &Weight,
    q: &Cube,
    f: &ScalarField,
    x: &[f64],
    opts: &NormOptions,
) -> Result<f64> {
    if !q.contains(x) {
        return Ok(0.0);
    }
    Ok(w.eval(x) * averaging_coefficient(w, q, f, opts)?)
}

/// Lower bound for `‖A_{w,Q}‖` on `L^{p(.)}` from a test set.
pub fn scalar_averaging_lower_bound(
    w: &Weight,
    q: &Cube,
    p: &Exponent,
    tests: &[ScalarField],
    opts: &NormOptions,
) -> Result<AveragingBound> {
    if tests.is_empty() {
        return Err(Error::invalid("empty test set"));
    }
    let wq = norm_on(&w.field(), p, q, opts)?.value;
    let ratios = tests
        .par_iter()
        .map(|f| {
            let nf = norm_on(f, p, q, opts)?.value;
            if nf == 0.0 {
                return Ok(None);
            }
            Ok(Some(averaging_coefficient(w, q, f, opts)?.abs() * wq / nf))
        })
        .collect::<Result<Vec<Option<f64>>>>()?;
    let mut out = AveragingBound {
        value: 0.0,
        best_index: None,
        tested: tests.len(),
        skipped: 0,
    };
    for (i, r) in ratios.into_iter().enumerate() {
        match r {
            None => out.skipped += 1,
            Some(v) if v > out.value => {
                out.value = v;
                out.best_index = Some(i);
            }
            Some(_) => {}
        }
    }
    Ok(out)
}
