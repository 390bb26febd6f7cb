use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::grid::matrix_nodes;
use super::linalg::unit;
use super::reducing::{reducing_operator, ReduceOptions};
use super::weight::{MatrixWeight, VectorField};
use crate::error::{Error, Result};
use crate::spaces::{integrate_cube, Cube, Exponent, IntegrationPlan};
use crate::varnorm::{norm_on, norm_on_grid, NormOptions, ScalarField};
use crate::weights::{sub_cubes, AveragingBound};

/// `⨍_Q W^{-1}(y) f(y) dy`.
pub fn averaged_inverse(
    w: &MatrixWeight,
    q: &Cube,
    f: &VectorField,
    opts: &NormOptions,
) -> Result<DVector<f64>> {
    let d = w.dim();
    if f.dim() != d {
        return Err(Error::invalid(
            "vector field and matrix weight dimensions differ",
        ));
    }
    let winv = w.inverse();
    let plan = IntegrationPlan::new(q.dim())
        .with_rtol(opts.rtol)
        .with_singular_points(w.singular_points())
        .with_singular_points(f.singular_points().iter().cloned())
        .with_cuts(f.cuts().iter().copied());
    let comps = (0..d)
        .map(|k| {
            integrate_cube(|y| (winv.eval(y) * f.eval(y))[k], q, &plan).map(|v| v / q.measure())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(DVector::from_vec(comps))
}

/// `A_{W,Q} f(x) = W(x) ⨍_Q W^{-1} f · χ_Q(x)`.
pub fn apply_averaging(
    w: &MatrixWeight,
    q: &Cube,
    f: &VectorField,
    x: &[f64],
    opts: &NormOptions,
) -> Result<DVector<f64>> {
    if !q.contains(x) {
        return Ok(DVector::zeros(w.dim()));
    }
    Ok(w.eval(x) * averaged_inverse(w, q, f, opts)?)
}

/// `Ã f(x) = R_Q ⨍_Q W^{-1} f · χ_Q(x)` with `R_Q` the reducing operator of `W` under `p`.
pub fn apply_aux_averaging(
    w: &MatrixWeight,
    p: &Exponent,
    q: &Cube,
    f: &VectorField,
    x: &[f64],
    ropts: &ReduceOptions,
    opts: &NormOptions,
) -> Result<DVector<f64>> {
    if !q.contains(x) {
        return Ok(DVector::zeros(w.dim()));
    }
    let r = reducing_operator(w, p, q, ropts, opts)?;
    Ok(&r.matrix * averaged_inverse(w, q, f, opts)?)
}

/// `‖ |f| χ_Q ‖_{p(.)}`.
pub fn vector_norm(f: &VectorField, p: &Exponent, q: &Cube, opts: &NormOptions) -> Result<f64> {
    let g = f.clone();
    let field = ScalarField::new(move |x| g.eval(x).norm())
        .with_singular_points(f.singular_points().iter().cloned())
        .with_cuts(f.cuts().iter().copied());
    Ok(norm_on(&field, p, q, opts)?.value)
}

/// Test fields: `e χ_{Q'}` over two generations of dyadic sub-cubes with
/// coordinate and two random directions; `e χ_Q` for eigenvectors of `W^{-1}`
/// at sub-cube centers; and `|W^{-1}e|^{p'-2} W^{-1}e χ_Q` for coordinate `e`.
pub fn default_matrix_tests(
    w: &MatrixWeight,
    p: &Exponent,
    q: &Cube,
    seed: u64,
) -> Vec<VectorField> {
    let d = w.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dirs: Vec<DVector<f64>> = (0..d)
        .map(|i| DVector::from_fn(d, |k, _| if k == i { 1.0 } else { 0.0 }))
        .collect();
    for _ in 0..2 {
        dirs.push(unit(DVector::from_fn(d, |_, _| {
            StandardNormal.sample(&mut rng)
        })));
    }
    let mut out = Vec::new();
    for c in sub_cubes(q, 2) {
        for e in &dirs {
            out.push(VectorField::constant_on(e.clone(), &c));
        }
    }
    let winv = w.inverse();
    for c in sub_cubes(q, 1) {
        let m: DMatrix<f64> = winv.eval(&c.center);
        if m.iter().all(|v| v.is_finite()) {
            let e = SymmetricEigen::new(0.5 * (&m + m.transpose()));
            for v in e.eigenvectors.column_iter() {
                out.push(VectorField::constant_on(v.into_owned(), q));
            }
        }
    }
    let pc = p.conjugate();
    for e in dirs.iter().take(d) {
        let (wi, pc, e) = (winv.clone(), pc.clone(), e.clone());
        out.push(
            VectorField::new(d, move |x| {
                let v = wi.eval(x) * &e;
                let n = v.norm();
                if n == 0.0 {
                    v
                } else {
                    v * n.powf(pc.eval(x) - 2.0)
                }
            })
            .with_singular_points(w.singular_points())
            .restricted_to(q),
        );
    }
    out
}

/// Lower bound for `‖A_{W,Q}‖` on `L^{p(.)}(R^n; R^d)` over a test set.
pub fn averaging_norm_lower_bound(
    w: &MatrixWeight,
    q: &Cube,
    p: &Exponent,
    tests: &[VectorField],
    opts: &NormOptions,
) -> Result<AveragingBound> {
    if tests.is_empty() {
        return Err(Error::invalid("empty test set"));
    }
    let nodes = matrix_nodes(w, p, q, opts)?;
    let pv = nodes.grid.sample(|x| p.eval(x));
    let d = w.dim();
    let ratios = tests
        .par_iter()
        .map(|f| {
            let nf = vector_norm(f, p, q, opts)?;
            if nf == 0.0 {
                return Ok(None);
            }
            let c = averaged_inverse(w, q, f, opts)?;
            let vals: Vec<f64> = (0..nodes.grid.len())
                .map(|i| super::linalg::apply_norm_flat(nodes.w_at(i), c.as_slice(), d))
                .collect();
            let na = norm_on_grid(&nodes.grid, &vals, &pv, opts.tol)?.value;
            Ok(Some(na / nf))
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

/// Lower bound for `‖Ã_{W,p,Q}‖` on `L^{q(.)}` over a test set.
pub fn aux_averaging_norm_lower_bound(
    w: &MatrixWeight,
    p: &Exponent,
    q_exp: &Exponent,
    q: &Cube,
    tests: &[VectorField],
    ropts: &ReduceOptions,
    opts: &NormOptions,
) -> Result<AveragingBound> {
    let r = reducing_operator(w, p, q, ropts, opts)?;
    let chi = norm_on(&ScalarField::constant(1.0), q_exp, q, opts)?.value;
    let mut out = AveragingBound {
        value: 0.0,
        best_index: None,
        tested: tests.len(),
        skipped: 0,
    };
    for (i, f) in tests.iter().enumerate() {
        let nf = vector_norm(f, q_exp, q, opts)?;
        if nf == 0.0 {
            out.skipped += 1;
            continue;
        }
        let v = (&r.matrix * averaged_inverse(w, q, f, opts)?).norm() * chi / nf;
        if v > out.value {
            out.value = v;
            out.best_index = Some(i);
        }
    }
    Ok(out)
}
