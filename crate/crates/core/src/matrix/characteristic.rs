use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::matrix_nodes;
use super::linalg::{mul_flat, op_norm, op_norm_flat};
use super::reducing::{reducing_operator, ReduceOptions};
use super::weight::MatrixWeight;
use crate::characteristic::{CharacteristicReport, Value};
use crate::error::{Error, Result};
use crate::spaces::{Cube, CubeFamily, Exponent};
use crate::varnorm::{norm_on_grid, NormOptions, ScalarField};
use crate::weights::{app_characteristic, sweep_with, OpennessTable, Side, Weight};

/// Nested value `|Q|^{-1} ‖ ‖ |W(x)W^{-1}(y)|_op χ_Q(y) ‖_{p',y} χ_Q(x) ‖_{p,x}`
/// and the number of grid nodes used.
pub fn matrix_app_value(
    w: &MatrixWeight,
    p: &Exponent,
    q: &Cube,
    opts: &NormOptions,
) -> Result<(f64, usize)> {
    let pc = p.conjugate();
    pc.require_bounded()?;
    p.require_bounded()?;
    let nodes = matrix_nodes(w, p, q, opts)?;
    let grid = &nodes.grid;
    let d = nodes.d;
    let n = grid.len();
    let pv = grid.sample(|x| p.eval(x));
    let pcv = grid.sample(|x| pc.eval(x));
    let g = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut prod = vec![0.0; d * d];
            let wi = nodes.w_at(i);
            let inner: Vec<f64> = (0..n)
                .map(|j| {
                    mul_flat(wi, nodes.winv_at(j), d, &mut prod);
                    op_norm_flat(&prod, d)
                })
                .collect();
            Ok(norm_on_grid(grid, &inner, &pcv, opts.tol)?.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let outer = norm_on_grid(grid, &g, &pv, opts.tol)?.value;
    Ok((outer / q.measure(), n))
}

/// Matrix `A_{p(.)}` characteristic over a family (nested norms).
pub fn matrix_app_characteristic(
    w: &MatrixWeight,
    p: &Exponent,
    family: &CubeFamily,
    cap: f64,
    opts: &NormOptions,
) -> Result<CharacteristicReport> {
    p.require_bounded()?;
    p.conjugate().require_bounded()?;
    let out = family
        .cubes
        .par_iter()
        .map(|q| match matrix_app_value(w, p, q, opts) {
            Ok((v, n)) => Ok((Value::from_f64(v), n)),
            Err(e) if e.is_divergence() => Ok((Value::Divergent, 0)),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    let nodes = out.iter().map(|x| x.1).max();
    let mut report =
        CharacteristicReport::assemble(family, out.into_iter().map(|x| x.0).collect(), cap);
    report.inner_grid = nodes;
    Ok(report)
}

/// `|R_Q R̄_Q|_op` with `R_Q` reducing `W` under `p` and `R̄_Q` reducing `W^{-1}` under `p'`.
pub fn reduced_value(
    w: &MatrixWeight,
    p: &Exponent,
    q: &Cube,
    ropts: &ReduceOptions,
    opts: &NormOptions,
) -> Result<f64> {
    let pc = p.conjugate();
    pc.require_bounded()?;
    let r = reducing_operator(w, p, q, ropts, opts)?;
    let rbar = reducing_operator(&w.inverse(), &pc, q, ropts, opts)?;
    Ok(op_norm(&(&r.matrix * &rbar.matrix)))
}

/// Reduced characteristic `sup_Q |R_Q R̄_Q|_op`.
pub fn reduced_characteristic(
    w: &MatrixWeight,
    p: &Exponent,
    family: &CubeFamily,
    cap: f64,
    ropts: &ReduceOptions,
    opts: &NormOptions,
) -> Result<CharacteristicReport> {
    let values = family
        .cubes
        .par_iter()
        .map(|q| Value::from_result(reduced_value(w, p, q, ropts, opts)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CharacteristicReport::assemble(family, values, cap))
}

/// The scalar weight `|W(.)e|`.
pub fn directional_weight(w: &MatrixWeight, e: &DVector<f64>) -> Result<Weight> {
    if e.len() != w.dim() || !(e.norm() > 0.0) {
        return Err(Error::invalid(
            "direction must be a non-zero vector of the matrix dimension",
        ));
    }
    let e = e.normalize();
    let wc = w.clone();
    let field = ScalarField::new(move |x| (wc.eval(x) * &e).norm())
        .with_singular_points(w.singular_points());
    Ok(Weight::custom(field))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixToScalar {
    pub scalar: Value,
    pub matrix: Value,
    /// `4 K [W]` with `K = 3`.
    pub bound: f64,
    pub holds: bool,
}

/// Check `[|W e|]_{A_p} <= 4K [W]_{A_p}` over a family.
pub fn matrix_to_scalar_check(
    w: &MatrixWeight,
    e: &DVector<f64>,
    p: &Exponent,
    family: &CubeFamily,
    cap: f64,
    opts: &NormOptions,
) -> Result<MatrixToScalar> {
    let we = directional_weight(w, e)?;
    let scalar = app_characteristic(&we, p, family, cap, opts)?.sup_value;
    let matrix = matrix_app_characteristic(w, p, family, cap, opts)?.sup_value;
    let bound = 12.0 * matrix.as_f64();
    Ok(MatrixToScalar {
        scalar,
        matrix,
        bound,
        holds: matrix.is_divergent() || scalar.as_f64() <= bound * (1.0 + 1e-9),
    })
}

/// Matrix characteristic for `s p(.)` (right) or `q(.)` with `q' = s p'` (left).
pub fn matrix_openness_sweep(
    w: &MatrixWeight,
    p: &Exponent,
    s_grid: &[f64],
    family: &CubeFamily,
    side: Side,
    cap: f64,
    opts: &NormOptions,
) -> Result<OpennessTable> {
    sweep_with(p, s_grid, side, |q| {
        matrix_app_characteristic(w, q, family, cap, opts)
    })
}
