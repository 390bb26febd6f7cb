use super::linalg::op_norm_flat;
use super::weight::MatrixWeight;
use crate::error::Result;
use crate::spaces::{adaptive_grid, Cube, Exponent, Grid, IntegrationPlan};
use crate::varnorm::NormOptions;

/// A quadrature grid on a cube with `W` and `W^{-1}` cached at the nodes.
pub(crate) struct MatrixNodes {
    pub grid: Grid,
    pub d: usize,
    pub w: Vec<f64>,
    pub winv: Vec<f64>,
}

impl MatrixNodes {
    pub fn w_at(&self, i: usize) -> &[f64] {
        let dd = self.d * self.d;
        &self.w[i * dd..(i + 1) * dd]
    }

    pub fn winv_at(&self, i: usize) -> &[f64] {
        let dd = self.d * self.d;
        &self.winv[i * dd..(i + 1) * dd]
    }
}

pub(crate) fn plan(
    w: &MatrixWeight,
    p: &Exponent,
    q: &Cube,
    opts: &NormOptions,
) -> IntegrationPlan {
    IntegrationPlan::new(q.dim())
        .with_rtol(opts.rtol)
        .with_singular_points(w.singular_points())
        .with_singular_points(p.features(q.dim()))
        .with_cuts(p.cuts())
}

/// Grid chosen for `|W|^p`, falling back to `|W^{-1}|^{p'}` and then to `1`
/// when a probe is not integrable; divergence is then left to the norms.
pub(crate) fn matrix_nodes(
    w: &MatrixWeight,
    p: &Exponent,
    q: &Cube,
    opts: &NormOptions,
) -> Result<MatrixNodes> {
    let d = w.dim();
    let winv = w.inverse();
    let plan = plan(w, p, q, opts);
    let pc = p.conjugate();
    let mut buf = vec![0.0; d * d];
    let probe_w = |x: &[f64]| {
        let mut b = vec![0.0; d * d];
        w.eval_into(x, &mut b);
        op_norm_flat(&b, d).powf(p.eval(x))
    };
    let probe_winv = |x: &[f64]| {
        let mut b = vec![0.0; d * d];
        winv.eval_into(x, &mut b);
        op_norm_flat(&b, d).powf(pc.eval(x))
    };
    let grid = match adaptive_grid(probe_w, q, &plan) {
        Ok((g, _)) => g,
        Err(e) if e.is_divergence() => match adaptive_grid(probe_winv, q, &plan) {
            Ok((g, _)) => g,
            Err(e) if e.is_divergence() => adaptive_grid(|_| 1.0, q, &plan)?.0,
            Err(e) => return Err(e),
        },
        Err(e) => return Err(e),
    };
    let n = grid.len();
    let mut wv = Vec::with_capacity(n * d * d);
    let mut wiv = Vec::with_capacity(n * d * d);
    for i in 0..n {
        w.eval_into(grid.node(i), &mut buf);
        wv.extend_from_slice(&buf);
        winv.eval_into(grid.node(i), &mut buf);
        wiv.extend_from_slice(&buf);
    }
    Ok(MatrixNodes {
        grid,
        d,
        w: wv,
        winv: wiv,
    })
}
