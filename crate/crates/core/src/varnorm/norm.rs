use serde::{Deserialize, Serialize};

use super::field::ScalarField;
use crate::error::{Error, Result};
use crate::spaces::{Cube, Exponent, Grid, IntegrationPlan};

/// Tolerances for norm computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormOptions {
    /// Relative width of the final bisection bracket.
    pub tol: f64,
    /// Relative quadrature tolerance.
    pub rtol: f64,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions {
            tol: 1e-8,
            rtol: 1e-10,
        }
    }
}

impl NormOptions {
    pub fn with_tol(tol: f64) -> Self {
        NormOptions {
            tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    pub bracket: (f64, f64),
    pub modular_at_value: f64,
    pub iterations: usize,
}

/// The integration plan for `f` under exponent `p` on `q`.
pub(crate) fn plan_for(
    f: &ScalarField,
    p: &Exponent,
    q: &Cube,
    opts: &NormOptions,
) -> IntegrationPlan {
    IntegrationPlan::new(q.dim())
        .with_rtol(opts.rtol)
        .with_singular_points(f.singular_points().iter().cloned())
        .with_singular_points(p.features(q.dim()))
        .with_cuts(f.cuts().iter().copied())
        .with_cuts(p.cuts())
}

/// `|f|` and `p` sampled on a grid chosen for `|f|^p`.
pub(crate) struct Sampled {
    pub grid: Grid,
    pub f: Vec<f64>,
    pub p: Vec<f64>,
}

impl Sampled {
    pub fn new(f: &ScalarField, p: &Exponent, q: &Cube, opts: &NormOptions) -> Result<Sampled> {
        let plan = plan_for(f, p, q, opts);
        let (grid, _) =
            crate::spaces::adaptive_grid(|x| f.eval(x).abs().powf(p.eval(x)), q, &plan)?;
        Ok(Sampled {
            f: grid.sample(|x| f.eval(x).abs()),
            p: grid.sample(|x| p.eval(x)),
            grid,
        })
    }

    pub fn norm(&self, tol: f64) -> Result<NormResult> {
        norm_on_grid(&self.grid, &self.f, &self.p, tol)
    }
}

fn modular_at(grid: &Grid, f: &[f64], p: &[f64], lambda: f64) -> Result<f64> {
    Ok(grid
        .integrate_with(|i| {
            if f[i] == 0.0 {
                0.0
            } else {
                (f[i] / lambda).powf(p[i])
            }
        })?
        .value)
}

/// Luxemburg norm of node values `f` (already `|f|`) with exponent values `p`.
///
/// Bisection in `log λ`, started from the norm-modular bracket.
pub(crate) fn norm_on_grid(grid: &Grid, f: &[f64], p: &[f64], tol: f64) -> Result<NormResult> {
    if p.iter().any(|v| !v.is_finite()) {
        return Err(Error::UnboundedConjugate(
            "exponent is infinite at a quadrature node".into(),
        ));
    }
    let rho = match modular_at(grid, f, p, 1.0) {
        Ok(r) => r,
        Err(Error::InfiniteModular) => return Err(Error::NotInSpace),
        Err(e) => return Err(e),
    };
    if rho <= 0.0 {
        return Ok(NormResult {
            value: 0.0,
            bracket: (0.0, 0.0),
            modular_at_value: 0.0,
            iterations: 0,
        });
    }
    let p0 = p[0];
    if p.iter().all(|&v| v == p0) {
        let v = rho.powf(1.0 / p0);
        return Ok(NormResult {
            value: v,
            bracket: (v, v),
            modular_at_value: rho / v.powf(p0),
            iterations: 0,
        });
    }
    let pmin = p.iter().copied().fold(f64::INFINITY, f64::min);
    let pmax = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut lo, mut hi) = if rho >= 1.0 {
        (rho.powf(1.0 / pmax), rho.powf(1.0 / pmin))
    } else {
        (rho.powf(1.0 / pmin), rho.powf(1.0 / pmax))
    };
    lo *= 1.0 - 1e-12;
    hi *= 1.0 + 1e-12;
    let mut iterations = 0;
    while modular_at(grid, f, p, lo)? <= 1.0 && iterations < 60 {
        lo *= 0.5;
        iterations += 1;
    }
    while modular_at(grid, f, p, hi)? > 1.0 && iterations < 120 {
        hi *= 2.0;
        iterations += 1;
    }
    while hi / lo - 1.0 > tol && iterations < 400 {
        let mid = (lo * hi).sqrt();
        if modular_at(grid, f, p, mid)? > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let value = (lo * hi).sqrt();
    Ok(NormResult {
        value,
        bracket: (lo, hi),
        modular_at_value: modular_at(grid, f, p, value)?,
        iterations,
    })
}

/// `ρ_p(f χ_domain) = ∫_domain |f|^p`.
pub fn modular(f: &ScalarField, p: &Exponent, domain: &Cube) -> Result<f64> {
    modular_with(f, p, domain, &NormOptions::default())
}

pub fn modular_with(
    f: &ScalarField,
    p: &Exponent,
    domain: &Cube,
    opts: &NormOptions,
) -> Result<f64> {
    p.require_bounded()?;
    let plan = plan_for(f, p, domain, opts);
    crate::spaces::integrate_cube(|x| f.eval(x).abs().powf(p.eval(x)), domain, &plan)
}

/// `‖f χ_Q‖_{p(.)}`.
pub fn norm_on(f: &ScalarField, p: &Exponent, q: &Cube, opts: &NormOptions) -> Result<NormResult> {
    p.require_bounded()?;
    let s = match Sampled::new(f, p, q, opts) {
        Ok(s) => s,
        Err(Error::InfiniteModular) => return Err(Error::NotInSpace),
        Err(e) => return Err(e),
    };
    s.norm(opts.tol)
}

/// `‖f‖_{p(.)}` for a field with cube support.
pub fn luxemburg_norm(f: &ScalarField, p: &Exponent, tol: f64) -> Result<NormResult> {
    let q = f
        .support()
        .ok_or_else(|| Error::invalid("field needs a cube support for a norm over R^n"))?
        .clone();
    norm_on(f, p, &q, &NormOptions::with_tol(tol))
}

/// `‖f‖_{L^{p(.)}(w)} = ‖w f‖_{p(.)}`.
pub fn weighted_norm(
    f: &ScalarField,
    w: &ScalarField,
    p: &Exponent,
    tol: f64,
) -> Result<NormResult> {
    luxemburg_norm(&f.mul(w), p, tol)
}
