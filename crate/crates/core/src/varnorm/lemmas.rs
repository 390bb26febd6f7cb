use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::ScalarField;
use super::norm::{norm_on, plan_for, NormOptions};
use crate::characteristic::{CharacteristicReport, Value, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::spaces::{harmonic_mean, integrate_cube, Cube, CubeFamily, Exponent};

/// Upper bound for the Hölder constant: 2 when `1 < p_- <= p_+ < ∞`, else 3.
pub fn holder_bound(p: &Exponent) -> f64 {
    if p.p_minus() > 1.0 && p.p_plus().is_finite() {
        2.0
    } else {
        3.0
    }
}

/// `∫_Q |fg| / (‖f χ_Q‖_p ‖g χ_Q‖_{p'})`, defined as 0 when a norm vanishes.
pub fn holder_defect(
    f: &ScalarField,
    g: &ScalarField,
    p: &Exponent,
    q: &Cube,
    opts: &NormOptions,
) -> Result<f64> {
    let fg = f.mul(g);
    let plan = plan_for(&fg, p, q, opts);
    let integral = integrate_cube(|x| fg.eval(x).abs(), q, &plan)?;
    let nf = norm_on(f, p, q, opts)?.value;
    let ng = norm_on(g, &p.conjugate(), q, opts)?.value;
    if nf == 0.0 || ng == 0.0 {
        return Ok(0.0);
    }
    Ok(integral / (nf * ng))
}

/// `‖fg‖_q / (‖f‖_p ‖g‖_r)` on `Q` with `1/q = 1/p + 1/r`, and the bound
/// `K_{p/q} + 1` it must respect.
///
/// Since `p/q = 1 + p/r` has lower bound above 1, `K_{p/q} <= 2` and the bound is 3.
pub fn generalized_holder_ratio(
    f: &ScalarField,
    g: &ScalarField,
    p: &Exponent,
    r: &Exponent,
    q: &Cube,
    opts: &NormOptions,
) -> Result<(f64, f64)> {
    let qexp = p.harmonic_sum(r)?;
    let nfg = norm_on(&f.mul(g), &qexp, q, opts)?.value;
    let nf = norm_on(f, p, q, opts)?.value;
    let ng = norm_on(g, r, q, opts)?.value;
    let ratio = if nf == 0.0 || ng == 0.0 {
        0.0
    } else {
        nfg / (nf * ng)
    };
    Ok((ratio, 3.0))
}

fn one_value(p: &Exponent, pc: &Exponent, q: &Cube, opts: &NormOptions) -> Result<f64> {
    let one = ScalarField::constant(1.0);
    let a = norm_on(&one, p, q, opts)?.value;
    let b = norm_on(&one, pc, q, opts)?.value;
    Ok(a * b / q.measure())
}

/// `[1]_{A_p(.)}` over a family: `sup |Q|^{-1} ‖χ_Q‖_p ‖χ_Q‖_{p'}`.
pub fn one_characteristic(
    p: &Exponent,
    family: &CubeFamily,
    opts: &NormOptions,
) -> Result<CharacteristicReport> {
    p.require_bounded()?;
    let pc = p.conjugate();
    pc.require_bounded()?;
    let values = family
        .cubes
        .par_iter()
        .map(|q| Value::from_result(one_value(p, &pc, q, opts)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CharacteristicReport::assemble(family, values, DEFAULT_CAP))
}

/// Smallest `(D1, D2)` with `|Q|^{1/p∞} <= D1 ‖χ_Q‖` and `‖χ_Q‖ <= D2 |Q|^{1/p∞}`.
pub fn large_cube_constants(
    p: &Exponent,
    cubes: &[Cube],
    opts: &NormOptions,
) -> Result<(f64, f64)> {
    if cubes.is_empty() {
        return Err(Error::invalid("large-cube family is empty"));
    }
    if let Some(q) = cubes.iter().find(|q| q.measure() < 1.0) {
        return Err(Error::invalid(format!(
            "cube with side {} has measure below 1",
            q.side
        )));
    }
    let one = ScalarField::constant(1.0);
    let pairs = cubes
        .par_iter()
        .map(|q| {
            let chi = norm_on(&one, p, q, opts)?.value;
            let m = q.measure().powf(1.0 / p.p_infty());
            Ok((m / chi, chi / m))
        })
        .collect::<Result<Vec<_>>>()?;
    let d1 = pairs.iter().map(|x| x.0).fold(0.0, f64::max);
    let d2 = pairs.iter().map(|x| x.1).fold(0.0, f64::max);
    Ok((d1, d2))
}

/// One row of the characteristic-function bound check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharBound {
    pub cube: Cube,
    pub norm: f64,
    pub lower: f64,
    pub upper: f64,
    pub holds: bool,
}

/// `|Q|^{1/p_Q}/(2K) <= ‖χ_Q‖ <= 4K²[1]|Q|^{1/p_Q}` on every cube.
pub fn char_function_bounds(
    p: &Exponent,
    family: &CubeFamily,
    one_char: f64,
    opts: &NormOptions,
) -> Result<Vec<CharBound>> {
    let k = holder_bound(p);
    let one = ScalarField::constant(1.0);
    family
        .cubes
        .par_iter()
        .map(|q| {
            let norm = norm_on(&one, p, q, opts)?.value;
            let base = q.measure().powf(1.0 / harmonic_mean(p, q)?);
            let lower = base / (2.0 * k);
            let upper = 4.0 * k * k * one_char * base;
            Ok(CharBound {
                cube: q.clone(),
                norm,
                lower,
                upper,
                holds: lower <= norm * (1.0 + 1e-9) && norm <= upper * (1.0 + 1e-9),
            })
        })
        .collect()
}

/// A sample for the remainder inequality: a cube, a parameter `t > 0` and `0 <= F <= 1`.
#[derive(Debug, Clone)]
pub struct RemainderCase {
    pub cube: Cube,
    pub t: f64,
    pub f: ScalarField,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemainderReport {
    /// Largest `LHS / RHS` over both inequalities and all cases.
    pub worst_ratio: f64,
    pub violations: usize,
    pub cases: usize,
}

/// Check both inequalities
/// `∫F^u dμ <= e^{ntC∞} ∫F^{u∞} dμ + ∫R_t^{u-} dμ` and the one with `u`, `u∞`
/// swapped, where `R_t = (e+|x|)^{-nt}` and `dμ = density dx`.
pub fn remainder_check(
    u: &Exponent,
    density: &ScalarField,
    cases: &[RemainderCase],
    opts: &NormOptions,
) -> Result<RemainderReport> {
    let m = u.meta();
    let ratios = cases
        .par_iter()
        .map(|c| {
            let n = c.cube.dim() as f64;
            let mu = density.mul(&c.f);
            let plan = plan_for(&mu, u, &c.cube, opts);
            let int = |h: &dyn Fn(&[f64]) -> f64| {
                integrate_cube(|x| density.eval(x) * h(x), &c.cube, &plan)
            };
            let fu = int(&|x| c.f.eval(x).clamp(0.0, 1.0).powf(u.eval(x)))?;
            let finf = int(&|x| c.f.eval(x).clamp(0.0, 1.0).powf(m.p_infty))?;
            let rem = int(&|x| {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                (std::f64::consts::E + r).powf(-n * c.t * m.p_minus)
            })?;
            let factor = (n * c.t * m.c_inf).exp();
            let ratio = |lhs: f64, rhs: f64| if lhs <= 0.0 { 0.0 } else { lhs / rhs };
            Ok(ratio(fu, factor * finf + rem).max(ratio(finf, factor * fu + rem)))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(RemainderReport {
        worst_ratio: ratios.iter().copied().fold(0.0, f64::max),
        violations: ratios.iter().filter(|&&r| r > 1.0 + 1e-9).count(),
        cases: ratios.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{special_cube, DyadicSpec, FamilySpec};
    use approx::assert_relative_eq;

    fn dyadic(n: usize) -> CubeFamily {
        CubeFamily::generate(&FamilySpec {
            dim: n,
            dyadic: Some(DyadicSpec {
                min_level: -2,
                max_level: 4,
                bbox: Cube::new(vec![0.0; n], 8.0).unwrap(),
                max_per_level: 12,
                targets: vec![vec![0.0; n]],
                seed: 0,
            }),
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn holder_defect_equality_cases() {
        let q = Cube::interval(0.0, 2.0).unwrap();
        let p = Exponent::constant(2.0).unwrap();
        let one = ScalarField::constant(1.0);
        let d = holder_defect(&one, &one, &p, &q, &NormOptions::default()).unwrap();
        assert_relative_eq!(d, 1.0, max_relative = 1e-12);
        let w = ScalarField::new(|x| 1.0 + x[0] * x[0]);
        let d = holder_defect(&w, &w, &p, &q, &NormOptions::default()).unwrap();
        assert_relative_eq!(d, 1.0, max_relative = 1e-10);
        let zero = ScalarField::constant(0.0);
        assert_eq!(
            holder_defect(&zero, &w, &p, &q, &NormOptions::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn one_characteristic_of_constant_exponent_is_one() {
        let p = Exponent::constant(2.0).unwrap();
        let r = one_characteristic(&p, &dyadic(1), &NormOptions::default()).unwrap();
        assert_relative_eq!(r.sup_value.as_f64(), 1.0, max_relative = 1e-12);
        let p = Exponent::constant(3.5).unwrap();
        let r = one_characteristic(&p, &dyadic(2), &NormOptions::default()).unwrap();
        for c in &r.per_cube {
            assert_relative_eq!(c.value.as_f64(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn one_characteristic_of_log_decay_is_finite() {
        let p = Exponent::log_decay(2.0, 1.0).unwrap();
        let r = one_characteristic(&p, &dyadic(1), &NormOptions::default()).unwrap();
        assert!(!r.divergent);
        let v = r.sup_value.as_f64();
        assert!((1.0..2.0).contains(&v), "{v}");
    }

    #[test]
    fn large_cube_constants_examples() {
        let cubes: Vec<Cube> = (0..3).map(|k| special_cube(k, 1)).collect();
        let p = Exponent::constant(2.5).unwrap();
        let (d1, d2) = large_cube_constants(&p, &cubes, &NormOptions::default()).unwrap();
        assert_relative_eq!(d1, 1.0, max_relative = 1e-12);
        assert_relative_eq!(d2, 1.0, max_relative = 1e-12);
        let p = Exponent::log_decay(2.0, 1.0).unwrap();
        let q0 = Cube::interval(0.0, 1.0).unwrap();
        let (d1, d2) = large_cube_constants(&p, &[q0], &NormOptions::default()).unwrap();
        assert!(d1 * d2 >= 1.0 - 1e-12);
        let small = Cube::interval(0.0, 0.5).unwrap();
        assert!(large_cube_constants(&p, &[small], &NormOptions::default()).is_err());
    }

    #[test]
    fn char_function_bounds_hold() {
        let p = Exponent::log_decay(1.5, 1.5).unwrap();
        let fam = dyadic(1);
        let one = one_characteristic(&p, &fam, &NormOptions::default()).unwrap();
        let rows = char_function_bounds(&p, &fam, one.sup_value.as_f64(), &NormOptions::default())
            .unwrap();
        assert!(rows.iter().all(|r| r.holds));
    }

    #[test]
    fn generalized_holder_on_a_cube() {
        let q = Cube::interval(-1.0, 3.0).unwrap();
        let p = Exponent::log_decay(2.0, 1.0).unwrap();
        let r = Exponent::constant(3.0).unwrap();
        let f = ScalarField::new(|x| (x[0] * 3.0).cos() + 1.5);
        let g = ScalarField::power(vec![0.0], -0.2);
        let (ratio, bound) =
            generalized_holder_ratio(&f, &g, &p, &r, &q, &NormOptions::default()).unwrap();
        assert!(ratio > 0.0 && ratio <= bound);
    }

    #[test]
    fn remainder_inequalities_on_samples() {
        let u = Exponent::log_decay(1.5, 1.0).unwrap();
        let density = ScalarField::power(vec![0.0], -0.5);
        let cases: Vec<RemainderCase> = [(0.5, 0.3), (2.0, 0.9), (1.0, 0.01)]
            .iter()
            .map(|&(t, c)| RemainderCase {
                cube: Cube::interval(-3.0, 5.0).unwrap(),
                t,
                f: ScalarField::new(move |x| c * (0.5 + 0.5 * x[0].sin())),
            })
            .collect();
        let rep = remainder_check(&u, &density, &cases, &NormOptions::default()).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.worst_ratio <= 1.0);
    }
}
