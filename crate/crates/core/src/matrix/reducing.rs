use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{matrix_nodes, MatrixNodes};
use super::linalg::{apply_norm_flat, is_spd, sqrt_psd, unit};
use super::weight::MatrixWeight;
use crate::error::{Error, Result};
use crate::spaces::{harmonic_mean, Cube, Exponent};
use crate::varnorm::{norm_on_grid, NormOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReduceOptions {
    /// Fit directions; defaults to 128 for `d = 2` and 512 for `d = 3`.
    pub directions: Option<usize>,
    pub held_out: usize,
    pub seed: u64,
    /// Relative slack allowed on top of `√d`.
    pub tol: f64,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            directions: None,
            held_out: 64,
            seed: 0,
            tol: 1e-4,
        }
    }
}

/// A constant matrix `R` with `r(e) <= |R e| <= factor · r(e)` on sampled directions.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducingOperator {
    pub matrix: DMatrix<f64>,
    pub cube: Cube,
    /// Largest `|Re| / r(e)` over held-out directions.
    pub sandwich_factor: f64,
    /// Smallest `|Re| / r(e)` over held-out directions.
    pub lower_ratio: f64,
    pub direction_samples: usize,
    pub held_out: usize,
    /// `r` was an exact Euclidean norm and `R` was read off directly.
    pub quadratic: bool,
}

impl ReducingOperator {
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.matrix
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }
}

/// `e ↦ |Q|^{-1/p_Q} ‖ |W(.)e| χ_Q ‖_{p(.)}` on a cached grid.
pub struct DirectionalNorm {
    nodes: MatrixNodes,
    p: Vec<f64>,
    scale: f64,
    tol: f64,
}

impl DirectionalNorm {
    pub fn new(w: &MatrixWeight, p: &Exponent, q: &Cube, opts: &NormOptions) -> Result<Self> {
        p.require_bounded()?;
        let nodes = matrix_nodes(w, p, q, opts)?;
        let pv = nodes.grid.sample(|x| p.eval(x));
        let scale = q.measure().powf(-1.0 / harmonic_mean(p, q)?);
        Ok(DirectionalNorm {
            nodes,
            p: pv,
            scale,
            tol: opts.tol,
        })
    }

    pub fn eval(&self, e: &[f64]) -> Result<f64> {
        let d = self.nodes.d;
        let vals: Vec<f64> = (0..self.nodes.grid.len())
            .map(|i| apply_norm_flat(self.nodes.w_at(i), e, d))
            .collect();
        Ok(self.scale * norm_on_grid(&self.nodes.grid, &vals, &self.p, self.tol)?.value)
    }
}

fn octasphere(min_vertices: usize) -> (Vec<DVector<f64>>, Vec<[usize; 3]>) {
    let mut v: Vec<[f64; 3]> = vec![
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let mut faces: Vec<[usize; 3]> = Vec::new();
    for &x in &[0, 1] {
        for &y in &[2, 3] {
            for &z in &[4, 5] {
                faces.push([x, y, z]);
            }
        }
    }
    while v.len() < min_vertices {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut midpoint = |a: usize, b: usize, v: &mut Vec<[f64; 3]>| {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                let m = [0, 1, 2].map(|k| v[a][k] + v[b][k]);
                let n = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
                v.push(m.map(|c| c / n));
                v.len() - 1
            })
        };
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut v);
            let bc = midpoint(b, c, &mut v);
            let ca = midpoint(c, a, &mut v);
            next.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        faces = next;
    }
    (
        v.into_iter().map(|p| DVector::from_row_slice(&p)).collect(),
        faces,
    )
}

fn quad_forms(points: &[f64], d: usize, xi: &DMatrix<f64>, out: &mut [f64]) {
    for (k, a) in points.chunks_exact(d).enumerate() {
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += a[i] * xi[(i, j)] * a[j];
            }
        }
        out[k] = s;
    }
}

/// Centered minimum-volume enclosing ellipsoid `{a : aᵀ M a <= 1}` of a
/// symmetric point set, returned as `M^{-1}` scaled to enclose exactly.
///
/// Khachiyan's weight iteration with away steps.
fn mvee_inverse_shape(points: &[DVector<f64>]) -> DMatrix<f64> {
    let d = points[0].len();
    let k = points.len();
    let df = d as f64;
    let flat: Vec<f64> = points.iter().flat_map(|a| a.iter().copied()).collect();
    let mut u = vec![1.0 / k as f64; k];
    let mut x = DMatrix::zeros(d, d);
    for (a, &ui) in points.iter().zip(&u) {
        x += ui * a * a.transpose();
    }
    let mut m = vec![0.0; k];
    for _ in 0..100_000 {
        let xi = x.clone().try_inverse().expect("normals span the space");
        quad_forms(&flat, d, &xi, &mut m);
        let (j, mj) = m
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
            );
        let (l, ml) = m
            .iter()
            .copied()
            .enumerate()
            .filter(|&(i, _)| u[i] > 0.0)
            .fold(
                (0, f64::INFINITY),
                |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
            );
        if mj <= df * (1.0 + 1e-9) {
            break;
        }
        let (idx, step) = if mj - df >= df - ml {
            (j, (mj - df) / (df * (mj - 1.0)))
        } else {
            let s = (ml - df) / (df * (ml - 1.0));
            // Never remove more weight than the point carries.
            (l, s.max(-u[l] / (1.0 - u[l])))
        };
        for ui in u.iter_mut() {
            *ui *= 1.0 - step;
        }
        u[idx] += step;
        let a = &points[idx];
        x = x * (1.0 - step) + step * a * a.transpose();
    }
    let dx = x * df;
    let dxi = dx.clone().try_inverse().expect("normals span the space");
    quad_forms(&flat, d, &dxi, &mut m);
    let c = m.iter().copied().fold(0.0, f64::max);
    dx * c
}

/// Least-squares `M` with `r(e)^2 ≈ eᵀ M e`; `Some` when the fit is exact to 1e-7.
fn quadratic_fit(dirs: &[DVector<f64>], r: &[f64]) -> Option<DMatrix<f64>> {
    let d = dirs[0].len();
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect();
    let a = DMatrix::from_fn(dirs.len(), pairs.len(), |k, c| {
        let (i, j) = pairs[c];
        let f = if i == j { 1.0 } else { 2.0 };
        f * dirs[k][i] * dirs[k][j]
    });
    let b = DVector::from_iterator(r.len(), r.iter().map(|v| v * v));
    let sol = a.svd(true, true).solve(&b, 1e-14).ok()?;
    let mut m = DMatrix::zeros(d, d);
    for (c, &(i, j)) in pairs.iter().enumerate() {
        m[(i, j)] = sol[c];
        m[(j, i)] = sol[c];
    }
    if !is_spd(&m, 1e-12) {
        return None;
    }
    let ratios: Vec<f64> = dirs
        .iter()
        .zip(r)
        .map(|(e, &rv)| rv * rv / (e.transpose() * &m * e)[(0, 0)])
        .collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    (hi / lo <= 1.0 + 1e-7).then(|| m * hi)
}

fn fit_directions(d: usize, m: usize) -> (Vec<DVector<f64>>, Vec<[usize; 3]>) {
    match d {
        2 => {
            let dirs = (0..2 * m)
                .map(|k| {
                    let t = std::f64::consts::PI * k as f64 / m as f64;
                    DVector::from_vec(vec![t.cos(), t.sin()])
                })
                .collect();
            (dirs, Vec::new())
        }
        _ => octasphere(m),
    }
}

/// Reducing operator for `W` and `p` on `Q`, fitted as the maximal-volume
/// ellipsoid inside the polytope spanned by sampled unit-ball boundary points.
pub fn reducing_operator(
    w: &MatrixWeight,
    p: &Exponent,
    q: &Cube,
    ropts: &ReduceOptions,
    opts: &NormOptions,
) -> Result<ReducingOperator> {
    let d = w.dim();
    if d > 3 {
        return Err(Error::invalid("reducing operators are limited to d <= 3"));
    }
    let rn = DirectionalNorm::new(w, p, q, opts)?;
    if d == 1 {
        let r = rn.eval(&[1.0])?;
        return Ok(ReducingOperator {
            matrix: DMatrix::from_element(1, 1, r),
            cube: q.clone(),
            sandwich_factor: 1.0,
            lower_ratio: 1.0,
            direction_samples: 1,
            held_out: 0,
            quadratic: true,
        });
    }
    let m = ropts.directions.unwrap_or(if d == 2 { 128 } else { 512 });
    let (dirs, faces) = fit_directions(d, m);
    // r is even, so in the plane only half the circle needs evaluating.
    let half = if d == 2 { m } else { dirs.len() };
    let mut r = dirs[..half]
        .par_iter()
        .map(|e| rn.eval(e.as_slice()))
        .collect::<Result<Vec<f64>>>()?;
    if d == 2 {
        let first = r.clone();
        r.extend(first);
    }
    if let Some(bad) = r.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::invalid(format!(
            "directional norm is {} at direction {:?}",
            r[bad],
            dirs[bad].as_slice()
        )));
    }
    let (matrix, quadratic) = match quadratic_fit(&dirs, &r) {
        Some(mq) => (sqrt_psd(&mq) * (1.0 + 1e-12), true),
        None => {
            let b: Vec<DVector<f64>> = dirs.iter().zip(&r).map(|(e, rv)| e / *rv).collect();
            let facets: Vec<[usize; 3]> = if d == 2 {
                (0..b.len()).map(|k| [k, (k + 1) % b.len(), 0]).collect()
            } else {
                faces
            };
            let mut normals = Vec::with_capacity(2 * facets.len());
            for f in &facets {
                let rows: Vec<&DVector<f64>> = f[..d].iter().map(|&k| &b[k]).collect();
                let a = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
                let n = a
                    .lu()
                    .solve(&DVector::from_element(d, 1.0))
                    .ok_or_else(|| Error::invalid("degenerate facet in the direction mesh"))?;
                normals.push(-n.clone());
                normals.push(n);
            }
            let shape = mvee_inverse_shape(&normals);
            let margin = 1.0 + (2.0 * opts.tol).max(1e-9);
            (sqrt_psd(&shape) * margin, false)
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(ropts.seed);
    let held: Vec<DVector<f64>> = (0..ropts.held_out)
        .map(|_| unit(DVector::from_fn(d, |_, _| StandardNormal.sample(&mut rng))))
        .collect();
    let checks = held
        .par_iter()
        .map(|e| Ok((&matrix * e).norm() / rn.eval(e.as_slice())?))
        .collect::<Result<Vec<f64>>>()?;
    let (mut hi, mut lo, mut worst) = (0.0f64, f64::INFINITY, 0);
    for (k, &c) in checks.iter().enumerate() {
        if c > hi {
            hi = c;
            worst = k;
        }
        lo = lo.min(c);
    }
    let limit = (d as f64).sqrt() * (1.0 + ropts.tol);
    if hi > limit {
        return Err(Error::NoEllipsoid {
            factor: hi,
            worst_direction: held[worst].as_slice().to_vec(),
        });
    }
    if lo < 1.0 {
        let k = checks.iter().position(|&c| c == lo).unwrap_or(0);
        return Err(Error::NoEllipsoid {
            factor: lo,
            worst_direction: held[k].as_slice().to_vec(),
        });
    }
    Ok(ReducingOperator {
        matrix,
        cube: q.clone(),
        sandwich_factor: if checks.is_empty() { 1.0 } else { hi },
        lower_ratio: if checks.is_empty() { 1.0 } else { lo },
        direction_samples: dirs.len(),
        held_out: held.len(),
        quadratic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::Weight;
    use approx::assert_relative_eq;

    #[test]
    fn scalar_multiple_of_identity() {
        let w = MatrixWeight::scalar_times(Weight::power(vec![0.0], -0.25).unwrap(), 2).unwrap();
        let p = Exponent::constant(1.5).unwrap();
        let q = Cube::interval(0.0, 1.0).unwrap();
        let r = reducing_operator(
            &w,
            &p,
            &q,
            &ReduceOptions::default(),
            &NormOptions::default(),
        )
        .unwrap();
        assert!(r.quadratic);
        assert!(r.sandwich_factor <= 1.0 + 1e-6);
        // |Q|^{-2/3} ‖x^{-1/4}‖_{3/2} on [0,1] = (8/5)^{2/3}.
        assert_relative_eq!(
            r.matrix[(0, 0)],
            1.6f64.powf(2.0 / 3.0),
            max_relative = 1e-6
        );
        assert_relative_eq!(r.matrix[(0, 1)], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn constant_matrix_is_its_own_reducer() {
        let w0 = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let w = MatrixWeight::constant(w0.clone()).unwrap();
        let p = Exponent::constant(2.5).unwrap();
        let q = Cube::interval(-1.0, 0.5).unwrap();
        let r = reducing_operator(
            &w,
            &p,
            &q,
            &ReduceOptions::default(),
            &NormOptions::default(),
        )
        .unwrap();
        assert!(r.sandwich_factor <= 1.0 + 1e-6);
        assert_relative_eq!(r.matrix, w0, max_relative = 1e-6);
    }

    #[test]
    fn diagonal_power_weight_sandwich() {
        let w = MatrixWeight::diagonal(vec![
            Weight::power(vec![0.0], -0.5).unwrap(),
            Weight::Constant(1.0),
        ])
        .unwrap();
        let p = Exponent::constant(1.5).unwrap();
        let q = Cube::interval(-1.0, 1.0).unwrap();
        let r = reducing_operator(
            &w,
            &p,
            &q,
            &ReduceOptions::default(),
            &NormOptions::default(),
        )
        .unwrap();
        assert!(!r.quadratic);
        assert!(r.lower_ratio >= 1.0);
        assert!(r.sandwich_factor <= 2f64.sqrt() * (1.0 + 1e-4));
    }

    #[test]
    fn three_dimensional_mesh_fit() {
        let (v, f) = octasphere(100);
        assert_eq!(v.len(), 258);
        assert_eq!(f.len(), 512);
        let w = MatrixWeight::diagonal(vec![
            Weight::power(vec![0.0], -0.3).unwrap(),
            Weight::Constant(1.0),
            Weight::power(vec![0.5], 0.4).unwrap(),
        ])
        .unwrap();
        let p = Exponent::constant(1.5).unwrap();
        let q = Cube::interval(-1.0, 1.0).unwrap();
        let ro = ReduceOptions {
            directions: Some(200),
            ..Default::default()
        };
        let r = reducing_operator(&w, &p, &q, &ro, &NormOptions::default()).unwrap();
        assert!(r.sandwich_factor <= 3f64.sqrt() * (1.0 + 1e-4));
    }
}
