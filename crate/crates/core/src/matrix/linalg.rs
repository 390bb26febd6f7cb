use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen};

/// Largest singular value.
pub fn op_norm(m: &DMatrix<f64>) -> f64 {
    assert_eq!(m.nrows(), m.ncols(), "op_norm expects a square matrix");
    op_norm_flat(m.transpose().as_slice(), m.nrows())
}

/// Largest singular value of a row-major `d × d` block.
pub(crate) fn op_norm_flat(a: &[f64], d: usize) -> f64 {
    match d {
        1 => a[0].abs(),
        2 => {
            let f = a.iter().map(|v| v * v).sum::<f64>();
            let det = a[0] * a[3] - a[1] * a[2];
            let disc = (f * f - 4.0 * det * det).max(0.0).sqrt();
            (0.5 * (f + disc)).sqrt()
        }
        3 => {
            let m = Matrix3::from_row_slice(a);
            let g = m.transpose() * m;
            SymmetricEigen::new(g).eigenvalues.max().max(0.0).sqrt()
        }
        _ => DMatrix::from_row_slice(d, d, a).singular_values().max(),
    }
}

/// Row-major product of two `d × d` blocks.
pub(crate) fn mul_flat(a: &[f64], b: &[f64], d: usize, out: &mut [f64]) {
    for i in 0..d {
        for j in 0..d {
            let mut s = 0.0;
            for k in 0..d {
                s += a[i * d + k] * b[k * d + j];
            }
            out[i * d + j] = s;
        }
    }
}

/// `|A e|` for a row-major block.
pub(crate) fn apply_norm_flat(a: &[f64], e: &[f64], d: usize) -> f64 {
    (0..d)
        .map(|i| {
            let s: f64 = (0..d).map(|k| a[i * d + k] * e[k]).sum();
            s * s
        })
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn flat(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

/// Symmetric positive semidefinite square root.
pub fn sqrt_psd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = 0.5 * (m + m.transpose());
    let e = SymmetricEigen::new(sym);
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(|v| v.max(0.0).sqrt()));
    &e.eigenvectors * d * e.eigenvectors.transpose()
}

/// True when `m` is symmetric to `tol` (relative) and Cholesky succeeds.
pub fn is_spd(m: &DMatrix<f64>, tol: f64) -> bool {
    let scale = m.amax().max(f64::MIN_POSITIVE);
    if (m - m.transpose()).amax() > tol * scale {
        return false;
    }
    m.clone().cholesky().is_some()
}

pub(crate) fn unit(v: DVector<f64>) -> DVector<f64> {
    let n = v.norm();
    v / n
}
