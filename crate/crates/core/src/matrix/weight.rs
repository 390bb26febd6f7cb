use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::linalg::is_spd;
use crate::error::{Error, Result};
use crate::spaces::{Cube, Cut};
use crate::weights::Weight;

/// A symmetric positive definite matrix function.
#[derive(Debug, Clone)]
pub enum MatrixWeight {
    Diagonal(Vec<Weight>),
    Constant(DMatrix<f64>),
    /// `Uᵀ diag(w_1, …, w_d) U` with constant invertible `U`.
    Congruence {
        u: DMatrix<f64>,
        diag: Vec<Weight>,
    },
    /// `w(x) I_d`.
    ScalarTimes {
        weight: Weight,
        dim: usize,
    },
}

impl MatrixWeight {
    pub fn diagonal(entries: Vec<Weight>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("diagonal matrix weight needs entries"));
        }
        Ok(MatrixWeight::Diagonal(entries))
    }

    pub fn constant(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 || !is_spd(&m, 1e-12) {
            return Err(Error::invalid(
                "constant matrix weight must be symmetric positive definite",
            ));
        }
        Ok(MatrixWeight::Constant(m))
    }

    pub fn congruence(u: DMatrix<f64>, diag: Vec<Weight>) -> Result<Self> {
        if u.nrows() != u.ncols() || u.nrows() != diag.len() || diag.is_empty() {
            return Err(Error::invalid(
                "congruence needs a square U matching the diagonal",
            ));
        }
        if u.clone().try_inverse().is_none() {
            return Err(Error::invalid("congruence matrix U is singular"));
        }
        Ok(MatrixWeight::Congruence { u, diag })
    }

    pub fn scalar_times(weight: Weight, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("matrix dimension must be >= 1"));
        }
        Ok(MatrixWeight::ScalarTimes { weight, dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            MatrixWeight::Diagonal(d) => d.len(),
            MatrixWeight::Constant(m) => m.nrows(),
            MatrixWeight::Congruence { diag, .. } => diag.len(),
            MatrixWeight::ScalarTimes { dim, .. } => *dim,
        }
    }

    pub fn eval(&self, x: &[f64]) -> DMatrix<f64> {
        match self {
            MatrixWeight::Diagonal(d) => DMatrix::from_diagonal(&DVector::from_iterator(
                d.len(),
                d.iter().map(|w| w.eval(x)),
            )),
            MatrixWeight::Constant(m) => m.clone(),
            MatrixWeight::Congruence { u, diag } => {
                let dv = DVector::from_iterator(diag.len(), diag.iter().map(|w| w.eval(x)));
                u.transpose() * DMatrix::from_diagonal(&dv) * u
            }
            MatrixWeight::ScalarTimes { weight, dim } => {
                DMatrix::identity(*dim, *dim) * weight.eval(x)
            }
        }
    }

    /// Row-major entries of `W(x)` written into `out`.
    pub(crate) fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        let d = self.dim();
        match self {
            MatrixWeight::Diagonal(ws) => {
                out.fill(0.0);
                for (i, w) in ws.iter().enumerate() {
                    out[i * d + i] = w.eval(x);
                }
            }
            MatrixWeight::ScalarTimes { weight, .. } => {
                out.fill(0.0);
                let v = weight.eval(x);
                for i in 0..d {
                    out[i * d + i] = v;
                }
            }
            _ => out.copy_from_slice(&super::linalg::flat(&self.eval(x))),
        }
    }

    pub fn inverse(&self) -> MatrixWeight {
        match self {
            MatrixWeight::Diagonal(d) => {
                MatrixWeight::Diagonal(d.iter().map(Weight::inverse).collect())
            }
            MatrixWeight::Constant(m) => MatrixWeight::Constant(
                m.clone()
                    .try_inverse()
                    .expect("validated positive definite"),
            ),
            MatrixWeight::Congruence { u, diag } => MatrixWeight::Congruence {
                u: u.clone()
                    .try_inverse()
                    .expect("validated invertible")
                    .transpose(),
                diag: diag.iter().map(Weight::inverse).collect(),
            },
            MatrixWeight::ScalarTimes { weight, dim } => MatrixWeight::ScalarTimes {
                weight: weight.inverse(),
                dim: *dim,
            },
        }
    }

    pub fn singular_points(&self) -> Vec<Vec<f64>> {
        let ws: Vec<&Weight> = match self {
            MatrixWeight::Diagonal(d) | MatrixWeight::Congruence { diag: d, .. } => {
                d.iter().collect()
            }
            MatrixWeight::Constant(_) => Vec::new(),
            MatrixWeight::ScalarTimes { weight, .. } => vec![weight],
        };
        let mut out: Vec<Vec<f64>> = Vec::new();
        for p in ws.iter().flat_map(|w| w.singular_points()) {
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out
    }

    /// Check symmetry and positive definiteness at the given points.
    pub fn validate_at(&self, points: &[Vec<f64>]) -> Result<()> {
        for x in points {
            let m = self.eval(x);
            if m.iter().any(|v| !v.is_finite()) {
                continue;
            }
            if !is_spd(&m, 1e-12) {
                return Err(Error::invalid(format!(
                    "matrix weight is not symmetric positive definite at {x:?}"
                )));
            }
        }
        Ok(())
    }
}

type VecFn = Arc<dyn Fn(&[f64]) -> DVector<f64> + Send + Sync>;

/// A vector-valued function `R^n → R^d` with optional cube support.
#[derive(Clone)]
pub struct VectorField {
    f: VecFn,
    dim: usize,
    singular: Vec<Vec<f64>>,
    cuts: Vec<Cut>,
    support: Option<Cube>,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorField")
            .field("dim", &self.dim)
            .field("singular", &self.singular)
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

impl VectorField {
    pub fn new(dim: usize, f: impl Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static) -> Self {
        VectorField {
            f: Arc::new(f),
            dim,
            singular: Vec::new(),
            cuts: Vec::new(),
            support: None,
        }
    }

    /// `e χ_Q`.
    pub fn constant_on(e: DVector<f64>, q: &Cube) -> Self {
        let d = e.len();
        VectorField::new(d, move |_| e.clone()).restricted_to(q)
    }

    pub fn with_singular_points<I: IntoIterator<Item = Vec<f64>>>(mut self, pts: I) -> Self {
        for p in pts {
            if !self.singular.contains(&p) {
                self.singular.push(p);
            }
        }
        self
    }

    pub fn restricted_to(mut self, q: &Cube) -> Self {
        let (lo, hi) = (q.lower(), q.upper());
        for axis in 0..q.dim() {
            for at in [lo[axis], hi[axis]] {
                let c = Cut { axis, at };
                if !self.cuts.contains(&c) {
                    self.cuts.push(c);
                }
            }
        }
        self.support = Some(q.clone());
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64]) -> DVector<f64> {
        match &self.support {
            Some(q) if !q.contains(x) => DVector::zeros(self.dim),
            _ => (self.f)(x),
        }
    }

    pub fn singular_points(&self) -> &[Vec<f64>] {
        &self.singular
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn support(&self) -> Option<&Cube> {
        self.support.as_ref()
    }
}
