use std::fmt;
use std::sync::Arc;

use crate::spaces::{Cube, Cut};

type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A real function on `R^n` with declared singular points and optional cube support.
#[derive(Clone)]
pub struct ScalarField {
    f: PointFn,
    singular: Vec<Vec<f64>>,
    cuts: Vec<Cut>,
    support: Option<Cube>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("singular", &self.singular)
            .field("cuts", &self.cuts)
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

fn face_cuts(q: &Cube) -> Vec<Cut> {
    let (lo, hi) = (q.lower(), q.upper());
    (0..q.dim())
        .flat_map(|axis| [Cut { axis, at: lo[axis] }, Cut { axis, at: hi[axis] }])
        .collect()
}

impl ScalarField {
    pub fn new(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField {
            f: Arc::new(f),
            singular: Vec::new(),
            cuts: Vec::new(),
            support: None,
        }
    }

    pub fn constant(c: f64) -> Self {
        ScalarField::new(move |_| c)
    }

    /// `χ_Q`.
    pub fn indicator(q: &Cube) -> Self {
        ScalarField::constant(1.0).restricted_to(q)
    }

    /// `|x - center|^a`.
    pub fn power(center: Vec<f64>, a: f64) -> Self {
        let c = center.clone();
        ScalarField::new(move |x| {
            x.iter()
                .zip(&c)
                .map(|(xi, ci)| (xi - ci).powi(2))
                .sum::<f64>()
                .sqrt()
                .powf(a)
        })
        .with_singular_points([center])
    }

    pub fn with_singular_points<I: IntoIterator<Item = Vec<f64>>>(mut self, pts: I) -> Self {
        for p in pts {
            if !self.singular.contains(&p) {
                self.singular.push(p);
            }
        }
        self
    }

    pub fn with_cuts<I: IntoIterator<Item = Cut>>(mut self, cuts: I) -> Self {
        for c in cuts {
            if !self.cuts.contains(&c) {
                self.cuts.push(c);
            }
        }
        self
    }

    /// Multiply by `χ_Q` and declare `Q` as the support.
    pub fn restricted_to(self, q: &Cube) -> Self {
        let mut out = self.with_cuts(face_cuts(q));
        out.support = Some(q.clone());
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.support {
            Some(q) if !q.contains(x) => 0.0,
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

    /// Pointwise product; singular points and cuts are merged.
    pub fn mul(&self, other: &ScalarField) -> ScalarField {
        let (a, b) = (self.clone(), other.clone());
        let support = self.support.clone().or_else(|| other.support.clone());
        let mut out = ScalarField::new(move |x| a.eval(x) * b.eval(x))
            .with_singular_points(self.singular.iter().chain(&other.singular).cloned())
            .with_cuts(self.cuts.iter().chain(&other.cuts).copied());
        out.support = support;
        out
    }

    pub fn scaled(&self, c: f64) -> ScalarField {
        self.map(move |v| c * v)
    }

    /// `|f|^t`.
    pub fn abs_pow(&self, t: f64) -> ScalarField {
        self.map(move |v| v.abs().powf(t))
    }

    /// Apply `g` to the values, keeping singular points, cuts and support.
    pub fn map(&self, g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> ScalarField {
        let a = self.clone();
        ScalarField {
            f: Arc::new(move |x| g(a.eval(x))),
            singular: self.singular.clone(),
            cuts: self.cuts.clone(),
            support: self.support.clone(),
        }
    }
}
