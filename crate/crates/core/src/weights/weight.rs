use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{Cube, Exponent};
use crate::varnorm::{modular_with, NormOptions, ScalarField};

/// A scalar weight: positive and finite away from declared points.
#[derive(Debug, Clone)]
pub enum Weight {
    Constant(f64),
    /// `|x - center|^exponent`.
    Power {
        center: Vec<f64>,
        exponent: f64,
    },
    Product(Vec<Weight>),
    Custom(ScalarField),
}

impl Weight {
    pub fn constant(c: f64) -> Result<Weight> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::invalid(format!(
                "constant weight must be positive, got {c}"
            )));
        }
        Ok(Weight::Constant(c))
    }

    pub fn power(center: Vec<f64>, exponent: f64) -> Result<Weight> {
        if center.is_empty() || !exponent.is_finite() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid(
                "power weight needs a finite center and exponent",
            ));
        }
        Ok(Weight::Power { center, exponent })
    }

    pub fn custom(f: ScalarField) -> Weight {
        Weight::Custom(f)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Weight::Constant(c) => *c,
            Weight::Power { center, exponent } => x
                .iter()
                .zip(center)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt()
                .powf(*exponent),
            Weight::Product(ws) => ws.iter().map(|w| w.eval(x)).product(),
            Weight::Custom(f) => f.eval(x),
        }
    }

    pub fn singular_points(&self) -> Vec<Vec<f64>> {
        match self {
            Weight::Constant(_) => Vec::new(),
            Weight::Power { center, exponent } if *exponent != 0.0 => vec![center.clone()],
            Weight::Power { .. } => Vec::new(),
            Weight::Product(ws) => {
                let mut out: Vec<Vec<f64>> = Vec::new();
                for p in ws.iter().flat_map(Weight::singular_points) {
                    if !out.contains(&p) {
                        out.push(p);
                    }
                }
                out
            }
            Weight::Custom(f) => f.singular_points().to_vec(),
        }
    }

    /// `w^t`.
    pub fn powf(&self, t: f64) -> Weight {
        match self {
            Weight::Constant(c) => Weight::Constant(c.powf(t)),
            Weight::Power { center, exponent } => Weight::Power {
                center: center.clone(),
                exponent: exponent * t,
            },
            Weight::Product(ws) => Weight::Product(ws.iter().map(|w| w.powf(t)).collect()),
            Weight::Custom(f) => Weight::Custom(f.map(move |v| v.powf(t))),
        }
    }

    pub fn inverse(&self) -> Weight {
        self.powf(-1.0)
    }

    pub fn scaled(&self, c: f64) -> Weight {
        match self {
            Weight::Constant(a) => Weight::Constant(a * c),
            Weight::Product(ws) => {
                let mut ws = ws.clone();
                ws.push(Weight::Constant(c));
                Weight::Product(ws)
            }
            w => Weight::Product(vec![w.clone(), Weight::Constant(c)]),
        }
    }

    /// The weight as a field for norm computations.
    pub fn field(&self) -> ScalarField {
        match self {
            Weight::Constant(c) => ScalarField::constant(*c),
            Weight::Power { center, exponent } => {
                if *exponent == 0.0 {
                    ScalarField::constant(1.0)
                } else {
                    ScalarField::power(center.clone(), *exponent)
                }
            }
            Weight::Product(ws) => ws
                .iter()
                .map(Weight::field)
                .reduce(|a, b| a.mul(&b))
                .unwrap_or_else(|| ScalarField::constant(1.0)),
            Weight::Custom(f) => f.clone(),
        }
    }

    /// `W(E) = ∫_E w^{p}`, summed over the cubes of `e`.
    pub fn measure(&self, p: &Exponent, e: &[Cube], opts: &NormOptions) -> Result<f64> {
        let f = self.field();
        e.iter().map(|q| modular_with(&f, p, q, opts)).sum()
    }

    /// Probe local integrability of `w^p` and `w^{-p'}` on `q`.
    pub fn check_on(&self, p: &Exponent, q: &Cube, opts: &NormOptions) -> Result<()> {
        self.measure(p, std::slice::from_ref(q), opts)?;
        if p.p_minus() > 1.0 {
            self.inverse()
                .measure(&p.conjugate(), std::slice::from_ref(q), opts)?;
        }
        Ok(())
    }
}

/// Which openness statement a sweep exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Exponent `s p(.)`.
    Right,
    /// Exponent `q(.)` with `q'(.) = s p'(.)`.
    Left,
}

impl Side {
    pub fn exponent(self, p: &Exponent, s: f64) -> Result<Exponent> {
        match self {
            Side::Right => p.scale(s),
            Side::Left => p.left_openness(s),
        }
    }
}
