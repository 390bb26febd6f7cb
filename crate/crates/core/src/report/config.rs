use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{MatrixWeight, ReduceOptions};
use crate::spaces::{Cube, CubeFamily, Exponent, FamilySpec};
use crate::varnorm::{NormOptions, ScalarField};
use crate::weights::{LemmaId, LemmaParams, Side, Weight};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExponentSpec {
    Constant {
        value: f64,
    },
    Piecewise {
        axis: usize,
        at: f64,
        left: f64,
        right: f64,
    },
    /// `base + amp / ln(e + |x|)`.
    LogDecay {
        base: f64,
        amp: f64,
    },
}

impl ExponentSpec {
    pub fn build(&self) -> Result<Exponent> {
        match *self {
            ExponentSpec::Constant { value } => Exponent::constant(value),
            ExponentSpec::Piecewise {
                axis,
                at,
                left,
                right,
            } => Exponent::piecewise(axis, at, left, right),
            ExponentSpec::LogDecay { base, amp } => Exponent::log_decay(base, amp),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant { value: f64 },
    Power { center: Vec<f64>, exponent: f64 },
    Product { factors: Vec<WeightSpec> },
}

impl WeightSpec {
    pub fn build(&self) -> Result<Weight> {
        match self {
            WeightSpec::Constant { value } => Weight::constant(*value),
            WeightSpec::Power { center, exponent } => Weight::power(center.clone(), *exponent),
            WeightSpec::Product { factors } => Ok(Weight::Product(
                factors
                    .iter()
                    .map(WeightSpec::build)
                    .collect::<Result<_>>()?,
            )),
        }
    }
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(Error::invalid("matrix must be square and non-empty"));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatrixWeightSpec {
    Diagonal {
        entries: Vec<WeightSpec>,
    },
    Constant {
        matrix: Vec<Vec<f64>>,
    },
    /// `Uᵀ diag(...) U`.
    Congruence {
        u: Vec<Vec<f64>>,
        diag: Vec<WeightSpec>,
    },
    ScalarIdentity {
        weight: WeightSpec,
        dim: usize,
    },
}

impl MatrixWeightSpec {
    pub fn build(&self) -> Result<MatrixWeight> {
        let ws = |v: &[WeightSpec]| v.iter().map(WeightSpec::build).collect::<Result<Vec<_>>>();
        match self {
            MatrixWeightSpec::Diagonal { entries } => MatrixWeight::diagonal(ws(entries)?),
            MatrixWeightSpec::Constant { matrix } => {
                MatrixWeight::constant(matrix_from_rows(matrix)?)
            }
            MatrixWeightSpec::Congruence { u, diag } => {
                MatrixWeight::congruence(matrix_from_rows(u)?, ws(diag)?)
            }
            MatrixWeightSpec::ScalarIdentity { weight, dim } => {
                MatrixWeight::scalar_times(weight.build()?, *dim)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Indicator { cube: Cube },
    Power { center: Vec<f64>, exponent: f64 },
    Constant { value: f64 },
}

impl FieldSpec {
    pub fn build(&self) -> ScalarField {
        match self {
            FieldSpec::Indicator { cube } => ScalarField::indicator(cube),
            FieldSpec::Power { center, exponent } => ScalarField::power(center.clone(), *exponent),
            FieldSpec::Constant { value } => ScalarField::constant(*value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative quadrature tolerance.
    pub quadrature: f64,
    /// Relative width of norm bisection brackets.
    pub norm: f64,
    /// Relative slack for asserted inequalities.
    pub assertion: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            quadrature: 1e-10,
            norm: 1e-8,
            assertion: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhKind {
    Classical,
    Norm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub r: Option<f64>,
    pub s: Option<f64>,
    pub s_grid: Vec<f64>,
    pub side: Side,
    pub c_budget: Option<f64>,
    pub cap: f64,
    pub directions: Option<usize>,
    pub held_out: usize,
    pub seed: u64,
    pub delta: Option<f64>,
    pub c1: Option<f64>,
    pub p0: Option<f64>,
    pub r_cap: f64,
    pub search_tol: f64,
    pub rh_kind: Option<RhKind>,
    pub lemma: Option<LemmaId>,
    pub direction: Option<Vec<f64>>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            r: None,
            s: None,
            s_grid: Vec::new(),
            side: Side::Right,
            c_budget: None,
            cap: crate::characteristic::DEFAULT_CAP,
            directions: None,
            held_out: 64,
            seed: 0,
            delta: None,
            c1: None,
            p0: None,
            r_cap: 4.0,
            search_tol: 1e-3,
            rh_kind: None,
            lemma: None,
            direction: None,
        }
    }
}

/// Declarative description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "one")]
    pub dim: usize,
    #[serde(default)]
    pub exponent: Option<ExponentSpec>,
    #[serde(default)]
    pub weight: Option<WeightSpec>,
    #[serde(default)]
    pub matrix_weight: Option<MatrixWeightSpec>,
    #[serde(default)]
    pub field: Option<FieldSpec>,
    /// Domain cube for single-cube commands.
    #[serde(default)]
    pub cube: Option<Cube>,
    #[serde(default)]
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub params: Params,
}

fn one() -> usize {
    1
}

fn missing(what: &str) -> Error {
    Error::invalid(format!("config is missing `{what}`"))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("config: {e}")))
    }

    pub fn norm_options(&self) -> NormOptions {
        NormOptions {
            tol: self.tolerances.norm,
            rtol: self.tolerances.quadrature,
        }
    }

    pub fn reduce_options(&self) -> ReduceOptions {
        ReduceOptions {
            directions: self.params.directions,
            held_out: self.params.held_out,
            seed: self.params.seed,
            ..Default::default()
        }
    }

    pub fn lemma_params(&self) -> LemmaParams {
        let d = LemmaParams::default();
        LemmaParams {
            r: self.params.r.unwrap_or(d.r),
            s: self.params.s.unwrap_or(d.s),
        }
    }

    pub fn exponent(&self) -> Result<Exponent> {
        self.exponent
            .as_ref()
            .ok_or_else(|| missing("exponent"))?
            .build()
    }

    pub fn weight(&self) -> Result<Weight> {
        self.weight
            .as_ref()
            .ok_or_else(|| missing("weight"))?
            .build()
    }

    pub fn matrix_weight(&self) -> Result<MatrixWeight> {
        self.matrix_weight
            .as_ref()
            .ok_or_else(|| missing("matrix_weight"))?
            .build()
    }

    pub fn field(&self) -> Result<ScalarField> {
        Ok(self.field.as_ref().ok_or_else(|| missing("field"))?.build())
    }

    pub fn cube(&self) -> Result<Cube> {
        let q = self.cube.clone().ok_or_else(|| missing("cube"))?;
        self.check_dim(q.dim())?;
        Ok(q)
    }

    pub fn family(&self) -> Result<CubeFamily> {
        let spec = self.family.as_ref().ok_or_else(|| missing("family"))?;
        self.check_dim(spec.dim)?;
        CubeFamily::generate(spec)
    }

    /// The family, or the single configured cube.
    pub fn cubes(&self) -> Result<CubeFamily> {
        match (&self.family, &self.cube) {
            (Some(_), _) => self.family(),
            (None, Some(_)) => CubeFamily::from_cubes(vec![self.cube()?]),
            (None, None) => Err(missing("family or cube")),
        }
    }

    pub fn required<T: Copy>(&self, v: Option<T>, name: &str) -> Result<T> {
        v.ok_or_else(|| missing(&format!("params.{name}")))
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim {
            return Err(Error::invalid(format!(
                "dimension mismatch: config dim {} but cubes have dim {n}",
                self.dim
            )));
        }
        Ok(())
    }
}
