//! Per-cube values and supremum reports shared by scalar and matrix weights.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::spaces::{Cube, CubeFamily};

/// Default threshold above which a value is treated as divergent.
pub const DEFAULT_CAP: f64 = 1e12;

/// A finite value or a detected divergence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Finite(f64),
    Divergent,
}

impl Value {
    pub fn is_divergent(&self) -> bool {
        matches!(self, Value::Divergent)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Value::Finite(v) => Some(*v),
            Value::Divergent => None,
        }
    }

    /// The value with divergence mapped to `+∞`.
    pub fn as_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    pub fn from_f64(v: f64) -> Value {
        if v.is_finite() {
            Value::Finite(v)
        } else {
            Value::Divergent
        }
    }

    /// Map divergence errors to [`Value::Divergent`] and keep other errors.
    pub fn from_result(r: crate::Result<f64>) -> crate::Result<Value> {
        match r {
            Ok(v) => Ok(Value::from_f64(v)),
            Err(e) if e.is_divergence() => Ok(Value::Divergent),
            Err(e) => Err(e),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Finite(v) => s.serialize_f64(*v),
            Value::Divergent => s.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.map_or(Value::Divergent, Value::Finite))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeValue {
    pub cube: Cube,
    pub value: Value,
}

/// Supremum of a per-cube quantity over a family, with a divergence verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicReport {
    pub sup_value: Value,
    pub per_cube: Vec<CubeValue>,
    pub argmax: Option<Cube>,
    pub cap: f64,
    pub divergent: bool,
    pub divergence_reason: Option<String>,
    /// Number of quadrature nodes used for inner norms (matrix reports).
    #[serde(default)]
    pub inner_grid: Option<usize>,
}

impl CharacteristicReport {
    /// Collect per-cube values and apply the divergence rules: any infinite
    /// value, any value above `cap`, or a shrinking sequence whose last three
    /// values increase with the last at least twice the first.
    pub fn assemble(family: &CubeFamily, values: Vec<Value>, cap: f64) -> Self {
        let mut reason = None;
        if let Some(i) = values.iter().position(Value::is_divergent) {
            reason = Some(format!(
                "infinite norm on cube centered at {:?} with side {}",
                family.cubes[i].center, family.cubes[i].side
            ));
        } else if let Some(i) = values.iter().position(|v| v.as_f64() > cap) {
            reason = Some(format!(
                "value {} exceeds cap {cap} on cube with side {}",
                values[i].as_f64(),
                family.cubes[i].side
            ));
        } else {
            for seq in &family.sequences {
                if let Some(g) = tail_growth(seq.iter().map(|&i| values[i].as_f64())) {
                    if g >= 2.0 {
                        reason = Some(format!(
                            "values grow by factor {g:.3} over the last two shrink levels"
                        ));
                        break;
                    }
                }
            }
        }
        let divergent = reason.is_some();
        let mut argmax = None;
        let mut best = f64::NEG_INFINITY;
        for (q, v) in family.cubes.iter().zip(&values) {
            if v.as_f64() > best {
                best = v.as_f64();
                argmax = Some(q.clone());
            }
        }
        let sup_value = if divergent {
            Value::Divergent
        } else {
            Value::Finite(best.max(0.0))
        };
        CharacteristicReport {
            sup_value,
            per_cube: family
                .cubes
                .iter()
                .zip(values)
                .map(|(cube, value)| CubeValue {
                    cube: cube.clone(),
                    value,
                })
                .collect(),
            argmax,
            cap,
            divergent,
            divergence_reason: reason,
            inner_grid: None,
        }
    }

    pub fn values(&self) -> Vec<Value> {
        self.per_cube.iter().map(|c| c.value).collect()
    }
}

/// `v_last / v_{last-2}` when the last three values increase, else `None`.
pub fn tail_growth(values: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = values.collect();
    if v.len() < 3 {
        return None;
    }
    let (a, b, c) = (v[v.len() - 3], v[v.len() - 2], v[v.len() - 1]);
    if a < b && b < c {
        Some(if a > 0.0 { c / a } else { f64::INFINITY })
    } else {
        None
    }
}
