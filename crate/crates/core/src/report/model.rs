use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::characteristic::Value;

/// One table or summary entry.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Divergent,
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            Cell::Num(v)
        } else {
            Cell::Divergent
        }
    }
}

impl From<Value> for Cell {
    fn from(v: Value) -> Self {
        Cell::from(v.as_f64())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Num(v as f64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Divergent => Some(f64::INFINITY),
            _ => None,
        }
    }

    /// CSV rendering; divergence is written as `inf`.
    pub fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v}"),
            Cell::Divergent => "inf".into(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Num(v) => s.serialize_f64(*v),
            Cell::Divergent => s.serialize_none(),
            Cell::Bool(b) => s.serialize_bool(*b),
            Cell::Text(t) => s.serialize_str(t),
        }
    }
}

impl<'de> Deserialize<'de> for Cell {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match serde_json::Value::deserialize(d)? {
            serde_json::Value::Null => Cell::Divergent,
            serde_json::Value::Bool(b) => Cell::Bool(b),
            serde_json::Value::Number(n) => Cell::from(n.as_f64().unwrap_or(f64::NAN)),
            serde_json::Value::String(s) => Cell::Text(s),
            other => Cell::Text(other.to_string()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    #[serde(default)]
    pub witness: Option<String>,
}

/// Which columns a sweep plot uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub x: String,
    pub y: String,
}

/// Structured outcome of one command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: serde_json::Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: BTreeMap<String, Cell>,
    pub verdicts: Vec<Verdict>,
    #[serde(default)]
    pub plot: Option<PlotSpec>,
    pub wall_clock_s: f64,
}

impl Report {
    pub fn new(command: &str, config: serde_json::Value, columns: &[&str]) -> Report {
        Report {
            command: command.to_string(),
            config,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: BTreeMap::new(),
            verdicts: Vec::new(),
            plot: None,
            wall_clock_s: 0.0,
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn set(&mut self, key: &str, v: impl Into<Cell>) {
        self.summary.insert(key.to_string(), v.into());
    }

    pub fn verdict(&mut self, name: &str, passed: bool, witness: Option<String>) {
        self.verdicts.push(Verdict {
            name: name.to_string(),
            passed,
            witness,
        });
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}
