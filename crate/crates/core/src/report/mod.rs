//! Run configurations, structured reports and their JSON/CSV/SVG renderings.

mod config;
mod emit;
mod model;
mod run;

pub use config::{
    ExponentSpec, FieldSpec, MatrixWeightSpec, Params, RhKind, RunConfig, Tolerances, WeightSpec,
};
pub use emit::{emit, from_json, render, to_csv, to_json, to_svg, Format};
pub use model::{Cell, PlotSpec, Report, Verdict};
pub use run::{rerun_report, run, run_text, Command};
