//! Driving a run from a JSON config and rendering the report, as the CLI does.

use varexp::report::{render, run, Command, Format, RunConfig};

const CONFIG: &str = r#"{
    "dim": 1,
    "exponent": {"kind": "constant", "value": 1.5},
    "weight": {"kind": "power", "center": [0.0], "exponent": -0.5},
    "family": {"dim": 1, "shrink": {"targets": [[0.0]], "side0": 2.0, "levels": 5}},
    "params": {"s_grid": [1.0, 1.1, 1.2, 1.3, 1.34, 1.4]}
}"#;

fn main() -> varexp::Result<()> {
    let config = RunConfig::from_json(CONFIG)?;
    let report = run(Command::Openness, &config)?;
    println!("{}", render(&report, Format::Csv)?);
    println!(
        "boundary: {:?}, passed: {}",
        report.summary["boundary"],
        report.passed()
    );
    let svg = render(&report, Format::Svg)?;
    println!("svg: {} bytes", svg.len());
    Ok(())
}
