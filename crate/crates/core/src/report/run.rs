use std::str::FromStr;
use std::time::Instant;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::config::{RhKind, RunConfig};
use super::model::{Cell, PlotSpec, Report};
use crate::characteristic::CharacteristicReport;
use crate::error::{Error, Result};
use crate::matrix::{
    averaging_norm_lower_bound, default_matrix_tests, matrix_app_characteristic,
    matrix_openness_sweep, matrix_to_scalar_check, reduced_characteristic, reducing_operator,
    MatrixWeight,
};
use crate::spaces::{Cube, CubeFamily};
use crate::varnorm::{holder_bound, modular_with, norm_on};
use crate::weights::{
    ainfty_fit, ainfty_pairs, app_characteristic, classical_ap_characteristic,
    default_scalar_tests, empirical_rh_exponent, openness_sweep, rh_exponent_from_ainfty,
    scalar_averaging_lower_bound, verify_classical_rh, verify_norm_rh, verify_scalar_lemma,
    OpennessTable, RhCertificate,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Norm,
    Modular,
    Char,
    ClassicalChar,
    Ainfty,
    RhExponent,
    RhVerify,
    RhSearch,
    Openness,
    MatrixChar,
    Reduce,
    AvgNorm,
    VerifyLemma,
    Report,
}

impl Command {
    pub const ALL: [Command; 14] = [
        Command::Norm,
        Command::Modular,
        Command::Char,
        Command::ClassicalChar,
        Command::Ainfty,
        Command::RhExponent,
        Command::RhVerify,
        Command::RhSearch,
        Command::Openness,
        Command::MatrixChar,
        Command::Reduce,
        Command::AvgNorm,
        Command::VerifyLemma,
        Command::Report,
    ];

    pub fn name(self) -> String {
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default()
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::invalid(format!("unknown command {s}")))
    }
}

fn cube_cells(q: &Cube) -> Vec<Cell> {
    vec![Cell::Text(format!("{:?}", q.center)), Cell::Num(q.side)]
}

fn witness(q: &Cube) -> String {
    format!("cube center {:?} side {}", q.center, q.side)
}

fn char_rows(report: &mut Report, c: &CharacteristicReport) {
    for cv in &c.per_cube {
        let mut row = cube_cells(&cv.cube);
        row.push(cv.value.into());
        report.row(row);
    }
    report.set("sup", c.sup_value);
    report.set("divergent", c.divergent);
    if let Some(r) = &c.divergence_reason {
        report.set("divergence_reason", r.as_str());
    }
    if let Some(q) = &c.argmax {
        report.set("argmax", witness(q));
    }
}

fn holder_verdict(report: &mut Report, c: &CharacteristicReport, k: f64, slack: f64) {
    let bad = c
        .per_cube
        .iter()
        .find(|cv| cv.value.finite().is_some_and(|v| v < (1.0 - slack) / k));
    report.verdict(
        "holder_lower_bound",
        bad.is_none(),
        bad.map(|cv| witness(&cv.cube)),
    );
}

fn openness_rows(report: &mut Report, t: &OpennessTable) {
    for r in &t.rows {
        report.row(vec![
            Cell::Num(r.s),
            r.sup_value.into(),
            Cell::Bool(r.divergent),
        ]);
    }
    report.set(
        "boundary",
        t.boundary.map_or(Cell::Text("none".into()), Cell::Num),
    );
    report.plot = Some(PlotSpec {
        x: "s".into(),
        y: "sup".into(),
    });
}

fn rh_rows(report: &mut Report, c: &RhCertificate) {
    for row in &c.rows {
        let mut cells = cube_cells(&row.cube);
        cells.push(row.ratio.into());
        cells.push(Cell::Bool(row.pass));
        report.row(cells);
    }
    report.set("r", c.r);
    report.set("minimal_c", c.minimal_c);
    report.set("budget", c.budget);
    report.verdict(
        "reverse_holder",
        c.verified,
        c.witness.as_ref().map(witness),
    );
}

/// Run `command` on `config`; `Command::Report` is handled by [`rerun_report`].
pub fn run(command: Command, config: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let echo = serde_json::to_value(config).map_err(|e| Error::invalid(e.to_string()))?;
    let opts = config.norm_options();
    let slack = config.tolerances.assertion;
    let cap = config.params.cap;
    let name = command.name();
    let mut report = match command {
        Command::Norm => {
            let (f, p, q) = (config.field()?, config.exponent()?, config.cube()?);
            let mut rep = Report::new(
                &name,
                echo,
                &["norm", "bracket_lo", "bracket_hi", "modular_at_norm"],
            );
            let r = norm_on(&f, &p, &q, &opts)?;
            rep.row(vec![
                r.value.into(),
                r.bracket.0.into(),
                r.bracket.1.into(),
                r.modular_at_value.into(),
            ]);
            rep.set("norm", r.value);
            if r.value > 0.0 {
                let rho = modular_with(&f, &p, &q, &opts)?;
                let (a, b) = (rho.powf(1.0 / p.p_plus()), rho.powf(1.0 / p.p_minus()));
                let (lo, hi) = if r.value > 1.0 { (a, b) } else { (b, a) };
                rep.set("modular", rho);
                rep.verdict(
                    "modular_at_norm",
                    (r.modular_at_value - 1.0).abs() <= 1e-3,
                    None,
                );
                rep.verdict(
                    "norm_modular_sandwich",
                    lo * (1.0 - slack) <= r.value && r.value <= hi * (1.0 + slack),
                    None,
                );
            }
            rep
        }
        Command::Modular => {
            let (f, p, q) = (config.field()?, config.exponent()?, config.cube()?);
            let mut rep = Report::new(&name, echo, &["modular"]);
            let m = Cell::from(crate::characteristic::Value::from_result(modular_with(
                &f, &p, &q, &opts,
            ))?);
            rep.row(vec![m.clone()]);
            rep.summary.insert("modular".into(), m);
            rep
        }
        Command::Char => {
            let (w, p, fam) = (config.weight()?, config.exponent()?, config.family()?);
            let c = app_characteristic(&w, &p, &fam, cap, &opts)?;
            let mut rep = Report::new(&name, echo, &["center", "side", "value"]);
            char_rows(&mut rep, &c);
            holder_verdict(&mut rep, &c, holder_bound(&p), slack);
            rep
        }
        Command::ClassicalChar => {
            let (v, fam) = (config.weight()?, config.family()?);
            let p0 = config.required(config.params.p0, "p0")?;
            let c = classical_ap_characteristic(&v, p0, &fam, cap, &opts)?;
            let mut rep = Report::new(&name, echo, &["center", "side", "value"]);
            char_rows(&mut rep, &c);
            let bad = c.per_cube.iter().find(|cv| cv.value.as_f64() < 1.0 - slack);
            rep.verdict(
                "jensen_lower_bound",
                bad.is_none(),
                bad.map(|cv| witness(&cv.cube)),
            );
            rep
        }
        Command::Ainfty => {
            let (w, p, fam) = (config.weight()?, config.exponent()?, config.family()?);
            let pairs = ainfty_pairs(&fam, config.params.seed);
            let est = ainfty_fit(&w, &p, &pairs, &opts)?;
            let mut rep = Report::new(
                &name,
                echo,
                &["delta", "c1", "pairs_used", "skipped", "divergent_cubes"],
            );
            rep.row(vec![
                est.delta.into(),
                est.c1.into(),
                est.pairs_used.into(),
                est.skipped.len().into(),
                est.divergent.len().into(),
            ]);
            rep.set("delta", est.delta);
            rep.set("c1", est.c1);
            if let Some(wt) = &est.witness {
                rep.set(
                    "witness",
                    format!(
                        "E {:?} in {}",
                        wt.e.iter().map(|c| (&c.center, c.side)).collect::<Vec<_>>(),
                        witness(&wt.q)
                    ),
                );
            }
            if est.c1 >= 1.0 {
                rep.set(
                    "r_formula",
                    rh_exponent_from_ainfty(est.delta, est.c1, fam.dim())?,
                );
            }
            rep.verdict("c1_at_least_one", est.c1 >= 1.0 - slack, None);
            rep
        }
        Command::RhExponent => {
            let delta = config.required(config.params.delta, "delta")?;
            let c1 = config.required(config.params.c1, "c1")?;
            let r = rh_exponent_from_ainfty(delta, c1, config.dim)?;
            let mut rep = Report::new(&name, echo, &["delta", "c1", "n", "r"]);
            rep.row(vec![delta.into(), c1.into(), config.dim.into(), r.into()]);
            rep.set("r", r);
            rep
        }
        Command::RhVerify => {
            let fam = config.family()?;
            let r = config.required(config.params.r, "r")?;
            let w = config.weight()?;
            let kind = config
                .params
                .rh_kind
                .unwrap_or(if config.exponent.is_some() {
                    RhKind::Norm
                } else {
                    RhKind::Classical
                });
            let c = match kind {
                RhKind::Classical => verify_classical_rh(&w, r, &fam, &opts)?,
                RhKind::Norm => {
                    let budget = config.required(config.params.c_budget, "c_budget")?;
                    verify_norm_rh(&w, &config.exponent()?, r, &fam, budget, &opts)?
                }
            };
            let mut rep = Report::new(&name, echo, &["center", "side", "ratio", "pass"]);
            rh_rows(&mut rep, &c);
            rep
        }
        Command::RhSearch => {
            let (w, p, fam) = (config.weight()?, config.exponent()?, config.family()?);
            let budget = config.required(config.params.c_budget, "c_budget")?;
            let s = empirical_rh_exponent(
                &w,
                &p,
                budget,
                &fam,
                config.params.search_tol,
                config.params.r_cap,
                &opts,
            )?;
            let mut rep = Report::new(&name, echo, &["r", "minimal_c", "pass"]);
            let mut hist = s.history.clone();
            hist.sort_by(|a, b| a.r.total_cmp(&b.r));
            for h in &hist {
                rep.row(vec![h.r.into(), h.minimal_c.into(), Cell::Bool(h.pass)]);
            }
            rep.set("r_star", s.r_star);
            rep.set("monotonicity_violations", s.monotonicity_violations);
            rep.verdict("monotone_pass_set", s.monotonicity_violations == 0, None);
            rep.plot = Some(PlotSpec {
                x: "r".into(),
                y: "minimal_c".into(),
            });
            rep
        }
        Command::Openness => {
            let (p, fam) = (config.exponent()?, config.family()?);
            let grid = &config.params.s_grid;
            let side = config.params.side;
            let t = if config.matrix_weight.is_some() {
                matrix_openness_sweep(&config.matrix_weight()?, &p, grid, &fam, side, cap, &opts)?
            } else {
                openness_sweep(&config.weight()?, &p, grid, &fam, side, cap, &opts)?
            };
            let mut rep = Report::new(&name, echo, &["s", "sup", "divergent"]);
            openness_rows(&mut rep, &t);
            rep
        }
        Command::MatrixChar => {
            let (w, p, fam) = (
                config.matrix_weight()?,
                config.exponent()?,
                config.family()?,
            );
            let nested = matrix_app_characteristic(&w, &p, &fam, cap, &opts)?;
            let reduced =
                reduced_characteristic(&w, &p, &fam, cap, &config.reduce_options(), &opts)?;
            let mut rep = Report::new(
                &name,
                echo,
                &["center", "side", "nested", "reduced", "ratio"],
            );
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for (a, b) in nested.per_cube.iter().zip(&reduced.per_cube) {
                let ratio = b.value.as_f64() / a.value.as_f64();
                if ratio.is_finite() {
                    lo = lo.min(ratio);
                    hi = hi.max(ratio);
                }
                let mut row = cube_cells(&a.cube);
                row.extend([a.value.into(), b.value.into(), ratio.into()]);
                rep.row(row);
            }
            rep.set("sup", nested.sup_value);
            rep.set("reduced_sup", reduced.sup_value);
            rep.set("divergent", nested.divergent);
            rep.set("ratio_min", lo);
            rep.set("ratio_max", hi);
            if let Some(n) = nested.inner_grid {
                rep.set("inner_grid", n);
            }
            holder_verdict(&mut rep, &nested, holder_bound(&p), slack);
            if let Some(e) = &config.params.direction {
                let chk = matrix_to_scalar_check(
                    &w,
                    &DVector::from_vec(e.clone()),
                    &p,
                    &fam,
                    cap,
                    &opts,
                )?;
                rep.set("directional_sup", chk.scalar);
                rep.set("directional_bound", chk.bound);
                rep.verdict("matrix_to_scalar", chk.holds, None);
            }
            rep
        }
        Command::Reduce => {
            let (w, p, fam) = (config.matrix_weight()?, config.exponent()?, config.cubes()?);
            let ro = config.reduce_options();
            let mut rep = Report::new(
                &name,
                echo,
                &[
                    "center",
                    "side",
                    "matrix",
                    "sandwich_factor",
                    "lower_ratio",
                    "quadratic",
                ],
            );
            let mut fail = None;
            let mut worst = 0.0f64;
            for q in &fam.cubes {
                let mut row = cube_cells(q);
                match reducing_operator(&w, &p, q, &ro, &opts) {
                    Ok(r) => {
                        worst = worst.max(r.sandwich_factor);
                        row.extend([
                            Cell::Text(format!("{:?}", r.rows())),
                            r.sandwich_factor.into(),
                            r.lower_ratio.into(),
                            Cell::Bool(r.quadratic),
                        ]);
                    }
                    Err(e @ Error::NoEllipsoid { .. }) => {
                        fail.get_or_insert(format!("{}: {e}", witness(q)));
                        row.extend([
                            Cell::Text(e.to_string()),
                            Cell::Divergent,
                            Cell::Divergent,
                            Cell::Bool(false),
                        ]);
                    }
                    Err(e) => return Err(e),
                }
                rep.row(row);
            }
            rep.set("max_sandwich_factor", worst);
            rep.set("sqrt_d", (w.dim() as f64).sqrt());
            rep.verdict("sandwich", fail.is_none(), fail);
            rep
        }
        Command::AvgNorm => {
            let (p, fam) = (config.exponent()?, config.cubes()?);
            let k = holder_bound(&p);
            let mut rep = Report::new(
                &name,
                echo,
                &["center", "side", "lower_bound", "characteristic", "tests"],
            );
            let mut bad = None;
            let mut best = 0.0f64;
            for q in &fam.cubes {
                let one = CubeFamily::from_cubes(vec![q.clone()])?;
                let (lb, ch) = if config.matrix_weight.is_some() {
                    let w: MatrixWeight = config.matrix_weight()?;
                    let tests = default_matrix_tests(&w, &p, q, config.params.seed);
                    let lb = averaging_norm_lower_bound(&w, q, &p, &tests, &opts)?;
                    (lb, matrix_app_characteristic(&w, &p, &one, cap, &opts)?)
                } else {
                    let w = config.weight()?;
                    let tests = default_scalar_tests(&w, &p, q);
                    let lb = scalar_averaging_lower_bound(&w, q, &p, &tests, &opts)?;
                    (lb, app_characteristic(&w, &p, &one, cap, &opts)?)
                };
                let cv = ch.sup_value.as_f64();
                if lb.value > k * cv * (1.0 + slack) {
                    bad.get_or_insert(witness(q));
                }
                best = best.max(lb.value);
                let mut row = cube_cells(q);
                row.extend([lb.value.into(), ch.sup_value.into(), lb.tested.into()]);
                rep.row(row);
            }
            rep.set("sup_lower_bound", best);
            rep.set("k", k);
            rep.verdict("averaging_below_k_times_characteristic", bad.is_none(), bad);
            rep
        }
        Command::VerifyLemma => {
            let (w, p, fam) = (config.weight()?, config.exponent()?, config.family()?);
            let id = config.required(config.params.lemma, "lemma")?;
            let pairs = ainfty_pairs(&fam, config.params.seed);
            let r = verify_scalar_lemma(id, &w, &p, &fam, &pairs, config.lemma_params(), &opts)?;
            let mut rep = Report::new(
                &name,
                echo,
                &[
                    "lemma",
                    "multiplier",
                    "structural_factor",
                    "samples",
                    "passes",
                ],
            );
            let label = serde_json::to_value(id)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default();
            rep.row(vec![
                Cell::Text(label),
                r.multiplier.into(),
                r.structural_factor
                    .map_or(Cell::Text("none".into()), Cell::Num),
                r.samples.into(),
                Cell::Bool(r.passes),
            ]);
            rep.set("multiplier", r.multiplier);
            rep.verdict("lemma", r.passes, r.witness.as_ref().map(witness));
            rep
        }
        Command::Report => {
            return Err(Error::invalid(
                "the report command reads a report file, not a run config",
            ))
        }
    };
    report.wall_clock_s = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Re-ingest a JSON report and re-emit it unchanged.
pub fn rerun_report(text: &str) -> Result<Report> {
    super::emit::from_json(text)
}

/// Parse `text` as a config or, for `report`, as a prior report.
pub fn run_text(command: Command, text: &str) -> Result<Report> {
    match command {
        Command::Report => rerun_report(text),
        _ => run(command, &RunConfig::from_json(text)?),
    }
}
