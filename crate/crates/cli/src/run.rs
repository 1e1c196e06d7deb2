use std::fs;
use std::path::Path;

use asplund::generators::{
    derive_seed, generate, make_equal_max_section_pair, make_equal_projection_integral_pair,
    make_equal_projection_pair, FamilySpec,
};
use asplund::verify::{Checker, Hypothesis};
use asplund::{GridFn, Report, ScanReport, Verdict};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Config, Suite};

/// One row of `results.csv` for the inequality suites.
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub trial: usize,
    pub seed_f: u64,
    pub seed_g: u64,
    pub check_name: String,
    pub lambda: String,
    pub p: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tol: f64,
    pub verdict: Verdict,
}

/// One row of `results.csv` for the scan suite.
#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub trial: usize,
    pub lambda: String,
    pub value: f64,
    pub chord_margin: Option<f64>,
    pub second_difference: Option<f64>,
    pub tol: f64,
}

#[derive(Debug, Serialize)]
struct TrialReports {
    trial: usize,
    seed_f: u64,
    seed_g: u64,
    reports: Vec<Report>,
}

#[derive(Debug, Serialize)]
struct TrialScan {
    trial: usize,
    seed_f: u64,
    seed_g: u64,
    scan: ScanReport,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum Trials {
    Reports(Vec<TrialReports>),
    Scans(Vec<TrialScan>),
}

#[derive(Debug, Serialize)]
struct Output<'a> {
    config: &'a Config,
    violations: usize,
    trials: Trials,
}

/// Failure of `verify`, mapped to its exit code by the caller.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Io(String),
}

/// Outcome of a completed run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Summary {
    pub rows: usize,
    pub violations: usize,
}

fn lib_err(e: asplund::Error) -> RunError {
    match e {
        asplund::Error::Io(e) => RunError::Io(e.to_string()),
        e => RunError::Config(e.to_string()),
    }
}

/// Builds the input pair of one trial; the hypothesis, when present, picks the pairing.
fn make_pair(c: &Config, seed_f: u64, seed_g: u64) -> asplund::Result<(GridFn, GridFn)> {
    let spec_g: &FamilySpec = c.family2.as_ref().unwrap_or(&c.family);
    let f = generate(&c.family.with_seed(seed_f))?;
    match c.hypothesis {
        None => Ok((f, generate(&spec_g.with_seed(seed_g))?)),
        Some(Hypothesis::CommonProjection) => make_equal_projection_pair(&f, c.axis, seed_g, c.family2.is_none()),
        Some(h) => {
            let g = generate(&spec_g.with_seed(seed_g))?;
            match h {
                Hypothesis::EqualMaxSection => make_equal_max_section_pair(&f, &g, c.axis),
                _ => make_equal_projection_integral_pair(&f, &g, c.axis),
            }
        }
    }
}

fn run_trial(c: &Config, checker: &Checker, f: &GridFn, g: &GridFn) -> asplund::Result<Vec<Report>> {
    Ok(match c.suite {
        Suite::Pl => vec![checker.check_pl(f, g, c.lambda)?],
        Suite::Bbl => vec![checker.check_bbl(f, g, c.lambda, c.p)?],
        Suite::Refinement => {
            let h = c.hypothesis.expect("validated");
            vec![checker.check_linear_refinement(f, g, c.lambda, c.p, h, c.axis)?]
        }
        Suite::Props => checker.check_symmetrization_props(f, g, c.lambda, c.p, c.axis)?,
        Suite::Scan => unreachable!("scan handled separately"),
    })
}

fn seeds(c: &Config, trial: usize) -> (u64, u64) {
    (
        derive_seed(c.seed, trial as u64, 0),
        derive_seed(c.seed, trial as u64, 1),
    )
}

/// Runs the configured suite and writes `results.csv` and `results.json` into `c.out`.
pub fn verify(c: &Config) -> Result<Summary, RunError> {
    let checker = Checker::new(c.tol_scale.unwrap_or(1.0));
    fs::create_dir_all(&c.out).map_err(|e| RunError::Io(format!("{}: {e}", c.out.display())))?;
    if c.suite == Suite::Scan {
        let scans: Vec<TrialScan> = (0..c.trials)
            .into_par_iter()
            .map(|trial| {
                let (seed_f, seed_g) = seeds(c, trial);
                let (f, g) = make_pair(c, seed_f, seed_g)?;
                let scan = checker.lambda_scan(&f, &g, c.p, c.scan_points)?;
                Ok(TrialScan {
                    trial,
                    seed_f,
                    seed_g,
                    scan,
                })
            })
            .collect::<asplund::Result<_>>()
            .map_err(lib_err)?;
        let rows: Vec<ScanRow> = scans
            .iter()
            .flat_map(|t| {
                let s = &t.scan;
                s.lambda_grid.iter().enumerate().map(move |(j, l)| ScanRow {
                    trial: t.trial,
                    lambda: l.to_string(),
                    value: s.values[j],
                    chord_margin: s.chord_margins.get(j).copied(),
                    second_difference: s.midpoint_concavity_margins.get(j).copied(),
                    tol: s.tol,
                })
            })
            .collect();
        write_outputs(
            &c.out,
            &rows,
            &Output {
                config: c,
                violations: 0,
                trials: Trials::Scans(scans),
            },
        )?;
        return Ok(Summary {
            rows: rows.len(),
            violations: 0,
        });
    }
    let trials: Vec<TrialReports> = (0..c.trials)
        .into_par_iter()
        .map(|trial| {
            let (seed_f, seed_g) = seeds(c, trial);
            let (f, g) = make_pair(c, seed_f, seed_g)?;
            let reports = run_trial(c, &checker, &f, &g)?;
            Ok(TrialReports {
                trial,
                seed_f,
                seed_g,
                reports,
            })
        })
        .collect::<asplund::Result<_>>()
        .map_err(lib_err)?;
    let rows: Vec<Row> = trials
        .iter()
        .flat_map(|t| {
            t.reports.iter().map(move |r| Row {
                trial: t.trial,
                seed_f: t.seed_f,
                seed_g: t.seed_g,
                check_name: r.check_name.clone(),
                lambda: c.lambda.to_string(),
                p: c.p.to_string(),
                lhs: r.lhs,
                rhs: r.rhs,
                margin: r.margin,
                tol: r.tol,
                verdict: r.verdict,
            })
        })
        .collect();
    let violations = rows.iter().filter(|r| !r.verdict.is_ok()).count();
    write_outputs(
        &c.out,
        &rows,
        &Output {
            config: c,
            violations,
            trials: Trials::Reports(trials),
        },
    )?;
    Ok(Summary {
        rows: rows.len(),
        violations,
    })
}

fn write_outputs<R: Serialize>(dir: &Path, rows: &[R], json: &Output) -> Result<(), RunError> {
    let io = |e: &dyn std::fmt::Display| RunError::Io(e.to_string());
    let mut w = csv::Writer::from_path(dir.join("results.csv")).map_err(|e| io(&e))?;
    for r in rows {
        w.serialize(r).map_err(|e| io(&e))?;
    }
    w.flush().map_err(|e| io(&e))?;
    let text = serde_json::to_string_pretty(json).map_err(|e| io(&e))?;
    fs::write(dir.join("results.json"), text).map_err(|e| io(&e))
}
