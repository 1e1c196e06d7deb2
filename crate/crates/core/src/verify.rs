//! Executable checks of Prékopa–Leindler, Borell–Brascamp–Lieb and their
//! linear refinements, the pointwise symmetrization inequalities, and
//! λ-scans of `∫ (1-λ)f ⋆_p λg`.
//!
//! Left-hand sides are grid-restricted suprema integrated by Riemann sums,
//! which are lower bounds of their continuum values. A negative margin no
//! larger than the tolerance is therefore reported as
//! [`Verdict::HoldsWithinTol`] rather than as a violation.
//!
//! Integral checks use [`tol_policy`]: `C h (TV(f) + TV(g))`, with `C = 4`
//! and `TV` the discrete total variation including the drop to zero at the
//! edge of the box, floored at `1e-9 max(∫f, ∫g)`. The boundary term is what
//! point-sampled Minkowski combinations lose: a run of `a` nodes combined
//! with a run of `b` nodes covers `(1-λ)a h + λ b h - (1 - 1/m) h`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::convolution::{minkowski_combine, sup_convolution};
use crate::error::{Error, Result};
use crate::generators::max_section_integral;
use crate::grid::{min_margin, GridFn, GridSet};
use crate::means::{dual_exponent, mp_mean, ExtNonNeg, Lambda, PParam};
use crate::transform::{project, schwarz_fn, steiner_fn, steiner_set, truncate_infinite};

/// Multiplier of the step in every tolerance.
pub const TOL_C: f64 = 4.0;
/// Relative floor of the integral tolerance.
pub const TOL_FLOOR: f64 = 1e-9;
/// Relative residual allowed in a hypothesis before a check refuses to run.
pub const HYPOTHESIS_RTOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    HoldsWithinTol,
    Violated,
}

impl Verdict {
    pub fn from_margin(margin: f64, tol: f64) -> Verdict {
        if margin >= 0.0 {
            Verdict::Holds
        } else if margin >= -tol {
            Verdict::HoldsWithinTol
        } else {
            Verdict::Violated
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::HoldsWithinTol => "holds_within_tol",
            Verdict::Violated => "violated",
        }
    }

    pub fn is_ok(self) -> bool {
        self != Verdict::Violated
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one inequality check `lhs >= rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check_name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tol: f64,
    pub verdict: Verdict,
    pub hypothesis_diagnostics: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(check_name: &str, lhs: f64, rhs: f64, tol: f64) -> Report {
        let margin = if lhs == rhs { 0.0 } else { lhs - rhs };
        Report {
            check_name: check_name.to_string(),
            lhs,
            rhs,
            margin,
            tol,
            verdict: Verdict::from_margin(margin, tol),
            hypothesis_diagnostics: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, value: f64) -> Report {
        self.hypothesis_diagnostics.insert(key.to_string(), value);
        self
    }
}

/// `∫ (1-λ)f ⋆_p λg` at `λ_j = j/(K+1)`, with chord margins against
/// `(1-λ)∫f + λ∫g` and second differences `v_{j-1} - 2v_j + v_{j+1}`
/// (endpoints `v_0 = ∫f`, `v_{K+1} = ∫g`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub lambda_grid: Vec<Lambda>,
    pub values: Vec<f64>,
    pub chord_margins: Vec<f64>,
    pub midpoint_concavity_margins: Vec<f64>,
    pub tol: f64,
}

/// Hypotheses under which the arithmetic mean bounds `∫ (1-λ)f ⋆_p λg`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    CommonProjection,
    EqualProjectionIntegral,
    EqualMaxSection,
    EqualSup1d,
}

impl Hypothesis {
    pub fn as_str(self) -> &'static str {
        match self {
            Hypothesis::CommonProjection => "common_projection",
            Hypothesis::EqualProjectionIntegral => "equal_projection_integral",
            Hypothesis::EqualMaxSection => "equal_max_section",
            Hypothesis::EqualSup1d => "equal_sup_1d",
        }
    }
}

impl std::str::FromStr for Hypothesis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "common_projection" => Hypothesis::CommonProjection,
            "equal_projection_integral" => Hypothesis::EqualProjectionIntegral,
            "equal_max_section" => Hypothesis::EqualMaxSection,
            "equal_sup_1d" => Hypothesis::EqualSup1d,
            _ => return Err(Error::Parse(format!("unknown hypothesis {s:?}"))),
        })
    }
}

/// Integral tolerance for a check on `f` and `g`.
pub fn tol_policy(f: &GridFn, g: &GridFn) -> f64 {
    let h = f.grid().max_step().max(g.grid().max_step());
    let tv = f.total_variation() + g.total_variation();
    let scale = f.integrate().get().max(g.integrate().get());
    let floor = if scale.is_finite() { TOL_FLOOR * scale } else { 0.0 };
    (TOL_C * h * tv).max(floor)
}

fn finite_integral(f: &GridFn) -> Result<f64> {
    let v = f.integrate();
    if v.is_infinite() {
        return Err(Error::InfiniteIntegral);
    }
    Ok(v.get())
}

fn mean(a: f64, b: f64, lambda: Lambda, p: PParam) -> f64 {
    mp_mean(
        ExtNonNeg::new(a).expect("integral"),
        ExtNonNeg::new(b).expect("integral"),
        lambda,
        p,
    )
    .get()
}

fn rel_residual(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Checks with a common multiplier on every tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Checker {
    pub tol_scale: f64,
}

impl Default for Checker {
    fn default() -> Self {
        Checker { tol_scale: 1.0 }
    }
}

impl Checker {
    pub fn new(tol_scale: f64) -> Checker {
        Checker { tol_scale }
    }

    fn tol(&self, f: &GridFn, g: &GridFn) -> f64 {
        tol_policy(f, g) * self.tol_scale
    }

    /// `∫ (1-λ)f ⋆ λg >= (∫f)^{1-λ} (∫g)^λ`.
    pub fn check_pl(&self, f: &GridFn, g: &GridFn, lambda: Lambda) -> Result<Report> {
        let (a, b) = (finite_integral(f)?, finite_integral(g)?);
        let zero = PParam::Finite(0.0);
        let lhs = sup_convolution(f, g, lambda, zero)?.integrate().get();
        Ok(Report::new("pl", lhs, mean(a, b, lambda, zero), self.tol(f, g)))
    }

    /// `∫ (1-λ)f ⋆_p λg >= M_{p/(np+1)}(∫f, ∫g, λ)`.
    pub fn check_bbl(&self, f: &GridFn, g: &GridFn, lambda: Lambda, p: PParam) -> Result<Report> {
        let q = dual_exponent(p, f.dims())?;
        let (a, b) = (finite_integral(f)?, finite_integral(g)?);
        let lhs = sup_convolution(f, g, lambda, p)?.integrate().get();
        Ok(Report::new("bbl", lhs, mean(a, b, lambda, q), self.tol(f, g)).with("dual_exponent", q.value()))
    }

    fn hypothesis_residual(&self, f: &GridFn, g: &GridFn, hypothesis: Hypothesis, axis: usize) -> Result<f64> {
        Ok(match hypothesis {
            Hypothesis::CommonProjection => {
                let (pf, pg) = (project(f, axis)?, project(g, axis)?);
                let (m, _, _) = min_margin(&pf, &pg)?;
                let (m2, _, _) = min_margin(&pg, &pf)?;
                let scale = pf.sup_value().get().max(pg.sup_value().get());
                let dev = (-m).max(-m2).max(0.0);
                if dev == 0.0 {
                    0.0
                } else {
                    dev / scale
                }
            }
            Hypothesis::EqualProjectionIntegral => {
                let a = project(f, axis)?.integrate().get();
                let b = project(g, axis)?.integrate().get();
                if !(a.is_finite() && b.is_finite()) {
                    return Err(Error::InfiniteIntegral);
                }
                rel_residual(a, b)
            }
            Hypothesis::EqualMaxSection => {
                let (a, b) = (max_section_integral(f, axis)?, max_section_integral(g, axis)?);
                if !(a.is_finite() && b.is_finite()) {
                    return Err(Error::InfiniteIntegral);
                }
                rel_residual(a, b)
            }
            Hypothesis::EqualSup1d => {
                if f.dims() != 1 {
                    return Err(Error::InvalidGrid(
                        "equal_sup_1d needs one-dimensional functions".into(),
                    ));
                }
                rel_residual(f.sup_value().get(), g.sup_value().get())
            }
        })
    }

    /// `∫ (1-λ)f ⋆_p λg >= (1-λ)∫f + λ∫g` under `hypothesis` with respect to
    /// `H = {x_axis = 0}`.
    ///
    /// Refuses to run when the hypothesis residual exceeds
    /// [`HYPOTHESIS_RTOL`]. Diagnostics record the residual, the PL and BBL
    /// right-hand sides, and the strengthening margin `lhs - rhs_bbl`.
    pub fn check_linear_refinement(
        &self,
        f: &GridFn,
        g: &GridFn,
        lambda: Lambda,
        p: PParam,
        hypothesis: Hypothesis,
        axis: usize,
    ) -> Result<Report> {
        let n = f.dims();
        f.grid().check_axis(axis)?;
        if hypothesis != Hypothesis::CommonProjection && !p.in_bbl_range(n) {
            return Err(Error::ExponentOutOfRange { p: p.to_string(), n });
        }
        let residual = self.hypothesis_residual(f, g, hypothesis, axis)?;
        if residual > HYPOTHESIS_RTOL {
            return Err(Error::HypothesisViolated {
                name: hypothesis.as_str().to_string(),
                residual,
                tol: HYPOTHESIS_RTOL,
            });
        }
        let (a, b) = (finite_integral(f)?, finite_integral(g)?);
        let lhs = sup_convolution(f, g, lambda, p)?.integrate().get();
        let rhs = lambda.complement() * a + lambda.value() * b;
        let rhs_pl = mean(a, b, lambda, PParam::Finite(0.0));
        let mut report = Report::new(
            &format!("linear_refinement/{}", hypothesis.as_str()),
            lhs,
            rhs,
            self.tol(f, g),
        )
        .with(&format!("{}_residual", hypothesis.as_str()), residual)
        .with("measurability", 0.0)
        .with("rhs_pl", rhs_pl);
        if let Ok(q) = dual_exponent(p, n) {
            let rhs_bbl = mean(a, b, lambda, q);
            report = report
                .with("rhs_bbl", rhs_bbl)
                .with("strengthening_margin", lhs - rhs_bbl);
        }
        Ok(report)
    }

    fn pointwise(&self, name: &str, left: &GridFn, right: &GridFn, tol: f64) -> Result<Report> {
        let (margin, l, r) = min_margin(left, right)?;
        let mut report = Report::new(name, l, r, tol * self.tol_scale);
        report.margin = margin;
        report.verdict = Verdict::from_margin(margin, report.tol);
        Ok(report)
    }

    /// The pointwise inequalities between symmetrizations, projections and
    /// `⋆_p`, each as a [`Report`] whose margin is the smallest samplewise
    /// difference `left - right` (with `lhs`, `rhs` the values at that node):
    ///
    /// - `projection_superdistributivity`, every `p`:
    ///   `proj(f ⋆_p g) >= proj f ⋆_p proj g`;
    /// - `steiner_supconv`, `p <= 0`: `S_H(f ⋆_p g) >= S_H f̄ ⋆_p S_H ḡ`
    ///   (no truncation for `p < 0`);
    /// - `schwarz_supconv`, `p = 0` or `-1/n <= p < 0`:
    ///   `S_{H⊥}(f ⋆_p g) >= S_{H⊥} f ⋆_q S_{H⊥} g` with `q = p/(np+1)`;
    /// - `steiner_set_inclusion`, when both inputs are indicators: the volume
    ///   of `(1-λ)S_H A + λS_H B` outside `S_H((1-λ)A + λB)`, with tolerance 0.
    ///
    /// Pointwise tolerances are `C` times the largest jump between
    /// neighbouring samples along the relevant axis, for Steiner, and
    /// `C h` times the largest total variation of a section, for Schwarz.
    pub fn check_symmetrization_props(
        &self,
        f: &GridFn,
        g: &GridFn,
        lambda: Lambda,
        p: PParam,
        axis: usize,
    ) -> Result<Vec<Report>> {
        let n = f.dims();
        f.grid().check_axis(axis)?;
        let conv = sup_convolution(f, g, lambda, p)?;
        let mut out = Vec::new();

        let left = project(&conv, axis)?;
        let right = sup_convolution(&project(f, axis)?, &project(g, axis)?, lambda, p)?;
        let tol = TOL_C * max_jump_all(&[&left, &right]);
        out.push(self.pointwise("projection_superdistributivity", &left, &right, tol)?);

        if p.value() <= 0.0 {
            let (fs, gs) = if p.is_zero() {
                (truncate_infinite(f), truncate_infinite(g))
            } else {
                (f.clone(), g.clone())
            };
            let left = steiner_fn(&conv, axis)?;
            let right = sup_convolution(&steiner_fn(&fs, axis)?, &steiner_fn(&gs, axis)?, lambda, p)?;
            let tol = TOL_C * left.max_jump(axis).max(right.max_jump(axis));
            out.push(self.pointwise("steiner_supconv", &left, &right, tol)?);
        }

        if (p.is_zero() || (p.in_bbl_range(n) && p.value() < 0.0)) && !f.has_infinite() && !g.has_infinite() {
            let q = dual_exponent(p, n)?;
            let left = schwarz_fn(&conv, axis)?;
            let right = sup_convolution(&schwarz_fn(f, axis)?, &schwarz_fn(g, axis)?, lambda, q)?;
            let h = f.grid().max_step().max(g.grid().max_step());
            let tol = TOL_C
                * h
                * section_variation(f, axis)
                    .max(section_variation(g, axis))
                    .max(section_variation(&conv, axis));
            out.push(
                self.pointwise("schwarz_supconv", &left, &right, tol)?
                    .with("q", q.value()),
            );
        }

        if is_indicator(f) && is_indicator(g) {
            let (a, b) = (f.support(), g.support());
            out.push(steiner_inclusion(&a, &b, lambda, axis)?);
        }
        Ok(out)
    }

    /// `∫ (1-λ_j)f ⋆_p λ_j g` for `λ_j = j/(K+1)`, `j = 1..=K`.
    pub fn lambda_scan(&self, f: &GridFn, g: &GridFn, p: PParam, k: usize) -> Result<ScanReport> {
        if k < 3 {
            return Err(Error::InvalidLambda(format!("need at least 3 scan points, got {k}")));
        }
        let (v0, v1) = (finite_integral(f)?, finite_integral(g)?);
        let den = u32::try_from(k + 1).map_err(|_| Error::InvalidLambda("too many scan points".into()))?;
        let lambda_grid: Vec<Lambda> = (1..=den - 1).map(|j| Lambda::new(j, den)).collect::<Result<_>>()?;
        let values: Vec<f64> = lambda_grid
            .iter()
            .map(|&l| Ok(sup_convolution(f, g, l, p)?.integrate().get()))
            .collect::<Result<_>>()?;
        let chord_margins = lambda_grid
            .iter()
            .zip(&values)
            .map(|(l, v)| v - (l.complement() * v0 + l.value() * v1))
            .collect();
        let mut ext = vec![v0];
        ext.extend(&values);
        ext.push(v1);
        let midpoint_concavity_margins = ext.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).collect();
        Ok(ScanReport {
            lambda_grid,
            values,
            chord_margins,
            midpoint_concavity_margins,
            tol: self.tol(f, g),
        })
    }
}

fn is_indicator(f: &GridFn) -> bool {
    f.values().iter().all(|&v| v == 0.0 || v == 1.0)
}

fn max_jump_all(fs: &[&GridFn]) -> f64 {
    fs.iter()
        .map(|f| (0..f.dims()).map(|a| f.max_jump(a)).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

/// Largest total variation of a section `x_axis = α` (in section units).
fn section_variation(f: &GridFn, axis: usize) -> f64 {
    (0..f.grid().count(axis))
        .map(|j| {
            let s = f.slice_at(axis, j);
            let h: f64 = s.grid().steps().iter().product();
            if h == 0.0 || s.dims() == 0 {
                0.0
            } else {
                s.total_variation() * s.grid().max_step() / h
            }
        })
        .fold(0.0, f64::max)
}

fn steiner_inclusion(a: &GridSet, b: &GridSet, lambda: Lambda, axis: usize) -> Result<Report> {
    let left = minkowski_combine(&steiner_set(a, axis)?, &steiner_set(b, axis)?, lambda)?;
    let right = steiner_set(&minkowski_combine(a, b, lambda)?, axis)?;
    let missing = left.count_not_in(&right)?;
    let vol = left.grid().cell_volume();
    let need = left.volume();
    let covered = (left.count() - missing) as f64 * vol;
    Ok(Report::new("steiner_set_inclusion", covered, need, 0.0).with("missing_nodes", missing as f64))
}

pub fn check_pl(f: &GridFn, g: &GridFn, lambda: Lambda) -> Result<Report> {
    Checker::default().check_pl(f, g, lambda)
}

pub fn check_bbl(f: &GridFn, g: &GridFn, lambda: Lambda, p: PParam) -> Result<Report> {
    Checker::default().check_bbl(f, g, lambda, p)
}

pub fn check_linear_refinement(
    f: &GridFn,
    g: &GridFn,
    lambda: Lambda,
    p: PParam,
    hypothesis: Hypothesis,
    axis: usize,
) -> Result<Report> {
    Checker::default().check_linear_refinement(f, g, lambda, p, hypothesis, axis)
}

pub fn check_symmetrization_props(
    f: &GridFn,
    g: &GridFn,
    lambda: Lambda,
    p: PParam,
    axis: usize,
) -> Result<Vec<Report>> {
    Checker::default().check_symmetrization_props(f, g, lambda, p, axis)
}

pub fn lambda_scan(f: &GridFn, g: &GridFn, p: PParam, k: usize) -> Result<ScanReport> {
    Checker::default().lambda_scan(f, g, p, k)
}
