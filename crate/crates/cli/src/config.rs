use std::path::{Path, PathBuf};

use asplund::generators::FamilySpec;
use asplund::verify::Hypothesis;
use asplund::{Lambda, PParam};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Pl,
    Bbl,
    Refinement,
    Props,
    Scan,
}

fn default_scan_points() -> usize {
    9
}

/// Experiment manifest read by `asplund verify`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub suite: Suite,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<Hypothesis>,
    pub family: FamilySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family2: Option<FamilySpec>,
    pub lambda: Lambda,
    pub p: PParam,
    pub axis: usize,
    pub trials: usize,
    pub seed: u64,
    pub out: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_scale: Option<f64>,
    /// Number of λ points in a scan.
    #[serde(rename = "K", default = "default_scan_points")]
    pub scan_points: usize,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Config, String> {
        let c: Config = serde_json::from_str(text).map_err(|e| e.to_string())?;
        c.validate()?;
        Ok(c)
    }

    pub fn read(path: &Path) -> Result<Config, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Config::from_json(&text)
    }

    fn validate(&self) -> Result<(), String> {
        let n = self.family.n;
        if let Some(f2) = &self.family2 {
            if f2.n != n {
                return Err(format!("family2 has n = {}, family has n = {n}", f2.n));
            }
        }
        if self.axis >= n.max(1) {
            return Err(format!("axis {} out of range for n = {n}", self.axis));
        }
        if self.suite == Suite::Refinement && self.hypothesis.is_none() {
            return Err("suite refinement needs a hypothesis".into());
        }
        if self.hypothesis == Some(Hypothesis::EqualSup1d) && n != 1 {
            return Err("equal_sup_1d needs n = 1".into());
        }
        if matches!(self.suite, Suite::Bbl | Suite::Refinement) && !self.p.in_bbl_range(n) {
            return Err(format!("p = {} is outside [-1/{n}, +inf]", self.p));
        }
        if self.suite == Suite::Scan && self.scan_points < 3 {
            return Err(format!("K = {} is below 3", self.scan_points));
        }
        match self.tol_scale {
            Some(t) if !(t.is_finite() && t > 0.0) => Err(format!("tol_scale {t} is not positive")),
            _ => Ok(()),
        }
    }
}
