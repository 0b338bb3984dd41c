use std::path::{Path, PathBuf};

use crate::bodies::{parse_body, Body};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ExperimentKind {
    Estimate,
    Cover,
    Jl,
    SectionDiameter,
    ProjectionContainment,
    GlobalForm,
    L1Compare,
    FactCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Estimate => "estimate",
            ExperimentKind::Cover => "cover",
            ExperimentKind::Jl => "jl",
            ExperimentKind::SectionDiameter => "section_diameter",
            ExperimentKind::ProjectionContainment => "projection_containment",
            ExperimentKind::GlobalForm => "global_form",
            ExperimentKind::L1Compare => "l1_compare",
            ExperimentKind::FactCheck => "fact_check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Functional {
    /// Mean gauge over the unit sphere.
    #[value(name = "M")]
    M,
    /// Mean support function over the unit sphere.
    #[value(name = "Mstar")]
    MStar,
    /// Mean euclidean norm of a uniform point of the body.
    #[value(name = "Mtilde")]
    MTilde,
    /// Mean gauge of `--inner` over uniform points of the body.
    #[value(name = "MKB")]
    Mkb,
    /// Mean norm of the first `k` coordinates of a sphere point, rescaled.
    #[value(name = "A")]
    A,
    /// Ratio between the p-triangle sum and the gauge of a sum.
    #[value(name = "ctheta")]
    CTheta,
}

impl Functional {
    pub fn name(self) -> &'static str {
        match self {
            Functional::M => "M",
            Functional::MStar => "Mstar",
            Functional::MTilde => "Mtilde",
            Functional::Mkb => "MKB",
            Functional::A => "A",
            Functional::CTheta => "ctheta",
        }
    }
}

/// Declarative description of one run. Fields that an experiment does not use
/// must stay unset; `validate` rejects them.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub body: Option<String>,
    pub outer: Option<String>,
    pub inner: Option<String>,
    pub functional: Option<Functional>,
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub lambda: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub t: Vec<f64>,
    pub theta: Option<f64>,
    pub points: usize,
    pub samples: usize,
    pub trials: usize,
    pub cloud: usize,
    pub directions: usize,
    pub cone: f64,
    pub fact_c: f64,
    pub tol: f64,
    pub transpose_u: bool,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub centers_out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults for `experiment`; bodies and lists are left empty.
    pub fn new(experiment: ExperimentKind) -> Self {
        use ExperimentKind::*;
        let trials = match experiment {
            Jl => 10_000,
            SectionDiameter => 50,
            GlobalForm => 20,
            _ => 1,
        };
        let directions = match experiment {
            SectionDiameter => 10_000,
            _ => 2_000,
        };
        Self {
            experiment,
            body: None,
            outer: None,
            inner: None,
            functional: None,
            n: Vec::new(),
            k: Vec::new(),
            lambda: Vec::new(),
            epsilon: Vec::new(),
            t: Vec::new(),
            theta: None,
            points: 10,
            samples: 100_000,
            trials,
            cloud: 100_000,
            directions,
            cone: 0.05,
            fact_c: 1.0,
            tol: 1e-3,
            transpose_u: false,
            seed: 0,
            out: None,
            centers_out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        use ExperimentKind::*;
        let kind = self.experiment;
        let err = |msg: String| Err(Error::InvalidParameter(format!("{}: {msg}", kind.name())));
        let allowed: &[&str] = match kind {
            Estimate => &["body", "inner", "functional", "k", "theta", "samples"],
            Cover => &["outer", "inner", "t", "cloud", "centers_out"],
            Jl => &["n", "k", "epsilon", "points", "trials"],
            SectionDiameter => &["body", "lambda", "trials", "directions", "samples"],
            ProjectionContainment => &["body", "lambda", "trials", "cloud", "directions", "cone", "samples"],
            GlobalForm => &["body", "trials", "cloud", "directions", "cone", "samples", "transpose_u"],
            L1Compare => &["n", "samples"],
            FactCheck => &["body", "k", "trials", "cloud", "directions", "cone", "fact_c", "tol"],
        };
        let defaults = Self::new(kind);
        let set: [(&str, bool); 20] = [
            ("body", self.body.is_some()),
            ("outer", self.outer.is_some()),
            ("inner", self.inner.is_some()),
            ("functional", self.functional.is_some()),
            ("n", !self.n.is_empty()),
            ("k", !self.k.is_empty()),
            ("lambda", !self.lambda.is_empty()),
            ("epsilon", !self.epsilon.is_empty()),
            ("t", !self.t.is_empty()),
            ("theta", self.theta.is_some()),
            ("points", self.points != defaults.points),
            ("samples", self.samples != defaults.samples),
            ("trials", self.trials != defaults.trials),
            ("cloud", self.cloud != defaults.cloud),
            ("directions", self.directions != defaults.directions),
            ("cone", self.cone != defaults.cone),
            ("fact_c", self.fact_c != defaults.fact_c),
            ("tol", self.tol != defaults.tol),
            ("transpose_u", self.transpose_u),
            ("centers_out", self.centers_out.is_some()),
        ];
        for (name, present) in set {
            if present && !allowed.contains(&name) {
                return err(format!("option `{}` does not apply", name.replace('_', "-")));
            }
        }
        for (name, v) in [("samples", self.samples), ("trials", self.trials), ("cloud", self.cloud)] {
            if v == 0 {
                return err(format!("{name} must be at least 1"));
            }
        }
        if self.directions == 0 || self.points == 0 {
            return err("directions and points must be at least 1".into());
        }
        if !(self.cone > 0.0 && self.cone < std::f64::consts::FRAC_PI_2) {
            return err("cone must lie in (0, π/2)".into());
        }
        if !(self.tol > 0.0) || !(self.fact_c > 0.0) {
            return err("tol and fact-c must be positive".into());
        }
        if self.lambda.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
            return err("lambda must lie in (0, 1)".into());
        }
        if self.epsilon.iter().any(|e| !(*e > 0.0)) || self.t.iter().any(|t| !(*t > 0.0)) {
            return err("epsilon and t must be positive".into());
        }
        let needs_body = matches!(kind, Estimate | SectionDiameter | ProjectionContainment | GlobalForm | FactCheck);
        if needs_body && self.body.is_none() {
            return err("--body is required".into());
        }
        match kind {
            Estimate => {
                let f = self.functional.ok_or_else(|| Error::InvalidParameter("estimate: --functional is required".into()))?;
                if f == Functional::Mkb && self.inner.is_none() {
                    return err("MKB needs --inner".into());
                }
                if f != Functional::Mkb && self.inner.is_some() {
                    return err("--inner applies to MKB only".into());
                }
                if f == Functional::A && self.k.len() != 1 {
                    return err("A needs exactly one --k".into());
                }
                if f != Functional::A && !self.k.is_empty() {
                    return err("--k applies to A only".into());
                }
                if (f == Functional::CTheta) != self.theta.is_some() {
                    return err("--theta is required by ctheta and applies to it only".into());
                }
            }
            Cover => {
                if self.outer.is_none() || self.inner.is_none() || self.t.is_empty() {
                    return err("--outer, --inner and --t are required".into());
                }
                if self.centers_out.is_some() && self.t.len() != 1 {
                    return err("--centers-out needs a single --t".into());
                }
            }
            Jl => {
                if self.n.len() != 1 || self.k.is_empty() || self.epsilon.is_empty() {
                    return err("needs one --n, and --k and --epsilon lists".into());
                }
                if self.k.iter().any(|&k| k == 0 || k > self.n[0]) {
                    return err("each k must satisfy 1 <= k <= n".into());
                }
            }
            L1Compare => {
                if self.n.is_empty() || self.n.contains(&0) {
                    return err("--n must list positive dimensions".into());
                }
            }
            SectionDiameter | ProjectionContainment => {
                if self.lambda.is_empty() {
                    return err("--lambda is required".into());
                }
            }
            GlobalForm | FactCheck => {}
        }
        Ok(())
    }

    pub fn body64(&self) -> Result<Body<f64>> {
        parse_required(&self.body, "body")
    }

    pub fn outer64(&self) -> Result<Body<f64>> {
        parse_required(&self.outer, "outer")
    }

    pub fn inner64(&self) -> Result<Body<f64>> {
        parse_required(&self.inner, "inner")
    }
}

fn parse_required(desc: &Option<String>, name: &str) -> Result<Body<f64>> {
    let d = desc.as_deref().ok_or_else(|| Error::InvalidParameter(format!("--{name} is required")))?;
    parse_body(d)
}

/// Turns a flat `key = value` file into long flags (`--key value`). Blank lines and
/// lines starting with `#` are skipped; `key = true` becomes a bare switch and
/// `key = false` is dropped.
pub fn config_file_args(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read config {}: {e}", path.display())))?;
    config_text_args(&text)
}

pub fn config_text_args(text: &str) -> Result<Vec<String>> {
    let mut args = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() || key.starts_with('-') {
            return Err(Error::Parse(format!("config line {}: bad key", lineno + 1)));
        }
        match value {
            "true" => args.push(format!("--{key}")),
            "false" => {}
            _ => {
                args.push(format!("--{key}"));
                args.push(value.to_string());
            }
        }
    }
    Ok(args)
}
