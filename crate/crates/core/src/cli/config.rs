//! The JSON run configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::asymptotics::ExpansionOptions;
use crate::eigenbasis::ModeIndex;
use crate::error::{Error, Result};
use crate::geometry::PolarGrid;
use crate::solver::{ArcData, CoefficientData, ForwardData, RadialScheme, ScalarFn, SolverOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    #[serde(rename = "R")]
    pub r: f64,
    /// Inner excision radius; `1e-4·R` when absent.
    pub epsilon: Option<f64>,
    #[serde(rename = "Nr")]
    pub nr: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub scheme: RadialScheme,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            r: 1.0,
            epsilon: None,
            nr: 512,
            m: 257,
            k: 16,
            scheme: RadialScheme::SecondOrder,
        }
    }
}

/// Either a reaction problem (`p`, `q`) or a load problem (`f`, `g`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoefficientConfig {
    pub p: Option<String>,
    pub q: Option<String>,
    pub f: Option<String>,
    pub g: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ArcConfig {
    Expr(String),
    Modes { modes: Vec<(u32, f64)> },
}

impl Default for ArcConfig {
    fn default() -> Self {
        ArcConfig::Expr("cos(t/2)".into())
    }
}

impl ArcConfig {
    pub fn build(&self) -> Result<ArcData> {
        match self {
            ArcConfig::Expr(s) => ArcData::parse(s),
            ArcConfig::Modes { modes } => Ok(ArcData::Modes(
                modes
                    .iter()
                    .map(|&(k, c)| Ok((ModeIndex::new(k)?, c)))
                    .collect::<Result<_>>()?,
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    /// Every `radii_stride`-th grid radius below `R₀` enters the frequency curve.
    pub radii_stride: usize,
    pub plateau_tol: f64,
    pub schwarz_slack: f64,
    pub rho: f64,
    pub sigma: f64,
    pub beta_agreement: f64,
    pub blowup_tol: f64,
    pub hardy_cases: usize,
    pub hardy_modes: usize,
    pub hardy_slack: f64,
    /// Grid-doubling levels in the Pohozaev refinement table.
    pub pohozaev_levels: u32,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        let e = ExpansionOptions::default();
        AnalysisConfig {
            radii_stride: 1,
            plateau_tol: e.plateau_tol,
            schwarz_slack: crate::almgren::SCHWARZ_SLACK,
            rho: e.rho,
            sigma: crate::almgren::GROWTH_SIGMA,
            beta_agreement: e.beta_agreement,
            blowup_tol: e.blowup_tol,
            hardy_cases: 100,
            hardy_modes: 8,
            hardy_slack: 1e-10,
            pohozaev_levels: 2,
        }
    }
}

impl AnalysisConfig {
    pub fn expansion(&self) -> ExpansionOptions {
        ExpansionOptions {
            plateau_tol: self.plateau_tol,
            rho: self.rho,
            beta_agreement: self.beta_agreement,
            blowup_tol: self.blowup_tol,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Output directory; `--out` takes precedence.
    pub dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CounterexampleConfig {
    pub x1: Vec<f64>,
    pub curve_samples: usize,
    pub start_distance: f64,
    pub step: f64,
    pub n_steps: usize,
    /// `(lo, hi, n)` radii of the log-model arcs.
    pub model_radii: (f64, f64, usize),
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        CounterexampleConfig {
            x1: vec![1e-2 / 5.0, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8],
            curve_samples: 400,
            start_distance: 0.02,
            step: 0.01,
            n_steps: 2000,
            model_radii: (1e-5, 1e-2, 40),
        }
    }
}

/// Cartesian product of coefficient expressions and arc data.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub p: Vec<String>,
    pub q: Vec<String>,
    pub arc: Vec<ArcConfig>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub coefficients: CoefficientConfig,
    pub arc: ArcConfig,
    pub analysis: AnalysisConfig,
    pub output: OutputConfig,
    pub counterexample: CounterexampleConfig,
    pub sweep: SweepConfig,
    pub seed: Option<u64>,
}

/// The physical problem a config describes.
#[derive(Debug, Clone)]
pub enum Problem {
    Reaction(CoefficientData),
    Load(ForwardData),
}

impl Problem {
    /// Coefficients used by the frequency analysis (zero for load problems).
    pub fn reaction(&self) -> CoefficientData {
        match self {
            Problem::Reaction(c) => c.clone(),
            Problem::Load(_) => CoefficientData::zero(),
        }
    }
}

fn expr(s: &Option<String>) -> Result<ScalarFn> {
    s.as_deref().map_or_else(|| Ok(ScalarFn::zero()), ScalarFn::parse)
}

fn range(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!("{what} is out of range")))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Parses every expression and range-checks every numeric field.
    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        range(g.r > 0.0 && g.r.is_finite(), "geometry.R")?;
        range(g.epsilon.is_none_or(|e| e > 0.0 && e < g.r), "geometry.epsilon")?;
        range(g.nr >= 8, "geometry.Nr (at least 8)")?;
        range(g.m >= 9, "geometry.M (at least 9)")?;
        range(g.k >= 1, "geometry.K (at least 1)")?;
        let a = &self.analysis;
        range(a.radii_stride >= 1, "analysis.radii_stride")?;
        for (v, name) in [
            (a.plateau_tol, "analysis.plateau_tol"),
            (a.schwarz_slack, "analysis.schwarz_slack"),
            (a.sigma, "analysis.sigma"),
            (a.beta_agreement, "analysis.beta_agreement"),
            (a.blowup_tol, "analysis.blowup_tol"),
            (a.hardy_slack, "analysis.hardy_slack"),
        ] {
            range(v >= 0.0 && v.is_finite(), name)?;
        }
        range(a.rho > 0.0 && a.rho < 0.5, "analysis.rho (inside (0, 1/2))")?;
        range(a.hardy_modes >= 1 && a.hardy_modes <= g.k.max(1), "analysis.hardy_modes (1..=K)")?;
        range(a.pohozaev_levels <= 3, "analysis.pohozaev_levels (at most 3)")?;
        let c = &self.counterexample;
        range(c.x1.iter().all(|&x| x > 0.0 && x < 0.5), "counterexample.x1")?;
        range(c.curve_samples >= 2, "counterexample.curve_samples")?;
        range(c.step > 0.0 && c.n_steps >= 1, "counterexample.step / n_steps")?;
        range(
            c.model_radii.0 > 0.0 && c.model_radii.1 > c.model_radii.0 && c.model_radii.2 >= 4,
            "counterexample.model_radii",
        )?;
        self.problem_with(&self.coefficients)?;
        self.arc.build()?;
        for s in self.sweep.p.iter().chain(&self.sweep.q) {
            ScalarFn::parse(s)?;
        }
        for arc in &self.sweep.arc {
            arc.build()?;
        }
        Ok(())
    }

    pub fn grid(&self, refine: u32) -> Result<PolarGrid> {
        let g = &self.geometry;
        PolarGrid::new(g.r, g.epsilon.unwrap_or(1e-4 * g.r), g.nr, g.m)?.refined(refine)
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            scheme: self.geometry.scheme,
        }
    }

    pub fn problem(&self, grid: &PolarGrid) -> Result<Problem> {
        let c = &self.coefficients;
        let load = c.f.is_some() || c.g.is_some();
        if load && (c.p.is_some() || c.q.is_some()) {
            return Err(Error::Config("give either p/q or f/g, not both".into()));
        }
        if load {
            Ok(Problem::Load(ForwardData {
                f: expr(&c.f)?,
                g: expr(&c.g)?,
            }))
        } else {
            Ok(Problem::Reaction(CoefficientData::new(expr(&c.p)?, expr(&c.q)?, grid)?))
        }
    }

    fn problem_with(&self, c: &CoefficientConfig) -> Result<()> {
        let load = c.f.is_some() || c.g.is_some();
        if load && (c.p.is_some() || c.q.is_some()) {
            return Err(Error::Config("give either p/q or f/g, not both".into()));
        }
        for s in [&c.p, &c.q, &c.f, &c.g] {
            expr(s)?;
        }
        Ok(())
    }
}
