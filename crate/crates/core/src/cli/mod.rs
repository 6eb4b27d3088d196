//! Batch front end: each subcommand reads a [`RunConfig`], runs one pipeline
//! and writes CSV (header row, 17 significant digits) and JSON (fixed key
//! order) into the output directory. Outputs depend only on config and seed.

mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use config::{
    AnalysisConfig, ArcConfig, CoefficientConfig, CounterexampleConfig, GeometryConfig, OutputConfig, Problem,
    RunConfig, SweepConfig,
};

use crate::almgren::{
    check_Hprime, extract_gamma_with, frequency_curve_from, grid_radii, growth_bounds, hardy_boundary_from,
    hardy_interior_from, nu_diagnostics, GammaEstimate, GrowthFit,
};
use crate::asymptotics::{extract_expansion_with, JunctionExpansion};
use crate::counterexample as cx;
use crate::eigenbasis::ModeIndex;
use crate::error::{Error, Result};
use crate::geometry::PolarGrid;
use crate::profile::Energy;
use crate::solver::{
    pohozaev_from_energy, solve_forward_with, solve_with, valid_radius, CoefficientData, ScalarField, SolveReport,
    Solution,
};

/// Command-line level settings.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    pub seed: u64,
    /// Grid-doubling levels applied to the configured geometry.
    pub refine: u32,
}

impl RunOptions {
    /// `--out` wins over the config's output block; the seed flag over the config seed.
    pub fn resolve(cfg: &RunConfig, out: Option<PathBuf>, seed: Option<u64>, refine: u32) -> Self {
        RunOptions {
            out: out
                .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("out")),
            seed: seed.or(cfg.seed).unwrap_or(0),
            refine,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Frequency,
    Extract,
    Hardy,
    Pohozaev,
    Counterexample,
    Sweep,
}

/// Runs one subcommand; returns the files written.
pub fn run(cmd: Command, cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&opts.out)?;
    match cmd {
        Command::Solve => run_solve(cfg, opts),
        Command::Frequency => run_frequency(cfg, opts),
        Command::Extract => run_extract(cfg, opts),
        Command::Hardy => run_hardy(cfg, opts),
        Command::Pohozaev => run_pohozaev(cfg, opts),
        Command::Counterexample => run_counterexample(cfg, opts),
        Command::Sweep => run_sweep(cfg, opts, true),
    }
}

/// Seventeen significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    fs::write(path, s)?;
    Ok(path.to_path_buf())
}

fn num_rows(rows: impl IntoIterator<Item = Vec<f64>>) -> Vec<Vec<String>> {
    rows.into_iter().map(|r| r.into_iter().map(fmt_num).collect()).collect()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(path.to_path_buf())
}

fn reaction(problem: &Problem, what: &str) -> Result<CoefficientData> {
    match problem {
        Problem::Reaction(c) => Ok(c.clone()),
        Problem::Load(_) => Err(Error::Config(format!("{what} needs p/q coefficients, not a load problem"))),
    }
}

fn solve(cfg: &RunConfig, grid: &PolarGrid, problem: &Problem) -> Result<Solution> {
    let arc = cfg.arc.build()?;
    let k = cfg.geometry.k;
    match problem {
        Problem::Reaction(c) => solve_with(c, &arc, grid, k, cfg.solver_options()),
        Problem::Load(d) => solve_forward_with(d, &arc, grid, k, cfg.solver_options()),
    }
}

#[derive(Debug, Clone, Serialize)]
struct GridSummary {
    r: f64,
    epsilon: f64,
    nr: usize,
    m: usize,
    k: usize,
}

fn grid_summary(grid: &PolarGrid, k: usize) -> GridSummary {
    GridSummary {
        r: grid.r_outer(),
        epsilon: grid.epsilon(),
        nr: grid.nr(),
        m: grid.m(),
        k,
    }
}

#[derive(Debug, Clone, Serialize)]
struct SolveSummary {
    grid: GridSummary,
    report: SolveReport,
    max_abs: f64,
}

pub fn run_solve(cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let grid = cfg.grid(opts.refine)?;
    let problem = cfg.problem(&grid)?;
    let sol = solve(cfg, &grid, &problem)?;
    write_field(&sol, &opts.out, cfg.geometry.k)
}

fn write_field(sol: &Solution, dir: &Path, k: usize) -> Result<Vec<PathBuf>> {
    let f = &sol.field;
    let g = f.grid();
    let mut header = vec!["r".to_string()];
    header.extend((1..=f.k_max()).map(|k| format!("phi_{k}")));
    let hdr: Vec<&str> = header.iter().map(String::as_str).collect();
    let modes = num_rows((0..g.nr()).map(|i| {
        let mut row = vec![g.radii()[i]];
        row.extend(f.modes().row(i).iter().copied());
        row
    }));
    let mut files = vec![write_csv(&dir.join("modes.csv"), &hdr, &modes)?];
    let mut s = String::from("r,t,w\n");
    for (i, &r) in g.radii().iter().enumerate() {
        for (j, &t) in g.angles().iter().enumerate() {
            let _ = writeln!(s, "{},{},{}", fmt_num(r), fmt_num(t), fmt_num(f.values()[[i, j]]));
        }
    }
    let path = dir.join("field.csv");
    fs::write(&path, s)?;
    files.push(path);
    files.push(write_json(
        &dir.join("solve.json"),
        &SolveSummary {
            grid: grid_summary(g, k),
            report: sol.report.clone(),
            max_abs: f.max_abs(),
        },
    )?);
    Ok(files)
}

#[derive(Debug, Clone, Serialize)]
pub struct FrequencySummary {
    pub r0: f64,
    pub estimate: GammaEstimate,
    pub growth: GrowthFit,
    pub hprime_residual: f64,
    /// Smallest `ν₁` over the curve; the Schwarz inequality makes it nonnegative.
    pub min_nu1: f64,
    pub schwarz_ok: bool,
    pub flagged: Vec<f64>,
}

fn frequency_tables(
    cfg: &RunConfig,
    field: &ScalarField,
    coeff: &CoefficientData,
) -> Result<(Vec<Vec<f64>>, FrequencySummary)> {
    let grid = field.grid();
    let e = Energy::new(field, coeff)?;
    let r0 = valid_radius(coeff.p_norm(), coeff.q_norm(), grid.r_outer())?;
    let radii: Vec<f64> = grid_radii(grid, r0)
        .into_iter()
        .step_by(cfg.analysis.radii_stride)
        .collect();
    let curve = frequency_curve_from(&e, coeff, &radii)?;
    let nu = nu_diagnostics(&e, &curve.radii)?;
    let estimate = extract_gamma_with(&curve, cfg.analysis.plateau_tol)?;
    let mut growth = growth_bounds(&curve, estimate.gamma)?;
    growth.sigma = cfg.analysis.sigma;
    growth.lower_ok = growth.slope <= 2.0 * estimate.gamma + cfg.analysis.sigma;
    let min_nu1 = nu.nu1.iter().fold(f64::INFINITY, |a, &v| a.min(v));
    let scale = curve.n.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let rows = (0..curve.len())
        .map(|i| vec![curve.radii[i], curve.h[i], curve.d[i], curve.n[i], nu.nu1[i], nu.nu2[i]])
        .collect();
    Ok((
        rows,
        FrequencySummary {
            r0,
            estimate,
            growth,
            hprime_residual: check_Hprime(&curve)?,
            min_nu1,
            schwarz_ok: min_nu1 >= -cfg.analysis.schwarz_slack * scale,
            flagged: curve.flagged.clone(),
        },
    ))
}

const FREQ_HEADER: [&str; 6] = ["r", "H", "D", "N", "nu1", "nu2"];

pub fn run_frequency(cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let grid = cfg.grid(opts.refine)?;
    let problem = cfg.problem(&grid)?;
    let coeff = reaction(&problem, "frequency")?;
    let sol = solve(cfg, &grid, &problem)?;
    let (rows, summary) = frequency_tables(cfg, &sol.field, &coeff)?;
    Ok(vec![
        write_csv(&opts.out.join("frequency.csv"), &FREQ_HEADER, &num_rows(rows))?,
        write_json(&opts.out.join("frequency.json"), &summary)?,
    ])
}

pub fn run_extract(cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let grid = cfg.grid(opts.refine)?;
    let problem = cfg.problem(&grid)?;
    let coeff = reaction(&problem, "extract")?;
    let sol = solve(cfg, &grid, &problem)?;
    let x = extract_expansion_with(&sol.field, &coeff, cfg.analysis.expansion())?;
    Ok(vec![write_json(&opts.out.join("extract.json"), &x)?])
}

#[derive(Debug, Clone, Serialize)]
pub struct HardyCase {
    pub index: usize,
    pub coefficients: Vec<f64>,
    pub radius: f64,
    pub interior: (f64, f64),
    pub interior_slack: f64,
    pub boundary: (f64, f64),
    pub boundary_slack: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HardyReport {
    pub seed: u64,
    pub slack_tol: f64,
    pub min_slack: f64,
    pub all_pass: bool,
    pub cases: Vec<HardyCase>,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b) / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Both Hardy inequalities on seeded random mode mixtures.
pub fn hardy_table(grid: &PolarGrid, cases: usize, modes: usize, slack_tol: f64, seed: u64) -> Result<HardyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero = CoefficientData::zero();
    let mut out = Vec::with_capacity(cases);
    for index in 0..cases {
        let coefficients: Vec<f64> = (0..modes).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let radius = grid.r_outer() * rng.gen_range(0.1..=1.0);
        let terms: Vec<(ModeIndex, f64)> = coefficients
            .iter()
            .enumerate()
            .map(|(s, &c)| (ModeIndex::from_slot(s), c))
            .collect();
        let field = ScalarField::mode_mixture(grid, modes, &terms)?;
        let e = Energy::new(&field, &zero)?;
        let interior = hardy_interior_from(&e, radius)?;
        let boundary = hardy_boundary_from(&e, radius)?;
        let interior_slack = rel(interior.0, interior.1);
        let boundary_slack = rel(boundary.1, boundary.0);
        out.push(HardyCase {
            index,
            coefficients,
            radius,
            interior,
            interior_slack,
            boundary,
            boundary_slack,
            pass: interior_slack >= -slack_tol && boundary_slack >= -slack_tol,
        });
    }
    let min_slack = out
        .iter()
        .fold(f64::INFINITY, |a, c| a.min(c.interior_slack).min(c.boundary_slack));
    Ok(HardyReport {
        seed,
        slack_tol,
        min_slack,
        all_pass: out.iter().all(|c| c.pass),
        cases: out,
    })
}

pub fn run_hardy(cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let grid = cfg.grid(opts.refine)?;
    let a = &cfg.analysis;
    let report = hardy_table(&grid, a.hardy_cases, a.hardy_modes, a.hardy_slack, opts.seed)?;
    Ok(vec![write_json(&opts.out.join("hardy.json"), &report)?])
}

#[derive(Debug, Clone, Serialize)]
pub struct PohozaevLevel {
    pub level: u32,
    pub nr: usize,
    pub log_step: f64,
    pub res1: f64,
    pub res2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PohozaevSummary {
    pub radius: f64,
    pub levels: Vec<PohozaevLevel>,
    /// `log₂` of successive residual ratios of the larger residual.
    pub observed_orders: Vec<f64>,
}

pub fn pohozaev_refinement(cfg: &RunConfig, base: u32, levels: u32) -> Result<PohozaevSummary> {
    let mut out = Vec::new();
    let mut radius = 0.0;
    for level in 0..=levels {
        let grid = cfg.grid(base + level)?;
        let coeff = reaction(&cfg.problem(&grid)?, "pohozaev")?;
        let sol = solve(cfg, &grid, &Problem::Reaction(coeff.clone()))?;
        radius = 0.5 * grid.r_outer();
        let res = pohozaev_from_energy(&Energy::new(&sol.field, &coeff)?, radius)?;
        out.push(PohozaevLevel {
            level: base + level,
            nr: grid.nr(),
            log_step: grid.log_step(),
            res1: res.res1,
            res2: res.res2,
        });
    }
    let observed_orders = out
        .windows(2)
        .map(|w| (w[0].res1.max(w[0].res2) / w[1].res1.max(w[1].res2)).log2())
        .collect();
    Ok(PohozaevSummary {
        radius,
        levels: out,
        observed_orders,
    })
}

pub fn run_pohozaev(cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let grid = cfg.grid(opts.refine)?;
    let problem = cfg.problem(&grid)?;
    let coeff = reaction(&problem, "pohozaev")?;
    let sol = solve(cfg, &grid, &problem)?;
    let e = Energy::new(&sol.field, &coeff)?;
    let lo = 10.0 * grid.epsilon();
    let mut rows = Vec::new();
    for (i, &r) in grid.radii().iter().enumerate() {
        if r >= lo && r < grid.r_outer() && i % 8 == 0 {
            let res = pohozaev_from_energy(&e, r)?;
            rows.push(vec![r, res.res1, res.res2]);
        }
    }
    let summary = pohozaev_refinement(cfg, opts.refine, cfg.analysis.pohozaev_levels)?;
    let refine_rows: Vec<Vec<String>> = summary
        .levels
        .iter()
        .map(|l| {
            vec![
                l.level.to_string(),
                l.nr.to_string(),
                fmt_num(l.log_step),
                fmt_num(l.res1),
                fmt_num(l.res2),
            ]
        })
        .collect();
    Ok(vec![
        write_csv(&opts.out.join("pohozaev_radii.csv"), &["r", "res1", "res2"], &num_rows(rows))?,
        write_csv(
            &opts.out.join("pohozaev_refinement.csv"),
            &["level", "nr", "log_step", "res1", "res2"],
            &refine_rows,
        )?,
        write_json(&opts.out.join("pohozaev.json"), &summary)?,
    ])
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleSummary {
    pub stima: Vec<(f64, f64)>,
    pub stima_limit: f64,
    pub c1_deformation: Vec<(f64, f64)>,
    pub c1_limit: f64,
    pub jacobian: cx::JacobianEstimate,
    pub gamma_minus_terminal_distance: f64,
    pub gamma_minus_diverged: bool,
    pub neumann_residual: f64,
    pub u_log_model: cx::ModelReport,
}

fn curve_rows(c: &cx::CurveTrace) -> Vec<Vec<f64>> {
    (0..c.points.len())
        .map(|i| vec![c.params[i], c.points[i][0], c.points[i][1], c.tangents[i][0], c.tangents[i][1]])
        .collect()
}

pub fn counterexample_summary(c: &CounterexampleConfig) -> Result<(CounterexampleSummary, [cx::CurveTrace; 3])> {
    use std::f64::consts::PI;
    let gp = cx::gamma_plus(c.curve_samples)?;
    let gpd = cx::gamma_plus_deformed(c.curve_samples)?;
    let gm = cx::trace_gamma_minus(c.start_distance, c.step, c.n_steps)?;
    let (lo, hi, n) = c.model_radii;
    let model = cx::log_model_fit(&cx::u_log_arc_samples(&cx::log_radii(lo, hi, n), &gm)?)?;
    let summary = CounterexampleSummary {
        stima: cx::stima_ratio(&c.x1)?,
        stima_limit: -PI / 4.0,
        c1_deformation: cx::c1_deformation_ratio(&c.x1)?,
        c1_limit: -4.0 * PI / 9.0,
        jacobian: cx::jacobian_at_origin()?,
        gamma_minus_terminal_distance: gm.terminal_distance,
        gamma_minus_diverged: gm.diverged,
        neumann_residual: cx::neumann_residual(&gm),
        u_log_model: model,
    };
    Ok((summary, [gp, gpd, gm]))
}

pub fn run_counterexample(cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let (summary, [gp, gpd, gm]) = counterexample_summary(&cfg.counterexample)?;
    let hdr = ["param", "x1", "x2", "tx", "ty"];
    let dir = &opts.out;
    let ratio_rows = |v: &[(f64, f64)], lim: f64| num_rows(v.iter().map(|&(x, r)| vec![x, r, r / lim - 1.0]));
    Ok(vec![
        write_csv(&dir.join("gamma_plus.csv"), &hdr, &num_rows(curve_rows(&gp)))?,
        write_csv(&dir.join("gamma_plus_deformed.csv"), &hdr, &num_rows(curve_rows(&gpd)))?,
        write_csv(&dir.join("gamma_minus.csv"), &hdr, &num_rows(curve_rows(&gm)))?,
        write_csv(
            &dir.join("stima.csv"),
            &["x1", "ratio", "rel_error"],
            &ratio_rows(&summary.stima, summary.stima_limit),
        )?,
        write_csv(
            &dir.join("c1_deformation.csv"),
            &["x1", "ratio", "rel_error"],
            &ratio_rows(&summary.c1_deformation, summary.c1_limit),
        )?,
        write_json(&dir.join("counterexample.json"), &summary)?,
    ])
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepCase {
    pub index: usize,
    pub p: String,
    pub q: String,
    pub arc: ArcConfig,
    pub expansion: Option<JunctionExpansion>,
    pub error: Option<String>,
}

/// Expands the sweep block into one config per case.
pub fn sweep_cases(cfg: &RunConfig) -> Vec<RunConfig> {
    let or = |v: &Vec<String>, d: &Option<String>| {
        if v.is_empty() {
            vec![d.clone().unwrap_or_else(|| "0".into())]
        } else {
            v.clone()
        }
    };
    let ps = or(&cfg.sweep.p, &cfg.coefficients.p);
    let qs = or(&cfg.sweep.q, &cfg.coefficients.q);
    let arcs = if cfg.sweep.arc.is_empty() {
        vec![cfg.arc.clone()]
    } else {
        cfg.sweep.arc.clone()
    };
    let mut out = Vec::new();
    for p in &ps {
        for q in &qs {
            for arc in &arcs {
                let mut c = cfg.clone();
                c.coefficients = CoefficientConfig {
                    p: Some(p.clone()),
                    q: Some(q.clone()),
                    f: None,
                    g: None,
                };
                c.arc = arc.clone();
                c.sweep = SweepConfig::default();
                out.push(c);
            }
        }
    }
    out
}

fn sweep_one(index: usize, c: &RunConfig, opts: &RunOptions) -> Result<(SweepCase, Vec<PathBuf>)> {
    let dir = opts.out.join(format!("case_{index:03}"));
    fs::create_dir_all(&dir)?;
    let grid = c.grid(opts.refine)?;
    let problem = c.problem(&grid)?;
    let coeff = reaction(&problem, "sweep")?;
    let mut files = Vec::new();
    let outcome = solve(c, &grid, &problem).and_then(|sol| {
        let (rows, summary) = frequency_tables(c, &sol.field, &coeff)?;
        files.push(write_csv(&dir.join("frequency.csv"), &FREQ_HEADER, &num_rows(rows))?);
        files.push(write_json(&dir.join("frequency.json"), &summary)?);
        extract_expansion_with(&sol.field, &coeff, c.analysis.expansion())
    });
    let (expansion, error) = match outcome {
        Ok(x) => {
            files.push(write_json(&dir.join("extract.json"), &x)?);
            (Some(x), None)
        }
        Err(e) if !e.is_validation() => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let case = SweepCase {
        index,
        p: c.coefficients.p.clone().unwrap_or_default(),
        q: c.coefficients.q.clone().unwrap_or_default(),
        arc: c.arc.clone(),
        expansion,
        error,
    };
    Ok((case, files))
}

/// Runs every sweep case, concurrently when `parallel`; the outputs do not
/// depend on the execution order.
pub fn run_sweep(cfg: &RunConfig, opts: &RunOptions, parallel: bool) -> Result<Vec<PathBuf>> {
    let cases = sweep_cases(cfg);
    fs::create_dir_all(&opts.out)?;
    let results: Vec<Result<(SweepCase, Vec<PathBuf>)>> = if parallel {
        cases.par_iter().enumerate().map(|(i, c)| sweep_one(i, c, opts)).collect()
    } else {
        cases.iter().enumerate().map(|(i, c)| sweep_one(i, c, opts)).collect()
    };
    let (results, written): (Vec<SweepCase>, Vec<Vec<PathBuf>>) =
        results.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
    let mut files: Vec<PathBuf> = written.into_iter().flatten().collect();
    files.push(write_json(&opts.out.join("sweep.json"), &results)?);
    Ok(files)
}
