use std::f64::consts::{FRAC_2_PI, PI};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::eigenbasis::{psi_eval, ModeIndex};
use crate::error::{Error, Result};
use crate::exprparse::{parse, Bindings, Expr};
use crate::geometry::PolarGrid;

/// A parsed coefficient expression, with constants folded once.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFn {
    source: String,
    expr: Expr,
    constant: Option<f64>,
}

impl ScalarFn {
    pub fn parse(source: &str) -> Result<Self> {
        let expr = parse(source).map_err(|err| Error::Parse {
            source_text: source.to_string(),
            err,
        })?;
        let constant = if expr.is_constant() {
            Some(expr.eval(&Bindings::default()).map_err(|err| Error::Eval {
                source_text: source.to_string(),
                err,
            })?)
        } else {
            None
        };
        Ok(ScalarFn {
            source: source.to_string(),
            expr,
            constant,
        })
    }

    pub fn zero() -> Self {
        ScalarFn::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        ScalarFn {
            source: format!("{c}"),
            expr: Expr::Num(c),
            constant: Some(c),
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn as_constant(&self) -> Option<f64> {
        self.constant
    }

    pub fn is_zero(&self) -> bool {
        self.constant == Some(0.0)
    }

    pub fn eval(&self, b: &Bindings) -> Result<f64> {
        if let Some(c) = self.constant {
            return Ok(c);
        }
        self.expr.eval(b).map_err(|err| Error::Eval {
            source_text: self.source.clone(),
            err,
        })
    }

    pub fn at_polar(&self, r: f64, t: f64) -> Result<f64> {
        self.eval(&Bindings::polar(r, t))
    }

    pub fn at_axis(&self, x: f64) -> Result<f64> {
        self.eval(&Bindings::radial(x))
    }

    pub fn at_angle(&self, t: f64) -> Result<f64> {
        self.eval(&Bindings::angle(t))
    }
}

impl fmt::Display for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Serialize for ScalarFn {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for ScalarFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        ScalarFn::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Potentials `p(r,t)` in the interior and `q(x)` on the Neumann segment,
/// with sampled sup-norms.
#[derive(Debug, Clone)]
pub struct CoefficientData {
    p: ScalarFn,
    q: ScalarFn,
    p_norm: f64,
    q_norm: f64,
    qx_norm: f64,
}

impl CoefficientData {
    pub fn new(p: ScalarFn, q: ScalarFn, grid: &PolarGrid) -> Result<Self> {
        let mut p_norm: f64 = 0.0;
        for &r in grid.radii() {
            for &t in grid.angles() {
                p_norm = p_norm.max(p.at_polar(r, t)?.abs());
            }
        }
        let mut q_norm: f64 = 0.0;
        let mut qx_norm: f64 = 0.0;
        for &x in grid.radii() {
            q_norm = q_norm.max(q.at_axis(x)?.abs());
            qx_norm = qx_norm.max(q_plus_xq_prime(&q, x)?.abs());
        }
        if q.as_constant().is_none() {
            smoothness_probe(&q, grid.r_outer())?;
        }
        if !(p_norm.is_finite() && q_norm.is_finite() && qx_norm.is_finite()) {
            return Err(Error::InvalidInput("coefficient sup-norm is not finite".into()));
        }
        Ok(CoefficientData {
            p,
            q,
            p_norm,
            q_norm,
            qx_norm,
        })
    }

    pub fn zero() -> Self {
        CoefficientData {
            p: ScalarFn::zero(),
            q: ScalarFn::zero(),
            p_norm: 0.0,
            q_norm: 0.0,
            qx_norm: 0.0,
        }
    }

    pub fn constants(p: f64, q: f64) -> Self {
        CoefficientData {
            p: ScalarFn::constant(p),
            q: ScalarFn::constant(q),
            p_norm: p.abs(),
            q_norm: q.abs(),
            qx_norm: q.abs(),
        }
    }

    pub fn p(&self) -> &ScalarFn {
        &self.p
    }

    pub fn q(&self) -> &ScalarFn {
        &self.q
    }

    pub fn p_norm(&self) -> f64 {
        self.p_norm
    }

    pub fn q_norm(&self) -> f64 {
        self.q_norm
    }

    /// `‖q + x q'‖_∞`.
    pub fn qx_norm(&self) -> f64 {
        self.qx_norm
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn q_plus_xq_prime(&self, x: f64) -> Result<f64> {
        q_plus_xq_prime(&self.q, x)
    }
}

/// `d(x q)/dx` by a five-point difference with relative step.
fn q_plus_xq_prime(q: &ScalarFn, x: f64) -> Result<f64> {
    if let Some(c) = q.as_constant() {
        return Ok(c);
    }
    let d = 1e-3 * x;
    let f = |y: f64| -> Result<f64> { Ok(y * q.at_axis(y)?) };
    Ok((-f(x + 2.0 * d)? + 8.0 * f(x + d)? - 8.0 * f(x - d)? + f(x - 2.0 * d)?) / (12.0 * d))
}

/// Largest jump of a differenced derivative between neighbouring samples.
/// For a C¹ function it shrinks with the spacing; across a kink it does not.
fn derivative_jump(q: &ScalarFn, r_outer: f64, n: usize) -> Result<(f64, f64)> {
    let dx = r_outer / n as f64;
    let step = 0.25 * dx;
    let mut prev: Option<f64> = None;
    let mut jump: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..n {
        let x = (i as f64 + 0.5) * dx;
        let d = (q.at_axis(x + step)? - q.at_axis(x - step)?) / (2.0 * step);
        if let Some(p) = prev {
            jump = jump.max((d - p).abs());
        }
        scale = scale.max(d.abs());
        prev = Some(d);
    }
    Ok((jump, scale))
}

fn smoothness_probe(q: &ScalarFn, r_outer: f64) -> Result<()> {
    let (coarse, scale) = derivative_jump(q, r_outer, 1000)?;
    let (fine, _) = derivative_jump(q, r_outer, 4000)?;
    if fine > 0.5 * coarse + 1e-9 * (1.0 + scale) {
        return Err(Error::NotSmooth(format!(
            "derivative jumps by {fine:.3e} at spacing R/4000 vs {coarse:.3e} at R/1000"
        )));
    }
    Ok(())
}

/// Loads `f(r,t)` in the interior and `g(x)` on the Neumann segment.
#[derive(Debug, Clone)]
pub struct ForwardData {
    pub f: ScalarFn,
    pub g: ScalarFn,
}

/// Dirichlet data on the outer arc, as an expression in `t` or a mode list.
#[derive(Debug, Clone)]
pub enum ArcData {
    Expr(ScalarFn),
    Modes(Vec<(ModeIndex, f64)>),
}

impl ArcData {
    pub fn parse(source: &str) -> Result<Self> {
        Ok(ArcData::Expr(ScalarFn::parse(source)?))
    }

    pub fn single(k: ModeIndex, c: f64) -> Self {
        ArcData::Modes(vec![(k, c)])
    }

    /// Highest mode explicitly present (`None` for expressions).
    pub fn max_mode(&self) -> Option<ModeIndex> {
        match self {
            ArcData::Expr(_) => None,
            ArcData::Modes(m) => m.iter().map(|(k, _)| *k).max(),
        }
    }

    /// `ĝ_k = (2/π) ∫ g ψ_k` for `k = 1..=k_max`.
    pub fn coefficients(&self, grid: &PolarGrid, k_max: usize) -> Result<Vec<f64>> {
        match self {
            ArcData::Modes(terms) => {
                let mut out = vec![0.0; k_max];
                for (k, c) in terms {
                    if k.slot() >= k_max {
                        return Err(Error::InvalidInput(format!(
                            "arc data uses mode {k} but the truncation is K = {k_max}"
                        )));
                    }
                    out[k.slot()] += c;
                }
                Ok(out)
            }
            ArcData::Expr(g) => {
                let vals: Vec<f64> = grid.angles().iter().map(|&t| g.at_angle(t)).collect::<Result<_>>()?;
                let scale = vals.iter().fold(1.0f64, |a, v| a.max(v.abs()));
                let end = g.at_angle(PI)?;
                if end.abs() > 1e-12 * scale {
                    return Err(Error::InvalidInput(format!(
                        "arc data `{g}` is {end} at t = pi; it must vanish on the Dirichlet edge"
                    )));
                }
                let w = grid.angular_weights();
                Ok((0..k_max)
                    .map(|s| {
                        let k = ModeIndex::from_slot(s);
                        FRAC_2_PI
                            * grid
                                .angles()
                                .iter()
                                .zip(&vals)
                                .zip(w)
                                .map(|((&t, v), wt)| v * psi_eval(k, t) * wt)
                                .sum::<f64>()
                    })
                    .collect())
            }
        }
    }
}
