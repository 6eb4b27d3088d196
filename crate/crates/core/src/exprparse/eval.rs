use thiserror::Error;

use super::{BinOp, Expr, Func, Var};

/// Values for the free variables. Unset variables are unbound.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Bindings {
    pub r: Option<f64>,
    pub t: Option<f64>,
    pub x: Option<f64>,
}

impl Bindings {
    /// A point of the half-disk: `x` is bound to `r cos t`.
    pub fn polar(r: f64, t: f64) -> Self {
        Bindings {
            r: Some(r),
            t: Some(t),
            x: Some(r * t.cos()),
        }
    }

    /// A point `x` on the Neumann segment, where `r = x` and `t = 0`.
    pub fn radial(x: f64) -> Self {
        Bindings {
            r: Some(x),
            t: Some(0.0),
            x: Some(x),
        }
    }

    /// Only the angle is bound (arc data).
    pub fn angle(t: f64) -> Self {
        Bindings {
            r: None,
            t: Some(t),
            x: None,
        }
    }

    fn get(&self, v: Var) -> Option<f64> {
        match v {
            Var::R => self.r,
            Var::T => self.t,
            Var::X => self.x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("variable `{var}` is not bound here")]
    Unbound { var: &'static str },
    #[error("{func} is undefined at {value} (argument `{expr}`)")]
    Domain {
        func: &'static str,
        expr: String,
        value: f64,
    },
    #[error("division by zero in `{expr}`")]
    DivisionByZero { expr: String },
    #[error("non-finite result in `{expr}`")]
    NonFinite { expr: String },
}

impl Expr {
    pub fn eval(&self, b: &Bindings) -> Result<f64, EvalError> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Pi => Ok(std::f64::consts::PI),
            Expr::Var(v) => b.get(*v).ok_or(EvalError::Unbound { var: v.name() }),
            Expr::Neg(e) => Ok(-e.eval(b)?),
            Expr::Call(f, arg) => {
                let a = arg.eval(b)?;
                let domain = |func| EvalError::Domain {
                    func,
                    expr: arg.to_string(),
                    value: a,
                };
                let v = match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Abs => a.abs(),
                    Func::Log => {
                        if !(a > 0.0) {
                            return Err(domain("log"));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if !(a >= 0.0) {
                            return Err(domain("sqrt"));
                        }
                        a.sqrt()
                    }
                };
                finite(v, self)
            }
            Expr::Bin(op, l, r) => {
                let x = l.eval(b)?;
                let y = r.eval(b)?;
                let v = match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(EvalError::DivisionByZero {
                                expr: self.to_string(),
                            });
                        }
                        x / y
                    }
                    BinOp::Pow => {
                        if x == 0.0 && y < 0.0 {
                            return Err(EvalError::DivisionByZero {
                                expr: self.to_string(),
                            });
                        }
                        if x < 0.0 && y.fract() != 0.0 {
                            return Err(EvalError::Domain {
                                func: "^",
                                expr: self.to_string(),
                                value: x,
                            });
                        }
                        x.powf(y)
                    }
                };
                finite(v, self)
            }
        }
    }
}

fn finite(v: f64, e: &Expr) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite {
            expr: e.to_string(),
        })
    }
}
