//! A small arithmetic language for coefficient functions and boundary data.
//!
//! ```
//! use junction_lab::exprparse::{parse, Bindings};
//!
//! let e = parse("r^(1/2)*cos(t/2)").unwrap();
//! let v = e.eval(&Bindings::polar(1.0, 0.0)).unwrap();
//! assert_eq!(v, 1.0);
//! ```
//!
//! Variables are `r`, `t` and `x`; `x` always denotes the first Cartesian
//! coordinate, so inside the half-disk it is bound to `r cos t`.

mod eval;
mod lexer;
mod parser;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use eval::{Bindings, EvalError};
pub use parser::{parse, MAX_DEPTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    R,
    T,
    X,
}

impl Var {
    fn from_name(s: &str) -> Option<Var> {
        match s {
            "r" => Some(Var::R),
            "t" => Some(Var::T),
            "x" => Some(Var::X),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::R => "r",
            Var::T => "t",
            Var::X => "x",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Log,
    Exp,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(s: &str) -> Option<Func> {
        match s {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "log" => Some(Func::Log),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            "abs" => Some(Func::Abs),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Log => "log",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => " + ",
            BinOp::Sub => " - ",
            BinOp::Mul => " * ",
            BinOp::Div => " / ",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Pi,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("unknown identifier at offset {offset} (`{name}`)")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("unbalanced parenthesis at offset {offset}")]
    UnbalancedParen { offset: usize },
    #[error("unexpected {found} at offset {offset}")]
    UnexpectedToken { offset: usize, found: String },
    #[error("unexpected end of input at offset {offset}")]
    UnexpectedEnd { offset: usize },
    #[error("unexpected character {ch:?} at offset {offset}")]
    UnexpectedChar { offset: usize, ch: char },
    #[error("malformed number `{text}` at offset {offset}")]
    BadNumber { offset: usize, text: String },
    #[error("function `{name}` must be called with parentheses (offset {offset})")]
    ExpectedCall { offset: usize, name: String },
    #[error("expression nested too deeply at offset {offset}")]
    TooDeep { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Empty => None,
            ParseError::UnknownIdentifier { offset, .. }
            | ParseError::UnbalancedParen { offset }
            | ParseError::UnexpectedToken { offset, .. }
            | ParseError::UnexpectedEnd { offset }
            | ParseError::UnexpectedChar { offset, .. }
            | ParseError::BadNumber { offset, .. }
            | ParseError::ExpectedCall { offset, .. }
            | ParseError::TooDeep { offset } => Some(*offset),
        }
    }
}

impl Expr {
    pub fn constant(v: f64) -> Expr {
        Expr::Num(v)
    }

    /// True when no variable occurs in the tree.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi => true,
            Expr::Var(_) => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.is_constant(),
            Expr::Bin(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    pub fn uses(&self, v: Var) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi => false,
            Expr::Var(w) => *w == v,
            Expr::Neg(e) | Expr::Call(_, e) => e.uses(v),
            Expr::Bin(_, a, b) => a.uses(v) || b.uses(v),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            Expr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => 3,
            _ => 5,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints with the fewest parentheses that reparse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Pi => f.write_str("pi"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                write_child(f, e, e.prec() < 3)
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Bin(op, a, b) => {
                let p = self.prec();
                let right_assoc = *op == BinOp::Pow;
                write_child(f, a, a.prec() < p || (right_assoc && a.prec() == p))?;
                f.write_str(op.symbol())?;
                write_child(f, b, b.prec() < p || (!right_assoc && b.prec() == p))
            }
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Expr, ParseError> {
        parse(s)
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Expr, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ev(src: &str, b: Bindings) -> Result<f64, EvalError> {
        parse(src).unwrap().eval(&b)
    }

    #[test]
    fn zero_literal() {
        assert_eq!(parse("0").unwrap(), Expr::Num(0.0));
    }

    #[test]
    fn profile_expression_at_unit_radius() {
        assert_eq!(ev("r^(1/2)*cos(t/2)", Bindings::polar(1.0, 0.0)).unwrap(), 1.0);
    }

    #[test]
    fn unknown_identifier_reports_offset() {
        let err = parse("foo(r)").unwrap_err();
        assert_eq!(err.offset(), Some(0));
        assert!(err.to_string().contains("unknown identifier at offset 0"));
        let err = parse("1 + bar").unwrap_err();
        assert_eq!(err.offset(), Some(4));
    }

    #[test]
    fn structural_errors() {
        assert_eq!(parse("").unwrap_err(), ParseError::Empty);
        assert_eq!(parse("   ").unwrap_err(), ParseError::Empty);
        assert!(matches!(parse("(1+2").unwrap_err(), ParseError::UnbalancedParen { offset: 0 }));
        assert!(matches!(parse("1+2)").unwrap_err(), ParseError::UnbalancedParen { offset: 3 }));
        assert!(matches!(parse("1+").unwrap_err(), ParseError::UnexpectedEnd { offset: 2 }));
        assert!(matches!(parse("sin r").unwrap_err(), ParseError::ExpectedCall { .. }));
        assert!(matches!(parse("2 3").unwrap_err(), ParseError::UnexpectedToken { offset: 2, .. }));
    }

    #[test]
    fn constants_and_functions() {
        let v = ev("pi/2", Bindings::default()).unwrap();
        assert_eq!(v, std::f64::consts::FRAC_PI_2);
        let v = ev("log(r)", Bindings::radial(std::f64::consts::E)).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert_eq!(ev("abs(-3) + exp(0) + sqrt(4)", Bindings::default()).unwrap(), 6.0);
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let err = ev("sqrt(-1+r)", Bindings::radial(0.5)).unwrap_err();
        match err {
            EvalError::Domain { func, ref expr, .. } => {
                assert_eq!(func, "sqrt");
                assert_eq!(expr, "-1 + r");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(ev("log(0*r)", Bindings::radial(1.0)), Err(EvalError::Domain { .. })));
        assert!(matches!(ev("1/(r-1)", Bindings::radial(1.0)), Err(EvalError::DivisionByZero { .. })));
        assert!(matches!(ev("(-8)^(1/3)", Bindings::default()), Err(EvalError::Domain { .. })));
    }

    #[test]
    fn unbound_variable() {
        assert!(matches!(ev("r", Bindings::angle(1.0)), Err(EvalError::Unbound { var: "r" })));
        assert!(matches!(ev("x", Bindings::angle(1.0)), Err(EvalError::Unbound { var: "x" })));
    }

    #[test]
    fn precedence() {
        assert_eq!(ev("2+3*4^2", Bindings::default()).unwrap(), 50.0);
        assert_eq!(ev("-2^2", Bindings::default()).unwrap(), -4.0);
        assert_eq!(ev("2^3^2", Bindings::default()).unwrap(), 512.0);
        assert_eq!(ev("2^-1", Bindings::default()).unwrap(), 0.5);
        assert_eq!(ev("8/4/2", Bindings::default()).unwrap(), 1.0);
        assert_eq!(ev("1-2-3", Bindings::default()).unwrap(), -4.0);
        assert_eq!(ev("-3*-2", Bindings::default()).unwrap(), 6.0);
    }

    #[test]
    fn printing_is_minimal_and_stable() {
        let cases = [
            ("1-(2-3)", "1 - (2 - 3)"),
            ("(1-2)-3", "1 - 2 - 3"),
            ("(2^3)^2", "(2^3)^2"),
            ("2^(3^2)", "2^3^2"),
            ("(-2)^2", "(-2)^2"),
            ("-(2^2)", "-2^2"),
            ("2^(-1)", "2^(-1)"),
            ("-(r*t)", "-(r * t)"),
            ("sin(t)^2", "sin(t)^2"),
            ("0.5+0.25*x", "0.5 + 0.25 * x"),
        ];
        for (src, want) in cases {
            assert_eq!(parse(src).unwrap().to_string(), want, "{src}");
        }
    }

    #[test]
    fn nesting_limit() {
        let deep = format!("{}1{}", "(".repeat(1000), ")".repeat(1000));
        assert!(matches!(parse(&deep), Err(ParseError::TooDeep { .. })));
        let chain = vec!["1"; 5000].join("+");
        assert!(matches!(parse(&chain), Err(ParseError::TooDeep { .. })));
        let ok = format!("{}1{}", "(".repeat(50), ")".repeat(50));
        assert_eq!(parse(&ok).unwrap(), Expr::Num(1.0));
    }

    #[test]
    fn serde_uses_source_text() {
        let e: Expr = serde_json::from_str("\"0.5 + x\"").unwrap();
        assert_eq!(serde_json::to_string(&e).unwrap(), "\"0.5 + x\"");
        assert!(serde_json::from_str::<Expr>("\"0.5 +\"").is_err());
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0f64..100.0).prop_map(Expr::Num),
            Just(Expr::Var(Var::R)),
            Just(Expr::Var(Var::T)),
            Just(Expr::Var(Var::X)),
            Just(Expr::Pi),
        ];
        leaf.prop_recursive(6, 64, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (inner.clone(), inner.clone(), 0..5usize).prop_map(|(a, b, k)| {
                    let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow][k];
                    Expr::Bin(op, Box::new(a), Box::new(b))
                }),
                (inner, 0..6usize).prop_map(|(e, k)| {
                    let f = [Func::Sin, Func::Cos, Func::Log, Func::Exp, Func::Sqrt, Func::Abs][k];
                    Expr::Call(f, Box::new(e))
                }),
            ]
        })
    }

    proptest! {
        #[test]
        fn never_panics_on_text(s in "\\PC{0,40}") {
            let _ = parse(&s);
        }

        #[test]
        fn never_panics_on_bytes(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
            let s = String::from_utf8_lossy(&bytes);
            let _ = parse(&s);
        }

        #[test]
        fn never_panics_on_grammar_soup(s in "[-+*/^() rtx0-9.episncoqlgabd]{0,48}") {
            if let Ok(e) = parse(&s) {
                let _ = e.eval(&Bindings::polar(0.3, 1.1));
            }
        }

        #[test]
        fn print_parse_print_is_fixed_point(e in arb_expr()) {
            let once = e.to_string();
            let reparsed = parse(&once).unwrap();
            prop_assert_eq!(reparsed.to_string(), once.clone());
            // the printer keeps the tree itself, not just the text
            prop_assert_eq!(parse(&once).unwrap(), reparsed);
        }

        #[test]
        fn printed_tree_evaluates_identically(e in arb_expr(), r in 0.01f64..2.0, t in 0.0f64..std::f64::consts::PI) {
            let b = Bindings::polar(r, t);
            let direct = e.eval(&b);
            let again = parse(&e.to_string()).unwrap().eval(&b);
            match (direct, again) {
                (Ok(a), Ok(c)) => prop_assert!(a == c || (a.is_nan() && c.is_nan())),
                (Err(_), Err(_)) => {}
                (a, c) => prop_assert!(false, "mismatch {:?} vs {:?}", a, c),
            }
        }
    }
}
