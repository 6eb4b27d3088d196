use super::lexer::{tokenize, Tok, Token};
use super::{BinOp, Expr, Func, ParseError, Var};

/// Deepest tree the parser will build. Evaluation and printing recurse, so
/// this bounds stack use for hostile input.
pub const MAX_DEPTH: usize = 200;

const PREFIX_NEG_BP: u8 = 5;

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(src)?;
    if matches!(tokens[0].tok, Tok::Eof) {
        return Err(ParseError::Empty);
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        nest: 0,
    };
    let (expr, _) = p.expr(0)?;
    let t = p.peek();
    match t.tok {
        Tok::Eof => Ok(expr),
        Tok::RParen => Err(ParseError::UnbalancedParen { offset: t.offset }),
        _ => Err(ParseError::UnexpectedToken {
            offset: t.offset,
            found: describe(&t.tok),
        }),
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    nest: usize,
}

// (left bp, right bp); ^ is right-associative
fn infix_bp(tok: &Tok) -> Option<(BinOp, u8, u8)> {
    match tok {
        Tok::Plus => Some((BinOp::Add, 1, 2)),
        Tok::Minus => Some((BinOp::Sub, 1, 2)),
        Tok::Star => Some((BinOp::Mul, 3, 4)),
        Tok::Slash => Some((BinOp::Div, 3, 4)),
        Tok::Caret => Some((BinOp::Pow, 8, 7)),
        _ => None,
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Eof => "end of input".into(),
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn check_depth(depth: usize, offset: usize) -> Result<(), ParseError> {
        if depth > MAX_DEPTH {
            Err(ParseError::TooDeep { offset })
        } else {
            Ok(())
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<(Expr, usize), ParseError> {
        self.nest += 1;
        Self::check_depth(self.nest, self.peek().offset)?;
        let out = self.expr_inner(min_bp);
        self.nest -= 1;
        out
    }

    fn expr_inner(&mut self, min_bp: u8) -> Result<(Expr, usize), ParseError> {
        let (mut lhs, mut depth) = self.prefix()?;
        while let Some((op, lbp, rbp)) = infix_bp(&self.peek().tok) {
            if lbp < min_bp {
                break;
            }
            let at = self.bump().offset;
            let (rhs, rd) = self.expr(rbp)?;
            depth = depth.max(rd) + 1;
            Self::check_depth(depth, at)?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok((lhs, depth))
    }

    fn prefix(&mut self) -> Result<(Expr, usize), ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Num(v) => Ok((Expr::Num(v), 1)),
            Tok::Minus => {
                let (e, d) = self.expr(PREFIX_NEG_BP)?;
                Self::check_depth(d + 1, t.offset)?;
                Ok((Expr::Neg(Box::new(e)), d + 1))
            }
            Tok::LParen => {
                let (e, d) = self.expr(0)?;
                let close = self.peek().clone();
                if close.tok != Tok::RParen {
                    return Err(match close.tok {
                        Tok::Eof => ParseError::UnbalancedParen { offset: t.offset },
                        other => ParseError::UnexpectedToken {
                            offset: close.offset,
                            found: describe(&other),
                        },
                    });
                }
                self.bump();
                Ok((e, d))
            }
            Tok::Ident(name) => self.ident(&name, t.offset),
            Tok::Eof => Err(ParseError::UnexpectedEnd { offset: t.offset }),
            Tok::RParen => Err(ParseError::UnbalancedParen { offset: t.offset }),
            other => Err(ParseError::UnexpectedToken {
                offset: t.offset,
                found: describe(&other),
            }),
        }
    }

    fn ident(&mut self, name: &str, offset: usize) -> Result<(Expr, usize), ParseError> {
        if let Some(v) = Var::from_name(name) {
            return Ok((Expr::Var(v), 1));
        }
        if name == "pi" {
            return Ok((Expr::Pi, 1));
        }
        let Some(f) = Func::from_name(name) else {
            return Err(ParseError::UnknownIdentifier {
                offset,
                name: name.to_string(),
            });
        };
        let open = self.peek().clone();
        if open.tok != Tok::LParen {
            return Err(ParseError::ExpectedCall {
                offset: open.offset,
                name: name.to_string(),
            });
        }
        // the argument is a parenthesised primary
        let (arg, d) = self.prefix()?;
        Self::check_depth(d + 1, offset)?;
        Ok((Expr::Call(f, Box::new(arg)), d + 1))
    }
}
