//! Expression language for user-supplied profiles.
//!
//! Grammar: decimal numbers, `pi`, the declared variable, `+ - * / ^`
//! (with `^` right-associative), unary minus, parentheses, and the
//! functions sin, cos, tan, cot, ln, exp, sqrt, abs, arctan, arccos.
//! No implicit multiplication: `2r` is a syntax error.

use crate::error::{Error, Result};
use crate::jet::Jet4;
use crate::profile::{Interval, Profile};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FnName {
    Sin,
    Cos,
    Tan,
    Cot,
    Ln,
    Exp,
    Sqrt,
    Abs,
    Arctan,
    Arccos,
}

impl FnName {
    fn from_str(s: &str) -> Option<FnName> {
        Some(match s {
            "sin" => FnName::Sin,
            "cos" => FnName::Cos,
            "tan" => FnName::Tan,
            "cot" => FnName::Cot,
            "ln" => FnName::Ln,
            "exp" => FnName::Exp,
            "sqrt" => FnName::Sqrt,
            "abs" => FnName::Abs,
            "arctan" => FnName::Arctan,
            "arccos" => FnName::Arccos,
            _ => return None,
        })
    }

    fn name(&self) -> &'static str {
        match self {
            FnName::Sin => "sin",
            FnName::Cos => "cos",
            FnName::Tan => "tan",
            FnName::Cot => "cot",
            FnName::Ln => "ln",
            FnName::Exp => "exp",
            FnName::Sqrt => "sqrt",
            FnName::Abs => "abs",
            FnName::Arctan => "arctan",
            FnName::Arccos => "arccos",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprAst {
    Num(f64),
    Pi,
    Var,
    Neg(Box<ExprAst>),
    Bin(BinOp, Box<ExprAst>, Box<ExprAst>),
    Fun(FnName, Box<ExprAst>),
}

impl fmt::Display for ExprAst {
    /// Conservative printer: every binary node and negation is
    /// parenthesized so print -> parse is a fixpoint.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprAst::Num(v) => write!(f, "{v}"),
            ExprAst::Pi => write!(f, "pi"),
            ExprAst::Var => write!(f, "r"),
            ExprAst::Neg(e) => write!(f, "(-{e})"),
            ExprAst::Bin(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a}{s}{b})")
            }
            ExprAst::Fun(name, e) => write!(f, "{}({e})", name.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                toks.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, i));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, i));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, i));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_digit()
                        || bytes[i] == b'.'
                        || ((bytes[i] == b'e' || bytes[i] == b'E')
                            && i + 1 < bytes.len()
                            && (bytes[i + 1].is_ascii_digit()
                                || bytes[i + 1] == b'+'
                                || bytes[i + 1] == b'-'))
                        || ((bytes[i] == b'+' || bytes[i] == b'-')
                            && i > start
                            && (bytes[i - 1] == b'e' || bytes[i - 1] == b'E')))
                {
                    i += 1;
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| Error::Syntax {
                    pos: start,
                    msg: format!("bad number `{text}`"),
                })?;
                // reject implicit multiplication like `2r`
                if i < bytes.len() && (bytes[i].is_ascii_alphabetic() || bytes[i] == b'(') {
                    return Err(Error::Syntax {
                        pos: i,
                        msg: "implicit multiplication is not allowed".into(),
                    });
                }
                toks.push((Tok::Num(v), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((Tok::Ident(src[start..i].to_string()), start));
            }
            _ => {
                return Err(Error::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    var: &'a str,
    src_len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(_, p)| *p)
            .unwrap_or(self.src_len)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        let pos = self.here();
        match self.bump() {
            Some(got) if got == t => Ok(()),
            _ => Err(Error::Syntax {
                pos,
                msg: format!("expected {t:?}"),
            }),
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<ExprAst> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = ExprAst::Bin(BinOp::Add, Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = ExprAst::Bin(BinOp::Sub, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // term := unary (('*'|'/') unary)*
    fn term(&mut self) -> Result<ExprAst> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = ExprAst::Bin(BinOp::Mul, Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = ExprAst::Bin(BinOp::Div, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<ExprAst> {
        if let Some(Tok::Minus) = self.peek() {
            self.bump();
            let e = self.unary()?;
            return Ok(ExprAst::Neg(Box::new(e)));
        }
        self.power()
    }

    // power := atom ('^' unary)?   (right-associative)
    fn power(&mut self) -> Result<ExprAst> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let exp = self.unary()?;
            return Ok(ExprAst::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprAst> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(ExprAst::Num(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if name == "pi" {
                    Ok(ExprAst::Pi)
                } else if name == self.var {
                    Ok(ExprAst::Var)
                } else if let Some(f) = FnName::from_str(&name) {
                    self.expect(Tok::LParen)?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(ExprAst::Fun(f, Box::new(arg)))
                } else {
                    Err(Error::UnknownIdentifier { name, pos })
                }
            }
            _ => Err(Error::Syntax {
                pos,
                msg: "expected expression".into(),
            }),
        }
    }
}

/// Parse `src` as an expression in the single variable `var_name`.
pub fn parse_expr(src: &str, var_name: &str) -> Result<ExprAst> {
    if src.trim().is_empty() {
        return Err(Error::Syntax {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let toks = lex(src)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        var: var_name,
        src_len: src.len(),
    };
    let e = p.expr()?;
    if p.pos != toks.len() {
        return Err(Error::Syntax {
            pos: p.here(),
            msg: "trailing input".into(),
        });
    }
    Ok(e)
}

fn eval_ast(ast: &ExprAst, x: Jet4) -> Jet4 {
    match ast {
        ExprAst::Num(v) => Jet4::constant(*v),
        ExprAst::Pi => Jet4::constant(std::f64::consts::PI),
        ExprAst::Var => x,
        ExprAst::Neg(e) => -eval_ast(e, x),
        ExprAst::Bin(op, a, b) => {
            let ja = eval_ast(a, x);
            let jb = eval_ast(b, x);
            match op {
                BinOp::Add => ja + jb,
                BinOp::Sub => ja - jb,
                BinOp::Mul => ja * jb,
                BinOp::Div => ja / jb,
                BinOp::Pow => {
                    // constant integer exponents keep negative bases legal
                    if let ExprAst::Num(p) = **b {
                        if p.fract() == 0.0 && p.abs() <= 64.0 {
                            return ja.powi(p as i32);
                        }
                        return ja.powf(p);
                    }
                    if jb.d1() == 0.0 && jb.d2() == 0.0 {
                        ja.powf(jb.value())
                    } else {
                        (jb * ja.ln()).exp()
                    }
                }
            }
        }
        ExprAst::Fun(f, e) => {
            let j = eval_ast(e, x);
            match f {
                FnName::Sin => j.sin(),
                FnName::Cos => j.cos(),
                FnName::Tan => j.tan(),
                FnName::Cot => j.cot(),
                FnName::Ln => j.ln(),
                FnName::Exp => j.exp(),
                FnName::Sqrt => j.sqrt(),
                FnName::Abs => j.abs(),
                FnName::Arctan => j.atan(),
                FnName::Arccos => j.acos(),
            }
        }
    }
}

/// Compile an AST into a jet-evaluated profile.
pub fn compile_profile(ast: &ExprAst, domain: Interval, singularities: Vec<f64>) -> Profile {
    let label = ast.to_string();
    let ast = ast.clone();
    Profile::from_fn(&label, domain, singularities, move |x| eval_ast(&ast, x))
}

/// Convenience: parse and compile in one step.
pub fn profile_from_expr(
    src: &str,
    var: &str,
    domain: Interval,
    singularities: Vec<f64>,
) -> Result<Profile> {
    Ok(compile_profile(&parse_expr(src, var)?, domain, singularities))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn parses_power_of_sine() {
        let ast = parse_expr("sin(r)^2", "r").unwrap();
        assert_eq!(
            ast,
            ExprAst::Bin(
                BinOp::Pow,
                Box::new(ExprAst::Fun(FnName::Sin, Box::new(ExprAst::Var))),
                Box::new(ExprAst::Num(2.0)),
            )
        );
    }

    #[test]
    fn parses_log_tan_factor() {
        assert!(parse_expr("1 + 4*ln(tan(r/2))", "r").is_ok());
    }

    #[test]
    fn rejects_implicit_multiplication() {
        assert!(matches!(parse_expr("2r", "r"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn rejects_unknown_identifier() {
        assert!(matches!(
            parse_expr("sin(q)", "r"),
            Err(Error::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn pow_right_associative() {
        let a = parse_expr("2^3^2", "r").unwrap();
        let b = parse_expr("2^(3^2)", "r").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn print_parse_fixpoint() {
        for src in [
            "sin(r)^2",
            "1 + 4*ln(tan(r/2))",
            "-r^2 + abs(cos(r))/(1+r)",
            "sqrt(3)/2*r",
            "arccos(sin(r/2)^2)/2",
        ] {
            let ast = parse_expr(src, "r").unwrap();
            let printed = ast.to_string();
            let re = parse_expr(&printed, "r").unwrap();
            assert_eq!(ast, re, "src={src} printed={printed}");
        }
    }

    #[test]
    fn compiled_sine_matches_builtin() {
        let p = profile_from_expr("sin(r)", "r", Interval::of(0.0, PI), vec![]).unwrap();
        let b = Profile::sine(Interval::of(0.0, PI));
        for i in 1..20 {
            let r = PI * (i as f64) / 20.0;
            let a = p.eval(r).unwrap();
            let c = b.eval(r).unwrap();
            for k in 0..5 {
                assert!((a.c[k] - c.c[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rational_square_value() {
        let p = profile_from_expr("(1+r^2)^2/4", "r", Interval::of(0.0, 100.0), vec![]).unwrap();
        assert!((p.value(1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn abs_at_sign_change_is_singular() {
        let p = profile_from_expr("abs(cos(r))", "r", Interval::of(0.0, PI), vec![]).unwrap();
        assert!(p.eval_excl(PI / 2.0, 0.0).is_err() || p.value(PI / 2.0).unwrap().abs() < 1e-16);
        // exactly representable zero argument
        let q = profile_from_expr("abs(r)", "r", Interval::of(-1.0, 1.0), vec![]).unwrap();
        assert!(q.eval_excl(0.0, 0.0).is_err());
    }
}
