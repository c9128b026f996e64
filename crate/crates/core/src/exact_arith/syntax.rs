//! Infix expression syntax shared by rational functions and function
//! expressions: numbers, identifiers, `+ - * / ^`, parentheses, implicit
//! multiplication and calls of the form `name[i, j](a, b; x)`.

use super::{ArithError, MPoly, RatFunc, Rational, Vars};
use num_bigint::BigInt;

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(BigInt),
    Ident(String),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, i32),
    Call { name: String, index: Vec<i64>, args: Vec<Ast>, arg: Option<Box<Ast>> },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(s: &str) -> Result<Vec<Tok>, ArithError> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = cs[st..i].iter().collect();
            out.push(Tok::Num(t.parse().expect("digits")));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if c == '*' && cs.get(i + 1) == Some(&'*') {
            out.push(Tok::Sym('^'));
            i += 2;
        } else if "+-*/^()[],;".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else if c == '−' {
            out.push(Tok::Sym('-'));
            i += 1;
        } else {
            return Err(ArithError::Parse(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Sym(c))
    }

    fn expect(&mut self, c: char) -> Result<(), ArithError> {
        if self.is_sym(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ArithError::Parse(format!("expected `{c}` at token {}", self.pos)))
        }
    }

    fn expr(&mut self) -> Result<Ast, ArithError> {
        let mut lhs = self.term()?;
        loop {
            if self.is_sym('+') {
                self.pos += 1;
                lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.is_sym('-') {
                self.pos += 1;
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Sym('(')))
    }

    fn term(&mut self) -> Result<Ast, ArithError> {
        let mut lhs = self.unary()?;
        loop {
            if self.is_sym('*') {
                self.pos += 1;
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.is_sym('/') {
                self.pos += 1;
                lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?));
            } else if self.starts_atom() {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast, ArithError> {
        if self.is_sym('-') {
            self.pos += 1;
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        if self.is_sym('+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn int(&mut self) -> Result<i64, ArithError> {
        let neg = if self.is_sym('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let v: i64 = n.try_into().map_err(|_| ArithError::Parse("integer too large".into()))?;
                Ok(if neg { -v } else { v })
            }
            _ => Err(ArithError::Parse(format!("expected integer at token {}", self.pos))),
        }
    }

    fn power(&mut self) -> Result<Ast, ArithError> {
        let base = self.atom()?;
        if self.is_sym('^') {
            self.pos += 1;
            let e = if self.is_sym('(') {
                self.pos += 1;
                let e = self.int()?;
                self.expect(')')?;
                e
            } else {
                self.int()?
            };
            let e = i32::try_from(e).map_err(|_| ArithError::Parse("exponent too large".into()))?;
            return Ok(Ast::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ast, ArithError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Ast::Num(n))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let mut index = Vec::new();
                let mut is_call = false;
                if self.is_sym('[') {
                    is_call = true;
                    self.pos += 1;
                    if !self.is_sym(']') {
                        loop {
                            index.push(self.int()?);
                            if self.is_sym(',') {
                                self.pos += 1;
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(']')?;
                }
                let mut args = Vec::new();
                let mut arg = None;
                if self.is_sym('(') && (is_call || self.looks_like_call(&name)) {
                    is_call = true;
                    self.pos += 1;
                    if !self.is_sym(')') && !self.is_sym(';') {
                        loop {
                            args.push(self.expr()?);
                            if self.is_sym(',') {
                                self.pos += 1;
                            } else {
                                break;
                            }
                        }
                    }
                    if self.is_sym(';') {
                        self.pos += 1;
                        arg = Some(Box::new(self.expr()?));
                    }
                    self.expect(')')?;
                }
                if is_call {
                    Ok(Ast::Call { name, index, args, arg })
                } else {
                    Ok(Ast::Ident(name))
                }
            }
            other => Err(ArithError::Parse(format!("unexpected token {other:?}"))),
        }
    }

    /// Known function names, and `Li2`, `Li3`, ..., are calls when followed by `(`.
    fn looks_like_call(&self, name: &str) -> bool {
        CALL_NAMES.contains(&name)
            || name.strip_prefix("Li").is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
    }
}

/// Identifiers treated as function names when followed by `(`.
pub const CALL_NAMES: &[&str] = &["G", "H", "Li", "P", "S", "log", "ln", "Log", "zeta"];

/// Parses an expression into a syntax tree.
pub fn parse(s: &str) -> Result<Ast, ArithError> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(ArithError::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(ArithError::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(e)
}

/// Converts a call-free syntax tree to a rational function.
pub fn ast_to_ratfunc(a: &Ast, vars: &Vars) -> Result<RatFunc, ArithError> {
    Ok(match a {
        Ast::Num(n) => RatFunc::constant(vars, Rational::from_integer(n.clone())),
        Ast::Ident(name) => RatFunc::from_poly(MPoly::var_named(vars, name)?),
        Ast::Neg(x) => -ast_to_ratfunc(x, vars)?,
        Ast::Add(x, y) => &ast_to_ratfunc(x, vars)? + &ast_to_ratfunc(y, vars)?,
        Ast::Sub(x, y) => &ast_to_ratfunc(x, vars)? - &ast_to_ratfunc(y, vars)?,
        Ast::Mul(x, y) => &ast_to_ratfunc(x, vars)? * &ast_to_ratfunc(y, vars)?,
        Ast::Div(x, y) => {
            let d = ast_to_ratfunc(y, vars)?;
            if d.is_zero() {
                return Err(ArithError::DivisionByZero);
            }
            &ast_to_ratfunc(x, vars)? / &d
        }
        Ast::Pow(x, e) => ast_to_ratfunc(x, vars)?.powi(*e)?,
        Ast::Call { name, .. } => {
            return Err(ArithError::Parse(format!("function `{name}` in a rational expression")))
        }
    })
}

pub fn parse_ratfunc(s: &str, vars: &Vars) -> Result<RatFunc, ArithError> {
    ast_to_ratfunc(&parse(s)?, vars)
}

/// Parses a polynomial; division is allowed only by constants.
pub fn parse_poly(s: &str, vars: &Vars) -> Result<MPoly, ArithError> {
    let f = parse_ratfunc(s, vars)?;
    let d = f
        .den()
        .constant_value()
        .ok_or_else(|| ArithError::Parse(format!("`{s}` is not a polynomial")))?;
    Ok(f.num().scale(&d.recip()))
}

#[cfg(test)]
mod tests {
    use super::super::vars;
    use super::*;

    #[test]
    fn precedence_and_implicit_product() {
        let v = vars(&["x"]);
        assert_eq!(parse_poly("1 + 2*x^2", &v).unwrap(), parse_poly("2x^2 + 1", &v).unwrap());
        assert_eq!(parse_poly("-x^2", &v).unwrap().to_string(), "-x^2");
        assert_eq!(parse_ratfunc("x^-1", &v).unwrap(), parse_ratfunc("1/x", &v).unwrap());
        assert_eq!(parse_poly("2(1+x)", &v).unwrap().to_string(), "2 + 2*x");
    }

    #[test]
    fn calls() {
        let a = parse("G(-1, 1; x)").unwrap();
        match a {
            Ast::Call { name, args, arg, .. } => {
                assert_eq!(name, "G");
                assert_eq!(args.len(), 2);
                assert!(arg.is_some());
            }
            _ => panic!("expected a call"),
        }
        let b = parse("Li[2,2](1/2, 2x/(x+1))").unwrap();
        assert!(matches!(b, Ast::Call { ref index, .. } if index == &vec![2, 2]));
        let c = parse("H[0,-1](x)").unwrap();
        assert!(matches!(c, Ast::Call { ref index, .. } if index == &vec![0, -1]));
    }

    #[test]
    fn errors() {
        let v = vars(&["x"]);
        assert!(parse_ratfunc("y + 1", &v).is_err());
        assert!(parse_ratfunc("1/(x-x)", &v).is_err());
        assert!(parse("(1 + x").is_err());
        assert!(parse_poly("1/x", &v).is_err());
    }
}
