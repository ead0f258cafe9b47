//! Text grammar for resource expressions and statements.
//!
//! ```text
//! statement := expr ("=" | ">=") expr
//! expr      := "0" | ["+" | "-"] term (("+" | "-") term)*
//! term      := [coef ["*"]] atom
//! coef      := digits ["/" digits] | digits "." digits
//! atom      := "[" spelling "]" | "<GATE:" name ">"
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::atom::{bracket_atom, GateRef, ResourceAtom};
use super::expr::ResourceExpr;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Geq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub lhs: ResourceExpr,
    pub rel: Relation,
    pub rhs: ResourceExpr,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { pos, msg: msg.into() })
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<&'a str> {
        let r = self.rest();
        let n = r.bytes().take_while(u8::is_ascii_digit).count();
        if n == 0 {
            return None;
        }
        self.pos += n;
        Some(&r[..n])
    }

    fn coef(&mut self) -> Result<Option<BigRational>> {
        self.skip_ws();
        let Some(whole) = self.digits() else { return Ok(None) };
        let whole: BigInt = whole.parse().expect("ascii digits");
        if self.rest().starts_with('/') {
            self.pos += 1;
            let at = self.pos;
            let den: BigInt = match self.digits() {
                Some(d) => d.parse().expect("ascii digits"),
                None => return err(at, "expected denominator after `/`"),
            };
            if den.is_zero() {
                return err(at, "zero denominator");
            }
            return Ok(Some(BigRational::new(whole, den)));
        }
        if self.rest().starts_with('.') {
            self.pos += 1;
            let at = self.pos;
            let frac = match self.digits() {
                Some(d) => d,
                None => return err(at, "expected digits after `.`"),
            };
            let scale = BigInt::from(10).pow(frac.len() as u32);
            let f: BigInt = frac.parse().expect("ascii digits");
            return Ok(Some(BigRational::new(whole * &scale + f, scale)));
        }
        Ok(Some(BigRational::from_integer(whole)))
    }

    fn atom(&mut self) -> Result<ResourceAtom> {
        self.skip_ws();
        let start = self.pos;
        if self.eat("[") {
            let r = self.rest();
            let Some(end) = r.find(']') else { return err(start, "unclosed `[`") };
            let inner: String = r[..end].chars().filter(|c| !c.is_whitespace()).collect();
            self.pos += end + 1;
            return bracket_atom(&inner)
                .ok_or_else(|| Error::Parse { pos: start, msg: format!("unknown resource `[{inner}]`") });
        }
        if self.eat("<GATE:") {
            let r = self.rest();
            let Some(end) = r.find('>') else { return err(start, "unclosed `<GATE:`") };
            let body = r[..end].trim();
            self.pos += end + 1;
            return parse_gate_ref(body).map(ResourceAtom::Gate).ok_or_else(|| Error::Parse { pos: start, msg: format!("bad gate name `{body}`") });
        }
        err(start, "expected a resource atom such as `[qq]` or `<GATE:name>`")
    }

    fn expr(&mut self) -> Result<ResourceExpr> {
        let mut out = ResourceExpr::zero();
        let mut sign = BigRational::one();
        if self.eat("-") {
            sign = -sign;
        } else {
            self.eat("+");
        }
        loop {
            let coef_pos = {
                self.skip_ws();
                self.pos
            };
            let coef = self.coef()?;
            let lone_zero = coef.as_ref().is_some_and(|c| c.is_zero());
            if lone_zero && !matches!(self.peek(), Some('[' | '<' | '*')) {
                // a bare `0` term
            } else {
                if coef.is_some() {
                    self.eat("*");
                }
                if coef.is_some() && !matches!(self.peek(), Some('[' | '<')) {
                    return err(coef_pos, "coefficient must be followed by a resource atom");
                }
                let a = self.atom()?;
                let c = coef.unwrap_or_else(BigRational::one);
                out.add_term(&sign * c, a);
            }
            if self.eat("+") {
                sign = BigRational::one();
            } else if self.eat("-") {
                sign = -BigRational::one();
            } else {
                return Ok(out);
            }
        }
    }

    fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos < self.src.len() {
            return err(self.pos, format!("unexpected `{}`", self.rest().chars().next().unwrap()));
        }
        Ok(())
    }
}

fn parse_gate_ref(body: &str) -> Option<GateRef> {
    let (inner, exchanged) = match body.strip_prefix("F*").and_then(|b| b.strip_suffix("*F")) {
        Some(i) => (i, true),
        None => (body, false),
    };
    let (name, adjoint) = match inner.strip_suffix("^dag") {
        Some(n) => (n, true),
        None => (inner, false),
    };
    let ok = !name.is_empty()
        && name.chars().all(|c| !c.is_whitespace() && !"[]<>*^+=".contains(c));
    ok.then(|| GateRef { name: name.to_string(), adjoint, exchanged })
}

/// Parses a single expression.
pub fn parse_expr(src: &str) -> Result<ResourceExpr> {
    let mut p = Parser { src, pos: 0 };
    if p.peek().is_none() {
        return err(0, "empty expression");
    }
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses `lhs = rhs` or `lhs >= rhs`.
pub fn parse_statement(src: &str) -> Result<Statement> {
    let mut p = Parser { src, pos: 0 };
    if p.peek().is_none() {
        return err(0, "empty statement");
    }
    let lhs = p.expr()?;
    let rel = if p.eat(">=") {
        Relation::Geq
    } else if p.eat("=") {
        Relation::Eq
    } else {
        p.skip_ws();
        return err(p.pos, "expected `=` or `>=`");
    };
    if p.peek().is_none() {
        return err(p.pos, "missing right-hand side");
    }
    let rhs = p.expr()?;
    p.finish()?;
    Ok(Statement { lhs, rel, rhs })
}

impl std::str::FromStr for ResourceExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_expr(s)
    }
}

/// Renders a parse error with a caret under the offending byte.
pub fn caret_diagnostic(src: &str, e: &Error) -> String {
    match e {
        Error::Parse { pos, msg } => {
            let col = src[..(*pos).min(src.len())].chars().count();
            format!("{src}\n{}^ {msg}", " ".repeat(col))
        }
        other => other.to_string(),
    }
}
