//! S-expression form of operator expressions.
//!
//! ```text
//! expr := (H a) | (Z l) | (tau h m) | (d b) | (mult NAME) | (conv NAME)
//!       | (compose expr ...) | (lincomb (c expr) ...)
//! ```
//! NAME is one of the battery function names.

use super::OperatorExpr;
use crate::error::{Result, ZError};
use crate::funcspace::battery_fn;
use crate::{c, C64};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

fn lex(s: &str) -> Vec<Tok> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' | ')' | ' ' | '\t' | '\n' | '\r' => {
                if !cur.is_empty() {
                    out.push(Tok::Atom(std::mem::take(&mut cur)));
                }
                if ch == '(' {
                    out.push(Tok::Open);
                } else if ch == ')' {
                    out.push(Tok::Close);
                }
            }
            _ => cur.push(ch),
        }
    }
    if !cur.is_empty() {
        out.push(Tok::Atom(cur));
    }
    out
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect_close(&mut self) -> Result<()> {
        match self.next() {
            Some(Tok::Close) => Ok(()),
            t => Err(ZError::Parse(format!("expected ')', found {:?}", t))),
        }
    }

    fn number(&mut self) -> Result<f64> {
        match self.next() {
            Some(Tok::Atom(a)) => a.parse::<f64>().map_err(|_| ZError::Parse(format!("bad number '{}'", a))),
            t => Err(ZError::Parse(format!("expected a number, found {:?}", t))),
        }
    }

    fn expr(&mut self) -> Result<OperatorExpr> {
        match self.next() {
            Some(Tok::Open) => {}
            t => return Err(ZError::Parse(format!("expected '(', found {:?}", t))),
        }
        let head = match self.next() {
            Some(Tok::Atom(a)) => a,
            t => return Err(ZError::Parse(format!("expected operator name, found {:?}", t))),
        };
        let e = match head.as_str() {
            "H" => OperatorExpr::H(c(self.number()?, 0.0)),
            "Delta" => OperatorExpr::Delta(c(self.number()?, 0.0)),
            "Z" => OperatorExpr::Zeta(self.number()?),
            "tau" => {
                let hbar = self.number()?;
                let mu = self.number()?;
                OperatorExpr::Tau { hbar, mu }
            }
            "d" => OperatorExpr::Dilation(self.number()?),
            "mult" | "conv" => {
                let name = match self.next() {
                    Some(Tok::Atom(a)) => a,
                    t => return Err(ZError::Parse(format!("expected function name, found {:?}", t))),
                };
                let f = battery_fn(&name).ok_or_else(|| ZError::Parse(format!("unknown function '{}'", name)))?;
                if head == "mult" {
                    OperatorExpr::Mult(f)
                } else {
                    OperatorExpr::Conv(f)
                }
            }
            "compose" => {
                let mut v = Vec::new();
                while self.toks.get(self.pos) == Some(&Tok::Open) {
                    v.push(self.expr()?);
                }
                if v.is_empty() {
                    return Err(ZError::Parse("compose needs at least one operand".into()));
                }
                return self.expect_close().map(|_| OperatorExpr::Compose(v));
            }
            "lincomb" => {
                let mut v: Vec<(C64, OperatorExpr)> = Vec::new();
                while self.toks.get(self.pos) == Some(&Tok::Open) {
                    self.pos += 1;
                    let k = self.number()?;
                    let e = self.expr()?;
                    self.expect_close()?;
                    v.push((c(k, 0.0), e));
                }
                if v.is_empty() {
                    return Err(ZError::Parse("lincomb needs at least one term".into()));
                }
                return self.expect_close().map(|_| OperatorExpr::LinComb(v));
            }
            other => return Err(ZError::Parse(format!("unknown operator '{}'", other))),
        };
        self.expect_close()?;
        e.validate()?;
        Ok(e)
    }
}

pub fn parse_sexpr(s: &str) -> Result<OperatorExpr> {
    let mut p = Parser { toks: lex(s), pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(ZError::Parse("trailing input after expression".into()));
    }
    Ok(e)
}

fn num(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

pub fn to_sexpr(e: &OperatorExpr) -> String {
    match e {
        OperatorExpr::Dilation(b) => format!("(d {})", b),
        OperatorExpr::Zeta(l) => format!("(Z {})", l),
        OperatorExpr::H(a) => format!("(H {})", num(*a)),
        OperatorExpr::Delta(a) => format!("(Delta {})", num(*a)),
        OperatorExpr::Tau { hbar, mu } => format!("(tau {} {})", hbar, mu),
        OperatorExpr::Mult(v) => format!("(mult {})", v.name()),
        OperatorExpr::Conv(v) => format!("(conv {})", v.name()),
        OperatorExpr::Subst(s) => format!("(subst {} {:?})", s.weight.name(), s.map),
        OperatorExpr::Compose(v) => format!("(compose {})", v.iter().map(to_sexpr).collect::<Vec<_>>().join(" ")),
        OperatorExpr::LinComb(v) => format!(
            "(lincomb {})",
            v.iter().map(|(k, o)| format!("({} {})", num(*k), to_sexpr(o))).collect::<Vec<_>>().join(" ")
        ),
        OperatorExpr::Conjugate => "(conj)".into(),
        OperatorExpr::ItDt => "(itdt)".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = "(compose (H 4) (Z 4) (lincomb (0.5 (tau 0 -1)) (2 (d 3))))";
        let e = parse_sexpr(s).unwrap();
        assert_eq!(to_sexpr(&e), s);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_sexpr("(H)").is_err());
        assert!(parse_sexpr("(compose)").is_err());
        assert!(parse_sexpr("(mult nosuch)").is_err());
    }
}
