//! Text and JSON forms of coderivations.
//!
//! ```text
//! sum   := '0' | ['-'] term (('+' | '-') term)*
//! term  := ('ps' | 'ph') '[' int (',' int)* ';' int ']' ['*' coeff]
//! coeff := scalar product/quotient, e.g. `2`, `(1/3)`, `a*b`, `(2*a-c)`
//! ```
//! The target index is 1-based. `ps` marks odd cochains and `ph` even ones.

use serde::{Deserialize, Serialize};

use super::{coefficient_text, BasisCochain, Coderivation, GradedSpace, SpaceError};
use crate::scalars::{RatFun, Scalar, ScalarError, ScalarParser};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub exponents: Vec<u32>,
    pub target: usize,
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CochainJson {
    pub terms: Vec<TermJson>,
}

impl CochainJson {
    pub fn from_coderivation<S: Scalar>(d: &Coderivation<S>) -> Self {
        CochainJson {
            terms: d
                .terms()
                .map(|(c, v)| TermJson {
                    exponents: c.exponents.clone(),
                    target: c.target + 1,
                    coeff: coefficient_text(v),
                })
                .collect(),
        }
    }

    pub fn to_coderivation(&self, sp: &GradedSpace) -> Result<Coderivation<RatFun>, SpaceError> {
        let mut d = Coderivation::zero(sp);
        for t in &self.terms {
            if t.exponents.len() != sp.dim() {
                return Err(SpaceError::Arity {
                    got: t.exponents.len(),
                    dim: sp.dim(),
                });
            }
            if t.target == 0 || t.target > sp.dim() {
                return Err(SpaceError::Target(t.target));
            }
            let v = crate::scalars::parse_scalar(&t.coeff).map_err(|e| syntax(0, e))?;
            d.add_term(BasisCochain::new(t.exponents.clone(), t.target - 1), v);
        }
        Ok(d)
    }
}

fn syntax(offset: usize, e: ScalarError) -> SpaceError {
    match e {
        ScalarError::Syntax { pos, msg } => SpaceError::Syntax {
            pos: offset + pos,
            msg,
        },
        other => SpaceError::Syntax {
            pos: offset,
            msg: other.to_string(),
        },
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), SpaceError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{s}`")))
        }
    }

    fn err(&self, msg: &str) -> SpaceError {
        SpaceError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn uint(&mut self) -> Result<u32, SpaceError> {
        self.skip_ws();
        let start = self.pos;
        while self.text[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.text[start..self.pos].parse().map_err(|_| SpaceError::Syntax {
            pos: start,
            msg: "expected a nonnegative integer".into(),
        })
    }
}

/// Parses the cochain grammar over `sp`. Coefficients may be symbolic.
pub fn parse_cochain(text: &str, sp: &GradedSpace) -> Result<Coderivation<RatFun>, SpaceError> {
    let mut cur = Cursor { text, pos: 0 };
    let mut d = Coderivation::zero(sp);
    if cur.peek() == Some('0') {
        cur.pos += 1;
        return match cur.peek() {
            None => Ok(d),
            Some(_) => Err(cur.err("unexpected input after `0`")),
        };
    }
    let mut negate = cur.eat("-");
    loop {
        let start = {
            cur.skip_ws();
            cur.pos
        };
        let odd_tag = if cur.eat("ps") {
            true
        } else if cur.eat("ph") {
            false
        } else {
            return Err(cur.err("expected `ps[` or `ph[`"));
        };
        cur.expect("[")?;
        let mut exps = vec![cur.uint()?];
        while cur.eat(",") {
            exps.push(cur.uint()?);
        }
        cur.expect(";")?;
        let target = cur.uint()? as usize;
        cur.expect("]")?;
        if exps.len() != sp.dim() {
            return Err(SpaceError::Arity {
                got: exps.len(),
                dim: sp.dim(),
            });
        }
        if target == 0 || target > sp.dim() {
            return Err(SpaceError::Target(target));
        }
        let c = BasisCochain::new(exps, target - 1);
        if c.is_odd(sp) != odd_tag {
            return Err(SpaceError::ParityTag {
                written: text[start..start + 2].to_string(),
                cochain: c.label(sp),
            });
        }
        if !c.is_nonvanishing(sp) {
            return Err(SpaceError::OddSquare(c.label(sp)));
        }
        let mut coeff = RatFun::one();
        if cur.eat("*") {
            let offset = cur.pos;
            let mut p = ScalarParser::new(&text[offset..]);
            coeff = p.term().map_err(|e| syntax(offset, e))?;
            cur.pos = offset + p.pos();
        }
        if negate {
            coeff = coeff.neg();
        }
        d.add_term(c, coeff);
        match cur.peek() {
            None => break,
            Some('+') => {
                cur.pos += 1;
                negate = false;
            }
            Some('-') => {
                cur.pos += 1;
                negate = true;
            }
            Some(_) => return Err(cur.err("expected `+`, `-` or end of input")),
        }
    }
    Ok(d)
}

fn wrap(s: &str) -> String {
    let simple = s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if simple {
        s.to_string()
    } else {
        format!("({s})")
    }
}

/// Canonical text form; `parse_cochain` reads it back to an equal value.
pub fn print_cochain<S: Scalar>(d: &Coderivation<S>) -> String {
    if d.is_zero() {
        return "0".into();
    }
    let sp = d.space();
    let mut out = String::new();
    for (i, (c, v)) in d.terms().enumerate() {
        let mut text = coefficient_text(v);
        let mut neg = false;
        if let Some(rest) = text.strip_prefix('-') {
            let flipped = coefficient_text(&v.neg());
            if !flipped.starts_with('-') && (v.to_rational().is_some() || !rest.is_empty()) {
                neg = true;
                text = flipped;
            }
        }
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&c.label(sp));
        if text != "1" {
            out.push('*');
            out.push_str(&wrap(&text));
        }
    }
    out
}
