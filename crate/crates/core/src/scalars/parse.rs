use num_bigint::BigInt;

use super::{RatFun, Rational, Scalar, ScalarError};

/// Recursive-descent parser for scalar expressions.
///
/// ```text
/// expr   := term (('+' | '-') term)*
/// term   := unary (('*' | '/') unary)*
/// unary  := '-' unary | power
/// power  := atom ('^' uint)?
/// atom   := integer | name | '(' expr ')'
/// ```
pub struct ScalarParser<'a> {
    src: &'a [u8],
    pos: usize,
}

pub fn parse_scalar(text: &str) -> Result<RatFun, ScalarError> {
    let mut p = ScalarParser::new(text);
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(v)
}

impl<'a> ScalarParser<'a> {
    pub fn new(text: &'a str) -> Self {
        ScalarParser {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    /// Current byte offset.
    pub fn pos(&self) -> usize {
        self.pos
    }

    fn error(&self, msg: &str) -> ScalarError {
        ScalarError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    pub fn expr(&mut self) -> Result<RatFun, ScalarError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' {
                Scalar::add(&acc, &rhs)
            } else {
                Scalar::sub(&acc, &rhs)
            };
        }
        Ok(acc)
    }

    /// Products and quotients only; stops before a top-level `+` or `-`.
    pub fn term(&mut self) -> Result<RatFun, ScalarError> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            let at = self.pos;
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if c == b'*' {
                Scalar::mul(&acc, &rhs)
            } else {
                Scalar::div(&acc, &rhs).ok_or(ScalarError::Syntax {
                    pos: at,
                    msg: "division by zero".into(),
                })?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFun, ScalarError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Scalar::neg(&self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFun, ScalarError> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a nonnegative integer exponent"));
        }
        let e: u32 = std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error("exponent too large"))?;
        let mut acc = RatFun::one();
        for _ in 0..e {
            acc = Scalar::mul(&acc, &base);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<RatFun, ScalarError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let n: BigInt = digits.parse().expect("digits");
                Ok(RatFun::constant(Rational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                Ok(RatFun::var(name))
            }
            Some(_) => Err(self.error("expected a number, name or `(`")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Parses an expression that must evaluate to a rational constant.
pub fn parse_rational_expr(text: &str) -> Result<Rational, ScalarError> {
    let v = parse_scalar(text)?;
    v.to_rational()
        .ok_or_else(|| ScalarError::NotConstant(v.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{int, rat};

    #[test]
    fn precedence() {
        assert_eq!(parse_rational_expr("1+2*3^2").unwrap(), int(19));
        assert_eq!(parse_rational_expr("-3/2").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational_expr("(1/2)+(1/3)").unwrap(), rat(5, 6));
    }

    #[test]
    fn errors_carry_position() {
        match parse_scalar("2*(a+") {
            Err(ScalarError::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_scalar("1/0"), Err(ScalarError::Syntax { .. })));
        assert!(parse_rational_expr("a").is_err());
    }

    #[test]
    fn printed_forms_reparse() {
        for s in ["2*b*a-b*c", "r*(2*s2-t2)/(1+t3)", "-1/8", "x^3-2/3*x"] {
            let v = parse_scalar(s).unwrap();
            assert_eq!(parse_scalar(&v.to_string()).unwrap(), v, "{s}");
        }
    }
}
