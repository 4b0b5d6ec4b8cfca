//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ('^' uint)?
//! atom   := number | 't' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')' | '-' atom
//! func   := sin | cos | sinh | cosh | exp | sqrt
//! ```
//!
//! The tree is built exactly as written; no folding happens here.

use alloc::string::{String, ToString};

use super::{AnalyticExpr, Func, Node};
use crate::error::ParseError;

pub fn parse_expr(source: &str) -> Result<AnalyticExpr, ParseError> {
    let mut p = Parser {
        src: source.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn syntax(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn expr(&mut self) -> Result<AnalyticExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = AnalyticExpr::from_node(Node::Add(lhs, rhs));
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = AnalyticExpr::from_node(Node::Sub(lhs, rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<AnalyticExpr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = AnalyticExpr::from_node(Node::Mul(lhs, rhs));
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = AnalyticExpr::from_node(Node::Div(lhs, rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<AnalyticExpr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let digits_end = self.pos;
            // A fractional part, exponent marker or sign makes this something other than a uint.
            let non_integer = start == digits_end
                || matches!(self.src.get(self.pos), Some(b'.') | Some(b'e') | Some(b'E'));
            if non_integer {
                return Err(ParseError::BadExponent { offset: start });
            }
            let text = core::str::from_utf8(&self.src[start..digits_end]).unwrap_or("");
            let n: u32 = text
                .parse()
                .map_err(|_| ParseError::BadExponent { offset: start })?;
            return Ok(AnalyticExpr::from_node(Node::Pow(base, n)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<AnalyticExpr, ParseError> {
        match self.peek() {
            None => Err(self.syntax("expected an expression")),
            Some(b'-') => {
                self.pos += 1;
                let inner = self.atom()?;
                Ok(AnalyticExpr::from_node(Node::Neg(inner)))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(_) => Err(self.syntax("unexpected character")),
        }
    }

    fn expect(&mut self, byte: u8) -> Result<(), ParseError> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            let mut msg = String::from("expected `");
            msg.push(byte as char);
            msg.push('`');
            Err(self.syntax(&msg))
        }
    }

    fn number(&mut self) -> Result<AnalyticExpr, ParseError> {
        let start = self.pos;
        let s = self.src;
        let digits = |p: &mut usize| {
            let b = *p;
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
            *p > b
        };
        let mut p = self.pos;
        let int_part = digits(&mut p);
        let mut frac_part = false;
        if p < s.len() && s[p] == b'.' {
            p += 1;
            frac_part = digits(&mut p);
        }
        if !int_part && !frac_part {
            return Err(self.syntax("malformed number"));
        }
        // Exponent only when followed by digits, so `2*e` style constants stay identifiers.
        if p < s.len() && (s[p] == b'e' || s[p] == b'E') {
            let mut q = p + 1;
            if q < s.len() && (s[q] == b'+' || s[q] == b'-') {
                q += 1;
            }
            if digits(&mut q) {
                p = q;
            }
        }
        self.pos = p;
        let text = core::str::from_utf8(&s[start..p]).unwrap_or("");
        let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
            offset: start,
            message: "malformed number".to_string(),
        })?;
        Ok(AnalyticExpr::constant(value))
    }

    fn identifier(&mut self) -> Result<AnalyticExpr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match name {
            "t" => return Ok(AnalyticExpr::var()),
            "pi" => return Ok(AnalyticExpr::constant(core::f64::consts::PI)),
            "e" => return Ok(AnalyticExpr::constant(core::f64::consts::E)),
            _ => {}
        }
        let Some(func) = Func::from_name(name) else {
            return Err(ParseError::UnknownIdentifier {
                offset: start,
                name: name.to_string(),
            });
        };
        self.expect(b'(')?;
        let arg = self.expr()?;
        self.expect(b')')?;
        Ok(AnalyticExpr::from_node(Node::Call(func, arg)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var() -> AnalyticExpr {
        AnalyticExpr::var()
    }

    #[test]
    fn cos_of_t() {
        let e = parse_expr("cos(t)").unwrap();
        assert_eq!(*e.node(), Node::Call(Func::Cos, var()));
    }

    #[test]
    fn cubic_minus_t_tree() {
        let e = parse_expr("t^3/3 - t").unwrap();
        let pow = AnalyticExpr::from_node(Node::Pow(var(), 3));
        let quot = AnalyticExpr::from_node(Node::Div(pow, AnalyticExpr::constant(3.0)));
        assert_eq!(*e.node(), Node::Sub(quot, var()));
    }

    #[test]
    fn unclosed_call_reports_offset() {
        let err = parse_expr("cos(").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 4, .. }), "{err:?}");
    }

    #[test]
    fn unknown_identifier() {
        let err = parse_expr("2*tan(t)").unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownIdentifier {
                offset: 2,
                name: "tan".into()
            }
        );
        assert!(matches!(parse_expr("x + 1"), Err(ParseError::UnknownIdentifier { offset: 0, .. })));
    }

    #[test]
    fn exponent_must_be_uint_literal() {
        assert_eq!(parse_expr("t^2.5"), Err(ParseError::BadExponent { offset: 2 }));
        assert_eq!(parse_expr("t^-1"), Err(ParseError::BadExponent { offset: 2 }));
        assert_eq!(parse_expr("t^ t"), Err(ParseError::BadExponent { offset: 3 }));
    }

    #[test]
    fn constants_and_numbers() {
        assert_eq!(parse_expr("pi").unwrap().as_const(), Some(core::f64::consts::PI));
        assert_eq!(parse_expr(" e ").unwrap().as_const(), Some(core::f64::consts::E));
        assert_eq!(parse_expr("1.5e-3").unwrap().as_const(), Some(1.5e-3));
        assert_eq!(parse_expr(".25").unwrap().as_const(), Some(0.25));
        assert!(parse_expr("2 e").is_err());
        assert!(parse_expr("").is_err());
        assert!(parse_expr("(t").is_err());
        assert!(parse_expr("t)").is_err());
    }

    #[test]
    fn unary_minus_binds_to_atom() {
        // factor := atom ('^' uint)? and atom := '-' atom, so -t^2 is (-t)^2.
        let e = parse_expr("-t^2").unwrap();
        let neg = AnalyticExpr::from_node(Node::Neg(var()));
        assert_eq!(*e.node(), Node::Pow(neg, 2));
        let e = parse_expr("2*-t").unwrap();
        assert!(matches!(e.node(), Node::Mul(..)));
    }
}
