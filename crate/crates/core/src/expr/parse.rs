use thiserror::Error;

use super::{BinOp, Constant, Expr, Func, Var};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    /// `offset` is the 1-based byte column of the offending token; end of
    /// input reports one past the last byte.
    #[error("syntax error at offset {offset}: expected {}", expected.join(" | "))]
    Syntax { offset: usize, expected: Vec<String> },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Returns the token and its 0-based start.
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() || c == b'.' {
            return self.number(start).map(|t| (t, start));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self
                .src
                .get(self.pos)
                .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
            {
                self.pos += 1;
            }
            let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
            return Ok((Tok::Ident(name), start));
        }
        self.pos += 1;
        let tok = match c {
            b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            _ => {
                return Err(ParseError::Syntax {
                    offset: start + 1,
                    expected: vec!["number".into(), "identifier".into(), "operator".into()],
                })
            }
        };
        Ok((tok, start))
    }

    fn number(&mut self, start: usize) -> Result<Tok, ParseError> {
        let digits = |lx: &mut Self| {
            let from = lx.pos;
            while lx.src.get(lx.pos).is_some_and(u8::is_ascii_digit) {
                lx.pos += 1;
            }
            lx.pos - from
        };
        let mut n = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(ParseError::Syntax { offset: start + 1, expected: vec!["digit".into()] });
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            // Only treat as exponent when digits follow; otherwise `e` is the constant.
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>()
            .map(Tok::Num)
            .map_err(|_| ParseError::Syntax { offset: start + 1, expected: vec!["number".into()] })
    }
}

/// Recursive-descent parser.
///
/// ```text
/// sum     := product (('+' | '-') product)*
/// product := unary (('*' | '/') unary)*
/// unary   := '-' unary | power
/// power   := primary ('^' unary)?
/// primary := number | ident | ident '(' sum ')' | '(' sum ')'
/// ```
struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    at: usize,
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(), ParseError> {
        let (tok, at) = self.lexer.next()?;
        self.tok = tok;
        self.at = at;
        Ok(())
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset: self.at + 1,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.tok {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.product()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.unary()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Op('-') {
            self.bump()?;
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.tok == Tok::Op('^') {
            self.bump()?;
            let exp = self.unary()?;
            return Ok(Expr::bin(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match std::mem::replace(&mut self.tok, Tok::End) {
            Tok::Num(v) => {
                self.bump()?;
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.sum()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let at = self.at;
                self.bump()?;
                if let Some(func) = Func::from_name(&name) {
                    if self.tok != Tok::LParen {
                        return self.fail(&["("]);
                    }
                    self.bump()?;
                    let arg = self.sum()?;
                    self.expect_rparen()?;
                    return Ok(Expr::call(func, arg));
                }
                match name.as_str() {
                    "x1" => Ok(Expr::Var(Var::X1)),
                    "x2" => Ok(Expr::Var(Var::X2)),
                    "s" => Ok(Expr::Var(Var::S)),
                    "pi" => Ok(Expr::Const(Constant::Pi)),
                    "e" => Ok(Expr::Const(Constant::E)),
                    _ => Err(ParseError::UnknownIdentifier { name, offset: at + 1 }),
                }
            }
            other => {
                self.tok = other;
                self.fail(&["number", "identifier", "("])
            }
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if self.tok != Tok::RParen {
            let expected: &[&str] = if self.tok == Tok::End {
                &[")"]
            } else {
                &[")", "operator"]
            };
            return self.fail(expected);
        }
        self.bump()
    }
}

/// Parses an expression over `x1`, `x2` and the optional parameter `s`.
pub fn parse(source: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { lexer: Lexer { src: source.as_bytes(), pos: 0 }, tok: Tok::End, at: 0 };
    p.bump()?;
    if p.tok == Tok::End {
        return p.fail(&["expression"]);
    }
    let e = p.sum()?;
    if p.tok != Tok::End {
        return p.fail(&["operator", "end of input"]);
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x1() -> Expr {
        Expr::Var(Var::X1)
    }
    fn x2() -> Expr {
        Expr::Var(Var::X2)
    }

    #[test]
    fn circle_polynomial() {
        let e = parse("x1^2 + x2^2 - 1").unwrap();
        let want = Expr::bin(
            BinOp::Sub,
            Expr::bin(
                BinOp::Add,
                Expr::bin(BinOp::Pow, x1(), Expr::Num(2.0)),
                Expr::bin(BinOp::Pow, x2(), Expr::Num(2.0)),
            ),
            Expr::Num(1.0),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn unclosed_paren_reports_offset_7() {
        match parse("sin(x1") {
            Err(ParseError::Syntax { offset, expected }) => {
                assert_eq!(offset, 7);
                assert!(expected.contains(&")".to_string()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unary_minus() {
        assert_eq!(parse("-x2").unwrap(), Expr::neg(x2()));
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        assert_eq!(
            parse("-x1^2").unwrap(),
            Expr::neg(Expr::bin(BinOp::Pow, x1(), Expr::Num(2.0)))
        );
    }

    #[test]
    fn power_is_right_associative() {
        let e = parse("x1^2^3").unwrap();
        assert_eq!(
            e,
            Expr::bin(
                BinOp::Pow,
                x1(),
                Expr::bin(BinOp::Pow, Expr::Num(2.0), Expr::Num(3.0))
            )
        );
    }

    #[test]
    fn left_associative_sub_and_div() {
        let e = parse("x1 - x2 - 1").unwrap();
        assert_eq!(e, Expr::bin(BinOp::Sub, Expr::bin(BinOp::Sub, x1(), x2()), Expr::Num(1.0)));
        let e = parse("x1 / x2 / 2").unwrap();
        assert_eq!(e, Expr::bin(BinOp::Div, Expr::bin(BinOp::Div, x1(), x2()), Expr::Num(2.0)));
    }

    #[test]
    fn exponent_literals_and_constant_e() {
        assert_eq!(parse("1e-3").unwrap(), Expr::Num(1e-3));
        assert_eq!(parse("2.5E2").unwrap(), Expr::Num(250.0));
        assert_eq!(
            parse("2*e").unwrap(),
            Expr::bin(BinOp::Mul, Expr::Num(2.0), Expr::Const(Constant::E))
        );
    }

    #[test]
    fn unknown_identifier() {
        match parse("x1 + y") {
            Err(ParseError::UnknownIdentifier { name, offset }) => {
                assert_eq!(name, "y");
                assert_eq!(offset, 6);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse("").is_err());
        assert!(parse("x1 +").is_err());
        assert!(parse("x1 x2").is_err());
        assert!(parse("sin x1").is_err());
        assert!(parse("(x1").is_err());
        assert!(parse("x1)").is_err());
        assert!(parse("x1 # 2").is_err());
    }

    #[test]
    fn print_then_reparse() {
        for src in ["-x1^2 + 3*x2", "sin(x1)*cos(x2)/(1+x1^2)", "-(-x2)", "(x1-1)^-2", "2^x1^x2"] {
            let e = parse(src).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{src} -> {e}");
        }
    }
}
