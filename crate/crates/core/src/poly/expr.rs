//! Infix polynomial expressions: integers, names, `+ - * ^` (also `**`) and
//! parentheses. Names are resolved by the caller, so the same parser serves
//! plain polynomial literals and the program frontend's temporaries.

use num_bigint::BigInt;

use super::Polynomial;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Token {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Comma,
    Assign,
    LBrace,
    RBrace,
    Arrow,
    Other(char),
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub token: Token,
    pub column: usize,
}

/// Tokenize one line; columns are 1-based.
pub(crate) fn tokenize(line: &str, line_no: usize) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let value: BigInt = text.parse().map_err(|_| Error::Parse {
                line: line_no,
                column,
                message: format!("bad integer literal `{text}`"),
            })?;
            out.push(Spanned {
                token: Token::Int(value),
                column,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Spanned {
                token: Token::Ident(chars[start..i].iter().collect()),
                column,
            });
            continue;
        }
        let (token, width) = match c {
            '+' => (Token::Plus, 1),
            '-' if chars.get(i + 1) == Some(&'>') => (Token::Arrow, 2),
            '-' => (Token::Minus, 1),
            '*' if chars.get(i + 1) == Some(&'*') => (Token::Caret, 2),
            '*' => (Token::Star, 1),
            '^' => (Token::Caret, 1),
            '(' => (Token::LParen, 1),
            ')' => (Token::RParen, 1),
            ',' => (Token::Comma, 1),
            '{' => (Token::LBrace, 1),
            '}' => (Token::RBrace, 1),
            '=' if chars.get(i + 1) == Some(&'>') => (Token::Arrow, 2),
            '=' => (Token::Assign, 1),
            ':' if chars.get(i + 1) == Some(&'=') => (Token::Assign, 2),
            other => (Token::Other(other), 1),
        };
        out.push(Spanned { token, column });
        i += width;
    }
    Ok(out)
}

/// Recursive-descent parser over a token slice.
pub(crate) struct ExprParser<'a, F>
where
    F: Fn(&str) -> Option<Polynomial>,
{
    tokens: &'a [Spanned],
    pos: usize,
    line: usize,
    end_column: usize,
    num_vars: usize,
    resolve: F,
}

impl<'a, F> ExprParser<'a, F>
where
    F: Fn(&str) -> Option<Polynomial>,
{
    pub(crate) fn new(
        tokens: &'a [Spanned],
        line: usize,
        end_column: usize,
        num_vars: usize,
        resolve: F,
    ) -> Self {
        ExprParser {
            tokens,
            pos: 0,
            line,
            end_column,
            num_vars,
            resolve,
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|s| &s.token)
    }

    fn column(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|s| s.column)
            .unwrap_or(self.end_column)
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.column(),
            message: message.into(),
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub(crate) fn expect_end(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected `{}`", describe(self.peek().unwrap()))))
        }
    }

    /// expr := term (('+' | '-') term)*
    pub(crate) fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    /// Comma-separated expressions, at least one.
    pub(crate) fn expr_list(&mut self) -> Result<Vec<Polynomial>> {
        let mut out = vec![self.expr()?];
        while self.peek() == Some(&Token::Comma) {
            self.pos += 1;
            out.push(self.expr()?);
        }
        Ok(out)
    }

    /// term := unary ('*' unary)*
    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    /// unary := '-' unary | '+' unary | power
    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    /// power := atom ('^' integer)?
    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            match self.peek() {
                Some(Token::Int(e)) => {
                    let e: u32 = e
                        .try_into()
                        .map_err(|_| self.error("exponent too large"))?;
                    self.pos += 1;
                    Ok(base.pow(e))
                }
                _ => Err(self.error("exponent must be a non-negative integer literal")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek().cloned() {
            Some(Token::Int(v)) => {
                self.pos += 1;
                Ok(Polynomial::constant(self.num_vars, v))
            }
            Some(Token::Ident(name)) => {
                if self.tokens.get(self.pos + 1).map(|s| &s.token) == Some(&Token::LParen)
                    && name == "Power"
                {
                    return self.power_call();
                }
                match (self.resolve)(&name) {
                    Some(p) => {
                        self.pos += 1;
                        Ok(p)
                    }
                    None => Err(self.error(format!("unknown variable `{name}`"))),
                }
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Token::RParen) {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(other) => Err(self.error(format!("unexpected `{}`", describe(&other)))),
            None => Err(self.error("unexpected end of expression")),
        }
    }

    /// `Power(expr, n)`, the spelling used by exported listings.
    fn power_call(&mut self) -> Result<Polynomial> {
        self.pos += 2;
        let base = self.expr()?;
        if self.peek() != Some(&Token::Comma) {
            return Err(self.error("expected `,` in Power(base, exponent)"));
        }
        self.pos += 1;
        let e = match self.peek() {
            Some(Token::Int(e)) => e
                .try_into()
                .map_err(|_| self.error("exponent too large"))?,
            _ => return Err(self.error("exponent must be a non-negative integer literal")),
        };
        self.pos += 1;
        if self.peek() != Some(&Token::RParen) {
            return Err(self.error("expected `)`"));
        }
        self.pos += 1;
        Ok(base.pow(e))
    }
}

pub(crate) fn describe(token: &Token) -> String {
    match token {
        Token::Int(v) => v.to_string(),
        Token::Ident(s) => s.clone(),
        Token::Plus => "+".into(),
        Token::Minus => "-".into(),
        Token::Star => "*".into(),
        Token::Caret => "^".into(),
        Token::LParen => "(".into(),
        Token::RParen => ")".into(),
        Token::Comma => ",".into(),
        Token::Assign => "=".into(),
        Token::LBrace => "{".into(),
        Token::RBrace => "}".into(),
        Token::Arrow => "=>".into(),
        Token::Other(c) => c.to_string(),
    }
}

impl Polynomial {
    /// Parse an infix expression over the given variable names, e.g.
    /// `Polynomial::parse("-X1 - 3*X2 + 2*X2^2", &["X1", "X2"])`.
    pub fn parse(text: &str, names: &[impl AsRef<str>]) -> Result<Polynomial> {
        let num_vars = names.len();
        let tokens = tokenize(text, 1)?;
        let lookup = |name: &str| {
            names
                .iter()
                .position(|n| n.as_ref() == name)
                .map(|i| Polynomial::var(num_vars, i))
        };
        let mut parser = ExprParser::new(&tokens, 1, text.chars().count() + 1, num_vars, lookup);
        let p = parser.expr()?;
        parser.expect_end()?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_standard_form() {
        let p = Polynomial::parse("-X1 - 3*X2 + 2*X2^2", &["X1", "X2"]).unwrap();
        assert_eq!(p.render(&["X1", "X2"]), "2*X2^2 - X1 - 3*X2");
    }

    #[test]
    fn parses_power_call_and_double_star() {
        let a = Polynomial::parse("2*Power(Y1, 2)*Y4", &["Y1", "Y4"]).unwrap();
        let b = Polynomial::parse("2*Y1**2*Y4", &["Y1", "Y4"]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parentheses_expand() {
        let p = Polynomial::parse("(a + b)^2 - a*a - b^2", &["a", "b"]).unwrap();
        assert_eq!(p, Polynomial::parse("2*a*b", &["a", "b"]).unwrap());
    }

    #[test]
    fn unknown_variable_reports_column() {
        let err = Polynomial::parse("x1 + x5", &["x1", "x2"]).unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 1,
                column: 6,
                message: "unknown variable `x5`".into()
            }
        );
    }

    #[test]
    fn trailing_garbage_rejected() {
        assert!(Polynomial::parse("x1 )", &["x1"]).is_err());
        assert!(Polynomial::parse("x1 ^ x1", &["x1"]).is_err());
    }
}
