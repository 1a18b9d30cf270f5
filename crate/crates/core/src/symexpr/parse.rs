//! Tokenizer and expression parser shared with the scenario language.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Expr, Rational, SymError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(BigInt),
    Str(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eq,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Ident(s) => return f.write_str(s),
            TokenKind::Int(n) => return write!(f, "{n}"),
            TokenKind::Str(s) => return write!(f, "\"{s}\""),
            TokenKind::LBrace => "{",
            TokenKind::RBrace => "}",
            TokenKind::LBracket => "[",
            TokenKind::RBracket => "]",
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::Comma => ",",
            TokenKind::Semi => ";",
            TokenKind::Colon => ":",
            TokenKind::Arrow => "->",
            TokenKind::Plus => "+",
            TokenKind::Minus => "-",
            TokenKind::Star => "*",
            TokenKind::Slash => "/",
            TokenKind::Caret => "^",
            TokenKind::Eq => "=",
            TokenKind::Eof => "end of input",
        };
        f.write_str(s)
    }
}

/// A token with its 1-based source position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spanned {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
}

/// A positioned syntax error.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message} (at `{token}`)")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub token: String,
}

impl ParseError {
    pub fn at(tok: &Spanned, message: impl Into<String>) -> Self {
        ParseError {
            line: tok.line,
            column: tok.column,
            message: message.into(),
            token: tok.kind.to_string(),
        }
    }
}

pub struct Lexer<'a> {
    src: &'a str,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Self {
        Lexer { src }
    }

    /// Full token stream, always terminated by `Eof`.
    pub fn tokenize(&self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        let mut chars = self.src.char_indices().peekable();
        let (mut line, mut col) = (1usize, 1usize);
        let bytes = self.src;
        while let Some(&(i, ch)) = chars.peek() {
            let (tl, tc) = (line, col);
            let advance = |c: char, line: &mut usize, col: &mut usize| {
                if c == '\n' {
                    *line += 1;
                    *col = 1;
                } else {
                    *col += 1;
                }
            };
            if ch.is_whitespace() {
                chars.next();
                advance(ch, &mut line, &mut col);
                continue;
            }
            if ch == '#' {
                while let Some(&(_, c)) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    advance(c, &mut line, &mut col);
                }
                continue;
            }
            let push = |out: &mut Vec<Spanned>, kind| {
                out.push(Spanned {
                    kind,
                    line: tl,
                    column: tc,
                })
            };
            if ch.is_ascii_alphabetic() || ch == '_' {
                let start = i;
                let mut end = i;
                while let Some(&(j, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        end = j + c.len_utf8();
                        chars.next();
                        advance(c, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                push(&mut out, TokenKind::Ident(bytes[start..end].to_string()));
                continue;
            }
            if ch.is_ascii_digit() {
                let start = i;
                let mut end = i;
                while let Some(&(j, c)) = chars.peek() {
                    if c.is_ascii_digit() {
                        end = j + 1;
                        chars.next();
                        advance(c, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                let n: BigInt = bytes[start..end].parse().expect("digits");
                push(&mut out, TokenKind::Int(n));
                continue;
            }
            if ch == '"' {
                chars.next();
                advance(ch, &mut line, &mut col);
                let mut s = String::new();
                let mut closed = false;
                for (_, c) in chars.by_ref() {
                    advance(c, &mut line, &mut col);
                    if c == '"' {
                        closed = true;
                        break;
                    }
                    if c == '\n' {
                        break;
                    }
                    s.push(c);
                }
                if !closed {
                    return Err(ParseError {
                        line: tl,
                        column: tc,
                        message: "unterminated string".into(),
                        token: format!("\"{s}"),
                    });
                }
                push(&mut out, TokenKind::Str(s));
                continue;
            }
            chars.next();
            advance(ch, &mut line, &mut col);
            let kind = match ch {
                '{' => TokenKind::LBrace,
                '}' => TokenKind::RBrace,
                '[' => TokenKind::LBracket,
                ']' => TokenKind::RBracket,
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                ',' => TokenKind::Comma,
                ';' => TokenKind::Semi,
                ':' => TokenKind::Colon,
                '+' => TokenKind::Plus,
                '*' => TokenKind::Star,
                '/' => TokenKind::Slash,
                '^' => TokenKind::Caret,
                '=' => TokenKind::Eq,
                '-' => {
                    if let Some(&(_, '>')) = chars.peek() {
                        chars.next();
                        advance('>', &mut line, &mut col);
                        TokenKind::Arrow
                    } else {
                        TokenKind::Minus
                    }
                }
                other => {
                    return Err(ParseError {
                        line: tl,
                        column: tc,
                        message: format!("unexpected character `{other}`"),
                        token: other.to_string(),
                    })
                }
            };
            push(&mut out, kind);
        }
        out.push(Spanned {
            kind: TokenKind::Eof,
            line,
            column: col,
        });
        Ok(out)
    }
}

/// Precedence-climbing parser over a token slice.
///
/// ```text
/// expr  := term (('+' | '-') term)*
/// term  := unary (('*' | '/') unary)*
/// unary := '-' unary | power
/// power := atom ['^' exponent]
/// atom  := INT | IDENT | '(' expr ')'
/// ```
///
/// `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`.
pub struct ExprParser<'t> {
    toks: &'t [Spanned],
    pos: usize,
    reserved: &'t [&'t str],
}

impl<'t> ExprParser<'t> {
    pub fn new(toks: &'t [Spanned], pos: usize) -> Self {
        ExprParser {
            toks,
            pos,
            reserved: &[],
        }
    }

    /// Identifiers that may not be used as variables (keywords of an
    /// enclosing language).
    pub fn with_reserved(mut self, words: &'t [&'t str]) -> Self {
        self.reserved = words;
        self
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    fn peek(&self) -> &'t Spanned {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn bump(&mut self) -> &'t Spanned {
        let t = self.peek();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    pub fn parse(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek().kind {
                TokenKind::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                TokenKind::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().kind {
                TokenKind::Star => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                TokenKind::Slash => {
                    let op = self.bump();
                    let rhs = self.unary()?;
                    acc = acc
                        .checked_div(&rhs)
                        .map_err(|e| ParseError::at(op, e.to_string()))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().kind == TokenKind::Minus {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek().kind != TokenKind::Caret {
            return Ok(base);
        }
        let caret = self.bump();
        let paren = self.peek().kind == TokenKind::LParen;
        if paren {
            self.bump();
        }
        let neg = if self.peek().kind == TokenKind::Minus {
            self.bump();
            true
        } else {
            false
        };
        let tok = self.bump();
        let n = match &tok.kind {
            TokenKind::Int(n) => n.clone(),
            _ => return Err(ParseError::at(tok, "expected integer exponent")),
        };
        if paren {
            let close = self.bump();
            if close.kind != TokenKind::RParen {
                return Err(ParseError::at(close, "expected `)` after exponent"));
            }
        }
        let e: i32 = i32::try_from(&n)
            .ok()
            .filter(|e| *e <= 4096)
            .ok_or_else(|| ParseError::at(tok, "exponent too large"))?;
        let e = if neg { -e } else { e };
        if self.peek().kind == TokenKind::Caret {
            return Err(ParseError::at(self.peek(), "chained `^` is ambiguous; use parentheses"));
        }
        base.pow(e).map_err(|err| match err {
            SymError::DivisionByZero => ParseError::at(caret, "negative power of zero"),
            other => ParseError::at(caret, other.to_string()),
        })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.pos;
        let tok = self.bump();
        // an operand is missing: blame the operator that wanted it
        let dangling = |msg: &str| {
            match at.checked_sub(1).map(|i| &self.toks[i]) {
                Some(prev)
                    if matches!(
                        prev.kind,
                        TokenKind::Plus | TokenKind::Minus | TokenKind::Star | TokenKind::Slash
                    ) =>
                {
                    ParseError::at(prev, format!("dangling `{}`: {msg}", prev.kind))
                }
                _ => ParseError::at(tok, msg.to_string()),
            }
        };
        match &tok.kind {
            TokenKind::Int(n) => Ok(Expr::constant(Rational::from_integer(n.clone()))),
            TokenKind::Ident(name) if self.reserved.contains(&name.as_str()) => {
                Err(dangling("expected an operand"))
            }
            TokenKind::Ident(name) => Ok(Expr::var(name)),
            TokenKind::LParen => {
                let e = self.parse()?;
                let close = self.bump();
                if close.kind != TokenKind::RParen {
                    return Err(ParseError::at(close, "expected `)`"));
                }
                Ok(e)
            }
            TokenKind::Eof => Err(dangling("unexpected end of expression")),
            _ => Err(dangling("expected a number, variable or `(`")),
        }
    }
}

/// Parses a complete expression string.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let toks = Lexer::new(src).tokenize()?;
    let mut p = ExprParser::new(&toks, 0);
    let e = p.parse()?;
    let rest = p.peek();
    if rest.kind != TokenKind::Eof {
        return Err(ParseError::at(rest, "unexpected token after expression"));
    }
    Ok(e)
}

/// Parses a rational literal token sequence `['-'] INT ['/' INT]` starting at
/// `pos`; returns the value and the next position.
pub fn parse_rational_tokens(toks: &[Spanned], pos: usize) -> Result<(Rational, usize), ParseError> {
    let mut i = pos;
    let neg = toks[i].kind == TokenKind::Minus;
    if neg {
        i += 1;
    }
    let n = match &toks[i].kind {
        TokenKind::Int(n) => n.clone(),
        _ => return Err(ParseError::at(&toks[i], "expected a rational number")),
    };
    i += 1;
    let mut d = BigInt::from(1);
    if toks[i].kind == TokenKind::Slash {
        match &toks[i + 1].kind {
            TokenKind::Int(m) if !m.is_zero() => {
                d = m.clone();
                i += 2;
            }
            TokenKind::Int(_) => return Err(ParseError::at(&toks[i + 1], "zero denominator")),
            _ => return Err(ParseError::at(&toks[i + 1], "expected denominator")),
        }
    }
    let r = Rational::new(n, d);
    Ok((if neg { -r } else { r }, i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        assert_eq!(parse_expr("-x^2").unwrap(), -parse_expr("x*x").unwrap());
        assert_eq!(parse_expr("1 - 2 - 3").unwrap(), Expr::int(-4));
        assert_eq!(parse_expr("3/2*x").unwrap().to_string(), "3/2*x");
        assert_eq!(parse_expr("x^-1").unwrap(), parse_expr("1/x").unwrap());
        assert_eq!(parse_expr("x^(-2)").unwrap(), parse_expr("1/x^2").unwrap());
        assert_eq!(parse_expr("2^3").unwrap(), Expr::int(8));
    }

    #[test]
    fn errors_are_positioned() {
        let e = parse_expr("x +").unwrap_err();
        assert_eq!((e.line, e.column), (1, 3));
        let e = parse_expr("x\n  + * y").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert_eq!(e.token, "+");
        let e = parse_expr("(x").unwrap_err();
        assert_eq!((e.column, e.token.as_str()), (3, "end of input"));
        let e = parse_expr("x / (y - y)").unwrap_err();
        assert_eq!(e.column, 3);
        assert!(parse_expr("x ^ y").is_err());
        assert!(parse_expr("x^2^3").is_err());
        assert!(parse_expr("x $ y").is_err());
        assert!(parse_expr("(x").is_err());
        assert!(parse_expr("x y").is_err());
    }
}
