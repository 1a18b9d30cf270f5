//! Recursive-descent parser for `.kvs` scenarios.
//!
//! ```text
//! scenario := (decl | check)*
//! decl     := "manifold" NAME "{" "dim" INT "coords" "[" NAME+ "]" "}"
//!           | "bivector" NAME "on" NAME "{" matrix "}"
//!           | "scalar" NAME "on" NAME "=" EXPR
//!           | "map" NAME ":" NAME "->" NAME "{" "matrix" rows "offset" row "}"
//!           | "submanifold" NAME "in" NAME "{" "origin" row "basis" rows "}"
//!           | "algebra" NAME "{" "dim" INT "product" "{" (triple ":" RAT)* "}"
//!                                ["cocycle" "{" (pair ":" RAT)* "}"] "}"
//! check    := "check" KIND NAME+ ["with" "{" option* "}"]
//! matrix   := "[" EXPR ("," EXPR)* (";" EXPR ("," EXPR)*)* "]"
//! rows     := "[" [RAT ("," RAT)* (";" RAT ("," RAT)*)*] "]"
//! ```
//!
//! A symmetric matrix may be given by its upper triangle: rows of lengths
//! `n, n-1, …, 1`.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;

use super::ast::{CheckDirective, CheckOptions, Declaration, Expectation, LieForm, Scenario};
use crate::algebra::SubspaceKind;
use crate::symexpr::{parse_rational_tokens, Expr, ExprParser, Lexer, ParseError, Rational, Spanned, TokenKind};

pub const KEYWORDS: &[&str] = &[
    "manifold",
    "bivector",
    "scalar",
    "map",
    "submanifold",
    "algebra",
    "check",
    "with",
];

pub fn parse_syntax(src: &str) -> Result<Scenario, ParseError> {
    let toks = Lexer::new(src).tokenize()?;
    let mut p = Parser { toks: &toks, pos: 0 };
    p.scenario()
}

struct Parser<'t> {
    toks: &'t [Spanned],
    pos: usize,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> &'t Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> &'t Spanned {
        let t = &self.toks[self.pos];
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at_ident(&self, word: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(s) if s == word)
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<&'t Spanned, ParseError> {
        let t = self.bump();
        if t.kind == kind {
            Ok(t)
        } else {
            Err(ParseError::at(t, format!("expected {what}")))
        }
    }

    fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        let t = self.bump();
        match &t.kind {
            TokenKind::Ident(s) if s == word => Ok(()),
            _ => Err(ParseError::at(t, format!("expected `{word}`"))),
        }
    }

    fn name(&mut self) -> Result<String, ParseError> {
        let t = self.bump();
        match &t.kind {
            TokenKind::Ident(s) if KEYWORDS.contains(&s.as_str()) => {
                Err(ParseError::at(t, format!("`{s}` is a keyword and cannot be a name")))
            }
            TokenKind::Ident(s) => Ok(s.clone()),
            _ => Err(ParseError::at(t, "expected a name")),
        }
    }

    fn int(&mut self) -> Result<usize, ParseError> {
        let t = self.bump();
        match &t.kind {
            TokenKind::Int(n) => n
                .to_usize()
                .filter(|v| *v <= 64)
                .ok_or_else(|| ParseError::at(t, "integer out of range")),
            _ => Err(ParseError::at(t, "expected an integer")),
        }
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let (r, next) = parse_rational_tokens(self.toks, self.pos)?;
        self.pos = next;
        Ok(r)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut ep = ExprParser::new(self.toks, self.pos).with_reserved(KEYWORDS);
        let e = ep.parse()?;
        self.pos = ep.position();
        Ok(e)
    }

    fn scenario(&mut self) -> Result<Scenario, ParseError> {
        let mut sc = Scenario::default();
        loop {
            let t = self.peek();
            let word = match &t.kind {
                TokenKind::Eof => return Ok(sc),
                TokenKind::Ident(s) => s.as_str(),
                _ => return Err(ParseError::at(t, "expected a declaration or `check`")),
            };
            let pos = (t.line, t.column);
            match word {
                "check" => {
                    sc.checks.push(self.check()?);
                    sc.check_pos.push(pos);
                }
                "manifold" | "bivector" | "scalar" | "map" | "submanifold" | "algebra" => {
                    sc.declarations.push(self.declaration()?);
                    sc.decl_pos.push(pos);
                }
                _ => return Err(ParseError::at(t, "expected a declaration or `check`")),
            }
        }
    }

    fn declaration(&mut self) -> Result<Declaration, ParseError> {
        let kw = match &self.bump().kind {
            TokenKind::Ident(s) => s.clone(),
            _ => unreachable!("dispatched on an identifier"),
        };
        let name = self.name()?;
        match kw.as_str() {
            "manifold" => {
                self.expect(TokenKind::LBrace, "`{`")?;
                self.keyword("dim")?;
                let dim = self.int()?;
                self.keyword("coords")?;
                self.expect(TokenKind::LBracket, "`[`")?;
                let mut coords = Vec::new();
                while self.peek().kind != TokenKind::RBracket {
                    if !coords.is_empty() && self.peek().kind == TokenKind::Comma {
                        self.bump();
                    }
                    coords.push(self.name()?);
                }
                if coords.is_empty() {
                    return Err(ParseError::at(self.peek(), "expected at least one coordinate"));
                }
                self.bump();
                self.expect(TokenKind::RBrace, "`}`")?;
                Ok(Declaration::Manifold { name, dim, coords })
            }
            "bivector" => {
                self.keyword("on")?;
                let chart = self.name()?;
                self.expect(TokenKind::LBrace, "`{`")?;
                let rows = self.expr_matrix()?;
                self.expect(TokenKind::RBrace, "`}`")?;
                Ok(Declaration::Bivector { name, chart, rows })
            }
            "scalar" => {
                self.keyword("on")?;
                let chart = self.name()?;
                self.expect(TokenKind::Eq, "`=`")?;
                let value = self.expr()?;
                Ok(Declaration::Scalar { name, chart, value })
            }
            "map" => {
                self.expect(TokenKind::Colon, "`:`")?;
                let source = self.name()?;
                self.expect(TokenKind::Arrow, "`->`")?;
                let target = self.name()?;
                self.expect(TokenKind::LBrace, "`{`")?;
                self.keyword("matrix")?;
                let matrix = self.rational_rows()?;
                self.keyword("offset")?;
                let offset = self.rational_row()?;
                self.expect(TokenKind::RBrace, "`}`")?;
                Ok(Declaration::Map {
                    name,
                    source,
                    target,
                    matrix,
                    offset,
                })
            }
            "submanifold" => {
                self.keyword("in")?;
                let ambient = self.name()?;
                self.expect(TokenKind::LBrace, "`{`")?;
                self.keyword("origin")?;
                let origin = self.rational_row()?;
                self.keyword("basis")?;
                let basis = self.rational_rows()?;
                self.expect(TokenKind::RBrace, "`}`")?;
                Ok(Declaration::Submanifold {
                    name,
                    ambient,
                    origin,
                    basis,
                })
            }
            "algebra" => self.algebra(name),
            _ => unreachable!("dispatched on a declaration keyword"),
        }
    }

    fn algebra(&mut self, name: String) -> Result<Declaration, ParseError> {
        self.expect(TokenKind::LBrace, "`{`")?;
        self.keyword("dim")?;
        let dim = self.int()?;
        self.keyword("product")?;
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut products = Vec::new();
        while self.peek().kind != TokenKind::RBrace {
            let idx = self.index_tuple(3)?;
            self.expect(TokenKind::Colon, "`:`")?;
            products.push(((idx[0], idx[1], idx[2]), self.rational()?));
        }
        self.bump();
        let mut cocycle = Vec::new();
        if self.at_ident("cocycle") {
            self.bump();
            self.expect(TokenKind::LBrace, "`{`")?;
            while self.peek().kind != TokenKind::RBrace {
                let idx = self.index_tuple(2)?;
                self.expect(TokenKind::Colon, "`:`")?;
                cocycle.push(((idx[0], idx[1]), self.rational()?));
            }
            self.bump();
        }
        self.expect(TokenKind::RBrace, "`}`")?;
        Ok(Declaration::Algebra {
            name,
            dim,
            products,
            cocycle,
        })
    }

    fn index_tuple(&mut self, len: usize) -> Result<Vec<usize>, ParseError> {
        self.expect(TokenKind::LParen, "`(`")?;
        let mut out = Vec::with_capacity(len);
        for i in 0..len {
            if i > 0 {
                self.expect(TokenKind::Comma, "`,`")?;
            }
            let t = self.peek();
            let v = self.int()?;
            if v == 0 {
                return Err(ParseError::at(t, "indices are 1-based"));
            }
            out.push(v);
        }
        self.expect(TokenKind::RParen, "`)`")?;
        Ok(out)
    }

    /// `[a, b; c, d]`, expanding an upper triangle.
    fn expr_matrix(&mut self) -> Result<Vec<Vec<Expr>>, ParseError> {
        let open = self.expect(TokenKind::LBracket, "`[`")?;
        let mut rows: Vec<Vec<Expr>> = vec![Vec::new()];
        let mut row_starts = vec![self.peek()];
        loop {
            rows.last_mut().expect("nonempty").push(self.expr()?);
            let t = self.bump();
            match t.kind {
                TokenKind::Comma => {}
                TokenKind::Semi => {
                    rows.push(Vec::new());
                    row_starts.push(self.peek());
                }
                TokenKind::RBracket => break,
                _ => return Err(ParseError::at(t, "expected `,`, `;` or `]`")),
            }
        }
        expand_square(rows, &row_starts, open)
    }

    fn rational_row(&mut self) -> Result<Vec<Rational>, ParseError> {
        self.expect(TokenKind::LBracket, "`[`")?;
        let mut out = Vec::new();
        if self.peek().kind == TokenKind::RBracket {
            self.bump();
            return Ok(out);
        }
        loop {
            out.push(self.rational()?);
            let t = self.bump();
            match t.kind {
                TokenKind::Comma => {}
                TokenKind::RBracket => return Ok(out),
                _ => return Err(ParseError::at(t, "expected `,` or `]`")),
            }
        }
    }

    fn rational_rows(&mut self) -> Result<Vec<Vec<Rational>>, ParseError> {
        self.expect(TokenKind::LBracket, "`[`")?;
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        if self.peek().kind == TokenKind::RBracket {
            self.bump();
            return Ok(rows);
        }
        rows.push(Vec::new());
        let mut row_start = self.peek();
        loop {
            rows.last_mut().expect("nonempty").push(self.rational()?);
            let t = self.bump();
            match t.kind {
                TokenKind::Comma => {}
                TokenKind::Semi | TokenKind::RBracket => {
                    if rows.len() > 1 && rows[rows.len() - 1].len() != rows[0].len() {
                        return Err(ParseError::at(row_start, "rows have different lengths"));
                    }
                    if t.kind == TokenKind::RBracket {
                        return Ok(rows);
                    }
                    rows.push(Vec::new());
                    row_start = self.peek();
                }
                _ => return Err(ParseError::at(t, "expected `,`, `;` or `]`")),
            }
        }
    }

    fn check(&mut self) -> Result<CheckDirective, ParseError> {
        self.bump();
        let kind_tok = self.peek();
        let kind = match &kind_tok.kind {
            TokenKind::Ident(s) if !matches!(s.as_str(), "check" | "with") => s.clone(),
            _ => return Err(ParseError::at(kind_tok, "expected a check kind")),
        };
        self.bump();
        let mut args = Vec::new();
        while let TokenKind::Ident(s) = &self.peek().kind {
            if KEYWORDS.contains(&s.as_str()) {
                break;
            }
            args.push(s.clone());
            self.bump();
        }
        if args.is_empty() {
            return Err(ParseError::at(self.peek(), "expected at least one argument"));
        }
        let mut options = CheckOptions::default();
        if self.at_ident("with") {
            self.bump();
            self.expect(TokenKind::LBrace, "`{`")?;
            while self.peek().kind != TokenKind::RBrace {
                self.option(&mut options)?;
            }
            self.bump();
        }
        Ok(CheckDirective { kind, args, options })
    }

    fn option(&mut self, o: &mut CheckOptions) -> Result<(), ParseError> {
        let t = self.bump();
        let key = match &t.kind {
            TokenKind::Ident(s) => s.as_str(),
            _ => return Err(ParseError::at(t, "expected an option name")),
        };
        let dup = |set: bool| {
            if set {
                Err(ParseError::at(t, format!("option `{key}` given twice")))
            } else {
                Ok(())
            }
        };
        match key {
            "label" => {
                dup(o.label.is_some())?;
                let v = self.bump();
                match &v.kind {
                    TokenKind::Str(s) => o.label = Some(s.clone()),
                    _ => return Err(ParseError::at(v, "expected a string")),
                }
            }
            "samples" => {
                dup(o.samples.is_some())?;
                let v = self.peek();
                let n = self.int()?;
                if n == 0 {
                    return Err(ParseError::at(v, "samples must be at least 1"));
                }
                o.samples = Some(n);
            }
            "points" => {
                dup(o.points.is_some())?;
                o.points = Some(self.rational_rows()?);
            }
            "expect" => {
                dup(o.expect.is_some())?;
                let v = self.bump();
                o.expect = Some(match &v.kind {
                    TokenKind::Ident(s) if s == "pass" => Expectation::Pass,
                    TokenKind::Ident(s) if s == "fail" => Expectation::Fail,
                    TokenKind::Ident(s) if s == "pointwise" => {
                        self.expect(TokenKind::Minus, "`-pass`")?;
                        self.keyword("pass")?;
                        Expectation::PointwisePass
                    }
                    _ => return Err(ParseError::at(v, "expected `pass`, `fail` or `pointwise-pass`")),
                });
            }
            "form" => {
                dup(o.form.is_some())?;
                let v = self.bump();
                o.form = Some(match &v.kind {
                    TokenKind::Ident(s) if s == "stated" => LieForm::Stated,
                    TokenKind::Ident(s) if s == "corrected" => LieForm::Corrected,
                    _ => return Err(ParseError::at(v, "expected `stated` or `corrected`")),
                });
            }
            "ideal" | "subalgebra" => {
                dup(o.subspace.is_some())?;
                let kind = if key == "ideal" {
                    SubspaceKind::Ideal
                } else {
                    SubspaceKind::Subalgebra
                };
                o.subspace = Some((kind, self.rational_rows()?));
            }
            "value" => {
                dup(o.value.is_some())?;
                o.value = Some(self.expr_matrix()?);
            }
            "at" => {
                dup(o.at.is_some())?;
                o.at = Some(self.rational_row()?);
            }
            "rank" => {
                dup(o.rank.is_some())?;
                o.rank = Some(self.int()?);
            }
            _ => return Err(ParseError::at(t, format!("unknown option `{key}`"))),
        }
        Ok(())
    }
}

fn expand_square(
    rows: Vec<Vec<Expr>>,
    starts: &[&Spanned],
    open: &Spanned,
) -> Result<Vec<Vec<Expr>>, ParseError> {
    let n = rows[0].len();
    if rows.iter().all(|r| r.len() == n) {
        if rows.len() != n {
            return Err(ParseError::at(open, format!("expected a square matrix, got {} rows of {n}", rows.len())));
        }
        return Ok(rows);
    }
    // upper triangle: row i has n - i entries
    for (i, r) in rows.iter().enumerate() {
        if r.len() + i != n {
            return Err(ParseError::at(starts[i], "rows have inconsistent lengths"));
        }
    }
    if rows.len() != n {
        return Err(ParseError::at(open, "upper triangle is missing rows"));
    }
    let mut upper: BTreeMap<(usize, usize), Expr> = BTreeMap::new();
    for (i, r) in rows.into_iter().enumerate() {
        for (off, e) in r.into_iter().enumerate() {
            upper.insert((i, i + off), e);
        }
    }
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| upper[&(i.min(j), i.max(j))].clone())
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_scenario() {
        let sc = parse_syntax("manifold M { dim 2 coords [x y] } bivector h on M { [x, 0; 0, y] } check codazzi h").unwrap();
        assert_eq!(sc.declarations.len(), 2);
        assert_eq!(sc.checks.len(), 1);
        assert_eq!(sc.checks[0].display_name(), "codazzi(h)");
        assert!(parse_syntax("").unwrap().declarations.is_empty());
    }

    #[test]
    fn upper_triangle() {
        let sc = parse_syntax("bivector h on M { [x, 1; y] }").unwrap();
        let Declaration::Bivector { rows, .. } = &sc.declarations[0] else {
            panic!()
        };
        assert_eq!(rows[1][0], Expr::one());
        assert_eq!(rows[1][1], Expr::var("y"));
    }

    #[test]
    fn dangling_operator_is_located() {
        let e = parse_syntax("manifold M { dim 1 coords [x] }\nbivector h on M { [x +] }").unwrap_err();
        assert_eq!((e.line, e.column), (2, 22));
        assert_eq!(e.token, "+");
        let e = parse_syntax("scalar f on M = x *\ncheck in_E h f").unwrap_err();
        assert_eq!((e.line, e.column), (1, 19));
    }

    #[test]
    fn options_and_errors() {
        let sc = parse_syntax(
            "check transversal N h with { samples 5 expect pointwise-pass points [1/2, -1; 0, 0] label \"z axis\" }",
        )
        .unwrap();
        let o = &sc.checks[0].options;
        assert_eq!(o.samples, Some(5));
        assert_eq!(o.expect, Some(Expectation::PointwisePass));
        assert_eq!(o.points.as_ref().unwrap().len(), 2);
        assert_eq!(sc.checks[0].display_name(), "z axis");
        for bad in [
            "check codazzi",
            "check codazzi h with { samples 0 }",
            "check codazzi h with { colour red }",
            "map F : M -> { matrix [1] offset [0] }",
            "submanifold N in M { origin [0, 0] basis [1, 0; 1] }",
            "algebra A { dim 2 product { (0,1,1): 1 } }",
            "bivector h on M { [x, y; z] extra }",
            "manifold check { dim 1 coords [x] }",
            "bivector h on M { [x, y, z; 1, 2] }",
        ] {
            let e = parse_syntax(bad).unwrap_err();
            assert!(e.line >= 1 && e.column >= 1, "{bad}");
        }
    }
}
