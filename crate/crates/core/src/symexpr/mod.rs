//! Exact symbolic arithmetic over the rationals.
//!
//! [`Poly`] is a sparse multivariate polynomial with [`Rational`]
//! coefficients, [`Expr`] a quotient of two polynomials kept in canonical
//! form: the fraction is reduced by a full multivariate gcd and the
//! denominator is monic with respect to the graded lexicographic order.
//! Two `Expr` values are therefore equal exactly when they denote the same
//! rational function, and the zero test is a check on the numerator.

mod expr;
mod gcd;
mod jet;
mod monomial;
mod parse;
mod poly;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub use expr::{normalize, Expr};
pub use gcd::poly_gcd;
pub use jet::{Jet, JetSpace};
pub use monomial::Monomial;
pub use parse::{parse_expr, parse_rational_tokens, ExprParser, Lexer, ParseError, Spanned, TokenKind};
pub use poly::Poly;

use num_traits::Zero;

/// Arbitrary precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// An assignment of rational values to variables.
pub type Point = BTreeMap<Var, Rational>;

/// A variable name. Cheap to clone; ordered alphabetically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

impl From<String> for Var {
    fn from(s: String) -> Self {
        Var(Arc::from(s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymError {
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("expression has a pole at the evaluation point")]
    PoleAtPoint,
    #[error("division by zero")]
    DivisionByZero,
}

/// Values an expression can be evaluated into: plain rationals for point
/// evaluation, [`Jet`]s for derivative-carrying evaluation.
pub trait Scalar: Clone {
    fn from_rational(r: &Rational) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// `None` when `other` is not invertible.
    fn div(&self, other: &Self) -> Option<Self>;
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            None
        } else {
            Some(self / other)
        }
    }
}

/// Parses `"p"` or `"p/q"` into a rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: num_bigint::BigInt = num.parse().ok()?;
    let den: num_bigint::BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Rational from a pair of machine integers.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Rational from a machine integer.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}
