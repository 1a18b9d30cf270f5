use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::gcd::poly_gcd;
use super::poly::fmt_coefficient_term;
use super::{Point, Poly, Rational, Scalar, SymError, Var};

/// A rational function `num / den` in canonical form.
///
/// Invariants, established by every constructor:
/// * `den` is nonzero and monic (leading coefficient 1);
/// * `gcd(num, den) = 1`;
/// * `num = 0` implies `den = 1`.
///
/// Hence structural equality is equality of rational functions.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Expr {
    num: Poly,
    den: Poly,
}

/// Canonical form of `e`. Every `Expr` is already canonical, so this is the
/// identity; kept as an explicit operation for callers that want to state it.
pub fn normalize(e: &Expr) -> Expr {
    e.clone()
}

impl Expr {
    pub fn zero() -> Self {
        Expr::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Expr::from_poly(Poly::one())
    }

    pub fn constant(c: Rational) -> Self {
        Expr::from_poly(Poly::constant(c))
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(super::int(n))
    }

    pub fn var(name: &str) -> Self {
        Expr::from_poly(Poly::var(Var::new(name)))
    }

    pub fn from_var(v: &Var) -> Self {
        Expr::from_poly(Poly::var(v.clone()))
    }

    pub fn from_poly(p: Poly) -> Self {
        Expr {
            num: p,
            den: Poly::one(),
        }
    }

    /// Builds `num / den` and reduces it.
    pub fn from_fraction(num: Poly, den: Poly) -> Result<Self, SymError> {
        if den.is_zero() {
            return Err(SymError::ZeroDenominator);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Expr::zero();
        }
        if let Some(c) = den.constant_value() {
            let inv = c.recip();
            return Expr {
                num: num.scale(&inv),
                den: Poly::one(),
            };
        }
        let g = poly_gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading_coefficient();
        if lc.is_one() {
            Expr { num, den }
        } else {
            let inv = lc.recip();
            Expr {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    pub fn scale(&self, c: &Rational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn checked_div(&self, other: &Expr) -> Result<Expr, SymError> {
        if other.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        if other.den.is_one() && self.den.is_one() {
            return Ok(Self::reduce(self.num.clone(), other.num.clone()));
        }
        Ok(Self::reduce(
            &self.num * &other.den,
            &self.den * &other.num,
        ))
    }

    pub fn recip(&self) -> Result<Expr, SymError> {
        Expr::one().checked_div(self)
    }

    /// Integer power; negative exponents require a nonzero base.
    pub fn pow(&self, e: i32) -> Result<Expr, SymError> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let k = e.unsigned_abs();
        // powers of a reduced fraction stay reduced; only monicity needs care
        Ok(Expr {
            num: base.num.pow(k),
            den: base.den.pow(k),
        })
    }

    /// Exact partial derivative; quotient rule for proper fractions.
    pub fn derivative(&self, v: &Var) -> Expr {
        if self.den.is_one() {
            return Expr::from_poly(self.num.derivative(v));
        }
        let dn = self.num.derivative(v);
        let dd = self.den.derivative(v);
        if dn.is_zero() && dd.is_zero() {
            return Expr::zero();
        }
        let top = &(&dn * &self.den) - &(&self.num * &dd);
        Self::reduce(top, self.den.pow(2))
    }

    /// Composition with the given bindings. Every free variable must be bound.
    pub fn substitute(&self, bindings: &BTreeMap<Var, Expr>) -> Result<Expr, SymError> {
        if let Some(v) = self.vars().into_iter().find(|v| !bindings.contains_key(v)) {
            return Err(SymError::UnknownVariable(v.to_string()));
        }
        self.substitute_partial(bindings)
    }

    /// Composition where unbound variables are left untouched.
    pub fn substitute_partial(&self, bindings: &BTreeMap<Var, Expr>) -> Result<Expr, SymError> {
        let lookup = |v: &Var| -> Option<Expr> {
            Some(bindings.get(v).cloned().unwrap_or_else(|| Expr::from_var(v)))
        };
        let all_poly = bindings.values().all(Expr::is_polynomial);
        if all_poly {
            let pb: BTreeMap<Var, Poly> = bindings
                .iter()
                .map(|(k, e)| (k.clone(), e.num.clone()))
                .collect();
            let n = self.num.substitute(&pb);
            let d = self.den.substitute(&pb);
            return Self::from_fraction(n, d);
        }
        let n: Expr = self.num.eval_generic(&lookup)?;
        let d: Expr = self.den.eval_generic(&lookup)?;
        if d.is_zero() {
            return Err(SymError::ZeroDenominator);
        }
        n.checked_div(&d)
    }

    /// Exact value at a point.
    pub fn eval_at(&self, p: &Point) -> Result<Rational, SymError> {
        let d = self.den.eval(p)?;
        if d.is_zero() {
            return Err(SymError::PoleAtPoint);
        }
        Ok(self.num.eval(p)? / d)
    }

    /// Evaluates in any [`Scalar`] domain; a non-invertible denominator value
    /// is reported as a pole.
    pub fn eval_generic<S: Scalar>(&self, lookup: &dyn Fn(&Var) -> Option<S>) -> Result<S, SymError> {
        let n = self.num.eval_generic(lookup)?;
        if self.den.is_one() {
            return Ok(n);
        }
        let d = self.den.eval_generic(lookup)?;
        n.div(&d).ok_or(SymError::PoleAtPoint)
    }
}

impl Scalar for Expr {
    fn from_rational(r: &Rational) -> Self {
        Expr::constant(r.clone())
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Option<Self> {
        self.checked_div(other).ok()
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Expr::from_poly(&self.num + &rhs.num);
        }
        if self.den == rhs.den {
            return Expr::reduce(&self.num + &rhs.num, self.den.clone());
        }
        Expr::reduce(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self + &(-rhs)
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Expr::from_poly(&self.num * &rhs.num);
        }
        Expr::reduce(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Expr {
            type Output = Expr;
            fn $f(self, rhs: Expr) -> Expr {
                $tr::$f(&self, &rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $f(self, rhs: &Expr) -> Expr {
                $tr::$f(&self, rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| &a + &b)
    }
}

impl From<Rational> for Expr {
    fn from(r: Rational) -> Self {
        Expr::constant(r)
    }
}

impl From<Poly> for Expr {
    fn from(p: Poly) -> Self {
        Expr::from_poly(p)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.num_terms() == 1 {
            let (m, c) = self.num.leading_term().expect("nonzero numerator");
            fmt_coefficient_term(f, m, c, true)?;
        } else {
            write!(f, "({})", self.num)?;
        }
        let single_power = self.den.num_terms() == 1 && {
            let (m, _) = self.den.leading_term().expect("nonzero denominator");
            m.factors().len() == 1
        };
        if single_power {
            write!(f, "/{}", self.den)
        } else {
            write!(f, "/({})", self.den)
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}
