use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{Monomial, Point, Rational, Scalar, SymError, Var};

/// Sparse multivariate polynomial over the rationals.
///
/// Terms are kept in a map ordered by [`Monomial`]'s graded lexicographic
/// order; zero coefficients are never stored, so the zero polynomial is the
/// empty map and structural equality is polynomial equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(v: Var) -> Self {
        Poly::term(Monomial::var(v), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(m, c)| m.is_one() && c.is_one())
                .unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value of a constant polynomial.
    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Leading term under the graded lexicographic order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> Rational {
        self.leading_term()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn degree_in(&self, v: &Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(n, k)| (n.mul(m), k * c))
                .collect(),
        }
    }

    /// Scales so that the leading coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.leading_term() {
            None => Poly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self, v: &Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if let Some((e, dm)) = m.derivative(v) {
                out.add_term(dm, c * Rational::from_integer(e.into()));
            }
        }
        out
    }

    /// Exact value at a point; every variable must be bound.
    pub fn eval(&self, p: &Point) -> Result<Rational, SymError> {
        self.eval_generic(&|v: &Var| p.get(v).cloned())
    }

    pub fn eval_generic<S: Scalar>(&self, lookup: &dyn Fn(&Var) -> Option<S>) -> Result<S, SymError> {
        let mut cache: BTreeMap<Var, S> = BTreeMap::new();
        for v in self.vars() {
            let val = lookup(&v).ok_or_else(|| SymError::UnknownVariable(v.to_string()))?;
            cache.insert(v, val);
        }
        let mut acc = S::from_rational(&Rational::zero());
        for (m, c) in &self.terms {
            let mut t = S::from_rational(c);
            for (v, e) in m.factors() {
                let x = &cache[v];
                for _ in 0..*e {
                    t = t.mul(x);
                }
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    /// Replaces each bound variable by a polynomial; unbound variables stay.
    pub fn substitute(&self, bindings: &BTreeMap<Var, Poly>) -> Poly {
        let mut out = Poly::zero();
        let mut powers: BTreeMap<(Var, u32), Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut rest = Vec::new();
            let mut t = Poly::constant(c.clone());
            for (v, e) in m.factors() {
                match bindings.get(v) {
                    Some(b) => {
                        let pw = powers
                            .entry((v.clone(), *e))
                            .or_insert_with(|| b.pow(*e))
                            .clone();
                        t = &t * &pw;
                    }
                    None => rest.push((v.clone(), *e)),
                }
            }
            let t = t.mul_monomial(&Monomial::from_pairs(rest), &Rational::one());
            out = &out + &t;
        }
        out
    }

    /// Coefficients of `self` viewed as a polynomial in `v`; index = power.
    pub fn coefficients_in(&self, v: &Var) -> Vec<Poly> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![Poly::zero(); deg + 1];
        if self.is_zero() {
            return Vec::new();
        }
        for (m, c) in &self.terms {
            let (rest, e) = m.split_off(v);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    pub fn from_coefficients_in(v: &Var, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            let m = Monomial::power(v.clone(), e as u32);
            for (n, k) in &c.terms {
                out.add_term(n.mul(&m), k.clone());
            }
        }
        out
    }

    /// `self / d` when `d` divides `self` exactly, otherwise `None`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading_term()?;
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let dc_inv = dc.recip();
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((rm, rc)) = rem.leading_term() {
            let qm = rm.divide(dm)?;
            let qc = rc * &dc_inv;
            rem = &rem - &d.mul_monomial(&qm, &qc);
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Gcd of the numerators divided by lcm of the denominators, signed so
    /// that the leading coefficient of the primitive part is positive.
    pub fn rational_content(&self) -> Rational {
        use num_integer::Integer;
        let mut num = num_bigint::BigInt::zero();
        let mut den = num_bigint::BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Rational::one();
        }
        let r = Rational::new(num, den);
        if self.leading_coefficient().is_negative() {
            -r
        } else {
            r
        }
    }

    fn combine(&self, other: &Poly, sign: bool) -> Poly {
        let (mut out, src) = if self.terms.len() >= other.terms.len() || !sign {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &src.terms {
            if sign {
                out.add_term(m.clone(), c.clone());
            } else {
                out.add_term(m.clone(), -c.clone());
            }
        }
        out
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.combine(rhs, true)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.combine(rhs, false)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                $tr::$f(&self, &rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

pub(crate) fn fmt_coefficient_term(
    f: &mut fmt::Formatter<'_>,
    m: &Monomial,
    c: &Rational,
    first: bool,
) -> fmt::Result {
    let neg = c.is_negative();
    let abs = c.abs();
    if first {
        if neg {
            f.write_str("-")?;
        }
    } else if neg {
        f.write_str(" - ")?;
    } else {
        f.write_str(" + ")?;
    }
    if m.is_one() {
        write!(f, "{abs}")
    } else if abs.is_one() {
        write!(f, "{m}")
    } else {
        write!(f, "{abs}*{m}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            fmt_coefficient_term(f, m, c, i == 0)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::super::{int, rat};
    use super::*;

    fn x() -> Poly {
        Poly::var(Var::new("x"))
    }
    fn y() -> Poly {
        Poly::var(Var::new("y"))
    }

    #[test]
    fn cancellation_and_display() {
        let p = &(&x() + &x()) - &x().scale(&int(2));
        assert!(p.is_zero());
        let q = &(&x() * &x()) - &y().scale(&rat(3, 2));
        assert_eq!(q.to_string(), "x^2 - 3/2*y");
        let r = &(-&x()) + &Poly::constant(int(1));
        assert_eq!(r.to_string(), "-x + 1");
    }

    #[test]
    fn exact_division() {
        let a = &(&x() * &x()) - &(&y() * &y());
        let b = &x() - &y();
        assert_eq!(a.div_exact(&b), Some(&x() + &y()));
        assert_eq!(b.div_exact(&a), None);
        assert_eq!((&x() + &Poly::one()).div_exact(&x()), None);
    }

    #[test]
    fn derivative_and_eval() {
        let p = &(&x() * &x()) * &y();
        assert_eq!(p.derivative(&Var::new("x")), (&x() * &y()).scale(&int(2)));
        let mut pt = Point::new();
        pt.insert(Var::new("x"), int(2));
        pt.insert(Var::new("y"), int(1));
        assert_eq!((&(&x() * &x()) + &y()).eval(&pt).unwrap(), int(5));
        pt.remove(&Var::new("y"));
        assert!(matches!(y().eval(&pt), Err(SymError::UnknownVariable(_))));
    }

    #[test]
    fn coefficient_round_trip() {
        let p = &(&(&x() * &x()) * &y()) + &(&y() + &Poly::constant(int(3)));
        let cs = p.coefficients_in(&Var::new("x"));
        assert_eq!(cs.len(), 3);
        assert_eq!(Poly::from_coefficients_in(&Var::new("x"), &cs), p);
    }
}
