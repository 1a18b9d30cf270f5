use std::cmp::Ordering;
use std::fmt;

use super::Var;

/// A power product `x1^e1 * x2^e2 * ...` stored as `(variable, exponent)`
/// pairs sorted by variable name, with every exponent positive.
///
/// Ordered graded lexicographically: total degree first, ties broken by the
/// exponent vector read in alphabetical variable order.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    factors: Vec<(Var, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { factors: Vec::new() }
    }

    pub fn var(v: Var) -> Self {
        Monomial {
            factors: vec![(v, 1)],
        }
    }

    pub fn power(v: Var, exp: u32) -> Self {
        if exp == 0 {
            Self::one()
        } else {
            Monomial {
                factors: vec![(v, exp)],
            }
        }
    }

    /// Builds a monomial from arbitrary pairs; repeated variables are merged
    /// and zero exponents dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut factors: Vec<(Var, u32)> = Vec::new();
        for (v, e) in pairs {
            if e == 0 {
                continue;
            }
            match factors.binary_search_by(|(w, _)| w.cmp(&v)) {
                Ok(i) => factors[i].1 += e,
                Err(i) => factors.insert(i, (v, e)),
            }
        }
        Monomial { factors }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.factors
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, v: &Var) -> u32 {
        self.factors
            .binary_search_by(|(w, _)| w.cmp(v))
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() && j < other.factors.len() {
            let (a, ea) = &self.factors[i];
            let (b, eb) = &other.factors[j];
            match a.cmp(b) {
                Ordering::Less => {
                    out.push((a.clone(), *ea));
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b.clone(), *eb));
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a.clone(), ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.factors[i..]);
        out.extend_from_slice(&other.factors[j..]);
        Monomial { factors: out }
    }

    /// `self / other` when `other` divides `self`.
    pub fn divide(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.factors.len());
        let mut j = 0;
        for (v, e) in &self.factors {
            if j < other.factors.len() && other.factors[j].0 < *v {
                // other has a variable self lacks
                return None;
            }
            if j < other.factors.len() && other.factors[j].0 == *v {
                let d = other.factors[j].1;
                j += 1;
                if d > *e {
                    return None;
                }
                if d < *e {
                    out.push((v.clone(), e - d));
                }
            } else {
                out.push((v.clone(), *e));
            }
        }
        if j < other.factors.len() {
            return None;
        }
        Some(Monomial { factors: out })
    }

    /// Removes `v` from the monomial, returning the reduced monomial and the
    /// exponent `v` had.
    pub fn split_off(&self, v: &Var) -> (Monomial, u32) {
        match self.factors.binary_search_by(|(w, _)| w.cmp(v)) {
            Ok(i) => {
                let mut factors = self.factors.clone();
                let (_, e) = factors.remove(i);
                (Monomial { factors }, e)
            }
            Err(_) => (self.clone(), 0),
        }
    }

    /// Derivative with respect to `v`: the multiplier and the new monomial.
    pub fn derivative(&self, v: &Var) -> Option<(u32, Monomial)> {
        let i = self.factors.binary_search_by(|(w, _)| w.cmp(v)).ok()?;
        let mut factors = self.factors.clone();
        let e = factors[i].1;
        if e == 1 {
            factors.remove(i);
        } else {
            factors[i].1 = e - 1;
        }
        Some((e, Monomial { factors }))
    }

    /// Monomial gcd (componentwise minimum of exponents).
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        for (v, e) in &self.factors {
            let f = other.exponent(v);
            if f > 0 {
                out.push((v.clone(), (*e).min(f)));
            }
        }
        Monomial { factors: out }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Lexicographic on exponent vectors, earliest variable most significant.
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.factors.get(i), other.factors.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((a, ea)), Some((b, eb))) => match a.cmp(b) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (idx, (v, e)) in self.factors.iter().enumerate() {
            if idx > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(pairs: &[(&str, u32)]) -> Monomial {
        Monomial::from_pairs(pairs.iter().map(|(v, e)| (Var::new(v), *e)))
    }

    #[test]
    fn graded_lex_order() {
        // degree dominates
        assert!(m(&[("y", 2)]) > m(&[("x", 1)]));
        // x > y at equal degree
        assert!(m(&[("x", 1)]) > m(&[("y", 1)]));
        assert!(m(&[("x", 1), ("z", 1)]) > m(&[("y", 2)]));
        assert!(m(&[("x", 2)]) > m(&[("x", 1), ("y", 1)]));
        assert_eq!(m(&[("x", 1), ("y", 1)]), m(&[("y", 1), ("x", 1)]));
        assert!(Monomial::one() < m(&[("z", 1)]));
    }

    #[test]
    fn divide_and_multiply() {
        let a = m(&[("x", 2), ("y", 1)]);
        let b = m(&[("x", 1)]);
        assert_eq!(a.divide(&b), Some(m(&[("x", 1), ("y", 1)])));
        assert_eq!(b.divide(&a), None);
        assert_eq!(a.divide(&m(&[("z", 1)])), None);
        assert_eq!(b.mul(&m(&[("x", 1), ("y", 1)])), a);
    }
}
