//! Truncated multivariate Taylor jets over Q.
//!
//! Evaluating an [`Expr`](super::Expr) on jets yields exact values of all
//! partial derivatives up to a fixed order at a point, without going through
//! symbolic differentiation. The numeric oracle relies on this independence.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use super::{Rational, Scalar};

/// Index tables for jets in `nvars` variables truncated at total degree `order`.
#[derive(Debug)]
pub struct JetSpace {
    nvars: usize,
    order: u32,
    indices: Vec<Vec<u32>>,
    lookup: HashMap<Vec<u32>, usize>,
    /// For each output slot, the input slot pairs whose multi-indices sum to it.
    products: Vec<Vec<(usize, usize)>>,
}

type JetCache = Mutex<HashMap<(usize, u32), Arc<JetSpace>>>;

impl JetSpace {
    /// Shared, cached space.
    pub fn get(nvars: usize, order: u32) -> Arc<JetSpace> {
        static CACHE: OnceLock<JetCache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("jet cache poisoned");
        guard
            .entry((nvars, order))
            .or_insert_with(|| Arc::new(JetSpace::build(nvars, order)))
            .clone()
    }

    fn build(nvars: usize, order: u32) -> JetSpace {
        let mut indices = vec![vec![0u32; nvars]];
        for deg in 1..=order {
            let mut cur = Vec::new();
            multi_indices(nvars, deg, &mut vec![0; nvars], 0, &mut cur);
            indices.extend(cur);
        }
        let lookup: HashMap<Vec<u32>, usize> = indices
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        let mut products = vec![Vec::new(); indices.len()];
        for (i, a) in indices.iter().enumerate() {
            for (j, b) in indices.iter().enumerate() {
                let s: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if let Some(&k) = lookup.get(&s) {
                    products[k].push((i, j));
                }
            }
        }
        JetSpace {
            nvars,
            order,
            indices,
            lookup,
            products,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    fn len(&self) -> usize {
        self.indices.len()
    }
}

fn multi_indices(n: usize, left: u32, cur: &mut Vec<u32>, pos: usize, out: &mut Vec<Vec<u32>>) {
    if pos + 1 == n {
        cur[pos] = left;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    if n == 0 {
        return;
    }
    for k in (0..=left).rev() {
        cur[pos] = k;
        multi_indices(n, left - k, cur, pos + 1, out);
    }
    cur[pos] = 0;
}

/// A truncated Taylor expansion; coefficient `c[k]` multiplies
/// `(x - p)^alpha_k / 1`, i.e. it is the derivative divided by `alpha!`.
/// A jet without a space is a plain constant compatible with every space.
#[derive(Clone, Debug)]
pub struct Jet {
    space: Option<Arc<JetSpace>>,
    c: Vec<Rational>,
}

impl Jet {
    pub fn constant(r: Rational) -> Jet {
        Jet {
            space: None,
            c: vec![r],
        }
    }

    /// The coordinate function `x_i` expanded at `value`.
    pub fn variable(space: &Arc<JetSpace>, i: usize, value: Rational) -> Jet {
        let mut c = vec![Rational::zero(); space.len()];
        c[0] = value;
        if space.order >= 1 {
            let mut a = vec![0; space.nvars];
            a[i] = 1;
            c[space.lookup[&a]] = Rational::one();
        }
        Jet {
            space: Some(space.clone()),
            c,
        }
    }

    pub fn value(&self) -> &Rational {
        &self.c[0]
    }

    /// Exact partial derivative; `vars` lists the differentiation variables
    /// with repetition, e.g. `[0, 0, 1]` is d^3/dx0^2 dx1.
    pub fn partial(&self, vars: &[usize]) -> Rational {
        if vars.is_empty() {
            return self.c[0].clone();
        }
        let space = match &self.space {
            Some(s) => s,
            None => return Rational::zero(),
        };
        let mut a = vec![0u32; space.nvars];
        for &v in vars {
            a[v] += 1;
        }
        match space.lookup.get(&a) {
            Some(&k) => {
                let mut fact = Rational::one();
                for &e in &a {
                    for t in 2..=e {
                        fact *= Rational::from_integer(t.into());
                    }
                }
                &self.c[k] * fact
            }
            None => panic!("derivative order exceeds jet order"),
        }
    }

    fn widen(&self, space: &Arc<JetSpace>) -> Vec<Rational> {
        if self.space.is_some() {
            return self.c.clone();
        }
        let mut c = vec![Rational::zero(); space.len()];
        c[0] = self.c[0].clone();
        c
    }

    fn common(&self, other: &Jet) -> Option<Arc<JetSpace>> {
        self.space.clone().or_else(|| other.space.clone())
    }

    pub fn recip(&self) -> Option<Jet> {
        let a0 = self.c[0].clone();
        if a0.is_zero() {
            return None;
        }
        let inv0 = a0.recip();
        let space = match &self.space {
            None => return Some(Jet::constant(inv0)),
            Some(s) => s.clone(),
        };
        // 1/(a0 + t) = (1/a0) * sum_m (-t/a0)^m, t nilpotent of order `order`
        let mut t = self.clone();
        t.c[0] = Rational::zero();
        let step = Scalar::mul(&t, &Jet::constant(-inv0.clone()));
        let mut term = Jet::constant(Rational::one());
        let mut acc = Jet::constant(Rational::one());
        for _ in 0..space.order {
            term = Scalar::mul(&term, &step);
            acc = Scalar::add(&acc, &term);
        }
        Some(Scalar::mul(&acc, &Jet::constant(inv0)))
    }
}

impl Scalar for Jet {
    fn from_rational(r: &Rational) -> Self {
        Jet::constant(r.clone())
    }

    fn add(&self, other: &Self) -> Self {
        match self.common(other) {
            None => Jet::constant(&self.c[0] + &other.c[0]),
            Some(space) => {
                let a = self.widen(&space);
                let b = other.widen(&space);
                Jet {
                    c: a.iter().zip(&b).map(|(x, y)| x + y).collect(),
                    space: Some(space),
                }
            }
        }
    }

    fn mul(&self, other: &Self) -> Self {
        match (&self.space, &other.space) {
            (None, None) => Jet::constant(&self.c[0] * &other.c[0]),
            (None, Some(s)) | (Some(s), None) => {
                let (k, j) = if self.space.is_none() {
                    (&self.c[0], other)
                } else {
                    (&other.c[0], self)
                };
                Jet {
                    space: Some(s.clone()),
                    c: j.c.iter().map(|x| x * k).collect(),
                }
            }
            (Some(s), Some(_)) => {
                let c = s
                    .products
                    .iter()
                    .map(|pairs| {
                        let mut acc = Rational::zero();
                        for &(i, j) in pairs {
                            if !self.c[i].is_zero() && !other.c[j].is_zero() {
                                acc += &self.c[i] * &other.c[j];
                            }
                        }
                        acc
                    })
                    .collect();
                Jet {
                    space: Some(s.clone()),
                    c,
                }
            }
        }
    }

    fn div(&self, other: &Self) -> Option<Self> {
        Some(Scalar::mul(self, &other.recip()?))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{int, parse_expr, rat, Var};
    use super::*;

    #[test]
    fn jets_match_symbolic_derivatives() {
        let e = parse_expr("(x^3*y + 2*y^2)/(1 + x^2)").unwrap();
        let space = JetSpace::get(2, 2);
        let (px, py) = (rat(1, 3), rat(-2, 5));
        let xs = [Jet::variable(&space, 0, px.clone()), Jet::variable(&space, 1, py.clone())];
        let j = e
            .eval_generic(&|v: &Var| match v.as_str() {
                "x" => Some(xs[0].clone()),
                "y" => Some(xs[1].clone()),
                _ => None,
            })
            .unwrap();
        let pt = [(Var::new("x"), px), (Var::new("y"), py)].into_iter().collect();
        let (x, y) = (Var::new("x"), Var::new("y"));
        assert_eq!(*j.value(), e.eval_at(&pt).unwrap());
        assert_eq!(j.partial(&[0]), e.derivative(&x).eval_at(&pt).unwrap());
        assert_eq!(j.partial(&[0, 0]), e.derivative(&x).derivative(&x).eval_at(&pt).unwrap());
        assert_eq!(j.partial(&[0, 1]), e.derivative(&x).derivative(&y).eval_at(&pt).unwrap());
        assert_eq!(j.partial(&[1, 1]), e.derivative(&y).derivative(&y).eval_at(&pt).unwrap());
    }

    #[test]
    fn reciprocal_of_zero_value_fails() {
        let space = JetSpace::get(1, 3);
        assert!(Jet::variable(&space, 0, int(0)).recip().is_none());
        let r = Jet::variable(&space, 0, int(2)).recip().unwrap();
        // d^3/dx^3 (1/x) = -6/x^4
        assert_eq!(r.partial(&[0, 0, 0]), rat(-6, 16));
    }
}
