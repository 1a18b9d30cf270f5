//! Multivariate polynomial gcd over Q.
//!
//! Recursive primitive pseudo-remainder sequence: view both inputs as
//! univariate in their alphabetically smallest common variable with
//! coefficients in the remaining variables, split off contents (computed
//! recursively) and run the PRS on primitive parts. Units of Q[x..] are the
//! nonzero rationals, so results are normalized to be monic.

use super::{Poly, Var};

/// Greatest common divisor, monic under the graded lexicographic order.
/// `gcd(0, 0) = 0`.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.monic();
    }
    // Cheap divisibility probes save a full PRS in the common case where one
    // side already divides the other.
    if a.total_degree() <= b.total_degree() {
        if b.div_exact(a).is_some() {
            return a.monic();
        }
    } else if a.div_exact(b).is_some() {
        return b.monic();
    }

    let va = a.vars();
    let vb = b.vars();
    let v = match va.iter().chain(vb.iter()).min() {
        Some(v) => v.clone(),
        None => return Poly::one(),
    };
    match (va.contains(&v), vb.contains(&v)) {
        (true, true) => {}
        // `v` occurs in only one input: the gcd divides that input's content.
        (true, false) => return poly_gcd(&content_in(a, &v), b),
        (false, true) => return poly_gcd(a, &content_in(b, &v)),
        (false, false) => unreachable!(),
    }

    let ca = content_in(a, &v);
    let cb = content_in(b, &v);
    let c = poly_gcd(&ca, &cb);
    let mut p = a.div_exact(&ca).expect("content divides");
    let mut q = b.div_exact(&cb).expect("content divides");
    if p.degree_in(&v) < q.degree_in(&v) {
        std::mem::swap(&mut p, &mut q);
    }
    while !q.is_zero() {
        let r = pseudo_remainder(&p, &q, &v);
        p = q;
        if r.is_zero() {
            q = Poly::zero();
        } else if r.degree_in(&v) == 0 {
            // a nonzero remainder free of v: primitive parts are coprime
            return c.monic();
        } else {
            let cr = content_in(&r, &v);
            q = r.div_exact(&cr).expect("content divides");
        }
    }
    let pp = p.div_exact(&content_in(&p, &v)).expect("content divides");
    (&c * &pp).monic()
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `v`.
fn content_in(p: &Poly, v: &Var) -> Poly {
    let mut g = Poly::zero();
    for c in p.coefficients_in(v) {
        if c.is_zero() {
            continue;
        }
        g = poly_gcd(&g, &c);
        if g.is_constant() {
            return Poly::one();
        }
    }
    g.monic()
}

/// Pseudo-remainder of `a` by `b` in the variable `v`.
fn pseudo_remainder(a: &Poly, b: &Poly, v: &Var) -> Poly {
    let db = b.degree_in(v);
    let bc = b.coefficients_in(v);
    let lb = bc[db as usize].clone();
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.coefficients_in(v)[dr as usize].clone();
        let shift = super::Monomial::power(v.clone(), dr - db);
        let t = (&lr * b).mul_monomial(&shift, &super::Rational::from_integer(1.into()));
        r = &(&lb * &r) - &t;
        // keep coefficient growth in check
        if !r.is_zero() {
            let k = r.rational_content();
            r = r.scale(&k.recip());
        }
    }
    r
}
