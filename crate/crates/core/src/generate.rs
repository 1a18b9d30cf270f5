//! Seeded random instances: polynomials, bivectors, K-V structures, algebras
//! and affine maps. Used by property tests, the acceptance suite and the
//! scenario generator.

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{validate_algebra, AlgebraSpec, SubspaceKind};
use crate::dsl::{CheckDirective, CheckOptions, Declaration, Expectation, LieForm, Scenario};
use crate::geometry::{Chart, SymBivector};
use crate::linalg::Matrix;
use crate::structures::AffineMap;
use crate::symexpr::{int, rat, Expr, Monomial, Poly, Rational};

/// Small nonzero-biased rational with denominator at most 3 in `[-2, 2]`.
pub fn small_rational(rng: &mut impl Rng) -> Rational {
    let q: i64 = rng.gen_range(1..=3);
    let p: i64 = rng.gen_range(-2 * q..=2 * q);
    rat(p, q)
}

fn small_int(rng: &mut impl Rng, bound: i64) -> Rational {
    int(rng.gen_range(-bound..=bound))
}

/// Random polynomial in the chart coordinates with at most `terms` terms of
/// total degree at most `max_degree`.
pub fn random_poly(rng: &mut impl Rng, chart: &Chart, max_degree: u32, terms: usize) -> Expr {
    let mut p = Poly::zero();
    for _ in 0..terms {
        let deg = rng.gen_range(0..=max_degree);
        let mut m = Monomial::one();
        for _ in 0..deg {
            let v = chart.coords().choose(rng).expect("chart has coordinates");
            m = m.mul(&Monomial::var(v.clone()));
        }
        p = p + Poly::term(m, small_rational(rng));
    }
    Expr::from_poly(p)
}

/// Symmetric bivector with random polynomial entries.
pub fn random_bivector(rng: &mut impl Rng, chart: &Chart, max_degree: u32) -> SymBivector {
    let n = chart.dim();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let e = if rng.gen_bool(0.25) {
                Expr::zero()
            } else {
                random_poly(rng, chart, max_degree, 2)
            };
            m.set(i, j, e.clone());
            m.set(j, i, e);
        }
    }
    SymBivector::new(chart, m).expect("symmetric by construction")
}

/// A K-V bivector drawn from families known to satisfy the Codazzi equation:
/// constant, diagonal in separated variables, or an algebra dual.
pub fn random_kv(rng: &mut impl Rng, chart: &Chart) -> SymBivector {
    let n = chart.dim();
    match rng.gen_range(0..3) {
        0 => {
            let mut m = Matrix::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let v = Expr::constant(small_int(rng, 2));
                    m.set(i, j, v.clone());
                    m.set(j, i, v);
                }
            }
            SymBivector::new(chart, m).expect("symmetric")
        }
        1 => {
            let mut m = Matrix::zeros(n, n);
            for i in 0..n {
                let x = chart.coord_expr(i);
                let a = Expr::constant(small_int(rng, 2));
                let b = Expr::constant(small_int(rng, 2));
                let c = Expr::constant(small_int(rng, 1));
                m.set(i, i, &(&a + &(&b * &x)) + &(&c * &(&x * &x)));
            }
            SymBivector::new(chart, m).expect("diagonal")
        }
        _ => {
            let a = random_algebra(rng, n);
            crate::algebra::algebra_bivector(&a, chart).expect("dimensions match")
        }
    }
}

/// Building blocks of commutative associative algebras.
#[derive(Debug, Clone, Copy)]
enum Block {
    /// `e·e = e`.
    Idempotent,
    /// `e·e = 0`.
    Null,
    /// `ℝ[t]/(t^k)` with basis `1, t, …, t^{k-1}`.
    Truncated(usize),
    /// `tℝ[t]/(t^{k+1})` with basis `t, …, t^k`.
    Nilpotent(usize),
}

impl Block {
    fn dim(self) -> usize {
        match self {
            Block::Idempotent | Block::Null => 1,
            Block::Truncated(k) | Block::Nilpotent(k) => k,
        }
    }

    /// `(i, j) ↦ Some(k)` with `e_i e_j = e_k`, inside the block.
    fn product(self, i: usize, j: usize) -> Option<usize> {
        match self {
            Block::Idempotent => Some(0),
            Block::Null => None,
            Block::Truncated(k) => (i + j < k).then_some(i + j),
            Block::Nilpotent(k) => (i + j + 2 <= k).then_some(i + j + 1),
        }
    }
}

/// A random valid algebra of the given dimension: a direct sum of standard
/// blocks in a randomly changed basis, with a cocycle `B(u,v) = λ(u·v)` plus
/// an arbitrary symmetric form on the annihilator part. Structure constants
/// stay in `[-2, 2]`.
pub fn random_algebra(rng: &mut impl Rng, dim: usize) -> AlgebraSpec {
    let mut blocks = Vec::new();
    let mut left = dim;
    while left > 0 {
        let b = match rng.gen_range(0..4) {
            0 => Block::Idempotent,
            1 => Block::Null,
            2 => Block::Truncated(rng.gen_range(1..=left)),
            _ => Block::Nilpotent(rng.gen_range(1..=left)),
        };
        left -= b.dim();
        blocks.push(b);
    }
    let mut base = AlgebraSpec::zero("A", dim).expect("positive dimension");
    let mut off = 0;
    for b in &blocks {
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                if let Some(k) = b.product(i, j) {
                    let mut v = vec![Rational::zero(); dim];
                    v[off + k] = Rational::one();
                    base.set_product(off + i, off + j, v).expect("in range");
                }
            }
        }
        off += b.dim();
    }
    // cocycle from a functional on the product
    let lambda: Vec<Rational> = (0..dim).map(|_| small_int(rng, 1)).collect();
    for i in 0..dim {
        for j in 0..dim {
            let p = base.product_of_basis(i, j);
            let v: Rational = p.iter().zip(&lambda).map(|(a, b)| a * b).sum();
            base.set_cocycle(i, j, v).expect("in range");
        }
    }
    // products never have components along null blocks
    let mut null = Vec::new();
    let mut off = 0;
    for b in &blocks {
        if matches!(b, Block::Null) {
            null.push(off);
        }
        off += b.dim();
    }
    for (a, &i) in null.iter().enumerate() {
        for &j in &null[a..] {
            let v = small_int(rng, 1);
            base.set_cocycle(i, j, v.clone()).expect("in range");
            base.set_cocycle(j, i, v).expect("in range");
        }
    }
    for _ in 0..8 {
        if let Some(a) = change_basis(rng, &base) {
            if validate_algebra(&a).valid() {
                return a;
            }
        }
    }
    base
}

fn change_basis(rng: &mut impl Rng, a: &AlgebraSpec) -> Option<AlgebraSpec> {
    let n = a.dim();
    let mut p = Matrix::<Rational>::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            p.set(i, j, small_int(rng, 1));
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let p = Matrix::from_fn(n, n, |i, j| p.get(perm[i], j).clone());
    let pinv = p.inverse()?;
    // new basis vectors f_j = Σ_i P_ij e_i
    let col = |j: usize| -> Vec<Rational> { (0..n).map(|i| p.get(i, j).clone()).collect() };
    let mut out = AlgebraSpec::zero(a.name(), n).ok()?;
    for i in 0..n {
        for j in 0..n {
            let prod = a.mul(&col(i), &col(j));
            let coords = pinv.mul_vec(&prod);
            if coords.iter().any(|c| c.abs() > int(2)) {
                return None;
            }
            out.set_product(i, j, coords).ok()?;
            out.set_cocycle(i, j, a.pair(&col(i), &col(j))).ok()?;
        }
    }
    Some(out)
}

/// Random affine map with small integer entries.
pub fn random_affine_map(rng: &mut impl Rng, source: &Chart, target: &Chart) -> AffineMap {
    let mut m = Matrix::zeros(target.dim(), source.dim());
    for i in 0..target.dim() {
        for j in 0..source.dim() {
            m.set(i, j, small_int(rng, 2));
        }
    }
    let c = (0..target.dim()).map(|_| small_int(rng, 1)).collect();
    AffineMap::new(source, target, m, c).expect("shapes match")
}

/// A random scenario that resolves: charts, structures on them, and checks
/// with options. Used for DSL round-trip testing.
pub fn random_scenario(rng: &mut impl Rng) -> Scenario {
    let mut decls = Vec::new();
    let mut checks = Vec::new();
    let names = ["x", "y", "z", "w"];
    let charts: Vec<(String, Chart)> = (0..rng.gen_range(1..=2))
        .map(|c| {
            let dim = rng.gen_range(1..=3);
            let name = format!("M{c}");
            let chart = Chart::new(&name, &names[..dim]).expect("distinct coordinates");
            decls.push(Declaration::Manifold {
                name: name.clone(),
                dim,
                coords: names[..dim].iter().map(|s| s.to_string()).collect(),
            });
            (name, chart)
        })
        .collect();
    let mut bivectors = Vec::new();
    for (c, (cname, chart)) in charts.iter().enumerate() {
        let h = if rng.gen_bool(0.5) { random_kv(rng, chart) } else { random_bivector(rng, chart, 2) };
        let name = format!("h{c}");
        decls.push(Declaration::Bivector {
            name: name.clone(),
            chart: cname.clone(),
            rows: h.matrix().to_rows(),
        });
        bivectors.push((name.clone(), c));
        let f = format!("f{c}");
        decls.push(Declaration::Scalar {
            name: f.clone(),
            chart: cname.clone(),
            value: random_poly(rng, chart, 3, 3),
        });
        let n = chart.dim();
        let k = rng.gen_range(0..=n);
        let basis: Vec<Vec<Rational>> = (0..k)
            .map(|i| (0..n).map(|j| if i == j { int(1) } else if j < k { int(0) } else { small_int(rng, 2) }).collect())
            .collect();
        let sub = format!("N{c}");
        decls.push(Declaration::Submanifold {
            name: sub.clone(),
            ambient: cname.clone(),
            origin: (0..n).map(|_| small_rational(rng)).collect(),
            basis,
        });
        let mut opts = CheckOptions::default();
        if rng.gen_bool(0.5) {
            opts.label = Some(format!("random check {c}"));
        }
        if rng.gen_bool(0.3) {
            opts.samples = Some(rng.gen_range(1..=5));
        }
        if rng.gen_bool(0.3) {
            opts.expect = Some([Expectation::Pass, Expectation::Fail, Expectation::PointwisePass][rng.gen_range(0..3)]);
        }
        if rng.gen_bool(0.3) {
            opts.points = Some(vec![(0..n).map(|_| small_rational(rng)).collect()]);
        }
        checks.push(CheckDirective {
            kind: "codazzi".into(),
            args: vec![name.clone()],
            options: opts,
        });
        let mut lie = CheckOptions::default();
        match rng.gen_range(0..3) {
            0 => lie.form = Some(LieForm::Corrected),
            1 => lie.form = Some(LieForm::Stated),
            _ => lie.value = Some(random_bivector(rng, chart, 1).matrix().to_rows()),
        }
        checks.push(CheckDirective {
            kind: "lie_derivative".into(),
            args: vec![name.clone(), f.clone()],
            options: lie,
        });
        let kind = ["submanifold", "coisotropic", "transversal"][rng.gen_range(0..3)];
        checks.push(CheckDirective {
            kind: kind.into(),
            args: vec![sub, name.clone()],
            options: CheckOptions::default(),
        });
        let rank = CheckOptions {
            rank: rng.gen_bool(0.5).then(|| rng.gen_range(0..=n)),
            ..CheckOptions::default()
        };
        checks.push(CheckDirective {
            kind: "rank".into(),
            args: vec![name],
            options: rank,
        });
    }
    if charts.len() == 2 {
        let (s, t) = (&charts[0].1, &charts[1].1);
        let m = random_affine_map(rng, s, t);
        decls.push(Declaration::Map {
            name: "F".into(),
            source: charts[0].0.clone(),
            target: charts[1].0.clone(),
            matrix: m.matrix().to_rows(),
            offset: m.offset().to_vec(),
        });
        checks.push(CheckDirective {
            kind: ["kv_map", "theorem1", "graph"][rng.gen_range(0..3)].into(),
            args: vec!["F".into(), bivectors[0].0.clone(), bivectors[1].0.clone()],
            options: CheckOptions::default(),
        });
    }
    if rng.gen_bool(0.5) {
        let dim = rng.gen_range(1..=3);
        let a = random_algebra(rng, dim);
        let mut products = Vec::new();
        let mut cocycle = Vec::new();
        for i in 0..dim {
            for j in i..dim {
                for k in 0..dim {
                    let c = a.structure_constant(i, j, k);
                    if !c.is_zero() {
                        products.push(((i + 1, j + 1, k + 1), c.clone()));
                    }
                }
                let b = a.cocycle().get(i, j);
                if !b.is_zero() {
                    cocycle.push(((i + 1, j + 1), b.clone()));
                }
            }
        }
        decls.push(Declaration::Algebra {
            name: "A".into(),
            dim,
            products,
            cocycle,
        });
        checks.push(CheckDirective {
            kind: "algebra".into(),
            args: vec!["A".into()],
            options: CheckOptions::default(),
        });
        let v: Vec<Rational> = (0..dim).map(|i| if i == 0 { int(1) } else { int(0) }).collect();
        checks.push(CheckDirective {
            kind: "annihilator".into(),
            args: vec!["A".into()],
            options: CheckOptions {
                subspace: Some((if rng.gen_bool(0.5) { SubspaceKind::Ideal } else { SubspaceKind::Subalgebra }, vec![v])),
                ..CheckOptions::default()
            },
        });
    }
    Scenario::new(decls, checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::algebra_to_kv;
    use crate::geometry::is_kv;
    use crate::sampling::Sampler;

    #[test]
    fn generated_algebras_are_valid_and_small() {
        let mut rng = Sampler::default().rng(11);
        for dim in 1..=4 {
            for _ in 0..10 {
                let a = random_algebra(&mut rng, dim);
                assert!(validate_algebra(&a).valid(), "{a:?}");
                for i in 0..dim {
                    for j in 0..dim {
                        assert!(a.product_of_basis(i, j).iter().all(|c| c.abs() <= int(2)));
                    }
                }
                assert!(is_kv(&algebra_to_kv(&a).unwrap()));
            }
        }
    }

    #[test]
    fn kv_families() {
        let mut rng = Sampler::default().rng(12);
        let ch = Chart::new("M", &["x", "y", "z"]).unwrap();
        for _ in 0..10 {
            assert!(is_kv(&random_kv(&mut rng, &ch)));
        }
        let b = random_bivector(&mut rng, &ch, 2);
        assert!(b.matrix().is_symmetric());
    }
}
