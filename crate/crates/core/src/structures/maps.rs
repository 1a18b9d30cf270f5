use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rand::Rng;

use super::{Result, StructureError};
use crate::geometry::{hamiltonian, sharp, Chart, OneForm, ScalarField, SymBivector, VectorField};
use crate::linalg::Matrix;
use crate::sampling::{random_unit_rational, Sampler};
use crate::symexpr::{Expr, Rational, Var};
use crate::tangent::{build_pi, TangentChart};

/// `F(x) = M x + c` between two affine charts.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    source: Chart,
    target: Chart,
    m: Matrix<Rational>,
    c: Vec<Rational>,
}

impl AffineMap {
    pub fn new(source: &Chart, target: &Chart, m: Matrix<Rational>, c: Vec<Rational>) -> Result<Self> {
        if m.rows() != target.dim() || m.cols() != source.dim() || c.len() != target.dim() {
            return Err(StructureError::Shape(format!(
                "map `{}` -> `{}` needs a {}x{} matrix and {} offsets, got {}x{} and {}",
                source.name(),
                target.name(),
                target.dim(),
                source.dim(),
                target.dim(),
                m.rows(),
                m.cols(),
                c.len()
            )));
        }
        Ok(AffineMap {
            source: source.clone(),
            target: target.clone(),
            m,
            c,
        })
    }

    pub fn identity(chart: &Chart) -> Self {
        AffineMap {
            source: chart.clone(),
            target: chart.clone(),
            m: Matrix::identity(chart.dim()),
            c: vec![Rational::zero(); chart.dim()],
        }
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix<Rational> {
        &self.m
    }

    pub fn offset(&self) -> &[Rational] {
        &self.c
    }

    /// `y_a ∘ F = Σ_i M_ai x_i + c_a` in source coordinates.
    pub fn component(&self, a: usize) -> Expr {
        let mut acc = Expr::constant(self.c[a].clone());
        for i in 0..self.source.dim() {
            let k = self.m.get(a, i);
            if !k.is_zero() {
                acc = acc + &self.source.coord_expr(i).scale(k);
            }
        }
        acc
    }

    pub fn bindings(&self) -> BTreeMap<Var, Expr> {
        (0..self.target.dim())
            .map(|a| (self.target.coord(a).clone(), self.component(a)))
            .collect()
    }

    /// `e ∘ F` for a function on the target chart.
    pub fn compose_expr(&self, e: &Expr) -> Result<Expr> {
        self.target.check_expr(e)?;
        Ok(e.substitute_partial(&self.bindings())?)
    }

    pub fn apply_point(&self, x: &[Rational]) -> Vec<Rational> {
        let mut y = self.m.mul_vec(x);
        for (a, c) in y.iter_mut().zip(&self.c) {
            *a += c;
        }
        y
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &AffineMap) -> Result<AffineMap> {
        self.target.ensure_same(&g.source)?;
        let m = g.m.mul(&self.m);
        let c = g.apply_point(&self.c);
        AffineMap::new(&self.source, &g.target, m, c)
    }
}

/// `(F*α)_i = Σ_a α_a(F(x)) M_ai`.
pub fn pullback(f: &AffineMap, a: &OneForm) -> Result<OneForm> {
    f.target.ensure_same(a.chart())?;
    let composed: Vec<Expr> = a
        .components()
        .iter()
        .map(|e| f.compose_expr(e))
        .collect::<Result<_>>()?;
    let c = (0..f.source.dim())
        .map(|i| {
            (0..f.target.dim())
                .filter(|&k| !f.m.get(k, i).is_zero())
                .map(|k| composed[k].scale(f.m.get(k, i)))
                .sum()
        })
        .collect();
    Ok(OneForm::new(&f.source, c)?)
}

/// `M·X(x) − Y(F(x))`, componentwise.
pub fn relatedness_defect(f: &AffineMap, x: &VectorField, y: &VectorField) -> Result<Vec<Expr>> {
    f.source.ensure_same(x.chart())?;
    f.target.ensure_same(y.chart())?;
    (0..f.target.dim())
        .map(|a| {
            let pushed: Expr = (0..f.source.dim())
                .filter(|&i| !f.m.get(a, i).is_zero())
                .map(|i| x.get(i).scale(f.m.get(a, i)))
                .sum();
            Ok(&pushed - &f.compose_expr(y.get(a))?)
        })
        .collect()
}

pub fn are_f_related(f: &AffineMap, x: &VectorField, y: &VectorField) -> Result<bool> {
    Ok(relatedness_defect(f, x, y)?.iter().all(Expr::is_zero))
}

/// `M·H¹(x)·Mᵀ − H²(F(x))`; `F` is a K-V map iff this vanishes.
pub fn kv_map_residual(f: &AffineMap, h1: &SymBivector, h2: &SymBivector) -> Result<Matrix<Expr>> {
    f.source.ensure_same(h1.chart())?;
    f.target.ensure_same(h2.chart())?;
    let me = f.m.map(|r| Expr::constant(r.clone()));
    let pushed = me.mul(h1.matrix()).mul(&me.transpose());
    let pulled = h2.matrix().try_map(|e| f.compose_expr(e))?;
    Ok(pushed.sub(&pulled))
}

pub fn is_kv_map(f: &AffineMap, h1: &SymBivector, h2: &SymBivector) -> Result<bool> {
    Ok(kv_map_residual(f, h1, h2)?.is_zero())
}

/// The tangent map `TF(x, u) = (Mx + c, Mu)` between tangent charts.
pub fn tangent_map(f: &AffineMap) -> Result<(TangentChart, TangentChart, AffineMap)> {
    let t1 = TangentChart::new(&f.source);
    let t2 = TangentChart::new(&f.target);
    let (n, m) = (f.source.dim(), f.target.dim());
    let big = Matrix::from_fn(2 * m, 2 * n, |a, i| {
        if (a < m) == (i < n) {
            f.m.get(a % m, i % n).clone()
        } else {
            Rational::zero()
        }
    });
    let mut c = f.c.clone();
    c.extend(vec![Rational::zero(); m]);
    let tf = AffineMap::new(t1.total(), t2.total(), big, c)?;
    Ok((t1, t2, tf))
}

/// Residual of the Poisson-map condition `J Π¹ Jᵀ = Π² ∘ TF`.
pub fn poisson_map_residual(f: &AffineMap, h1: &SymBivector, h2: &SymBivector) -> Result<Matrix<Expr>> {
    let (t1, t2, tf) = tangent_map(f)?;
    let p1 = build_pi(&t1, h1)?;
    let p2 = build_pi(&t2, h2)?;
    let j = tf.m.map(|r| Expr::constant(r.clone()));
    let pushed = j.mul(p1.matrix()).mul(&j.transpose());
    let pulled = p2.matrix().try_map(|e| tf.compose_expr(e))?;
    Ok(pushed.sub(&pulled))
}

/// Verdicts of the four equivalent characterizations of K-V maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem1Report {
    /// `h¹(F*α, F*β) = h²(α, β)∘F`.
    pub kv_map: bool,
    /// `TF` is a Poisson map for the tangent bivectors.
    pub poisson: bool,
    /// `h¹_#(F*α)` and `h²_#(α)` are F-related for all coordinate forms.
    pub forms_related: bool,
    /// `X_{f∘F}` and `X_f` are F-related for the test functions.
    pub hamiltonians_related: bool,
}

impl Theorem1Report {
    pub fn all_agree(&self) -> bool {
        let v = self.kv_map;
        self.poisson == v && self.forms_related == v && self.hamiltonians_related == v
    }
}

/// Test functions on the target: coordinates, pairwise products and one
/// random quadratic drawn from the sampler.
pub fn test_functions(target: &Chart, sampler: &Sampler) -> Vec<Expr> {
    let m = target.dim();
    let mut out: Vec<Expr> = (0..m).map(|a| target.coord_expr(a)).collect();
    for a in 0..m {
        for b in a..m {
            out.push(&target.coord_expr(a) * &target.coord_expr(b));
        }
    }
    let mut rng = sampler.rng(0x7431);
    let mut q = Expr::zero();
    for (i, e) in out.clone().iter().enumerate() {
        if rng.gen_bool(0.7) || i == 0 {
            q = q + &e.scale(&random_unit_rational(&mut rng));
        }
    }
    out.push(q);
    out
}

pub fn theorem1_equivalences(
    f: &AffineMap,
    h1: &SymBivector,
    h2: &SymBivector,
    sampler: &Sampler,
) -> Result<Theorem1Report> {
    let kv_map = is_kv_map(f, h1, h2)?;
    let poisson = poisson_map_residual(f, h1, h2)?.is_zero();
    let mut forms_related = true;
    for a in 0..f.target.dim() {
        let dy = OneForm::basis(&f.target, a);
        let x = sharp(h1, &pullback(f, &dy)?)?;
        let y = sharp(h2, &dy)?;
        if !are_f_related(f, &x, &y)? {
            forms_related = false;
            break;
        }
    }
    let mut hamiltonians_related = true;
    for g in test_functions(&f.target, sampler) {
        let gf = ScalarField::new(&f.source, f.compose_expr(&g)?)?;
        let x = hamiltonian(h1, &gf)?;
        let y = hamiltonian(h2, &ScalarField::new(&f.target, g)?)?;
        if !are_f_related(f, &x, &y)? {
            hamiltonians_related = false;
            break;
        }
    }
    Ok(Theorem1Report {
        kv_map,
        poisson,
        forms_related,
        hamiltonians_related,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductSign {
    Plus,
    /// `M¹ × M̄²`: the second factor carries `−h²`.
    Minus,
}

/// Product chart with block-diagonal structure and the two projections.
#[derive(Debug, Clone)]
pub struct ProductStructure {
    pub chart: Chart,
    pub h: SymBivector,
    pub p1: AffineMap,
    pub p2: AffineMap,
    /// Renaming applied to the second factor's coordinates (identity if none
    /// clashed).
    pub second_names: Vec<Var>,
}

/// Coordinates of `second` renamed with a `_2` suffix where they would clash
/// with `first`.
pub fn product_chart(first: &Chart, second: &Chart) -> Result<(Chart, Vec<Var>)> {
    let mut taken: BTreeSet<String> = first.coords().iter().map(|v| v.to_string()).collect();
    let mut renamed = Vec::new();
    for v in second.coords() {
        let mut cand = v.to_string();
        while taken.contains(&cand) {
            cand.push_str("_2");
        }
        taken.insert(cand.clone());
        renamed.push(Var::new(&cand));
    }
    let names: Vec<String> = first
        .coords()
        .iter()
        .chain(renamed.iter())
        .map(|v| v.to_string())
        .collect();
    let chart = Chart::build(&format!("{}x{}", first.name(), second.name()), &names)?;
    Ok((chart, renamed))
}

pub fn product_kv(h1: &SymBivector, h2: &SymBivector, sign: ProductSign) -> Result<ProductStructure> {
    let (c1, c2) = (h1.chart(), h2.chart());
    let (chart, second_names) = product_chart(c1, c2)?;
    let rename: BTreeMap<Var, Expr> = c2
        .coords()
        .iter()
        .zip(&second_names)
        .map(|(a, b)| (a.clone(), Expr::from_var(b)))
        .collect();
    let (n1, n2) = (c1.dim(), c2.dim());
    let mut m = Matrix::zeros(n1 + n2, n1 + n2);
    for i in 0..n1 {
        for j in 0..n1 {
            m.set(i, j, h1.get(i, j).clone());
        }
    }
    for i in 0..n2 {
        for j in 0..n2 {
            let e = h2.get(i, j).substitute_partial(&rename)?;
            let e = match sign {
                ProductSign::Plus => e,
                ProductSign::Minus => -e,
            };
            m.set(n1 + i, n1 + j, e);
        }
    }
    let h = SymBivector::new(&chart, m)?;
    let proj = |target: &Chart, off: usize, k: usize| {
        let m = Matrix::from_fn(k, n1 + n2, |a, i| {
            if i == off + a {
                Rational::from_integer(1.into())
            } else {
                Rational::zero()
            }
        });
        AffineMap::new(&chart, target, m, vec![Rational::zero(); k])
    };
    let p1 = proj(c1, 0, n1)?;
    let p2 = proj(c2, n1, n2)?;
    Ok(ProductStructure {
        chart,
        h,
        p1,
        p2,
        second_names,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{int, parse_expr};

    fn e(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    fn biv(ch: &Chart, rows: &[&[&str]]) -> SymBivector {
        SymBivector::from_rows(ch, rows.iter().map(|r| r.iter().map(|s| e(s)).collect()).collect())
            .unwrap()
    }

    fn line_into_plane(l: i64, m: i64) -> (AffineMap, SymBivector, SymBivector) {
        let line = Chart::new("L", &["t"]).unwrap();
        let plane = Chart::new("P", &["x", "y"]).unwrap();
        let f = AffineMap::new(
            &line,
            &plane,
            Matrix::from_rows(vec![vec![int(l)], vec![int(m)]]),
            vec![int(0), int(0)],
        )
        .unwrap();
        (f, biv(&line, &[&["t^2"]]), biv(&plane, &[&["x^2", "0"], &["0", "y^2"]]))
    }

    #[test]
    fn kv_map_family() {
        for (l, m, expect) in [(1, 0, true), (0, 1, true), (1, 1, false), (2, 3, false)] {
            let (f, h1, h2) = line_into_plane(l, m);
            let r = theorem1_equivalences(&f, &h1, &h2, &Sampler::default()).unwrap();
            assert_eq!(r.kv_map, expect, "({l},{m})");
            assert!(r.all_agree(), "({l},{m}): {r:?}");
        }
    }

    #[test]
    fn null_direction_map() {
        let p = Chart::new("P", &["x", "y"]).unwrap();
        let q = Chart::new("Q", &["a", "b"]).unwrap();
        let f = AffineMap::new(
            &p,
            &q,
            Matrix::from_rows(vec![vec![int(1), int(1)], vec![int(1), int(1)]]),
            vec![int(0), int(0)],
        )
        .unwrap();
        let h1 = biv(&p, &[&["1", "0"], &["0", "-1"]]);
        assert!(is_kv_map(&f, &h1, &SymBivector::zero(&q)).unwrap());
    }

    #[test]
    fn pullback_and_identity() {
        let p = Chart::new("P", &["x", "y"]).unwrap();
        let id = AffineMap::identity(&p);
        let a = OneForm::new(&p, vec![e("x*y"), e("1")]).unwrap();
        assert_eq!(pullback(&id, &a).unwrap(), a);
        let line = Chart::new("L", &["x"]).unwrap();
        let emb = AffineMap::new(
            &line,
            &p,
            Matrix::from_rows(vec![vec![int(1)], vec![int(0)]]),
            vec![int(0), int(0)],
        )
        .unwrap();
        assert!(pullback(&emb, &OneForm::basis(&p, 1)).unwrap().is_zero());
    }

    #[test]
    fn products_and_projections() {
        let a = Chart::new("A", &["x"]).unwrap();
        let b = Chart::new("B", &["x"]).unwrap();
        let h1 = biv(&a, &[&["x"]]);
        let h2 = biv(&b, &[&["x^2"]]);
        let prod = product_kv(&h1, &h2, ProductSign::Plus).unwrap();
        assert_eq!(prod.second_names, vec![Var::new("x_2")]);
        assert_eq!(prod.h.get(1, 1), &e("x_2^2"));
        assert!(is_kv_map(&prod.p1, &prod.h, &h1).unwrap());
        assert!(is_kv_map(&prod.p2, &prod.h, &h2).unwrap());
        let neg = product_kv(&h1, &h2, ProductSign::Minus).unwrap();
        assert!(!is_kv_map(&neg.p2, &neg.h, &h2).unwrap());
        let minus_h2 = biv(&b, &[&["-x^2"]]);
        assert!(is_kv_map(&neg.p2, &neg.h, &minus_h2).unwrap());
    }
}
