use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::{Result, StructureError};
use crate::geometry::{Chart, SymBivector};
use crate::linalg::{complete_basis, Matrix};
use crate::sampling::Sampler;
use crate::symexpr::{Expr, Point, Rational, SymError, Var};

/// `N = origin + span(basis)` inside an affine chart.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSubmanifold {
    name: String,
    ambient: Chart,
    origin: Vec<Rational>,
    basis: Vec<Vec<Rational>>,
}

impl AffineSubmanifold {
    pub fn new(
        name: &str,
        ambient: &Chart,
        origin: Vec<Rational>,
        basis: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        let n = ambient.dim();
        if origin.len() != n || basis.iter().any(|b| b.len() != n) {
            return Err(StructureError::Shape(format!(
                "submanifold `{name}` of `{}` needs vectors of length {n}",
                ambient.name()
            )));
        }
        if basis.len() > n
            || (!basis.is_empty() && Matrix::from_rows(basis.clone()).rank() < basis.len())
        {
            return Err(StructureError::DegenerateBasis(name.to_string()));
        }
        Ok(AffineSubmanifold {
            name: name.to_string(),
            ambient: ambient.clone(),
            origin,
            basis,
        })
    }

    /// The whole chart as a submanifold of itself.
    pub fn whole(chart: &Chart) -> Self {
        let n = chart.dim();
        AffineSubmanifold {
            name: chart.name().to_string(),
            ambient: chart.clone(),
            origin: vec![Rational::zero(); n],
            basis: Matrix::<Rational>::identity(n).to_rows(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ambient(&self) -> &Chart {
        &self.ambient
    }

    pub fn origin(&self) -> &[Rational] {
        &self.origin
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `origin + Σ t_a basis_a`.
    pub fn ambient_point(&self, t: &[Rational]) -> Vec<Rational> {
        let mut x = self.origin.clone();
        for (ta, b) in t.iter().zip(&self.basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += ta * bi;
            }
        }
        x
    }

    /// Whether a point of the ambient chart lies on `N`.
    pub fn contains(&self, x: &[Rational]) -> bool {
        let d: Vec<Rational> = x.iter().zip(&self.origin).map(|(a, b)| a - b).collect();
        let mut rows = self.basis.clone();
        rows.push(d);
        Matrix::from_rows(rows).rank() == self.dim()
    }
}

/// Affine coordinates `y` adapted to `N`: `x = origin + P y` where the first
/// `k` columns of `P` are the basis of `N`, so `N = {y_{k+1} = … = y_n = 0}`.
#[derive(Clone, Debug)]
pub struct AdaptedFrame {
    sub: AffineSubmanifold,
    p: Matrix<Rational>,
    a: Matrix<Rational>,
    y: Vec<Var>,
    induced: Chart,
}

fn fresh(base: &str, taken: &mut BTreeSet<String>) -> String {
    let mut i = 1;
    loop {
        let cand = format!("{base}{i}");
        if !taken.contains(&cand) {
            taken.insert(cand.clone());
            return cand;
        }
        i += 1;
    }
}

pub fn adapted_frame(sub: &AffineSubmanifold) -> Result<AdaptedFrame> {
    let n = sub.ambient.dim();
    let k = sub.dim();
    let cols = complete_basis(&sub.basis, n)
        .ok_or_else(|| StructureError::DegenerateBasis(sub.name.clone()))?;
    let p = Matrix::from_fn(n, n, |i, j| cols[j][i].clone());
    let a = p
        .inverse()
        .ok_or_else(|| StructureError::DegenerateBasis(sub.name.clone()))?;

    let mut taken: BTreeSet<String> = sub.ambient.coords().iter().map(|v| v.to_string()).collect();
    let mut names = Vec::with_capacity(n);
    let mut reused = BTreeSet::new();
    for (aidx, b) in sub.basis.iter().enumerate() {
        // Keep the ambient name x_i when the coordinate is unchanged on N.
        let unit = b.iter().filter(|v| !v.is_zero()).count() == 1;
        let i = b.iter().position(|v| !v.is_zero()).unwrap_or(0);
        let keep = unit
            && b[i].is_one()
            && sub.origin[i].is_zero()
            && sub
                .basis
                .iter()
                .enumerate()
                .all(|(other, c)| other == aidx || c[i].is_zero());
        if keep {
            reused.insert(i);
            names.push(sub.ambient.coord(i).to_string());
        } else {
            names.push(String::new());
        }
    }
    for nm in names.iter_mut() {
        if nm.is_empty() {
            *nm = fresh("t", &mut taken);
        }
    }
    for _ in k..n {
        names.push(fresh("w", &mut taken));
    }
    let y: Vec<Var> = names.iter().map(|s| Var::new(s)).collect();
    let induced = Chart::build(&sub.name, &names[..k])?;
    Ok(AdaptedFrame {
        sub: sub.clone(),
        p,
        a,
        y,
        induced,
    })
}

impl AdaptedFrame {
    pub fn submanifold(&self) -> &AffineSubmanifold {
        &self.sub
    }

    pub fn k(&self) -> usize {
        self.sub.dim()
    }

    pub fn n(&self) -> usize {
        self.sub.ambient.dim()
    }

    /// Columns are the adapted directions.
    pub fn change(&self) -> &Matrix<Rational> {
        &self.p
    }

    pub fn inverse_change(&self) -> &Matrix<Rational> {
        &self.a
    }

    pub fn adapted_vars(&self) -> &[Var] {
        &self.y
    }

    /// The chart carried by `N`, with the tangent adapted coordinates.
    pub fn induced_chart(&self) -> &Chart {
        &self.induced
    }

    /// `x_i ↦ o_i + Σ_j P_ij y_j`.
    pub fn ambient_bindings(&self) -> BTreeMap<Var, Expr> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut e = Expr::constant(self.sub.origin[i].clone());
                for j in 0..n {
                    let c = self.p.get(i, j);
                    if !c.is_zero() {
                        e = e + &Expr::from_var(&self.y[j]).scale(c);
                    }
                }
                (self.sub.ambient.coord(i).clone(), e)
            })
            .collect()
    }

    /// `h̃ = A·H(o + P y)·Aᵀ`: the components of `h` in adapted coordinates.
    pub fn to_adapted(&self, h: &SymBivector) -> Result<Matrix<Expr>> {
        self.sub.ambient.ensure_same(h.chart())?;
        let b = self.ambient_bindings();
        let hy = h.matrix().try_map(|e| e.substitute_partial(&b))?;
        let a = self.a.map(|r| Expr::constant(r.clone()));
        Ok(a.mul(&hy).mul(&a.transpose()))
    }

    /// Restriction of a function of `y` to `N`.
    pub fn on_n(&self, e: &Expr) -> Result<Expr> {
        let b: BTreeMap<Var, Expr> = self.y[self.k()..]
            .iter()
            .map(|v| (v.clone(), Expr::zero()))
            .collect();
        Ok(e.substitute_partial(&b)?)
    }

    /// The point of `N` with tangent coordinates `t`, on the induced chart.
    pub fn tangent_point(&self, t: &[Rational]) -> Point {
        self.induced.point_at(t)
    }

    /// The same point in ambient coordinates.
    pub fn ambient_point(&self, t: &[Rational]) -> Vec<Rational> {
        self.sub.ambient_point(t)
    }

    /// Adapted coordinates `y = A (x − o)` of an ambient point.
    pub fn adapted_coords(&self, x: &[Rational]) -> Vec<Rational> {
        let d: Vec<Rational> = x.iter().zip(&self.sub.origin).map(|(a, b)| a - b).collect();
        self.a.mul_vec(&d)
    }

    /// Numeric `A H(x) Aᵀ` at an ambient point.
    pub fn adapted_at(&self, h: &SymBivector, x: &[Rational]) -> std::result::Result<Matrix<Rational>, SymError> {
        let hx = h.eval_at(&self.sub.ambient.point_at(x))?;
        Ok(self.a.mul(&hx).mul(&self.a.transpose()))
    }

    pub fn conormal_indices(&self) -> std::ops::Range<usize> {
        self.k()..self.n()
    }

    pub fn tangent_indices(&self) -> std::ops::Range<usize> {
        0..self.k()
    }
}

/// A residual entry with a label describing its position.
pub type Labeled = (String, Expr);

#[derive(Clone, Debug)]
pub struct KvSubmanifoldReport {
    pub holds: bool,
    /// `h̃_{a i}|_N` for conormal `a` and all `i`, labeled `(a,i)` 1-based in
    /// adapted numbering.
    pub residuals: Vec<Labeled>,
    pub induced: Option<SymBivector>,
}

pub fn is_kv_submanifold(sub: &AffineSubmanifold, h: &SymBivector) -> Result<KvSubmanifoldReport> {
    let fr = adapted_frame(sub)?;
    let ht = fr.to_adapted(h)?;
    let mut residuals = Vec::new();
    for a in fr.conormal_indices() {
        for i in 0..fr.n() {
            residuals.push((format!("({},{})", a + 1, i + 1), fr.on_n(ht.get(a, i))?));
        }
    }
    let holds = residuals.iter().all(|(_, e)| e.is_zero());
    let induced = if holds {
        Some(induced_block(&fr, &ht)?)
    } else {
        None
    };
    Ok(KvSubmanifoldReport {
        holds,
        residuals,
        induced,
    })
}

fn induced_block(fr: &AdaptedFrame, ht: &Matrix<Expr>) -> Result<SymBivector> {
    let k = fr.k();
    let m = Matrix::from_fn(k, k, |i, j| ht.get(i, j).clone()).try_map(|e| fr.on_n(e))?;
    Ok(SymBivector::new(fr.induced_chart(), m)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transversality {
    /// `det D|_N` is a nonzero constant.
    SymbolicTrue,
    /// `det D|_N` is nonzero at every sampled point of `N`.
    PointwiseTrue,
    /// `det D|_N` vanishes identically or at a sampled point.
    False,
}

#[derive(Clone, Debug)]
pub struct TransversalReport {
    pub verdict: Transversality,
    /// Determinant of the conormal block, restricted to `N`.
    pub det_d: Expr,
    /// Tangent coordinates of the sampled points that were evaluated.
    pub sampled: Vec<Vec<Rational>>,
    /// First sampled point where `det D` vanished.
    pub failing_point: Option<Vec<Rational>>,
    /// Schur complement `A − B D⁻¹ Bᵀ` on `N`, unless the verdict is false.
    pub induced: Option<SymBivector>,
}

/// Blocks `[A B; Bᵀ D]` of `h̃|_N` (tangent first).
pub fn adapted_blocks(
    fr: &AdaptedFrame,
    h: &SymBivector,
) -> Result<(Matrix<Expr>, Matrix<Expr>, Matrix<Expr>)> {
    let ht = fr.to_adapted(h)?.try_map(|e| fr.on_n(e))?;
    let t: Vec<usize> = fr.tangent_indices().collect();
    let c: Vec<usize> = fr.conormal_indices().collect();
    Ok((ht.select(&t, &t), ht.select(&t, &c), ht.select(&c, &c)))
}

pub fn is_transversal(sub: &AffineSubmanifold, h: &SymBivector, sampler: &Sampler) -> Result<TransversalReport> {
    let fr = adapted_frame(sub)?;
    let (a, b, d) = adapted_blocks(&fr, h)?;
    let det_d = d.det();
    let mut sampled = Vec::new();
    let mut failing_point = None;
    let verdict = if det_d.is_zero() {
        Transversality::False
    } else if det_d.is_constant() {
        Transversality::SymbolicTrue
    } else {
        let mut v = Transversality::PointwiseTrue;
        for t in sampler.points(fr.k()) {
            match det_d.eval_at(&fr.tangent_point(&t)) {
                Ok(val) if val.is_zero() => {
                    failing_point = Some(t.clone());
                    sampled.push(t);
                    v = Transversality::False;
                    break;
                }
                Ok(_) => sampled.push(t),
                Err(SymError::PoleAtPoint) => continue,
                Err(e) => return Err(e.into()),
            }
        }
        v
    };
    let induced = if verdict == Transversality::False {
        None
    } else {
        let dinv = d
            .inverse()
            .ok_or_else(|| StructureError::NotTransverse(sub.name.clone()))?;
        let schur = a.sub(&b.mul(&dinv).mul(&b.transpose()));
        Some(SymBivector::new(fr.induced_chart(), schur)?)
    };
    Ok(TransversalReport {
        verdict,
        det_d,
        sampled,
        failing_point,
        induced,
    })
}

#[derive(Clone, Debug)]
pub struct CoisotropicReport {
    pub holds: bool,
    /// Entries of the conormal block `D|_N`, labeled in adapted numbering.
    pub residuals: Vec<Labeled>,
}

pub fn is_coisotropic(sub: &AffineSubmanifold, h: &SymBivector) -> Result<CoisotropicReport> {
    let fr = adapted_frame(sub)?;
    let (_, _, d) = adapted_blocks(&fr, h)?;
    let k = fr.k();
    let mut residuals = Vec::new();
    for a in 0..d.rows() {
        for b in 0..d.cols() {
            residuals.push((format!("({},{})", a + k + 1, b + k + 1), d.get(a, b).clone()));
        }
    }
    Ok(CoisotropicReport {
        holds: residuals.iter().all(|(_, e)| e.is_zero()),
        residuals,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeafPoint {
    /// Tangent coordinates of the point on `N`.
    pub point: Vec<Rational>,
    pub rank: usize,
    /// `Im h_#(x) ⊆ T_x N`.
    pub contained: bool,
}

/// At each point of `N` (given in tangent coordinates) compares the image of
/// `h_#` with the tangent space.
pub fn leaf_openness_check(
    sub: &AffineSubmanifold,
    h: &SymBivector,
    points: &[Vec<Rational>],
) -> Result<Vec<LeafPoint>> {
    sub.ambient.ensure_same(h.chart())?;
    let mut out = Vec::new();
    for t in points {
        let x = sub.ambient_point(t);
        let hx = h.eval_at(&sub.ambient.point_at(&x))?;
        let rank = hx.rank();
        let mut rows = sub.basis.clone();
        rows.extend(hx.to_rows());
        let contained = rows.is_empty() || Matrix::from_rows(rows).rank() == sub.dim();
        out.push(LeafPoint {
            point: t.clone(),
            rank,
            contained,
        });
    }
    Ok(out)
}

/// `N₁ ∩ N₂`, or `None` when empty.
pub fn intersect(n1: &AffineSubmanifold, n2: &AffineSubmanifold, name: &str) -> Result<Option<AffineSubmanifold>> {
    n1.ambient.ensure_same(&n2.ambient)?;
    let n = n1.ambient.dim();
    let (k1, k2) = (n1.dim(), n2.dim());
    // o1 + B1 s = o2 + B2 t
    let sys = Matrix::from_fn(n, k1 + k2, |i, j| {
        if j < k1 {
            n1.basis[j][i].clone()
        } else {
            -n2.basis[j - k1][i].clone()
        }
    });
    let rhs: Vec<Rational> = (0..n).map(|i| &n2.origin[i] - &n1.origin[i]).collect();
    let Some(sol) = sys.solve(&rhs) else {
        return Ok(None);
    };
    let origin = n1.ambient_point(&sol[..k1]);
    let mut dirs: Vec<Vec<Rational>> = sys
        .nullspace()
        .into_iter()
        .map(|v| n1.ambient_point(&v[..k1]).iter().zip(&n1.origin).map(|(a, b)| a - b).collect())
        .collect();
    if !dirs.is_empty() {
        let (r, piv) = Matrix::from_rows(dirs.clone()).rref();
        dirs = (0..piv.len()).map(|i| r.row(i).to_vec()).collect();
    }
    Ok(Some(AffineSubmanifold::new(name, &n1.ambient, origin, dirs)?))
}

/// The coordinate subspace `{x_i = 0 : i ∈ zeros}` through the origin.
pub fn coordinate_subspace(chart: &Chart, zeros: &[usize], name: &str) -> Result<AffineSubmanifold> {
    let n = chart.dim();
    let basis = (0..n)
        .filter(|i| !zeros.contains(i))
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    AffineSubmanifold::new(name, chart, vec![Rational::zero(); n], basis)
}
