//! Commutative associative algebras with a scalar 2-cocycle and the affine
//! K-V structure on their duals.

use num_traits::Zero;
use thiserror::Error;

use crate::geometry::{Chart, GeometryError, ScalarField, SymBivector};
use crate::linalg::Matrix;
use crate::structures::{AffineSubmanifold, StructureError};
use crate::symexpr::{Expr, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("invalid algebra `{0}`: {1}")]
    InvalidAlgebra(String, String),
    #[error("invalid subspace: {0}")]
    InvalidSubspace(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

pub type Result<T> = std::result::Result<T, AlgebraError>;

/// `e_i · e_j = Σ_k C^k_{ij} e_k` together with `b_{ij} = B(e_i, e_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraSpec {
    name: String,
    dim: usize,
    /// `c[i][j][k] = C^k_{ij}`.
    c: Vec<Vec<Vec<Rational>>>,
    b: Matrix<Rational>,
}

impl AlgebraSpec {
    /// Zero product and zero cocycle.
    pub fn zero(name: &str, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(AlgebraError::InvalidAlgebra(name.into(), "dimension must be positive".into()));
        }
        Ok(AlgebraSpec {
            name: name.to_string(),
            dim,
            c: vec![vec![vec![Rational::zero(); dim]; dim]; dim],
            b: Matrix::zeros(dim, dim),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.c[i][j][k]
    }

    pub fn product_of_basis(&self, i: usize, j: usize) -> &[Rational] {
        &self.c[i][j]
    }

    pub fn cocycle(&self) -> &Matrix<Rational> {
        &self.b
    }

    /// Sets `e_i · e_j` (0-based) without touching `e_j · e_i`.
    pub fn set_product(&mut self, i: usize, j: usize, coeffs: Vec<Rational>) -> Result<()> {
        if i >= self.dim || j >= self.dim || coeffs.len() != self.dim {
            return Err(AlgebraError::Shape(format!(
                "product e{}·e{} in algebra `{}` of dimension {}",
                i + 1,
                j + 1,
                self.name,
                self.dim
            )));
        }
        self.c[i][j] = coeffs;
        Ok(())
    }

    pub fn set_cocycle(&mut self, i: usize, j: usize, v: Rational) -> Result<()> {
        if i >= self.dim || j >= self.dim {
            return Err(AlgebraError::Shape(format!("cocycle entry ({},{})", i + 1, j + 1)));
        }
        self.b.set(i, j, v);
        Ok(())
    }

    /// Builds an algebra from listed products and cocycle entries; an entry
    /// given only for `(i, j)` is mirrored to `(j, i)`.
    pub fn from_entries(
        name: &str,
        dim: usize,
        products: &[(usize, usize, Vec<Rational>)],
        cocycle: &[(usize, usize, Rational)],
    ) -> Result<Self> {
        let mut a = AlgebraSpec::zero(name, dim)?;
        for (i, j, v) in products {
            a.set_product(*i, *j, v.clone())?;
        }
        for (i, j, v) in products {
            if !products.iter().any(|(p, q, _)| (*p, *q) == (*j, *i)) {
                a.set_product(*j, *i, v.clone())?;
            }
        }
        for (i, j, v) in cocycle {
            a.set_cocycle(*i, *j, v.clone())?;
        }
        for (i, j, v) in cocycle {
            if !cocycle.iter().any(|(p, q, _)| (*p, *q) == (*j, *i)) {
                a.set_cocycle(*j, *i, v.clone())?;
            }
        }
        Ok(a)
    }

    /// `u · v` in coordinates.
    pub fn mul(&self, u: &[Rational], v: &[Rational]) -> Vec<Rational> {
        let n = self.dim;
        let mut w = vec![Rational::zero(); n];
        for i in 0..n {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if v[j].is_zero() {
                    continue;
                }
                let s = &u[i] * &v[j];
                for (k, wk) in w.iter_mut().enumerate() {
                    *wk += &s * &self.c[i][j][k];
                }
            }
        }
        w
    }

    /// `B(u, v)`.
    pub fn pair(&self, u: &[Rational], v: &[Rational]) -> Rational {
        let mut s = Rational::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += &u[i] * self.b.get(i, j) * &v[j];
            }
        }
        s
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim];
        v[i] = Rational::from_integer(1.into());
        v
    }
}

/// Validation verdicts; witnesses are 1-based basis indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlgebraReport {
    pub commutative: bool,
    pub associative: bool,
    pub cocycle_symmetric: bool,
    pub cocycle: bool,
    pub commutativity_witness: Option<(usize, usize)>,
    pub associativity_witness: Option<(usize, usize, usize)>,
    pub symmetry_witness: Option<(usize, usize)>,
    pub cocycle_witness: Option<(usize, usize, usize)>,
}

impl AlgebraReport {
    pub fn valid(&self) -> bool {
        self.commutative && self.associative && self.cocycle_symmetric && self.cocycle
    }
}

pub fn validate_algebra(a: &AlgebraSpec) -> AlgebraReport {
    let n = a.dim;
    let e = |i| a.basis_vector(i);
    let mut r = AlgebraReport::default();
    r.commutativity_witness = pairs(n).find(|&(i, j)| a.c[i][j] != a.c[j][i]);
    r.symmetry_witness = pairs(n).find(|&(i, j)| a.b.get(i, j) != a.b.get(j, i));
    r.associativity_witness = triples(n).find(|&(i, j, k)| {
        a.mul(&a.mul(&e(i), &e(j)), &e(k)) != a.mul(&e(i), &a.mul(&e(j), &e(k)))
    });
    r.cocycle_witness = triples(n).find(|&(i, j, k)| {
        a.pair(&a.mul(&e(i), &e(j)), &e(k)) != a.pair(&e(i), &a.mul(&e(j), &e(k)))
    });
    r.commutative = r.commutativity_witness.is_none();
    r.symmetry_witness = r.symmetry_witness.map(|(i, j)| (i + 1, j + 1));
    r.commutativity_witness = r.commutativity_witness.map(|(i, j)| (i + 1, j + 1));
    r.associativity_witness = r.associativity_witness.map(|(i, j, k)| (i + 1, j + 1, k + 1));
    r.cocycle_witness = r.cocycle_witness.map(|(i, j, k)| (i + 1, j + 1, k + 1));
    r.associative = r.associativity_witness.is_none();
    r.cocycle_symmetric = r.symmetry_witness.is_none();
    r.cocycle = r.cocycle_witness.is_none();
    r
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (0..n).map(move |j| (i, j)))
}

fn triples(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n).flat_map(move |i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
}

/// Coordinate names on the dual: `x, y, z` up to dimension three, else
/// `x1 … xn`.
pub fn dual_coordinate_names(dim: usize) -> Vec<String> {
    if dim <= 3 {
        ["x", "y", "z"][..dim].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=dim).map(|i| format!("x{i}")).collect()
    }
}

pub fn dual_chart(a: &AlgebraSpec) -> Result<Chart> {
    Ok(Chart::new(&a.name, &dual_coordinate_names(a.dim))?)
}

/// `h(dx_i, dx_j) = b_{ij} + Σ_k C^k_{ij} x_k` on the dual chart.
pub fn algebra_to_kv(a: &AlgebraSpec) -> Result<SymBivector> {
    let report = validate_algebra(a);
    if !report.valid() {
        return Err(AlgebraError::InvalidAlgebra(a.name.clone(), describe_failure(&report)));
    }
    let chart = dual_chart(a)?;
    algebra_bivector(a, &chart)
}

/// The same bivector on a given chart of matching dimension, without
/// validation.
pub fn algebra_bivector(a: &AlgebraSpec, chart: &Chart) -> Result<SymBivector> {
    if chart.dim() != a.dim {
        return Err(AlgebraError::Shape(format!(
            "chart `{}` has dimension {}, algebra `{}` has {}",
            chart.name(),
            chart.dim(),
            a.name,
            a.dim
        )));
    }
    let n = a.dim;
    let m = Matrix::from_fn(n, n, |i, j| {
        let mut e = Expr::constant(a.b.get(i, j).clone());
        for k in 0..n {
            if !a.c[i][j][k].is_zero() {
                e = e + &chart.coord_expr(k).scale(&a.c[i][j][k]);
            }
        }
        e
    });
    Ok(SymBivector::new(chart, m)?)
}

fn describe_failure(r: &AlgebraReport) -> String {
    if let Some((i, j)) = r.commutativity_witness {
        format!("not commutative at (e{i}, e{j})")
    } else if let Some((i, j, k)) = r.associativity_witness {
        format!("not associative at (e{i}, e{j}, e{k})")
    } else if let Some((i, j)) = r.symmetry_witness {
        format!("cocycle not symmetric at ({i}, {j})")
    } else if let Some((i, j, k)) = r.cocycle_witness {
        format!("cocycle condition fails at (e{i}, e{j}, e{k})")
    } else {
        "valid".into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceKind {
    Subalgebra,
    Ideal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceSpec {
    pub basis: Vec<Vec<Rational>>,
    pub kind: SubspaceKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceReport {
    pub closed: bool,
    /// 1-based `(i, j)`: for a subalgebra both index the subspace basis; for
    /// an ideal `i` indexes the algebra basis and `j` the subspace basis.
    pub witness: Option<(usize, usize)>,
}

fn in_span(basis: &[Vec<Rational>], v: &[Rational]) -> bool {
    if v.iter().all(Zero::is_zero) {
        return true;
    }
    if basis.is_empty() {
        return false;
    }
    let mut rows = basis.to_vec();
    rows.push(v.to_vec());
    Matrix::from_rows(rows).rank() == Matrix::from_rows(basis.to_vec()).rank()
}

pub fn validate_subspace(a: &AlgebraSpec, s: &SubspaceSpec) -> Result<SubspaceReport> {
    if s.basis.iter().any(|v| v.len() != a.dim) {
        return Err(AlgebraError::InvalidSubspace(format!(
            "vectors must have length {}",
            a.dim
        )));
    }
    if !s.basis.is_empty() && Matrix::from_rows(s.basis.clone()).rank() < s.basis.len() {
        return Err(AlgebraError::InvalidSubspace("basis is not linearly independent".into()));
    }
    let witness = match s.kind {
        SubspaceKind::Subalgebra => pairs(s.basis.len())
            .find(|&(i, j)| !in_span(&s.basis, &a.mul(&s.basis[i], &s.basis[j]))),
        SubspaceKind::Ideal => (0..a.dim)
            .flat_map(|i| (0..s.basis.len()).map(move |j| (i, j)))
            .find(|&(i, j)| !in_span(&s.basis, &a.mul(&a.basis_vector(i), &s.basis[j]))),
    };
    Ok(SubspaceReport {
        closed: witness.is_none(),
        witness: witness.map(|(i, j)| (i + 1, j + 1)),
    })
}

/// `S° = {α ∈ 𝒜* : α|_S = 0}` as a linear submanifold of the dual chart.
pub fn annihilator_submanifold(a: &AlgebraSpec, chart: &Chart, s: &SubspaceSpec, name: &str) -> Result<AffineSubmanifold> {
    let report = validate_subspace(a, s)?;
    if let Some((i, j)) = report.witness {
        let what = match s.kind {
            SubspaceKind::Subalgebra => format!("not a subalgebra: s{i}·s{j} leaves the span"),
            SubspaceKind::Ideal => format!("not an ideal: e{i}·s{j} leaves the span"),
        };
        return Err(AlgebraError::InvalidSubspace(what));
    }
    if chart.dim() != a.dim {
        return Err(AlgebraError::Shape(format!("chart `{}` does not match algebra `{}`", chart.name(), a.name)));
    }
    let basis = if s.basis.is_empty() {
        Matrix::<Rational>::identity(a.dim).to_rows()
    } else {
        Matrix::from_rows(s.basis.clone()).nullspace()
    };
    Ok(AffineSubmanifold::new(name, chart, vec![Rational::zero(); a.dim], basis)?)
}

/// `Σ_{l,k} h_{il} h_{jk} ∂²f/∂x_l∂x_k` for all `i, j`, written out as a
/// double sum; a function lies in ℰ iff every entry vanishes.
pub fn e_criterion(h: &SymBivector, f: &ScalarField) -> Result<Vec<Vec<Expr>>> {
    h.chart().ensure_same(f.chart())?;
    let ch = h.chart();
    let n = h.dim();
    let second: Vec<Vec<Expr>> = (0..n)
        .map(|l| (0..n).map(|k| ch.d(&ch.d(f.value(), l), k)).collect())
        .collect();
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut s = Expr::zero();
                    for l in 0..n {
                        for k in 0..n {
                            if second[l][k].is_zero() {
                                continue;
                            }
                            s = s + &(&(h.get(i, l) * h.get(j, k)) * &second[l][k]);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect())
}

pub fn in_e_by_criterion(h: &SymBivector, f: &ScalarField) -> Result<bool> {
    Ok(e_criterion(h, f)?.iter().flatten().all(Expr::is_zero))
}
