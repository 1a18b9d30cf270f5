//! Koszul-Vinberg operators on a single affine chart.
//!
//! Every chart carries its canonical flat connection: in affine coordinates
//! all Christoffel symbols vanish, so covariant derivatives of components are
//! plain partial derivatives.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::linalg::Matrix;
use crate::symexpr::{Expr, Point, Rational, SymError, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("chart mismatch: expected `{expected}`, found `{found}`")]
    ChartMismatch { expected: String, found: String },
    #[error("unknown variable `{var}` on chart `{chart}`")]
    UnknownVariable { var: String, chart: String },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("bivector is not symmetric at entry ({0},{1})")]
    Asymmetric(usize, usize),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Sym(#[from] SymError),
}

type Result<T> = std::result::Result<T, GeometryError>;

#[derive(PartialEq, Eq)]
struct ChartInner {
    name: String,
    coords: Vec<Var>,
}

/// An affine coordinate patch. Cheap to clone.
#[derive(Clone, PartialEq, Eq)]
pub struct Chart(Arc<ChartInner>);

impl Chart {
    /// A chart of dimension at least one with distinct coordinate names.
    pub fn new<S: AsRef<str>>(name: &str, coords: &[S]) -> Result<Chart> {
        if coords.is_empty() {
            return Err(GeometryError::InvalidChart(format!(
                "chart `{name}` needs at least one coordinate"
            )));
        }
        Self::build(name, coords)
    }

    /// The zero-dimensional chart, home of structures induced on points.
    pub fn point(name: &str) -> Chart {
        Chart(Arc::new(ChartInner {
            name: name.to_string(),
            coords: Vec::new(),
        }))
    }

    pub(crate) fn build<S: AsRef<str>>(name: &str, coords: &[S]) -> Result<Chart> {
        let vars: Vec<Var> = coords.iter().map(|c| Var::new(c.as_ref())).collect();
        let distinct: BTreeSet<&Var> = vars.iter().collect();
        if distinct.len() != vars.len() {
            return Err(GeometryError::InvalidChart(format!(
                "chart `{name}` has repeated coordinate names"
            )));
        }
        Ok(Chart(Arc::new(ChartInner {
            name: name.to_string(),
            coords: vars,
        })))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn dim(&self) -> usize {
        self.0.coords.len()
    }

    pub fn coords(&self) -> &[Var] {
        &self.0.coords
    }

    pub fn coord(&self, i: usize) -> &Var {
        &self.0.coords[i]
    }

    pub fn index_of(&self, v: &Var) -> Option<usize> {
        self.0.coords.iter().position(|c| c == v)
    }

    pub fn coord_expr(&self, i: usize) -> Expr {
        Expr::from_var(&self.0.coords[i])
    }

    /// The point with the given coordinate values.
    pub fn point_at(&self, values: &[Rational]) -> Point {
        self.coords().iter().cloned().zip(values.iter().cloned()).collect()
    }

    /// Fails unless every free variable of `e` is a coordinate.
    pub fn check_expr(&self, e: &Expr) -> Result<()> {
        for v in e.vars() {
            if self.index_of(&v).is_none() {
                return Err(GeometryError::UnknownVariable {
                    var: v.to_string(),
                    chart: self.name().to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn ensure_same(&self, other: &Chart) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(GeometryError::ChartMismatch {
                expected: self.name().to_string(),
                found: other.name().to_string(),
            })
        }
    }

    /// `∂e/∂x_i`.
    pub fn d(&self, e: &Expr, i: usize) -> Expr {
        e.derivative(self.coord(i))
    }
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.name(), self.coords())
    }
}

/// A symmetric contravariant 2-tensor `h`, entries `h_ij = h(dx_i, dx_j)`.
#[derive(Clone, PartialEq, Debug)]
pub struct SymBivector {
    chart: Chart,
    m: Matrix<Expr>,
}

impl SymBivector {
    pub fn new(chart: &Chart, m: Matrix<Expr>) -> Result<Self> {
        let n = chart.dim();
        if m.rows() != n || m.cols() != n {
            return Err(GeometryError::Shape(format!(
                "bivector on `{}` needs a {n}x{n} matrix, got {}x{}",
                chart.name(),
                m.rows(),
                m.cols()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                chart.check_expr(m.get(i, j))?;
                if j < i && m.get(i, j) != m.get(j, i) {
                    return Err(GeometryError::Asymmetric(j + 1, i + 1));
                }
            }
        }
        Ok(SymBivector {
            chart: chart.clone(),
            m,
        })
    }

    pub fn from_rows(chart: &Chart, rows: Vec<Vec<Expr>>) -> Result<Self> {
        let n = chart.dim();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(GeometryError::Shape(format!(
                "bivector on `{}` needs {n} rows of {n} entries",
                chart.name()
            )));
        }
        if n == 0 {
            return Self::new(chart, Matrix::zeros(0, 0));
        }
        Self::new(chart, Matrix::from_rows(rows))
    }

    pub fn zero(chart: &Chart) -> Self {
        SymBivector {
            chart: chart.clone(),
            m: Matrix::zeros(chart.dim(), chart.dim()),
        }
    }

    /// `Σ ∂_i ⊗ ∂_i`.
    pub fn standard(chart: &Chart) -> Self {
        SymBivector {
            chart: chart.clone(),
            m: Matrix::identity(chart.dim()),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        self.m.get(i, j)
    }

    pub fn matrix(&self) -> &Matrix<Expr> {
        &self.m
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    /// `h(α, β)`.
    pub fn pair(&self, a: &OneForm, b: &OneForm) -> Result<Expr> {
        self.chart.ensure_same(&a.chart)?;
        self.chart.ensure_same(&b.chart)?;
        let n = self.dim();
        let mut acc = Expr::zero();
        for i in 0..n {
            if a.c[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b.c[j].is_zero() || self.get(i, j).is_zero() {
                    continue;
                }
                acc = acc + &(&(&a.c[i] * &b.c[j]) * self.get(i, j));
            }
        }
        Ok(acc)
    }

    pub fn eval_at(&self, p: &Point) -> std::result::Result<Matrix<Rational>, SymError> {
        self.m.try_map(|e| e.eval_at(p))
    }
}

/// `α = Σ α_i dx_i`.
#[derive(Clone, PartialEq, Debug)]
pub struct OneForm {
    chart: Chart,
    c: Vec<Expr>,
}

/// `X = Σ X_i ∂_i`.
#[derive(Clone, PartialEq, Debug)]
pub struct VectorField {
    chart: Chart,
    c: Vec<Expr>,
}

macro_rules! component_type {
    ($t:ident) => {
        impl $t {
            pub fn new(chart: &Chart, c: Vec<Expr>) -> Result<Self> {
                if c.len() != chart.dim() {
                    return Err(GeometryError::Shape(format!(
                        "expected {} components on `{}`, got {}",
                        chart.dim(),
                        chart.name(),
                        c.len()
                    )));
                }
                for e in &c {
                    chart.check_expr(e)?;
                }
                Ok($t {
                    chart: chart.clone(),
                    c,
                })
            }

            pub fn zero(chart: &Chart) -> Self {
                $t {
                    chart: chart.clone(),
                    c: vec![Expr::zero(); chart.dim()],
                }
            }

            /// The i-th coordinate element (`dx_i` or `∂_i`).
            pub fn basis(chart: &Chart, i: usize) -> Self {
                let mut c = vec![Expr::zero(); chart.dim()];
                c[i] = Expr::one();
                $t {
                    chart: chart.clone(),
                    c,
                }
            }

            pub(crate) fn raw(chart: &Chart, c: Vec<Expr>) -> Self {
                debug_assert_eq!(c.len(), chart.dim());
                $t {
                    chart: chart.clone(),
                    c,
                }
            }

            pub fn chart(&self) -> &Chart {
                &self.chart
            }

            pub fn components(&self) -> &[Expr] {
                &self.c
            }

            pub fn get(&self, i: usize) -> &Expr {
                &self.c[i]
            }

            pub fn is_zero(&self) -> bool {
                self.c.iter().all(Expr::is_zero)
            }

            pub fn add(&self, o: &Self) -> Result<Self> {
                self.chart.ensure_same(&o.chart)?;
                Ok($t::raw(
                    &self.chart,
                    self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
                ))
            }

            pub fn sub(&self, o: &Self) -> Result<Self> {
                self.chart.ensure_same(&o.chart)?;
                Ok($t::raw(
                    &self.chart,
                    self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect(),
                ))
            }

            pub fn scale(&self, f: &Expr) -> Self {
                $t::raw(&self.chart, self.c.iter().map(|a| a * f).collect())
            }

            pub fn neg(&self) -> Self {
                $t::raw(&self.chart, self.c.iter().map(|a| -a).collect())
            }
        }
    };
}
component_type!(OneForm);
component_type!(VectorField);

impl OneForm {
    pub fn differential(f: &ScalarField) -> OneForm {
        let ch = &f.chart;
        OneForm::raw(ch, (0..ch.dim()).map(|i| ch.d(&f.value, i)).collect())
    }

    /// `⟨α, X⟩`.
    pub fn pair(&self, x: &VectorField) -> Result<Expr> {
        self.chart.ensure_same(&x.chart)?;
        Ok(self.c.iter().zip(&x.c).map(|(a, b)| a * b).sum())
    }
}

impl VectorField {
    /// `X(f) = Σ X_i ∂_i f`.
    pub fn apply(&self, f: &Expr) -> Expr {
        let mut acc = Expr::zero();
        for (i, xi) in self.c.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let d = self.chart.d(f, i);
            if !d.is_zero() {
                acc = acc + &(xi * &d);
            }
        }
        acc
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct ScalarField {
    chart: Chart,
    value: Expr,
}

impl ScalarField {
    pub fn new(chart: &Chart, value: Expr) -> Result<Self> {
        chart.check_expr(&value)?;
        Ok(ScalarField {
            chart: chart.clone(),
            value,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn value(&self) -> &Expr {
        &self.value
    }
}

/// An `n×n×n` table indexed `(i, j, k)` from zero.
#[derive(Clone, PartialEq, Debug)]
pub struct TrilinearForm {
    chart: Chart,
    n: usize,
    entries: Vec<Expr>,
}

impl TrilinearForm {
    pub fn from_fn(chart: &Chart, f: impl Fn(usize, usize, usize) -> Expr) -> Self {
        let n = chart.dim();
        let mut entries = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    entries.push(f(i, j, k));
                }
            }
        }
        TrilinearForm {
            chart: chart.clone(),
            n,
            entries,
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Expr {
        &self.entries[(i * self.n + j) * self.n + k]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Expr::is_zero)
    }

    /// Entries in `(i, j, k)` lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize, usize), &Expr)> {
        let n = self.n;
        self.entries
            .iter()
            .enumerate()
            .map(move |(idx, e)| ((idx / (n * n), (idx / n) % n, idx % n), e))
    }

    pub fn first_nonzero(&self) -> Option<((usize, usize, usize), &Expr)> {
        self.iter().find(|(_, e)| !e.is_zero())
    }

    pub fn neg(&self) -> Self {
        TrilinearForm {
            chart: self.chart.clone(),
            n: self.n,
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }
}

/// `(α^#)_j = Σ_i α_i h_ij`.
pub fn sharp(h: &SymBivector, a: &OneForm) -> Result<VectorField> {
    h.chart.ensure_same(&a.chart)?;
    let n = h.dim();
    let c = (0..n)
        .map(|j| {
            let mut acc = Expr::zero();
            for i in 0..n {
                if !a.c[i].is_zero() && !h.get(i, j).is_zero() {
                    acc = acc + &(&a.c[i] * h.get(i, j));
                }
            }
            acc
        })
        .collect();
    Ok(VectorField::raw(&h.chart, c))
}

/// Contravariant Codazzi defect:
/// `T(i,j,k) = Σ_l (h_il ∂_l h_jk − h_jl ∂_l h_ik)`.
pub fn codazzi_tensor(h: &SymBivector) -> TrilinearForm {
    let ch = &h.chart;
    let n = h.dim();
    // dh[l][j][k] = ∂_l h_jk
    let dh: Vec<Matrix<Expr>> = (0..n).map(|l| h.m.map(|e| ch.d(e, l))).collect();
    TrilinearForm::from_fn(ch, |i, j, k| {
        let mut acc = Expr::zero();
        for (l, dl) in dh.iter().enumerate() {
            let a = h.get(i, l);
            if !a.is_zero() && !dl.get(j, k).is_zero() {
                acc = acc + &(a * dl.get(j, k));
            }
            let b = h.get(j, l);
            if !b.is_zero() && !dl.get(i, k).is_zero() {
                acc = acc - &(b * dl.get(i, k));
            }
        }
        acc
    })
}

pub fn is_kv(h: &SymBivector) -> bool {
    codazzi_tensor(h).is_zero()
}

/// The trilinear form `[h,h]` on coordinate forms, for the left-symmetric
/// algebroid `(TM, ∇, id)`:
///
/// `ρ(α^#)h(β,γ) − ρ(β^#)h(α,γ) + ⟨α, β^#•γ^#⟩ − ⟨β, α^#•γ^#⟩ − ⟨γ, [α^#,β^#]⟩`.
///
/// Expanding the five terms gives exactly `−T(i,j,k)` for the Codazzi defect
/// `T`, so both forms vanish together.
pub fn kv_bracket_form(h: &SymBivector) -> TrilinearForm {
    let ch = &h.chart;
    let n = h.dim();
    let sharps: Vec<VectorField> = (0..n)
        .map(|i| sharp(h, &OneForm::basis(ch, i)).expect("same chart"))
        .collect();
    TrilinearForm::from_fn(ch, |i, j, k| {
        let (a, b, g) = (&sharps[i], &sharps[j], &sharps[k]);
        let t1 = a.apply(h.get(j, k));
        let t2 = b.apply(h.get(i, k));
        let t3 = left_sym_product(b, g).expect("same chart").c[i].clone();
        let t4 = left_sym_product(a, g).expect("same chart").c[j].clone();
        let t5 = lie_bracket(a, b).expect("same chart").c[k].clone();
        &(&(&(&t1 - &t2) + &t3) - &t4) - &t5
    })
}

/// `(∇_X α)_j = X(α_j)`.
pub fn covariant_form(x: &VectorField, a: &OneForm) -> Result<OneForm> {
    x.chart.ensure_same(&a.chart)?;
    Ok(OneForm::raw(&a.chart, a.c.iter().map(|c| x.apply(c)).collect()))
}

/// `(∇_X h)(α, β) = Σ_ab X(h_ab) α_a β_b`.
pub fn covariant_h(h: &SymBivector, x: &VectorField, a: &OneForm, b: &OneForm) -> Result<Expr> {
    h.chart.ensure_same(&x.chart)?;
    let dh = SymBivector {
        chart: h.chart.clone(),
        m: h.m.map(|e| x.apply(e)),
    };
    dh.pair(a, b)
}

/// `[α, β]_h = ∇_{α^#} β − ∇_{β^#} α`.
pub fn bracket_h(h: &SymBivector, a: &OneForm, b: &OneForm) -> Result<OneForm> {
    let sa = sharp(h, a)?;
    let sb = sharp(h, b)?;
    covariant_form(&sa, b)?.sub(&covariant_form(&sb, a)?)
}

/// The contravariant connection: `⟨𝒟_α β, ∂_j⟩ = (∇_{∂_j} h)(α, β) + ⟨∇_{α^#} β, ∂_j⟩`.
pub fn contravariant_d(h: &SymBivector, a: &OneForm, b: &OneForm) -> Result<OneForm> {
    h.chart.ensure_same(&a.chart)?;
    h.chart.ensure_same(&b.chart)?;
    let ch = &h.chart;
    let n = h.dim();
    let tail = covariant_form(&sharp(h, a)?, b)?;
    let mut c = Vec::with_capacity(n);
    for j in 0..n {
        let e_j = VectorField::basis(ch, j);
        c.push(&covariant_h(h, &e_j, a, b)? + &tail.c[j]);
    }
    Ok(OneForm::raw(ch, c))
}

/// `X_f = (df)^#`.
pub fn hamiltonian(h: &SymBivector, f: &ScalarField) -> Result<VectorField> {
    h.chart.ensure_same(&f.chart)?;
    sharp(h, &OneForm::differential(f))
}

/// Lie derivative of a contravariant 2-tensor along `X`:
/// `(ℒ_X P)^{ij} = X(P^{ij}) − P^{kj} ∂_k X^i − P^{ik} ∂_k X^j`.
pub fn lie_derivative_tensor(chart: &Chart, x: &[Expr], p: &Matrix<Expr>) -> Matrix<Expr> {
    let n = chart.dim();
    let xf = VectorField::raw(chart, x.to_vec());
    // dx[k][i] = ∂_k X^i
    let dx: Vec<Vec<Expr>> = (0..n)
        .map(|k| x.iter().map(|xi| chart.d(xi, k)).collect())
        .collect();
    Matrix::from_fn(n, n, |i, j| {
        let mut acc = xf.apply(p.get(i, j));
        for (k, dk) in dx.iter().enumerate() {
            if !dk[i].is_zero() && !p.get(k, j).is_zero() {
                acc = acc - &(p.get(k, j) * &dk[i]);
            }
            if !dk[j].is_zero() && !p.get(i, k).is_zero() {
                acc = acc - &(p.get(i, k) * &dk[j]);
            }
        }
        acc
    })
}

/// `ℒ_{X_f} h`, computed from the coordinate formula for Lie derivatives.
pub fn lie_derivative_h(h: &SymBivector, f: &ScalarField) -> Result<SymBivector> {
    let xf = hamiltonian(h, f)?;
    let m = lie_derivative_tensor(&h.chart, &xf.c, &h.m);
    Ok(SymBivector {
        chart: h.chart.clone(),
        m,
    })
}

/// `⟨∇_{(dx_i)^#} df, (dx_j)^#⟩ = Σ_{l,k} h_il h_jk ∂_l ∂_k f`.
pub fn hessian_pairing(h: &SymBivector, f: &ScalarField) -> Result<Matrix<Expr>> {
    h.chart.ensure_same(&f.chart)?;
    let ch = &h.chart;
    let n = h.dim();
    let hess = Matrix::from_fn(n, n, |l, k| ch.d(&ch.d(&f.value, l), k));
    // H · Hess · H (H symmetric)
    Ok(h.m.mul(&hess).mul(&h.m))
}

/// Which coefficient the identity for `ℒ_{X_f} h` is tested with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LieIdentity {
    /// `ℒ_{X_f}h(α,β) = −∇_{X_f}h(α,β) + 2⟨∇_{α^#}df, β^#⟩`; residual
    /// `ℒ + ∇_{X_f}h − 2⟨·⟩`. Does not hold in general.
    AsStated,
    /// `ℒ_{X_f}h(α,β) = −∇_{X_f}h(α,β) − 2⟨∇_{α^#}df, β^#⟩`; residual
    /// `ℒ + ∇_{X_f}h + 2⟨·⟩`.
    Corrected,
}

/// Residual matrix of the chosen identity on coordinate forms.
pub fn lie_derivative_residual(
    h: &SymBivector,
    f: &ScalarField,
    form: LieIdentity,
) -> Result<Matrix<Expr>> {
    let lie = lie_derivative_h(h, f)?;
    let xf = hamiltonian(h, f)?;
    let nabla = h.m.map(|e| xf.apply(e));
    let pairing = hessian_pairing(h, f)?;
    let coeff = match form {
        LieIdentity::AsStated => Expr::int(-2),
        LieIdentity::Corrected => Expr::int(2),
    };
    let n = h.dim();
    Ok(Matrix::from_fn(n, n, |i, j| {
        &(lie.get(i, j) + nabla.get(i, j)) + &(&coeff * pairing.get(i, j))
    }))
}

/// Membership of `f` in ℰ: all entries of `hessian_pairing` vanish.
pub fn in_e(h: &SymBivector, f: &ScalarField) -> Result<bool> {
    Ok(hessian_pairing(h, f)?.is_zero())
}

/// Given `f₁, f₂ ∈ ℰ`, decides whether `h(df₁, df₂) ∈ ℰ`.
pub fn special_class_check(h: &SymBivector, f1: &ScalarField, f2: &ScalarField) -> Result<bool> {
    for (name, f) in [("first", f1), ("second", f2)] {
        if !in_e(h, f)? {
            return Err(GeometryError::PreconditionViolated(format!(
                "{name} function `{}` is not in E",
                f.value
            )));
        }
    }
    let g = h.pair(&OneForm::differential(f1), &OneForm::differential(f2))?;
    in_e(h, &ScalarField::new(&h.chart, g)?)
}

/// `(X•Y)_j = Σ_i X_i ∂_i Y_j`.
pub fn left_sym_product(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    x.chart.ensure_same(&y.chart)?;
    Ok(VectorField::raw(&x.chart, y.c.iter().map(|c| x.apply(c)).collect()))
}

/// `ass(X,Y,Z) = (X•Y)•Z − X•(Y•Z)`.
pub fn associator(x: &VectorField, y: &VectorField, z: &VectorField) -> Result<VectorField> {
    let xy = left_sym_product(x, y)?;
    let yz = left_sym_product(y, z)?;
    left_sym_product(&xy, z)?.sub(&left_sym_product(x, &yz)?)
}

/// `[X,Y]_j = X(Y_j) − Y(X_j)`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    left_sym_product(x, y)?.sub(&left_sym_product(y, x)?)
}

/// Rank of `h_#` at a point.
pub fn rank_at(h: &SymBivector, p: &Point) -> Result<usize> {
    Ok(h.eval_at(p)?.rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{int, parse_expr};

    fn e(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    fn plane() -> Chart {
        Chart::new("M", &["x", "y"]).unwrap()
    }

    fn biv(ch: &Chart, rows: &[&[&str]]) -> SymBivector {
        SymBivector::from_rows(ch, rows.iter().map(|r| r.iter().map(|s| e(s)).collect()).collect())
            .unwrap()
    }

    fn form(ch: &Chart, c: &[&str]) -> OneForm {
        OneForm::new(ch, c.iter().map(|s| e(s)).collect()).unwrap()
    }

    #[test]
    fn sharp_on_dual_algebra() {
        let ch = plane();
        let h = biv(&ch, &[&["x", "0"], &["0", "0"]]);
        assert_eq!(sharp(&h, &form(&ch, &["1", "0"])).unwrap().components(), &[e("x"), e("0")]);
        assert!(sharp(&h, &form(&ch, &["0", "1"])).unwrap().is_zero());
    }

    #[test]
    fn codazzi_examples() {
        let ch = plane();
        assert!(is_kv(&biv(&ch, &[&["x", "0"], &["0", "y"]])));
        let bad = biv(&ch, &[&["0", "x"], &["x", "0"]]);
        let t = codazzi_tensor(&bad);
        assert_eq!(t.get(0, 1, 1), &e("-x"));
        assert_eq!(t.first_nonzero().unwrap().0, (0, 1, 1));
        let b = kv_bracket_form(&bad);
        assert_eq!(b, t.neg());
    }

    #[test]
    fn bracket_and_connection() {
        let line = Chart::new("L", &["x"]).unwrap();
        let h = SymBivector::standard(&line);
        let r = bracket_h(&h, &form(&line, &["x"]), &form(&line, &["1"])).unwrap();
        assert_eq!(r.components(), &[e("-1")]);
        let ch = plane();
        let h = biv(&ch, &[&["x", "0"], &["0", "y"]]);
        let dx = form(&ch, &["1", "0"]);
        assert_eq!(contravariant_d(&h, &dx, &dx).unwrap().components(), &[e("1"), e("0")]);
    }

    #[test]
    fn lie_derivative_example() {
        let ch = plane();
        let h = biv(&ch, &[&["x", "0"], &["0", "y"]]);
        let f = ScalarField::new(&ch, e("x")).unwrap();
        assert_eq!(lie_derivative_h(&h, &f).unwrap().get(0, 0), &e("-x"));
        assert!(lie_derivative_residual(&h, &f, LieIdentity::Corrected).unwrap().is_zero());
        let f2 = ScalarField::new(&ch, e("x^2")).unwrap();
        assert_eq!(lie_derivative_h(&h, &f2).unwrap().get(0, 0), &e("-6*x^2"));
        assert!(lie_derivative_residual(&h, &f2, LieIdentity::Corrected).unwrap().is_zero());
        assert!(!lie_derivative_residual(&h, &f2, LieIdentity::AsStated).unwrap().is_zero());
    }

    #[test]
    fn e_space() {
        let ch = plane();
        let h = biv(&ch, &[&["x^2", "0"], &["0", "0"]]);
        let fx = ScalarField::new(&ch, e("x")).unwrap();
        let fxx = ScalarField::new(&ch, e("x^2")).unwrap();
        assert!(in_e(&h, &fx).unwrap());
        assert!(!in_e(&h, &fxx).unwrap());
        assert!(!special_class_check(&h, &fx, &fx).unwrap());
        assert!(matches!(
            special_class_check(&h, &fxx, &fx),
            Err(GeometryError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn ranks() {
        let ch = plane();
        let h = biv(&ch, &[&["x", "0"], &["0", "y"]]);
        assert_eq!(rank_at(&h, &ch.point_at(&[int(1), int(1)])).unwrap(), 2);
        assert_eq!(rank_at(&h, &ch.point_at(&[int(0), int(0)])).unwrap(), 0);
    }

    #[test]
    fn rejects_bad_input() {
        let ch = plane();
        let rows = vec![vec![e("0"), e("x")], vec![e("1"), e("0")]];
        assert_eq!(SymBivector::from_rows(&ch, rows), Err(GeometryError::Asymmetric(1, 2)));
        assert!(matches!(
            ScalarField::new(&ch, e("z")),
            Err(GeometryError::UnknownVariable { .. })
        ));
        assert!(Chart::new("bad", &["x", "x"]).is_err());
        let other = Chart::new("N", &["x", "y"]).unwrap();
        assert!(sharp(&SymBivector::zero(&ch), &OneForm::zero(&other)).is_err());
    }
}
