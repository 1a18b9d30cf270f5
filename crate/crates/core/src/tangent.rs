//! The tangent bundle of an affine chart: lifts, the Sasaki structures and
//! the skew bivector `Π` whose Jacobi identity is equivalent to the Codazzi
//! equation for `h`.
//!
//! Coordinates on `TM` are `(x_1..x_n, u_1..u_n)`. Because the Christoffel
//! symbols vanish, horizontal directions are the `∂_{x_i}` and vertical ones
//! the `∂_{u_i}`.

use std::collections::BTreeSet;

use crate::geometry::{
    hamiltonian, hessian_pairing, in_e, lie_derivative_tensor, Chart, GeometryError, OneForm,
    ScalarField, SymBivector, TrilinearForm, VectorField,
};
use crate::linalg::Matrix;
use crate::symexpr::Expr;

type Result<T> = std::result::Result<T, GeometryError>;

#[derive(Clone, Debug, PartialEq)]
pub struct TangentChart {
    base: Chart,
    total: Chart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lift {
    Horizontal,
    Vertical,
}

impl TangentChart {
    /// Fiber coordinates are named `u_<x>`, made unique against the base.
    pub fn new(base: &Chart) -> TangentChart {
        let mut taken: BTreeSet<String> =
            base.coords().iter().map(|v| v.as_str().to_string()).collect();
        let mut names: Vec<String> = base.coords().iter().map(|v| v.to_string()).collect();
        for v in base.coords() {
            let mut cand = format!("u_{v}");
            while taken.contains(&cand) {
                cand.push('_');
            }
            taken.insert(cand.clone());
            names.push(cand);
        }
        let total = Chart::build(&format!("T{}", base.name()), &names).expect("distinct names");
        TangentChart {
            base: base.clone(),
            total,
        }
    }

    pub fn base(&self) -> &Chart {
        &self.base
    }

    pub fn total(&self) -> &Chart {
        &self.total
    }

    pub fn n(&self) -> usize {
        self.base.dim()
    }

    pub fn lift_vector(&self, x: &VectorField, mode: Lift) -> Result<VectorField> {
        self.base.ensure_same(x.chart())?;
        Ok(VectorField::raw(&self.total, self.stack(x.components(), mode)))
    }

    pub fn lift_form(&self, a: &OneForm, mode: Lift) -> Result<OneForm> {
        self.base.ensure_same(a.chart())?;
        Ok(OneForm::raw(&self.total, self.stack(a.components(), mode)))
    }

    fn stack(&self, c: &[Expr], mode: Lift) -> Vec<Expr> {
        let zeros = vec![Expr::zero(); self.n()];
        match mode {
            Lift::Horizontal => c.iter().cloned().chain(zeros).collect(),
            Lift::Vertical => zeros.into_iter().chain(c.iter().cloned()).collect(),
        }
    }

    /// Function on `TM` pulled back along the projection.
    pub fn pull_function(&self, f: &ScalarField) -> Result<ScalarField> {
        self.base.ensure_same(f.chart())?;
        ScalarField::new(&self.total, f.value().clone())
    }

    /// `J(X^h) = X^v`, `J(X^v) = −X^h`; on components `J(a, b) = (−b, a)`.
    pub fn sasaki_j(&self, v: &VectorField) -> Result<VectorField> {
        self.total.ensure_same(v.chart())?;
        let n = self.n();
        let c = v.components();
        let out = c[n..].iter().map(|e| -e).chain(c[..n].iter().cloned()).collect();
        Ok(VectorField::raw(&self.total, out))
    }

    /// The Sasaki connection. `V` is expanded in the frame of lifted
    /// coordinate fields `(∂_{x_i})^h, (∂_{x_i})^v`; each frame element is
    /// `∇̄`-parallel by the four defining cases (they are lifts of the
    /// `∇`-parallel `∂_{x_i}`), so Leibniz leaves only `W(V_b)`.
    pub fn sasaki_nabla(&self, w: &VectorField, v: &VectorField) -> Result<VectorField> {
        self.total.ensure_same(w.chart())?;
        self.total.ensure_same(v.chart())?;
        let out = v.components().iter().map(|c| w.apply(c)).collect();
        Ok(VectorField::raw(&self.total, out))
    }
}

/// A skew-symmetric bivector on a chart.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewBivector {
    chart: Chart,
    m: Matrix<Expr>,
}

impl SkewBivector {
    pub fn new(chart: &Chart, m: Matrix<Expr>) -> Result<Self> {
        let n = chart.dim();
        if m.rows() != n || m.cols() != n {
            return Err(GeometryError::Shape(format!("skew bivector needs a {n}x{n} matrix")));
        }
        for i in 0..n {
            for j in 0..=i {
                chart.check_expr(m.get(i, j))?;
                if *m.get(i, j) != -m.get(j, i) {
                    return Err(GeometryError::Asymmetric(j + 1, i + 1));
                }
            }
        }
        Ok(SkewBivector {
            chart: chart.clone(),
            m,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn matrix(&self) -> &Matrix<Expr> {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        self.m.get(i, j)
    }

    /// `(Π_# α)_b = Σ_a α_a Π_ab`.
    pub fn sharp(&self, a: &OneForm) -> Result<VectorField> {
        self.chart.ensure_same(a.chart())?;
        let n = self.chart.dim();
        let c = (0..n)
            .map(|b| (0..n).map(|i| &a.components()[i] * self.get(i, b)).sum())
            .collect();
        Ok(VectorField::raw(&self.chart, c))
    }
}

/// `Π(dx_i, du_j) = h_ij`, base-base and fiber-fiber blocks zero.
pub fn build_pi(tc: &TangentChart, h: &SymBivector) -> Result<SkewBivector> {
    tc.base.ensure_same(h.chart())?;
    let n = tc.n();
    let m = Matrix::from_fn(2 * n, 2 * n, |a, b| match (a < n, b < n) {
        (true, false) => h.get(a, b - n).clone(),
        (false, true) => -h.get(a - n, b),
        _ => Expr::zero(),
    });
    Ok(SkewBivector {
        chart: tc.total.clone(),
        m,
    })
}

/// Jacobiator `J(i,j,k) = Σ_l (Π_li ∂_l Π_jk + Π_lj ∂_l Π_ki + Π_lk ∂_l Π_ij)`.
pub fn schouten_jacobi(p: &SkewBivector) -> TrilinearForm {
    let ch = &p.chart;
    let n = ch.dim();
    let dp: Vec<Matrix<Expr>> = (0..n).map(|l| p.m.map(|e| ch.d(e, l))).collect();
    TrilinearForm::from_fn(ch, |i, j, k| {
        let mut acc = Expr::zero();
        for (l, dl) in dp.iter().enumerate() {
            for (a, (b, c)) in [(i, (j, k)), (j, (k, i)), (k, (i, j))] {
                let pa = p.get(l, a);
                let d = dl.get(b, c);
                if !pa.is_zero() && !d.is_zero() {
                    acc = acc + &(pa * d);
                }
            }
        }
        acc
    })
}

/// Lie derivative of a bivector along a vector field on the same chart.
pub fn lie_derivative_bivector(x: &VectorField, p: &SkewBivector) -> Result<Matrix<Expr>> {
    p.chart.ensure_same(x.chart())?;
    Ok(lie_derivative_tensor(&p.chart, x.components(), &p.m))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftReport {
    /// `X_f^v = Π_#(d(f∘p))`.
    pub vertical_is_hamiltonian: bool,
    /// `ℒ_{X_f^h} Π` on the total chart.
    pub lie_pi: Matrix<Expr>,
    pub lie_vanishes: bool,
    pub in_e: bool,
    /// The `(du_i, dx_j)` block equals `⟨∇_{(dx_i)^#} df, (dx_j)^#⟩` and the
    /// remaining blocks vanish.
    pub block_formula_holds: bool,
}

impl LiftReport {
    pub fn consistent(&self) -> bool {
        self.vertical_is_hamiltonian && self.block_formula_holds && self.lie_vanishes == self.in_e
    }
}

pub fn lift_propositions_check(h: &SymBivector, f: &ScalarField) -> Result<LiftReport> {
    let tc = TangentChart::new(h.chart());
    let pi = build_pi(&tc, h)?;
    let xf = hamiltonian(h, f)?;
    let fp = tc.pull_function(f)?;
    let lhs = tc.lift_vector(&xf, Lift::Vertical)?;
    let rhs = pi.sharp(&OneForm::differential(&fp))?;
    let vertical_is_hamiltonian = lhs == rhs;

    let xh = tc.lift_vector(&xf, Lift::Horizontal)?;
    let lie_pi = lie_derivative_bivector(&xh, &pi)?;
    let pairing = hessian_pairing(h, f)?;
    let n = tc.n();
    let mut block_formula_holds = true;
    for a in 0..2 * n {
        for b in 0..2 * n {
            let expected = match (a >= n, b < n) {
                (true, true) => pairing.get(a - n, b).clone(),
                _ if a < n && b >= n => -pairing.get(b - n, a),
                _ => Expr::zero(),
            };
            if *lie_pi.get(a, b) != expected {
                block_formula_holds = false;
            }
        }
    }
    Ok(LiftReport {
        vertical_is_hamiltonian,
        lie_vanishes: lie_pi.is_zero(),
        in_e: in_e(h, f)?,
        lie_pi,
        block_formula_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{codazzi_tensor, lie_bracket, left_sym_product};
    use crate::symexpr::parse_expr;

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

    fn field(ch: &Chart, c: &[&str]) -> VectorField {
        VectorField::new(ch, c.iter().map(|s| e(s)).collect()).unwrap()
    }

    #[test]
    fn fiber_names() {
        let ch = Chart::new("M", &["x", "u_x"]).unwrap();
        let tc = TangentChart::new(&ch);
        let names: Vec<String> = tc.total().coords().iter().map(|v| v.to_string()).collect();
        assert_eq!(names, ["x", "u_x", "u_x_", "u_u_x"]);
    }

    #[test]
    fn bracket_table_of_lifts() {
        let ch = plane();
        let tc = TangentChart::new(&ch);
        let x = field(&ch, &["x*y", "y^2 + 1"]);
        let y = field(&ch, &["x - y", "x^2"]);
        let (h, v) = (Lift::Horizontal, Lift::Vertical);
        let lb = |a: &VectorField, b: &VectorField| lie_bracket(a, b).unwrap();
        let l = |f: &VectorField, m| tc.lift_vector(f, m).unwrap();
        assert_eq!(lb(&l(&x, h), &l(&y, h)), l(&lb(&x, &y), h));
        assert_eq!(lb(&l(&x, h), &l(&y, v)), l(&left_sym_product(&x, &y).unwrap(), v));
        assert!(lb(&l(&x, v), &l(&y, v)).is_zero());
    }

    #[test]
    fn sasaki_structure() {
        let ch = plane();
        let tc = TangentChart::new(&ch);
        let w = field(tc.total(), &["x", "u_y", "y*u_x", "1"]);
        let jj = tc.sasaki_j(&tc.sasaki_j(&w).unwrap()).unwrap();
        assert_eq!(jj, w.neg());
        let a = tc.lift_vector(&field(&ch, &["x^2", "y"]), Lift::Horizontal).unwrap();
        let b = tc.lift_vector(&field(&ch, &["y", "x*y"]), Lift::Vertical).unwrap();
        let jb = tc.sasaki_j(&b).unwrap();
        assert_eq!(tc.sasaki_nabla(&a, &jb).unwrap(), tc.sasaki_j(&tc.sasaki_nabla(&a, &b).unwrap()).unwrap());
        // torsion-free on lifted generators
        let tor = tc
            .sasaki_nabla(&a, &b)
            .unwrap()
            .sub(&tc.sasaki_nabla(&b, &a).unwrap())
            .unwrap()
            .sub(&lie_bracket(&a, &b).unwrap())
            .unwrap();
        assert!(tor.is_zero());
    }

    #[test]
    fn poisson_iff_kv() {
        let ch = plane();
        let tc = TangentChart::new(&ch);
        let kv = biv(&ch, &[&["x", "0"], &["0", "y"]]);
        assert!(schouten_jacobi(&build_pi(&tc, &kv).unwrap()).is_zero());
        let bad = biv(&ch, &[&["0", "x"], &["x", "0"]]);
        assert!(!codazzi_tensor(&bad).is_zero());
        assert!(!schouten_jacobi(&build_pi(&tc, &bad).unwrap()).is_zero());
        let line = Chart::new("L", &["x"]).unwrap();
        let tl = TangentChart::new(&line);
        let pi = build_pi(&tl, &biv(&line, &[&["x"]])).unwrap();
        assert_eq!(pi.get(0, 1), &e("x"));
        assert_eq!(pi.get(1, 0), &e("-x"));
    }

    #[test]
    fn lift_propositions() {
        let ch = plane();
        let h = biv(&ch, &[&["x", "0"], &["0", "y"]]);
        let r = lift_propositions_check(&h, &ScalarField::new(&ch, e("y^3 - y")).unwrap()).unwrap();
        assert!(r.consistent());
        let h2 = biv(&ch, &[&["x^2", "0"], &["0", "0"]]);
        let r = lift_propositions_check(&h2, &ScalarField::new(&ch, e("x^2")).unwrap()).unwrap();
        assert!(r.consistent() && !r.lie_vanishes && !r.in_e);
    }
}
