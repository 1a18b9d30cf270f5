//! Numeric cross-check of the symbolic residuals.
//!
//! Every routine here evaluates input data (bivector entries, functions) on
//! Taylor jets at a single rational point and assembles the residual from
//! the resulting values and partial derivatives. Nothing goes through
//! symbolic differentiation or the canonical zero test, so agreement with the
//! symbolic pipeline at sample points is independent evidence.

use num_traits::Zero;

use crate::geometry::{Chart, LieIdentity, ScalarField, SymBivector, TrilinearForm};
use crate::linalg::Matrix;
use crate::structures::{AdaptedFrame, AffineMap};
use crate::symexpr::{Expr, Jet, JetSpace, Rational, SymError};

type R<T> = std::result::Result<T, SymError>;

/// Coordinate jets of `chart` at `point`.
pub fn coordinate_jets(point: &[Rational], order: u32) -> Vec<Jet> {
    let space = JetSpace::get(point.len(), order);
    point
        .iter()
        .enumerate()
        .map(|(i, v)| Jet::variable(&space, i, v.clone()))
        .collect()
}

pub fn expr_jet(e: &Expr, chart: &Chart, jets: &[Jet]) -> R<Jet> {
    e.eval_generic(&|v| chart.index_of(v).map(|i| jets[i].clone()))
}

/// Values and first partials of a bivector: `(H, dH)` with `dH[l] = ∂_l H`.
struct BivectorData {
    h: Vec<Vec<Rational>>,
    d: Vec<Vec<Vec<Rational>>>,
}

fn bivector_data(h: &SymBivector, point: &[Rational]) -> R<BivectorData> {
    let n = h.dim();
    let jets = coordinate_jets(point, 1);
    let mut hv = vec![vec![Rational::zero(); n]; n];
    let mut d = vec![vec![vec![Rational::zero(); n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            let jt = expr_jet(h.get(i, j), h.chart(), &jets)?;
            hv[i][j] = jt.value().clone();
            for (l, dl) in d.iter_mut().enumerate() {
                dl[i][j] = jt.partial(&[l]);
            }
        }
    }
    Ok(BivectorData { h: hv, d })
}

/// Value, gradient and Hessian of a function.
fn function_data(f: &ScalarField, point: &[Rational]) -> R<(Rational, Vec<Rational>, Vec<Vec<Rational>>)> {
    let n = point.len();
    let jt = expr_jet(f.value(), f.chart(), &coordinate_jets(point, 3))?;
    let grad = (0..n).map(|i| jt.partial(&[i])).collect();
    let hess = (0..n)
        .map(|i| (0..n).map(|j| jt.partial(&[i, j])).collect())
        .collect();
    Ok((jt.value().clone(), grad, hess))
}

fn flatten3(n: usize, f: impl Fn(usize, usize, usize) -> Rational) -> Vec<Rational> {
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out.push(f(i, j, k));
            }
        }
    }
    out
}

fn sum(n: usize, f: impl Fn(usize) -> Rational) -> Rational {
    (0..n).fold(Rational::zero(), |acc, l| acc + f(l))
}

/// Codazzi defect `Σ_l h_il ∂_l h_jk − h_jl ∂_l h_ik`, flattened in `(i,j,k)` order.
pub fn codazzi_at(h: &SymBivector, point: &[Rational]) -> R<Vec<Rational>> {
    let n = h.dim();
    let b = bivector_data(h, point)?;
    Ok(flatten3(n, |i, j, k| {
        sum(n, |l| &b.h[i][l] * &b.d[l][j][k] - &b.h[j][l] * &b.d[l][i][k])
    }))
}

/// The five-term trilinear form on coordinate coforms, term by term.
pub fn kv_bracket_at(h: &SymBivector, point: &[Rational]) -> R<Vec<Rational>> {
    let n = h.dim();
    let b = bivector_data(h, point)?;
    // directional derivative of h_{pq} along (dx_a)^#
    let along = |a: usize, p: usize, q: usize| sum(n, |l| &b.h[a][l] * &b.d[l][p][q]);
    Ok(flatten3(n, |i, j, k| {
        let t1 = along(i, j, k);
        let t2 = along(j, i, k);
        let t3 = along(j, k, i);
        let t4 = along(i, k, j);
        let t5 = along(i, j, k) - along(j, i, k);
        t1 - t2 + t3 - t4 - t5
    }))
}

/// Jacobiator of the tangent bivector `Π` built from `h`, at a point of `TM`
/// whose first `n` coordinates are the base point.
pub fn jacobi_tangent_at(h: &SymBivector, total_point: &[Rational]) -> R<Vec<Rational>> {
    let n = h.dim();
    let b = bivector_data(h, &total_point[..n])?;
    let pi = |a: usize, c: usize| -> Rational {
        match (a < n, c < n) {
            (true, false) => b.h[a][c - n].clone(),
            (false, true) => -b.h[a - n][c].clone(),
            _ => Rational::zero(),
        }
    };
    // only base derivatives are nonzero
    let dpi = |l: usize, a: usize, c: usize| -> Rational {
        match (a < n, c < n) {
            (true, false) => b.d[l][a][c - n].clone(),
            (false, true) => -b.d[l][a - n][c].clone(),
            _ => Rational::zero(),
        }
    };
    Ok(flatten3(2 * n, |i, j, k| {
        sum(n, |l| {
            pi(l, i) * dpi(l, j, k) + pi(l, j) * dpi(l, k, i) + pi(l, k) * dpi(l, i, j)
        })
    }))
}

/// `Σ_{l,k} h_il h_jk ∂_l∂_k f`.
pub fn hessian_pairing_at(h: &SymBivector, f: &ScalarField, point: &[Rational]) -> R<Matrix<Rational>> {
    let n = h.dim();
    let b = bivector_data(h, point)?;
    let (_, _, hess) = function_data(f, point)?;
    Ok(Matrix::from_fn(n, n, |i, j| {
        sum(n, |l| sum(n, |k| &b.h[i][l] * &b.h[j][k] * &hess[l][k]))
    }))
}

/// Components of `X_f` and their first partials `dx[k][i] = ∂_k X^i`.
fn hamiltonian_data(b: &BivectorData, grad: &[Rational], hess: &[Vec<Rational>]) -> (Vec<Rational>, Vec<Vec<Rational>>) {
    let n = grad.len();
    let x = (0..n).map(|i| sum(n, |j| &b.h[i][j] * &grad[j])).collect();
    let dx = (0..n)
        .map(|k| {
            (0..n)
                .map(|i| sum(n, |j| &b.d[k][i][j] * &grad[j] + &b.h[i][j] * &hess[k][j]))
                .collect()
        })
        .collect();
    (x, dx)
}

/// `ℒ_{X_f}h + ∇_{X_f}h ∓ 2⟨∇_{α^#}df, β^#⟩` on coordinate coforms.
pub fn lie_residual_at(
    h: &SymBivector,
    f: &ScalarField,
    form: LieIdentity,
    point: &[Rational],
) -> R<Matrix<Rational>> {
    let n = h.dim();
    let b = bivector_data(h, point)?;
    let (_, grad, hess) = function_data(f, point)?;
    let (x, dx) = hamiltonian_data(&b, &grad, &hess);
    let pairing = hessian_pairing_at(h, f, point)?;
    let coeff = match form {
        LieIdentity::AsStated => Rational::from_integer((-2).into()),
        LieIdentity::Corrected => Rational::from_integer(2.into()),
    };
    Ok(Matrix::from_fn(n, n, |i, j| {
        let xh = sum(n, |l| &x[l] * &b.d[l][i][j]);
        let lie = &xh - sum(n, |k| &b.h[k][j] * &dx[k][i] + &b.h[i][k] * &dx[k][j]);
        lie + xh + &coeff * pairing.get(i, j)
    }))
}

/// `ℒ_{X_f^h} Π` at a point of `TM`.
pub fn lift_lie_pi_at(h: &SymBivector, f: &ScalarField, total_point: &[Rational]) -> R<Matrix<Rational>> {
    let n = h.dim();
    let base = &total_point[..n];
    let b = bivector_data(h, base)?;
    let (_, grad, hess) = function_data(f, base)?;
    let (x, dx) = hamiltonian_data(&b, &grad, &hess);
    let pi = |a: usize, c: usize| -> Rational {
        match (a < n, c < n) {
            (true, false) => b.h[a][c - n].clone(),
            (false, true) => -b.h[a - n][c].clone(),
            _ => Rational::zero(),
        }
    };
    let dpi = |l: usize, a: usize, c: usize| -> Rational {
        match (a < n, c < n) {
            (true, false) => b.d[l][a][c - n].clone(),
            (false, true) => -b.d[l][a - n][c].clone(),
            _ => Rational::zero(),
        }
    };
    // X^h = (X, 0); ∂_k X^a vanishes unless both indices are base indices.
    let dxh = |k: usize, a: usize| -> Rational {
        if k < n && a < n {
            dx[k][a].clone()
        } else {
            Rational::zero()
        }
    };
    let m = 2 * n;
    Ok(Matrix::from_fn(m, m, |a, c| {
        let mut v = sum(n, |l| &x[l] * dpi(l, a, c));
        for k in 0..m {
            v -= pi(k, c) * dxh(k, a) + pi(a, k) * dxh(k, c);
        }
        v
    }))
}

/// `M H¹(x) Mᵀ − H²(F(x))`.
pub fn kv_map_residual_at(f: &AffineMap, h1: &SymBivector, h2: &SymBivector, point: &[Rational]) -> R<Matrix<Rational>> {
    let hv1 = h1.eval_at(&h1.chart().point_at(point))?;
    let y = f.apply_point(point);
    let hv2 = h2.eval_at(&h2.chart().point_at(&y))?;
    Ok(f.matrix().mul(&hv1).mul(&f.matrix().transpose()).sub(&hv2))
}

/// `h̃ = A H Aᵀ` at the point of `N` with tangent coordinates `t`.
pub fn adapted_at(frame: &AdaptedFrame, h: &SymBivector, t: &[Rational]) -> R<Matrix<Rational>> {
    frame.adapted_at(h, &frame.ambient_point(t))
}

/// `Γ^c_ab = ∂_{y_c} h̃_ab` on `N`, from jets in the adapted coordinates;
/// flattened in `(a,b,c)` order over conormal indices.
pub fn conormal_gamma_at(frame: &AdaptedFrame, h: &SymBivector, t: &[Rational]) -> R<Vec<Rational>> {
    let (k, n) = (frame.k(), frame.n());
    let r = n - k;
    let mut y = t.to_vec();
    y.resize(n, Rational::zero());
    let yj = coordinate_jets(&y, 1);
    let sub = frame.submanifold();
    let p = frame.change();
    let xj: Vec<Jet> = (0..n)
        .map(|i| {
            let mut acc = Jet::constant(sub.origin()[i].clone());
            for (j, yjj) in yj.iter().enumerate() {
                let c = p.get(i, j);
                if !c.is_zero() {
                    acc = crate::symexpr::Scalar::add(
                        &acc,
                        &crate::symexpr::Scalar::mul(yjj, &Jet::constant(c.clone())),
                    );
                }
            }
            acc
        })
        .collect();
    let mut hj = vec![vec![Jet::constant(Rational::zero()); n]; n];
    for i in 0..n {
        for j in 0..n {
            hj[i][j] = expr_jet(h.get(i, j), h.chart(), &xj)?;
        }
    }
    let a = frame.inverse_change();
    // ∂_{y_c} of (A H Aᵀ)_{ab}
    Ok(flatten3(r, |aa, bb, cc| {
        let (ia, ib, ic) = (k + aa, k + bb, k + cc);
        let mut s = Rational::zero();
        for i in 0..n {
            for j in 0..n {
                let w = a.get(ia, i) * a.get(ib, j);
                if !w.is_zero() {
                    s += w * hj[i][j].partial(&[ic]);
                }
            }
        }
        s
    }))
}

/// Outcome of comparing the symbolic residual with the oracle at sample points.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleComparison {
    pub points: usize,
    pub evaluated: usize,
    pub disagreement: Option<Vec<Rational>>,
    /// First evaluated point where the oracle residual is nonzero.
    pub nonzero_at: Option<(Vec<Rational>, Vec<Rational>)>,
}

impl OracleComparison {
    pub fn agrees(&self) -> bool {
        self.disagreement.is_none()
    }
}

/// Evaluates both routes at every point; points where either side hits a
/// pole are skipped.
pub fn compare<S, O>(points: &[Vec<Rational>], symbolic: S, oracle: O) -> R<OracleComparison>
where
    S: Fn(&[Rational]) -> R<Vec<Rational>>,
    O: Fn(&[Rational]) -> R<Vec<Rational>>,
{
    let mut out = OracleComparison {
        points: points.len(),
        evaluated: 0,
        disagreement: None,
        nonzero_at: None,
    };
    for p in points {
        let (s, o) = match (symbolic(p), oracle(p)) {
            (Ok(s), Ok(o)) => (s, o),
            (Err(SymError::PoleAtPoint), _) | (_, Err(SymError::PoleAtPoint)) => continue,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        out.evaluated += 1;
        if out.nonzero_at.is_none() && o.iter().any(|v| !v.is_zero()) {
            out.nonzero_at = Some((p.clone(), o.clone()));
        }
        if s != o && out.disagreement.is_none() {
            out.disagreement = Some(p.clone());
        }
    }
    Ok(out)
}

/// Entries of a symbolic matrix at a point, row-major.
pub fn eval_matrix(m: &Matrix<Expr>, chart: &Chart, point: &[Rational]) -> R<Vec<Rational>> {
    let pt = chart.point_at(point);
    let mut out = Vec::with_capacity(m.rows() * m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.push(m.get(i, j).eval_at(&pt)?);
        }
    }
    Ok(out)
}

/// Values of a symbolic trilinear form at a point, in `(i, j, k)` order.
pub fn eval_trilinear(t: &TrilinearForm, point: &[Rational]) -> R<Vec<Rational>> {
    let pt = t.chart().point_at(point);
    t.iter().map(|(_, e)| e.eval_at(&pt)).collect()
}

pub fn flatten_matrix(m: &Matrix<Rational>) -> Vec<Rational> {
    m.to_rows().into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{codazzi_tensor, hessian_pairing, kv_bracket_form, lie_derivative_residual};
    use crate::sampling::Sampler;
    use crate::symexpr::parse_expr;
    use crate::tangent::{build_pi, lift_propositions_check, schouten_jacobi, TangentChart};

    fn sample() -> (SymBivector, ScalarField) {
        let ch = Chart::new("M", &["x", "y"]).unwrap();
        let rows = [["x^2 + y", "x*y"], ["x*y", "1 - y^3"]];
        let h = SymBivector::from_rows(
            &ch,
            rows.iter().map(|r| r.iter().map(|s| parse_expr(s).unwrap()).collect()).collect(),
        )
        .unwrap();
        let f = ScalarField::new(&ch, parse_expr("x^3 - x*y^2 + 2*y").unwrap()).unwrap();
        (h, f)
    }

    fn trilinear_values(t: &TrilinearForm, _ch: &Chart, p: &[Rational]) -> Vec<Rational> {
        eval_trilinear(t, p).unwrap()
    }

    #[test]
    fn oracle_matches_symbolic_routes() {
        let (h, f) = sample();
        let ch = h.chart().clone();
        let pts = Sampler::new(3, 5).points(2);
        let cod = codazzi_tensor(&h);
        let c = compare(&pts, |p| Ok(trilinear_values(&cod, &ch, p)), |p| codazzi_at(&h, p)).unwrap();
        assert!(c.agrees() && c.evaluated == 5 && c.nonzero_at.is_some());
        let br = kv_bracket_form(&h);
        assert!(compare(&pts, |p| Ok(trilinear_values(&br, &ch, p)), |p| kv_bracket_at(&h, p)).unwrap().agrees());
        let hp = hessian_pairing(&h, &f).unwrap();
        assert!(compare(&pts, |p| eval_matrix(&hp, &ch, p), |p| Ok(flatten_matrix(&hessian_pairing_at(&h, &f, p)?))).unwrap().agrees());
        for form in [LieIdentity::AsStated, LieIdentity::Corrected] {
            let r = lie_derivative_residual(&h, &f, form).unwrap();
            assert!(compare(&pts, |p| eval_matrix(&r, &ch, p), |p| Ok(flatten_matrix(&lie_residual_at(&h, &f, form, p)?))).unwrap().agrees());
        }
    }

    #[test]
    fn oracle_on_tangent_bundle() {
        let (h, f) = sample();
        let tc = TangentChart::new(h.chart());
        let pts = Sampler::new(4, 4).points(4);
        let jac = schouten_jacobi(&build_pi(&tc, &h).unwrap());
        let c = compare(&pts, |p| Ok(trilinear_values(&jac, tc.total(), p)), |p| jacobi_tangent_at(&h, p)).unwrap();
        assert!(c.agrees());
        let lie = lift_propositions_check(&h, &f).unwrap().lie_pi;
        let c = compare(&pts, |p| eval_matrix(&lie, tc.total(), p), |p| Ok(flatten_matrix(&lift_lie_pi_at(&h, &f, p)?))).unwrap();
        assert!(c.agrees());
    }
}
