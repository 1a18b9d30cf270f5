use num_traits::Zero;

use super::submanifold::{adapted_frame, is_coisotropic, AdaptedFrame, AffineSubmanifold, Labeled};
use super::{Result, StructureError};
use crate::geometry::SymBivector;
use crate::linalg::Matrix;
use crate::symexpr::{Expr, Rational};

/// `(TN°, •, ρ)` in adapted coordinates. Conormal indices below are local:
/// `a` stands for the form `dy_{k+a}`.
#[derive(Clone, Debug)]
pub struct ConormalAlgebroid {
    frame: AdaptedFrame,
    /// `gamma[a][b][c]`: `dy_a • dy_b = Σ_c gamma[a][b][c] dy_c`, functions on `N`.
    gamma: Vec<Vec<Vec<Expr>>>,
    /// `anchor[a][t]`: `ρ(dy_a) = Σ_t anchor[a][t] ∂_{y_t}`.
    anchor: Vec<Vec<Expr>>,
    /// `ass(α,β,γ) − ass(β,α,γ)` on basis sections; all zero for an algebroid.
    pub left_symmetry_residuals: Vec<Labeled>,
}

/// The product induced on `ker ρ_x`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberAlgebra {
    /// Tangent coordinates of `x`.
    pub point: Vec<Rational>,
    /// Basis of `ker ρ_x` in conormal coordinates.
    pub kernel: Vec<Vec<Rational>>,
    /// `products[i][j]` = product of kernel basis vectors, in conormal coordinates.
    pub products: Vec<Vec<Vec<Rational>>>,
    pub closed: bool,
    pub commutative: bool,
    pub associative: bool,
}

impl FiberAlgebra {
    pub fn holds(&self) -> bool {
        self.closed && self.commutative && self.associative
    }
}

pub fn conormal_algebroid(sub: &AffineSubmanifold, h: &SymBivector) -> Result<ConormalAlgebroid> {
    if !is_coisotropic(sub, h)?.holds {
        return Err(StructureError::NotCoisotropic(sub.name().to_string()));
    }
    let fr = adapted_frame(sub)?;
    let ht = fr.to_adapted(h)?;
    let (k, n) = (fr.k(), fr.n());
    let r = n - k;
    let y = fr.adapted_vars().to_vec();

    let mut gamma = vec![vec![vec![Expr::zero(); r]; r]; r];
    for a in 0..r {
        for b in 0..r {
            let hab = ht.get(k + a, k + b);
            for yt in &y[..k] {
                // Tangent components of dy_a • dy_b.
                if !fr.on_n(&hab.derivative(yt))?.is_zero() {
                    return Err(StructureError::ClosureFailure(sub.name().to_string()));
                }
            }
            for c in 0..r {
                gamma[a][b][c] = fr.on_n(&hab.derivative(&y[k + c]))?;
            }
        }
    }
    let anchor = (0..r)
        .map(|a| (0..k).map(|t| fr.on_n(ht.get(k + a, t))).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;

    let mut alg = ConormalAlgebroid {
        frame: fr,
        gamma,
        anchor,
        left_symmetry_residuals: Vec::new(),
    };
    alg.left_symmetry_residuals = alg.compute_left_symmetry();
    Ok(alg)
}

impl ConormalAlgebroid {
    pub fn frame(&self) -> &AdaptedFrame {
        &self.frame
    }

    pub fn rank(&self) -> usize {
        self.gamma.len()
    }

    pub fn gamma(&self, a: usize, b: usize, c: usize) -> &Expr {
        &self.gamma[a][b][c]
    }

    pub fn anchor(&self, a: usize, t: usize) -> &Expr {
        &self.anchor[a][t]
    }

    pub fn anchor_is_zero(&self) -> bool {
        self.anchor.iter().flatten().all(Expr::is_zero)
    }

    pub fn is_left_symmetric(&self) -> bool {
        self.left_symmetry_residuals.iter().all(|(_, e)| e.is_zero())
    }

    /// `ρ(dy_a)(f)` for a function on `N`.
    fn anchor_apply(&self, a: usize, f: &Expr) -> Expr {
        let y = self.frame.adapted_vars();
        self.anchor[a]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(t, c)| c * &f.derivative(&y[t]))
            .sum()
    }

    /// Coefficients of `(e_a • e_b) • e_c − e_a • (e_b • e_c)`.
    fn associator(&self, a: usize, b: usize, c: usize) -> Vec<Expr> {
        let r = self.rank();
        let g = &self.gamma;
        (0..r)
            .map(|f| {
                let mut s = Expr::zero();
                for d in 0..r {
                    s = s + &(&g[a][b][d] * &g[d][c][f]);
                    s = s - &(&g[b][c][d] * &g[a][d][f]);
                }
                s - &self.anchor_apply(a, &g[b][c][f])
            })
            .collect()
    }

    fn compute_left_symmetry(&self) -> Vec<Labeled> {
        let r = self.rank();
        let k = self.frame.k();
        let mut out = Vec::new();
        for a in 0..r {
            for b in a + 1..r {
                for c in 0..r {
                    let (p, q) = (self.associator(a, b, c), self.associator(b, a, c));
                    for (f, (x, y)) in p.iter().zip(&q).enumerate() {
                        out.push((
                            format!("({},{},{})[{}]", a + k + 1, b + k + 1, c + k + 1, f + k + 1),
                            x - y,
                        ));
                    }
                }
            }
        }
        out
    }

    /// The algebra `ker ρ_x` at the point of `N` with tangent coordinates `t`.
    pub fn fiber_algebra(&self, t: &[Rational]) -> Result<FiberAlgebra> {
        let r = self.rank();
        let k = self.frame.k();
        let pt = self.frame.tangent_point(t);
        let mut rho = Matrix::from_fn(k, r, |_, _| Rational::zero());
        for a in 0..r {
            for s in 0..k {
                rho.set(s, a, self.anchor[a][s].eval_at(&pt)?);
            }
        }
        let kernel = if k == 0 {
            Matrix::<Rational>::identity(r).to_rows()
        } else {
            rho.nullspace()
        };
        let mut table = vec![vec![vec![Rational::zero(); r]; r]; r];
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    table[a][b][c] = self.gamma[a][b][c].eval_at(&pt)?;
                }
            }
        }
        let mul = |u: &[Rational], v: &[Rational]| -> Vec<Rational> {
            let mut w = vec![Rational::zero(); r];
            for a in 0..r {
                if u[a].is_zero() {
                    continue;
                }
                for b in 0..r {
                    if v[b].is_zero() {
                        continue;
                    }
                    let uv = &u[a] * &v[b];
                    for (c, wc) in w.iter_mut().enumerate() {
                        *wc += &uv * &table[a][b][c];
                    }
                }
            }
            w
        };
        let in_kernel = |w: &[Rational]| k == 0 || rho.mul_vec(w).iter().all(Zero::is_zero);
        let m = kernel.len();
        let products: Vec<Vec<Vec<Rational>>> = (0..m)
            .map(|i| (0..m).map(|j| mul(&kernel[i], &kernel[j])).collect())
            .collect();
        let closed = products.iter().flatten().all(|w| in_kernel(w));
        let commutative = (0..m).all(|i| (0..m).all(|j| products[i][j] == products[j][i]));
        let associative = (0..m).all(|i| {
            (0..m).all(|j| {
                (0..m).all(|l| {
                    mul(&products[i][j], &kernel[l]) == mul(&kernel[i], &products[j][l])
                })
            })
        });
        Ok(FiberAlgebra {
            point: t.to_vec(),
            kernel,
            products,
            closed,
            commutative,
            associative,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Chart;
    use crate::structures::submanifold::coordinate_subspace;
    use crate::symexpr::{int, parse_expr};

    fn biv(ch: &Chart, rows: &[&[&str]]) -> SymBivector {
        SymBivector::from_rows(
            ch,
            rows.iter()
                .map(|r| r.iter().map(|s| parse_expr(s).unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn point_in_line() {
        let line = Chart::new("L", &["x"]).unwrap();
        let pt = AffineSubmanifold::new("P", &line, vec![int(0)], vec![]).unwrap();
        let alg = conormal_algebroid(&pt, &biv(&line, &[&["x"]])).unwrap();
        assert_eq!(alg.gamma(0, 0, 0), &Expr::one());
        assert!(alg.is_left_symmetric());
        let fa = alg.fiber_algebra(&[]).unwrap();
        assert!(fa.holds());
        assert_eq!(fa.products[0][0], vec![int(1)]);
        assert!(conormal_algebroid(&pt, &biv(&line, &[&["1"]])).is_err());
    }

    #[test]
    fn kv_submanifold_has_zero_anchor() {
        let ch = Chart::new("M", &["x", "y"]).unwrap();
        let n = coordinate_subspace(&ch, &[1], "N").unwrap();
        let alg = conormal_algebroid(&n, &biv(&ch, &[&["x", "0"], &["0", "y"]])).unwrap();
        assert!(alg.anchor_is_zero());
        assert!(alg.is_left_symmetric());
        let zero = conormal_algebroid(&n, &SymBivector::zero(&ch)).unwrap();
        assert!(zero.gamma(0, 0, 0).is_zero());
    }

    #[test]
    fn anchor_term_enters() {
        // h = [[0, y],[y, 0]] on the x-axis: coisotropic with nonzero anchor.
        let ch = Chart::new("M", &["x", "y"]).unwrap();
        let n = coordinate_subspace(&ch, &[1], "N").unwrap();
        let h = biv(&ch, &[&["0", "y"], &["y", "0"]]);
        let alg = conormal_algebroid(&n, &h).unwrap();
        assert!(alg.anchor_is_zero());
        let h = biv(&ch, &[&["1", "1"], &["1", "y"]]);
        let alg = conormal_algebroid(&n, &h).unwrap();
        assert!(!alg.anchor_is_zero());
        assert!(alg.is_left_symmetric());
    }
}
