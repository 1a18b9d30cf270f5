//! Graphs and preimages of affine maps.

use num_traits::Zero;

use super::maps::{is_kv_map, kv_map_residual, product_kv, AffineMap, ProductSign};
use super::submanifold::{
    adapted_frame, is_coisotropic, is_transversal, AffineSubmanifold, Transversality,
};
use super::{Result, StructureError};
use crate::geometry::SymBivector;
use crate::linalg::Matrix;
use crate::sampling::Sampler;
use crate::symexpr::{Rational, SymError};

#[derive(Clone, Debug)]
pub struct GraphReport {
    pub graph: AffineSubmanifold,
    /// `h¹ ⊕ (−h²)` on `M¹ × M̄²`.
    pub product: SymBivector,
    pub coisotropic: bool,
    pub kv_map: bool,
}

impl GraphReport {
    pub fn agree(&self) -> bool {
        self.coisotropic == self.kv_map
    }
}

/// `Graph(F) = {(x, Mx + c)}` inside `M¹ × M̄²`.
pub fn graph_of(f: &AffineMap, product_chart: &crate::geometry::Chart) -> Result<AffineSubmanifold> {
    let (n1, n2) = (f.source().dim(), f.target().dim());
    let mut origin = vec![Rational::zero(); n1];
    origin.extend(f.offset().iter().cloned());
    let basis = (0..n1)
        .map(|i| {
            let mut v = vec![Rational::zero(); n1 + n2];
            v[i] = Rational::from_integer(1.into());
            for a in 0..n2 {
                v[n1 + a] = f.matrix().get(a, i).clone();
            }
            v
        })
        .collect();
    AffineSubmanifold::new(&format!("Graph({})", product_chart.name()), product_chart, origin, basis)
}

pub fn graph_check(f: &AffineMap, h1: &SymBivector, h2: &SymBivector) -> Result<GraphReport> {
    f.source().ensure_same(h1.chart())?;
    f.target().ensure_same(h2.chart())?;
    let prod = product_kv(h1, h2, ProductSign::Minus)?;
    let graph = graph_of(f, &prod.chart)?;
    let coisotropic = is_coisotropic(&graph, &prod.h)?.holds;
    let kv_map = is_kv_map(f, h1, h2)?;
    Ok(GraphReport {
        graph,
        product: prod.h,
        coisotropic,
        kv_map,
    })
}

#[derive(Clone, Debug)]
pub struct PreimageReport {
    pub preimage: AffineSubmanifold,
    pub source_verdict: Transversality,
    pub target_verdict: Transversality,
    pub source_induced: Option<SymBivector>,
    pub target_induced: Option<SymBivector>,
    /// `F` restricted to the tangent coordinates of both submanifolds.
    pub restriction: Option<AffineMap>,
    /// The restriction is a K-V map between the induced structures, exactly.
    pub restriction_kv_map: bool,
    /// Sample points of the preimage (tangent coordinates) where the
    /// restricted K-V-map residual was evaluated and found zero.
    pub sampled: usize,
}

impl PreimageReport {
    pub fn holds(&self) -> bool {
        self.source_verdict != Transversality::False
            && self.target_verdict != Transversality::False
            && self.restriction_kv_map
    }
}

fn columns(vs: &[Vec<Rational>], n: usize) -> Matrix<Rational> {
    Matrix::from_fn(n, vs.len(), |i, j| vs[j][i].clone())
}

/// `F⁻¹(N²)` together with transversality of both sides and the K-V-map
/// property of `F` restricted to the induced structures.
pub fn preimage_transversal(
    f: &AffineMap,
    h1: &SymBivector,
    h2: &SymBivector,
    n2: &AffineSubmanifold,
    sampler: &Sampler,
) -> Result<PreimageReport> {
    f.source().ensure_same(h1.chart())?;
    f.target().ensure_same(h2.chart())?;
    f.target().ensure_same(n2.ambient())?;
    let (dn, dm) = (f.source().dim(), f.target().dim());
    let m = f.matrix();

    // Q: rows spanning the annihilator of span(B₂).
    let q_rows = if n2.dim() == 0 {
        Matrix::<Rational>::identity(dm).to_rows()
    } else {
        Matrix::from_rows(n2.basis().to_vec()).nullspace()
    };
    let q = Matrix::from_fn(q_rows.len(), dm, |i, j| q_rows[i][j].clone());
    let qm = q.mul(m);
    if qm.rank() < q.rows() {
        return Err(StructureError::NotTransverse(n2.name().to_string()));
    }
    let rhs: Vec<Rational> = (0..dm).map(|a| &n2.origin()[a] - &f.offset()[a]).collect();
    let rhs = q.mul_vec(&rhs);
    let origin = if q.rows() == 0 {
        vec![Rational::zero(); dn]
    } else {
        qm.solve(&rhs).ok_or(StructureError::EmptyPreimage)?
    };
    let basis = if q.rows() == 0 {
        Matrix::<Rational>::identity(dn).to_rows()
    } else {
        qm.nullspace()
    };
    let name = format!("{}^-1({})", f.source().name(), n2.name());
    let n1 = AffineSubmanifold::new(&name, f.source(), origin, basis)?;

    let r1 = is_transversal(&n1, h1, sampler)?;
    let r2 = is_transversal(n2, h2, sampler)?;

    // F(o₁ + B₁ t) = o₂ + B₂ (L t + l)
    let b2 = columns(n2.basis(), dm);
    let shift: Vec<Rational> = f
        .apply_point(n1.origin())
        .iter()
        .zip(n2.origin())
        .map(|(a, b)| a - b)
        .collect();
    let l = b2.solve(&shift).ok_or(StructureError::EmptyPreimage)?;
    let mut lmat = Matrix::zeros(n2.dim(), n1.dim());
    for (j, v) in n1.basis().iter().enumerate() {
        let col = b2
            .solve(&m.mul_vec(v))
            .ok_or_else(|| StructureError::Shape("image of the preimage leaves N²".into()))?;
        for (a, c) in col.into_iter().enumerate() {
            lmat.set(a, j, c);
        }
    }

    let mut restriction = None;
    let mut restriction_kv_map = false;
    let mut sampled = 0;
    if let (Some(s1), Some(s2)) = (&r1.induced, &r2.induced) {
        let fr1 = adapted_frame(&n1)?;
        let map = AffineMap::new(s1.chart(), s2.chart(), lmat, l)?;
        let res = kv_map_residual(&map, s1, s2)?;
        restriction_kv_map = res.is_zero();
        for t in sampler.points(n1.dim()) {
            let pt = fr1.tangent_point(&t);
            match res.try_map(|e| e.eval_at(&pt)) {
                Ok(v) if v.is_zero() => sampled += 1,
                Ok(_) => restriction_kv_map = false,
                Err(SymError::PoleAtPoint) => {}
                Err(e) => return Err(e.into()),
            }
        }
        restriction = Some(map);
    }
    Ok(PreimageReport {
        preimage: n1,
        source_verdict: r1.verdict,
        target_verdict: r2.verdict,
        source_induced: r1.induced,
        target_induced: r2.induced,
        restriction,
        restriction_kv_map,
        sampled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Chart;
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
    fn graph_matches_kv_map() {
        let m = Chart::new("M", &["x", "y"]).unwrap();
        let l = Chart::new("L", &["u"]).unwrap();
        let h = biv(&m, &[&["x", "0"], &["0", "y"]]);
        let hl = biv(&l, &[&["u"]]);
        for (lam, mu, expect) in [(1, 0, true), (2, 0, false), (1, 1, true), (1, -1, false)] {
            let f = AffineMap::new(&m, &l, Matrix::from_rows(vec![vec![int(lam), int(mu)]]), vec![int(0)]).unwrap();
            let r = graph_check(&f, &h, &hl).unwrap();
            assert_eq!(r.kv_map, expect, "{lam},{mu}");
            assert!(r.agree());
        }
        let id = AffineMap::identity(&m);
        assert!(graph_check(&id, &h, &h).unwrap().coisotropic);
    }

    #[test]
    fn fibers_of_a_surjection() {
        let m = Chart::new("M", &["x", "y", "z"]).unwrap();
        let p = Chart::new("P", &["u"]).unwrap();
        let f = AffineMap::new(&m, &p, Matrix::from_rows(vec![vec![int(1), int(2), int(-1)]]), vec![int(3)]).unwrap();
        let pt = AffineSubmanifold::new("pt", &p, vec![int(5)], vec![]).unwrap();
        let r = preimage_transversal(&f, &SymBivector::standard(&m), &SymBivector::standard(&p), &pt, &Sampler::default()).unwrap();
        assert_eq!(r.preimage.dim(), 2);
        assert!(r.preimage.contains(&[int(2), int(0), int(0)]));
        assert_eq!(r.source_verdict, Transversality::SymbolicTrue);
        assert!(r.holds());

        let id = AffineMap::identity(&m);
        let plane = AffineSubmanifold::new("Q", &m, vec![int(0), int(0), int(1)], vec![vec![int(1), int(0), int(0)], vec![int(0), int(1), int(0)]]).unwrap();
        let h = SymBivector::standard(&m);
        let r = preimage_transversal(&id, &h, &h, &plane, &Sampler::default()).unwrap();
        assert!(r.holds());
        assert_eq!(r.source_induced.unwrap().matrix(), r.target_induced.unwrap().matrix());
    }
}
