//! Property tests of algebraic identities on seeded random instances.

use proptest::prelude::*;

use kvgeom::generate::{random_algebra, random_bivector, random_kv, random_poly};
use kvgeom::geometry::{
    bracket_h, codazzi_tensor, contravariant_d, hamiltonian, is_kv, left_sym_product, lie_bracket, sharp, Chart,
    OneForm, ScalarField,
};
use kvgeom::oracle::{codazzi_at, eval_trilinear};
use kvgeom::sampling::Sampler;
use kvgeom::structures::{coordinate_subspace, is_kv_submanifold};
use kvgeom::symexpr::parse_expr;

fn chart(dim: usize) -> Chart {
    Chart::new("M", &["x", "y", "z"][..dim]).unwrap()
}

fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    Sampler::new(seed, 1).rng(0)
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn display_round_trips(seed in any::<u64>(), dim in 1usize..=3) {
        let mut r = rng(seed);
        let c = chart(dim);
        let p = random_poly(&mut r, &c, 3, 4);
        let q = random_poly(&mut r, &c, 2, 2);
        let e = if q.is_zero() { p } else { p.checked_div(&q).unwrap() };
        prop_assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn field_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = chart(2);
        let (a, b, d) = (random_poly(&mut r, &c, 2, 3), random_poly(&mut r, &c, 2, 3), random_poly(&mut r, &c, 1, 2));
        prop_assert_eq!(&(&a + &b) * &d, &(&a * &d) + &(&b * &d));
        if !d.is_zero() {
            prop_assert_eq!(&a.checked_div(&d).unwrap() * &d, a.clone());
        }
        prop_assert!((&a - &a).is_zero());
    }

    /// `(𝒟_α β)^# = ∇_{α^#} β^#` on K-V structures.
    #[test]
    fn contravariant_connection_is_compatible(seed in any::<u64>(), dim in 1usize..=3) {
        let mut r = rng(seed);
        let c = chart(dim);
        let h = random_kv(&mut r, &c);
        let a = OneForm::differential(&ScalarField::new(&c, random_poly(&mut r, &c, 2, 2)).unwrap());
        let b = OneForm::basis(&c, dim - 1);
        let lhs = sharp(&h, &contravariant_d(&h, &a, &b).unwrap()).unwrap();
        let rhs = left_sym_product(&sharp(&h, &a).unwrap(), &sharp(&h, &b).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().is_zero());
    }

    /// Coordinate forms under `[·,·]_h` satisfy Jacobi and the anchor is a morphism.
    #[test]
    fn kv_bracket_is_a_lie_algebroid(seed in any::<u64>(), dim in 2usize..=3) {
        let mut r = rng(seed);
        let c = chart(dim);
        let h = random_kv(&mut r, &c);
        let e: Vec<OneForm> = (0..dim).map(|i| OneForm::basis(&c, i)).collect();
        let br = |a: &OneForm, b: &OneForm| bracket_h(&h, a, b).unwrap();
        for i in 0..dim {
            for j in 0..dim {
                let anchor = sharp(&h, &br(&e[i], &e[j])).unwrap();
                let lie = lie_bracket(&sharp(&h, &e[i]).unwrap(), &sharp(&h, &e[j]).unwrap()).unwrap();
                prop_assert!(anchor.sub(&lie).unwrap().is_zero());
                for k in 0..dim {
                    let jac = br(&br(&e[i], &e[j]), &e[k])
                        .add(&br(&br(&e[j], &e[k]), &e[i])).unwrap()
                        .add(&br(&br(&e[k], &e[i]), &e[j])).unwrap();
                    prop_assert!(jac.is_zero());
                }
            }
        }
    }

    #[test]
    fn codazzi_matches_jet_oracle(seed in any::<u64>(), dim in 1usize..=3) {
        let mut r = rng(seed);
        let c = chart(dim);
        let h = random_bivector(&mut r, &c, 2);
        let t = codazzi_tensor(&h);
        for p in Sampler::new(seed, 4).points(dim) {
            prop_assert_eq!(eval_trilinear(&t, &p).unwrap(), codazzi_at(&h, &p).unwrap());
        }
    }

    /// Algebra duals are K-V, and `X_f` is the sharp of `df` there.
    #[test]
    fn algebra_duals_are_kv(seed in any::<u64>(), dim in 1usize..=4) {
        let mut r = rng(seed);
        let a = random_algebra(&mut r, dim);
        let h = kvgeom::algebra::algebra_to_kv(&a).unwrap();
        prop_assert!(is_kv(&h));
        let f = ScalarField::new(h.chart(), random_poly(&mut r, h.chart(), 2, 3)).unwrap();
        let x = hamiltonian(&h, &f).unwrap();
        prop_assert!(x.sub(&sharp(&h, &OneForm::differential(&f)).unwrap()).unwrap().is_zero());
    }

    /// Induced structures on coordinate K-V submanifolds are again K-V.
    #[test]
    fn induced_structure_is_kv(seed in any::<u64>(), dim in 2usize..=3) {
        let mut r = rng(seed);
        let c = chart(dim);
        let h = random_kv(&mut r, &c);
        let n = coordinate_subspace(&c, &[dim - 1], "N").unwrap();
        let rep = is_kv_submanifold(&n, &h).unwrap();
        if let Some(ind) = rep.induced {
            prop_assert!(is_kv(&ind));
        }
    }
}
