mod common;

use dynloc::linalg::CMat;
use dynloc::symplectic::{self as sy, FieldKind, PreSymplecticSpace, Subspace, SymplecticMap};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn category_operations_on_transported_spaces(seed in 0u64..100_000) {
        let worst = common::category_instance(&mut common::rng(seed), 1e-10);
        prop_assert!(worst.is_ok(), "{:?}", worst);
    }

    #[test]
    fn intersection_and_union_are_order_independent(seed in 0u64..100_000) {
        use rand::Rng;
        let mut rng = common::rng(seed);
        let parts: Vec<Subspace> = (0..3)
            .map(|_| {
                let r = rng.gen_range(1..6);
                Subspace::span(&common::rand_cmat(6, r, &mut rng), 1e-10)
            })
            .collect();
        let (a, b, c) = (&parts[0], &parts[1], &parts[2]);
        prop_assert!(sy::intersect(&[a, b, c]).unwrap().same_as(&sy::intersect(&[c, a, b]).unwrap()));
        prop_assert!(sy::union(&[a, b, c]).unwrap().same_as(&sy::union(&[b, c, a]).unwrap()));
    }
}

#[test]
fn composition_with_identity_and_associativity() {
    let sp = PreSymplecticSpace::standard(2);
    let mut rng = common::rng(4);
    let id = SymplecticMap::identity(&sp);
    // real symplectic shears compose to symplectic maps
    let shear = |s: f64| {
        let mut m = CMat::identity(4, 4);
        m[(0, 2)] = common::c(s, 0.0);
        SymplecticMap::new(sp.clone(), sp.clone(), m).unwrap()
    };
    let (f, g, h) = (shear(0.3), shear(-1.1), shear(2.0));
    assert_eq!(f.compose(&id).unwrap().matrix, f.matrix);
    let left = h.compose(&g).unwrap().compose(&f).unwrap();
    let right = h.compose(&g.compose(&f).unwrap()).unwrap();
    assert!((left.matrix - right.matrix).norm() < 1e-14);
    let bad = common::near_identity(4, &mut rng);
    assert!(SymplecticMap::new(sp.clone(), sp, bad).is_err());
}

#[test]
fn restriction_to_a_lagrangian_plane_is_degenerate() {
    let sp = PreSymplecticSpace::standard(2);
    let mut basis = CMat::zeros(4, 2);
    basis[(0, 0)] = common::c(1.0, 0.0);
    basis[(1, 1)] = common::c(1.0, 0.0);
    let w = Subspace::span(&basis, 1e-10);
    let r = sy::restrict(&sp, &w).unwrap();
    assert!(!r.is_weakly_nondegenerate());
    assert_eq!(r.field, FieldKind::Complex);
    let (real, _) = sy::realify(&sp).unwrap();
    assert_eq!(real.field, FieldKind::Real);
    assert!(sy::realify(&real).is_err());
}
