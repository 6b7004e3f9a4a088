use dynloc::exact::{q, QMat, Q};
use dynloc::linalg::{self, RMat};
use dynloc::weyl::{self, ell2_action, inner, multiply, star, Label, LabelFn, LabelSpace, WeylElement};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

fn label(xs: &[i64]) -> Label {
    xs.iter().map(|&x| q(x, 1)).collect()
}

fn rand_label(d: usize, rng: &mut ChaCha8Rng) -> Label {
    (0..d).map(|_| q(rng.gen_range(-6..=6), rng.gen_range(1..=3))).collect()
}

fn rand_c(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn rand_element(d: usize, terms: usize, rng: &mut ChaCha8Rng) -> WeylElement {
    (0..terms).fold(WeylElement::zero(), |acc, _| acc.add(&WeylElement::term(rand_label(d, rng), rand_c(rng))))
}

fn rand_fn(d: usize, rng: &mut ChaCha8Rng) -> LabelFn {
    (0..3).map(|_| (rand_label(d, rng), rand_c(rng))).collect()
}

fn fn_distance(f: &LabelFn, g: &LabelFn) -> f64 {
    let keys: BTreeSet<&Label> = f.keys().chain(g.keys()).collect();
    let z = Complex64::new(0.0, 0.0);
    keys.into_iter().map(|k| (f.get(k).unwrap_or(&z) - g.get(k).unwrap_or(&z)).norm()).fold(0.0, f64::max)
}

/// Rational form on `Q^4` that is not the standard one.
fn skew_space() -> LabelSpace {
    let mut s = QMat::zeros(4, 4);
    for (i, j, v) in [(0, 1, q(1, 2)), (0, 2, q(-1, 3)), (1, 3, q(2, 1)), (2, 3, q(1, 1)), (0, 3, q(1, 5))] {
        s.set(i, j, v.clone());
        s.set(j, i, -v);
    }
    LabelSpace::new(s).unwrap()
}

#[test]
fn weyl_relations_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let sp = skew_space();
    for _ in 0..500 {
        let (u, v) = (rand_label(4, &mut rng), rand_label(4, &mut rng));
        let lhs = multiply(&sp, &WeylElement::generator(u.clone()), &WeylElement::generator(v.clone())).unwrap();
        let phase = -dynloc::exact::to_f64(&sp.form(&u, &v)) / 2.0;
        let rhs = WeylElement::term(weyl::add(&u, &v), Complex64::from_polar(1.0, phase));
        assert!(lhs.distance(&rhs) < 1e-15);
        let (a, b, c) = (rand_element(4, 3, &mut rng), rand_element(4, 3, &mut rng), rand_element(4, 2, &mut rng));
        let l = multiply(&sp, &multiply(&sp, &a, &b).unwrap(), &c).unwrap();
        let r = multiply(&sp, &a, &multiply(&sp, &b, &c).unwrap()).unwrap();
        assert_eq!(l.terms.keys().collect::<Vec<_>>(), r.terms.keys().collect::<Vec<_>>());
        assert!(l.distance(&r) < 1e-12);
        let st = star(&multiply(&sp, &a, &b).unwrap());
        assert!(st.distance(&multiply(&sp, &star(&b), &star(&a)).unwrap()) < 1e-12);
        assert_eq!(star(&star(&a)), a);
    }
}

#[test]
fn unit_commutator_and_plane_example() {
    let sp = LabelSpace::standard(1);
    let u = label(&[3, -1]);
    let one = WeylElement::unit(&sp);
    assert_eq!(multiply(&sp, &WeylElement::generator(u.clone()), &one).unwrap(), WeylElement::generator(u.clone()));
    assert_eq!(star(&one), one);
    let v = label(&[1, 2]);
    let g = |x: &Label| WeylElement::generator(x.clone());
    let prod = [g(&u), g(&v), g(&weyl::neg(&u)), g(&weyl::neg(&v))]
        .iter()
        .skip(1)
        .fold(g(&u), |acc, x| multiply(&sp, &acc, x).unwrap());
    let s = dynloc::exact::to_f64(&sp.form(&u, &v));
    assert!(prod.distance(&WeylElement::term(sp.zero_label(), Complex64::from_polar(1.0, -s))) < 1e-14);
    let e = multiply(&sp, &g(&label(&[1, 0])), &g(&label(&[0, 1]))).unwrap();
    assert!(e.distance(&WeylElement::term(label(&[1, 1]), Complex64::from_polar(1.0, -0.5))) < 1e-16);
    assert_eq!(star(&g(&u)), g(&weyl::neg(&u)));
}

#[test]
fn regular_action_is_a_star_representation() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let sp = skew_space();
    let zero = sp.zero_label();
    let delta0: LabelFn = BTreeMap::from([(zero.clone(), Complex64::new(1.0, 0.0))]);
    let u = rand_label(4, &mut rng);
    let moved = ell2_action(&sp, &WeylElement::generator(u.clone()), &delta0).unwrap();
    assert_eq!(moved.keys().collect::<Vec<_>>(), vec![&weyl::neg(&u)]);
    for _ in 0..500 {
        let (a, b) = (rand_element(4, 2, &mut rng), rand_element(4, 2, &mut rng));
        let (f, g) = (rand_fn(4, &mut rng), rand_fn(4, &mut rng));
        let ab = ell2_action(&sp, &multiply(&sp, &a, &b).unwrap(), &f).unwrap();
        let a_b = ell2_action(&sp, &a, &ell2_action(&sp, &b, &f).unwrap()).unwrap();
        assert!(fn_distance(&ab, &a_b) < 1e-12);
        let lhs = inner(&f, &ell2_action(&sp, &a, &g).unwrap());
        let rhs = inner(&ell2_action(&sp, &star(&a), &f).unwrap(), &g);
        assert!((lhs - rhs).norm() < 1e-12);
        assert!(fn_distance(&ell2_action(&sp, &WeylElement::unit(&sp), &f).unwrap(), &f) < 1e-16);
    }
}

fn quarter_turn() -> QMat {
    QMat::from_rows(&[vec![q(0, 1), q(-1, 1)], vec![q(1, 1), q(0, 1)]])
}

fn pool() -> Vec<Label> {
    (-5..5).flat_map(|a| (-5..5).map(move |b| label(&[a, b]))).collect()
}

#[test]
fn quarter_turn_fixed_algebra_is_spanned_by_orbit_sums() {
    let sp = LabelSpace::standard(1);
    let g = quarter_turn();
    let span = weyl::fixed_point_span(&sp, &[g.clone()], &pool(), 8).unwrap();
    assert!(span.unbounded.is_empty());
    let e1 = WeylElement::generator(label(&[1, 0]));
    let orbit_e1 = span.sums.iter().find(|s| s.terms.contains_key(&label(&[1, 0]))).unwrap();
    assert_eq!(orbit_e1.terms.len(), 4);
    assert!(orbit_e1.terms.keys().all(|k| [label(&[1, 0]), label(&[0, 1]), label(&[-1, 0]), label(&[0, -1])].contains(k)));
    assert_ne!(weyl::relabel(&g, &e1), e1);

    // every fixed coefficient vector on the closed pool is a combination of
    // orbit sums: solve a(gu) = a(u) exactly
    let closed: Vec<Label> = span.sums.iter().flat_map(|s| s.terms.keys().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
    let index: BTreeMap<&Label, usize> = closed.iter().enumerate().map(|(i, u)| (u, i)).collect();
    let n = closed.len();
    let mut rows = Vec::new();
    for (i, u) in closed.iter().enumerate() {
        let mut r = vec![Q::from_integer(0.into()); n];
        r[index[&g.mul_vec(u)]] += q(1, 1);
        r[i] -= q(1, 1);
        rows.push(r);
    }
    let fixed = QMat::from_rows(&rows).null_space();
    assert_eq!(fixed.cols, span.sums.len());
    let sums = QMat::from_cols(
        n,
        &span
            .sums
            .iter()
            .map(|s| closed.iter().map(|u| if s.terms.contains_key(u) { q(1, 1) } else { q(0, 1) }).collect())
            .collect::<Vec<_>>(),
    );
    for j in 0..fixed.cols {
        assert!(sums.spans(&fixed.col(j)));
    }
}

#[test]
fn identity_fixes_everything_and_hyperbolic_maps_fix_only_the_unit() {
    let sp = LabelSpace::standard(1);
    let id = QMat::identity(2);
    let span = weyl::fixed_point_span(&sp, &[id], &pool(), 8).unwrap();
    assert_eq!(span.sums.len(), 100);
    assert!(span.sums.iter().all(|s| s.terms.len() == 1));
    let cat = QMat::from_rows(&[vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]]);
    let span = weyl::fixed_point_span(&sp, &[cat], &pool(), 64).unwrap();
    assert_eq!(span.sums, vec![WeylElement::unit(&sp)]);
    assert_eq!(span.unbounded.len(), 99);
    let shear = QMat::from_rows(&[vec![q(1, 1), q(1, 2)], vec![q(0, 1), q(1, 1)]]);
    let span = weyl::fixed_point_span(&sp, &[shear], &pool(), 64).unwrap();
    assert_eq!((span.sums.len(), span.unbounded.len()), (10, 90));
    let stretch = QMat::from_rows(&[vec![q(2, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]]);
    assert!(weyl::fixed_point_span(&sp, &[stretch], &pool(), 8).is_err());
}

#[test]
fn sampled_family_kernels() {
    let id = RMat::identity(4, 4);
    assert_eq!(weyl::family_fixed_labels(&vec![id; 8], 1e-9).unwrap().ncols(), 4);
    let rot: Vec<RMat> = [0.3, -0.3, 0.1, -0.1, 0.01, -0.01, 0.001, -0.001]
        .iter()
        .map(|&s: &f64| RMat::from_row_slice(2, 2, &[s.cos(), -s.sin(), s.sin(), s.cos()]))
        .collect();
    assert_eq!(weyl::family_fixed_labels(&rot, 1e-9).unwrap().ncols(), 0);
    // rotation of one plane of two, identity on the other
    let half: Vec<RMat> = rot
        .iter()
        .map(|r| {
            let mut m = RMat::identity(4, 4);
            m.view_mut((0, 0), (2, 2)).copy_from(r);
            m
        })
        .collect();
    let k = weyl::family_fixed_labels(&half, 1e-9).unwrap();
    assert_eq!(k.ncols(), 2);
    assert!(linalg::max_residual(&k, &RMat::from_column_slice(4, 1, &[0.0, 0.0, 1.0, 0.0])) < 1e-12);
}

#[test]
fn json_round_trip() {
    let e = WeylElement::term(vec![q(1, 2), q(-3, 1)], Complex64::new(0.25, -1.0))
        .add(&WeylElement::generator(vec![q(0, 1), q(7, 3)]));
    let j = e.to_json();
    assert_eq!(j[0]["label"][0], "0");
    assert_eq!(WeylElement::from_json(&j).unwrap(), e);
}
