use dynloc::exact::q;
use dynloc::linalg::{self, CMat};
use dynloc::poly::{self, PolyAlgebra, Rect, Square, SymPoly, CQ};
use dynloc::symplectic::{equalizer, PreSymplecticSpace, SymplecticMap};
use dynloc::tensor::{check_inv_supp, DenseTensor};
use dynloc::Error;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rand_c(rng: &mut ChaCha8Rng) -> Complex64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random real antisymmetric form on `d` dimensions.
fn random_form(d: usize, rng: &mut ChaCha8Rng) -> CMat {
    let mut s = CMat::zeros(d, d);
    for i in 0..d {
        for j in i + 1..d {
            let x = rng.gen_range(-1.0..1.0);
            s[(i, j)] = c(x, 0.0);
            s[(j, i)] = c(-x, 0.0);
        }
    }
    s
}

fn algebra(sigma: &CMat, n: usize) -> PolyAlgebra<Complex64> {
    let d = sigma.nrows();
    PolyAlgebra::new(Square::from_cmat(sigma), Square::from_cmat(&CMat::identity(d, d)), n)
}

/// Random element with symmetric components in degrees `0..=top`.
fn random_poly(alg: &PolyAlgebra<Complex64>, top: usize, rng: &mut ChaCha8Rng) -> SymPoly<Complex64> {
    let mut p = alg.zero();
    for n in 0..=top {
        let t: Vec<Complex64> = (0..p.comps[n].len()).map(|_| rand_c(rng)).collect();
        p.comps[n] = poly::symmetrize(&t, alg.dim, n);
    }
    p
}

fn vec_c(v: &[Complex64]) -> CMat {
    CMat::from_column_slice(v.len(), 1, v)
}

#[test]
fn product_matches_rewriting_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for k in 0..200 {
        let d = 2 + k % 3;
        let alg = algebra(&random_form(d, &mut rng), 4);
        let (da, db) = [(1, 1), (2, 2), (1, 3), (2, 1), (3, 1)][k % 5];
        let a = random_poly(&alg, da, &mut rng);
        let b = random_poly(&alg, db, &mut rng);
        let fast = alg.product(&a, &b).unwrap();
        let slow = alg.rewrite_oracle_product(&a, &b).unwrap();
        worst = worst.max(fast.sub(&slow).max_abs());
    }
    assert!(worst <= 1e-12, "{worst:e}");
}

fn exact_algebra(d: usize, rng: &mut ChaCha8Rng) -> PolyAlgebra<CQ> {
    let vals: Vec<i64> = (0..d * d).map(|_| rng.gen_range(-3..=3)).collect();
    let s = Square::from_fn(d, |i, j| {
        let x = if i < j { vals[i * d + j] } else if i > j { -vals[j * d + i] } else { 0 };
        CQ::new(q(x, 2), q(0, 1))
    });
    let id = Square::from_fn(d, |i, j| if i == j { CQ::one() } else { CQ::zero() });
    PolyAlgebra::new(s, id, 4)
}

fn exact_poly(alg: &PolyAlgebra<CQ>, top: usize, rng: &mut ChaCha8Rng) -> SymPoly<CQ> {
    let mut p = alg.zero();
    for n in 0..=top {
        let t: Vec<CQ> = (0..p.comps[n].len())
            .map(|_| CQ::new(q(rng.gen_range(-5..=5), rng.gen_range(1..=4)), q(rng.gen_range(-5..=5), 3)))
            .collect();
        p.comps[n] = poly::symmetrize(&t, alg.dim, n);
    }
    p
}

#[test]
fn exact_product_is_identical_to_rewriting() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for k in 0..30 {
        let alg = exact_algebra(2 + k % 3, &mut rng);
        let a = exact_poly(&alg, 2, &mut rng);
        let b = exact_poly(&alg, 2, &mut rng);
        assert_eq!(alg.product(&a, &b).unwrap(), alg.rewrite_oracle_product(&a, &b).unwrap());
    }
}

#[test]
fn squares_carry_the_expected_contraction_terms() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let alg = exact_algebra(3, &mut rng);
    let u = [CQ::new(q(1, 2), q(0, 1)), CQ::new(q(-2, 1), q(0, 1)), CQ::new(q(3, 1), q(0, 1))];
    let v = [CQ::new(q(1, 1), q(0, 1)), CQ::new(q(1, 3), q(0, 1)), CQ::new(q(0, 1), q(0, 1))];
    let s = alg.form(&u, &v);
    let p = alg.product(&alg.power(&u, 2).unwrap(), &alg.power(&v, 2).unwrap()).unwrap();
    let i = CQ::new(q(0, 1), q(1, 1));
    assert_eq!(p.comps[0][0], CQ::new(q(-1, 2), q(0, 1)) * s.clone() * s.clone());
    let uv = poly::symmetrize(
        &(0..9).map(|k| u[k / 3].clone() * v[k % 3].clone()).collect::<Vec<_>>(),
        3,
        2,
    );
    let expected: Vec<CQ> = uv.iter().map(|x| CQ::new(q(2, 1), q(0, 1)) * i.clone() * s.clone() * x.clone()).collect();
    assert_eq!(p.comps[2], expected);
    assert_eq!(p, alg.rewrite_oracle_product(&alg.power(&u, 2).unwrap(), &alg.power(&v, 2).unwrap()).unwrap());
}

#[test]
fn unit_and_associativity() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..20 {
        let alg = algebra(&random_form(3, &mut rng), 4);
        let a = random_poly(&alg, 1, &mut rng);
        let b = random_poly(&alg, 2, &mut rng);
        let cc = random_poly(&alg, 1, &mut rng);
        assert!(alg.product(&alg.unit(), &b).unwrap().sub(&b).max_abs() < 1e-14);
        let l = alg.product(&alg.product(&a, &b).unwrap(), &cc).unwrap();
        let r = alg.product(&a, &alg.product(&b, &cc).unwrap()).unwrap();
        assert!(l.sub(&r).max_abs() < 1e-12);
    }
}

#[test]
fn canonical_commutation_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..50 {
        let d = 4;
        let alg = algebra(&random_form(d, &mut rng), 2);
        let u: Vec<Complex64> = (0..d).map(|_| rand_c(&mut rng)).collect();
        let v: Vec<Complex64> = (0..d).map(|_| rand_c(&mut rng)).collect();
        let comm = alg.commutator(&alg.generator(&u), &alg.generator(&v)).unwrap();
        let expected = alg.scalar(Complex64::i() * alg.form(&u, &v));
        assert!(comm.sub(&expected).max_abs() < 1e-14);
    }
}

#[test]
fn truncation_overflow_is_reported() {
    let alg = algebra(&PreSymplecticSpace::standard(1).sigma, 4);
    let u = [c(1.0, 0.0), c(2.0, 0.0)];
    let a = alg.power(&u, 3).unwrap();
    let b = alg.power(&u, 2).unwrap();
    assert!(matches!(alg.product(&a, &b), Err(Error::TruncationOverflow { degree: 5, max: 4 })));
    assert!(alg.power(&u, 5).is_err());
}

#[test]
fn star_is_an_antilinear_anti_homomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let sp = PreSymplecticSpace::standard(2);
    let alg = PolyAlgebra::from_space(&sp, 4);
    assert_eq!(alg.star(&alg.unit()), alg.unit());
    for _ in 0..30 {
        let a = random_poly(&alg, 2, &mut rng);
        let b = random_poly(&alg, 2, &mut rng);
        let lhs = alg.star(&alg.product(&a, &b).unwrap());
        let rhs = alg.product(&alg.star(&b), &alg.star(&a)).unwrap();
        assert!(lhs.sub(&rhs).max_abs() < 1e-12);
        assert!(alg.star(&alg.star(&a)).sub(&a).max_abs() < 1e-15);
        let z = rand_c(&mut rng);
        assert!(alg.star(&a.scale(&z)).sub(&alg.star(&a).scale(&z.conj())).max_abs() < 1e-14);
    }
    let f = [c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.5), c(-1.0, 1.0)];
    let fc: Vec<Complex64> = f.iter().map(|z| z.conj()).collect();
    assert_eq!(alg.star(&alg.generator(&f)), alg.generator(&fc));
}

/// Symplectic map `x -> g x` on the standard space of dimension `2k`.
fn sp_map(k: usize, g: CMat) -> SymplecticMap {
    let sp = PreSymplecticSpace::standard(k);
    SymplecticMap::new(sp.clone(), sp, g).unwrap()
}

fn random_symplectic(rng: &mut ChaCha8Rng) -> CMat {
    // product of shears [[I, S], [0, I]] and [[I, 0], [T, I]] with S, T symmetric
    let mut g = CMat::identity(4, 4);
    for step in 0..3 {
        let (a, b, cc) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let mut m = CMat::identity(4, 4);
        let (r0, c0) = if step % 2 == 0 { (0, 2) } else { (2, 0) };
        m[(r0, c0)] = c(a, 0.0);
        m[(r0, c0 + 1)] = c(b, 0.0);
        m[(r0 + 1, c0)] = c(b, 0.0);
        m[(r0 + 1, c0 + 1)] = c(cc, 0.0);
        g = m * g;
    }
    g
}

#[test]
fn functor_respects_products_star_unit_and_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let sp = PreSymplecticSpace::standard(2);
    let alg = PolyAlgebra::from_space(&sp, 4);
    let id = SymplecticMap::identity(&sp);
    for _ in 0..20 {
        let f = sp_map(2, random_symplectic(&mut rng));
        let g = sp_map(2, random_symplectic(&mut rng));
        let a = random_poly(&alg, 2, &mut rng);
        let b = random_poly(&alg, 2, &mut rng);
        let q = |m: &SymplecticMap, x: &SymPoly<Complex64>| poly::q_functor(m, x).unwrap();
        assert!(q(&id, &a).sub(&a).max_abs() < 1e-15);
        let lhs = q(&f, &alg.product(&a, &b).unwrap());
        let rhs = alg.product(&q(&f, &a), &q(&f, &b)).unwrap();
        assert!(lhs.sub(&rhs).max_abs() < 1e-10 * (1.0 + rhs.max_abs()));
        assert!(q(&f, &alg.star(&a)).sub(&alg.star(&q(&f, &a))).max_abs() < 1e-10 * (1.0 + a.max_abs()));
        assert!(q(&f, &alg.unit()).sub(&alg.unit()).max_abs() < 1e-15);
        let fg = f.compose(&g).unwrap();
        let two = q(&f, &q(&g, &a));
        assert!(q(&fg, &a).sub(&two).max_abs() < 1e-10 * (1.0 + two.max_abs()));
    }
}

#[test]
fn rotation_fixes_a_quadratic_element_but_no_vector() {
    let sp = PreSymplecticSpace::standard(1);
    let rot = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let f = SymplecticMap::new(sp.clone(), sp.clone(), rot.clone()).unwrap();
    let eq = equalizer(&f, &SymplecticMap::identity(&sp)).unwrap();
    assert_eq!(eq.dim(), 0);
    let alg = PolyAlgebra::from_space(&sp, 2);
    let mut a = alg.zero();
    a.comps[2] = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
    assert_eq!(poly::q_functor(&f, &a).unwrap(), a);
    assert_eq!(poly::support_space(&a, 1e-12).ncols(), 2);
    // the fixed element found by solving rather than by guessing
    let fixed = linalg::null_space(&(poly::sym_power_matrix(&rot, 2) - CMat::identity(3, 3)), 1e-12);
    assert_eq!(fixed.ncols(), 1);
    let t = poly::sym_from_coords(fixed.column(0).as_slice(), 2, 2);
    assert!((t[0] - t[3]).norm() < 1e-12 && t[1].norm() < 1e-12);
}

#[test]
fn weyl_series_relation() {
    let sp = PreSymplecticSpace::standard(1);
    let alg = PolyAlgebra::from_space(&sp, 4);
    assert_eq!(alg.weyl_series(&[c(0.3, 0.0), c(-1.0, 0.0)], &c(0.0, 0.0), 4).unwrap(), alg.unit());
    let e1 = [c(1.0, 0.0), c(0.0, 0.0)];
    let e2 = [c(0.0, 0.0), c(1.0, 0.0)];
    assert!(alg.weyl_relation_residual(&e1, &e2, 2).unwrap() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let alg = algebra(&random_form(3, &mut rng), 4);
    for _ in 0..10 {
        let u: Vec<Complex64> = (0..3).map(|_| rand_c(&mut rng)).collect();
        let v: Vec<Complex64> = (0..3).map(|_| rand_c(&mut rng)).collect();
        assert!(alg.weyl_relation_residual(&u, &v, 4).unwrap() < 1e-12);
    }
    let w = alg.weyl_series(&e1.iter().chain(&[c(0.0, 0.0)]).cloned().collect::<Vec<_>>(), &c(2.0, 0.0), 3).unwrap();
    assert!((w.comps[3][0] - c(0.0, -8.0 / 6.0)).norm() < 1e-15);
}

#[test]
fn support_spaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let alg = algebra(&random_form(4, &mut rng), 4);
    let u: Vec<Complex64> = (0..4).map(|_| rand_c(&mut rng)).collect();
    let s = poly::support_space(&alg.power(&u, 3).unwrap(), 1e-12);
    assert_eq!(s.ncols(), 1);
    assert!(linalg::max_residual(&s, &vec_c(&u)) < 1e-12);
    assert_eq!(poly::support_space(&alg.scalar(c(2.0, 1.0)), 1e-12).ncols(), 0);
    for _ in 0..20 {
        let x: Vec<Complex64> = (0..4).map(|_| rand_c(&mut rng)).collect();
        let y: Vec<Complex64> = (0..4).map(|_| rand_c(&mut rng)).collect();
        let a = alg.product(&alg.power(&x, 2).unwrap(), &alg.generator(&y)).unwrap().add(&alg.generator(&x));
        let s = poly::support_space(&a, 1e-12);
        assert_eq!(s.ncols(), 2);
        assert!(poly::subalgebra_residual(&a, &s) < 1e-12);
    }
}

#[test]
fn fixed_elements_have_invariant_support() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    // block rotation on one symplectic plane and identity on the other
    let th: f64 = 0.7;
    let mut g = CMat::identity(4, 4);
    g[(0, 0)] = c(th.cos(), 0.0);
    g[(0, 2)] = c(-th.sin(), 0.0);
    g[(2, 0)] = c(th.sin(), 0.0);
    g[(2, 2)] = c(th.cos(), 0.0);
    let f = sp_map(2, g.clone());
    for n in 1..=3 {
        let fixed = linalg::null_space(&(poly::sym_power_matrix(&g, n) - CMat::identity(poly::multisets(4, n).len(), poly::multisets(4, n).len())), 1e-10);
        assert!(fixed.ncols() > 0);
        let w: Vec<Complex64> = (0..fixed.ncols()).map(|_| rand_c(&mut rng)).collect();
        let coords = &fixed * vec_c(&w);
        let t = poly::sym_from_coords(coords.as_slice(), 4, n);
        let mut a = SymPoly::zero(4, n);
        a.comps[n] = t.clone();
        assert!(poly::q_functor(&f, &a).unwrap().sub(&a).max_abs() < 1e-12);
        let dense = DenseTensor::from_data(&vec![4; n], t).unwrap();
        assert!(check_inv_supp(&g, &dense, c(1.0, 0.0), 1e-10).unwrap());
    }
}

#[test]
fn algebra_of_a_join_is_spanned_by_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let d = 5;
        let w1 = CMat::from_fn(d, 2, |_, _| rand_c(&mut rng));
        let w2 = CMat::from_fn(d, 1, |_, _| rand_c(&mut rng));
        let joined = linalg::orth(&linalg::hcat(&w1, &w2), 1e-12);
        let whole = poly::sym_power_span(&joined, 2);
        let sums = linalg::hcat(&poly::sym_power_span(&w1, 2), &poly::sym_power_span(&w2, 2));
        // sums alone miss the mixed products
        assert!(linalg::rank(&sums, 1e-10) < linalg::rank(&whole, 1e-10));
        let mut mixed = CMat::zeros(d * d, 0);
        for i in 0..2 {
            let mut t = vec![c(0.0, 0.0); d * d];
            for a in 0..d {
                for b in 0..d {
                    t[a * d + b] = w1[(a, i)] * w2[(b, 0)];
                }
            }
            let t = poly::symmetrize(&t, d, 2);
            mixed = linalg::hcat(&mixed, &vec_c(&t));
        }
        let with_products = linalg::hcat(&sums, &mixed);
        assert_eq!(linalg::rank(&with_products, 1e-10), linalg::rank(&whole, 1e-10));
        assert!(linalg::contained_in(&linalg::orth(&with_products, 1e-10), &linalg::orth(&whole, 1e-10), 1e-8));
    }
}

#[test]
fn json_fixture_shape() {
    let alg = PolyAlgebra::from_space(&PreSymplecticSpace::standard(1), 2);
    let a = alg.generator(&[c(1.0, 0.0), c(0.0, 2.0)]).add(&alg.scalar(c(0.5, 0.0)));
    let j = a.to_json();
    assert_eq!(j["0"], serde_json::json!([0.5, 0.0]));
    assert_eq!(j["1"], serde_json::json!([[1.0, 0.0], [0.0, 2.0]]));
    let _ = Rect::from_cmat(&CMat::identity(2, 2));
}
