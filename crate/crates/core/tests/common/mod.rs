//! Random instances and property runners shared by the integration tests
//! and the acceptance suite. Runners return the worst residual seen, or a
//! description of the first structural failure.
#![allow(dead_code)]

use dynloc::kg::forms::{self, OneForm};
use dynloc::kg::GridField;
use dynloc::linalg::{self, CMat, RMat};
use dynloc::locality::{current, PhaseSpace};
use dynloc::symplectic::{self as sy, FieldKind, PreSymplecticSpace, Subspace, SymplecticMap};
use dynloc::tensor::{self, DenseTensor};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rand_c(rng: &mut ChaCha8Rng) -> Complex64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn rand_cmat(r: usize, k: usize, rng: &mut ChaCha8Rng) -> CMat {
    CMat::from_fn(r, k, |_, _| rand_c(rng))
}

pub fn rand_rmat(r: usize, k: usize, rng: &mut ChaCha8Rng) -> RMat {
    RMat::from_fn(r, k, |_, _| rng.gen_range(-1.0..1.0))
}

/// Identity plus a small random part: invertible and well conditioned.
pub fn near_identity(n: usize, rng: &mut ChaCha8Rng) -> CMat {
    CMat::identity(n, n) + rand_cmat(n, n, rng) * c(0.3 / n as f64, 0.0)
}

fn real_imag(v: &CMat) -> RMat {
    let (n, k) = v.shape();
    RMat::from_fn(2 * n, k, |i, j| if i < n { v[(i, j)].re } else { v[(i - n, j)].im })
}

/// Residual of mutual containment of two orthonormal bases, or infinity if
/// the dimensions differ.
fn same_span<T>(a: &nalgebra::DMatrix<T>, b: &nalgebra::DMatrix<T>) -> f64
where
    T: linalg::Scalar,
{
    if a.ncols() != b.ncols() {
        return f64::INFINITY;
    }
    linalg::max_residual(a, b).max(linalg::max_residual(b, a))
}

fn fail(what: &str, v: f64) -> String {
    format!("{what} ({v:.3e})")
}

/// One randomized instance of the category operations. The space is
/// `C^{2k}` with the standard form and conjugation transported by a random
/// `P`; subspaces and the kernel of the equalizer are built from real data
/// moved by `P`, so the expected answers are known.
pub fn category_instance(rng: &mut ChaCha8Rng, tol: f64) -> Result<f64, String> {
    let k = rng.gen_range(1..=3);
    let n = 2 * k;
    let std = PreSymplecticSpace::standard(k);
    let p = near_identity(n, rng);
    let pinv = p.clone().try_inverse().ok_or("singular transport")?;
    let pbar_inv = linalg::conj(&p).try_inverse().ok_or("singular transport")?;
    let sigma = pinv.transpose() * &std.sigma * &pinv;
    let conj = &p * &pbar_inv;
    let space = PreSymplecticSpace::new(FieldKind::Complex, sigma, conj).map_err(|e| e.to_string())?;
    if !space.is_weakly_nondegenerate() {
        return Err("transported space degenerate".into());
    }
    let mut worst = 0.0f64;
    let mut note = |v: f64, what: &str| -> Result<(), String> {
        worst = worst.max(v);
        if v > tol {
            Err(fail(what, v))
        } else {
            Ok(())
        }
    };

    // two C-invariant subspaces sharing `s` real directions
    let s = rng.gen_range(0..=k);
    let (r1, r2) = (rng.gen_range(s..=n), rng.gen_range(s..=n));
    let shared = rand_rmat(n, s, rng);
    let a1 = linalg::hcat(&shared, &rand_rmat(n, r1 - s, rng));
    let a2 = linalg::hcat(&shared, &rand_rmat(n, r2 - s, rng));
    let w1 = Subspace::span(&(&p * linalg::to_complex(&a1)), linalg::DEFAULT_TOL);
    let w2 = Subspace::span(&(&p * linalg::to_complex(&a2)), linalg::DEFAULT_TOL);
    let meet = sy::intersect(&[&w1, &w2]).map_err(|e| e.to_string())?;
    let join = sy::union(&[&w1, &w2]).map_err(|e| e.to_string())?;
    for (w, name) in [(&w1, "W1"), (&w2, "W2"), (&meet, "meet"), (&join, "join")] {
        if !space.is_c_invariant(w) {
            return Err(format!("{name} not C-invariant"));
        }
    }
    if meet.dim() + join.dim() != w1.dim() + w2.dim() {
        return Err(format!("dimension formula {} + {} vs {} + {}", meet.dim(), join.dim(), w1.dim(), w2.dim()));
    }
    let generic = (r1 + r2).saturating_sub(n).max(s).min(r1.min(r2));
    if meet.dim() != generic {
        return Err(format!("meet dim {} expected {generic}", meet.dim()));
    }
    note(linalg::max_residual(&w1.basis, &meet.basis), "meet in W1")?;
    note(linalg::max_residual(&w2.basis, &meet.basis), "meet in W2")?;
    note(linalg::max_residual(&join.basis, &w1.basis), "W1 in join")?;
    note(linalg::max_residual(&join.basis, &w2.basis), "W2 in join")?;
    let swapped = sy::intersect(&[&w2, &w1]).map_err(|e| e.to_string())?;
    note(same_span(&meet.basis, &swapped.basis), "meet symmetric")?;

    // equalizer of the identity and a transported symplectic shear
    let rank_s = rng.gen_range(0..=k);
    let mut shear = RMat::zeros(k, k);
    for _ in 0..rank_s {
        let z = rand_rmat(k, 1, rng);
        shear += &z * z.transpose() * rng.gen_range(0.5..1.5);
    }
    let a = RMat::identity(k, k) + rand_rmat(k, k, rng) * (0.3 / k as f64);
    let a_inv_t = a.clone().try_inverse().ok_or("singular block")?.transpose();
    let mut g0 = RMat::identity(n, n);
    g0.view_mut((0, k), (k, k)).copy_from(&shear);
    let mut mix = RMat::zeros(n, n);
    mix.view_mut((0, 0), (k, k)).copy_from(&a);
    mix.view_mut((k, k), (k, k)).copy_from(&a_inv_t);
    let mix_inv = mix.clone().try_inverse().ok_or("singular mix")?;
    let g_real = &mix * g0 * &mix_inv;
    let g = SymplecticMap::new(space.clone(), space.clone(), &p * linalg::to_complex(&g_real) * &pinv)
        .map_err(|e| e.to_string())?;
    let f = SymplecticMap::identity(&space);
    let eq = sy::equalizer(&f, &g).map_err(|e| e.to_string())?;
    let ker_shear = linalg::null_space(&shear, linalg::DEFAULT_TOL);
    let mut expected = RMat::zeros(n, k + ker_shear.ncols());
    expected.view_mut((0, 0), (k, k)).copy_from(&RMat::identity(k, k));
    expected.view_mut((k, k), (k, ker_shear.ncols())).copy_from(&ker_shear);
    let expected_real = &mix * expected;
    let expected_c = linalg::orth(&(&p * linalg::to_complex(&expected_real)), linalg::DEFAULT_TOL);
    if !space.is_c_invariant(&eq) {
        return Err("equalizer not C-invariant".into());
    }
    note(same_span(&eq.basis, &expected_c), "equalizer vs known kernel")?;
    note(((&f.matrix - &g.matrix) * &eq.basis).norm(), "f = g on the equalizer")?;

    // realification commutes with meet, join and equalizer
    let re = |w: &Subspace| sy::realify_subspace(&space, w);
    for (w, name) in [(&w1, "W1"), (&w2, "W2"), (&meet, "meet"), (&join, "join"), (&eq, "equalizer")] {
        if re(w).ncols() != w.dim() {
            return Err(format!("real dimension of {name}: {} vs {}", re(w).ncols(), w.dim()));
        }
    }
    let t = 1e-8;
    note(same_span(&re(&meet), &linalg::span_intersect(&re(&w1), &re(&w2), t)), "realify/meet")?;
    note(same_span(&re(&join), &linalg::span_union(&[&re(&w1), &re(&w2)], linalg::DEFAULT_TOL)), "realify/join")?;
    let expected_re = linalg::orth(&real_imag(&(&p * linalg::to_complex(&expected_real))), linalg::DEFAULT_TOL);
    note(same_span(&re(&eq), &expected_re), "realify/equalizer")?;
    let (real, basis) = sy::realify(&space).map_err(|e| e.to_string())?;
    if real.dim() != n || !real.is_weakly_nondegenerate() {
        return Err("realified space has the wrong dimension or degenerates".into());
    }
    note((space.apply_conj(&basis) - &basis).norm(), "realified basis fixed by C")?;
    Ok(worst)
}

/// Tucker-form tensor with known support subspaces; checks both the
/// reconstruction of each support and envelope membership.
pub fn support_instance(rng: &mut ChaCha8Rng, tol: f64) -> Result<f64, String> {
    let order = rng.gen_range(2..=4);
    let d = rng.gen_range(2..=5);
    let ranks: Vec<usize> = (0..order).map(|_| rng.gen_range(1..=d)).collect();
    // a generic core has full multilinear rank only if each rank is at most
    // the product of the others
    let ranks: Vec<usize> = (0..order)
        .map(|i| ranks[i].min(ranks.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, r)| r).product()))
        .collect();
    let core: Vec<Complex64> = (0..ranks.iter().product::<usize>()).map(|_| rand_c(rng)).collect();
    let mut t = DenseTensor::from_data(&ranks, core).map_err(|e| e.to_string())?;
    let mut factors = Vec::new();
    for (k, &r) in ranks.iter().enumerate() {
        let u = rand_cmat(d, r, rng);
        t = t.mode_product(k, &u).map_err(|e| e.to_string())?;
        factors.push(linalg::orth(&u, linalg::DEFAULT_TOL));
    }
    let mut worst = 0.0f64;
    for (k, u) in factors.iter().enumerate() {
        let s = tensor::support_subspace(&t, k, tol).map_err(|e| e.to_string())?;
        if s.ncols() != ranks[k] {
            return Err(format!("mode {k}: support dim {} expected {}", s.ncols(), ranks[k]));
        }
        worst = worst.max(same_span(&s, u));
    }
    if !tensor::envelope_membership(&t, tol).map_err(|e| e.to_string())? {
        return Err("tensor outside its own envelope".into());
    }
    if worst > tol {
        return Err(fail("support reconstruction", worst));
    }
    Ok(worst)
}

/// Eigentensor of `S^{⊗n}` built from eigenvector tuples with a common
/// eigenvalue product; every support subspace must be `S`-invariant.
pub fn inv_supp_instance(rng: &mut ChaCha8Rng, tol: f64) -> Result<f64, String> {
    let order = rng.gen_range(2..=4);
    let d = rng.gen_range(2..=5);
    let q = near_identity(d, rng);
    let qinv = q.clone().try_inverse().ok_or("singular eigenbasis")?;
    // a few distinct eigenvalues, repeated, so that many tuples share a product
    let distinct: Vec<Complex64> = (0..rng.gen_range(1..=d)).map(|_| Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..6.28))).collect();
    let eig: Vec<Complex64> = (0..d).map(|i| distinct[if i < distinct.len() { i } else { rng.gen_range(0..distinct.len()) }]).collect();
    let s = &q * CMat::from_diagonal(&nalgebra::DVector::from_vec(eig.clone())) * &qinv;
    let base: Vec<usize> = (0..order).map(|_| rng.gen_range(0..d)).collect();
    let lambda: Complex64 = base.iter().map(|&i| eig[i]).product();
    let mut t = DenseTensor::zeros(&vec![d; order]).map_err(|e| e.to_string())?;
    let cols: Vec<Vec<Complex64>> = (0..d).map(|i| q.column(i).iter().cloned().collect()).collect();
    for _ in 0..rng.gen_range(1..=4) {
        // permute the base tuple, then swap indices within eigenvalue classes
        let mut tuple = base.clone();
        for i in (1..order).rev() {
            tuple.swap(i, rng.gen_range(0..=i));
        }
        for x in tuple.iter_mut() {
            let same: Vec<usize> = (0..d).filter(|&j| eig[j] == eig[*x]).collect();
            *x = same[rng.gen_range(0..same.len())];
        }
        let vs: Vec<&[Complex64]> = tuple.iter().map(|&i| cols[i].as_slice()).collect();
        t = t.add(&DenseTensor::outer(&vs).map_err(|e| e.to_string())?.scale(rand_c(rng)));
    }
    if !tensor::check_inv_supp(&s, &t, lambda, tol).map_err(|e| e.to_string())? {
        return Err("support not invariant".into());
    }
    let mut worst = 0.0f64;
    for k in 0..order {
        let u = tensor::support_subspace(&t, k, tol).map_err(|e| e.to_string())?;
        worst = worst.max(linalg::max_residual(&u, &(&s * &u)) / linalg::norm2(&s));
    }
    if worst > tol {
        return Err(fail("S U outside U", worst));
    }
    Ok(worst)
}

/// Random real one-form supported in the middle half of the lattice.
pub fn random_oneform(ps: &PhaseSpace, rng: &mut ChaCha8Rng) -> OneForm {
    let (nt, nx) = (ps.solver.nt(), ps.solver.nx());
    let mut w = OneForm::zeros(nt, nx);
    let (t0, x0) = (rng.gen_range(nt / 4..nt / 2), rng.gen_range(nx / 4..nx / 2));
    let (lt, lx) = (rng.gen_range(2..nt / 4), rng.gen_range(2..nx / 4));
    for n in t0..t0 + lt {
        for j in x0..x0 + lx {
            w.wt[n * nx + j] = c(rng.gen_range(-1.0..1.0), 0.0);
            w.wx[n * nx + j] = c(rng.gen_range(-1.0..1.0), 0.0);
        }
    }
    w
}

/// Random real function supported in the middle half of the lattice.
pub fn random_bump(ps: &PhaseSpace, rng: &mut ChaCha8Rng) -> GridField {
    let (nt, nx) = (ps.solver.nt(), ps.solver.nx());
    let mut f = GridField::zeros(nt, nx);
    let (t0, x0) = (rng.gen_range(nt / 4..nt / 2), rng.gen_range(nx / 4..nx / 2));
    for n in t0..t0 + rng.gen_range(2..nt / 4) {
        for j in x0..x0 + rng.gen_range(2..nx / 4) {
            f.values[n * nx + j] = c(rng.gen_range(-1.0..1.0), 0.0);
        }
    }
    f
}

pub struct CurrentChecks {
    /// Largest `|charge(E delta w)| / |E delta w|` over random `w`.
    pub charge: f64,
    /// Largest class norm of `E delta d chi` relative to `|chi|`.
    pub exact: f64,
    /// Largest class norm of `E delta w` for co-closed `w`, relative to the
    /// potential.
    pub coclosed: f64,
}

/// Charge and kernel checks of `w -> E delta w` on a massless lattice.
pub fn current_checks(ps: &PhaseSpace, count: usize, rng: &mut ChaCha8Rng) -> dynloc::Result<CurrentChecks> {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let fnorm = |f: &GridField| f.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut out = CurrentChecks { charge: 0.0, exact: 0.0, coclosed: 0.0 };
    for _ in 0..count {
        let w = random_oneform(ps, rng);
        let src = forms::codifferential_density(&ps.solver, &w);
        let v = ps.coords_real(&ps.solver.propagator_density(&src).re());
        out.charge = out.charge.max(current::charge(ps, &v).abs() / norm(&v));
        current::current_class(ps, &v)?;

        let chi = random_bump(ps, rng);
        let class = current::current_from_oneform(ps, &forms::exterior_d(&ps.solver, &chi))?;
        out.exact = out.exact.max(norm(&class) / fnorm(&chi));

        let psi = random_bump(ps, rng);
        let class = current::current_from_oneform(ps, &forms::coclosed_from_potential(&ps.solver, &psi)?)?;
        out.coclosed = out.coclosed.max(norm(&class) / fnorm(&psi));
    }
    Ok(out)
}
