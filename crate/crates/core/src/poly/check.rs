//! Locality of the polynomial quantization on a small lattice: generators
//! from the bullet subspace are fixed by `Q(rce)`, fixed symmetric tensors
//! are supported in the bullet subspace, and kinematic/dynamical algebras
//! are compared degree by degree.

use super::{multisets, support_space, sym_from_coords, sym_power_matrix, sym_power_span, PolyAlgebra, Rect, SymPoly};
use crate::error::{Error, Result};
use crate::lattice::{MetricPerturbation, Region};
use crate::linalg::{self, CMat, RMat};
use crate::locality::{self, Comparison, PhaseSpace, PhaseSubspace, Verdict, COMPARE_TOL, NULL_TOL};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Phase-space dimensions above this are refused.
pub const MAX_PHASE_DIM: usize = 32;

#[derive(Clone, Debug, Serialize)]
pub struct FixedDegree {
    pub degree: usize,
    /// Dimension of the symmetric tensors fixed by every sampled `Q(rce)`.
    pub fixed_dim: usize,
    /// Dimension of the degree part of the algebra of the bullet subspace.
    pub expected_dim: usize,
    /// Largest distance of a random fixed tensor's support from the bullet
    /// subspace.
    pub support_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BulletCheck {
    pub phase_dim: usize,
    pub bullet_dim: usize,
    pub samples: usize,
    /// Largest relative change of random bullet-generated elements under
    /// `Q(rce)`.
    pub generator_residual: f64,
    pub fixed: Vec<FixedDegree>,
}

impl BulletCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.generator_residual <= tol
            && self.fixed.iter().all(|f| f.fixed_dim == f.expected_dim && f.support_residual <= tol)
    }
}

fn guard(ps: &PhaseSpace) -> Result<()> {
    if ps.dim() > MAX_PHASE_DIM {
        return Err(Error::TooLarge(format!("phase space of dimension {} (limit {MAX_PHASE_DIM})", ps.dim())));
    }
    Ok(())
}

fn algebra(ps: &PhaseSpace, max_degree: usize) -> PolyAlgebra<Complex64> {
    let d = ps.dim();
    let id = RMat::identity(d, d);
    let s = linalg::to_complex(&ps.sigma_matrix(&id, &id));
    let c = CMat::identity(d, d);
    PolyAlgebra::new(super::Square::from_cmat(&s), super::Square::from_cmat(&c), max_degree)
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Random element of the subalgebra generated by the columns of `basis`:
/// a sum of products of random generators, one product per degree.
fn random_element(alg: &PolyAlgebra<Complex64>, basis: &RMat, rng: &mut ChaCha8Rng) -> Result<SymPoly<Complex64>> {
    let mut out = alg.scalar(Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
    for n in 1..=alg.max_degree {
        let mut term = alg.unit();
        for _ in 0..n {
            let c: Vec<Complex64> =
                (0..basis.ncols()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let u: Vec<Complex64> =
                (0..alg.dim).map(|i| (0..basis.ncols()).map(|j| basis[(i, j)] * c[j]).sum()).collect();
            term = alg.product(&term, &alg.generator(&u))?;
        }
        out = out.add(&term);
    }
    Ok(out)
}

/// Both inclusions between `Γ(bullet(K))` and the `Q(rce)`-fixed elements:
/// random elements of the former up to `degree` are fixed, and the fixed
/// symmetric tensors of each degree up to `fixed_degree` are exactly the
/// degree part of the former.
pub fn quantized_bullet_check(
    ps: &PhaseSpace,
    k: &Region,
    samples: &[MetricPerturbation],
    degree: usize,
    fixed_degree: usize,
    seed: u64,
) -> Result<BulletCheck> {
    guard(ps)?;
    let d = ps.dim();
    let bullet = ps.bullet_subspace(k);
    let cache = ps.rce_cache();
    let rces: Vec<CMat> =
        samples.iter().map(|h| ps.rce_matrix(h, &cache).map(|r| linalg::to_complex(&r))).collect::<Result<_>>()?;
    let alg = algebra(ps, degree);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut generator_residual = 0.0f64;
    for r in &rces {
        let a = random_element(&alg, &bullet.basis, &mut rng)?;
        let qa = alg.apply_map(&Rect::from_cmat(r), &a, &alg)?;
        generator_residual = generator_residual.max(qa.sub(&a).max_abs() / a.max_abs());
    }
    let bq = linalg::to_complex(&bullet.basis);
    let mut fixed = Vec::new();
    for n in 1..=fixed_degree {
        let size = multisets(d, n).len();
        let id = CMat::identity(size, size);
        let mut stacked = CMat::zeros(0, size);
        for r in &rces {
            stacked = linalg::vcat(&stacked, &(sym_power_matrix(r, n) - &id));
        }
        let scale = stacked.norm().max(1.0);
        let null = linalg::null_space_abs(&stacked, Some(scale), NULL_TOL);
        let mut support_residual = 0.0f64;
        for _ in 0..3 {
            if null.ncols() == 0 {
                break;
            }
            let w: Vec<Complex64> =
                (0..null.ncols()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let coords = &null * CMat::from_column_slice(w.len(), 1, &w);
            let mut t = SymPoly::zero(d, n);
            t.comps[n] = sym_from_coords(coords.as_slice(), d, n);
            let supp = support_space(&t, NULL_TOL);
            if supp.ncols() > 0 {
                support_residual = support_residual.max(linalg::max_residual(&bq, &supp));
            }
        }
        fixed.push(FixedDegree {
            degree: n,
            fixed_dim: null.ncols(),
            expected_dim: binom(bullet.dim() + n - 1, n),
            support_residual,
        });
    }
    Ok(BulletCheck { phase_dim: d, bullet_dim: bullet.dim(), samples: samples.len(), generator_residual, fixed })
}

/// Degree part of `Γ(W)` for a real subspace `W`, as a real subspace of
/// the flat tensors.
pub fn degree_part(w: &PhaseSubspace, n: usize) -> PhaseSubspace {
    let span = sym_power_span(&linalg::to_complex(&w.basis), n).map(|z| z.re);
    PhaseSubspace::span(w.level, &span)
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantizedVerdict {
    pub classical: Verdict,
    pub per_degree: Vec<Comparison>,
    /// `Equal` iff every degree compares equal, otherwise the verdict of
    /// the first unequal degree.
    pub verdict: Verdict,
}

/// Compare the algebras generated by `kin` and `dyn` in each degree up to
/// `degree`. Joins of generated subalgebras are the algebra of the joined
/// subspaces, so `dyn` is passed as one subspace.
pub fn quantized_verdict(kin: &PhaseSubspace, dyn_: &PhaseSubspace, degree: usize) -> Result<QuantizedVerdict> {
    if kin.ambient() > MAX_PHASE_DIM {
        return Err(Error::TooLarge(format!("phase space of dimension {} (limit {MAX_PHASE_DIM})", kin.ambient())));
    }
    let classical = locality::compare(kin, dyn_, COMPARE_TOL)?.verdict;
    let per_degree: Vec<Comparison> = (1..=degree)
        .map(|n| locality::compare(&degree_part(kin, n), &degree_part(dyn_, n), COMPARE_TOL))
        .collect::<Result<_>>()?;
    let verdict = per_degree.iter().map(|c| c.verdict).find(|v| *v != Verdict::Equal).unwrap_or(Verdict::Equal);
    Ok(QuantizedVerdict { classical, per_degree, verdict })
}

/// Relative distance of `u ⊙ u` from the degree-two part of `Γ(W)`.
pub fn square_distance(w: &PhaseSubspace, u: &[f64]) -> f64 {
    let n = u.len();
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            t[i * n + j] = u[i] * u[j];
        }
    }
    let norm = t.iter().map(|x| x * x).sum::<f64>().sqrt();
    degree_part(w, 2).distance(&t) / norm
}
