//! Locality of the Weyl quantization: fixed labels of sampled rce
//! families against the bullet subspace, and kinematic/dynamical Weyl
//! algebras with the factorization of dynamical generators.

use super::{add, family_fixed_labels, multiply, rational_labels, Label, LabelSpace, WeylElement};
use crate::error::{Error, Result};
use crate::exact::{to_f64, QMat, Q};
use crate::lattice::{MetricPerturbation, Region};
use crate::linalg::{self, RMat};
use crate::locality::{self, Comparison, PhaseSpace, PhaseSubspace, Verdict, COMPARE_TOL, NULL_TOL};
use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Family parameters: four points at each of two scales.
pub const FAMILY_POINTS: [f64; 8] = [1.0, -1.0, 0.5, -0.5, 0.1, -0.1, 0.05, -0.05];
/// Rounding tolerance for rational labels and matrices.
pub const RATIONAL_TOL: f64 = 1e-9;

/// Label space of a lattice phase space, with the form rounded to rationals.
pub fn label_space(ps: &PhaseSpace) -> Result<LabelSpace> {
    let d = ps.dim();
    let id = RMat::identity(d, d);
    let s = ps.sigma_matrix(&id, &id);
    // exact antisymmetry after rounding the upper triangle
    let mut q = QMat::from_f64(&s, 1e-12);
    for i in 0..d {
        q.set(i, i, Q::zero());
        for j in 0..i {
            let x = -q.get(j, i).clone();
            q.set(i, j, x);
        }
    }
    LabelSpace::new(q)
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyCheck {
    pub members: usize,
    pub fixed_dim: usize,
    pub bullet_dim: usize,
    pub comparison: Comparison,
}

/// `rce[s h]` for each sampled `h` and each family point `s`; the family
/// passes through the identity at `s = 0`.
pub fn rce_family(ps: &PhaseSpace, samples: &[MetricPerturbation]) -> Result<Vec<RMat>> {
    let cache = ps.rce_cache();
    let mut out = Vec::new();
    for h in samples {
        for &s in &FAMILY_POINTS {
            out.push(ps.rce_matrix(&h.scaled(s), &cache)?);
        }
    }
    Ok(out)
}

/// Labels fixed by the sampled rce families, compared with `bullet(K)`.
pub fn family_check(ps: &PhaseSpace, k: &Region, samples: &[MetricPerturbation]) -> Result<FamilyCheck> {
    let family = rce_family(ps, samples)?;
    let fixed = PhaseSubspace::span(ps.level, &family_fixed_labels(&family, NULL_TOL)?);
    let bullet = ps.bullet_subspace(k);
    Ok(FamilyCheck {
        members: family.len(),
        fixed_dim: fixed.dim(),
        bullet_dim: bullet.dim(),
        comparison: locality::compare(&bullet, &fixed, COMPARE_TOL)?,
    })
}

/// `W(u) = e^{i phase} W(u_1) ... W(u_n)` with `u_i` in the bullet
/// subspace of the `i`-th generator region.
#[derive(Clone, Debug, Serialize)]
pub struct Factorization {
    pub factors: usize,
    /// Largest distance of a rounded factor label from its bullet subspace,
    /// relative to the label norm.
    pub factor_residual: f64,
    /// Distance between the product of the factors and the predicted
    /// multiple of `W(u)`.
    pub product_residual: f64,
    /// Relative distance between the exact sum of the factors and the
    /// floating target label.
    pub label_error: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Split a random label of the joined bullet subspaces into factors and
/// verify the product identity exactly in the labels.
pub fn factorize(space: &LabelSpace, bullets: &[PhaseSubspace], rng: &mut ChaCha8Rng) -> Result<Factorization> {
    let d = space.dim();
    let all = bullets.iter().fold(RMat::zeros(d, 0), |acc, b| linalg::hcat(&acc, &b.basis));
    if all.ncols() == 0 {
        return Err(Error::InvalidSpace("no generator labels".into()));
    }
    let coeffs = RMat::from_fn(all.ncols(), 1, |_, _| rng.gen_range(-1.0..1.0));
    let target = &all * &coeffs;
    let svd = linalg::svd(&all);
    let cut = svd.singular_values.max() * 1e-12;
    let pinv_target = {
        let ut = svd.u.transpose() * &target;
        let scaled = RMat::from_fn(ut.nrows(), 1, |i, _| {
            let s = svd.singular_values[i];
            if s > cut {
                ut[(i, 0)] / s
            } else {
                0.0
            }
        });
        svd.v_t.transpose() * scaled
    };
    let tn = target.norm();
    let mut factors: Vec<Label> = Vec::new();
    let mut factor_residual = 0.0f64;
    let mut offset = 0;
    for b in bullets {
        let c = pinv_target.rows(offset, b.dim()).into_owned();
        offset += b.dim();
        let ui = &b.basis * c;
        if ui.norm() <= 1e-14 * tn {
            continue;
        }
        let q = rational_labels(&ui, RATIONAL_TOL * ui.amax().max(1e-300)).remove(0);
        let qf: Vec<f64> = q.iter().map(to_f64).collect();
        factor_residual = factor_residual.max(b.distance(&qf) / tn);
        factors.push(q);
    }
    let sum = factors.iter().skip(1).fold(factors[0].clone(), |acc, u| add(&acc, u));
    let sum_f: Vec<f64> = sum.iter().map(to_f64).collect();
    let label_error = norm(&sum_f.iter().zip(target.iter()).map(|(a, b)| a - b).collect::<Vec<_>>()) / tn;
    let mut product = WeylElement::unit(space);
    let mut phase = 0.0;
    for (i, u) in factors.iter().enumerate() {
        product = multiply(space, &product, &WeylElement::generator(u.clone()))?;
        for v in &factors[..i] {
            phase -= to_f64(&space.form(v, u)) / 2.0;
        }
    }
    let predicted = WeylElement::term(sum, Complex64::from_polar(1.0, phase));
    Ok(Factorization {
        factors: factors.len(),
        factor_residual,
        product_residual: product.distance(&predicted),
        label_error,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylVerdict {
    pub verdict: Verdict,
    pub classical: Comparison,
    pub factorization: Factorization,
    /// On strict inclusion: relative distance of the rounded witness label
    /// from the kinematic labels, so that `W(witness)` lies outside the
    /// kinematic algebra.
    pub witness_label_distance: Option<f64>,
}

/// Weyl algebras of `kin` and of the join of `bullets`. Distinct labels
/// give linearly independent generators, so the algebras compare as their
/// label subspaces do.
pub fn weyl_verdict(ps: &PhaseSpace, kin: &PhaseSubspace, bullets: &[PhaseSubspace], seed: u64) -> Result<WeylVerdict> {
    let space = label_space(ps)?;
    let dyn_ = bullets.iter().skip(1).fold(bullets[0].clone(), |acc, b| acc.join(b));
    let classical = locality::compare(kin, &dyn_, COMPARE_TOL)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factorization = factorize(&space, bullets, &mut rng)?;
    let witness_label_distance = classical.witness.as_ref().map(|w| {
        let col = RMat::from_column_slice(w.len(), 1, w);
        let q = rational_labels(&col, RATIONAL_TOL).remove(0);
        let qf: Vec<f64> = q.iter().map(to_f64).collect();
        kin.distance(&qf) / norm(&qf)
    });
    Ok(WeylVerdict { verdict: classical.verdict, classical, factorization, witness_label_distance })
}
