//! Finite-dimensional pre-symplectic spaces with conjugation and the
//! category operations on them: equalizers, intersections, spans,
//! realification and restriction.
//!
//! An antilinear map is stored as a matrix `J` acting after entrywise
//! conjugation, `C(v) = J * conj(v)`.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RMat, DEFAULT_TOL};
use nalgebra::DMatrix;
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum FieldKind {
    Real,
    Complex,
}

/// `(V, sigma, C)` over the reals or complexes.
#[derive(Clone, Debug)]
pub struct PreSymplecticSpace {
    pub field: FieldKind,
    pub sigma: CMat,
    pub conj: CMat,
}

fn check_small(m: &CMat, what: &str, tol: f64) -> Result<()> {
    let n = m.norm();
    if n > tol {
        return Err(Error::InvalidSpace(format!("{what} violated (residual {n:.3e})")));
    }
    Ok(())
}

impl PreSymplecticSpace {
    /// Validating constructor.
    pub fn new(field: FieldKind, sigma: CMat, conj: CMat) -> Result<Self> {
        let n = sigma.nrows();
        if sigma.ncols() != n || conj.shape() != (n, n) {
            return Err(Error::Shape(format!(
                "sigma {:?} and conj {:?} must be square of one size",
                sigma.shape(),
                conj.shape()
            )));
        }
        let scale = 1.0 + sigma.norm();
        let tol = DEFAULT_TOL * scale;
        check_small(&(&sigma + sigma.transpose()), "antisymmetry", tol)?;
        check_small(
            &(&conj * linalg::conj(&conj) - CMat::identity(n, n)),
            "involution",
            DEFAULT_TOL * (1.0 + conj.norm()),
        )?;
        check_small(
            &(conj.transpose() * &sigma * &conj - linalg::conj(&sigma)),
            "conjugation compatibility",
            tol * (1.0 + conj.norm() * conj.norm()),
        )?;
        if field == FieldKind::Real {
            check_small(&sigma.map(|z| Complex64::new(0.0, z.im)), "real sigma", tol)?;
            check_small(&(&conj - CMat::identity(n, n)), "real conjugation is identity", tol)?;
        }
        Ok(PreSymplecticSpace { field, sigma, conj })
    }

    /// Real space with the given form.
    pub fn real(sigma: &RMat) -> Result<Self> {
        let n = sigma.nrows();
        Self::new(FieldKind::Real, linalg::to_complex(sigma), CMat::identity(n, n))
    }

    /// Complex space with entrywise conjugation.
    pub fn complex(sigma: CMat) -> Result<Self> {
        let n = sigma.nrows();
        Self::new(FieldKind::Complex, sigma, CMat::identity(n, n))
    }

    /// `C^{2k}` with the standard form `[[0, I], [-I, 0]]`.
    pub fn standard(k: usize) -> Self {
        let mut s = CMat::zeros(2 * k, 2 * k);
        for i in 0..k {
            s[(i, k + i)] = Complex64::new(1.0, 0.0);
            s[(k + i, i)] = Complex64::new(-1.0, 0.0);
        }
        Self::complex(s).expect("standard form is valid")
    }

    pub fn dim(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn form(&self, u: &CMat, v: &CMat) -> Complex64 {
        (u.transpose() * &self.sigma * v)[(0, 0)]
    }

    /// Apply the conjugation to each column.
    pub fn apply_conj(&self, v: &CMat) -> CMat {
        &self.conj * linalg::conj(v)
    }

    /// Rank of sigma equals the dimension.
    pub fn is_weakly_nondegenerate(&self) -> bool {
        linalg::rank(&self.sigma, DEFAULT_TOL) == self.dim()
    }

    pub fn full(&self) -> Subspace {
        Subspace { basis: CMat::identity(self.dim(), self.dim()), tol: DEFAULT_TOL }
    }

    pub fn zero(&self) -> Subspace {
        Subspace { basis: CMat::zeros(self.dim(), 0), tol: DEFAULT_TOL }
    }

    /// Whether the span of `w` is mapped into itself by the conjugation.
    pub fn is_c_invariant(&self, w: &Subspace) -> bool {
        linalg::contained_in(&self.apply_conj(&w.basis), &w.basis, 1e3 * w.tol)
    }
}

/// Linear span inside an ambient space of fixed dimension, stored as an
/// orthonormal basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub basis: CMat,
    pub tol: f64,
}

impl Subspace {
    pub fn span(vectors: &CMat, tol: f64) -> Self {
        Subspace { basis: linalg::orth(vectors, tol), tol }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn contains(&self, v: &CMat) -> bool {
        linalg::contained_in(v, &self.basis, self.tol.sqrt() * (1.0 + v.norm()))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        linalg::max_residual(&other.basis, &self.basis) <= self.tol.max(other.tol).sqrt()
    }

    pub fn same_as(&self, other: &Subspace) -> bool {
        self.dim() == other.dim() && self.is_subspace_of(other) && other.is_subspace_of(self)
    }
}

fn check_ambient(parts: &[&Subspace]) -> Result<usize> {
    let n = parts.first().map(|s| s.ambient_dim()).unwrap_or(0);
    if parts.iter().any(|s| s.ambient_dim() != n) {
        return Err(Error::Shape("subspaces live in different ambients".into()));
    }
    Ok(n)
}

pub fn intersect(parts: &[&Subspace]) -> Result<Subspace> {
    check_ambient(parts)?;
    let first = parts.first().ok_or_else(|| Error::Shape("empty list".into()))?;
    let tol = parts.iter().map(|s| s.tol).fold(0.0, f64::max);
    let mut acc = first.basis.clone();
    for s in &parts[1..] {
        acc = linalg::span_intersect(&acc, &s.basis, tol.sqrt());
    }
    Ok(Subspace { basis: acc, tol })
}

pub fn union(parts: &[&Subspace]) -> Result<Subspace> {
    let n = check_ambient(parts)?;
    let tol = parts.iter().map(|s| s.tol).fold(DEFAULT_TOL, f64::max);
    let mats: Vec<&CMat> = parts.iter().map(|s| &s.basis).collect();
    let basis = if mats.is_empty() { CMat::zeros(n, 0) } else { linalg::span_union(&mats, tol) };
    Ok(Subspace { basis, tol })
}

/// Injective linear map preserving forms and conjugations.
#[derive(Clone, Debug)]
pub struct SymplecticMap {
    pub domain: PreSymplecticSpace,
    pub codomain: PreSymplecticSpace,
    pub matrix: CMat,
}

impl SymplecticMap {
    pub fn new(domain: PreSymplecticSpace, codomain: PreSymplecticSpace, matrix: CMat) -> Result<Self> {
        if matrix.shape() != (codomain.dim(), domain.dim()) {
            return Err(Error::Shape(format!(
                "matrix {:?} does not map dim {} to dim {}",
                matrix.shape(),
                domain.dim(),
                codomain.dim()
            )));
        }
        if linalg::rank(&matrix, DEFAULT_TOL) != domain.dim() {
            return Err(Error::InvalidMap("not injective".into()));
        }
        let scale = 1.0 + matrix.norm() * matrix.norm() * (1.0 + codomain.sigma.norm());
        let pulled = matrix.transpose() * &codomain.sigma * &matrix - &domain.sigma;
        if pulled.norm() > DEFAULT_TOL * scale {
            return Err(Error::InvalidMap(format!("form not preserved ({:.3e})", pulled.norm())));
        }
        let inter = &matrix * &domain.conj - &codomain.conj * linalg::conj(&matrix);
        if inter.norm() > DEFAULT_TOL * scale {
            return Err(Error::InvalidMap(format!("conjugation not intertwined ({:.3e})", inter.norm())));
        }
        Ok(SymplecticMap { domain, codomain, matrix })
    }

    pub fn identity(space: &PreSymplecticSpace) -> Self {
        let n = space.dim();
        SymplecticMap { domain: space.clone(), codomain: space.clone(), matrix: CMat::identity(n, n) }
    }

    pub fn compose(&self, first: &SymplecticMap) -> Result<SymplecticMap> {
        SymplecticMap::new(first.domain.clone(), self.codomain.clone(), &self.matrix * &first.matrix)
    }
}

/// `ker(f - g)` as a subspace of the common domain.
pub fn equalizer(f: &SymplecticMap, g: &SymplecticMap) -> Result<Subspace> {
    if f.matrix.shape() != g.matrix.shape() {
        return Err(Error::Shape("equalizer of maps with different shapes".into()));
    }
    // scale by the maps, not by f - g, which may be pure roundoff
    let scale = linalg::norm2(&f.matrix).max(linalg::norm2(&g.matrix));
    let basis = linalg::null_space_abs(&(&f.matrix - &g.matrix), Some(scale), DEFAULT_TOL);
    let w = Subspace { basis, tol: DEFAULT_TOL };
    debug_assert!(f.domain.is_c_invariant(&w));
    Ok(w)
}

fn real_imag(v: &CMat) -> RMat {
    let (n, k) = v.shape();
    let mut out = RMat::zeros(2 * n, k);
    for j in 0..k {
        for i in 0..n {
            out[(i, j)] = v[(i, j)].re;
            out[(n + i, j)] = v[(i, j)].im;
        }
    }
    out
}

fn from_real_imag(r: &RMat) -> CMat {
    let n = r.nrows() / 2;
    DMatrix::from_fn(n, r.ncols(), |i, j| Complex64::new(r[(i, j)], r[(n + i, j)]))
}

/// Real basis of the fixed points of the conjugation, as `(Re; Im)` stacked
/// columns of length `2n`.
pub fn fixed_points(space: &PreSymplecticSpace) -> RMat {
    let n = space.dim();
    let a = space.conj.map(|z| z.re);
    let b = space.conj.map(|z| z.im);
    let id = RMat::identity(n, n);
    let mut m = RMat::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&(&a - &id));
    m.view_mut((0, n), (n, n)).copy_from(&b);
    m.view_mut((n, 0), (n, n)).copy_from(&b);
    m.view_mut((n, n), (n, n)).copy_from(&(-&a - &id));
    linalg::null_space_abs(&m, Some(1.0), DEFAULT_TOL)
}

/// Real-linear span of a complex subspace, in `(Re; Im)` coordinates.
pub fn realified_span(w: &Subspace) -> RMat {
    let i = Complex64::new(0.0, 1.0);
    let both = linalg::hcat(&real_imag(&w.basis), &real_imag(&w.basis.map(|z| z * i)));
    linalg::orth(&both, w.tol)
}

/// `W^C = W ∩ V^C`, as a real subspace in `(Re; Im)` coordinates.
pub fn realify_subspace(space: &PreSymplecticSpace, w: &Subspace) -> RMat {
    linalg::span_intersect(&realified_span(w), &fixed_points(space), w.tol.sqrt())
}

/// The real space `V^C` with the restricted form.
pub fn realify(space: &PreSymplecticSpace) -> Result<(PreSymplecticSpace, CMat)> {
    if space.field != FieldKind::Complex {
        return Err(Error::InvalidSpace("realify needs a complex space".into()));
    }
    let basis = from_real_imag(&fixed_points(space));
    let s = basis.transpose() * &space.sigma * &basis;
    let real = s.map(|z| z.re);
    Ok((PreSymplecticSpace::real(&real)?, basis))
}

/// Pull back sigma and C to a C-invariant subspace, in its orthonormal
/// basis.
pub fn restrict(space: &PreSymplecticSpace, w: &Subspace) -> Result<PreSymplecticSpace> {
    if !space.is_c_invariant(w) {
        return Err(Error::InvalidSpace("subspace is not C-invariant".into()));
    }
    let b = &w.basis;
    let sigma = b.transpose() * &space.sigma * b;
    let conj = b.adjoint() * &space.conj * linalg::conj(b);
    let field = space.field;
    if field == FieldKind::Real {
        // keep real coordinates: an orthonormal real basis exists for real
        // spans; fall back to complex when the basis picked up phases
        let is_real = b.iter().all(|z| z.im.abs() < 1e-12);
        if is_real {
            return PreSymplecticSpace::new(FieldKind::Real, sigma, CMat::identity(b.ncols(), b.ncols()));
        }
        return PreSymplecticSpace::new(FieldKind::Complex, sigma, conj);
    }
    PreSymplecticSpace::new(field, sigma, conj)
}
