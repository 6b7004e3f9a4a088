//! Kinematic, bullet and dynamical subspaces of the lattice field, the
//! sampled relative-Cauchy-evolution oracle, and subspace comparison.
//!
//! Solutions are coordinatized by their Cauchy data on the middle level in
//! balanced coordinates `(phi, dt * pi)` restricted to active nodes (all
//! nodes on a circle, interior nodes on a line). All spans are real, hence
//! invariant under complex conjugation; the complex subspaces are their
//! complexifications.

pub mod current;
pub mod sampler;

use crate::error::{Error, Result};
use crate::kg::{CauchyData, GridField, Solver};
use crate::lattice::{self, LatticeSpacetime, MetricPerturbation, Region, Topology};
use crate::linalg::{self, RMat};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Containment tolerance of subspace comparisons.
pub const COMPARE_TOL: f64 = 1e-6;
/// Relative singular-value cut for constraint null spaces.
pub const NULL_TOL: f64 = 1e-9;

/// Linear subspace of Cauchy data at `level`, orthonormal columns.
#[derive(Clone, Debug)]
pub struct PhaseSubspace {
    pub level: usize,
    pub basis: RMat,
    pub tol: f64,
}

impl PhaseSubspace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient(&self) -> usize {
        self.basis.nrows()
    }

    pub fn span(level: usize, vectors: &RMat) -> Self {
        PhaseSubspace { level, basis: linalg::orth(vectors, linalg::DEFAULT_TOL), tol: COMPARE_TOL }
    }

    pub fn zero(level: usize, ambient: usize) -> Self {
        PhaseSubspace { level, basis: RMat::zeros(ambient, 0), tol: COMPARE_TOL }
    }

    /// Span of both.
    pub fn join(&self, other: &PhaseSubspace) -> PhaseSubspace {
        PhaseSubspace::span(self.level, &linalg::hcat(&self.basis, &other.basis))
    }

    pub fn meet(&self, other: &PhaseSubspace) -> PhaseSubspace {
        PhaseSubspace {
            level: self.level,
            basis: linalg::span_intersect(&self.basis, &other.basis, self.tol.sqrt()),
            tol: self.tol,
        }
    }

    /// Distance of `v` to the subspace.
    pub fn distance(&self, v: &[f64]) -> f64 {
        let col = RMat::from_column_slice(v.len(), 1, v);
        linalg::residual(&self.basis, &col).norm()
    }

    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        self.distance(v) <= tol * n.max(f64::MIN_POSITIVE)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Equal,
    AStrictlyInB,
    BStrictlyInA,
    Incomparable,
}

#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub verdict: Verdict,
    pub dim_a: usize,
    pub dim_b: usize,
    /// Largest residual of A's basis against B, and of B's against A.
    pub a_in_b: f64,
    pub b_in_a: f64,
    /// Unit vector of the larger space farthest from the smaller one.
    pub witness: Option<Vec<f64>>,
    pub witness_distance: f64,
}

fn top_residual(q: &RMat, v: &RMat) -> (f64, Option<Vec<f64>>) {
    if v.ncols() == 0 {
        return (0.0, None);
    }
    let r = linalg::residual(q, v);
    let svd = linalg::svd(&r);
    let (k, s) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc });
    if s == 0.0 {
        return (0.0, None);
    }
    let vt = svd.v_t;
    let coeffs = vt.row(k).transpose();
    let w = v * coeffs;
    let n = w.norm();
    (s, Some(w.iter().map(|x| x / n).collect()))
}

/// Mutual containment at tolerance, with a witness on strict inclusion.
pub fn compare(a: &PhaseSubspace, b: &PhaseSubspace, tol: f64) -> Result<Comparison> {
    if a.ambient() != b.ambient() || a.level != b.level {
        return Err(Error::Shape("subspaces over different phase spaces".into()));
    }
    let (ab, wa) = top_residual(&b.basis, &a.basis);
    let (ba, wb) = top_residual(&a.basis, &b.basis);
    let a_in_b = ab <= tol;
    let b_in_a = ba <= tol;
    let (verdict, witness, wd) = match (a_in_b, b_in_a) {
        (true, true) => (Verdict::Equal, None, 0.0),
        (true, false) => (Verdict::AStrictlyInB, wb, ba),
        (false, true) => (Verdict::BStrictlyInA, wa, ab),
        (false, false) => (Verdict::Incomparable, wb, ba),
    };
    Ok(Comparison { verdict, dim_a: a.dim(), dim_b: b.dim(), a_in_b: ab, b_in_a: ba, witness, witness_distance: wd })
}

/// Solution space of one spacetime and mass, with the maps from reference
/// data to the field on every level.
pub struct PhaseSpace {
    pub solver: Solver,
    pub level: usize,
    pub active: Vec<usize>,
    maps: Vec<RMat>,
}

impl PhaseSpace {
    pub fn new(m: &LatticeSpacetime, mass: f64) -> Self {
        Self::from_solver(Solver::new(m, mass))
    }

    pub fn from_solver(solver: Solver) -> Self {
        let level = solver.nt() / 2;
        let active: Vec<usize> = solver.active().collect();
        let nact = active.len();
        let (nt, nx) = (solver.nt(), solver.nx());
        let mut maps = vec![RMat::zeros(nact, 2 * nact); nt];
        let mut ps = PhaseSpace { solver, level, active, maps: vec![] };
        for i in 0..2 * nact {
            let mut v = vec![0.0; 2 * nact];
            v[i] = 1.0;
            let field = ps.field_real(&v);
            for (n, map) in maps.iter_mut().enumerate() {
                for (a, &j) in ps.active.iter().enumerate() {
                    map[(a, i)] = field[n * nx + j];
                }
            }
        }
        ps.maps = maps;
        ps
    }

    pub fn m(&self) -> &LatticeSpacetime {
        &self.solver.m
    }

    pub fn dim(&self) -> usize {
        2 * self.active.len()
    }

    fn ratio(&self) -> f64 {
        self.solver.m.dx / self.solver.m.dt
    }

    /// Full-grid `(phi, p)` from balanced coordinates.
    pub fn unpack(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let nx = self.solver.nx();
        let nact = self.active.len();
        let mut phi = vec![0.0; nx];
        let mut p = vec![0.0; nx];
        let r = self.ratio();
        for (a, &j) in self.active.iter().enumerate() {
            phi[j] = v[a];
            p[j] = v[nact + a] * r;
        }
        (phi, p)
    }

    pub fn pack(&self, phi: &[f64], p: &[f64]) -> Vec<f64> {
        let nact = self.active.len();
        let mut v = vec![0.0; 2 * nact];
        let r = self.ratio();
        for (a, &j) in self.active.iter().enumerate() {
            v[a] = phi[j];
            v[nact + a] = p[j] / r;
        }
        v
    }

    pub fn field_real(&self, v: &[f64]) -> Vec<f64> {
        let (phi, p) = self.unpack(v);
        self.solver.evolve_real(self.level, &phi, &p)
    }

    pub fn field(&self, v: &[f64]) -> GridField {
        GridField::from_real(self.solver.nt(), self.solver.nx(), &self.field_real(v))
    }

    /// Balanced coordinates of a real solution.
    pub fn coords_real(&self, field: &[f64]) -> Vec<f64> {
        let nx = self.solver.nx();
        let phi = &field[self.level * nx..(self.level + 1) * nx];
        let p = self.solver.momentum_real(field, self.level);
        self.pack(phi, &p)
    }

    /// Real and imaginary balanced coordinates of a solution.
    pub fn coords(&self, field: &GridField) -> (Vec<f64>, Vec<f64>) {
        (self.coords_real(&field.re()), self.coords_real(&field.im()))
    }

    pub fn cauchy_data(&self, v: &[f64]) -> CauchyData {
        let (phi, p) = self.unpack(v);
        let dx = self.solver.m.dx;
        CauchyData {
            level: self.level,
            phi: phi.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            pi: p.iter().map(|&x| Complex64::new(x / dx, 0.0)).collect(),
        }
    }

    /// Row giving `phi(n, j)` as a functional of the data; zero on pinned
    /// nodes.
    pub fn row(&self, n: usize, j: usize) -> Option<nalgebra::RowDVector<f64>> {
        let a = self.active.iter().position(|&x| x == j)?;
        Some(self.maps[n].row(a).into_owned())
    }

    /// `sigma(u, v)` in balanced coordinates.
    pub fn sigma(&self, u: &[f64], v: &[f64]) -> f64 {
        let nact = self.active.len();
        let r = self.ratio();
        (0..nact).map(|a| u[a] * v[nact + a] - v[a] * u[nact + a]).sum::<f64>() * r
    }

    /// Matrix of sigma between the columns of `a` and `b`.
    pub fn sigma_matrix(&self, a: &RMat, b: &RMat) -> RMat {
        let nact = self.active.len();
        let r = self.ratio();
        let a_phi = a.rows(0, nact);
        let a_w = a.rows(nact, nact);
        let b_phi = b.rows(0, nact);
        let b_w = b.rows(nact, nact);
        (a_phi.transpose() * b_w - a_w.transpose() * b_phi) * r
    }

    /// Data of `E delta_{(n, j)}`, up to normalization: the sigma-dual of
    /// the row functional.
    fn kin_vector(&self, n: usize, j: usize) -> Option<Vec<f64>> {
        let r = self.row(n, j)?;
        let nact = self.active.len();
        let mut u = vec![0.0; 2 * nact];
        for a in 0..nact {
            u[a] = r[nact + a];
            u[nact + a] = -r[a];
        }
        Some(u)
    }

    /// `E C_0(O)`: span of `E delta` over the nodes of `O`.
    pub fn kin_subspace(&self, o: &Region) -> Result<PhaseSubspace> {
        if o.is_empty() {
            return Err(Error::Region("empty region".into()));
        }
        let vecs: Vec<Vec<f64>> = o.sites().iter().filter_map(|&(n, j)| self.kin_vector(n, j)).collect();
        let mut mat = RMat::zeros(self.dim(), vecs.len());
        for (c, v) in vecs.iter().enumerate() {
            mat.set_column(c, &nalgebra::DVector::from_column_slice(v));
        }
        Ok(PhaseSubspace::span(self.level, &mat))
    }

    /// Constraint rows attached to the nodes of `perp` on level `n`. The
    /// lattice stress at a node is built from the field there (massive case)
    /// and its differences along the incident edges, so all of these vanish.
    fn constraint_rows(&self, perp: &Region, n: usize) -> RMat {
        let m = self.m();
        let row = |n: usize, j: usize| -> nalgebra::RowDVector<f64> {
            self.row(n, j).unwrap_or_else(|| nalgebra::RowDVector::zeros(self.dim()))
        };
        let mut rows: Vec<nalgebra::RowDVector<f64>> = Vec::new();
        for j in 0..m.nx {
            if !perp.contains(n, j) {
                continue;
            }
            if self.solver.mass > 0.0 && self.row(n, j).is_some() {
                rows.push(row(n, j));
            }
            let mut nbrs = vec![];
            for d in [-1isize, 1] {
                if let Some(k) = m.shift(j, d) {
                    nbrs.push((n, k));
                }
            }
            if n + 1 < m.nt {
                nbrs.push((n + 1, j));
            }
            if n > 0 {
                nbrs.push((n - 1, j));
            }
            for (a, b) in nbrs {
                // each edge inside `perp` once
                if perp.contains(a, b) && (a, b) < (n, j) {
                    continue;
                }
                let r = row(a, b) - row(n, j);
                if r.amax() > 0.0 {
                    rows.push(r);
                }
            }
        }
        let mut out = RMat::zeros(rows.len(), self.dim());
        for (i, r) in rows.iter().enumerate() {
            out.set_row(i, r);
        }
        out
    }

    /// Solutions whose lattice stress vanishes on the causal complement of
    /// `K`, by successive null-space refinement level by level.
    pub fn bullet_subspace(&self, k: &Region) -> PhaseSubspace {
        let m = self.m();
        let perp = lattice::causal_complement(m, k);
        let (lo, hi) = k.level_range().unwrap_or((self.level, self.level));
        let mid = (lo + hi) / 2;
        let mut order = vec![mid];
        for d in 1..m.nt {
            if mid + d < m.nt {
                order.push(mid + d);
            }
            if d <= mid {
                order.push(mid - d);
            }
        }
        let mut basis = RMat::identity(self.dim(), self.dim());
        for n in order {
            if basis.ncols() == 0 {
                break;
            }
            let r = self.constraint_rows(&perp, n);
            if r.nrows() == 0 {
                continue;
            }
            let rn = &r * &basis;
            let scale = (0..r.nrows()).map(|i| r.row(i).norm()).fold(0.0, f64::max).max(1.0);
            if rn.amax() <= NULL_TOL * scale * 1e-2 {
                continue;
            }
            let null = linalg::null_space_abs(&rn, Some(scale), NULL_TOL);
            basis = linalg::orth(&(&basis * null), linalg::DEFAULT_TOL);
        }
        PhaseSubspace { level: self.level, basis, tol: COMPARE_TOL }
    }

    /// Span of the bullet subspaces of the generator diamonds inside `O`.
    pub fn dyn_subspace(&self, o: &Region) -> Result<PhaseSubspace> {
        let gens = lattice::enumerate_kb(self.m(), o)?;
        let mut acc = RMat::zeros(self.dim(), 0);
        for k in &gens {
            let b = self.bullet_subspace(k);
            acc = linalg::orth(&linalg::hcat(&acc, &b.basis), linalg::DEFAULT_TOL);
        }
        Ok(PhaseSubspace { level: self.level, basis: acc, tol: COMPARE_TOL })
    }

    /// Locally constant solutions: constants on a circle, nothing on a line.
    pub fn locally_constant(&self) -> PhaseSubspace {
        if self.m().topology != Topology::Circle || self.solver.mass > 0.0 {
            return PhaseSubspace::zero(self.level, self.dim());
        }
        let mut v = RMat::zeros(self.dim(), 1);
        for a in 0..self.active.len() {
            v[(a, 0)] = 1.0;
        }
        PhaseSubspace::span(self.level, &v)
    }

    /// Data-space matrix of `rce[h]`.
    pub fn rce_matrix(&self, h: &MetricPerturbation, cache: &RceCache) -> Result<RMat> {
        let mh = lattice::perturb(self.m(), h)?;
        let sh = Solver::new(&mh, self.solver.mass);
        let n = self.dim();
        let top = self.m().nt - 1;
        let mut back = RMat::zeros(n, n);
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let (phi, p) = self.unpack(&e);
            let (q, pq) = sh.transport_real(top, 0, &phi, &p);
            back.set_column(i, &nalgebra::DVector::from_vec(self.pack(&q, &pq)));
        }
        Ok(&cache.up * back * &cache.to_top)
    }

    pub fn rce_cache(&self) -> RceCache {
        let n = self.dim();
        let top = self.m().nt - 1;
        let mut to_top = RMat::zeros(n, n);
        let mut up = RMat::zeros(n, n);
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let (phi, p) = self.unpack(&e);
            let (a, b) = self.solver.transport_real(self.level, top, &phi, &p);
            to_top.set_column(i, &nalgebra::DVector::from_vec(self.pack(&a, &b)));
            let (c, d) = self.solver.transport_real(0, self.level, &phi, &p);
            up.set_column(i, &nalgebra::DVector::from_vec(self.pack(&c, &d)));
        }
        RceCache { to_top, up }
    }

    /// Intersection of `ker(rce[h_i] - id)` over the sampled perturbations.
    pub fn rce_invariant_subspace(&self, samples: &[MetricPerturbation]) -> Result<PhaseSubspace> {
        if samples.is_empty() {
            return Ok(PhaseSubspace { level: self.level, basis: RMat::identity(self.dim(), self.dim()), tol: COMPARE_TOL });
        }
        let cache = self.rce_cache();
        let n = self.dim();
        let mut stacked = RMat::zeros(0, n);
        for h in samples {
            let r = self.rce_matrix(h, &cache)? - RMat::identity(n, n);
            stacked = linalg::vcat(&stacked, &r);
        }
        let basis = linalg::null_space_abs(&stacked, Some(1.0), RCE_TOL);
        Ok(PhaseSubspace { level: self.level, basis, tol: COMPARE_TOL })
    }

    /// Whether `O1`, `O2` have trivially intersecting kinematic subspaces.
    pub fn extended_locality(&self, o1: &Region, o2: &Region) -> Result<bool> {
        if !lattice::causally_disjoint(self.m(), o1, o2) {
            return Err(Error::Region("regions are not causally disjoint".into()));
        }
        let a = self.kin_subspace(o1)?;
        let b = self.kin_subspace(o2)?;
        Ok(a.meet(&b).dim() == 0)
    }

    /// Largest `|sigma|` between unit vectors of two subspaces.
    pub fn max_sigma(&self, a: &PhaseSubspace, b: &PhaseSubspace) -> f64 {
        if a.dim() == 0 || b.dim() == 0 {
            return 0.0;
        }
        self.sigma_matrix(&a.basis, &b.basis).amax()
    }
}

/// Absolute singular-value cut for the sampled fixed-point intersection.
pub const RCE_TOL: f64 = 1e-8;

/// Level transports shared by all rce matrices of one phase space.
pub struct RceCache {
    to_top: RMat,
    up: RMat,
}
