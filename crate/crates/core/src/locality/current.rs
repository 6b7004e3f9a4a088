//! The massless current: charge-free solutions modulo locally constant
//! ones, and its kinematic, bullet and dynamical subspaces.
//!
//! Quotients are represented by preimages, so every subspace here contains
//! the locally constant solutions and comparisons are made upstairs.

use super::{PhaseSpace, PhaseSubspace, NULL_TOL};
use crate::error::{Error, Result};
use crate::kg::forms::{self, OneForm};
use crate::lattice::{self, Interval, Region};
use crate::linalg::{self, RMat};

/// Charge of a solution given in balanced coordinates.
pub fn charge(ps: &PhaseSpace, v: &[f64]) -> f64 {
    let nact = ps.active.len();
    v[nact..].iter().sum::<f64>() * ps.solver.m.dx / ps.solver.m.dt
}

fn charge_row(ps: &PhaseSpace) -> RMat {
    let nact = ps.active.len();
    let r = ps.solver.m.dx / ps.solver.m.dt;
    RMat::from_fn(1, ps.dim(), |_, c| if c >= nact { r } else { 0.0 })
}

fn require_massless(ps: &PhaseSpace) -> Result<()> {
    if ps.solver.mass != 0.0 {
        return Err(Error::InvalidSpace("the current is defined for the massless field".into()));
    }
    Ok(())
}

/// Charge-free part of a subspace.
pub fn charge_free(ps: &PhaseSpace, s: &PhaseSubspace) -> PhaseSubspace {
    if s.dim() == 0 {
        return s.clone();
    }
    let c = charge_row(ps) * &s.basis;
    let null = linalg::null_space_abs(&c, Some(c.norm().max(1.0)), NULL_TOL);
    PhaseSubspace::span(s.level, &(&s.basis * null))
}

/// Representative of the class of `v` orthogonal to the locally constant
/// solutions. Fails on charged data.
pub fn current_class(ps: &PhaseSpace, v: &[f64]) -> Result<Vec<f64>> {
    require_massless(ps)?;
    let q = charge(ps, v);
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if q.abs() > 1e-10 * n.max(1.0) {
        return Err(Error::Charge(q));
    }
    let l = ps.locally_constant();
    let col = RMat::from_column_slice(v.len(), 1, v);
    Ok(linalg::residual(&l.basis, &col).iter().cloned().collect())
}

/// Coordinates of `E delta omega`.
pub fn current_from_oneform(ps: &PhaseSpace, w: &OneForm) -> Result<Vec<f64>> {
    require_massless(ps)?;
    let s = forms::codifferential_density(&ps.solver, w);
    ps.solver.check_source(&s)?;
    let e = ps.solver.propagator_density(&s);
    current_class(ps, &ps.coords_real(&e.re()))
}

/// Sum over the components of `O` of charge-free kinematic subspaces, plus
/// the locally constant solutions.
pub fn current_kin(ps: &PhaseSpace, o: &Region) -> Result<PhaseSubspace> {
    require_massless(ps)?;
    let parts: Vec<Region> = if o.bases.len() > 1 {
        o.bases.iter().map(|&b| lattice::diamond(ps.m(), &[b])).collect::<Result<_>>()?
    } else {
        o.components(ps.m())
    };
    let mut acc = ps.locally_constant();
    for p in &parts {
        acc = acc.join(&charge_free(ps, &ps.kin_subspace(p)?));
    }
    Ok(acc)
}

pub fn current_bullet(ps: &PhaseSpace, k: &Region) -> Result<PhaseSubspace> {
    require_massless(ps)?;
    Ok(charge_free(ps, &ps.bullet_subspace(k)).join(&ps.locally_constant()))
}

pub fn current_dyn(ps: &PhaseSpace, o: &Region) -> Result<PhaseSubspace> {
    require_massless(ps)?;
    let mut acc = ps.locally_constant();
    for k in lattice::enumerate_kb(ps.m(), o)? {
        acc = acc.join(&current_bullet(ps, &k)?);
    }
    Ok(acc)
}

fn smooth_step(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
}

/// Solution with vanishing momentum whose field is one between two
/// intervals and zero outside them, ramping inside each.
pub fn plateau_witness(ps: &PhaseSpace, left: Interval, right: Interval) -> Result<Vec<f64>> {
    require_massless(ps)?;
    if left.t != right.t || left.x1 + 2 > right.x0 || left.len() < 5 || right.len() < 5 {
        return Err(Error::Region("plateau needs two separated intervals of five or more nodes on one level".into()));
    }
    let nx = ps.solver.nx();
    let (a0, a1) = (left.x0 + 2, left.x1 - 2);
    let (b0, b1) = (right.x0 + 2, right.x1 - 2);
    let phi: Vec<f64> = (0..nx)
        .map(|j| {
            if j <= a0 || j >= b1 {
                0.0
            } else if j >= a1 && j <= b0 {
                1.0
            } else if j < a1 {
                smooth_step((j - a0) as f64 / (a1 - a0) as f64)
            } else {
                smooth_step((b1 - j) as f64 / (b1 - b0) as f64)
            }
        })
        .collect();
    let field = ps.solver.evolve_real(left.t, &phi, &vec![0.0; nx]);
    Ok(ps.coords_real(&field))
}

/// Witness that the current is not dynamically local for `O` with two
/// components: the plateau lies in `current_dyn(O)` but not in
/// `current_kin(O)`. Returns the vector with its relative distances to both.
pub struct DisconnectedWitness {
    pub vector: Vec<f64>,
    pub dyn_distance: f64,
    pub kin_distance: f64,
}

pub fn disconnected_witness(ps: &PhaseSpace, o: &Region) -> Result<DisconnectedWitness> {
    if o.bases.len() != 2 {
        return Err(Error::Region("witness needs a two-component region".into()));
    }
    let (mut l, mut r) = (o.bases[0], o.bases[1]);
    if l.x0 > r.x0 {
        std::mem::swap(&mut l, &mut r);
    }
    let v = plateau_witness(ps, l, r)?;
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let d = current_dyn(ps, o)?;
    let k = current_kin(ps, o)?;
    Ok(DisconnectedWitness { dyn_distance: d.distance(&v) / n, kin_distance: k.distance(&v) / n, vector: v })
}
