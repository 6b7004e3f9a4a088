//! Discrete one-forms on lattice edges, the coordinate differential `d` and
//! the codifferential `delta`.
//!
//! `delta` is the adjoint of `d` with respect to the quadratic form that
//! defines the discrete action, divided by the volume element, so that
//! `-delta d phi = box phi` holds exactly on interior nodes and
//! `sum sqrt|g| delta(omega) dt dx = 0` for every compactly supported
//! `omega`.

use super::{GridField, Solver};
use crate::error::{Error, Result};
use crate::lattice::Topology;
use num_complex::Complex64;

/// `w_t` on time edges `(n + 1/2, j)` and `w_x` on space edges
/// `(n, j + 1/2)`, both stored at the lower-left node `(n, j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneForm {
    pub nt: usize,
    pub nx: usize,
    pub wt: Vec<Complex64>,
    pub wx: Vec<Complex64>,
}

impl OneForm {
    pub fn zeros(nt: usize, nx: usize) -> Self {
        let z = Complex64::new(0.0, 0.0);
        OneForm { nt, nx, wt: vec![z; nt * nx], wx: vec![z; nt * nx] }
    }

    pub fn max_abs(&self) -> f64 {
        self.wt.iter().chain(&self.wx).map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn has_t_edge(s: &Solver, n: usize) -> bool {
    n + 1 < s.nt()
}

fn has_x_edge(s: &Solver, j: usize) -> bool {
    s.m.topology == Topology::Circle || j + 1 < s.nx()
}

/// Coordinate differential.
pub fn exterior_d(s: &Solver, phi: &GridField) -> OneForm {
    let (nt, nx) = (s.nt(), s.nx());
    let (dt, dx) = (s.m.dt, s.m.dx);
    let mut w = OneForm::zeros(nt, nx);
    for n in 0..nt {
        for j in 0..nx {
            let k = n * nx + j;
            if has_t_edge(s, n) {
                w.wt[k] = (phi.values[k + nx] - phi.values[k]) / dt;
            }
            if has_x_edge(s, j) {
                w.wx[k] = (phi.values[n * nx + (j + 1) % nx] - phi.values[k]) / dx;
            }
        }
    }
    w
}

/// The symmetric form behind the action, as a map on one-forms.
pub fn apply_metric(s: &Solver, w: &OneForm) -> OneForm {
    let (nt, nx) = (s.nt(), s.nx());
    let vol = s.m.dt * s.m.dx;
    let mut out = OneForm::zeros(nt, nx);
    for n in 0..nt {
        for j in 0..nx {
            let k = n * nx + j;
            if has_t_edge(s, n) {
                out.wt[k] += w.wt[k] * (vol * s.steps[n].att[j]);
            }
            if has_x_edge(s, j) {
                out.wx[k] -= w.wx[k] * (vol * s.levels[n].c[j]);
            }
        }
    }
    for n in 0..nt.saturating_sub(1) {
        for j in 0..nx {
            if !has_x_edge(s, j) {
                continue;
            }
            let a = s.steps[n].atx[j];
            if a == 0.0 {
                continue;
            }
            let j1 = (j + 1) % nx;
            let f = 0.25 * vol * a;
            let tsum = w.wt[n * nx + j] + w.wt[n * nx + j1];
            let xsum = w.wx[n * nx + j] + w.wx[(n + 1) * nx + j];
            out.wt[n * nx + j] += xsum * f;
            out.wt[n * nx + j1] += xsum * f;
            out.wx[n * nx + j] += tsum * f;
            out.wx[(n + 1) * nx + j] += tsum * f;
        }
    }
    out
}

/// Transpose of [`exterior_d`] with respect to plain sums.
pub fn d_transpose(s: &Solver, w: &OneForm) -> GridField {
    let (nt, nx) = (s.nt(), s.nx());
    let (dt, dx) = (s.m.dt, s.m.dx);
    let mut out = GridField::zeros(nt, nx);
    for n in 0..nt {
        for j in 0..nx {
            let k = n * nx + j;
            if has_t_edge(s, n) {
                out.values[k + nx] += w.wt[k] / dt;
                out.values[k] -= w.wt[k] / dt;
            }
            if has_x_edge(s, j) {
                out.values[n * nx + (j + 1) % nx] += w.wx[k] / dx;
                out.values[k] -= w.wx[k] / dx;
            }
        }
    }
    out
}

/// Codifferential, sign fixed so that `-delta d = box` on functions.
pub fn codifferential(s: &Solver, w: &OneForm) -> GridField {
    let mut g = d_transpose(s, &apply_metric(s, w));
    let vol = s.m.dt * s.m.dx;
    for (z, sq) in g.values.iter_mut().zip(&s.sqrtg) {
        *z /= sq * vol;
    }
    g
}

/// `delta(omega)` as a source density `sqrt|g| delta(omega)`.
pub fn codifferential_density(s: &Solver, w: &OneForm) -> GridField {
    let mut g = d_transpose(s, &apply_metric(s, w));
    let vol = s.m.dt * s.m.dx;
    for z in g.values.iter_mut() {
        *z /= vol;
    }
    g
}

/// Co-closed one-form built from a potential `psi` on cell centres
/// `(n + 1/2, j + 1/2)` (stored at `(n, j)`). Needs a diagonal metric so the
/// form can be inverted edge by edge.
pub fn coclosed_from_potential(s: &Solver, psi: &GridField) -> Result<OneForm> {
    if s.steps.iter().any(|st| !st.diagonal) {
        return Err(Error::Solver("co-closed forms are built only for diagonal metrics".into()));
    }
    let (nt, nx) = (s.nt(), s.nx());
    let (dt, dx) = (s.m.dt, s.m.dx);
    let vol = dt * dx;
    let psi_at = |n: isize, j: isize| -> Complex64 {
        if n < 0 || n >= nt as isize - 1 {
            return Complex64::new(0.0, 0.0);
        }
        let jj = match s.m.topology {
            Topology::Circle => j.rem_euclid(nx as isize) as usize,
            Topology::Line => {
                if j < 0 || j >= nx as isize - 1 {
                    return Complex64::new(0.0, 0.0);
                }
                j as usize
            }
        };
        psi.values[n as usize * nx + jj]
    };
    let mut w = OneForm::zeros(nt, nx);
    for n in 0..nt {
        for j in 0..nx {
            let k = n * nx + j;
            let (ni, ji) = (n as isize, j as isize);
            if has_t_edge(s, n) {
                let eta = (psi_at(ni, ji) - psi_at(ni, ji - 1)) / dx;
                w.wt[k] = eta / (vol * s.steps[n].att[j]);
            }
            if has_x_edge(s, j) {
                let eta = -(psi_at(ni, ji) - psi_at(ni - 1, ji)) / dt;
                w.wx[k] = eta / (-vol * s.levels[n].c[j]);
            }
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{LatticeSpacetime, Topology};

    #[test]
    fn d_of_constant_vanishes() {
        let m = LatticeSpacetime::minkowski(Topology::Circle, 12, 8, 0.1, 0.05).unwrap();
        let s = Solver::new(&m, 0.0);
        let c = GridField::from_fn(&m, |_, _| Complex64::new(2.5, -1.0));
        assert_eq!(exterior_d(&s, &c).max_abs(), 0.0);
    }
}
