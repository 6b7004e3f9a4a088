//! Stress-energy tensor and the first-order response map of relative
//! Cauchy evolution, both by central differences.

use super::{GridField, Solver};
use crate::lattice::{self, MetricPerturbation, Topology};
use num_complex::Complex64;

/// Contravariant symmetric tensor `(T^tt, T^tx, T^xx)` per node.
pub type SymTensor = [Complex64; 3];

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Whether central differences are available at `(n, j)`.
fn interior(s: &Solver, n: usize, j: usize) -> bool {
    n >= 1 && n + 1 < s.nt() && (s.m.topology == Topology::Circle || (j >= 1 && j + 1 < s.nx()))
}

/// Central-difference gradient `(d_t u, d_x u)` at an interior node.
fn grad(s: &Solver, u: &[Complex64], n: usize, j: usize) -> [Complex64; 2] {
    let nx = s.nx();
    let (jl, jr) = ((j + nx - 1) % nx, (j + 1) % nx);
    [
        (u[(n + 1) * nx + j] - u[(n - 1) * nx + j]) / (2.0 * s.m.dt),
        (u[n * nx + jr] - u[n * nx + jl]) / (2.0 * s.m.dx),
    ]
}

fn raise(ginv: &lattice::Metric, v: [Complex64; 2]) -> [Complex64; 2] {
    [v[0] * ginv[0] + v[1] * ginv[1], v[0] * ginv[1] + v[1] * ginv[2]]
}

/// Polarized stress-energy `T^{ab}[phi, phi']`, conjugating the first
/// argument. Zero where central differences are unavailable.
pub fn stress_energy(s: &Solver, phi: &GridField, psi: &GridField) -> Vec<SymTensor> {
    let (nt, nx) = (s.nt(), s.nx());
    let m2 = s.mass * s.mass;
    let a = phi.conj().values;
    let b = &psi.values;
    let mut out = vec![[zero(); 3]; nt * nx];
    for n in 0..nt {
        for j in 0..nx {
            if !interior(s, n, j) {
                continue;
            }
            let gi = lattice::inverse(s.m.g(n, j));
            let da = grad(s, &a, n, j);
            let db = grad(s, b, n, j);
            let ua = raise(&gi, da);
            let ub = raise(&gi, db);
            let contr = da[0] * ub[0] + da[1] * ub[1];
            let mass_term = a[n * nx + j] * b[n * nx + j] * m2;
            let scalar = (mass_term - contr) * 0.5;
            out[n * nx + j] = [
                ua[0] * ub[0] + scalar * gi[0],
                (ua[0] * ub[1] + ua[1] * ub[0]) * 0.5 + scalar * gi[1],
                ua[1] * ub[1] + scalar * gi[2],
            ];
        }
    }
    out
}

/// `sum f_ab T^{ab} dvol` for covariant `f`.
pub fn contract_integral(s: &Solver, f: &MetricPerturbation, t: &[SymTensor]) -> Complex64 {
    let vol = s.m.dt * s.m.dx;
    f.h.iter()
        .zip(t)
        .zip(&s.sqrtg)
        .map(|((h, t), sq)| (t[0] * h[0] + t[1] * (2.0 * h[1]) + t[2] * h[2]) * (sq * vol))
        .sum()
}

/// Source of the response map:
/// `1/2 grad^a(tr f) grad_a phi - |g|^{-1/2} d_a(|g|^{1/2} f^{ab} d_b phi)`.
pub fn response_source(s: &Solver, f: &MetricPerturbation, phi: &GridField) -> GridField {
    let (nt, nx) = (s.nt(), s.nx());
    let u = &phi.values;
    let mut trf = vec![0.0; nt * nx];
    let mut vt = vec![zero(); nt * nx];
    let mut vx = vec![zero(); nt * nx];
    for n in 0..nt {
        for j in 0..nx {
            let k = n * nx + j;
            let gi = lattice::inverse(s.m.g(n, j));
            let h = f.h[k];
            trf[k] = gi[0] * h[0] + 2.0 * gi[1] * h[1] + gi[2] * h[2];
            if !interior(s, n, j) || h.iter().all(|&v| v == 0.0) {
                continue;
            }
            // f^{ab} = g^{ac} g^{bd} f_cd
            let fu = [
                gi[0] * gi[0] * h[0] + 2.0 * gi[0] * gi[1] * h[1] + gi[1] * gi[1] * h[2],
                gi[0] * gi[1] * h[0] + (gi[0] * gi[2] + gi[1] * gi[1]) * h[1] + gi[1] * gi[2] * h[2],
                gi[1] * gi[1] * h[0] + 2.0 * gi[1] * gi[2] * h[1] + gi[2] * gi[2] * h[2],
            ];
            let d = grad(s, u, n, j);
            let sq = s.sqrtg[k];
            vt[k] = (d[0] * fu[0] + d[1] * fu[1]) * sq;
            vx[k] = (d[0] * fu[1] + d[1] * fu[2]) * sq;
        }
    }
    let trc: Vec<Complex64> = trf.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut q = GridField::zeros(nt, nx);
    for n in 0..nt {
        for j in 0..nx {
            if !interior(s, n, j) {
                continue;
            }
            let k = n * nx + j;
            let gi = lattice::inverse(s.m.g(n, j));
            let dtr = grad(s, &trc, n, j);
            let dphi = grad(s, u, n, j);
            let up = raise(&gi, dtr);
            let first = (up[0] * dphi[0] + up[1] * dphi[1]) * 0.5;
            let div = grad(s, &vt, n, j)[0] + grad(s, &vx, n, j)[1];
            q.values[k] = first - div / s.sqrtg[k];
        }
    }
    q
}

/// `F[f] phi = E(response_source)`.
pub fn f_map(s: &Solver, f: &MetricPerturbation, phi: &GridField) -> crate::Result<GridField> {
    s.propagator(&response_source(s, f, phi))
}
