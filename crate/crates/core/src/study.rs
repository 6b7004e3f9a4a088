//! Refinement studies on a smooth curved background: the Green identities
//! for the propagator, Einstein causality, and the first-order response of
//! relative Cauchy evolution against the stress tensor.
//!
//! Test data are fixed smooth functions of the continuum coordinates, so
//! the same continuum quantities are sampled at every refinement level.

use crate::error::Result;
use crate::kg::{stress, CauchyData, GridField, Solver};
use crate::lattice::{self, BumpSpec, Component, Interval, LatticeSpacetime, MetricSpec, SpacetimeConfig, Topology};
use num_complex::Complex64;
use serde::Serialize;

/// Default refinement levels (spatial nodes).
pub const DEFAULT_LEVELS: [usize; 3] = [64, 128, 256];
/// Base resolution at which relative errors are quoted.
pub const BASE_NX: usize = 128;
/// Mass used by the studies.
pub const STUDY_MASS: f64 = 1.0;

fn background() -> MetricSpec {
    MetricSpec::Conformal { amp: 0.3, t_c: 0.5, x_c: 0.5, width: 0.2, wave: 0.0, k: 0.0 }
}

/// Unit circle, unit time window, `dt = dx / 2`, smooth conformal metric.
pub fn study_spacetime(nx: usize) -> Result<LatticeSpacetime> {
    let dx = 1.0 / nx as f64;
    LatticeSpacetime::build(&SpacetimeConfig {
        topology: Topology::Circle,
        nx,
        nt: 2 * nx,
        dx,
        dt: 0.5 * dx,
        t0: 0.0,
        metric: background(),
        perturbations: vec![],
    })
}

/// Smooth compactly supported complex source centred at `(tc, xc)`.
fn blob(m: &LatticeSpacetime, tc: f64, xc: f64, r: f64, k: f64) -> GridField {
    GridField::from_fn(m, |it, ix| {
        let t = m.t(it) - tc;
        let x = m.separation(m.x(ix), xc);
        let v = lattice::bump((t * t + x * x) / (r * r));
        Complex64::new(v * (1.0 + 0.5 * (k * x).sin()), 0.3 * v * (k * t).cos())
    })
}

/// Solution with smooth Cauchy data on the middle level.
fn smooth_solution(s: &Solver, m: &LatticeSpacetime) -> GridField {
    let level = m.nt / 2;
    let tau = std::f64::consts::TAU;
    let phi = (0..m.nx).map(|j| {
        let x = m.x(j);
        Complex64::new((tau * x).cos() + 0.5 * (2.0 * tau * x).sin(), 0.2 * (tau * x).sin())
    });
    let pi = (0..m.nx).map(|j| Complex64::new(0.4 * (tau * m.x(j)).sin(), -0.3 * (tau * m.x(j)).cos()));
    s.evolve(&CauchyData { level, phi: phi.collect(), pi: pi.collect() })
}

#[derive(Clone, Debug, Serialize)]
pub struct GreenLevel {
    pub nx: usize,
    /// `sigma(Ef, phi)` and `sum phi f dvol`.
    pub sigma_ef_phi: [f64; 2],
    pub sum_phi_f: [f64; 2],
    /// `sigma(Ef, Ef')` and `E(f, f')`.
    pub sigma_ef_eg: [f64; 2],
    pub e_fg: [f64; 2],
    /// Largest relative spread of `sigma(Ef, Ef')` over the Cauchy levels.
    pub surface_spread: f64,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn c(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn green_level(nx: usize) -> Result<GreenLevel> {
    let m = study_spacetime(nx)?;
    let s = Solver::new(&m, STUDY_MASS);
    let f = blob(&m, 0.4, 0.3, 0.25, 2.0);
    let g = blob(&m, 0.6, 0.65, 0.2, 3.0);
    let ef = s.propagator(&f)?;
    let eg = s.propagator(&g)?;
    let phi = smooth_solution(&s, &m);
    let mid = m.nt / 2;
    let sigma_ef_phi = s.sigma_unchecked(&ef, &phi, mid);
    let sum_phi_f = s.integrate(&f.values.iter().zip(&phi.values).map(|(a, b)| a * b).collect::<Vec<_>>());
    let sigma_ef_eg = s.sigma_unchecked(&ef, &eg, mid);
    let e_fg = s.pairing(&f, &g)?;
    let spread = (0..m.nt)
        .map(|n| (s.sigma_unchecked(&ef, &eg, n) - sigma_ef_eg).norm())
        .fold(0.0, f64::max)
        / sigma_ef_eg.norm();
    Ok(GreenLevel {
        nx,
        sigma_ef_phi: pair(sigma_ef_phi),
        sum_phi_f: pair(sum_phi_f),
        sigma_ef_eg: pair(sigma_ef_eg),
        e_fg: pair(e_fg),
        surface_spread: spread,
    })
}

/// Continuum estimate from three levels refined by two, second order.
#[derive(Clone, Debug, Serialize)]
pub struct Refinement {
    pub values: Vec<[f64; 2]>,
    pub extrapolated: [f64; 2],
    /// Relative distance of the base-level value from the extrapolation.
    pub base_error: f64,
    /// `log2(|v0 - v1| / |v1 - v2|)`.
    pub slope: f64,
}

pub fn refine(values: &[Complex64], levels: &[usize]) -> Refinement {
    let n = values.len();
    let extrapolated = values[n - 1] + (values[n - 1] - values[n - 2]) / 3.0;
    let base = levels.iter().position(|&l| l == BASE_NX).unwrap_or(n - 2);
    let base_error = (values[base] - extrapolated).norm() / extrapolated.norm();
    let slope = if n >= 3 {
        ((values[n - 3] - values[n - 2]).norm() / (values[n - 2] - values[n - 1]).norm()).log2()
    } else {
        f64::NAN
    };
    Refinement { values: values.iter().map(|z| pair(*z)).collect(), extrapolated: pair(extrapolated), base_error, slope }
}

#[derive(Clone, Debug, Serialize)]
pub struct GreenStudy {
    pub levels: Vec<GreenLevel>,
    /// Largest lattice residual of either identity relative to its size.
    pub identity_residual: f64,
    /// Largest spread of sigma over Cauchy levels.
    pub surface_spread: f64,
    pub sigma_ef_phi: Refinement,
    pub sigma_ef_eg: Refinement,
}

pub fn green_study(levels: &[usize]) -> Result<GreenStudy> {
    let rows: Vec<GreenLevel> = levels.iter().map(|&nx| green_level(nx)).collect::<Result<_>>()?;
    let identity_residual = rows
        .iter()
        .map(|r| {
            let a = (c(r.sigma_ef_phi) - c(r.sum_phi_f)).norm() / c(r.sum_phi_f).norm();
            let b = (c(r.sigma_ef_eg) - c(r.e_fg)).norm() / c(r.e_fg).norm();
            a.max(b)
        })
        .fold(0.0, f64::max);
    let surface_spread = rows.iter().map(|r| r.surface_spread).fold(0.0, f64::max);
    let a: Vec<Complex64> = rows.iter().map(|r| c(r.sigma_ef_phi)).collect();
    let b: Vec<Complex64> = rows.iter().map(|r| c(r.sigma_ef_eg)).collect();
    Ok(GreenStudy {
        identity_residual,
        surface_spread,
        sigma_ef_phi: refine(&a, levels),
        sigma_ef_eg: refine(&b, levels),
        levels: rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Causality {
    pub nx: usize,
    pub pairing: f64,
    pub bound: f64,
    /// `|E(f, f')| / (|f| |f'|)`.
    pub ratio: f64,
}

/// `E(f, f')` for sources on two causally disjoint diamonds.
pub fn causality(nx: usize) -> Result<Causality> {
    let dx = 1.0 / nx as f64;
    let m = LatticeSpacetime::build(&SpacetimeConfig {
        topology: Topology::Line,
        nx,
        nt: 2 * nx,
        dx,
        dt: 0.5 * dx,
        t0: 0.0,
        metric: MetricSpec::Static { amp: 0.2, center: 0.5, width: 0.2 },
        perturbations: vec![],
    })?;
    let s = Solver::new(&m, STUDY_MASS);
    let q = nx / 8;
    let a = lattice::diamond(&m, &[Interval { t: nx, x0: 2 * q, x1: 3 * q }])?;
    let b = lattice::diamond(&m, &[Interval { t: nx, x0: 5 * q, x1: 6 * q }])?;
    if !lattice::causally_disjoint(&m, &a, &b) {
        return Err(crate::Error::Region("test regions are not causally disjoint".into()));
    }
    let src = |r: &lattice::Region, k: f64| {
        GridField::from_fn(&m, |it, ix| {
            if r.contains(it, ix) {
                Complex64::new((k * (it + 2 * ix) as f64).sin() + 1.5, (k * ix as f64).cos())
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    };
    let (f, g) = (src(&a, 0.37), src(&b, 0.71));
    let e = s.pairing(&f, &g)?.norm();
    let bound = f.norm() * g.norm();
    Ok(Causality { nx, pairing: e, bound, ratio: e / bound })
}

#[derive(Clone, Debug, Serialize)]
pub struct ResponseLevel {
    pub nx: usize,
    /// Central difference of `sigma(rce[s h] phi, conj phi)` at `s = 0`.
    pub derivative: [f64; 2],
    /// `sigma(F[h] phi, conj phi)`.
    pub response: [f64; 2],
    /// `sum h_ab T^{ab}[phi] dvol`.
    pub stress: [f64; 2],
    /// `(s, |rce[s h] phi - phi - s F phi|, |rce[s h] phi - phi + s F phi|)`.
    pub remainder: Vec<[f64; 3]>,
}

/// Perturbation bumps in continuum units, placed in the middle of the
/// window.
fn response_perturbation(m: &LatticeSpacetime) -> lattice::MetricPerturbation {
    let (lt, lx) = (1.0 / m.dt, 1.0 / m.dx);
    lattice::MetricPerturbation::from_bumps(
        m,
        &[
            BumpSpec { component: Component::Tt, amp: 1.0, t: 0.5 * lt, x: 0.5 * lx, rt: 0.2 * lt, rx: 0.2 * lx },
            BumpSpec { component: Component::Xx, amp: 0.5, t: 0.55 * lt, x: 0.45 * lx, rt: 0.15 * lt, rx: 0.15 * lx },
        ],
    )
}

/// Perturbation parameters of the remainder fit.
pub const REMAINDER_STEPS: [f64; 3] = [4e-3, 2e-3, 1e-3];
/// Step of the central difference.
pub const DERIVATIVE_STEP: f64 = 1e-4;

pub fn response_level(nx: usize) -> Result<ResponseLevel> {
    let m = study_spacetime(nx)?;
    let s = Solver::new(&m, STUDY_MASS);
    let f = blob(&m, 0.3, 0.5, 0.2, 2.0);
    let phi = s.propagator(&f)?;
    let psi = phi.conj();
    let h = response_perturbation(&m);
    let mid = m.nt / 2;
    let ds = DERIVATIVE_STEP;
    let rp = s.rce(&h.scaled(ds), &phi)?;
    let rm = s.rce(&h.scaled(-ds), &phi)?;
    let derivative = (s.sigma_unchecked(&rp, &psi, mid) - s.sigma_unchecked(&rm, &psi, mid)) / (2.0 * ds);
    let fphi = stress::f_map(&s, &h, &phi)?;
    let response = s.sigma_unchecked(&fphi, &psi, mid);
    let t = stress::stress_energy(&s, &phi, &phi);
    let st = stress::contract_integral(&s, &h, &t);
    let mut remainder = Vec::new();
    for &step in &REMAINDER_STEPS {
        let r = s.rce(&h.scaled(step), &phi)?;
        let base = r.sub(&phi);
        let lit = base.sub(&fphi.scale(Complex64::new(step, 0.0))).norm();
        let flipped = base.add(&fphi.scale(Complex64::new(step, 0.0))).norm();
        remainder.push([step, lit, flipped]);
    }
    Ok(ResponseLevel { nx, derivative: pair(derivative), response: pair(response), stress: pair(st), remainder })
}

#[derive(Clone, Debug, Serialize)]
pub struct ResponseStudy {
    pub levels: Vec<ResponseLevel>,
    /// Relative pairwise differences at the base level:
    /// derivative vs response, derivative vs stress, response vs stress.
    pub pairwise: [f64; 3],
    /// Relative size of derivative + response at the base level.
    pub derivative_plus_response: f64,
    /// Refinement slopes of the three pairwise differences.
    pub pairwise_slopes: [f64; 3],
    /// Slope of `|derivative + response|` over refinement.
    pub sum_slope: f64,
    /// Fitted exponents of the literal and the sign-flipped remainders in
    /// the perturbation parameter, at the base level.
    pub remainder_power: f64,
    pub flipped_remainder_power: f64,
}

fn fit_power(points: &[[f64; 3]], k: usize) -> f64 {
    let n = points.len();
    let xs: Vec<f64> = points.iter().map(|p| p[0].ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p[k].ln()).collect();
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

fn slope3(d: &[f64]) -> f64 {
    if d.len() < 3 {
        return f64::NAN;
    }
    let n = d.len();
    (d[n - 3] / d[n - 2]).log2().min((d[n - 2] / d[n - 1]).log2())
}

pub fn response_study(levels: &[usize]) -> Result<ResponseStudy> {
    let rows: Vec<ResponseLevel> = levels.iter().map(|&nx| response_level(nx)).collect::<Result<_>>()?;
    let rel = |a: [f64; 2], b: [f64; 2]| (c(a) - c(b)).norm() / c(a).norm().max(c(b).norm());
    let diffs = |i: usize| -> Vec<f64> {
        rows.iter()
            .map(|r| match i {
                0 => (c(r.derivative) - c(r.response)).norm(),
                1 => (c(r.derivative) - c(r.stress)).norm(),
                _ => (c(r.response) - c(r.stress)).norm(),
            })
            .collect()
    };
    let base = rows.iter().position(|r| r.nx == BASE_NX).unwrap_or(rows.len() / 2);
    let b = &rows[base];
    let sums: Vec<f64> = rows.iter().map(|r| (c(r.derivative) + c(r.response)).norm()).collect();
    Ok(ResponseStudy {
        pairwise: [rel(b.derivative, b.response), rel(b.derivative, b.stress), rel(b.response, b.stress)],
        derivative_plus_response: sums[base] / c(b.response).norm(),
        pairwise_slopes: [slope3(&diffs(0)), slope3(&diffs(1)), slope3(&diffs(2))],
        sum_slope: slope3(&sums),
        remainder_power: fit_power(&b.remainder, 1),
        flipped_remainder_power: fit_power(&b.remainder, 2),
        levels: rows,
    })
}
