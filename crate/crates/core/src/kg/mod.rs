//! Lattice Klein-Gordon dynamics.
//!
//! Time stepping is a variational integrator for the discrete action
//! `sum_n L(phi^n, phi^{n+1})` built from the densities
//! `a^{ab} = sqrt|g| g^{ab}` and `b = m^2 sqrt|g|`. For diagonal metrics it is
//! the explicit leapfrog scheme; a nonzero `g_tx` adds a (cyclic)
//! tridiagonal solve per step. Each level carries the canonical momenta
//! `p = dx * pi`; sources enter as jumps `p+ - p- = dt dx sqrt|g| f`.
//!
//! With these conventions the discrete identities `sigma(E f, phi) =
//! sum phi f dvol`, conservation of `sigma` and, for `m = 0`, conservation of
//! the charge `sum p` hold to roundoff.

pub mod forms;
pub mod io;
pub mod stress;

use crate::error::{Error, Result};
use crate::lattice::{self, LatticeSpacetime, MetricPerturbation, Topology};
use num_complex::Complex64;

/// Relative `P`-residual below which a field counts as a solution.
pub const SOLUTION_TOL: f64 = 1e-6;

/// Complex scalar per node, row-major over `(it, ix)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub nt: usize,
    pub nx: usize,
    pub values: Vec<Complex64>,
}

impl GridField {
    pub fn zeros(nt: usize, nx: usize) -> Self {
        GridField { nt, nx, values: vec![Complex64::new(0.0, 0.0); nt * nx] }
    }

    pub fn from_real(nt: usize, nx: usize, re: &[f64]) -> Self {
        GridField { nt, nx, values: re.iter().map(|&x| Complex64::new(x, 0.0)).collect() }
    }

    pub fn from_parts(nt: usize, nx: usize, re: &[f64], im: &[f64]) -> Self {
        GridField { nt, nx, values: re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect() }
    }

    pub fn from_fn(m: &LatticeSpacetime, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut g = Self::zeros(m.nt, m.nx);
        for it in 0..m.nt {
            for ix in 0..m.nx {
                g.values[it * m.nx + ix] = f(it, ix);
            }
        }
        g
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.im).collect()
    }

    pub fn at(&self, it: usize, ix: usize) -> Complex64 {
        self.values[it * self.nx + ix]
    }

    pub fn conj(&self) -> Self {
        GridField { values: self.values.iter().map(|z| z.conj()).collect(), ..self.clone() }
    }

    pub fn sub(&self, other: &GridField) -> Self {
        GridField { values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(), ..self.clone() }
    }

    pub fn add(&self, other: &GridField) -> Self {
        GridField { values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(), ..self.clone() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        GridField { values: self.values.iter().map(|z| z * s).collect(), ..self.clone() }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|z| z.im == 0.0)
    }

    /// Nodes with nonzero value.
    pub fn support(&self, m: &LatticeSpacetime) -> lattice::Region {
        let mask = self.values.iter().map(|z| z.norm() != 0.0).collect();
        lattice::Region::from_mask(m, mask, lattice::RegionKind::Generic)
    }
}

/// `(phi, pi)` on level `level`, with `pi = p / dx`.
#[derive(Clone, Debug, PartialEq)]
pub struct CauchyData {
    pub level: usize,
    pub phi: Vec<Complex64>,
    pub pi: Vec<Complex64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Retarded,
    Advanced,
}

#[derive(Clone, Debug)]
struct Level {
    /// `-a^{xx}` on cells `j + 1/2`.
    c: Vec<f64>,
    /// `m^2 sqrt|g|` per node.
    b: Vec<f64>,
}

#[derive(Clone, Debug)]
struct Step {
    /// `a^{tt}` at `(n + 1/2, j)`.
    att: Vec<f64>,
    /// `a^{tx}` at `(n + 1/2, j + 1/2)`.
    atx: Vec<f64>,
    diagonal: bool,
}

/// Precomputed coefficients for one spacetime and mass.
#[derive(Clone, Debug)]
pub struct Solver {
    pub m: LatticeSpacetime,
    pub mass: f64,
    pub sqrtg: Vec<f64>,
    levels: Vec<Level>,
    steps: Vec<Step>,
}

fn densities(g: &lattice::Metric) -> (f64, f64, f64, f64) {
    let inv = lattice::inverse(g);
    let s = lattice::det(g).abs().sqrt();
    (s * inv[0], s * inv[1], s * inv[2], s)
}

/// Solve a (cyclic) tridiagonal system `lo[k] x[k-1] + di[k] x[k] + up[k]
/// x[k+1] = rhs[k]`. In the cyclic case `lo[0]` couples to `x[n-1]` and
/// `up[n-1]` to `x[0]`.
fn solve_tridiagonal(lo: &[f64], di: &[f64], up: &[f64], rhs: &[f64], cyclic: bool) -> Vec<f64> {
    let n = di.len();
    fn thomas(lo: &[f64], di: &[f64], up: &[f64], rhs: &[f64]) -> Vec<f64> {
        let n = di.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut x = vec![0.0; n];
        c[0] = up[0] / di[0];
        d[0] = rhs[0] / di[0];
        for k in 1..n {
            let w = di[k] - lo[k] * c[k - 1];
            c[k] = if k + 1 < n { up[k] / w } else { 0.0 };
            d[k] = (rhs[k] - lo[k] * d[k - 1]) / w;
        }
        x[n - 1] = d[n - 1];
        for k in (0..n - 1).rev() {
            x[k] = d[k] - c[k] * x[k + 1];
        }
        x
    }
    if !cyclic || n < 3 {
        return thomas(lo, di, up, rhs);
    }
    // Sherman-Morrison on the corner entries
    let gamma = -di[0];
    let mut d2 = di.to_vec();
    d2[0] -= gamma;
    d2[n - 1] -= lo[0] * up[n - 1] / gamma;
    let y = thomas(lo, &d2, up, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = up[n - 1];
    let z = thomas(lo, &d2, up, &u);
    let fact = (y[0] + lo[0] * y[n - 1] / gamma) / (1.0 + z[0] + lo[0] * z[n - 1] / gamma);
    y.iter().zip(&z).map(|(a, b)| a - fact * b).collect()
}

impl Solver {
    pub fn new(m: &LatticeSpacetime, mass: f64) -> Self {
        let (nt, nx) = (m.nt, m.nx);
        let ncell = match m.topology {
            Topology::Circle => nx,
            Topology::Line => nx - 1,
        };
        let dens: Vec<(f64, f64, f64, f64)> = m.metric.iter().map(densities).collect();
        let sqrtg = dens.iter().map(|d| d.3).collect();
        let mut levels = Vec::with_capacity(nt);
        for it in 0..nt {
            let row = &dens[it * nx..(it + 1) * nx];
            let c = (0..ncell).map(|j| -0.5 * (row[j].2 + row[(j + 1) % nx].2)).collect();
            let b = row.iter().map(|d| mass * mass * d.3).collect();
            levels.push(Level { c, b });
        }
        let mut steps = Vec::with_capacity(nt.saturating_sub(1));
        for it in 0..nt.saturating_sub(1) {
            let lo = &dens[it * nx..(it + 1) * nx];
            let hi = &dens[(it + 1) * nx..(it + 2) * nx];
            let att = (0..nx).map(|j| 0.5 * (lo[j].0 + hi[j].0)).collect();
            let atx: Vec<f64> = (0..ncell)
                .map(|j| {
                    let k = (j + 1) % nx;
                    0.25 * (lo[j].1 + lo[k].1 + hi[j].1 + hi[k].1)
                })
                .collect();
            let diagonal = atx.iter().all(|&a| a == 0.0);
            steps.push(Step { att, atx, diagonal });
        }
        Solver { m: m.clone(), mass, sqrtg, levels, steps }
    }

    pub fn nx(&self) -> usize {
        self.m.nx
    }

    pub fn nt(&self) -> usize {
        self.m.nt
    }

    /// Nodes carrying degrees of freedom on each level.
    pub fn active(&self) -> std::ops::Range<usize> {
        match self.m.topology {
            Topology::Circle => 0..self.m.nx,
            Topology::Line => 1..self.m.nx - 1,
        }
    }

    fn left(&self, k: usize) -> usize {
        (k + self.m.nx - 1) % self.m.nx
    }

    fn right(&self, k: usize) -> usize {
        (k + 1) % self.m.nx
    }

    /// `a^{tx}` on the cells left and right of node `k` (zero off a Line).
    fn atx_lr(&self, st: &Step, k: usize) -> (f64, f64) {
        let nx = self.m.nx;
        match self.m.topology {
            Topology::Circle => (st.atx[(k + nx - 1) % nx], st.atx[k]),
            Topology::Line => {
                let l = if k >= 1 { st.atx[k - 1] } else { 0.0 };
                let r = if k + 1 < nx { st.atx[k] } else { 0.0 };
                (l, r)
            }
        }
    }

    /// Gradient of the level potential `U_n`.
    fn grad_u(&self, n: usize, q: &[f64], out: &mut [f64]) {
        let lv = &self.levels[n];
        let dx = self.m.dx;
        for o in out.iter_mut() {
            *o = 0.0;
        }
        for k in self.active() {
            let (l, r) = (self.left(k), self.right(k));
            let (cl, cr) = (lv.c[l], lv.c[k]);
            out[k] = (cl * (q[k] - q[l]) - cr * (q[r] - q[k])) / dx + dx * lv.b[k] * q[k];
        }
    }

    /// `-D1 L_n(q, r)`: momentum at level `n` seen by step `n -> n+1`.
    fn p_plus(&self, n: usize, q: &[f64], r: &[f64], out: &mut [f64]) {
        let st = &self.steps[n];
        let (dx, dt) = (self.m.dx, self.m.dt);
        self.grad_u(n, q, out);
        for k in self.active() {
            let (al, ar) = self.atx_lr(st, k);
            let (l, rr) = (self.left(k), self.right(k));
            out[k] = dx * st.att[k] * (r[k] - q[k]) / dt + 0.5 * dt * out[k] + 0.5 * ar * r[rr]
                - 0.5 * al * r[l]
                - 0.5 * (ar - al) * q[k];
        }
    }

    /// `D2 L_n(q, r)`: momentum at level `n+1` produced by step `n -> n+1`.
    fn p_minus(&self, n: usize, q: &[f64], r: &[f64], out: &mut [f64]) {
        let st = &self.steps[n];
        let (dx, dt) = (self.m.dx, self.m.dt);
        self.grad_u(n + 1, r, out);
        for k in self.active() {
            let (al, ar) = self.atx_lr(st, k);
            let (l, rr) = (self.left(k), self.right(k));
            out[k] = dx * st.att[k] * (r[k] - q[k]) / dt - 0.5 * dt * out[k]
                + 0.5 * ar * (q[rr] - r[k])
                + 0.5 * al * (r[k] - q[l]);
        }
    }

    fn solve_step(&self, st: &Step, sign: f64, rhs: &[f64], out: &mut [f64]) {
        let (dx, dt) = (self.m.dx, self.m.dt);
        let act = self.active();
        if st.diagonal {
            for k in act {
                out[k] = rhs[k] * dt / (dx * st.att[k]);
            }
            return;
        }
        let idx: Vec<usize> = act.collect();
        let mut lo = Vec::with_capacity(idx.len());
        let mut di = Vec::with_capacity(idx.len());
        let mut up = Vec::with_capacity(idx.len());
        let mut b = Vec::with_capacity(idx.len());
        for &k in &idx {
            let (al, ar) = self.atx_lr(st, k);
            di.push(dx * st.att[k] / dt);
            up.push(sign * 0.5 * ar);
            lo.push(-sign * 0.5 * al);
            b.push(rhs[k]);
        }
        let x = solve_tridiagonal(&lo, &di, &up, &b, self.m.topology == Topology::Circle);
        for (i, &k) in idx.iter().enumerate() {
            out[k] = x[i];
        }
    }

    /// Step `n -> n+1`: from `(q, p+)` at level `n` to `(r, p-)` at `n+1`.
    pub fn step_forward(&self, n: usize, q: &[f64], p: &[f64], r: &mut [f64], p_next: &mut [f64]) {
        let st = &self.steps[n];
        let (dx, dt) = (self.m.dx, self.m.dt);
        let nx = self.m.nx;
        let mut rhs = vec![0.0; nx];
        self.grad_u(n, q, &mut rhs);
        for k in self.active() {
            let (al, ar) = self.atx_lr(st, k);
            rhs[k] = p[k] - 0.5 * dt * rhs[k] + dx * st.att[k] * q[k] / dt + 0.5 * (ar - al) * q[k];
        }
        r.iter_mut().for_each(|x| *x = 0.0);
        self.solve_step(st, 1.0, &rhs, r);
        self.p_minus(n, q, r, p_next);
    }

    /// Step `n+1 -> n`: from `(r, p-)` at level `n+1` to `(q, p+)` at `n`.
    pub fn step_backward(&self, n: usize, r: &[f64], p: &[f64], q: &mut [f64], p_prev: &mut [f64]) {
        let st = &self.steps[n];
        let (dx, dt) = (self.m.dx, self.m.dt);
        let nx = self.m.nx;
        let mut rhs = vec![0.0; nx];
        self.grad_u(n + 1, r, &mut rhs);
        for k in self.active() {
            let (al, ar) = self.atx_lr(st, k);
            rhs[k] = -p[k] + dx * st.att[k] * r[k] / dt - 0.5 * dt * rhs[k] - 0.5 * (ar - al) * r[k];
        }
        q.iter_mut().for_each(|x| *x = 0.0);
        self.solve_step(st, -1.0, &rhs, q);
        self.p_plus(n, q, r, p_prev);
    }

    /// Evolve real data `(phi, p)` given on level `n0` over the whole window.
    pub fn evolve_real(&self, n0: usize, phi: &[f64], p: &[f64]) -> Vec<f64> {
        let (nt, nx) = (self.m.nt, self.m.nx);
        let mut out = vec![0.0; nt * nx];
        out[n0 * nx..(n0 + 1) * nx].copy_from_slice(phi);
        self.pin(&mut out[n0 * nx..(n0 + 1) * nx]);
        let mut pc = p.to_vec();
        self.pin(&mut pc);
        let mut pn = vec![0.0; nx];
        for n in n0..nt - 1 {
            let (a, b) = out.split_at_mut((n + 1) * nx);
            self.step_forward(n, &a[n * nx..], &pc, &mut b[..nx], &mut pn);
            std::mem::swap(&mut pc, &mut pn);
        }
        let mut pc = p.to_vec();
        self.pin(&mut pc);
        for n in (0..n0).rev() {
            let (a, b) = out.split_at_mut((n + 1) * nx);
            self.step_backward(n, &b[..nx], &pc, &mut a[n * nx..], &mut pn);
            std::mem::swap(&mut pc, &mut pn);
        }
        out
    }

    /// Evolve `(phi, p)` from level `from` to level `to`, returning the data
    /// there.
    pub fn transport_real(&self, from: usize, to: usize, phi: &[f64], p: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let nx = self.m.nx;
        let mut q = phi.to_vec();
        let mut pc = p.to_vec();
        self.pin(&mut q);
        self.pin(&mut pc);
        let mut r = vec![0.0; nx];
        let mut pn = vec![0.0; nx];
        if to >= from {
            for n in from..to {
                self.step_forward(n, &q, &pc, &mut r, &mut pn);
                std::mem::swap(&mut q, &mut r);
                std::mem::swap(&mut pc, &mut pn);
            }
        } else {
            for n in (to..from).rev() {
                self.step_backward(n, &q, &pc, &mut r, &mut pn);
                std::mem::swap(&mut q, &mut r);
                std::mem::swap(&mut pc, &mut pn);
            }
        }
        (q, pc)
    }

    fn pin(&self, v: &mut [f64]) {
        if self.m.topology == Topology::Line {
            v[0] = 0.0;
            let n = v.len();
            v[n - 1] = 0.0;
        }
    }

    /// Momentum on level `n` of a real field (the one seen by the step
    /// leaving the level, except on the last level).
    pub fn momentum_real(&self, field: &[f64], n: usize) -> Vec<f64> {
        let nx = self.m.nx;
        let mut out = vec![0.0; nx];
        if n + 1 < self.m.nt {
            self.p_plus(n, &field[n * nx..(n + 1) * nx], &field[(n + 1) * nx..(n + 2) * nx], &mut out);
        } else {
            self.p_minus(n - 1, &field[(n - 1) * nx..n * nx], &field[n * nx..(n + 1) * nx], &mut out);
        }
        out
    }

    /// `(p+ - p-) / (dt dx)` on interior levels: the source density
    /// `sqrt|g| P phi`. Zero on the first and last level and on pinned nodes.
    pub fn apply_a_real(&self, field: &[f64]) -> Vec<f64> {
        let (nt, nx) = (self.m.nt, self.m.nx);
        let mut out = vec![0.0; nt * nx];
        let mut pp = vec![0.0; nx];
        let mut pm = vec![0.0; nx];
        let scale = 1.0 / (self.m.dt * self.m.dx);
        for n in 1..nt - 1 {
            self.p_plus(n, &field[n * nx..(n + 1) * nx], &field[(n + 1) * nx..(n + 2) * nx], &mut pp);
            self.p_minus(n - 1, &field[(n - 1) * nx..n * nx], &field[n * nx..(n + 1) * nx], &mut pm);
            for k in self.active() {
                out[n * nx + k] = (pp[k] - pm[k]) * scale;
            }
        }
        out
    }

    /// Zero-data march through the source density `s = sqrt|g| f`.
    pub fn fundamental_real(&self, s: &[f64], kind: Kind) -> Vec<f64> {
        let (nt, nx) = (self.m.nt, self.m.nx);
        let w = self.m.dt * self.m.dx;
        let mut out = vec![0.0; nt * nx];
        let mut p = vec![0.0; nx];
        let mut pn = vec![0.0; nx];
        match kind {
            Kind::Retarded => {
                for n in 0..nt - 1 {
                    for k in self.active() {
                        p[k] += w * s[n * nx + k];
                    }
                    let (a, b) = out.split_at_mut((n + 1) * nx);
                    self.step_forward(n, &a[n * nx..], &p, &mut b[..nx], &mut pn);
                    std::mem::swap(&mut p, &mut pn);
                }
            }
            Kind::Advanced => {
                for n in (1..nt).rev() {
                    for k in self.active() {
                        p[k] -= w * s[n * nx + k];
                    }
                    let (a, b) = out.split_at_mut(n * nx);
                    self.step_backward(n - 1, &b[..nx], &p, &mut a[(n - 1) * nx..], &mut pn);
                    std::mem::swap(&mut p, &mut pn);
                }
            }
        }
        out
    }

    pub fn check_source(&self, f: &GridField) -> Result<()> {
        let (nt, nx) = (self.m.nt, self.m.nx);
        for it in [0, nt - 1] {
            if (0..nx).any(|ix| f.at(it, ix).norm() != 0.0) {
                return Err(Error::Solver(format!("source on edge level {it}")));
            }
        }
        if self.m.topology == Topology::Line && (0..nt).any(|it| f.at(it, 0).norm() != 0.0 || f.at(it, nx - 1).norm() != 0.0) {
            return Err(Error::Solver("source on a pinned boundary node".into()));
        }
        Ok(())
    }

    fn complexify(&self, f: &GridField, op: impl Fn(&[f64]) -> Vec<f64>) -> GridField {
        let re = op(&f.re());
        if f.is_real() {
            return GridField::from_real(f.nt, f.nx, &re);
        }
        let im = op(&f.im());
        GridField::from_parts(f.nt, f.nx, &re, &im)
    }

    /// Source density `sqrt|g| f` of a function.
    pub fn density(&self, f: &GridField) -> GridField {
        GridField { values: f.values.iter().zip(&self.sqrtg).map(|(z, s)| z * s).collect(), ..f.clone() }
    }

    /// `E+ f` or `E- f`.
    pub fn fundamental_solution(&self, f: &GridField, kind: Kind) -> Result<GridField> {
        self.check_source(f)?;
        let s = self.density(f);
        Ok(self.complexify(&s, |v| self.fundamental_real(v, kind)))
    }

    /// `E f = E- f - E+ f`.
    pub fn propagator(&self, f: &GridField) -> Result<GridField> {
        let adv = self.fundamental_solution(f, Kind::Advanced)?;
        let ret = self.fundamental_solution(f, Kind::Retarded)?;
        Ok(adv.sub(&ret))
    }

    /// `E` applied to a source density directly.
    pub fn propagator_density(&self, s: &GridField) -> GridField {
        self.complexify(s, |v| {
            let a = self.fundamental_real(v, Kind::Advanced);
            let r = self.fundamental_real(v, Kind::Retarded);
            a.iter().zip(&r).map(|(x, y)| x - y).collect()
        })
    }

    /// `P phi` on interior nodes.
    pub fn apply_p(&self, phi: &GridField) -> GridField {
        let a = self.complexify(phi, |v| self.apply_a_real(v));
        GridField { values: a.values.iter().zip(&self.sqrtg).map(|(z, s)| z / s).collect(), ..a }
    }

    /// `E(f, f') = sum f E f' dvol`.
    pub fn pairing(&self, f: &GridField, g: &GridField) -> Result<Complex64> {
        let eg = self.propagator(g)?;
        Ok(self.integrate(&f.values.iter().zip(&eg.values).map(|(a, b)| a * b).collect::<Vec<_>>()))
    }

    /// `sum u dvol` over the grid.
    pub fn integrate(&self, u: &[Complex64]) -> Complex64 {
        let w = self.m.dt * self.m.dx;
        u.iter().zip(&self.sqrtg).map(|(z, s)| z * (s * w)).sum()
    }

    /// `max |P phi| / max |phi|`.
    pub fn residual(&self, phi: &GridField) -> f64 {
        let scale = phi.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        self.apply_p(phi).max_abs() / scale
    }

    pub fn is_solution(&self, phi: &GridField) -> bool {
        self.residual(phi) <= SOLUTION_TOL
    }

    pub fn cauchy_data(&self, phi: &GridField, level: usize) -> CauchyData {
        let nx = self.m.nx;
        let pr = self.momentum_real(&phi.re(), level);
        let pi_ = if phi.is_real() { vec![0.0; nx] } else { self.momentum_real(&phi.im(), level) };
        let inv = 1.0 / self.m.dx;
        CauchyData {
            level,
            phi: phi.values[level * nx..(level + 1) * nx].to_vec(),
            pi: pr.iter().zip(&pi_).map(|(a, b)| Complex64::new(a * inv, b * inv)).collect(),
        }
    }

    pub fn solve_cauchy(&self, data: &CauchyData, direction: Direction) -> GridField {
        let nx = self.m.nx;
        let dx = self.m.dx;
        let run = |phi: Vec<f64>, pi: Vec<f64>| -> Vec<f64> {
            let p: Vec<f64> = pi.iter().map(|x| x * dx).collect();
            let full = self.evolve_real(data.level, &phi, &p);
            match direction {
                Direction::Forward => {
                    let mut v = full;
                    v[..data.level * nx].iter_mut().for_each(|x| *x = 0.0);
                    v
                }
                Direction::Backward => {
                    let mut v = full;
                    v[(data.level + 1) * nx..].iter_mut().for_each(|x| *x = 0.0);
                    v
                }
            }
        };
        let re = run(data.phi.iter().map(|z| z.re).collect(), data.pi.iter().map(|z| z.re).collect());
        let im = run(data.phi.iter().map(|z| z.im).collect(), data.pi.iter().map(|z| z.im).collect());
        GridField::from_parts(self.m.nt, nx, &re, &im)
    }

    /// Full-window solution with the given data.
    pub fn evolve(&self, data: &CauchyData) -> GridField {
        let dx = self.m.dx;
        let part = |f: fn(&Complex64) -> f64| {
            let phi: Vec<f64> = data.phi.iter().map(f).collect();
            let p: Vec<f64> = data.pi.iter().map(|z| f(z) * dx).collect();
            self.evolve_real(data.level, &phi, &p)
        };
        GridField::from_parts(self.m.nt, self.m.nx, &part(|z| z.re), &part(|z| z.im))
    }

    /// `sigma(phi, phi')` on level `level`, bilinear.
    pub fn symplectic_form(&self, phi: &GridField, psi: &GridField, level: usize) -> Result<Complex64> {
        for (name, f) in [("first", phi), ("second", psi)] {
            let r = self.residual(f);
            if r > SOLUTION_TOL {
                return Err(Error::Solver(format!("{name} argument is not a solution (residual {r:.3e})")));
            }
        }
        Ok(self.sigma_unchecked(phi, psi, level))
    }

    pub fn sigma_unchecked(&self, phi: &GridField, psi: &GridField, level: usize) -> Complex64 {
        sigma_data(&self.cauchy_data(phi, level), &self.cauchy_data(psi, level), self.m.dx)
    }

    /// Relative Cauchy evolution of a solution: data on the last level are
    /// carried to the first level through `g + h`, then evolved with `g`.
    pub fn rce(&self, h: &MetricPerturbation, phi: &GridField) -> Result<GridField> {
        let mh = lattice::perturb(&self.m, h)?;
        let sh = Solver::new(&mh, self.mass);
        Ok(self.complexify(phi, |v| self.rce_real(&sh, v)))
    }

    /// As [`Solver::rce`] with a prebuilt perturbed solver.
    pub fn rce_real(&self, perturbed: &Solver, field: &[f64]) -> Vec<f64> {
        let (nt, nx) = (self.m.nt, self.m.nx);
        let top = nt - 1;
        let phi = field[top * nx..].to_vec();
        let p = self.momentum_real(field, top);
        let (q0, p0) = perturbed.transport_real(top, 0, &phi, &p);
        self.evolve_real(0, &q0, &p0)
    }

    /// Level-to-level map of `rce` on data at level `n`.
    pub fn rce_data_real(&self, perturbed: &Solver, n: usize, phi: &[f64], p: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let top = self.m.nt - 1;
        let (a, b) = self.transport_real(n, top, phi, p);
        let (c, d) = perturbed.transport_real(top, 0, &a, &b);
        self.transport_real(0, n, &c, &d)
    }

    /// `P_{g+h} phi - P_g phi`.
    pub fn perturbation_operator(&self, h: &MetricPerturbation, phi: &GridField) -> Result<GridField> {
        let mh = lattice::perturb(&self.m, h)?;
        let sh = Solver::new(&mh, self.mass);
        Ok(sh.apply_p(phi).sub(&self.apply_p(phi)))
    }

    /// Charge `sum p = dx sum pi` on a level.
    pub fn charge(&self, phi: &GridField, level: usize) -> Complex64 {
        let d = self.cauchy_data(phi, level);
        d.pi.iter().sum::<Complex64>() * self.m.dx
    }
}

/// `dx sum (phi pi' - phi' pi)`.
pub fn sigma_data(a: &CauchyData, b: &CauchyData, dx: f64) -> Complex64 {
    let s: Complex64 = a
        .phi
        .iter()
        .zip(&b.pi)
        .zip(b.phi.iter().zip(&a.pi))
        .map(|((f, pp), (g, p))| f * pp - g * p)
        .sum();
    s * dx
}

/// Smooth step in time: 1 up to level `lo`, 0 from level `hi` on, with a
/// bump-integral transition.
pub fn time_step_profile(nt: usize, lo: usize, hi: usize) -> Vec<f64> {
    let mut out = vec![0.0; nt];
    let width = (hi - lo) as f64;
    for (n, v) in out.iter_mut().enumerate() {
        *v = if n <= lo {
            1.0
        } else if n >= hi {
            0.0
        } else {
            let s = (n - lo) as f64 / width;
            let a = smooth_zero(1.0 - s);
            let b = smooth_zero(s);
            a / (a + b)
        };
    }
    out
}

fn smooth_zero(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// `f = P(chi phi)` with `chi` a smoothed step between levels `lo < hi` of
/// `region`'s levels; `E f = phi` for solutions.
pub fn chi_projector(s: &Solver, region: &lattice::Region, phi: &GridField) -> Result<GridField> {
    let (lo, hi) = region.level_range().ok_or_else(|| Error::Region("empty region".into()))?;
    if hi < lo + 4 {
        return Err(Error::Region(format!("levels {lo}..{hi} too thin for the cut-off (need 4)")));
    }
    let chi = time_step_profile(s.nt(), lo + 1, hi - 1);
    let nx = s.nx();
    let mut cut = phi.clone();
    for (k, z) in cut.values.iter_mut().enumerate() {
        *z *= chi[k / nx];
    }
    let f = s.apply_p(&cut);
    if !f.support(&s.m).is_subset_of(region) {
        return Err(Error::Region("cut-off source leaves the region".into()));
    }
    Ok(f)
}
