//! 1+1 dimensional lattice spacetimes: nodes `(it, ix)`, a Lorentzian metric
//! per node, metric perturbations, discrete causal cones and regions.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Line,
    Circle,
}

/// Metric components `[g_tt, g_tx, g_xx]` at one node.
pub type Metric = [f64; 3];

pub const MINKOWSKI: Metric = [1.0, 0.0, -1.0];

pub fn det(g: &Metric) -> f64 {
    g[0] * g[2] - g[1] * g[1]
}

/// Coordinate speeds `dx/dt` of the two null directions.
pub fn null_speeds(g: &Metric) -> (f64, f64) {
    let disc = (g[1] * g[1] - g[0] * g[2]).sqrt();
    ((-g[1] - disc) / g[2], (-g[1] + disc) / g[2])
}

/// Inverse metric `[g^tt, g^tx, g^xx]`.
pub fn inverse(g: &Metric) -> Metric {
    let d = det(g);
    [g[2] / d, -g[1] / d, g[0] / d]
}

/// Compactly supported smooth bump `exp(1 - 1/(1 - r^2))`, one at the centre.
pub fn bump(r2: f64) -> f64 {
    if r2 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r2)).exp()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum MetricSpec {
    Minkowski,
    /// `N(x)^2 dt^2 - dx^2` with lapse `N = 1 + amp * exp(-((x - center)/width)^2)`.
    Static { amp: f64, center: f64, width: f64 },
    /// `Omega^2 (dt^2 - dx^2)` with
    /// `Omega^2 = 1 + amp * exp(-((t - t_c)^2 + (x - x_c)^2)/width^2) + wave * sin(k x) cos(t)`.
    Conformal {
        amp: f64,
        t_c: f64,
        x_c: f64,
        width: f64,
        #[serde(default)]
        wave: f64,
        #[serde(default)]
        k: f64,
    },
    /// Per-node triples, row-major over `(it, ix)`.
    Explicit { values: Vec<Metric> },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Tt,
    Tx,
    Xx,
}

impl Component {
    pub fn index(self) -> usize {
        match self {
            Component::Tt => 0,
            Component::Tx => 1,
            Component::Xx => 2,
        }
    }
}

/// Smooth bump in one metric component, centred at node coordinates
/// `(t, x)` (in units of levels and cells) with radii `rt`, `rx`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BumpSpec {
    pub component: Component,
    pub amp: f64,
    pub t: f64,
    pub x: f64,
    pub rt: f64,
    pub rx: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpacetimeConfig {
    pub topology: Topology,
    pub nx: usize,
    pub nt: usize,
    pub dx: f64,
    pub dt: f64,
    #[serde(default)]
    pub t0: f64,
    pub metric: MetricSpec,
    #[serde(default)]
    pub perturbations: Vec<BumpSpec>,
}

#[derive(Clone, Debug)]
pub struct LatticeSpacetime {
    pub topology: Topology,
    pub nx: usize,
    pub nt: usize,
    pub dx: f64,
    pub dt: f64,
    pub t0: f64,
    pub metric: Vec<Metric>,
}

impl LatticeSpacetime {
    pub fn node(&self, it: usize, ix: usize) -> usize {
        it * self.nx + ix
    }

    pub fn g(&self, it: usize, ix: usize) -> &Metric {
        &self.metric[it * self.nx + ix]
    }

    pub fn x(&self, ix: usize) -> f64 {
        ix as f64 * self.dx
    }

    pub fn t(&self, it: usize) -> f64 {
        self.t0 + it as f64 * self.dt
    }

    pub fn len(&self) -> usize {
        self.nx * self.nt
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Spatial neighbour, `None` past a Line boundary.
    pub fn shift(&self, ix: usize, d: isize) -> Option<usize> {
        let j = ix as isize + d;
        match self.topology {
            Topology::Circle => Some(j.rem_euclid(self.nx as isize) as usize),
            Topology::Line => (j >= 0 && j < self.nx as isize).then_some(j as usize),
        }
    }

    /// Signed spatial separation `x - x0` in cells, shortest on the circle.
    pub fn separation(&self, x: f64, x0: f64) -> f64 {
        let d = x - x0;
        match self.topology {
            Topology::Line => d,
            Topology::Circle => {
                let n = self.nx as f64;
                d - n * (d / n).round()
            }
        }
    }

    pub fn max_speed(&self) -> f64 {
        self.metric
            .iter()
            .map(|g| {
                let (a, b) = null_speeds(g);
                a.abs().max(b.abs())
            })
            .fold(0.0, f64::max)
    }

    /// Cells a signal may advance per level.
    pub fn cone_reach(&self) -> usize {
        ((self.max_speed() * self.dt / self.dx).ceil() as usize).max(1)
    }

    pub fn build(cfg: &SpacetimeConfig) -> Result<Self> {
        if cfg.nx < 3 || cfg.nt < 3 {
            return Err(Error::Spacetime(format!("grid {}x{} too small", cfg.nt, cfg.nx)));
        }
        if !(cfg.dx > 0.0 && cfg.dt > 0.0) {
            return Err(Error::Spacetime("spacings must be positive".into()));
        }
        let mut m = LatticeSpacetime {
            topology: cfg.topology,
            nx: cfg.nx,
            nt: cfg.nt,
            dx: cfg.dx,
            dt: cfg.dt,
            t0: cfg.t0,
            metric: vec![MINKOWSKI; cfg.nx * cfg.nt],
        };
        match &cfg.metric {
            MetricSpec::Minkowski => {}
            MetricSpec::Static { amp, center, width } => {
                for it in 0..m.nt {
                    for ix in 0..m.nx {
                        let s = m.separation(m.x(ix), *center) / width;
                        let lapse = 1.0 + amp * (-s * s).exp();
                        m.metric[it * m.nx + ix] = [lapse * lapse, 0.0, -1.0];
                    }
                }
            }
            MetricSpec::Conformal { amp, t_c, x_c, width, wave, k } => {
                for it in 0..m.nt {
                    for ix in 0..m.nx {
                        let (t, x) = (m.t(it), m.x(ix));
                        let sx = m.separation(x, *x_c);
                        let r2 = ((t - t_c).powi(2) + sx * sx) / (width * width);
                        let w = 1.0 + amp * (-r2).exp() + wave * (k * x).sin() * t.cos();
                        m.metric[it * m.nx + ix] = [w, 0.0, -w];
                    }
                }
            }
            MetricSpec::Explicit { values } => {
                if values.len() != m.len() {
                    return Err(Error::Spacetime(format!(
                        "explicit metric has {} nodes, grid has {}",
                        values.len(),
                        m.len()
                    )));
                }
                m.metric = values.clone();
            }
        }
        m.validate()?;
        if !cfg.perturbations.is_empty() {
            let h = MetricPerturbation::from_bumps(&m, &cfg.perturbations);
            m = perturb(&m, &h)?;
        }
        Ok(m)
    }

    /// Signature, time-function and CFL checks, reporting the first bad node.
    pub fn validate(&self) -> Result<()> {
        validate_metric(self.nt, self.nx, self.dx, self.dt, &self.metric)
    }

    pub fn minkowski(topology: Topology, nx: usize, nt: usize, dx: f64, dt: f64) -> Result<Self> {
        Self::build(&SpacetimeConfig {
            topology,
            nx,
            nt,
            dx,
            dt,
            t0: 0.0,
            metric: MetricSpec::Minkowski,
            perturbations: vec![],
        })
    }
}

fn validate_metric(nt: usize, nx: usize, dx: f64, dt: f64, metric: &[Metric]) -> Result<()> {
    for (k, g) in metric.iter().enumerate() {
        let (it, ix) = (k / nx, k % nx);
        if !g.iter().all(|v| v.is_finite()) {
            return Err(Error::Spacetime(format!("non-finite metric at ({it}, {ix})")));
        }
        if !(g[0] > 0.0) {
            return Err(Error::Spacetime(format!("g_tt = {} <= 0 at ({it}, {ix})", g[0])));
        }
        if !(det(g) < 0.0) {
            return Err(Error::Spacetime(format!("det g = {} >= 0 at ({it}, {ix})", det(g))));
        }
        if !(g[2] < 0.0) {
            return Err(Error::Spacetime(format!("t is not a time function at ({it}, {ix}): g_xx = {}", g[2])));
        }
        let (a, b) = null_speeds(g);
        if !(a * b < 0.0) {
            return Err(Error::Spacetime(format!("null speeds {a}, {b} not of opposite sign at ({it}, {ix})")));
        }
        let c = a.abs().max(b.abs());
        if !(dt * c < dx) {
            return Err(Error::Spacetime(format!("CFL violated at ({it}, {ix}): dt*c = {} >= dx = {dx}", dt * c)));
        }
    }
    let _ = nt;
    Ok(())
}

/// Symmetric perturbation `h` per node with its explicit support.
#[derive(Clone, Debug)]
pub struct MetricPerturbation {
    pub h: Vec<Metric>,
}

impl MetricPerturbation {
    pub fn zero(m: &LatticeSpacetime) -> Self {
        MetricPerturbation { h: vec![[0.0; 3]; m.len()] }
    }

    pub fn from_bumps(m: &LatticeSpacetime, bumps: &[BumpSpec]) -> Self {
        let mut p = Self::zero(m);
        for b in bumps {
            for it in 0..m.nt {
                for ix in 0..m.nx {
                    let st = (it as f64 - b.t) / b.rt;
                    let sx = m.separation(ix as f64, b.x) / b.rx;
                    let v = bump(st * st + sx * sx);
                    if v > 0.0 {
                        p.h[it * m.nx + ix][b.component.index()] += b.amp * v;
                    }
                }
            }
        }
        p
    }

    pub fn support(&self, m: &LatticeSpacetime) -> Region {
        let mask = self.h.iter().map(|h| h.iter().any(|&v| v != 0.0)).collect();
        Region::from_mask(m, mask, RegionKind::Generic)
    }

    pub fn scaled(&self, s: f64) -> Self {
        MetricPerturbation { h: self.h.iter().map(|h| [s * h[0], s * h[1], s * h[2]]).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.h.iter().all(|h| h.iter().all(|&v| v == 0.0))
    }
}

/// Levels kept free of perturbations at either end of the window.
pub const EDGE_LEVELS: usize = 2;

/// Support rules for `h`: away from the first and last levels and, on a
/// Line, at least `line_margin` cells from each end.
pub fn check_support(m: &LatticeSpacetime, h: &MetricPerturbation) -> Result<()> {
    let margin = line_margin(m);
    for (k, v) in h.h.iter().enumerate() {
        if v.iter().all(|&x| x == 0.0) {
            continue;
        }
        let (it, ix) = (k / m.nx, k % m.nx);
        if it < EDGE_LEVELS || it + EDGE_LEVELS >= m.nt {
            return Err(Error::Spacetime(format!("perturbation at ({it}, {ix}) too close to the window edge")));
        }
        if m.topology == Topology::Line && (ix < margin || ix + margin >= m.nx) {
            return Err(Error::Spacetime(format!(
                "perturbation at ({it}, {ix}) inside the {margin}-cell boundary margin"
            )));
        }
    }
    Ok(())
}

/// Boundary margin on a Line: the distance a signal covers while crossing
/// the edge levels around the perturbation, plus one cell.
pub fn line_margin(m: &LatticeSpacetime) -> usize {
    m.cone_reach() * (EDGE_LEVELS + 1) + 1
}

/// `M[h]` with metric `g + h`.
pub fn perturb(m: &LatticeSpacetime, h: &MetricPerturbation) -> Result<LatticeSpacetime> {
    if h.h.len() != m.len() {
        return Err(Error::Shape(format!("perturbation has {} nodes, grid has {}", h.h.len(), m.len())));
    }
    if h.is_zero() {
        return Ok(m.clone());
    }
    check_support(m, h)?;
    let metric: Vec<Metric> =
        m.metric.iter().zip(&h.h).map(|(g, d)| [g[0] + d[0], g[1] + d[1], g[2] + d[2]]).collect();
    validate_metric(m.nt, m.nx, m.dx, m.dt, &metric)?;
    Ok(LatticeSpacetime { metric, ..m.clone() })
}

/// Margin by which `h` stays inside the set of valid metrics, as the
/// smallest ratio of `|g_tt|`, `|det g|`, `|g_xx|` and CFL slack to their
/// changes.
pub fn signature_margin(g: &Metric) -> f64 {
    g[0].abs().min(g[2].abs()).min(det(g).abs().sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Diamond,
    MultiDiamond,
    Generic,
}

/// Node interval `x0..=x1` at level `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, PartialOrd, Ord)]
pub struct Interval {
    pub t: usize,
    pub x0: usize,
    pub x1: usize,
}

impl Interval {
    pub fn len(&self) -> usize {
        self.x1 + 1 - self.x0
    }

    pub fn is_empty(&self) -> bool {
        self.x1 < self.x0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub nt: usize,
    pub nx: usize,
    pub mask: Vec<bool>,
    pub kind: RegionKind,
    /// Base intervals for diamonds.
    pub bases: Vec<Interval>,
}

impl Region {
    pub fn empty(m: &LatticeSpacetime) -> Self {
        Region { nt: m.nt, nx: m.nx, mask: vec![false; m.len()], kind: RegionKind::Generic, bases: vec![] }
    }

    pub fn from_mask(m: &LatticeSpacetime, mask: Vec<bool>, kind: RegionKind) -> Self {
        assert_eq!(mask.len(), m.len());
        Region { nt: m.nt, nx: m.nx, mask, kind, bases: vec![] }
    }

    pub fn from_sites(m: &LatticeSpacetime, sites: &[(usize, usize)]) -> Self {
        let mut r = Self::empty(m);
        for &(it, ix) in sites {
            r.mask[it * m.nx + ix] = true;
        }
        r
    }

    /// All nodes on levels `t_lo..=t_hi`.
    pub fn slab(m: &LatticeSpacetime, t_lo: usize, t_hi: usize) -> Self {
        let mut r = Self::empty(m);
        for it in t_lo..=t_hi.min(m.nt - 1) {
            for ix in 0..m.nx {
                r.mask[it * m.nx + ix] = true;
            }
        }
        r
    }

    pub fn contains(&self, it: usize, ix: usize) -> bool {
        self.mask[it * self.nx + ix]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn sites(&self) -> Vec<(usize, usize)> {
        (0..self.mask.len()).filter(|&k| self.mask[k]).map(|k| (k / self.nx, k % self.nx)).collect()
    }

    pub fn union(&self, other: &Region) -> Region {
        let mut r = self.clone();
        for (a, &b) in r.mask.iter_mut().zip(&other.mask) {
            *a |= b;
        }
        r.kind = RegionKind::Generic;
        r.bases.extend(other.bases.iter().copied());
        r
    }

    pub fn intersects(&self, other: &Region) -> bool {
        self.mask.iter().zip(&other.mask).any(|(&a, &b)| a && b)
    }

    pub fn is_subset_of(&self, other: &Region) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    /// Levels occupied.
    pub fn level_range(&self) -> Option<(usize, usize)> {
        let levels: Vec<usize> = self.sites().iter().map(|s| s.0).collect();
        Some((*levels.iter().min()?, *levels.iter().max()?))
    }

    /// 8-connected components (wrapping in x on a circle).
    pub fn components(&self, m: &LatticeSpacetime) -> Vec<Region> {
        let mut seen = vec![false; self.mask.len()];
        let mut out = Vec::new();
        for start in 0..self.mask.len() {
            if !self.mask[start] || seen[start] {
                continue;
            }
            let mut comp = vec![false; self.mask.len()];
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(k) = stack.pop() {
                comp[k] = true;
                let (it, ix) = (k / self.nx, k % self.nx);
                for dt in -1isize..=1 {
                    let jt = it as isize + dt;
                    if jt < 0 || jt >= self.nt as isize {
                        continue;
                    }
                    for dx in -1isize..=1 {
                        if let Some(jx) = m.shift(ix, dx) {
                            let q = jt as usize * self.nx + jx;
                            if self.mask[q] && !seen[q] {
                                seen[q] = true;
                                stack.push(q);
                            }
                        }
                    }
                }
            }
            out.push(Region::from_mask(m, comp, RegionKind::Generic));
        }
        out
    }
}

fn sweep(m: &LatticeSpacetime, k: &Region, forward: bool) -> Region {
    let r = m.cone_reach() as isize;
    let mut out = k.clone();
    out.kind = RegionKind::Generic;
    out.bases.clear();
    let levels: Vec<usize> = if forward { (1..m.nt).collect() } else { (0..m.nt - 1).rev().collect() };
    for it in levels {
        let prev = if forward { it - 1 } else { it + 1 };
        for ix in 0..m.nx {
            if out.mask[it * m.nx + ix] {
                continue;
            }
            let hit = (-r..=r).any(|d| m.shift(ix, d).map(|j| out.mask[prev * m.nx + j]).unwrap_or(false));
            if hit {
                out.mask[it * m.nx + ix] = true;
            }
        }
    }
    out
}

pub fn causal_future(m: &LatticeSpacetime, k: &Region) -> Region {
    sweep(m, k, true)
}

pub fn causal_past(m: &LatticeSpacetime, k: &Region) -> Region {
    sweep(m, k, false)
}

/// `J+(K) ∪ J-(K)`.
pub fn causal_shadow(m: &LatticeSpacetime, k: &Region) -> Region {
    causal_future(m, k).union(&causal_past(m, k))
}

/// Nodes outside `J(K)` and not adjacent (3x3) to it.
pub fn causal_complement(m: &LatticeSpacetime, k: &Region) -> Region {
    let j = causal_shadow(m, k);
    let mut mask = vec![true; m.len()];
    for (it, ix) in j.sites() {
        for dt in -1isize..=1 {
            let jt = it as isize + dt;
            if jt < 0 || jt >= m.nt as isize {
                continue;
            }
            for dx in -1isize..=1 {
                if let Some(jx) = m.shift(ix, dx) {
                    mask[jt as usize * m.nx + jx] = false;
                }
            }
        }
    }
    Region::from_mask(m, mask, RegionKind::Generic)
}

pub fn causally_disjoint(m: &LatticeSpacetime, a: &Region, b: &Region) -> bool {
    !causal_shadow(m, a).intersects(b)
}

/// Discrete Cauchy development of the node interval: nodes whose past (or
/// future) cone meets level `t` only inside the interval.
pub fn development(m: &LatticeSpacetime, base: Interval) -> Result<Region> {
    if base.t >= m.nt || base.x1 >= m.nx || base.x0 > base.x1 {
        return Err(Error::Region(format!("bad interval {base:?}")));
    }
    let r = m.cone_reach();
    let mut mask = vec![false; m.len()];
    for ix in base.x0..=base.x1 {
        mask[base.t * m.nx + ix] = true;
    }
    let full = base.len() >= m.nx;
    for dir in [1isize, -1] {
        let mut it = base.t as isize;
        loop {
            let next = it + dir;
            if next < 0 || next >= m.nt as isize {
                break;
            }
            let mut any = false;
            for ix in 0..m.nx {
                let ok = (-(r as isize)..=r as isize).all(|d| {
                    m.shift(ix, d).map(|j| mask[it as usize * m.nx + j]).unwrap_or(false)
                });
                if ok || full {
                    mask[next as usize * m.nx + ix] = true;
                    any = true;
                }
            }
            if !any {
                break;
            }
            it = next;
        }
    }
    if full && m.topology == Topology::Line {
        return Err(Error::Region("full-surface interval on a line has no compact development".into()));
    }
    let dev = Region { nt: m.nt, nx: m.nx, mask, kind: RegionKind::Diamond, bases: vec![base] };
    // relative compactness in the window: the development must close off
    // before the first and last levels
    if !full {
        let (lo, hi) = dev.level_range().expect("nonempty");
        if lo == 0 || hi == m.nt - 1 {
            return Err(Error::Region(format!("development of {base:?} reaches the window edge")));
        }
        if m.topology == Topology::Line && (base.x0 == 0 || base.x1 == m.nx - 1) {
            return Err(Error::Region(format!("interval {base:?} touches the line boundary")));
        }
    }
    Ok(dev)
}

/// Union of developments of pairwise causally disjoint intervals.
pub fn diamond(m: &LatticeSpacetime, bases: &[Interval]) -> Result<Region> {
    if bases.is_empty() {
        return Err(Error::Region("no intervals".into()));
    }
    let parts: Vec<Region> = bases.iter().map(|&b| development(m, b)).collect::<Result<_>>()?;
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            if !causally_disjoint(m, &parts[i], &parts[j]) {
                return Err(Error::Region(format!(
                    "components {:?} and {:?} are not causally disjoint",
                    bases[i], bases[j]
                )));
            }
        }
    }
    let mut r = parts[0].clone();
    for p in &parts[1..] {
        r = r.union(p);
    }
    r.kind = if bases.len() == 1 { RegionKind::Diamond } else { RegionKind::MultiDiamond };
    r.bases = bases.to_vec();
    Ok(r)
}

/// Nodes cut from each end of a base interval before subdividing it.
pub const KB_SHRINK: usize = 2;

/// Dyadic levels used by [`enumerate_kb`].
pub const KB_LEVELS: usize = 3;

/// Split `lo..=hi` into `parts` consecutive node blocks of near-equal size.
fn split(lo: usize, hi: usize, parts: usize) -> Vec<(usize, usize)> {
    let n = hi + 1 - lo;
    (0..parts)
        .filter_map(|k| {
            let a = lo + k * n / parts;
            let b = lo + (k + 1) * n / parts;
            (b > a).then(|| (a, b - 1))
        })
        .collect()
}

/// Generator diamonds inside `O`: for each base interval of `O`, the
/// interval shrunk by one node at each end is cut into 1, 2, 4, ... blocks;
/// every block gives a diamond, and every causally disjoint pair of blocks a
/// two-component diamond.
pub fn enumerate_kb(m: &LatticeSpacetime, o: &Region) -> Result<Vec<Region>> {
    if o.bases.is_empty() {
        return Err(Error::Region("generator enumeration needs a diamond region".into()));
    }
    let mut blocks: BTreeSet<Interval> = BTreeSet::new();
    for b in &o.bases {
        if b.x1 < b.x0 + 2 * KB_SHRINK {
            continue;
        }
        let (lo, hi) = (b.x0 + KB_SHRINK, b.x1 - KB_SHRINK);
        for level in 0..KB_LEVELS {
            for (a, z) in split(lo, hi, 1 << level) {
                blocks.insert(Interval { t: b.t, x0: a, x1: z });
            }
        }
    }
    let blocks: Vec<Interval> = blocks.into_iter().collect();
    let mut out = Vec::new();
    let mut singles = Vec::new();
    for &b in &blocks {
        let d = diamond(m, &[b])?;
        singles.push(d.clone());
        out.push(d);
    }
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            let (a, b) = (blocks[i], blocks[j]);
            if a.x1 >= b.x0 && b.x1 >= a.x0 && a.t == b.t {
                continue;
            }
            if causally_disjoint(m, &singles[i], &singles[j]) {
                out.push(diamond(m, &[a, b])?);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Region("no generators fit inside the region".into()));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionSpec {
    Diamond { components: Vec<Interval> },
    Slab { t_lo: usize, t_hi: usize },
    Sites { sites: Vec<(usize, usize)> },
}

impl RegionSpec {
    pub fn build(&self, m: &LatticeSpacetime) -> Result<Region> {
        match self {
            RegionSpec::Diamond { components } => diamond(m, components),
            RegionSpec::Slab { t_lo, t_hi } => {
                if t_lo > t_hi || *t_hi >= m.nt {
                    return Err(Error::Region(format!("bad slab {t_lo}..{t_hi}")));
                }
                Ok(Region::slab(m, *t_lo, *t_hi))
            }
            RegionSpec::Sites { sites } => {
                if sites.iter().any(|&(t, x)| t >= m.nt || x >= m.nx) {
                    return Err(Error::Region("site outside the grid".into()));
                }
                Ok(Region::from_sites(m, sites))
            }
        }
    }
}
